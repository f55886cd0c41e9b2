//! Default tolerance constants. Every public operation that takes a
//! tolerance falls back to one of these.

/// Membership and tangency predicates (Frobenius residuals).
pub const MEMBERSHIP: f64 = 1e-8;

/// Round-trip assertions such as `exp(p, log(p, q)) ≈ q`.
pub const ROUND_TRIP: f64 = 1e-9;

/// Reciprocal condition number below which a matrix counts as singular.
pub const SINGULARITY: f64 = 1e-12;

/// SPD threshold: `λ_min > DEFINITENESS · λ_max`.
pub const DEFINITENESS: f64 = 1e-12;

/// Eigenangles with `|θ| > π − ANTIPODAL` are treated as `λ = −1`.
pub const ANTIPODAL: f64 = 1e-6;

/// Tunable tolerances, overriding the defaults above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub membership: f64,
    pub round_trip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: MEMBERSHIP,
            round_trip: ROUND_TRIP,
        }
    }
}
