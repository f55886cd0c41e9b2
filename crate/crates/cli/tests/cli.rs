mod common;

use std::path::Path;

use common::*;
use manifoldkit::kernels::{exp_m, orthonormality_residual, skew_part, thin_svd};
use manifoldkit::manifold::{self, ManifoldKind, ManifoldPoint, MetricTag};
use manifoldkit::{random, DenseMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shape(kind: ManifoldKind) -> (usize, usize) {
    if kind.is_square() {
        (4, 4)
    } else {
        (6, 2)
    }
}

fn write_point(dir: &Path, name: &str, p: &ManifoldPoint) -> String {
    write_matrix(&dir.join(name), p.kind().id(), p.rep());
    name.to_string()
}

fn load_point(path: &Path) -> ManifoldPoint {
    let (id, m) = read_matrix(path);
    ManifoldPoint::new(id.parse().unwrap(), m).unwrap()
}

#[test]
fn distance_from_a_file_to_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = random::point(&mut rng(1), ManifoldKind::Spd, 3, 3);
    let a = write_point(dir.path(), "a.txt", &p);
    let out = run(dir.path(), &["dist", &a, &a]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0.0000000000000000e0\n");
}

#[test]
fn exp_of_zero_tangent_reproduces_the_base() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(2);
    for kind in ManifoldKind::ALL {
        let (n, p) = shape(kind);
        let base = random::point(&mut r, kind, n, p);
        let a = write_point(dir.path(), "a.txt", &base);
        write_matrix(&dir.path().join("z.txt"), "tangent", &DenseMatrix::zeros(n, p));
        let out = run(dir.path(), &["exp", &a, "z.txt", "-o", "b.txt"]);
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let (id, m) = read_matrix(&dir.path().join("b.txt"));
        assert_eq!(id, kind.id());
        assert_eq!(&m, base.rep(), "{kind}");
    }
}

#[test]
fn log_then_exp_pipeline_reproduces_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(3);
    for kind in ManifoldKind::ALL {
        let (n, p) = shape(kind);
        let metric = kind.default_metric();
        let base = random::point(&mut r, kind, n, p);
        let radius = if kind == ManifoldKind::St { 0.05 } else { 0.4 };
        let target = random::nearby(&mut r, &base, radius, metric).unwrap();
        let a = write_point(dir.path(), "a.txt", &base);
        let b = write_point(dir.path(), "b.txt", &target);
        assert_eq!(code(&run(dir.path(), &["log", &a, &b, "-o", "v.txt"])), 0, "{kind}");
        assert_eq!(
            code(&run(dir.path(), &["exp", &a, "v.txt", "-o", "c.txt"])),
            0,
            "{kind}"
        );
        let back = load_point(&dir.path().join("c.txt"));
        let err = if kind == ManifoldKind::Gr {
            manifold::dist(&back, &target, metric).unwrap()
        } else {
            (back.rep() - target.rep()).norm()
        };
        assert!(err <= 1e-8, "{kind}: {err}");
    }
}

#[test]
fn interpolation_at_a_node_returns_the_node() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(4);
    for kind in ManifoldKind::ALL {
        let (n, p) = shape(kind);
        let metric = kind.default_metric();
        let center = random::point(&mut r, kind, n, p);
        let radius = if kind == ManifoldKind::St { 0.03 } else { 0.3 };
        let pts: Vec<_> = (0..3)
            .map(|_| random::nearby(&mut r, &center, radius, metric).unwrap())
            .collect();
        let names: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, q)| write_point(dir.path(), &format!("s{i}.txt"), q))
            .collect();
        let rows: Vec<_> = names
            .iter()
            .enumerate()
            .map(|(i, f)| (vec![i as f64], f.as_str()))
            .collect();
        write_manifest(&dir.path().join("m.txt"), &rows);
        for method in ["tangent", "geodesic", "karcher"] {
            for scheme in ["linear", "lagrange", "rbf-gaussian"] {
                let out = run(
                    dir.path(),
                    &[
                        "interp",
                        "m.txt",
                        "--mu-star",
                        "1",
                        "--method",
                        method,
                        "--scheme",
                        scheme,
                        "-o",
                        "o.txt",
                    ],
                );
                assert_eq!(
                    code(&out),
                    0,
                    "{kind} {method}: {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                let got = load_point(&dir.path().join("o.txt"));
                assert!(got.check().valid);
                assert!(
                    manifold::dist(&got, &pts[1], metric).unwrap() <= 1e-7,
                    "{kind} {method} {scheme}"
                );
                assert_eq!(
                    report_value(&dir.path().join("o.txt.report"), "status").as_deref(),
                    Some("ok")
                );
            }
        }
    }
}

#[test]
fn grassmann_geodesic_midpoint_is_equidistant() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(5);
    let a = random::point(&mut r, ManifoldKind::Gr, 7, 3);
    let b = random::nearby(&mut r, &a, 1.0, MetricTag::Canonical).unwrap();
    write_point(dir.path(), "a.txt", &a);
    write_point(dir.path(), "b.txt", &b);
    write_manifest(&dir.path().join("m.txt"), &[(vec![0.0], "a.txt"), (vec![1.0], "b.txt")]);
    let out = run(
        dir.path(),
        &[
            "interp",
            "m.txt",
            "--mu-star",
            "0.5",
            "--method",
            "geodesic",
            "-o",
            "mid.txt",
        ],
    );
    assert_eq!(code(&out), 0);
    let mid = load_point(&dir.path().join("mid.txt"));
    let da = manifold::dist(&mid, &a, MetricTag::Canonical).unwrap();
    let db = manifold::dist(&mid, &b, MetricTag::Canonical).unwrap();
    assert!((da - db).abs() <= 1e-8, "{da} {db}");
    assert!((da - 0.5).abs() <= 1e-8);
}

#[test]
fn karcher_with_equal_weights_reports_a_small_gradient() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(6);
    let c = random::point(&mut r, ManifoldKind::Spd, 3, 3);
    let names: Vec<String> = (0..3)
        .map(|i| {
            write_point(
                dir.path(),
                &format!("s{i}.txt"),
                &random::nearby(&mut r, &c, 0.8, MetricTag::Natural).unwrap(),
            )
        })
        .collect();
    // thin-plate weights on a triangle are barycentric: 1/3 each at the centroid
    write_manifest(
        &dir.path().join("m.txt"),
        &[
            (vec![0.0, 0.0], &names[0]),
            (vec![1.0, 0.0], &names[1]),
            (vec![0.0, 1.0], &names[2]),
        ],
    );
    let third = format!("{},{}", 1.0 / 3.0, 1.0 / 3.0);
    let out = run(
        dir.path(),
        &[
            "interp",
            "m.txt",
            "--mu-star",
            &third,
            "--method",
            "karcher",
            "--scheme",
            "rbf-thin-plate",
            "-o",
            "k.txt",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = dir.path().join("k.txt.report");
    let weights: Vec<f64> = report_value(&rep, "weights")
        .unwrap()
        .split(',')
        .map(|w| w.parse().unwrap())
        .collect();
    assert!(weights.iter().all(|w| (w - 1.0 / 3.0).abs() <= 1e-12));
    let g: f64 = report_value(&rep, "gradient_norm").unwrap().parse().unwrap();
    assert!(g <= 1e-9);
}

#[test]
fn extrapolation_at_zero_reproduces_the_expansion_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(7);
    let base = random::point(&mut r, ManifoldKind::St, 6, 2);
    let v = random::tangent(&mut r, &base, 0.7, MetricTag::Canonical).unwrap();
    write_point(dir.path(), "a.txt", &base);
    write_matrix(&dir.path().join("v.txt"), "tangent", v.rep());
    assert_eq!(
        code(&run(
            dir.path(),
            &[
                "extrapolate",
                "--base",
                "a.txt",
                "--tangent",
                "v.txt",
                "--mu-star",
                "0",
                "-o",
                "o.txt"
            ]
        )),
        0
    );
    assert!((read_matrix(&dir.path().join("o.txt")).1 - base.rep()).amax() <= 1e-15);

    let s = random::gaussian(&mut r, 8, 4);
    let sd = random::gaussian(&mut r, 8, 4);
    write_matrix(&dir.path().join("s.txt"), "matrix", &s);
    write_matrix(&dir.path().join("sd.txt"), "matrix", &sd);
    let args = [
        "extrapolate",
        "--snapshot",
        "s.txt",
        "--derivative",
        "sd.txt",
        "--rank",
        "2",
        "--mu-star",
        "0",
        "-o",
        "u.txt",
    ];
    assert_eq!(code(&run(dir.path(), &args)), 0);
    let u = thin_svd(&s).unwrap().u.columns(0, 2).into_owned();
    assert!((read_matrix(&dir.path().join("u.txt")).1 - u).amax() <= 1e-14);
}

#[test]
fn extrapolation_recovers_a_geodesic() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(8);
    for kind in [ManifoldKind::St, ManifoldKind::Gr, ManifoldKind::Spd, ManifoldKind::On] {
        let (n, p) = shape(kind);
        let metric = kind.default_metric();
        let base = random::point(&mut r, kind, n, p);
        let v = random::tangent(&mut r, &base, 0.6, metric).unwrap();
        write_point(dir.path(), "a.txt", &base);
        write_matrix(&dir.path().join("v.txt"), "tangent", v.rep());
        let out = run(
            dir.path(),
            &[
                "extrapolate",
                "--base",
                "a.txt",
                "--tangent",
                "v.txt",
                "--mu-star",
                "1.7",
                "-o",
                "o.txt",
            ],
        );
        assert_eq!(code(&out), 0);
        let expect = manifold::geodesic(&base, &v, 1.7, metric).unwrap();
        assert!(
            (read_matrix(&dir.path().join("o.txt")).1 - expect.rep()).amax() <= 1e-15,
            "{kind}"
        );
    }
}

// S(μ) = U(μ) Σ with U(μ) = exp_m(μW + μ²W₂) U₀ is a smooth curve whose
// thin SVD is known in closed form.
fn pod_curve(seed: u64) -> (DenseMatrix, DenseMatrix, impl Fn(f64) -> DenseMatrix) {
    let mut r = rng(seed);
    let (n, m) = (10, 3);
    let u0 = random::orthonormal(&mut r, n, m);
    let w = skew_part(&random::gaussian(&mut r, n, n));
    let w2 = skew_part(&random::gaussian(&mut r, n, n));
    let sigma = DenseMatrix::from_fn(m, m, |i, j| if i == j { (m - i) as f64 } else { 0.0 });
    let s0 = &u0 * &sigma;
    let s_dot = &w * &u0 * &sigma;
    let exact = move |mu: f64| exp_m(&(&w * mu + &w2 * (mu * mu))).unwrap() * &u0;
    (s0, s_dot, exact)
}

fn align(u: &DenseMatrix, reference: &DenseMatrix) -> DenseMatrix {
    let mut out = u.clone();
    for j in 0..u.ncols() {
        if u.column(j).dot(&reference.column(j)) < 0.0 {
            out.column_mut(j).neg_mut();
        }
    }
    out
}

#[test]
fn pod_extrapolation_error_quarters_when_mu_halves() {
    let dir = tempfile::tempdir().unwrap();
    let (s0, s_dot, exact) = pod_curve(9);
    write_matrix(&dir.path().join("s.txt"), "matrix", &s0);
    write_matrix(&dir.path().join("sd.txt"), "matrix", &s_dot);
    let mut errors = Vec::new();
    for mu in [0.08, 0.04, 0.02] {
        let m = format!("{mu}");
        let out = run(
            dir.path(),
            &[
                "extrapolate",
                "--snapshot",
                "s.txt",
                "--derivative",
                "sd.txt",
                "--rank",
                "3",
                "--mu-star",
                &m,
                "-o",
                "u.txt",
            ],
        );
        assert_eq!(code(&out), 0);
        let (id, u) = read_matrix(&dir.path().join("u.txt"));
        assert_eq!(id, "st");
        assert!(orthonormality_residual(&u) <= 1e-10);
        let reference = exact(mu);
        errors.push((align(&u, &reference) - reference).norm());
    }
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn degenerate_spectrum_names_the_index_pair() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = DenseMatrix::zeros(5, 3);
    s[(0, 0)] = 2.0;
    s[(1, 1)] = 1.0;
    s[(2, 2)] = 1.0;
    write_matrix(&dir.path().join("s.txt"), "matrix", &s);
    write_matrix(&dir.path().join("sd.txt"), "matrix", &DenseMatrix::zeros(5, 3));
    let out = run(
        dir.path(),
        &[
            "extrapolate",
            "--snapshot",
            "s.txt",
            "--derivative",
            "sd.txt",
            "--rank",
            "3",
            "--mu-star",
            "0.1",
        ],
    );
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("singular values 1 and 2"), "{err}");
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut r = rng(10);
    let a = random::point(&mut r, ManifoldKind::St, 5, 2);
    write_point(d, "a.txt", &a);
    std::fs::write(d.join("garbled.txt"), "# manifold=st n=5 p=2\n1 2\n").unwrap();
    std::fs::write(d.join("bad.txt"), "# manifold=st n=2 p=1\n1\n1\n").unwrap();
    let b = random::nearby(&mut r, &a, 0.5, MetricTag::Canonical).unwrap();
    write_point(d, "b.txt", &b);
    write_manifest(&d.join("m.txt"), &[(vec![0.0], "a.txt"), (vec![1.0], "b.txt")]);

    assert_eq!(code(&run(d, &["dist", "a.txt", "garbled.txt"])), 2);
    assert_eq!(code(&run(d, &["dist", "a.txt", "missing.txt"])), 2);
    assert_eq!(code(&run(d, &["dist", "a.txt"])), 2);
    assert_eq!(
        code(&run(
            d,
            &["interp", "m.txt", "--mu-star", "0.5", "--tau", "-1", "-o", "o.txt"]
        )),
        2
    );
    assert_eq!(code(&run(d, &["dist", "a.txt", "bad.txt"])), 3);
    assert_eq!(
        code(&run(
            d,
            &[
                "interp",
                "m.txt",
                "--mu-star",
                "4",
                "--method",
                "geodesic",
                "-o",
                "o.txt"
            ]
        )),
        3
    );
    let out = run(
        d,
        &[
            "interp",
            "m.txt",
            "--mu-star",
            "0.5",
            "--method",
            "karcher",
            "--max-iter",
            "0",
            "-o",
            "o.txt",
        ],
    );
    assert_eq!(code(&out), 4);
    assert_eq!(
        report_value(&d.join("o.txt.report"), "status").as_deref(),
        Some("no-convergence")
    );
    assert_eq!(code(&run(d, &["--config", "cfg.toml", "log", "a.txt", "b.txt"])), 2);
    std::fs::write(d.join("cfg.toml"), "stiefel_max_iter = 1\n").unwrap();
    assert_eq!(code(&run(d, &["--config", "cfg.toml", "log", "a.txt", "b.txt"])), 4);
}

#[test]
fn config_file_is_read_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut r = rng(11);
    let a = random::point(&mut r, ManifoldKind::Spd, 3, 3);
    for i in 0..3 {
        write_point(
            d,
            &format!("s{i}.txt"),
            &random::nearby(&mut r, &a, 0.3, MetricTag::Natural).unwrap(),
        );
    }
    write_manifest(
        &d.join("m.txt"),
        &[(vec![0.0], "s0.txt"), (vec![1.0], "s1.txt"), (vec![2.0], "s2.txt")],
    );
    std::fs::write(d.join("cfg.toml"), "scheme = \"lagrange\"\nbase = \"medoid\"\n").unwrap();
    let out = bin()
        .current_dir(d)
        .env("MANIFOLDKIT_CONFIG", d.join("cfg.toml"))
        .args(["interp", "m.txt", "--mu-star", "0.5", "-o", "o.txt"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(
        report_value(&d.join("o.txt.report"), "scheme").as_deref(),
        Some("lagrange")
    );
    std::fs::write(d.join("cfg.toml"), "karcher_tau = 0.0\n").unwrap();
    let out = bin()
        .current_dir(d)
        .env("MANIFOLDKIT_CONFIG", d.join("cfg.toml"))
        .args(["interp", "m.txt", "--mu-star", "0.5", "-o", "o.txt"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn outputs_are_deterministic_and_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut r = rng(12);
    let a = random::point(&mut r, ManifoldKind::Gr, 8, 3);
    let names: Vec<String> = (0..4)
        .map(|i| {
            write_point(
                d,
                &format!("s{i}.txt"),
                &random::nearby(&mut r, &a, 0.4, MetricTag::Canonical).unwrap(),
            )
        })
        .collect();
    let rows: Vec<_> = names
        .iter()
        .enumerate()
        .map(|(i, f)| (vec![i as f64], f.as_str()))
        .collect();
    write_manifest(&d.join("m.txt"), &rows);
    let mus = ["0.3", "1.1", "1.9", "2.6", "0.7"];
    let mut runs = Vec::new();
    for (k, jobs) in ["1", "3", "3"].iter().enumerate() {
        let mut args = vec![
            "interp", "m.txt", "--method", "karcher", "--scheme", "lagrange", "--jobs", jobs,
        ];
        for m in &mus {
            args.extend(["--mu-star", m]);
        }
        let out_t = format!("run{k}_{{}}.txt");
        args.extend(["-o", &out_t]);
        assert_eq!(code(&run(d, &args)), 0);
        let bytes: Vec<Vec<u8>> = (0..mus.len())
            .flat_map(|i| {
                let o = d.join(format!("run{k}_{i}.txt"));
                let mut rep = o.clone().into_os_string();
                rep.push(".report");
                [std::fs::read(&o).unwrap(), std::fs::read(rep).unwrap()]
            })
            .collect();
        runs.push(bytes);
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn golden_outputs() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cases: [(&[&str], &str); 5] = [
        (&["exp", "st_base.txt", "st_tangent.txt"], "st_exp.txt"),
        (&["log", "st_base.txt", "st_target.txt"], "st_log.txt"),
        (&["dist", "spd_a.txt", "spd_b.txt"], "spd_dist.txt"),
        (
            &["interp", "gr_manifest.txt", "--mu-star", "0.5", "-o", "-"],
            "gr_interp.txt",
        ),
        (
            &[
                "extrapolate",
                "--snapshot",
                "snap.txt",
                "--derivative",
                "snap_dot.txt",
                "--rank",
                "2",
                "--mu-star",
                "0.1",
            ],
            "pod.txt",
        ),
    ];
    for (args, expected) in cases {
        let dir = tempfile::tempdir().unwrap();
        for entry in std::fs::read_dir(&golden).unwrap() {
            let entry = entry.unwrap();
            std::fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
        }
        let args: Vec<&str> = args.iter().map(|a| if *a == "-" { "out.txt" } else { a }).collect();
        let out = run(dir.path(), &args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let produced = if args.contains(&"out.txt") {
            std::fs::read_to_string(dir.path().join("out.txt")).unwrap()
        } else {
            stdout(&out)
        };
        let want = std::fs::read_to_string(golden.join(expected)).unwrap();
        assert_eq!(produced, want, "{expected}");
    }
}
