use std::path::{Path, PathBuf};

use manifoldkit::interp::{self, SampleSet};
use manifoldkit::kernels::orthonormality_residual;
use manifoldkit::manifold::{self, ManifoldKind, ManifoldPoint, MetricTag, TangentVector};
use manifoldkit::Error;

use crate::cli::{Cli, Command, ExtrapolateArgs, InterpArgs, Method};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::matrix_file::{format_real, write_atomic, FileKind, MatrixFile};

/// POD bases are checked against this orthonormality residual before writing.
const POD_MEMBERSHIP: f64 = 1e-10;

pub struct Context {
    pub cfg: RunConfig,
    pub validate: bool,
}

impl Context {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(m) = cli.metric {
            cfg.metric = Some(m);
        }
        if let Some(t) = cli.membership_tol {
            cfg.membership_tol = t;
        }
        if let Some(t) = cli.round_trip_tol {
            cfg.round_trip_tol = t;
        }
        if let Command::Interp(args) = &cli.command {
            if let Some(s) = args.scheme {
                cfg.scheme = s;
            }
            if let Some(s) = args.shape {
                cfg.rbf_shape = s;
            }
            if args.normalize {
                cfg.rbf_normalize = true;
            }
            if let Some(b) = args.base {
                cfg.base = b;
            }
            if let Some(t) = args.tau {
                cfg.karcher_tau = t;
            }
            if let Some(n) = args.max_iter {
                cfg.max_iter = n;
            }
        }
        cfg.validate()?;
        Ok(Context {
            cfg,
            validate: !cli.no_validate,
        })
    }

    fn metric(&self, kind: ManifoldKind) -> MetricTag {
        self.cfg.metric.unwrap_or(kind.default_metric())
    }

    fn point(&self, path: &Path) -> Result<ManifoldPoint, CliError> {
        let file = MatrixFile::read(path)?;
        let FileKind::Point(kind) = file.kind else {
            return Err(CliError::Usage(format!(
                "{}: expected a manifold point, found a '{}' file",
                path.display(),
                file.kind
            )));
        };
        if self.validate {
            Ok(ManifoldPoint::with_tolerance(kind, file.matrix, self.cfg.tolerances())?)
        } else {
            Ok(ManifoldPoint::new_unchecked(kind, file.matrix))
        }
    }

    fn tangent(&self, base: &ManifoldPoint, path: &Path) -> Result<TangentVector, CliError> {
        let file = MatrixFile::read(path)?;
        if matches!(file.kind, FileKind::Point(_)) {
            return Err(CliError::Usage(format!(
                "{}: expected a tangent file, found a '{}' point",
                path.display(),
                file.kind
            )));
        }
        if file.matrix.shape() != base.shape() {
            let (r, c) = base.shape();
            let (fr, fc) = file.matrix.shape();
            return Err(CliError::Domain(Error::DimensionMismatch {
                expected: format!("{r}x{c}"),
                actual: format!("{fr}x{fc}"),
            }));
        }
        if self.validate {
            Ok(TangentVector::new(base.clone(), file.matrix)?)
        } else {
            Ok(TangentVector::new_unchecked(base.clone(), file.matrix))
        }
    }

    fn same_kind(&self, a: &ManifoldPoint, b: &ManifoldPoint) -> Result<(), CliError> {
        if a.kind() != b.kind() {
            return Err(CliError::Usage(format!(
                "manifold ids disagree: {} vs {}",
                a.kind(),
                b.kind()
            )));
        }
        Ok(())
    }
}

fn emit(file: &MatrixFile, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => file.write(path),
        None => {
            print!("{}", file.render());
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context::from_cli(&cli)?;
    match &cli.command {
        Command::Exp { base, tangent, output } => cmd_exp(&ctx, base, tangent, output.as_deref()),
        Command::Log { base, target, output } => cmd_log(&ctx, base, target, output.as_deref()),
        Command::Dist { a, b } => {
            println!("{}", format_real(cmd_dist(&ctx, a, b)?));
            Ok(())
        }
        Command::Interp(args) => cmd_interp(&ctx, args),
        Command::Extrapolate(args) => cmd_extrapolate(&ctx, args),
    }
}

pub fn cmd_exp(ctx: &Context, base: &Path, tangent: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let p = ctx.point(base)?;
    let v = ctx.tangent(&p, tangent)?;
    let q = manifold::exp(&p, &v, ctx.metric(p.kind()))?;
    emit(&MatrixFile::new(FileKind::Point(q.kind()), q.into_rep()), output)
}

pub fn cmd_log(ctx: &Context, base: &Path, target: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let p = ctx.point(base)?;
    let q = ctx.point(target)?;
    ctx.same_kind(&p, &q)?;
    let metric = ctx.metric(p.kind());
    let v = manifold::log_with(&p, &q, metric, ctx.cfg.stiefel())?;
    let back = manifold::exp(&p, &v, metric)?;
    let miss = match p.kind() {
        ManifoldKind::Gr => manifold::dist(&back, &q, metric)?,
        _ => (back.rep() - q.rep()).norm(),
    };
    let allowed = ctx.cfg.round_trip_tol * q.rep().norm().max(1.0);
    if !(miss <= allowed) {
        return Err(Error::OutOfInjectivityDomain(format!(
            "exp(log) misses the target by {miss:e} (allowed {allowed:e})"
        ))
        .into());
    }
    emit(&MatrixFile::new(FileKind::Tangent, v.into_rep()), output)
}

pub fn cmd_dist(ctx: &Context, a: &Path, b: &Path) -> Result<f64, CliError> {
    let p = ctx.point(a)?;
    let q = ctx.point(b)?;
    ctx.same_kind(&p, &q)?;
    Ok(manifold::dist(&p, &q, ctx.metric(p.kind()))?)
}

pub fn read_manifest(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<PathBuf>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let dir = path.parent().unwrap_or(Path::new(""));
    let origin = path.display().to_string();
    let mut params = Vec::new();
    let mut files = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| CliError::Parse {
            origin: origin.clone(),
            line: i + 1,
            msg,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (file, mu) = tokens.split_last().expect("non-empty line");
        if mu.is_empty() {
            return Err(err("expected 'mu_1 [mu_2 ...] <path>'".into()));
        }
        let mu = mu
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| err(format!("not a number: '{t}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = params.first() {
            let first: &Vec<f64> = first;
            if first.len() != mu.len() {
                return Err(err(format!(
                    "{} parameter columns, earlier lines have {}",
                    mu.len(),
                    first.len()
                )));
            }
        }
        params.push(mu);
        files.push(dir.join(file));
    }
    if files.is_empty() {
        return Err(CliError::Parse {
            origin,
            line: 1,
            msg: "manifest lists no samples".into(),
        });
    }
    Ok((params, files))
}

fn parse_mu(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("--mu-star: not a number: '{t}'")))
        })
        .collect()
}

fn expand(template: &Path, index: usize, many: bool) -> Result<PathBuf, CliError> {
    let s = template.to_string_lossy();
    if !many {
        return Ok(template.to_path_buf());
    }
    if !s.contains("{}") {
        return Err(CliError::Usage(format!(
            "several --mu-star values need '{{}}' in the output and report paths, got '{s}'"
        )));
    }
    Ok(PathBuf::from(s.replace("{}", &index.to_string())))
}

struct Report(Vec<(String, String)>);

impl Report {
    fn push(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn join_reals(xs: &[f64]) -> String {
    xs.iter().map(|x| format_real(*x)).collect::<Vec<_>>().join(",")
}

fn push_scheme(ctx: &Context, report: &mut Report) {
    report.push("scheme", ctx.cfg.scheme.id());
    if ctx.cfg.scheme.is_rbf() {
        report.push("rbf_shape", format_real(ctx.cfg.rbf_shape));
        report.push("rbf_normalize", ctx.cfg.rbf_normalize);
    }
}

fn interpolate_one(
    ctx: &Context,
    args: &InterpArgs,
    samples: &SampleSet,
    mu: &[f64],
    report: &mut Report,
) -> Result<ManifoldPoint, CliError> {
    let metric = ctx.metric(samples.points()[0].kind());
    let scheme = ctx.cfg.scheme();
    report.push("method", args.method.id());
    report.push("mu_star", join_reals(mu));
    report.push("metric", metric);
    report.push("samples", samples.len());
    match args.method {
        Method::Tangent => {
            push_scheme(ctx, report);
            let r = interp::interp_normal_coords(samples, mu, &scheme, ctx.cfg.base, metric)?;
            report.push("base_index", r.base_index);
            report.push("weights", join_reals(&r.weights));
            Ok(r.point)
        }
        Method::Geodesic => {
            if mu.len() != 1 {
                return Err(CliError::Usage(
                    "geodesic interpolation takes a scalar --mu-star".into(),
                ));
            }
            Ok(interp::interp_geodesic(samples, mu[0], metric)?)
        }
        Method::Karcher => {
            push_scheme(ctx, report);
            let weights = samples.weights(&scheme, mu)?;
            report.push("weights", join_reals(&weights));
            match interp::karcher_center(samples, weights, metric, &ctx.cfg.karcher()) {
                Ok(r) => {
                    report.push("iterations", r.iterations);
                    report.push(
                        "gradient_norm",
                        format_real(*r.gradient_norms.last().expect("one entry per iterate")),
                    );
                    report.push("objective", format_real(r.objective));
                    Ok(r.point)
                }
                Err(e) => {
                    if let Error::NoConvergence { iterations, history } = &e {
                        report.push("iterations", iterations);
                        if let Some(g) = history.last() {
                            report.push("gradient_norm", format_real(*g));
                        }
                    }
                    Err(e.into())
                }
            }
        }
    }
}

pub fn cmd_interp(ctx: &Context, args: &InterpArgs) -> Result<(), CliError> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let mus = args
        .mu_star
        .iter()
        .map(|s| parse_mu(s))
        .collect::<Result<Vec<_>, _>>()?;
    let many = mus.len() > 1;
    let report_template = args.report.clone().unwrap_or_else(|| {
        let mut s = args.output.clone().into_os_string();
        s.push(".report");
        PathBuf::from(s)
    });
    let targets = (0..mus.len())
        .map(|i| Ok((expand(&args.output, i, many)?, expand(&report_template, i, many)?)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let (params, files) = read_manifest(&args.manifest)?;
    let points = files.iter().map(|f| ctx.point(f)).collect::<Result<Vec<_>, _>>()?;
    let samples = SampleSet::new(params, points)?;

    let evaluate = |i: usize| -> Result<(), CliError> {
        let (output, report_path) = &targets[i];
        let mut report = Report(Vec::new());
        let result = interpolate_one(ctx, args, &samples, &mus[i], &mut report);
        match &result {
            Ok(_) => report.0.insert(0, ("status".into(), "ok".into())),
            Err(e) => {
                report.0.insert(0, ("status".into(), e.class().into()));
                report.push("error", e.to_string().replace('\n', " "));
            }
        }
        write_atomic(report_path, report.render().as_bytes())?;
        let point = result?;
        MatrixFile::new(FileKind::Point(point.kind()), point.into_rep()).write(output)
    };

    let results: Vec<Result<(), CliError>> = if args.jobs == 1 || mus.len() == 1 {
        (0..mus.len()).map(evaluate).collect()
    } else {
        let mut slots: Vec<Option<Result<(), CliError>>> = (0..mus.len()).map(|_| None).collect();
        let chunk = mus.len().div_ceil(args.jobs);
        std::thread::scope(|scope| {
            for (c, slot) in slots.chunks_mut(chunk).enumerate() {
                let evaluate = &evaluate;
                scope.spawn(move || {
                    for (k, s) in slot.iter_mut().enumerate() {
                        *s = Some(evaluate(c * chunk + k));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.expect("every target evaluated")).collect()
    };
    results.into_iter().collect()
}

pub fn cmd_extrapolate(ctx: &Context, args: &ExtrapolateArgs) -> Result<(), CliError> {
    let output = args.output.as_deref();
    if let (Some(base), Some(tangent)) = (&args.base, &args.tangent) {
        let p = ctx.point(base)?;
        let v = ctx.tangent(&p, tangent)?;
        let q = interp::extrapolate_geodesic(&p, &v, args.mu_star, ctx.metric(p.kind()))?;
        return emit(&MatrixFile::new(FileKind::Point(q.kind()), q.into_rep()), output);
    }
    let (Some(snapshot), Some(derivative), Some(rank)) = (&args.snapshot, &args.derivative, args.rank) else {
        return Err(CliError::Usage(
            "give --base and --tangent, or --snapshot, --derivative and --rank".into(),
        ));
    };
    let s = MatrixFile::read(snapshot)?.matrix;
    let s_dot = MatrixFile::read(derivative)?.matrix;
    if s.shape() != s_dot.shape() {
        return Err(CliError::Domain(Error::DimensionMismatch {
            expected: format!("{}x{}", s.nrows(), s.ncols()),
            actual: format!("{}x{}", s_dot.nrows(), s_dot.ncols()),
        }));
    }
    let pod = interp::extrapolate_pod_basis(&s, &s_dot, rank, args.mu_star)?;
    let basis = pod.basis.into_matrix();
    let residual = orthonormality_residual(&basis);
    if residual > POD_MEMBERSHIP {
        return Err(Error::NotOrthonormal { residual }.into());
    }
    emit(&MatrixFile::new(FileKind::Point(ManifoldKind::St), basis), output)
}
