//! Command line front end.
//!
//! Exit codes: 0 success, 2 input/parse errors, 3 degenerate instances
//! (e.g. infinite inradius), 4 non-convergence (bounds are still
//! emitted).

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use tropreg::io::{self, JsonNum, ResultDocument};
use tropreg::shapley::{PlainOperator, ShapleyOperator, SignedOperator, TypedOperator};
use tropreg::solver::{self, Method, SolverConfig};
use tropreg::tropical::{cone_project, hilbert_distance, TropMatrix, TropVector};
use tropreg::{auction, dominions, regression, Result, TropError};

#[derive(Parser)]
#[command(name = "tropreg", version, about = "Tropical linear regression via mean payoff games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Km,
    Vi,
    Exact,
}

#[derive(Args)]
struct SolverArgs {
    /// solution method
    #[arg(long, value_enum, default_value = "km")]
    method: MethodArg,
    /// target Hilbert-seminorm residual
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// damping factor of the fixed-point iteration, in (0,1)
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// iteration budget
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(TropError::InvalidArgument("gamma must be in (0,1)".into()));
        }
        if !(self.eps > 0.0) {
            return Err(TropError::InvalidArgument("eps must be positive".into()));
        }
        Ok(SolverConfig {
            method: match self.method {
                MethodArg::Km => Method::Km,
                MethodArg::Vi => Method::Vi,
                MethodArg::Exact => Method::Exact,
            },
            gamma: self.gamma,
            epsilon: self.eps,
            max_iter: self.max_iter,
        })
    }
    fn name(&self) -> &'static str {
        match self.method {
            MethodArg::Km => "km",
            MethodArg::Vi => "vi",
            MethodArg::Exact => "exact",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Radius of a maximal Hilbert ball inscribed in the column span
    Inradius {
        matrix: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
        /// write a projective picture (3-coordinate inputs only)
        #[arg(long, value_name = "OUT.SVG")]
        svg: Option<PathBuf>,
    },
    /// Best approximation of the columns by a tropical hyperplane
    Regress {
        matrix: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// signed hyperplane partition, e.g. --signed I=1,2 J=3 (1-based)
        #[arg(long, num_args = 2, value_names = ["I=..", "J=.."])]
        signed: Option<Vec<String>>,
        /// per-column classes for typed regression (CSV: column,type)
        #[arg(long, value_name = "TYPES.CSV")]
        typed: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_name = "OUT.SVG")]
        svg: Option<PathBuf>,
    },
    /// Detect disjoint dominions of the two players
    Dominions {
        matrix: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Project points (columns of a second CSV) onto the column span
    Project {
        matrix: PathBuf,
        points: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Invitation-to-tender auction models
    Auction {
        #[command(subcommand)]
        command: AuctionCommand,
    },
}

#[derive(Subcommand)]
enum AuctionCommand {
    /// Generate synthetic bids near the equilibrium of given factors
    Simulate {
        /// comma-separated preference factors, max must be 1
        #[arg(long, value_name = "F1,F2,..")]
        factors: String,
        /// number of tenders
        #[arg(long, default_value_t = 25)]
        tenders: usize,
        /// noise half-width on log-prices
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// write the price matrix here (default: stdout)
        #[arg(long, value_name = "PRICES.CSV")]
        out: Option<PathBuf>,
        /// also write the winner of each tender (CSV: tender,firm)
        #[arg(long, value_name = "WINNERS.CSV")]
        winners_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Recover preference factors from observed prices
    Infer {
        prices: PathBuf,
        /// winner identities (CSV: tender,firm) enabling the typed model
        #[arg(long, value_name = "WINNERS.CSV")]
        winners: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                TropError::Parse(_)
                | TropError::Io(_)
                | TropError::InvalidArgument(_)
                | TropError::Validation(_)
                | TropError::DimensionMismatch { .. } => 2,
                TropError::Degenerate(_) => 3,
                TropError::NonConvergence { .. } => 4,
                _ => 1,
            })
        }
    }
}

fn emit(doc: &ResultDocument, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(doc).unwrap());
        return;
    }
    fn num(v: JsonNum) -> String {
        if v.0 == f64::INFINITY {
            "inf".into()
        } else if v.0 == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            format!("{}", v.0)
        }
    }
    fn vecfmt(v: &[JsonNum]) -> String {
        v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
    }
    println!("method: {}", doc.method);
    if let Some(r) = doc.rho {
        println!("rho: {}", num(r));
    }
    if let Some(v) = doc.value {
        println!("value: {}", num(v));
    }
    if let Some(a) = &doc.apex {
        println!("apex: ({})", vecfmt(a));
    }
    if let Some(c) = &doc.center {
        println!("center: ({})", vecfmt(c));
    }
    if let Some(r) = doc.radius {
        println!("radius: {}", num(r));
    }
    if let Some(w) = &doc.witnesses {
        println!(
            "witnesses: {}",
            w.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
        );
    }
    println!("bounds: [{}, {}]", num(doc.bounds.lower), num(doc.bounds.upper));
    println!("iterations: {}", doc.iterations);
    println!(
        "verification: sub_ok={} super_ok={} residual={}",
        doc.verification.sub_ok,
        doc.verification.super_ok,
        num(doc.verification.residual)
    );
    for w in &doc.warnings {
        println!("warning: {w}");
    }
    for (k, v) in &doc.extra {
        println!("{k}: {v}");
    }
}

fn write_svg(
    path: &PathBuf,
    v: &TropMatrix,
    apex: &TropVector,
    radius: f64,
    doc: &mut ResultDocument,
) -> Result<()> {
    let (svg, warnings) = io::render_svg(v, apex, radius)?;
    std::fs::write(path, svg)?;
    doc.warnings.extend(warnings);
    Ok(())
}

/// Fills the shared certificate fields, re-verifying the sub/super
/// eigenvector inequalities against the operator at emission time.
fn verify_into<T: ShapleyOperator + ?Sized>(
    doc: &mut ResultDocument,
    t: &T,
    rho: f64,
    sub: Option<&TropVector>,
    sup: Option<&TropVector>,
    tol: f64,
) {
    doc.verification.sub_ok = sub.map_or(false, |b| solver::verify_sub(t, b, rho, tol));
    doc.verification.super_ok = sup.map_or(false, |c| solver::verify_super(t, c, rho, tol));
}

fn negate(x: &TropVector) -> Option<TropVector> {
    if !x.is_finite() {
        return None;
    }
    Some(TropVector::from_f64(
        &(0..x.len()).map(|i| -x[i].value()).collect::<Vec<_>>(),
    ))
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Inradius { matrix, solver: sa, json, svg } => {
            let v = io::parse_matrix(&matrix)?;
            let cfg = sa.config()?;
            let r = match regression::inradius(&v, &cfg) {
                Ok(r) => r,
                Err(TropError::NonConvergence { iterations, lower, upper }) => {
                    let mut doc = ResultDocument::new(sa.name());
                    doc.bounds.lower = JsonNum(-upper);
                    doc.bounds.upper = JsonNum(-lower);
                    doc.iterations = iterations;
                    doc.warnings.push("iteration budget exhausted; only bounds are available".into());
                    emit(&doc, json);
                    return Ok(ExitCode::from(4));
                }
                Err(e) => return Err(e),
            };
            let mut doc = ResultDocument::new(sa.name());
            doc.rho = Some(JsonNum(-r.radius));
            doc.radius = Some(JsonNum(r.radius));
            doc.bounds.lower = JsonNum(-r.upper);
            doc.bounds.upper = JsonNum(-r.lower);
            doc.warnings = r.warnings.clone();
            if let Some(c) = &r.center {
                doc.center = Some(io::vec_json(c));
                if let (Ok(t), Some(negc)) = (PlainOperator::new(v.clone()), negate(c)) {
                    doc.verification.super_ok =
                        solver::verify_super(&t, &negc, -r.radius, 1e-6);
                }
                doc.verification.residual = JsonNum(0.0);
            }
            if r.radius.is_infinite() {
                doc.warnings.push(
                    "the column span contains arbitrarily large Hilbert balls; \
                     the inradius is infinite (the associated game has no finite value)"
                        .into(),
                );
                emit(&doc, json);
                return Ok(ExitCode::from(3));
            }
            if let Some(path) = &svg {
                if let Some(c) = &r.center {
                    if let Some(negc) = negate(c) {
                        write_svg(path, &v, &negc, r.radius, &mut doc)?;
                    }
                }
            }
            emit(&doc, json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Regress { matrix, solver: sa, signed, typed, json, svg } => {
            let v = io::parse_matrix(&matrix)?;
            let cfg = sa.config()?;
            if signed.is_some() && typed.is_some() {
                return Err(TropError::InvalidArgument(
                    "--signed and --typed are mutually exclusive".into(),
                ));
            }
            let mut doc = ResultDocument::new(sa.name());
            if let Some(spec) = signed {
                let (pos, neg) = parse_partition(&spec, v.nrows())?;
                let r = regression::regress_signed(&v, &pos, &neg, &cfg)?;
                doc.rho = Some(JsonNum(-r.value));
                doc.value = Some(JsonNum(r.value));
                doc.apex = Some(io::vec_json(&r.apex));
                doc.bounds.lower = JsonNum(r.value);
                doc.bounds.upper = JsonNum(r.value);
                doc.iterations = r.iterations;
                doc.verification.residual = JsonNum(r.residual);
                if let Some(c) = &r.interval_center {
                    doc.center = Some(io::vec_json(c));
                }
                doc.extra.insert(
                    "interval_radius".into(),
                    serde_json::to_value(JsonNum(r.interval_radius)).unwrap(),
                );
                let t = SignedOperator::new(v.clone(), pos, neg)?;
                verify_into(&mut doc, &t, -r.value, Some(&r.apex), Some(&r.apex), 1e-6);
                emit(&doc, json);
                return Ok(ExitCode::SUCCESS);
            }
            if let Some(types_path) = typed {
                let text = std::fs::read_to_string(&types_path)?;
                let types = io::parse_types_str(&text, v.ncols())?;
                let r = regression::regress_typed(&v, &types, &cfg)?;
                doc.rho = Some(JsonNum(-r.value));
                doc.value = Some(JsonNum(r.value));
                doc.apex = Some(io::vec_json(&r.apex));
                doc.bounds.lower = JsonNum(r.lower);
                doc.bounds.upper = JsonNum(r.upper);
                doc.iterations = r.iterations;
                doc.verification.residual = JsonNum(r.residual);
                if let Some(d) = &r.per_class_distances {
                    doc.extra.insert(
                        "per_class_distances".into(),
                        serde_json::to_value(
                            d.iter().map(|&x| JsonNum(x)).collect::<Vec<_>>(),
                        )
                        .unwrap(),
                    );
                }
                let t = TypedOperator::new(v.clone(), types)?;
                verify_into(&mut doc, &t, -r.value, Some(&r.apex), Some(&r.apex), 1e-6);
                emit(&doc, json);
                return Ok(ExitCode::SUCCESS);
            }
            let r = match regression::best_hyperplane(&v, &cfg) {
                Ok(r) => r,
                Err(TropError::NonConvergence { iterations, lower, upper }) => {
                    doc.bounds.lower = JsonNum(-upper);
                    doc.bounds.upper = JsonNum(-lower);
                    doc.iterations = iterations;
                    doc.warnings.push("iteration budget exhausted; only bounds are available".into());
                    emit(&doc, json);
                    return Ok(ExitCode::from(4));
                }
                Err(e) => return Err(e),
            };
            doc.rho = Some(JsonNum(-r.value));
            doc.value = Some(JsonNum(r.value));
            doc.apex = Some(io::vec_json(&r.apex));
            doc.bounds.lower = JsonNum(r.lower);
            doc.bounds.upper = JsonNum(r.upper);
            doc.iterations = r.iterations;
            doc.verification.residual = JsonNum(r.residual);
            doc.warnings = r.warnings.clone();
            if let Some(c) = &r.ball_center {
                doc.center = Some(io::vec_json(c));
            }
            if let Some(w) = &r.witness_points {
                doc.witnesses = Some(w.iter().map(|k| k + 1).collect());
            }
            if r.apex.is_finite() || !r.apex.is_bot() {
                if let Ok(t) = PlainOperator::new(v.clone()) {
                    let sup = r.ball_center.as_ref().and_then(negate);
                    doc.verification.sub_ok =
                        solver::verify_sub(&t, &r.apex, -r.value, 1e-6);
                    doc.verification.super_ok = sup
                        .map_or(false, |c| solver::verify_super(&t, &c, -r.value, 1e-6));
                }
            }
            if r.degenerate {
                doc.warnings.push(
                    "every hyperplane is infinitely far from the configuration; \
                     the optimal value is infinite"
                        .into(),
                );
                emit(&doc, json);
                return Ok(ExitCode::from(3));
            }
            if let Some(path) = &svg {
                write_svg(path, &v, &r.apex, r.value, &mut doc)?;
            }
            emit(&doc, json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Dominions { matrix, json } => {
            let v = io::parse_matrix(&matrix)?;
            let report = dominions::detect_dominions(&v)?;
            if json {
                let doc = serde_json::json!({
                    "found": report.found,
                    "verdict": match report.verdict {
                        dominions::Verdict::FiniteEigenvectorGuaranteed =>
                            "finite_eigenvector_guaranteed",
                        dominions::Verdict::Inconclusive => "inconclusive",
                    },
                    "min_dominion": report.min_dominion.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "max_dominion": report.max_dominion.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "columns": report.columns.iter().map(|k| k + 1).collect::<Vec<_>>(),
                    "operations": report.operations,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else if report.found {
                println!("disjoint dominions found (finite eigenvectors are not guaranteed)");
                println!(
                    "min dominion: {:?}",
                    report.min_dominion.iter().map(|i| i + 1).collect::<Vec<_>>()
                );
                println!(
                    "max dominion: {:?}",
                    report.max_dominion.iter().map(|i| i + 1).collect::<Vec<_>>()
                );
                println!(
                    "witness columns: {:?}",
                    report.columns.iter().map(|k| k + 1).collect::<Vec<_>>()
                );
            } else {
                println!("no disjoint dominions: every perturbation of the operator has a finite eigenvector");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Project { matrix, points, json } => {
            let v = io::parse_matrix(&matrix)?;
            let pts = io::parse_matrix(&points)?;
            if pts.nrows() != v.nrows() {
                return Err(TropError::DimensionMismatch {
                    expected: v.nrows(),
                    got: pts.nrows(),
                });
            }
            let mut out = Vec::new();
            for col in pts.columns() {
                let proj = cone_project(&v, &col)?;
                let dist = hilbert_distance(&col, &proj)?;
                out.push((proj, dist));
            }
            if json {
                let doc: Vec<serde_json::Value> = out
                    .iter()
                    .map(|(p, d)| {
                        serde_json::json!({
                            "projection": io::vec_json(p),
                            "distance": JsonNum(*d),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                for (k, (p, d)) in out.iter().enumerate() {
                    let coords: Vec<String> = p
                        .entries()
                        .iter()
                        .map(|e| {
                            if e.is_bottom() {
                                "-inf".into()
                            } else {
                                format!("{}", e.value())
                            }
                        })
                        .collect();
                    println!("point {}: projection ({}) distance {}", k + 1, coords.join(", "), d);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Auction { command } => run_auction(command),
    }
}

fn run_auction(cmd: AuctionCommand) -> Result<ExitCode> {
    match cmd {
        AuctionCommand::Simulate { factors, tenders, delta, seed, out, winners_out, json } => {
            let f: Vec<f64> = factors
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        TropError::Parse(format!("bad factor {s:?}"))
                    })
                })
                .collect::<Result<_>>()?;
            let instance = auction::simulate(&f, tenders, None, delta, seed)?;
            let csv: String = instance
                .prices
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| format!("{p:.6}"))
                        .collect::<Vec<_>>()
                        .join(",")
                        + "\n"
                })
                .collect();
            match &out {
                Some(path) => std::fs::write(path, &csv)?,
                None if !json => print!("{csv}"),
                None => {}
            }
            if let Some(path) = &winners_out {
                let w = instance.winners.as_ref().unwrap();
                let text: String = w
                    .iter()
                    .enumerate()
                    .map(|(j, i)| format!("{},{}\n", j + 1, i + 1))
                    .collect();
                std::fs::write(path, text)?;
            }
            if json {
                let doc = serde_json::json!({
                    "prices": instance.prices,
                    "winners": instance.winners.as_ref().unwrap().iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "reference_prices": instance.reference_prices,
                    "delta": instance.delta,
                    "seed": instance.seed,
                });
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            }
            Ok(ExitCode::SUCCESS)
        }
        AuctionCommand::Infer { prices, winners, solver: sa, json } => {
            let cfg = sa.config()?;
            let m = io::parse_matrix(&prices)?;
            if m.support().len() != m.nrows() * m.ncols() {
                return Err(TropError::Parse("price matrices must be fully finite".into()));
            }
            let pmat: Vec<Vec<f64>> = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m.get(i, j).value()).collect())
                .collect();
            let w = match winners {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    Some(io::parse_winners_str(&text, m.ncols())?)
                }
                None => None,
            };
            let report = auction::infer(&pmat, w.as_deref(), &cfg)?;
            let mut doc = ResultDocument::new(sa.name());
            doc.value = Some(JsonNum(report.value));
            doc.apex = Some(io::vec_json(&report.apex));
            doc.bounds.lower = JsonNum(report.value);
            doc.bounds.upper = JsonNum(report.value);
            doc.iterations = report.iterations;
            doc.verification.residual = JsonNum(report.distance);
            doc.warnings = report.warnings.clone();
            doc.extra.insert(
                "factors".into(),
                serde_json::to_value(
                    report.f_reg.iter().map(|&x| JsonNum(x)).collect::<Vec<_>>(),
                )
                .unwrap(),
            );
            doc.extra.insert(
                "distance".into(),
                serde_json::to_value(JsonNum(report.distance)).unwrap(),
            );
            if let Some(e) = report.error {
                doc.extra
                    .insert("error".into(), serde_json::to_value(JsonNum(e)).unwrap());
            }
            doc.extra
                .insert("typed".into(), serde_json::Value::Bool(report.typed));
            emit(&doc, json);
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Parses `["I=1,2", "J=3"]` (1-based coordinates) into a 0-based
/// partition.
fn parse_partition(spec: &[String], n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut pos = None;
    let mut neg = None;
    for part in spec {
        let (name, list) = part.split_once('=').ok_or_else(|| {
            TropError::Parse(format!("bad partition component {part:?}, expected I=.. or J=.."))
        })?;
        let idx: Vec<usize> = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1 && i <= n)
                    .map(|i| i - 1)
                    .ok_or_else(|| TropError::Parse(format!("bad coordinate {s:?}")))
            })
            .collect::<Result<_>>()?;
        match name.trim() {
            "I" => pos = Some(idx),
            "J" => neg = Some(idx),
            other => {
                return Err(TropError::Parse(format!(
                    "unknown partition component {other:?}"
                )))
            }
        }
    }
    match (pos, neg) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(TropError::Parse("--signed needs both I=.. and J=..".into())),
    }
}
