mod config;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use isoweight::functionals::{ckn_radial_infimum, eigenvalue_radial, hardy_constant, CknSearch};
use isoweight::regime::{
    c_rad, c_rad_inverted, ckn_radial_symmetry_sufficient, ckn_thresholds, classify, CknParams, Orientation, Params,
};
use isoweight::variation::{minimize_ratio, solve_1d, trace_csv, MinimizeOptions};
use rayon::prelude::*;
use serde_json::{json, Value};

use config::ConfigFile;

const SCHEMA: &str = "isoweight/1";
const THREADS_ENV: &str = "ISO_WEIGHT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "isoweight", version, about = "Isoperimetric problems with power weights")]
struct Cli {
    /// Line-oriented key=value file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format (sweep defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write CSV output (sweep table, optimization trace) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Attach a short description of the formula behind each reported quantity.
    #[arg(long, global = true)]
    anchors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verdict, certifying condition and thresholds for (k, l, N).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        l: f64,
        #[arg(long = "N")]
        dim: u32,
    },
    /// Verdict map over a rectangle of (k, l).
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        k_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        k_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        l_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        l_max: f64,
        #[arg(long = "N")]
        dim: u32,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Search for star-shaped sets with a smaller ratio than the ball.
    Minimize {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        l: f64,
        #[arg(long = "N")]
        dim: u32,
        #[arg(long)]
        modes: Option<u32>,
        #[arg(long)]
        restarts: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid_size: Option<usize>,
        #[arg(long)]
        iterations_per_dim: Option<u64>,
    },
    /// Run a verification suite: regime, inversion, rearrange, variation, functionals or all.
    Verify { suite: String },
    /// Thresholds, certificate and radial constant estimate for CKN parameters.
    Ckn {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long = "N")]
        dim: u32,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        iterations: Option<u64>,
    },
    /// Exact optimum among unions of intervals (N = 1).
    Solve1d {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        l: f64,
    },
    /// First radial eigenvalue of the weighted p-Laplacian on a ball.
    Eigen {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long = "R", default_value_t = 1.0)]
        radius: f64,
        #[arg(long = "N")]
        dim: u32,
        #[arg(long)]
        nodes: Option<usize>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Verification,
    Domain(String),
    NonConvergence(String),
    Other(anyhow::Error),
}

impl From<isoweight::Error> for Failure {
    fn from(e: isoweight::Error) -> Self {
        match e {
            isoweight::Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

type CmdResult = Result<(), Failure>;

struct Ctx {
    config: ConfigFile,
    format: Option<Format>,
    out: Option<PathBuf>,
    anchors: bool,
}

impl Ctx {
    fn format(&self, default: Format) -> Result<Format, Failure> {
        if let Some(f) = self.format {
            return Ok(f);
        }
        match self.config.get::<String>("format")?.as_deref() {
            None => Ok(default),
            Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some("text") => Ok(Format::Text),
            Some(other) => Err(Failure::Domain(format!("unknown format {other:?}"))),
        }
    }

    fn emit(&self, mut doc: Value, anchors: &[(&str, &str)]) -> CmdResult {
        if self.anchors {
            let map: serde_json::Map<String, Value> =
                anchors.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect();
            doc["anchors"] = Value::Object(map);
        }
        let mut stdout = std::io::stdout().lock();
        match self.format(Format::Json)? {
            Format::Text => write_text(&mut stdout, &doc, "")?,
            _ => writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?,
        }
        Ok(())
    }

    fn write_csv(&self, csv: &str) -> CmdResult {
        match &self.out {
            Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().lock().write_all(csv.as_bytes())?,
        }
        Ok(())
    }
}

fn write_text(w: &mut impl Write, v: &Value, indent: &str) -> std::io::Result<()> {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                if v.is_object() {
                    writeln!(w, "{indent}{k}:")?;
                    write_text(w, v, &format!("{indent}  "))?;
                } else {
                    writeln!(w, "{indent}{k}: {}", scalar(v))?;
                }
            }
            Ok(())
        }
        other => writeln!(w, "{indent}{}", scalar(other)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn header(command: &str) -> Value {
    json!({ "schema": SCHEMA, "command": command })
}

fn ball_constant(params: &Params) -> isoweight::Result<f64> {
    match params.orientation {
        Orientation::Standard => c_rad(params),
        Orientation::Inverted => c_rad_inverted(params),
    }
}

fn cmd_classify(ctx: &Ctx, k: f64, l: f64, dim: u32) -> CmdResult {
    let params = Params::new(k, l, dim)?;
    let report = classify(&params);
    let mut doc = header("classify");
    doc["params"] = json!({ "k": k, "l": l, "N": dim, "orientation": params.orientation });
    doc["verdict"] = json!(report.verdict);
    doc["certifying_condition"] = json!(report.certifying_condition.map(|c| c.tag()));
    doc["first_mode_unstable"] = json!(report.first_mode_unstable);
    doc["thresholds"] = json!(report.thresholds.as_map());
    doc["constants"] = json!({ "c_rad": ball_constant(&params)? });
    doc["notes"] = json!(report.notes);
    ctx.emit(
        doc,
        &[
            ("c_rad", "(N w_N)^{(l-k+1)/(l+N)} |l+N|^{(k+N-1)/(l+N)}: ratio of centered balls"),
            ("l1", "largest l certified by the sufficient conditions for k >= 0"),
            ("l_star_lower", "kN/(N-1): exact threshold for k <= 0"),
            ("l_upper", "k - 1 + (N-1)/(k+N-1): first-mode instability line"),
        ],
    )
}

fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn cmd_sweep(ctx: &Ctx, k_range: (f64, f64), l_range: (f64, f64), dim: u32, step: Option<f64>) -> CmdResult {
    let step = ctx.config.resolve(step, "step", 0.1)?;
    let finite = [k_range.0, k_range.1, l_range.0, l_range.1, step].iter().all(|x| x.is_finite());
    if !finite || step <= 0.0 || k_range.1 < k_range.0 || l_range.1 < l_range.0 {
        return Err(Failure::Domain("sweep needs finite ranges with min <= max and step > 0".into()));
    }
    let ks = grid_points(k_range.0, k_range.1, step);
    let ls = grid_points(l_range.0, l_range.1, step);
    let points: Vec<(f64, f64)> = ks.iter().flat_map(|&k| ls.iter().map(move |&l| (k, l))).collect();
    let rows: Vec<String> = points
        .par_iter()
        .map(|&(k, l)| match Params::new(k, l, dim) {
            Ok(p) => {
                let r = classify(&p);
                format!(
                    "{k},{l},{:?},{},{},{}",
                    r.verdict,
                    fmt_opt(ball_constant(&p).ok()),
                    fmt_opt(r.thresholds.l1),
                    fmt_opt(r.thresholds.l_upper)
                )
            }
            Err(_) => format!("{k},{l},Invalid,,,"),
        })
        .collect();
    match ctx.format(Format::Csv)? {
        Format::Csv => {
            let mut csv = String::from("k,l,verdict,c_rad,l1,l_upper\n");
            for r in rows {
                csv.push_str(&r);
                csv.push('\n');
            }
            ctx.write_csv(&csv)
        }
        _ => {
            let table: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let c: Vec<&str> = r.split(',').collect();
                    json!({ "k": c[0].parse::<f64>().ok(), "l": c[1].parse::<f64>().ok(), "verdict": c[2],
                            "c_rad": c[3].parse::<f64>().ok(), "l1": c[4].parse::<f64>().ok(),
                            "l_upper": c[5].parse::<f64>().ok() })
                })
                .collect();
            let mut doc = header("sweep");
            doc["N"] = json!(dim);
            doc["rows"] = json!(table);
            ctx.emit(doc, &[])
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_minimize(
    ctx: &Ctx,
    k: f64,
    l: f64,
    dim: u32,
    modes: Option<u32>,
    restarts: Option<u32>,
    seed: Option<u64>,
    grid_size: Option<usize>,
    iterations_per_dim: Option<u64>,
) -> CmdResult {
    let d = MinimizeOptions::default();
    let opts = MinimizeOptions {
        mode_count: ctx.config.resolve(modes, "modes", d.mode_count)?,
        restarts: ctx.config.resolve(restarts, "restarts", d.restarts)?,
        seed: ctx.config.resolve(seed, "seed", d.seed)?,
        grid_size: match grid_size {
            Some(g) => Some(g),
            None => ctx.config.get("grid_size")?,
        },
        iterations_per_dim: ctx.config.resolve(iterations_per_dim, "iterations_per_dim", d.iterations_per_dim)?,
        initial_step: ctx.config.resolve(None, "initial_step", d.initial_step)?,
    };
    let params = Params::new(k, l, dim)?;
    let res = minimize_ratio(&params, &opts)?;
    if let Some(path) = &ctx.out {
        std::fs::write(path, trace_csv(&res.trace)).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut doc = header("minimize");
    doc["params"] = json!({ "k": k, "l": l, "N": dim });
    doc["options"] = json!(opts);
    doc["value"] = json!(res.value);
    doc["c_rad"] = json!(res.c_rad);
    doc["gap"] = json!(res.gap);
    doc["coefficients"] = json!(res.coefficients);
    doc["degenerate"] = json!(res.degenerate);
    doc["hit_iteration_limit"] = json!(res.hit_iteration_limit);
    doc["note"] = json!("no better shape was found in the search class; this is not a proof of optimality");
    ctx.emit(
        doc,
        &[
            ("value", "smallest ratio found over m = exp(sum c_j phi_j)"),
            ("gap", "value / c_rad - 1"),
        ],
    )?;
    if res.hit_iteration_limit {
        return Err(Failure::NonConvergence("optimizer stopped at the iteration limit".into()));
    }
    Ok(())
}

fn cmd_verify(ctx: &Ctx, suite: &str) -> CmdResult {
    let Some(outcomes) = verify::run_suite(suite) else {
        return Err(Failure::Domain(format!(
            "unknown suite {suite:?}; expected one of {} or all",
            verify::SUITES.join(", ")
        )));
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let mut stdout = std::io::stdout().lock();
    let text = ctx.format(Format::Json)? == Format::Text;
    for o in &outcomes {
        if text {
            let status = if o.passed { "pass" } else { "FAIL" };
            writeln!(stdout, "{status} {}/{}: lhs {} rhs {} margin {:.3e}", o.suite, o.name, o.lhs, o.rhs, o.margin)?;
        } else {
            writeln!(stdout, "{}", serde_json::to_string(o).expect("serializable"))?;
        }
    }
    let summary = json!({ "schema": SCHEMA, "command": "verify", "suite": suite,
                          "checks": outcomes.len(), "failed": failed });
    writeln!(stdout, "{summary}")?;
    if failed > 0 {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn cmd_ckn(ctx: &Ctx, a: f64, p: f64, q: f64, dim: u32, nodes: Option<usize>, iterations: Option<u64>) -> CmdResult {
    let ckn = CknParams::new(a, p, q, dim)?;
    let mut doc = header("ckn");
    doc["params"] = json!({ "a": a, "p": p, "q": q, "N": dim });
    doc["b"] = json!(ckn.b);
    let cert = ckn_radial_symmetry_sufficient(&ckn);
    doc["certificate"] = json!(cert.map(|c| c.tag()));
    doc["radial_symmetry_certified"] = json!(cert.is_some());
    let mut notes: Vec<String> = Vec::new();
    if p == q {
        doc["hardy_constant"] = json!(hardy_constant(a, p, dim)?);
        notes.push("p = q: the constant is not attained".into());
    } else if q.is_finite() && ckn.p_star().is_none_or(|ps| q < ps) && p > 1.0 {
        let t = ckn_thresholds(p, q, dim)?;
        doc["thresholds"] = json!(t);
        if a > t.a_star {
            notes.push(format!("a > a_star = {}: radial functions are not optimal", t.a_star));
        }
    }
    if p > 1.0 && q > p {
        let d = CknSearch::default();
        let search = CknSearch {
            nodes: ctx.config.resolve(nodes, "nodes", d.nodes)?,
            r_min: ctx.config.resolve(None, "r_min", d.r_min)?,
            r_max: ctx.config.resolve(None, "r_max", d.r_max)?,
            iterations: ctx.config.resolve(iterations, "iterations", d.iterations)?,
        };
        let fine = ckn_radial_infimum(&ckn, &search)?;
        let coarse = ckn_radial_infimum(&ckn, &CknSearch { nodes: search.nodes / 2 + 1, ..search })?;
        doc["s_rad_estimate"] = json!({
            "value": fine.value,
            "label": fine.label,
            "refinement_delta": (coarse.value - fine.value).abs() / fine.value,
            "converged": fine.converged,
            "iterations": fine.iterations,
            "nodes": search.nodes,
        });
        if !fine.converged {
            notes.push("radial minimization stopped at the iteration limit".into());
        }
    }
    doc["notes"] = json!(notes);
    ctx.emit(
        doc,
        &[
            ("b", "N(1/p - 1/q) + a - 1"),
            ("a1", "(N-1)/(1 + q/p') - N/p + 1"),
            ("a2", "1 + N(1/q - 1/p)"),
            ("a_star", "(N/p - 1 + a)^2 = (N-1)(1/(q-p) - 1/(q+p'))"),
            ("s_rad_estimate", "energy of the best piecewise-linear radial profile: an upper bound"),
        ],
    )
}

fn cmd_solve1d(ctx: &Ctx, k: f64, l: f64) -> CmdResult {
    let params = Params::new(k, l, 1)?;
    let s = solve_1d(&params)?;
    let mut doc = header("solve1d");
    doc["params"] = json!({ "k": k, "l": l, "N": 1 });
    doc["solution"] = json!(s);
    ctx.emit(doc, &[("value", "2 for k >= l+1 (symmetric intervals), else (l+1)^{k/(l+1)}")])
}

fn cmd_eigen(ctx: &Ctx, p: f64, beta: f64, radius: f64, dim: u32, nodes: Option<usize>) -> CmdResult {
    let nodes = ctx.config.resolve(nodes, "nodes", 2000)?;
    let e = eigenvalue_radial(p, beta, radius, dim, nodes)?;
    let mut doc = header("eigen");
    doc["params"] = json!({ "p": p, "beta": beta, "R": radius, "N": dim, "nodes": nodes });
    doc["lambda"] = json!(e.lambda);
    doc["iterations"] = json!(e.iterations);
    doc["converged"] = json!(e.converged);
    ctx.emit(doc, &[("lambda", "min of int |u'|^p r^{N-1} / int |u|^p r^{N-1-beta p} with u(R) = 0")])?;
    if !e.converged {
        return Err(Failure::NonConvergence("inverse iteration did not converge".into()));
    }
    Ok(())
}

fn configure_threads(config: &ConfigFile) -> anyhow::Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().with_context(|| format!("{THREADS_ENV} must be a positive integer"))?),
        Err(_) => config.get::<usize>("threads")?,
    };
    if let Some(n) = threads.filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CmdResult {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    configure_threads(&config)?;
    let ctx = Ctx { config, format: cli.format, out: cli.out, anchors: cli.anchors };
    match cli.command {
        Command::Classify { k, l, dim } => cmd_classify(&ctx, k, l, dim),
        Command::Sweep { k_min, k_max, l_min, l_max, dim, step } => {
            cmd_sweep(&ctx, (k_min, k_max), (l_min, l_max), dim, step)
        }
        Command::Minimize { k, l, dim, modes, restarts, seed, grid_size, iterations_per_dim } => {
            cmd_minimize(&ctx, k, l, dim, modes, restarts, seed, grid_size, iterations_per_dim)
        }
        Command::Verify { suite } => cmd_verify(&ctx, &suite),
        Command::Ckn { a, p, q, dim, nodes, iterations } => cmd_ckn(&ctx, a, p, q, dim, nodes, iterations),
        Command::Solve1d { k, l } => cmd_solve1d(&ctx, k, l),
        Command::Eigen { p, beta, radius, dim, nodes } => cmd_eigen(&ctx, p, beta, radius, dim, nodes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
