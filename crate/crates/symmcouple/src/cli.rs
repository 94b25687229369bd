//! The `symmcouple` command line.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad flags, specs, files or
//! violated preconditions), 3 when a numerical solver fails to converge.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use symmcouple_core::constructs::{
    build_phi_theorem6, example_gallery, modular_audit, orlicz_intervals, v_schedule, GalleryItem,
};
use symmcouple_core::decomp::{decomp_empirical_test, escalation_curve, escalation_detected, FamilySpec};
use symmcouple_core::kfunc::{k_generic, log_grid, KOptions};
use symmcouple_core::{PhiFunction, SpaceSpec, TrialRunner};

use crate::csv_io;
use crate::dsl;
use crate::report::{self, num, nums};
use crate::runner::{resolve_threads, Parallel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "symmcouple", version, about = "Norms, K-functionals and decomposability checks for symmetric spaces on [0,1]")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores); SYMMCOUPLE_THREADS overrides.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Depth J for dyadic weights such as `recip`.
    #[arg(long, global = true, default_value_t = 30)]
    depth: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Norm of a step function read from CSV.
    Norm {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: PathBuf,
    },
    /// Decreasing rearrangement as CSV.
    Rearrange {
        #[arg(long)]
        x: PathBuf,
    },
    /// K(t, x; X, X(w)) on a dyadic grid of t.
    Kfunc {
        #[arg(long)]
        space: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        x: PathBuf,
        /// Grid points per octave, from t = 2^-30.
        #[arg(long, default_value_t = 1)]
        per_octave: u32,
        /// Last octave of the grid.
        #[arg(long, default_value_t = 10)]
        hi_octaves: i32,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_sweeps: usize,
    },
    /// Regular-variation test of a function φ.
    Regvar {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "1")]
        p: String,
        /// `pow2`, a constant, or a comma-separated list.
        #[arg(long, default_value = "pow2")]
        tau: String,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
    },
    /// Randomized check of the disjoint-family estimate over the level sets of a weight.
    DecompCheck {
        #[arg(long)]
        space: String,
        #[arg(long)]
        weight: String,
        /// Exponent; defaults to the one read off the fundamental function.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Family sizes; several values give an escalation curve.
        #[arg(long, value_delimiter = ',', default_value = "8")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        max_blocks: usize,
        /// Constant for a pass/fail verdict.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Explicit constructions.
    #[command(subcommand)]
    Construct(Construct),
    /// The named examples with their audits.
    Gallery,
    /// Dilation indices of φ or of a space's fundamental function.
    Indices {
        #[arg(long, conflicts_with = "space", required_unless_present = "space")]
        phi: Option<String>,
        #[arg(long)]
        space: Option<String>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Construct {
    /// Levels t_k of the greedy quasi-concave construction for a weight.
    Phi {
        #[arg(long, default_value = "recip")]
        weight: String,
        #[arg(long, default_value_t = 40)]
        levels: usize,
        /// Also write `t,phi` samples here.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Interval system Δ_1..Δ_K for an Orlicz function.
    Intervals {
        #[arg(long = "F")]
        f: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long = "K", default_value_t = 8)]
        k: usize,
        /// Upper end of the t-grid of the schedule.
        #[arg(long, default_value = "2^120")]
        t_max: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::Rearrange { .. } => "rearrange",
            Command::Kfunc { .. } => "kfunc",
            Command::Regvar { .. } => "regvar",
            Command::DecompCheck { .. } => "decomp-check",
            Command::Construct(Construct::Phi { .. }) => "construct phi",
            Command::Construct(Construct::Intervals { .. }) => "construct intervals",
            Command::Gallery => "gallery",
            Command::Indices { .. } => "indices",
        }
    }
}

enum Output {
    Json(Value),
    Text(String),
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    let nonconv = e
        .chain()
        .any(|c| c.downcast_ref::<symmcouple_core::Error>().is_some_and(|ce| ce.is_non_convergence()));
    if nonconv {
        EXIT_NONCONVERGENCE
    } else {
        EXIT_INVALID
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let runner = Parallel::new(resolve_threads(g.threads)?)?;
    let out = dispatch(&cli.command, g, &runner)?;
    let text = match out {
        Output::Text(s) => s,
        Output::Json(result) => {
            let mut config = serde_json::to_value(&cli.command)?;
            if let Value::Object(m) = &mut config {
                m.insert("depth".into(), json!(g.depth));
            }
            let env = report::envelope(cli.command.name(), g.seed, config, result);
            serde_json::to_string_pretty(&env)? + "\n"
        }
    };
    match &g.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn columns(header: [&str; 2], a: &[f64], b: &[f64]) -> Result<String> {
    let mut buf = Vec::new();
    csv_io::write_columns(&mut buf, header, a, b)?;
    Ok(String::from_utf8(buf)?)
}

fn want_json(g: &Global, default_json: bool) -> bool {
    match g.format {
        Some(Format::Json) => true,
        Some(Format::Csv) => false,
        None => default_json,
    }
}

fn dispatch(cmd: &Command, g: &Global, runner: &Parallel) -> Result<Output> {
    match cmd {
        Command::Norm { space, x } => {
            let s = dsl::parse_space(space)?;
            let x = csv_io::read_step_file(x)?;
            let v = s.norm(&x)?;
            if want_json(g, false) {
                Ok(Output::Json(json!({ "space": s.label(), "norm": num(v) })))
            } else {
                Ok(Output::Text(format!("{v}\n")))
            }
        }
        Command::Rearrange { x } => {
            let star = csv_io::read_step_file(x)?.rearrange();
            let csv = csv_io::step_to_string(&star);
            Ok(if want_json(g, false) { Output::Json(json!({ "x_star": csv })) } else { Output::Text(csv) })
        }
        Command::Kfunc { space, weight, x, per_octave, hi_octaves, tol, max_sweeps } => {
            let s = dsl::parse_space(space)?;
            let w = dsl::parse_weight(weight, g.depth)?;
            let x = csv_io::read_step_file(x)?;
            if *per_octave == 0 {
                bail!("--per-octave must be at least 1");
            }
            let grid = log_grid(*per_octave, *hi_octaves);
            let opts = KOptions { tol: *tol, max_sweeps: *max_sweeps };
            let sols = runner.run(grid.len(), |i| k_generic(&s, &w, &x, grid[i], &opts));
            let sols = sols.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
            let ks: Vec<f64> = sols.iter().map(|s| s.value).collect();
            if !want_json(g, false) {
                return Ok(Output::Text(columns(["t", "K"], &grid, &ks)?));
            }
            let diag: Vec<Value> = sols
                .iter()
                .zip(&grid)
                .map(|(s, t)| json!({ "t": num(*t), "K": num(s.value), "sweeps": s.sweeps, "start": s.start, "converged": s.converged }))
                .collect();
            Ok(Output::Json(json!({ "space": s.label(), "curve": diag, "t": nums(&grid), "K": nums(&ks) })))
        }
        Command::Regvar { phi, p, tau, c, n_max } => {
            let phi = dsl::parse_phi(phi)?;
            let p = dsl::number(p)?;
            let sched = dsl::parse_schedule(tau)?;
            let r = phi.regvar_test(p, &sched, *c, *n_max)?;
            Ok(Output::Json(json!({ "phi": phi.label(), "report": report::equivalence(&r) })))
        }
        Command::DecompCheck { space, weight, p, trials, n, max_blocks, c } => {
            let s = dsl::parse_space(space)?;
            let w = dsl::parse_weight(weight, g.depth)?;
            let p = match p {
                Some(p) => dsl::number(p)?,
                None => s.default_exponent()?,
            };
            if n.is_empty() {
                bail!("--n needs at least one family size");
            }
            decomp_check(&s, &w, weight, p, *trials, n, *max_blocks, *c, g.seed, runner).map(Output::Json)
        }
        Command::Construct(Construct::Phi { weight, levels, samples }) => {
            let w = dsl::parse_weight(weight, g.depth)?;
            let b = build_phi_theorem6(&w, *levels)?;
            let ks: Vec<f64> = (0..b.t_levels.len()).map(|k| k as f64).collect();
            let mut ts = Vec::new();
            for (i, &t) in b.t_levels.iter().enumerate() {
                ts.push(t);
                if let Some(&next) = b.t_levels.get(i + 1) {
                    ts.push(0.5 * (t + next));
                }
            }
            ts.reverse();
            let phis: Vec<f64> = ts.iter().map(|t| b.phi.eval(*t)).collect();
            if let Some(path) = samples {
                let f = std::fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
                csv_io::write_columns(f, ["t", "phi"], &ts, &phis)?;
            }
            if want_json(g, false) {
                Ok(Output::Json(json!({
                    "t_levels": nums(&b.t_levels),
                    "g_samples": nums(&b.g_samples),
                    "phi_samples": { "t": nums(&ts), "phi": nums(&phis) },
                    "audit": "passed",
                })))
            } else {
                Ok(Output::Text(columns(["k", "t"], &ks, &b.t_levels)?))
            }
        }
        Command::Construct(Construct::Intervals { f, p, c, k, t_max }) => {
            let fun = dsl::parse_orlicz(f)?;
            let v = v_schedule(&fun, *p, *c, *k, dsl::number(t_max)?)?;
            let sys = orlicz_intervals(&fun, &v, *k)?;
            if want_json(g, false) {
                let worst = modular_audit(&fun, &sys, 200, g.seed, runner);
                let iv: Vec<Value> = sys.partition.intervals().iter().map(|(a, b)| json!([num(*a), num(*b)])).collect();
                Ok(Output::Json(json!({
                    "F": fun.label(),
                    "intervals": iv,
                    "v": nums(&sys.v),
                    "warnings": sys.warnings,
                    "modular_max": num(worst),
                })))
            } else {
                let mut buf = Vec::new();
                csv_io::write_partition(&mut buf, &sys.partition)?;
                Ok(Output::Text(String::from_utf8(buf)?))
            }
        }
        Command::Gallery => gallery().map(Output::Json),
        Command::Indices { phi, space } => {
            let (label, phi): (String, PhiFunction) = match (phi, space) {
                (Some(p), _) => {
                    let phi = dsl::parse_phi(p)?;
                    (phi.label(), phi)
                }
                (None, Some(s)) => {
                    let s = dsl::parse_space(s)?;
                    (s.label(), s.fundamental_phi()?)
                }
                (None, None) => bail!("give --phi or --space"),
            };
            let idx = phi.dilation_indices()?;
            Ok(Output::Json(json!({
                "of": label,
                "gamma": num(idx.gamma),
                "delta": num(idx.delta),
                "gamma_rms": num(idx.gamma_rms),
                "delta_rms": num(idx.delta_rms),
                "exponent": num(idx.exponent()),
            })))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn decomp_check(
    s: &SpaceSpec,
    w: &symmcouple_core::Weight,
    weight_spec: &str,
    p: f64,
    trials: usize,
    sizes: &[usize],
    max_blocks: usize,
    c: Option<f64>,
    seed: u64,
    runner: &Parallel,
) -> Result<Value> {
    let mut head = json!({
        "condition": "disjoint families over the level sets of w",
        "space": s.label(),
        "weight": weight_spec,
        "p": num(p),
        "trials": trials,
    });
    let mut r = if let [n] = sizes {
        let fam = FamilySpec::from_weight(w, *n, seed)?.with_max_blocks(max_blocks);
        decomp_empirical_test(s, p, &fam, trials, runner)?
    } else {
        if max_blocks != 8 {
            bail!("--max-blocks is only supported with a single --n");
        }
        let curve = escalation_curve(s, p, w, sizes, trials, seed, runner)?;
        let consts: Vec<(usize, f64)> = curve.iter().map(|(n, r)| (*n, r.constant())).collect();
        head["curve"] = Value::Array(
            curve
                .iter()
                .map(|(n, r)| json!({ "n": n, "min_ratio": num(r.min_ratio), "max_ratio": num(r.max_ratio), "constant": num(r.constant()) }))
                .collect(),
        );
        head["escalates"] = json!(escalation_detected(&consts));
        let mut it = curve.into_iter();
        let mut all = it.next().expect("at least one size").1;
        for (_, r) in it {
            all.merge(r);
        }
        all
    };
    if let Some(c) = c {
        r = r.judge(c);
        head["verdict"] = json!(if r.passed_at_c.is_some() { "pass" } else { "fail" });
    }
    head["n"] = json!(sizes);
    head["min_ratio"] = num(r.min_ratio);
    head["max_ratio"] = num(r.max_ratio);
    head["constant"] = num(r.constant());
    head["witnesses"] = json!({ "min": report::witness(&r.witness_min), "max": report::witness(&r.witness_max) });
    head["notes"] = json!(r.notes);
    Ok(head)
}

fn gallery() -> Result<Value> {
    let mut out = Vec::new();
    for e in example_gallery()? {
        let v = match &e.item {
            GalleryItem::Orlicz(f) => json!({
                "kind": "orlicz",
                "label": f.label(),
                "convex": f.audit_convex(-40, 40).is_ok(),
                "sandwich_violation": f.sandwich_violation().map(num),
            }),
            GalleryItem::Phi(phi) => json!({
                "kind": "phi",
                "label": phi.label(),
                "quasi_concave": phi.audit_quasi_concave().is_ok(),
            }),
            GalleryItem::PhiWithWeight(phi, w) => json!({
                "kind": "phi-with-weight",
                "label": phi.label(),
                "quasi_concave": phi.audit_quasi_concave().is_ok(),
                "weight_dynamic_range": num(w.dynamic_range()),
            }),
        };
        let mut v = v;
        v["name"] = json!(e.name);
        v["metadata"] = json!(e.metadata);
        out.push(v);
    }
    Ok(Value::Array(out))
}
