//! `qcap` experiment runner.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qcap::capacity::{
    depolarizing_ic_closed_form, depolarizing_threshold, maximize_coherent_information,
    maximize_coherent_information_from, maximize_holevo, nonconvexity_two_shot_with,
    repetition_coherent_information, superactivation_inits, superactivation_search, OptimizerOptions,
};
use qcap::channels::{
    apply, channel_to_json, choi, completeness_residual, compose, matrix_from_json, matrix_to_json, tensor,
    ChannelJson, DensityMatrix, MatrixJson,
};
use qcap::entropics::coherent_information;
use qcap::numerics::{partial_trace, ComplexMatrix};
use qcap::switch::{
    bottleneck_comparison, switched_cd, switched_cd_holevo_closed_form, switched_eb, switched_eb_formula,
};
use qcap::zoo::{catalog, classify, eb_xy, erasure_50_two_qubit, horodecki_4d, parse_channel_spec};

const EXIT_VALIDATION: u8 = 2;
const EXIT_FLOOR: u8 = 3;

const SUPERACTIVATION_FLOOR: f64 = 0.01;
const SUPERACTIVATION_STRETCH: f64 = 0.1;
const HOLEVO_FRACTION_FLOOR: f64 = 0.9;
const EXPANSION_TOL: f64 = 1e-9;
const SWITCH_FORMULA_TOL: f64 = 1e-12;
const SWITCH_IC_TOL: f64 = 1e-9;
const SEQUENTIAL_CEILING: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "qcap", version, about = "Quantum channel capacity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depolarizing single-use versus three-use repetition code.
    Fig8(Common),
    /// Holevo information of the switched completely depolarizing channel.
    Fig13 {
        #[command(flatten)]
        common: Common,
        /// Largest d for which the numeric lower bound is computed.
        #[arg(long, default_value_t = 8)]
        numeric_max_d: usize,
    },
    /// Joint coherent information of the Horodecki and erasure channels.
    Superactivation(Common),
    /// Two-shot expansion of the flagged Horodecki/erasure mixture.
    Nonconvexity {
        #[command(flatten)]
        common: Common,
        /// Horodecki parameter; also used to find the default input state.
        #[arg(long, default_value_t = 0.8)]
        q: f64,
        /// 16x16 input state in matrix JSON encoding.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Switched entanglement-breaking pair.
    SwitchEb(Common),
    /// Compare the switch of two channels with sequential placements.
    Switch {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Weight of |0> in the control amplitude.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Input state in matrix JSON encoding; maximally mixed if absent.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Check a channel JSON file.
    Validate {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in channels.
    #[command(subcommand)]
    Zoo(ZooCommand),
}

#[derive(Subcommand)]
enum ZooCommand {
    List,
    /// Print a zoo channel in channel JSON.
    Export {
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma list or start:stop:step.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentConfig {
    name: Option<String>,
    grid: Option<Vec<f64>>,
    optimizer: OptimizerOptions,
    output: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug)]
struct Resolved {
    name: String,
    grid: Vec<f64>,
    optimizer: OptimizerOptions,
    output: Option<PathBuf>,
    format: Format,
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let [a, b, h] = [parts[0], parts[1], parts[2]].map(|t| t.trim().parse::<f64>());
        let (a, b, h) = (a?, b?, h?);
        if !(h > 0.0) || b < a {
            bail!("grid range {s} needs start <= stop and a positive step");
        }
        let n = ((b - a) / h + 1e-9).floor() as usize + 1;
        return Ok((0..n).map(|i| round12(a + i as f64 * h)).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad grid value '{t}'")))
        .collect()
}

fn round12(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

fn resolve(common: &Common, name: &str, default_grid: Vec<f64>, default_format: Format) -> anyhow::Result<Resolved> {
    let cfg: ExperimentConfig = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| {
                anyhow!("{}: line {} column {}: {e}", path.display(), e.line(), e.column())
            })?
        }
        None => ExperimentConfig::default(),
    };
    let mut optimizer = cfg.optimizer;
    if let Ok(seed) = std::env::var("QCAP_SEED") {
        optimizer.seed = seed.trim().parse().with_context(|| format!("QCAP_SEED='{seed}' is not an integer"))?;
    }
    if let Some(seed) = common.seed {
        optimizer.seed = seed;
    }
    if let Some(r) = common.restarts {
        optimizer.restarts = r;
    }
    if let Some(m) = common.max_iters {
        optimizer.max_iters = m;
    }
    optimizer.validate()?;
    let grid = match &common.grid {
        Some(g) => parse_grid(g)?,
        None => cfg.grid.unwrap_or(default_grid),
    };
    if grid.is_empty() {
        bail!("grid is empty");
    }
    Ok(Resolved {
        name: cfg.name.unwrap_or_else(|| name.to_string()),
        grid,
        optimizer,
        output: common.out.clone().or(cfg.output),
        format: common.format.or(cfg.format).unwrap_or(default_format),
    })
}

fn check_domain(grid: &[f64], what: &str, ok: impl Fn(f64) -> bool, domain: &str) -> anyhow::Result<()> {
    if let Some(x) = grid.iter().find(|&&x| !ok(x)) {
        bail!("{what} = {x} is outside {domain}");
    }
    Ok(())
}

/// 12 significant digits, plain notation for moderate exponents.
fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&e) {
        let fixed = format!("{:.*}", (11 - e).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{e}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn render(&self, format: Format, meta: Value) -> String {
        match format {
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|v| match v {
                            Value::Number(n) => fmt_sig(n.as_f64().expect("finite number")),
                            Value::Bool(b) => b.to_string(),
                            Value::Null => String::new(),
                            Value::String(t) => t.clone(),
                            other => other.to_string(),
                        })
                        .collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj = self.header.iter().zip(r).map(|(k, v)| (k.to_string(), v.clone())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut m = meta;
                m["rows"] = Value::Array(rows);
                to_json_text(&m)
            }
        }
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn read_state(path: &Path) -> anyhow::Result<DensityMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: MatrixJson = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))?;
    Ok(DensityMatrix::new(matrix_from_json(&m)?)?)
}

fn cmd_fig8(common: &Common) -> anyhow::Result<u8> {
    let default_grid = (0..=60).map(|i| round12(i as f64 * 0.005)).collect();
    let cfg = resolve(common, "fig8", default_grid, Format::Csv)?;
    check_domain(&cfg.grid, "q", |q| (0.0..=0.3).contains(&q), "[0, 0.3]")?;
    let rows = cfg
        .grid
        .par_iter()
        .map(|&q| -> anyhow::Result<Vec<Value>> {
            let single = depolarizing_ic_closed_form(q);
            let rep = repetition_coherent_information(q)?;
            Ok(vec![num(q), num(single), num(rep.rate), num(rep.total)])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let threshold = depolarizing_threshold();
    eprintln!("single-use coherent information vanishes at q = {}", fmt_sig(threshold));
    let table = Table {
        header: vec!["q", "ic_single", "ic_three_use_rate", "ic_three_use_total"],
        rows,
    };
    let meta = json!({ "name": cfg.name, "single_use_zero": threshold });
    emit(cfg.output.as_deref(), &table.render(cfg.format, meta))?;
    Ok(0)
}

fn cmd_fig13(common: &Common, numeric_max_d: usize) -> anyhow::Result<u8> {
    let default_grid = (2..=16).map(|d| d as f64).collect();
    let cfg = resolve(common, "fig13", default_grid, Format::Csv)?;
    check_domain(&cfg.grid, "d", |d| d.fract() == 0.0 && (2.0..=16.0).contains(&d), "the integers 2..=16")?;
    let opts = cfg.optimizer;
    let rows = cfg
        .grid
        .iter()
        .map(|&df| -> anyhow::Result<(usize, f64, Option<(f64, bool)>)> {
            let d = df as usize;
            let closed = switched_cd_holevo_closed_form(d)?;
            let numeric = if d <= numeric_max_d {
                let sw = switched_cd(d, 0.5)?;
                let est = maximize_holevo(&sw.base, Some(2 * d), &opts)?;
                Some((est.value, est.converged))
            } else {
                None
            };
            Ok((d, closed, numeric))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut code = 0;
    for (d, closed, numeric) in &rows {
        if *d == 2 {
            if let Some((v, _)) = numeric {
                if *v < HOLEVO_FRACTION_FLOOR * closed {
                    eprintln!("numeric Holevo {v} at d=2 is below {HOLEVO_FRACTION_FLOOR} x {closed}");
                    code = EXIT_FLOOR;
                }
            }
        }
    }
    let table = Table {
        header: vec!["d", "chi_closed_form", "chi_numeric_lower_bound", "converged", "restarts"],
        rows: rows
            .iter()
            .map(|(d, c, n)| match n {
                Some((v, conv)) => vec![json!(d), num(*c), num(*v), json!(conv), json!(opts.restarts)],
                None => vec![json!(d), num(*c), Value::Null, Value::Null, Value::Null],
            })
            .collect(),
    };
    let meta = json!({ "name": cfg.name, "optimizer": opts });
    emit(cfg.output.as_deref(), &table.render(cfg.format, meta))?;
    Ok(code)
}

fn cmd_superactivation(common: &Common) -> anyhow::Result<u8> {
    let default_grid = (0..=6).map(|i| round12(0.5 + 0.05 * i as f64)).collect();
    let cfg = resolve(common, "superactivation", default_grid, Format::Json)?;
    check_domain(&cfg.grid, "q", |q| q > 0.0 && q < 1.0, "(0, 1)")?;
    let report = superactivation_search(&cfg.grid, &cfg.optimizer)?;
    let reached = report
        .certified_best
        .map_or(false, |i| report.points[i].joint_best_ic >= SUPERACTIVATION_FLOOR);
    let headline = report.overall_best.map(|i| &report.points[i]);
    let text = match cfg.format {
        Format::Json => {
            let points: Vec<Value> = report
                .points
                .iter()
                .map(|p| {
                    let mut v = serde_json::to_value(p).expect("point serializes");
                    v["joint_argmax"] = serde_json::to_value(matrix_to_json(p.joint_argmax.matrix())).unwrap();
                    v
                })
                .collect();
            to_json_text(&json!({
                "name": cfg.name,
                "optimizer": cfg.optimizer,
                "points": points,
                "certified_best": report.certified_best,
                "overall_best": report.overall_best,
                "headline": headline.map(|p| json!({ "q": p.q, "joint_best_ic": p.joint_best_ic, "ppt": p.ppt })),
                "acceptance_floor": SUPERACTIVATION_FLOOR,
                "floor_reached": reached,
                "stretch_target": SUPERACTIVATION_STRETCH,
                "stretch_reached": headline.map_or(false, |p| p.joint_best_ic > SUPERACTIVATION_STRETCH),
            }))
        }
        Format::Csv => Table {
            header: vec![
                "q",
                "value",
                "converged",
                "restarts",
                "ppt",
                "min_pt_eigenvalue",
                "horodecki_best_ic",
                "erasure_best_ic",
            ],
            rows: report
                .points
                .iter()
                .map(|p| {
                    vec![
                        num(p.q),
                        num(p.joint_best_ic),
                        json!(p.joint_converged),
                        json!(cfg.optimizer.restarts),
                        json!(p.ppt),
                        num(p.min_pt_eigenvalue),
                        num(p.horodecki_best_ic),
                        num(p.erasure_best_ic),
                    ]
                })
                .collect(),
        }
        .render(Format::Csv, Value::Null),
    };
    emit(cfg.output.as_deref(), &text)?;
    if !reached {
        eprintln!(
            "no PPT-certified grid point reached joint coherent information {SUPERACTIVATION_FLOOR}; best overall {}",
            headline.map_or("none".into(), |p| format!("{} at q = {}", fmt_sig(p.joint_best_ic), p.q))
        );
        return Ok(EXIT_FLOOR);
    }
    Ok(0)
}

fn cmd_nonconvexity(common: &Common, q: f64, state: Option<&Path>) -> anyhow::Result<u8> {
    let default_grid = (1..=9).map(|i| round12(0.1 * i as f64)).collect();
    let cfg = resolve(common, "nonconvexity", default_grid, Format::Csv)?;
    check_domain(&cfg.grid, "p", |p| (0.0..=1.0).contains(&p), "[0, 1]")?;
    let rho = match state {
        Some(path) => read_state(path)?,
        None => {
            let joint = tensor(&horodecki_4d(q)?, &erasure_50_two_qubit());
            let est = maximize_coherent_information_from(&joint, &cfg.optimizer, &superactivation_inits())?;
            est.state().expect("state estimate").clone()
        }
    };
    let rows = cfg
        .grid
        .par_iter()
        .map(|&p| nonconvexity_two_shot_with(p, q, &rho).map(|t| (p, t)))
        .collect::<qcap::Result<Vec<_>>>()?;
    let worst = rows.iter().map(|(_, t)| (t.direct - t.expansion).abs()).fold(0.0, f64::max);
    let best = rows.iter().map(|(_, t)| t.direct).fold(f64::NEG_INFINITY, f64::max);
    eprintln!("largest two-shot value {}; largest expansion mismatch {}", fmt_sig(best), fmt_sig(worst));
    let table = Table {
        header: vec!["p", "ic_direct", "ic_expansion", "abs_diff"],
        rows: rows
            .iter()
            .map(|(p, t)| vec![num(*p), num(t.direct), num(t.expansion), num((t.direct - t.expansion).abs())])
            .collect(),
    };
    let meta = json!({
        "name": cfg.name,
        "horodecki_q": q,
        "state": matrix_to_json(rho.matrix()),
        "max_direct": best,
    });
    emit(cfg.output.as_deref(), &table.render(cfg.format, meta))?;
    if worst > EXPANSION_TOL {
        eprintln!("expansion mismatch {worst} exceeds {EXPANSION_TOL}");
        return Ok(EXIT_VALIDATION);
    }
    Ok(0)
}

fn cmd_switch_eb(common: &Common) -> anyhow::Result<u8> {
    let cfg = resolve(common, "switch-eb", vec![0.5], Format::Json)?;
    let opts = cfg.optimizer;
    let sw = switched_eb();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut formula_residual: f64 = 0.0;
    for _ in 0..20 {
        let rho = DensityMatrix::random(2, &mut rng);
        let a = apply(&sw.base, &rho)?;
        let b = switched_eb_formula(&rho)?;
        formula_residual = formula_residual.max(a.matrix().distance(b.matrix()));
    }
    let switched = maximize_coherent_information(&sw.base, &opts)?;
    let at_mixed = coherent_information(&DensityMatrix::maximally_mixed(2), &sw.base)?;
    let eb = eb_xy();
    let seq = compose(&eb, &eb)?;
    let sequential = maximize_coherent_information(&seq, &opts)?.value;
    let report = json!({
        "name": cfg.name,
        "optimizer": opts,
        "effective_channel_residual": formula_residual,
        "ic_switched": switched.value,
        "ic_switched_at_maximally_mixed": at_mixed,
        "ic_switched_argmax": matrix_to_json(switched.state().expect("state estimate").matrix()),
        "ic_sequential": { "M after N": sequential, "N after M": sequential },
    });
    emit(cfg.output.as_deref(), &to_json_text(&report))?;
    if formula_residual > SWITCH_FORMULA_TOL {
        eprintln!("switched channel differs from the closed form by {formula_residual}");
        return Ok(EXIT_VALIDATION);
    }
    if (switched.value - 1.0).abs() > SWITCH_IC_TOL || sequential > SEQUENTIAL_CEILING {
        eprintln!("switched coherent information {} (sequential {sequential})", switched.value);
        return Ok(EXIT_FLOOR);
    }
    Ok(0)
}

fn cmd_switch(common: &Common, left: &str, right: &str, p: f64, state: Option<&Path>) -> anyhow::Result<u8> {
    let cfg = resolve(common, "switch", vec![p], Format::Json)?;
    if cfg.format != Format::Json {
        bail!("switch emits JSON only");
    }
    let n = parse_channel_spec(left)?;
    let m = parse_channel_spec(right)?;
    let rho = match state {
        Some(path) => read_state(path)?,
        None => DensityMatrix::maximally_mixed(n.dim_in()),
    };
    let report = bottleneck_comparison(&n, &m, &rho, p, &cfg.optimizer)?;
    let out = json!({
        "name": cfg.name,
        "left": n.label(),
        "right": m.label(),
        "p": p,
        "optimizer": cfg.optimizer,
        "report": report,
    });
    emit(cfg.output.as_deref(), &to_json_text(&out))?;
    Ok(0)
}

fn cmd_validate(path: &Path, out: Option<&Path>) -> anyhow::Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: ChannelJson = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))?;
    let mut ops = Vec::with_capacity(raw.kraus.len());
    for (i, m) in raw.kraus.iter().enumerate() {
        let op: ComplexMatrix = matrix_from_json(m).with_context(|| format!("kraus[{i}]"))?;
        if op.shape() != (raw.dim_out, raw.dim_in) {
            bail!("kraus[{i}] is {:?}, expected ({}, {})", op.shape(), raw.dim_out, raw.dim_in);
        }
        ops.push(op);
    }
    if ops.is_empty() {
        bail!("channel has no Kraus operators");
    }
    let residual = completeness_residual(&ops, raw.dim_in);
    let label = raw.label.clone();
    let ch = match raw.into_channel() {
        Ok(ch) => ch,
        Err(e) => {
            let report = json!({ "label": label, "cptp_residual": residual, "valid": false, "error": e.to_string() });
            emit(out, &to_json_text(&report))?;
            eprintln!("{}: {e}", path.display());
            return Ok(EXIT_VALIDATION);
        }
    };
    let c = choi(&ch);
    let marginal = partial_trace(c.matrix(), &[ch.dim_out(), ch.dim_in()], &[1])?;
    let marginal_residual = marginal.distance(&ComplexMatrix::identity(ch.dim_in()).scale_real(1.0 / ch.dim_in() as f64));
    let class = classify(&ch);
    let report = json!({
        "label": label,
        "dim_in": ch.dim_in(),
        "dim_out": ch.dim_out(),
        "kraus_count": ch.kraus().len(),
        "cptp_residual": residual,
        "choi_marginal_residual": marginal_residual,
        "valid": true,
        "classification": class,
    });
    emit(out, &to_json_text(&report))?;
    Ok(0)
}

fn cmd_zoo(cmd: &ZooCommand) -> anyhow::Result<u8> {
    match cmd {
        ZooCommand::List => {
            let mut s = String::new();
            for e in catalog() {
                s.push_str(&format!("{:<28} {}\n", e.spec, e.description));
            }
            emit(None, &s)?;
        }
        ZooCommand::Export { spec, out } => {
            let ch = parse_channel_spec(spec)?;
            let mut text = channel_to_json(&ch);
            text.push('\n');
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Fig8(c) => cmd_fig8(c),
        Command::Fig13 { common, numeric_max_d } => cmd_fig13(common, *numeric_max_d),
        Command::Superactivation(c) => cmd_superactivation(c),
        Command::Nonconvexity { common, q, state } => cmd_nonconvexity(common, *q, state.as_deref()),
        Command::SwitchEb(c) => cmd_switch_eb(c),
        Command::Switch {
            common,
            left,
            right,
            p,
            state,
        } => cmd_switch(common, left, right, *p, state.as_deref()),
        Command::Validate { path, out } => cmd_validate(path, out.as_deref()),
        Command::Zoo(z) => cmd_zoo(z),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(0.15000000000000002), "0.15");
        assert_eq!(fmt_sig(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt_sig(123456789.123456789), "123456789.123");
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0.5:0.8:0.05").unwrap().len(), 7);
        assert_eq!(parse_grid("0.5:0.8:0.05").unwrap()[3], 0.65);
        assert_eq!(parse_grid("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a").is_err());
    }
}
