//! `qsx`: command-line front end for exchange-cost bounds.

pub mod format;
pub mod plot;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsi_exchange::bounds::{lower_bounds, upper_bounds, weak_lower_bounds, BoundReport};
use qsi_exchange::channelopt::{optimize_converse, ConverseConfig};
use qsi_exchange::conditions::{appendixc_noninclusion_suite, check_conditions, DEFAULT_TOL};
use qsi_exchange::statespec::{builtin, parse_state, to_text};
use qsi_exchange::verify::{run_paper_suite, Fault, VerifyOptions};
use qsi_exchange::{Error, LabeledPureState, ParamEnv, Role};
use serde::Serialize;
use serde_json::{json, Value};

use format::{cell, csv_line, num, round_tree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Bisection target for the u1 zero crossing.
pub const CROSSING_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "qsx", version, about = "Entanglement-cost bounds for state exchange with quantum side information")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate every bound and the exact-cost conditions for one state.
    Bounds {
        #[command(flatten)]
        io: StateArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Evaluate bounds over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        io: StateArgs,
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Comma-separated artifacts: csv, svg.
        #[arg(long, default_value = "csv")]
        emit: String,
        /// Add the weak lower bounds l3 and l4.
        #[arg(long)]
        weak: bool,
        /// Add the best split-channel converse value.
        #[arg(long)]
        converse: bool,
    },
    /// Search referee channels for a converse value.
    Converse {
        #[command(flatten)]
        io: StateArgs,
        #[arg(long)]
        dim_v: Option<usize>,
        #[arg(long)]
        dim_e: Option<usize>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        step_tol: f64,
        #[arg(long)]
        splits_only: bool,
    },
    /// Check the QCMI conditions for an exact cost.
    Conditions {
        #[command(flatten)]
        io: StateArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Run the four-relabeling non-inclusion suite instead of a state.
        #[arg(long)]
        noninclusion: bool,
    },
    /// Run the built-in reproduction checks.
    VerifyPaper {
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Inject a deliberate fault: natural-log or role-order.
        #[arg(long)]
        fault: Option<String>,
    },
    /// Parse a state file and print it back.
    Parse {
        #[command(flatten)]
        io: StateArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// State file, or `builtin:<name>` for a shipped state.
    #[arg(long)]
    pub state: Option<String>,
    /// Parameter binding `name=value`; repeatable.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses arguments and runs a command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Bounds { io, tol } => cmd_bounds(&io, tol, stdout),
        Command::Sweep {
            io,
            param,
            from,
            to,
            step,
            emit,
            weak,
            converse,
        } => {
            let opts = SweepOptions {
                param,
                from,
                to,
                step,
                weak,
                converse,
            };
            cmd_sweep(&io, &opts, &emit, stdout, stderr)
        }
        Command::Converse {
            io,
            dim_v,
            dim_e,
            restarts,
            iters,
            seed,
            step_tol,
            splits_only,
        } => {
            let cfg = ConverseConfig {
                dim_v,
                dim_e,
                restarts,
                max_iters: iters,
                step_tol,
                seed,
                splits_only,
            };
            cmd_converse(&io, &cfg, stdout)
        }
        Command::Conditions {
            io,
            tol,
            noninclusion,
        } => cmd_conditions(&io, tol, noninclusion, stdout),
        Command::VerifyPaper { format, out, fault } => {
            cmd_verify_paper(format, out.as_deref(), fault.as_deref(), stdout, stderr)
        }
        Command::Parse { io } => cmd_parse(&io, stdout),
    }
}

struct Loaded {
    id: String,
    text: String,
    env: ParamEnv,
}

fn load(io: &StateArgs) -> CliResult<Loaded> {
    let name = io
        .state
        .as_deref()
        .ok_or_else(|| CliError::Input("--state is required".into()))?;
    let text = if let Some(b) = name.strip_prefix("builtin:") {
        builtin::by_name(b)
            .ok_or_else(|| CliError::Input(format!("no built-in state `{b}`")))?
            .to_string()
    } else {
        std::fs::read_to_string(name).map_err(|e| CliError::Input(format!("cannot read {name}: {e}")))?
    };
    let mut env = ParamEnv::new();
    for a in &io.set {
        env.set_assignment(a)?;
    }
    let id = Path::new(name.trim_start_matches("builtin:"))
        .file_name()
        .map_or_else(|| name.to_string(), |f| f.to_string_lossy().into_owned());
    Ok(Loaded { id, text, env })
}

impl Loaded {
    fn state(&self) -> CliResult<LabeledPureState> {
        Ok(parse_state(&self.text, &self.env)?)
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write output: {e}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    let mut v = serde_json::to_value(v).expect("serializable report");
    round_tree(&mut v);
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("valid json");
    s.push('\n');
    s
}

fn cmd_bounds(io: &StateArgs, tol: f64, stdout: &mut dyn Write) -> CliResult<()> {
    let loaded = load(io)?;
    let s = loaded.state()?;
    let mut report = BoundReport::evaluate(&s, &loaded.id)?;
    let conditions = check_conditions(&s, tol)?;
    conditions.apply_to(&mut report);
    let text = match io.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Json => pretty(&json!({
            "bounds": to_json(&report),
            "conditions": to_json(&conditions),
        })),
        OutputFormat::Csv => {
            let mut t = csv_line([
                "state", "u1", "u2", "l1", "l2", "l3", "l4", "u_min", "l_best", "E_r", "Q_r",
                "exact_cost", "certificate",
            ]);
            let r = &report;
            let (cost, cert) = r
                .exact_cost
                .map_or((String::new(), String::new()), |e| (cell(e.value), e.certificate.to_string()));
            t.push_str(&csv_line([
                r.state_id.clone(),
                cell(r.u1),
                cell(r.u2),
                cell(r.l1),
                cell(r.l2),
                cell(r.l3),
                cell(r.l4),
                cell(r.u_min),
                cell(r.l_best),
                cell(r.fully_quantum.ebits),
                cell(r.fully_quantum.qubits),
                cost,
                cert,
            ]));
            t
        }
        OutputFormat::Text => {
            let r = &report;
            let mut t = format!("state {}\n", r.state_id);
            for (k, v) in [("u1", r.u1), ("u2", r.u2), ("l1", r.l1), ("l2", r.l2), ("l3", r.l3), ("l4", r.l4)] {
                t.push_str(&format!("  {k:<8} {}\n", cell(v)));
            }
            t.push_str(&format!("  u_min    {} ({})\n", cell(r.u_min), r.u_min_source));
            t.push_str(&format!("  l_best   {} ({})\n", cell(r.l_best), r.l_best_source));
            t.push_str(&format!(
                "  rates    E_r = {}, Q_r = {}\n",
                cell(r.fully_quantum.ebits),
                cell(r.fully_quantum.qubits)
            ));
            t.push_str(&conditions_text(&conditions));
            t
        }
    };
    emit(io.out.as_deref(), &text, stdout)
}

fn conditions_text(c: &qsi_exchange::conditions::ConditionReport) -> String {
    let mut t = String::from("conditions\n");
    for x in &c.conditions {
        t.push_str(&format!(
            "  I({:<8}) = {:<16} {} {}\n",
            x.key,
            cell(x.qcmi),
            if x.holds { "zero   " } else { "nonzero" },
            x.equality
        ));
    }
    match &c.exact_cost {
        Some(e) => t.push_str(&format!("  exact cost {} via {}\n", cell(e.value), e.certificate)),
        None => t.push_str("  exact cost not certified\n"),
    }
    for u in &c.unverified {
        t.push_str(&format!("  note: {u}\n"));
    }
    t
}

pub struct SweepOptions {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub weak: bool,
    pub converse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub u1: f64,
    pub u2: f64,
    pub l1: f64,
    pub l2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub param: f64,
    pub u1: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Strictly increasing grid from `from` to `to` (inclusive up to rounding).
pub fn grid(from: f64, to: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(CliError::Input("grid bounds must be finite".into()));
    }
    if !(from < to) {
        return Err(CliError::Input(format!("--from {from} must be below --to {to}")));
    }
    if !(step > 0.0) {
        return Err(CliError::Input(format!("--step {step} must be positive")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(CliError::Input(format!("grid of {n} points is too large")));
    }
    Ok((0..=n).map(|i| (from + i as f64 * step).min(to)).collect())
}

fn sweep_state(l: &Loaded, param: &str, x: f64) -> CliResult<LabeledPureState> {
    let mut env = l.env.clone();
    env.set(param, x)?;
    Ok(parse_state(&l.text, &env)?)
}

fn sweep_row(s: &LabeledPureState, x: f64, opts: &SweepOptions) -> CliResult<SweepRow> {
    let (u1, u2) = upper_bounds(s)?;
    let (l1, l2) = lower_bounds(s)?;
    let (l3, l4) = if opts.weak {
        let (a, b) = weak_lower_bounds(s)?;
        (Some(a), Some(b))
    } else {
        (None, None)
    };
    let converse = if opts.converse {
        let cfg = ConverseConfig {
            splits_only: true,
            ..Default::default()
        };
        Some(optimize_converse(s, &cfg)?.value)
    } else {
        None
    };
    Ok(SweepRow {
        param: x,
        u1,
        u2,
        l1,
        l2,
        l3,
        l4,
        converse,
    })
}

/// Bisection on u1 over a bracketing interval until |u1| ≤ `CROSSING_TOL`.
fn refine_crossing(l: &Loaded, param: &str, mut lo: f64, mut hi: f64, f_lo: f64) -> CliResult<Crossing> {
    let bracket = (lo, hi);
    let u1_at = |x: f64| -> CliResult<f64> { Ok(upper_bounds(&sweep_state(l, param, x)?)?.0) };
    let mut pos_lo = f_lo > 0.0;
    let mut best = (lo, f_lo);
    let mut iterations = 0;
    while iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let f = u1_at(mid)?;
        if f.abs() < best.1.abs() || iterations == 1 {
            best = (mid, f);
        }
        if f.abs() <= CROSSING_TOL && hi - lo <= 1e-9 {
            break;
        }
        if f == 0.0 || hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if (f > 0.0) == pos_lo {
            lo = mid;
            pos_lo = f > 0.0;
        } else {
            hi = mid;
        }
    }
    Ok(Crossing {
        param: best.0,
        u1: best.1,
        bracket,
        iterations,
    })
}

fn sweep_rows(l: &Loaded, opts: &SweepOptions) -> CliResult<Vec<SweepRow>> {
    grid(opts.from, opts.to, opts.step)?
        .into_iter()
        .map(|x| sweep_row(&sweep_state(l, &opts.param, x)?, x, opts))
        .collect()
}

fn crossings(l: &Loaded, opts: &SweepOptions, rows: &[SweepRow]) -> CliResult<(usize, Option<Crossing>)> {
    let mut count = 0;
    let mut first = None;
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if (a.u1 > 0.0) != (b.u1 > 0.0) {
            count += 1;
            if first.is_none() {
                first = Some(refine_crossing(l, &opts.param, a.param, b.param, a.u1)?);
            }
        }
    }
    Ok((count, first))
}

fn sweep_header(opts: &SweepOptions) -> Vec<&'static str> {
    let mut h = vec!["param", "u1", "u2", "l1", "l2"];
    if opts.weak {
        h.extend(["l3", "l4"]);
    }
    if opts.converse {
        h.push("converse");
    }
    h
}

fn row_values(r: &SweepRow) -> Vec<f64> {
    let mut v = vec![r.param, r.u1, r.u2, r.l1, r.l2];
    v.extend(r.l3);
    v.extend(r.l4);
    v.extend(r.converse);
    v
}

pub fn sweep_csv(opts: &SweepOptions, rows: &[SweepRow]) -> String {
    let mut out = csv_line(sweep_header(opts));
    for r in rows {
        out.push_str(&csv_line(row_values(r).into_iter().map(cell)));
    }
    out
}

pub fn sweep_svg(opts: &SweepOptions, rows: &[SweepRow]) -> String {
    let xs: Vec<f64> = rows.iter().map(|r| r.param).collect();
    let header = sweep_header(opts);
    let series: Vec<plot::Series> = header[1..]
        .iter()
        .enumerate()
        .map(|(k, name)| plot::Series {
            name,
            values: rows.iter().map(|r| row_values(r)[k + 1]).collect(),
        })
        .collect();
    plot::line_chart(&format!("bounds versus {}", opts.param), &opts.param, &xs, &series)
}

fn cmd_sweep(
    io: &StateArgs,
    opts: &SweepOptions,
    emit_list: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let mut want_csv = false;
    let mut want_svg = false;
    for e in emit_list.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        match e {
            "csv" => want_csv = true,
            "svg" => want_svg = true,
            other => return Err(CliError::Input(format!("unknown --emit kind `{other}`"))),
        }
    }
    if want_svg && io.out.is_none() {
        return Err(CliError::Input("--emit svg requires --out".into()));
    }
    let l = load(io)?;
    let rows = sweep_rows(&l, opts)?;
    let (count, crossing) = crossings(&l, opts, &rows)?;
    let format = io.format.unwrap_or(OutputFormat::Csv);
    let path_for = |ext: &str| io.out.as_ref().map(|p| p.with_extension(ext));

    let table = match format {
        OutputFormat::Json => Some(("json", pretty(&json!({
            "state": l.id,
            "param": opts.param,
            "columns": sweep_header(opts),
            "rows": rows.iter().map(|r| Value::Array(row_values(r).into_iter().map(num).collect())).collect::<Vec<_>>(),
            "u1_sign_changes": count,
            "u1_crossing": crossing.as_ref().map(to_json),
        })))),
        OutputFormat::Csv | OutputFormat::Text if want_csv || format == OutputFormat::Text => {
            Some(("csv", sweep_csv(opts, &rows)))
        }
        _ => None,
    };
    if let Some((ext, text)) = table {
        emit(path_for(ext).as_deref(), &text, stdout)?;
    }
    if want_svg {
        emit(path_for("svg").as_deref(), &sweep_svg(opts, &rows), stdout)?;
    }
    if format != OutputFormat::Json {
        let _ = match &crossing {
            Some(c) => writeln!(
                stderr,
                "u1 sign changes: {count}; first crossing at {} = {} (u1 = {:e})",
                opts.param,
                cell(c.param),
                c.u1
            ),
            None => writeln!(stderr, "u1 sign changes: 0"),
        };
    }
    Ok(())
}

fn cmd_converse(io: &StateArgs, cfg: &ConverseConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let loaded = load(io)?;
    let s = loaded.state()?;
    let r = optimize_converse(&s, cfg)?;
    let (l1, l2) = lower_bounds(&s)?;
    let text = match io.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Json => pretty(&json!({
            "state": loaded.id,
            "l1": num(l1),
            "l2": num(l2),
            "result": to_json(&r),
        })),
        OutputFormat::Csv => {
            let mut t = csv_line(["channel", "value"]);
            for c in &r.per_candidate {
                t.push_str(&csv_line([c.channel.clone(), cell(c.value)]));
            }
            t
        }
        OutputFormat::Text => {
            let mut t = format!("state {}\n  l1 = {}, l2 = {}\n", loaded.id, cell(l1), cell(l2));
            for c in &r.per_candidate {
                t.push_str(&format!("  {:<40} {}\n", c.channel, cell(c.value)));
            }
            t.push_str(&format!("best {} via {}\n", cell(r.value), r.best_channel.summary()));
            if let Some(b) = r.trace.continuous_best {
                t.push_str(&format!(
                    "continuous best {} over {} restarts (seed {})\n",
                    cell(b),
                    r.trace.restarts,
                    r.trace.seed
                ));
            }
            t.push_str(&format!("note: {}\n", r.caveat));
            t
        }
    };
    emit(io.out.as_deref(), &text, stdout)
}

fn cmd_conditions(io: &StateArgs, tol: f64, noninclusion: bool, stdout: &mut dyn Write) -> CliResult<()> {
    let format = io.format.unwrap_or(OutputFormat::Text);
    if noninclusion {
        let r = appendixc_noninclusion_suite()?;
        let text = match format {
            OutputFormat::Json => pretty(&json!({"passed": r.passed(), "cases": to_json(&r.cases)})),
            _ => {
                let mut t = String::new();
                for c in &r.cases {
                    let q: Vec<String> = c.qcmi.iter().map(|&v| cell(v)).collect();
                    t.push_str(&format!(
                        "{} {:<18} [{}] holds {:?} expected {}\n",
                        if c.passed() { "PASS" } else { "FAIL" },
                        c.relabeling,
                        q.join(", "),
                        c.holding.iter().map(|x| x.name()).collect::<Vec<_>>(),
                        c.expected
                    ));
                }
                t
            }
        };
        emit(io.out.as_deref(), &text, stdout)?;
        if !r.passed() {
            return Err(CliError::Verification("a relabeling satisfies other than exactly one condition".into()));
        }
        return Ok(());
    }
    let s = load(io)?.state()?;
    let r = check_conditions(&s, tol)?;
    let text = match format {
        OutputFormat::Json => pretty(&to_json(&r)),
        OutputFormat::Csv => {
            let mut t = csv_line(["key", "qcmi", "holds", "equality", "upper", "lower", "equality_holds"]);
            for c in &r.conditions {
                t.push_str(&csv_line([
                    c.key.to_string(),
                    cell(c.qcmi),
                    c.holds.to_string(),
                    c.equality.to_string(),
                    cell(c.upper),
                    cell(c.lower),
                    c.equality_holds.to_string(),
                ]));
            }
            t
        }
        OutputFormat::Text => conditions_text(&r),
    };
    emit(io.out.as_deref(), &text, stdout)
}

fn cmd_verify_paper(
    format: Option<OutputFormat>,
    out: Option<&Path>,
    fault: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let fault = match fault {
        None => None,
        Some(f) => Some(
            Fault::from_name(f)
                .ok_or_else(|| CliError::Input(format!("unknown fault `{f}` (natural-log, role-order)")))?,
        ),
    };
    let checks = run_paper_suite(&VerifyOptions { fault })?;
    let passed = checks.iter().all(|c| c.passed);
    let text = match format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Json => pretty(&json!({"passed": passed, "checks": to_json(&checks)})),
        OutputFormat::Csv => {
            let mut t = csv_line(["id", "name", "passed", "seconds"]);
            for c in &checks {
                t.push_str(&csv_line([c.id.to_string(), c.name.to_string(), c.passed.to_string(), cell(c.seconds)]));
            }
            t
        }
        OutputFormat::Text => {
            let mut t = String::new();
            for c in &checks {
                t.push_str(&format!(
                    "{} [{}] {} ({:.2} s): {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    c.seconds,
                    c.detail
                ));
            }
            t
        }
    };
    emit(out, &text, stdout)?;
    if passed {
        return Ok(());
    }
    for c in checks.iter().filter(|c| !c.passed) {
        for f in c.failures.iter().take(5) {
            let _ = writeln!(stderr, "check {} ({}): {f}", c.id, c.name);
        }
        if c.failures.len() > 5 {
            let _ = writeln!(stderr, "check {}: {} more failures", c.id, c.failures.len() - 5);
        }
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
    Err(CliError::Verification(format!("failed checks: {}", failed.join(", "))))
}

fn cmd_parse(io: &StateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let loaded = load(io)?;
    let s = loaded.state()?;
    let layout = s.layout();
    let text = match io.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => to_text(&s),
        OutputFormat::Json => {
            let roles: serde_json::Map<String, Value> = Role::ALL
                .into_iter()
                .map(|r| (r.name().to_string(), json!(layout.role_labels(r))))
                .collect();
            let nonzero = s.amplitudes().iter().filter(|a| a.norm() > 0.0).count();
            pretty(&json!({
                "state": loaded.id,
                "factors": layout.factors().iter().map(|f| json!({"label": f.label, "dim": f.dim})).collect::<Vec<_>>(),
                "roles": roles,
                "total_dim": layout.total_dim(),
                "nonzero_amplitudes": nonzero,
            }))
        }
        OutputFormat::Csv => {
            let mut t = csv_line(["index", "re", "im"]);
            for (i, a) in s.amplitudes().iter().enumerate().filter(|(_, a)| a.norm() > 0.0) {
                t.push_str(&csv_line([i.to_string(), cell(a.re), cell(a.im)]));
            }
            t
        }
    };
    emit(io.out.as_deref(), &text, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qsx").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_is_strictly_increasing() {
        let g = grid(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(grid(1.0, 0.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["bounds", "--bogus"]).0, EXIT_INPUT);
        assert_eq!(run_args(&[]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn builtin_bounds() {
        let (code, out, _) = run_args(&["bounds", "--state", "builtin:appendix-c", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["bounds"]["exact_cost"]["certificate"], "Cor3i_1");
    }

    #[test]
    fn missing_state_and_bad_binding() {
        assert_eq!(run_args(&["bounds", "--state", "/nonexistent/x.sx"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["bounds"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["bounds", "--state", "builtin:eq8", "--set", "lambda"]).0, EXIT_INPUT);
    }

    #[test]
    fn unknown_fault_is_input_error() {
        assert_eq!(run_args(&["verify-paper", "--fault", "nope"]).0, EXIT_INPUT);
    }

    #[test]
    fn numerical_errors_map_to_two() {
        let e: CliError = Error::NonConvergence { dim: 2, residual: 1.0 }.into();
        assert_eq!(e.code(), EXIT_NUMERICAL);
        let e: CliError = Error::ZeroVector.into();
        assert_eq!(e.code(), EXIT_INPUT);
    }
}
