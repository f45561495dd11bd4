//! Command-line front end. `main` only forwards to [`main_with_args`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circuit::{
    all_pairs, all_pairs_formula, evaluate, parse_circuit, per_gate_bits, plan_with, Circuit,
};
use crate::error::{Error, Result};
use crate::expo::{
    leakage_bound, run_exp, statistical_leakage, KeyFlow, SecurityParam, LEAKAGE_STATE_LIMIT,
};
use crate::gates::{self, fanin_terms, DEFAULT_W_MAX};
use crate::harness::{
    audit, audit_scenario, mutants, scenarios, AuditReport, CircuitProtocol, Route, Scenario,
};
use crate::netsim::{cost_of, parse_transcript, transcript_to_string, CostReport};
use crate::sharing::{parse_seed, Bit, Rat, TapeSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Rounds the fan-in construction is claimed to take.
const FANIN_CLAIMED_ROUNDS: u32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "helper-mpc",
    version,
    about = "Helper-assisted three-party computation"
)]
pub struct Cli {
    /// Tape seed, up to 64 hex digits.
    #[arg(long, global = true, default_value = "0")]
    pub seed: String,
    /// Statistical security parameter for `exp`.
    #[arg(long, global = true, default_value_t = 4)]
    pub lambda: u32,
    /// Largest fan-in handled by one gate.
    #[arg(long, global = true, default_value_t = DEFAULT_W_MAX)]
    pub w_max: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    Xor,
    Not,
    And3,
    And4,
    Andn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Auto,
    BruteForce,
    Symbolic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one gate on plaintext input bits.
    RunGate {
        #[arg(value_enum)]
        kind: GateArg,
        /// Input bits (0 or 1).
        bits: Vec<String>,
    },
    /// Plan and evaluate a netlist.
    RunCircuit {
        file: PathBuf,
        /// Input assignments, `name=0|1`.
        #[arg(long = "input", short = 'i')]
        inputs: Vec<String>,
        /// Write the message transcript here.
        #[arg(long)]
        transcript_out: Option<PathBuf>,
    },
    /// Per-gate and total costs of a netlist or a saved transcript.
    CostReport {
        /// Netlist or transcript file.
        #[arg(required_unless_present = "all_pairs")]
        file: Option<PathBuf>,
        /// Use the generated all-pairs circuit over this many inputs.
        #[arg(long, conflicts_with = "file")]
        all_pairs: Option<usize>,
    },
    /// Exhaustive correctness and secrecy audit.
    Audit {
        /// Protocol name, mutant name, netlist path, `all` (shipped
        /// protocols) or `mutants`.
        target: String,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
        /// Brute force only; fails with the budget code when too large.
        #[arg(long, conflicts_with = "route")]
        exhaustive_only: bool,
    },
    /// Compute c^a on additively shared a.
    Exp {
        /// Public base, an integer or `p/q`.
        #[arg(long)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        exponent: i64,
        /// Bound B on |c^a| and 1/|c^a|.
        #[arg(long, default_value_t = 1 << 20)]
        bound: u64,
        /// Size of the range the exponent key is drawn from.
        #[arg(long, default_value_t = 4)]
        key_range: u32,
        /// Exponent the leakage is measured against.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        against: i64,
        /// Use the helper-chosen key flow instead of the corrected one.
        #[arg(long)]
        literal: bool,
    },
}

/// Parses `args` (including the program name), runs, and returns the text
/// to print on stdout, the text for stderr, and the exit code.
pub fn main_with_args<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                (text, String::new(), code)
            } else {
                (String::new(), text, code)
            };
        }
    };
    match run(&cli) {
        Ok((out, code)) => (out, String::new(), code),
        Err(CliError::Usage(m)) => (String::new(), format!("usage error: {m}\n"), EXIT_USAGE),
        Err(CliError::Lib(e)) => {
            let code = match e {
                Error::EnumerationBudget { .. }
                | Error::RangeTooLarge { .. }
                | Error::VariableLimit(_) => EXIT_BUDGET,
                _ => EXIT_INPUT,
            };
            (String::new(), format!("error: {e}\n"), code)
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn run(cli: &Cli) -> CliResult<(String, i32)> {
    let seed = parse_seed(&cli.seed).map_err(|m| CliError::Usage(format!("--seed: {m}")))?;
    match &cli.command {
        Command::RunGate { kind, bits } => {
            let r = run_gate(*kind, bits, seed, cli.w_max)?;
            Ok((emit(cli.format, &r, GateOutput::text), EXIT_OK))
        }
        Command::RunCircuit {
            file,
            inputs,
            transcript_out,
        } => {
            let c = load_circuit(file)?;
            let values = c.assignment(inputs)?;
            let s = plan_with(&c, cli.w_max);
            let ev = evaluate(&c, &s, &values, &mut TapeSet::new(seed))?;
            if let Some(path) = transcript_out {
                fs::write(path, transcript_to_string(&ev.transcript))
                    .map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
            }
            let r = CircuitOutput {
                outputs: c.outputs.iter().cloned().zip(ev.outputs).collect(),
                computation_bits: ev.cost.computation_bits,
                predicted_bits: s.predicted_bits(),
                sharing_bits: ev.cost.sharing_bits,
                reveal_bits: ev.cost.reveal_bits,
                rounds: ev.cost.rounds,
            };
            Ok((emit(cli.format, &r, CircuitOutput::text), EXIT_OK))
        }
        Command::CostReport { file, all_pairs: v } => {
            let r = match (file, v) {
                (_, Some(v)) => circuit_report(&all_pairs(*v), seed, cli.w_max)?,
                (Some(path), None) => {
                    let text = read(path)?;
                    if looks_like_transcript(&text) {
                        transcript_report(&cost_of(&parse_transcript(&text)?))
                    } else {
                        circuit_report(&parse_circuit(&text)?, seed, cli.w_max)?
                    }
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "cost-report needs a file or --all-pairs".into(),
                    ))
                }
            };
            Ok((emit(cli.format, &r, CostOutput::text), EXIT_OK))
        }
        Command::Audit {
            target,
            route,
            exhaustive_only,
        } => {
            let route = if *exhaustive_only {
                Route::BruteForce
            } else {
                match route {
                    RouteArg::Auto => Route::Auto,
                    RouteArg::BruteForce => Route::BruteForce,
                    RouteArg::Symbolic => Route::Symbolic,
                }
            };
            let reports = audit_target(target, route, cli.w_max)?;
            let ok = reports.iter().all(AuditReport::pass);
            let out = AuditOutput { pass: ok, reports };
            Ok((
                emit(cli.format, &out, AuditOutput::text),
                if ok { EXIT_OK } else { EXIT_INPUT },
            ))
        }
        Command::Exp {
            base,
            exponent,
            bound,
            key_range,
            against,
            literal,
        } => {
            let c: Rat = base
                .parse()
                .map_err(|_| CliError::Usage(format!("--base: `{base}` is not a rational")))?;
            let sp = SecurityParam::new(cli.lambda, *bound).with_exponent_key_range(*key_range);
            let flow = if *literal {
                KeyFlow::HelperChosen
            } else {
                KeyFlow::Corrected
            };
            let a = Rat::from_integer((*exponent).into());
            let outcome = run_exp(&c, &a, &sp, flow, &mut TapeSet::new(seed))?;
            let b = Rat::from_integer((*against).into());
            let leakage = match statistical_leakage(&c, &a, &b, &sp, flow) {
                Ok(tv) => Some(LeakageOutput {
                    against: *against,
                    total_variation: tv.to_string(),
                    bound: match leakage_bound(&c, &a, &b, &sp) {
                        Ok(bound) => bound.to_string(),
                        Err(Error::ValueBound(_)) => "n/a (non-integral powers)".into(),
                        Err(e) => return Err(e.into()),
                    },
                }),
                Err(Error::RangeTooLarge { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let r = ExpOutput {
                flow: if *literal {
                    "helper-chosen"
                } else {
                    "corrected"
                },
                value: outcome.value.to_string(),
                computation_bits: outcome.cost.computation_bits,
                rounds: outcome.cost.rounds,
                key_range: sp.key_range().to_string(),
                leakage,
            };
            Ok((emit(cli.format, &r, ExpOutput::text), EXIT_OK))
        }
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl Fn(&T) -> String) -> String {
    match format {
        Format::Text => text(value),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("output is serializable");
            s.push('\n');
            s
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())).into())
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    Ok(parse_circuit(&read(path)?)?)
}

fn looks_like_transcript(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
        .is_some_and(|w| w.parse::<u32>().is_ok())
}

// ---- run-gate -----------------------------------------------------------

#[derive(Debug, Serialize)]
struct GateOutput {
    out: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<usize>,
    bits: u64,
    rounds: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    claimed_rounds: Option<u32>,
}

impl GateOutput {
    fn text(&self) -> String {
        let mut s = format!("out={}", u8::from(self.out));
        if let Some(t) = self.terms {
            let _ = write!(s, " terms={t}");
        }
        let _ = write!(s, " bits={} rounds={}", self.bits, self.rounds);
        if let Some(c) = self.claimed_rounds {
            let _ = write!(s, " claimed_rounds={c}");
        }
        s.push('\n');
        s
    }
}

fn parse_bits(bits: &[String]) -> CliResult<Vec<bool>> {
    bits.iter()
        .map(|b| match b.as_str() {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(CliError::Usage(format!("`{b}` is not a bit"))),
        })
        .collect()
}

fn run_gate(kind: GateArg, bits: &[String], seed: [u8; 32], w_max: usize) -> CliResult<GateOutput> {
    let v = parse_bits(bits)?;
    let arity_ok = match kind {
        GateArg::Not => v.len() == 1,
        GateArg::Xor | GateArg::And3 | GateArg::And4 => v.len() == 2,
        GateArg::Andn => !v.is_empty() && v.len() <= w_max,
    };
    if !arity_ok {
        return Err(CliError::Usage(format!(
            "{kind:?} does not take {} input bit(s)",
            v.len()
        )));
    }
    let mut tapes = TapeSet::new(seed);
    let (out, t) = gates::run(&mut tapes, None, w_max, |e| {
        let h = match kind {
            GateArg::Not => {
                let x = e.share_input("a", Bit(v[0]))?;
                e.not_gate(&x)?
            }
            GateArg::Xor => {
                let x = e.share_input("a", Bit(v[0]))?;
                let y = e.share_input("b", Bit(v[1]))?;
                e.xor_gate(&x, &y)?
            }
            GateArg::And4 => {
                let x = e.share_input("a", Bit(v[0]))?;
                let y = e.share_input("b", Bit(v[1]))?;
                e.and4(&x, &y)?
            }
            GateArg::And3 => {
                let x = e.share_input("a", Bit(v[0]))?;
                e.share_input("b", Bit(v[1]))?;
                let y = e.share_input_second("b")?;
                e.and3(&x, &y)?
            }
            GateArg::Andn => {
                let xs = v
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| e.share_input(&format!("x{i}"), Bit(b)))
                    .collect::<Result<Vec<_>>>()?;
                e.fanin_and(&xs)?
            }
        };
        e.reveal(&h)
    })?;
    let cost = cost_of(&t);
    let fanin = kind == GateArg::Andn;
    Ok(GateOutput {
        out: out.as_bool(),
        terms: fanin.then(|| fanin_terms(v.len())),
        bits: cost.computation_bits,
        rounds: cost.rounds,
        claimed_rounds: fanin.then_some(FANIN_CLAIMED_ROUNDS),
    })
}

// ---- run-circuit --------------------------------------------------------

#[derive(Debug, Serialize)]
struct CircuitOutput {
    outputs: Vec<(String, bool)>,
    computation_bits: u64,
    predicted_bits: u64,
    sharing_bits: u64,
    reveal_bits: u64,
    rounds: u32,
}

impl CircuitOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        for (name, v) in &self.outputs {
            let _ = writeln!(s, "{name}={}", u8::from(*v));
        }
        let _ = writeln!(
            s,
            "bits={} predicted={} sharing_bits={} reveal_bits={} rounds={}",
            self.computation_bits,
            self.predicted_bits,
            self.sharing_bits,
            self.reveal_bits,
            self.rounds
        );
        s
    }
}

// ---- cost-report --------------------------------------------------------

/// Published three-party figures, quoted as constants for comparison.
#[derive(Debug, Serialize)]
struct ReferenceRow {
    protocol: &'static str,
    bits_per_and: &'static str,
    all_pairs_bits: &'static str,
    rounds: &'static str,
    corruptions: &'static str,
}

const REFERENCE_ROWS: [ReferenceRow; 4] = [
    ReferenceRow {
        protocol: "GMW '87",
        bits_per_and: ">50",
        all_pairs_bits: ">3v^2",
        rounds: "2",
        corruptions: "2",
    },
    ReferenceRow {
        protocol: "BMR '90",
        bits_per_and: ">10",
        all_pairs_bits: ">3v^2",
        rounds: ">2",
        corruptions: "2",
    },
    ReferenceRow {
        protocol: "CCS '16",
        bits_per_and: "3",
        all_pairs_bits: "3v(v-1)/2",
        rounds: "1",
        corruptions: "2",
    },
    ReferenceRow {
        protocol: "this scheme",
        bits_per_and: "5",
        all_pairs_bits: "v(v-1)/2+4v",
        rounds: "2",
        corruptions: "1",
    },
];

#[derive(Debug, Serialize)]
struct GateRow {
    gate: String,
    step: String,
    predicted: u64,
    measured: u64,
}

#[derive(Debug, Serialize)]
struct BoundCheck {
    v: u64,
    t: u64,
    bound: u64,
    within: bool,
}

#[derive(Debug, Serialize)]
struct FormulaCheck {
    v: u64,
    formula: u64,
    matches: bool,
}

#[derive(Debug, Serialize)]
struct CostOutput {
    source: &'static str,
    gates: Vec<GateRow>,
    computation_bits: u64,
    sharing_bits: u64,
    reveal_bits: u64,
    rounds: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_pairs: Option<FormulaCheck>,
    reference: &'static [ReferenceRow],
}

impl CostOutput {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:<16} {:>9} {:>8}",
            "gate", "step", "predicted", "measured"
        );
        for g in &self.gates {
            let _ = writeln!(
                s,
                "{:<12} {:<16} {:>9} {:>8}",
                g.gate, g.step, g.predicted, g.measured
            );
        }
        let _ = writeln!(
            s,
            "total bits={} sharing_bits={} reveal_bits={} rounds={}",
            self.computation_bits, self.sharing_bits, self.reveal_bits, self.rounds
        );
        if let Some(b) = &self.bound {
            let _ = writeln!(
                s,
                "bound 4v+t={} (v={} t={}) {}",
                b.bound,
                b.v,
                b.t,
                if b.within { "within" } else { "exceeded" }
            );
        }
        if let Some(f) = &self.all_pairs {
            let _ = writeln!(
                s,
                "all-pairs v(v-1)/2+4v={} (v={}) {}",
                f.formula,
                f.v,
                if f.matches { "match" } else { "mismatch" }
            );
        }
        let _ = writeln!(s, "reference (three parties):");
        let _ = writeln!(
            s,
            "  {:<12} {:>8} {:>14} {:>7} {:>11}",
            "protocol", "bits/AND", "all-pairs", "rounds", "corruptions"
        );
        for r in self.reference {
            let _ = writeln!(
                s,
                "  {:<12} {:>8} {:>14} {:>7} {:>11}",
                r.protocol, r.bits_per_and, r.all_pairs_bits, r.rounds, r.corruptions
            );
        }
        s
    }
}

fn step_name(step: &crate::circuit::Step) -> String {
    use crate::circuit::Step;
    match step {
        Step::Local => "local".into(),
        Step::Copy(_) => "copy".into(),
        Step::And {
            choice,
            reencrypt_right,
            ..
        } => {
            if *reencrypt_right {
                format!("reenc+{}", choice.name())
            } else {
                choice.name().to_string()
            }
        }
        Step::AndN(nodes) => format!("fanin({})", nodes.len()),
    }
}

fn circuit_report(c: &Circuit, seed: [u8; 32], w_max: usize) -> CliResult<CostOutput> {
    let s = plan_with(c, w_max);
    // costs do not depend on the input values
    let zeros = vec![false; c.inputs.len()];
    let ev = evaluate(c, &s, &zeros, &mut TapeSet::new(seed))?;
    let measured = per_gate_bits(&s, &ev.cost);
    let gates = s
        .gates
        .iter()
        .map(|g| GateRow {
            gate: g.gate.clone(),
            step: step_name(&g.step),
            predicted: g.predicted_bits,
            measured: measured[&g.gate].1,
        })
        .collect();
    let v = c.inputs.len() as u64;
    let t = c.and_count() as u64;
    let bits = ev.cost.computation_bits;
    let only_pairwise = c
        .gates
        .iter()
        .all(|g| g.kind == crate::circuit::GateKind::And);
    let bound = (only_pairwise && t > 0).then(|| BoundCheck {
        v,
        t,
        bound: 4 * v + t,
        within: bits <= 4 * v + t,
    });
    let all_pairs = c.is_all_pairs().then(|| FormulaCheck {
        v,
        formula: all_pairs_formula(v),
        matches: bits == all_pairs_formula(v),
    });
    Ok(CostOutput {
        source: "circuit",
        gates,
        computation_bits: bits,
        sharing_bits: ev.cost.sharing_bits,
        reveal_bits: ev.cost.reveal_bits,
        rounds: ev.cost.rounds,
        bound,
        all_pairs,
        reference: &REFERENCE_ROWS,
    })
}

fn transcript_report(cost: &CostReport) -> CostOutput {
    CostOutput {
        source: "transcript",
        gates: cost
            .per_gate
            .iter()
            .map(|g| GateRow {
                gate: g.gate.clone(),
                step: format!("{} round(s)", g.rounds),
                predicted: g.bits,
                measured: g.bits,
            })
            .collect(),
        computation_bits: cost.computation_bits,
        sharing_bits: cost.sharing_bits,
        reveal_bits: cost.reveal_bits,
        rounds: cost.rounds,
        bound: None,
        all_pairs: None,
        reference: &REFERENCE_ROWS,
    }
}

// ---- audit --------------------------------------------------------------

#[derive(Debug, Serialize)]
struct AuditOutput {
    pass: bool,
    reports: Vec<AuditReport>,
}

impl AuditOutput {
    fn text(&self) -> String {
        let mut s: String = self.reports.iter().map(AuditReport::render_text).collect();
        let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

fn audit_target(target: &str, route: Route, w_max: usize) -> CliResult<Vec<AuditReport>> {
    let group = match target {
        "all" => Some(scenarios()),
        "mutants" => Some(mutants()),
        _ => None,
    };
    if let Some(group) = group {
        return Ok(group
            .iter()
            .map(|s| audit_scenario(s, route))
            .collect::<Result<_>>()?);
    }
    match Scenario::by_name(target) {
        Ok(s) => Ok(vec![audit_scenario(&s, route)?]),
        Err(e) => {
            let path = Path::new(target);
            if !path.is_file() {
                return Err(e.into());
            }
            let circuit = load_circuit(path)?;
            let p = CircuitProtocol {
                name: target.to_string(),
                schedule: plan_with(&circuit, w_max),
                circuit,
            };
            Ok(vec![audit(&p, route)?])
        }
    }
}

// ---- exp ----------------------------------------------------------------

#[derive(Debug, Serialize)]
struct LeakageOutput {
    against: i64,
    total_variation: String,
    bound: String,
}

#[derive(Debug, Serialize)]
struct ExpOutput {
    flow: &'static str,
    value: String,
    computation_bits: u64,
    rounds: u32,
    key_range: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    leakage: Option<LeakageOutput>,
}

impl ExpOutput {
    fn text(&self) -> String {
        let mut s = format!(
            "value={} bits={} rounds={} flow={} key_range={}\n",
            self.value, self.computation_bits, self.rounds, self.flow, self.key_range
        );
        match &self.leakage {
            Some(l) => {
                let _ = writeln!(
                    s,
                    "leakage vs exponent {}: tv={} bound={}",
                    l.against, l.total_variation, l.bound
                );
            }
            None => {
                let _ = writeln!(s, "leakage: key range too large to enumerate (limit {LEAKAGE_STATE_LIMIT} states)");
            }
        }
        s
    }
}
