//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and returns the exit code with the rendered report, so the binary
//! is a thin wrapper and tests can drive it in-process.
//!
//! Exit codes: 0 every requested check passed, 1 a check came out false,
//! 2 bad arguments, refused caps or unreadable input.

mod source;
mod text;

use std::ffi::OsString;
use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dicke::{
    partition_set, verify_dicke_decomposition, verify_phase_identity, DickeComponentLabel,
    DEFAULT_PHASE_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::permanent::{check_family, glynn_family, oracle_agreement, verify_lower_bound, CoeffFamily};
use crate::rank::{
    classify_222, copies_needed, rank_report_exact, rank_report_numeric, rate_lower_bound,
    verify_tight_bound, w_power_rank_lower, Bipartition, RateTarget, DEFAULT_REL_TOL,
};
use crate::slocc::{verify_lemma1, verify_w_decomposition, ComponentLabel};
use crate::states::{write_state, Amplitude, AnyState, DickeSpec, Limits, PureState};

pub use source::load_state;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "slocc", version, about = "Constructive checks for GHZ/W/Dicke SLOCC transformations")]
pub struct Cli {
    /// Report format; text lists the same fields as JSON.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Largest number of entries a single construction may produce.
    #[arg(long, env = "SLOCC_ENTRY_CAP", global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub entry_cap: Option<u64>,
    /// Largest number of phase indices summed in the Dicke phase check.
    #[arg(long, env = "SLOCC_PHASE_CAP", global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub phase_cap: Option<u64>,
    /// Tolerance for floating-point checks, in (0, 1).
    #[arg(long, global = true, value_parser = parse_tol)]
    pub tol: Option<f64>,
    /// Seed for randomized corpora.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in (0, 1), got {v}"))
    }
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let bad = || format!("expected N or A..B, got {s:?}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decomposition and witness checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Flattening ranks, 2x2x2 classification and rank bounds.
    #[command(subcommand)]
    Rank(RankCmd),
    /// Copy counts and rate bounds.
    #[command(subcommand)]
    Rate(RateCmd),
    /// Permanent families and oracles.
    #[command(subcommand)]
    Perm(PermCmd),
    /// State export.
    #[command(subcommand)]
    State(StateCmd),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Split W_N^{⊗n} into weight components and check the sum.
    WDecomp {
        #[arg(long)]
        n: u32,
        #[arg(long = "N", default_value_t = 3)]
        parties: u32,
    },
    /// Check the ±1 local operators taking GHZ copies to each component.
    Lemma1 {
        #[arg(long)]
        n: u32,
        #[arg(long = "N", default_value_t = 3)]
        parties: u32,
        #[arg(long, conflicts_with = "label", required_unless_present = "label")]
        all_labels: bool,
        /// Weights `a,b,c`.
        #[arg(long)]
        label: Option<String>,
    },
    /// Dicke tensor-power components and, with --phase, the phase identity.
    Dicke {
        #[arg(long)]
        j: DickeSpec,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        phase: bool,
        /// Restrict the phase check to one label, e.g. `1;0;0`.
        #[arg(long, requires = "phase")]
        label: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct StateArg {
    /// ghz:N[:levels], w:N, w3, dicke:j1,j2,..., perm:N, wcomp:n:a,b,c or a dump file.
    #[arg(long)]
    pub state: String,
    /// Tensor power applied to the state.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub power: u32,
}

#[derive(Debug, Subcommand)]
pub enum RankCmd {
    /// Flattening ranks across a cut (`half`, `all`, `{1}|{2,3}`, `1,2`).
    Flatten {
        #[command(flatten)]
        src: StateArg,
        #[arg(long, default_value = "all")]
        cut: String,
    },
    /// Exact tensor rank of a 2x2x2 state.
    Classify {
        #[command(flatten)]
        src: StateArg,
    },
    /// Rank lower bound for W_N^{⊗n} (--w) or the tight Dicke bound (--j).
    Bounds {
        #[arg(long, requires_all = ["parties", "n"], conflicts_with = "j")]
        w: bool,
        #[arg(long = "N")]
        parties: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, required_unless_present = "w")]
        j: Option<DickeSpec>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RateCmd {
    /// Smallest m with GHZ^{⊗m} → target^{⊗n} certified, for each n.
    Copies {
        /// w3, wN:N or dicke:j1,j2,...
        #[arg(long)]
        target: String,
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u32>,
    },
    /// Lower bound on the GHZ → Dicke rate.
    Bound {
        #[arg(long)]
        j: DickeSpec,
    },
}

#[derive(Debug, Subcommand)]
pub enum PermCmd {
    /// Check that a coefficient family expands to the permanent tensor.
    Check {
        /// `glynn` or a family JSON file.
        #[arg(long)]
        family: String,
        #[arg(long = "N")]
        size: Option<u32>,
    },
    /// Brute force, Ryser and Glynn on random integer matrices.
    Oracle {
        #[arg(long = "N")]
        size: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Middle-cut flattening rank of the permanent tensor.
    Bound {
        #[arg(long = "N")]
        size: u32,
    },
    /// Write the Glynn family as JSON.
    Family {
        #[arg(long = "N")]
        size: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum StateCmd {
    /// Sparse dump (text) or entry list (json).
    Dump {
        #[command(flatten)]
        src: StateArg,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let msg = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: msg }
            } else {
                Outcome { code, stdout: msg, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome {
            code: if report.pass { EXIT_PASS } else { EXIT_FAIL },
            stdout: report.render(cli.format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// A rendered-ready report with its verdict.
pub struct Report {
    pub pass: bool,
    pub body: Value,
    /// Preformatted text that replaces the generic text layout.
    pub raw_text: Option<String>,
}

impl Report {
    fn new(pass: bool, body: impl Serialize) -> Result<Self> {
        Ok(Report {
            pass,
            body: serde_json::to_value(body)?,
            raw_text: None,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.body).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => self.raw_text.clone().unwrap_or_else(|| text::render(&self.body)),
        }
    }
}

fn limits(cli: &Cli) -> Limits {
    let mut l = Limits::default();
    if let Some(c) = cli.entry_cap {
        l.max_entries = usize::try_from(c).unwrap_or(usize::MAX);
    }
    if let Some(c) = cli.phase_cap {
        l.max_phase_indices = c;
    }
    l
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let limits = limits(cli);
    match &cli.command {
        Command::Verify(v) => run_verify(v, cli, &limits),
        Command::Rank(r) => run_rank(r, cli, &limits),
        Command::Rate(r) => run_rate(r),
        Command::Perm(p) => run_perm(p, cli, &limits),
        Command::State(StateCmd::Dump { src }) => run_dump(src, &limits),
    }
}

fn run_verify(cmd: &VerifyCmd, cli: &Cli, limits: &Limits) -> Result<Report> {
    match cmd {
        VerifyCmd::WDecomp { n, parties } => {
            let r = verify_w_decomposition(*n, *parties, limits)?;
            Report::new(r.pass, r)
        }
        VerifyCmd::Lemma1 { n, parties, label, .. } => {
            let labels = match label {
                Some(s) => {
                    let parts = s
                        .split(',')
                        .map(|p| p.trim().parse().map_err(|_| Error::Parse(format!("bad label {s:?}"))))
                        .collect::<Result<Vec<u32>>>()?;
                    vec![ComponentLabel::new(parts, *n)?]
                }
                None => ComponentLabel::all(*n, *parties as usize),
            };
            let mut reports = Vec::with_capacity(labels.len());
            for l in &labels {
                reports.push(verify_lemma1(*n, l, limits)?);
            }
            let failed: Vec<String> = reports
                .iter()
                .filter(|r| !r.check.pass)
                .map(|r| format!("{:?}", r.label))
                .collect();
            let pass = failed.is_empty();
            Report::new(
                pass,
                json!({ "n": n, "labels": reports.len(), "failed": failed, "pass": pass, "reports": reports }),
            )
        }
        VerifyCmd::Dicke { j, n, phase, label } => {
            let decomposition = verify_dicke_decomposition(*n, j, limits)?;
            let mut pass = decomposition.pass;
            let mut body = json!({ "decomposition": decomposition });
            if *phase {
                let tol = cli.tol.unwrap_or(DEFAULT_PHASE_TOLERANCE);
                let labels = match label {
                    Some(s) => vec![DickeComponentLabel::parse(s, j, *n)?],
                    None => partition_set(*n, j, limits)?,
                };
                let mut reports = Vec::with_capacity(labels.len());
                let mut worst = 0f64;
                for l in &labels {
                    let r = verify_phase_identity(*n, j, l, tol, limits)?;
                    pass &= r.pass;
                    worst = worst.max(r.max_residual);
                    reports.push(r);
                }
                body["phase"] = json!({
                    "tolerance": tol,
                    "labels": reports.len(),
                    "max_residual": worst,
                    "reports": reports,
                });
            }
            body["pass"] = json!(pass);
            Report::new(pass, body)
        }
    }
}

fn powered<T: Amplitude>(s: PureState<T>, power: u32, limits: &Limits) -> Result<PureState<T>> {
    if power == 1 {
        Ok(s)
    } else {
        s.tensor_power(power, limits)
    }
}

fn load(src: &StateArg, limits: &Limits) -> Result<AnyState> {
    Ok(match load_state(&src.state, limits)? {
        AnyState::Integer(s) => AnyState::Integer(powered(s, src.power, limits)?),
        AnyState::Rational(s) => AnyState::Rational(powered(s, src.power, limits)?),
        AnyState::Complex(s) => AnyState::Complex(powered(s, src.power, limits)?),
    })
}

fn parse_cuts(spec: &str, parties: usize) -> Result<Vec<Bipartition>> {
    if spec == "all" {
        Ok(Vec::new())
    } else {
        Ok(vec![Bipartition::parse(spec, parties)?])
    }
}

fn run_rank(cmd: &RankCmd, cli: &Cli, limits: &Limits) -> Result<Report> {
    match cmd {
        RankCmd::Flatten { src, cut } => {
            let state = load(src, limits)?;
            let report = match &state {
                AnyState::Integer(s) => rank_report_exact(s, &parse_cuts(cut, s.num_parties())?, limits)?,
                AnyState::Rational(s) => rank_report_exact(s, &parse_cuts(cut, s.num_parties())?, limits)?,
                AnyState::Complex(s) => rank_report_numeric(
                    s,
                    &parse_cuts(cut, s.num_parties())?,
                    cli.tol.unwrap_or(DEFAULT_REL_TOL),
                    limits,
                )?,
            };
            Report::new(true, json!({ "state": src.state, "power": src.power, "report": report }))
        }
        RankCmd::Classify { src } => {
            let class = match load(src, limits)? {
                AnyState::Integer(s) => classify_222(&s, limits)?,
                AnyState::Rational(s) => classify_222(&s, limits)?,
                AnyState::Complex(_) => {
                    return Err(Error::invalid("classification needs an exact state"));
                }
            };
            Report::new(true, json!({ "state": src.state, "class": class }))
        }
        RankCmd::Bounds { w, parties, n, j } => {
            if *w {
                let (parties, n) = (parties.unwrap_or(3), n.unwrap_or(1));
                let b = w_power_rank_lower(parties, n)?;
                Report::new(
                    true,
                    json!({ "N": parties, "n": n, "lower_bound": b.to_string(), "formula": "(N-1)*2^n - N + 2" }),
                )
            } else {
                let spec = j.as_ref().ok_or_else(|| Error::invalid("need --w or --j"))?;
                let r = verify_tight_bound(spec, limits)?;
                Report::new(r.pass, r)
            }
        }
    }
}

fn run_rate(cmd: &RateCmd) -> Result<Report> {
    match cmd {
        RateCmd::Copies { target, n } => {
            let t = RateTarget::parse(target)?;
            let rows = n.clone().map(|k| copies_needed(k, &t)).collect::<Result<Vec<_>>>()?;
            let monotone = rows.windows(2).all(|w| w[0].m <= w[1].m);
            Report::new(true, json!({ "target": target, "monotone": monotone, "rows": rows }))
        }
        RateCmd::Bound { j } => Report::new(true, rate_lower_bound(j)),
    }
}

fn run_perm(cmd: &PermCmd, cli: &Cli, limits: &Limits) -> Result<Report> {
    match cmd {
        PermCmd::Check { family, size } => {
            let fam = if family == "glynn" {
                glynn_family(size.ok_or_else(|| Error::invalid("--family glynn needs --N"))?)?
            } else {
                let fam = CoeffFamily::from_json(&std::fs::read_to_string(family)?)?;
                if let Some(n) = size {
                    if *n as usize != fam.size() {
                        return Err(Error::DimensionMismatch(format!(
                            "family has N = {}, --N says {n}",
                            fam.size()
                        )));
                    }
                }
                fam
            };
            let c = check_family(&fam, limits)?;
            Report::new(c.reconstructs_permanent && c.satisfied, c)
        }
        PermCmd::Oracle { size, count } => {
            let r = oracle_agreement(*size, *count, cli.seed)?;
            Report::new(r.pass, r)
        }
        PermCmd::Bound { size } => {
            let r = verify_lower_bound(*size, limits)?;
            Report::new(r.pass, r)
        }
        PermCmd::Family { size } => {
            let fam = glynn_family(*size)?;
            let body: Value = serde_json::from_str(&fam.to_json())?;
            Report::new(true, body)
        }
    }
}

fn entries_json<T: Amplitude>(s: &PureState<T>) -> Value {
    let entries: Vec<Value> = s
        .iter()
        .map(|(idx, amp)| {
            let (re, im) = amp.render();
            match im {
                Some(im) => json!([idx.render(s.spaces()), re, im]),
                None => json!([idx.render(s.spaces()), re]),
            }
        })
        .collect();
    json!({
        "parties": s.num_parties(),
        "local_dims": s.local_dims(),
        "spaces": s.spaces().iter().map(|sp| sp.to_string()).collect::<Vec<_>>(),
        "backend": T::BACKEND.name(),
        "entries": entries,
    })
}

fn run_dump(src: &StateArg, limits: &Limits) -> Result<Report> {
    let (body, raw) = match load(src, limits)? {
        AnyState::Integer(s) => (entries_json(&s), write_state(&s)),
        AnyState::Rational(s) => (entries_json(&s), write_state(&s)),
        AnyState::Complex(s) => (entries_json(&s), write_state(&s)),
    };
    Ok(Report {
        pass: true,
        body,
        raw_text: Some(raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &str) -> Outcome {
        run(std::iter::once("slocc").chain(args.split_whitespace()))
    }

    fn json_of(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {o:?}"))
    }

    #[test]
    fn verify_examples() {
        let o = go("verify w-decomp --n 4");
        assert_eq!(o.code, 0);
        assert_eq!(json_of(&o)["components"], 15);
        let o = go("verify lemma1 --n 3 --all-labels");
        assert_eq!(o.code, 0);
        assert_eq!(json_of(&o)["labels"], 10);
        let o = go("verify dicke --j 2,1 --n 2 --phase");
        assert_eq!(o.code, 0);
        assert!(json_of(&o)["phase"]["max_residual"].as_f64().unwrap() <= 1e-9);
    }

    #[test]
    fn rank_examples() {
        let o = go("rank classify --state w3");
        assert_eq!(json_of(&o)["class"]["rank"], 3);
        let o = go("rank flatten --state dicke:2,1,1 --cut half");
        assert_eq!(json_of(&o)["report"]["max_flattening"], 4);
        let o = go("rank bounds --w --N 3 --n 2");
        assert_eq!(json_of(&o)["lower_bound"], "7");
        let o = go("rank bounds --j 1,1,1");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("not claimed tight"), "{o:?}");
    }

    #[test]
    fn rate_and_perm_examples() {
        let o = go("rate copies --target w3 --n 1..10");
        let v = json_of(&o);
        assert_eq!(v["rows"][0]["m"], 3);
        assert_eq!(v["rows"].as_array().unwrap().len(), 10);
        assert_eq!(v["monotone"], true);
        assert_eq!(json_of(&go("rate bound --j 2,1,1"))["value"], 0.5);
        let o = go("perm check --family glynn --N 4");
        assert_eq!(o.code, 0);
        let v = json_of(&o);
        assert_eq!((v["terms"].clone(), v["lower_bound"].clone()), (json!(8), json!("6")));
        assert_eq!(v["reconstructs_permanent"], true);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(go("verify").code, 2);
        assert_eq!(go("verify w-decomp").code, 2);
        assert_eq!(go("--tol 2 rate bound --j 2,1").code, 2);
        assert_eq!(go("--entry-cap 0 rate bound --j 2,1").code, 2);
        let o = go("--entry-cap 100 verify w-decomp --n 5");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("100"), "{o:?}");
        assert_eq!(go("rank classify --state nonsense").code, 2);
        assert_eq!(go("--help").code, 0);
    }

    #[test]
    fn text_mirrors_json() {
        let o = go("--format text rate bound --j 2,1,1");
        assert!(o.stdout.contains("value: 0.5"), "{o:?}");
        let o = go("--format text state dump --state w3");
        assert!(o.stdout.starts_with("# parties=3"));
        assert!(o.stdout.contains("0,0,1\t1/1"));
    }
}
