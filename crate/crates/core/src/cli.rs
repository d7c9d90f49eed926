//! Command-line front end: spec files in, JSON or CSV reports out.
//!
//! Exit codes: 0 for decided verdicts and evidence, 2 for `Undecided` or
//! `Inconclusive`, 1 for errors (reported as a JSON object on stderr).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{self, SplitReport, SplitWitness};
use crate::density::{density_estimate, relative_estimate, DensityEstimate, IndexSet, Judgement, Tri};
use crate::error::{Error, Result};
use crate::expansion::{canonicality_violation, expand_element, support, CircleElement, CANONICAL_WINDOW};
use crate::membership::{self, Outcome, Params};
use crate::rational::{self, RationalRepr};
use crate::sequences::ArithmeticSequence;
use crate::spec::{self, ElementSpec, SeqSpec, SetSpec};
use crate::statconv::{oracle_membership, Evidence};

pub const DEFAULT_PREFIX: u64 = 100_000;
pub const DEFAULT_CORPUS_SIZE: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Expand,
    Density,
    ClassifySeq,
    Oracle,
    Check,
    Compare,
    Corpus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything one invocation needs, after flag parsing.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seq: Option<PathBuf>,
    pub x: Option<PathBuf>,
    /// Set spec for `density`, and the optional reference set.
    pub set: Option<PathBuf>,
    pub within: Option<PathBuf>,
    pub prefix: u64,
    pub threshold: BigRational,
    pub eps: BigRational,
    pub eps_grid: Vec<BigRational>,
    pub delta: BigRational,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// CSV trace written next to a `compare` report.
    pub trace: Option<PathBuf>,
    pub jobs: usize,
    pub max_levels: usize,
    pub seed: Option<u64>,
    pub size: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let p = Params::default();
        RunConfig {
            command,
            seq: None,
            x: None,
            set: None,
            within: None,
            prefix: DEFAULT_PREFIX,
            threshold: p.threshold,
            eps: p.eps,
            eps_grid: p.eps_grid,
            delta: p.delta,
            format: Format::Json,
            output: None,
            trace: None,
            jobs: 1,
            max_levels: 32,
            seed: None,
            size: DEFAULT_CORPUS_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.prefix < 2 {
            return Err(Error::InvalidParameter(format!("prefix must be at least 2, got {}", self.prefix)));
        }
        rational::check_unit_open("threshold", &self.threshold)?;
        rational::check_unit_open("eps", &self.eps)?;
        rational::check_unit_open("delta", &self.delta)?;
        for e in &self.eps_grid {
            rational::check_unit_open("eps", e)?;
        }
        if self.jobs == 0 {
            return Err(Error::InvalidParameter("jobs must be positive".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Params {
        Params {
            n_max: self.prefix,
            threshold: self.threshold.clone(),
            eps: self.eps.clone(),
            eps_grid: self.eps_grid.clone(),
            delta: self.delta.clone(),
            jobs: self.jobs,
            ..Params::default()
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "storsion", version, about = "Statistical torsion elements of the circle for arithmetic sequences")]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Digits, ratios and fractional parts of an element.
    Expand(Inputs),
    /// Prefix density of an index set.
    Density(DensityArgs),
    /// Splitting and d-splitting classification of a sequence.
    ClassifySeq(ClassifyArgs),
    /// Numerical test of statistical convergence of `a_n x`.
    Oracle(Inputs),
    /// Symbolic membership verdict.
    Check(Inputs),
    /// Symbolic verdict against the oracle.
    Compare(CompareArgs),
    /// Generate the acceptance corpus of spec files.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, env = "STORSION_DEFAULT_PREFIX", default_value_t = DEFAULT_PREFIX)]
    prefix: u64,
    /// Density below which a set counts as null.
    #[arg(long, default_value = "1/100")]
    threshold: String,
    /// Tolerance of the symbolic limit conditions.
    #[arg(long, default_value = "1/10")]
    eps: String,
    /// Comma-separated tolerances for the oracle.
    #[arg(long, default_value = "1/4,1/10")]
    eps_grid: String,
    /// Oracle bound on the exceptional density.
    #[arg(long, default_value = "1/100")]
    delta: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct Inputs {
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    x: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long)]
    set: PathBuf,
    /// Measure relative to this set.
    #[arg(long)]
    within: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    seq: PathBuf,
    /// Level sets listed in the report.
    #[arg(long, default_value_t = 32)]
    max_levels: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Also write the oracle CSV trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CORPUS_SIZE)]
    size: usize,
    /// Directory receiving the spec files and `manifest.json`.
    #[arg(long, short)]
    output: PathBuf,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let (command, common) = match self.command {
            CliCommand::Expand(i) => {
                let mut c = RunConfig::new(Command::Expand);
                (c.seq, c.x) = (Some(i.seq), Some(i.x));
                (c, Some(i.common))
            }
            CliCommand::Oracle(i) => {
                let mut c = RunConfig::new(Command::Oracle);
                (c.seq, c.x) = (Some(i.seq), Some(i.x));
                (c, Some(i.common))
            }
            CliCommand::Check(i) => {
                let mut c = RunConfig::new(Command::Check);
                (c.seq, c.x) = (Some(i.seq), Some(i.x));
                (c, Some(i.common))
            }
            CliCommand::Compare(a) => {
                let mut c = RunConfig::new(Command::Compare);
                (c.seq, c.x, c.trace) = (Some(a.inputs.seq), Some(a.inputs.x), a.trace);
                (c, Some(a.inputs.common))
            }
            CliCommand::Density(a) => {
                let mut c = RunConfig::new(Command::Density);
                (c.set, c.within) = (Some(a.set), a.within);
                (c, Some(a.common))
            }
            CliCommand::ClassifySeq(a) => {
                let mut c = RunConfig::new(Command::ClassifySeq);
                (c.seq, c.max_levels) = (Some(a.seq), a.max_levels);
                (c, Some(a.common))
            }
            CliCommand::Corpus(a) => {
                let mut c = RunConfig::new(Command::Corpus);
                (c.seed, c.size, c.output) = (Some(a.seed), a.size, Some(a.output));
                (c, None)
            }
        };
        let mut c = command;
        if let Some(k) = common {
            c.prefix = k.prefix;
            c.threshold = rational::parse(&k.threshold)?;
            c.eps = rational::parse(&k.eps)?;
            c.eps_grid = rational::parse_list(&k.eps_grid)?;
            c.delta = rational::parse(&k.delta)?;
            c.format = k.format;
            c.output = k.output;
            c.jobs = k.jobs;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Structured form of an error, as printed on stderr.
#[derive(Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub message: String,
    pub location: Option<String>,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        let location = match e {
            Error::Spec { location, .. } => Some(location.clone()),
            _ => None,
        };
        let message = match e {
            Error::Spec { message, .. } => message.clone(),
            other => other.to_string(),
        };
        ErrorReport { error: e.kind(), message, location }
    }
}

/// A finished report and the exit code it calls for.
pub struct Artifact {
    pub text: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn load_seq(c: &RunConfig) -> Result<Arc<ArithmeticSequence>> {
    Ok(Arc::new(spec::parse_sequence(&read(need(&c.seq, "seq")?)?)?))
}

fn load_x(c: &RunConfig) -> Result<CircleElement> {
    spec::parse_element(&read(need(&c.x, "x")?)?)
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn exit_for(j: &Judgement) -> i32 {
    if j.verdict == Tri::Inconclusive {
        2
    } else {
        0
    }
}

fn exit_for_evidence(e: Evidence) -> i32 {
    if e == Evidence::Inconclusive {
        2
    } else {
        0
    }
}

#[derive(Serialize)]
struct ExpandReport {
    n_max: u64,
    sequence: SeqSpec,
    element: ElementSpec,
    ratios: Vec<u64>,
    digits: Vec<u64>,
    supp_count: u64,
    supp_q_count: u64,
    /// First index of a long run of maximal digits, if any.
    canonical_warning: Option<u64>,
    /// `{a_n x}` for `n = 0..=N`, rational inputs only.
    fractional_parts: Option<Vec<RationalRepr>>,
}

fn expand_cmd(c: &RunConfig) -> Result<Artifact> {
    let seq = load_seq(c)?;
    let x = load_x(c)?;
    let n = c.prefix;
    let p = expand_element(&x, &seq, n)?;
    let fracs = p.remainders.as_ref().map(|_| (0..=n).filter_map(|i| p.remainder(i)).map(|r| RationalRepr::from(&r)).collect::<Vec<_>>());
    let text = match c.format {
        Format::Csv => {
            let mut s = String::from("n,q,c,frac\n");
            for i in 1..=n {
                let frac = fracs.as_ref().map_or(String::new(), |f| format!("{}/{}", f[i as usize].num, f[i as usize].den));
                let _ = writeln!(s, "{i},{},{},{frac}", p.ratio(i), p.digit(i));
            }
            s
        }
        Format::Json => {
            let (supp, supp_q) = support(&p);
            to_json(&ExpandReport {
                n_max: n,
                sequence: SeqSpec::from(seq.as_ref()),
                element: ElementSpec::from(&x),
                ratios: p.ratios[1..=n as usize].to_vec(),
                digits: p.digits[1..=n as usize].to_vec(),
                supp_count: density_estimate(&supp, n)?.count,
                supp_q_count: density_estimate(&supp_q, n)?.count,
                canonical_warning: canonicality_violation(&p, CANONICAL_WINDOW),
                fractional_parts: fracs,
            })?
        }
    };
    Ok(Artifact { text, code: 0 })
}

#[derive(Serialize)]
struct DensityReport {
    set: String,
    within: Option<String>,
    estimate: DensityEstimate,
}

fn density_cmd(c: &RunConfig) -> Result<Artifact> {
    let set = spec::parse_set(&read(need(&c.set, "set")?)?)?;
    let within = c.within.as_deref().map(|p| read(p).and_then(|t| spec::parse_set(&t))).transpose()?;
    let n = c.prefix;
    let text = match c.format {
        Format::Csv => {
            let bits = set.bitmap(n)?;
            let mut s = String::from("n,member,count\n");
            let mut count = 0u64;
            for (i, &b) in bits.iter().enumerate().skip(1) {
                count += b as u64;
                let _ = writeln!(s, "{i},{},{count}", b as u8);
            }
            s
        }
        Format::Json => {
            let estimate = match &within {
                Some(w) => relative_estimate(&set, w, n)?,
                None => density_estimate(&set, n)?,
            };
            to_json(&DensityReport { set: set.describe(), within: within.as_ref().map(IndexSet::describe), estimate })?
        }
    };
    Ok(Artifact { text, code: 0 })
}

#[derive(Serialize)]
struct LevelSummary {
    value: u64,
    estimate: DensityEstimate,
}

#[derive(Serialize)]
struct ClassifyReport {
    splitting: SplitReport,
    d_splitting: Judgement,
    witness: Option<SplitWitness>,
    level_sets: Vec<LevelSummary>,
}

fn classify_cmd(c: &RunConfig) -> Result<Artifact> {
    let seq = load_seq(c)?;
    let n = c.prefix;
    let splitting = classify::is_splitting(&seq, n, None)?;
    let (d_splitting, witness) = classify::is_d_splitting(&seq, n, &c.threshold)?;
    let level_sets = classify::level_sets(&seq, n)?
        .into_iter()
        .take(c.max_levels)
        .map(|l| LevelSummary { value: l.value, estimate: l.estimate })
        .collect();
    let code = exit_for(&splitting.verdict).max(exit_for(&d_splitting));
    let report = ClassifyReport { splitting, d_splitting, witness, level_sets };
    let text = match c.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("value,count,point,window_low,window_high\n");
            for l in &report.level_sets {
                let e = &l.estimate;
                let _ = writeln!(s, "{},{},{},{},{}", l.value, e.count, e.point, e.window_low, e.window_high);
            }
            s
        }
    };
    Ok(Artifact { text, code })
}

fn oracle_cmd(c: &RunConfig) -> Result<Artifact> {
    let seq = load_seq(c)?;
    let x = load_x(c)?;
    let r = oracle_membership(&x, &seq, c.prefix, &c.eps_grid, &c.delta, c.jobs)?;
    let text = match c.format {
        Format::Json => to_json(&r)?,
        Format::Csv => r.trace_csv(),
    };
    Ok(Artifact { text, code: exit_for_evidence(r.verdict) })
}

fn check_cmd(c: &RunConfig) -> Result<Artifact> {
    let seq = load_seq(c)?;
    let x = load_x(c)?;
    let v = membership::check_thm_main(&x, &seq, &c.params())?;
    let code = if v.outcome == Outcome::Undecided { 2 } else { 0 };
    let text = match c.format {
        Format::Json => to_json(&v)?,
        Format::Csv => {
            let mut s = String::from("condition,verdict,certain,binding,count,point\n");
            for k in &v.conditions {
                let (count, point) = k.estimate.as_ref().map_or((String::new(), String::new()), |e| (e.count.to_string(), e.point.to_string()));
                let _ = writeln!(s, "\"{}\",{:?},{},{},{count},{point}", k.name.replace('"', "'"), k.verdict.verdict, k.verdict.certain, k.binding);
            }
            s
        }
    };
    Ok(Artifact { text, code })
}

fn compare_cmd(c: &RunConfig) -> Result<Artifact> {
    let seq = load_seq(c)?;
    let x = load_x(c)?;
    let r = membership::compare(&x, &seq, &c.params())?;
    if let Some(path) = &c.trace {
        fs::write(path, r.oracle.trace_csv())?;
    }
    let code = if r.agree.is_none() { 2 } else { 0 };
    let text = match c.format {
        Format::Json => to_json(&r)?,
        Format::Csv => r.oracle.trace_csv(),
    };
    Ok(Artifact { text, code })
}

/// One generated (sequence, element) pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub id: String,
    pub ratio_rule: String,
    pub support: String,
    pub value: String,
    pub variant: u64,
    pub seq: SeqSpec,
    pub x: ElementSpec,
}

const RULES: [&str; 5] = ["constant", "periodic", "affine", "example_2_6", "example_2_7"];
const SHAPES: [&str; 5] = ["finite", "evens", "odds", "squares", "level_set"];
const VALUES: [&str; 2] = ["one", "q_minus_one"];

fn random_rule(rng: &mut ChaCha8Rng, kind: &str) -> SeqSpec {
    match kind {
        "constant" => SeqSpec::ConstantRatio { q: rng.gen_range(2..=5) },
        "periodic" => {
            let len = rng.gen_range(2..=3);
            SeqSpec::PeriodicRatio { pattern: (0..len).map(|_| rng.gen_range(2..=5)).collect() }
        }
        "affine" => SeqSpec::AffineRatio { offset: rng.gen_range(1..=3) },
        "example_2_6" => SeqSpec::SquaresPartition,
        _ => SeqSpec::DyadicPartition,
    }
}

/// Support shape over `seq`, from index `lo` on.
fn shape_set(rng: &mut ChaCha8Rng, shape: &str, seq: &SeqSpec, lo: u64) -> Result<SetSpec> {
    let base = match shape {
        "finite" => {
            let k = rng.gen_range(1..=6);
            let mut elems: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=40)).collect();
            elems.sort_unstable();
            elems.dedup();
            return Ok(SetSpec::Finite { elems });
        }
        "evens" => SetSpec::Ap { start: 2, step: 2 },
        "odds" => SetSpec::Ap { start: 1, step: 2 },
        "squares" => SetSpec::Squares,
        _ => {
            let s = Arc::new(seq.to_sequence("")?);
            let levels = classify::level_members(&s, None, 4096)?;
            let values: Vec<u64> = levels.keys().copied().collect();
            let value = *values.get(1).unwrap_or(&values[0]);
            let level = SetSpec::LevelSet { seq: Box::new(seq.clone()), value };
            // a level set of density one would make the digits all maximal
            if IndexSet::level_set(&s, value).exact_density() == Some(BigRational::from_integer(1.into())) {
                SetSpec::Difference { of: Box::new(level), minus: Box::new(SetSpec::Squares) }
            } else {
                level
            }
        }
    };
    Ok(if lo > 1 { SetSpec::Intersection { of: vec![base, SetSpec::Interval { lo, hi: None }] } } else { base })
}

/// The acceptance corpus: a quarter random rationals, the rest indicator
/// elements cycling through every ratio rule, support shape and digit value.
pub fn generate_corpus(seed: u64, size: usize) -> Result<Vec<CorpusEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rationals = size / 4;
    let structured = size - rationals;
    let combos = RULES.len() * SHAPES.len() * VALUES.len();
    let mut out = Vec::with_capacity(size);
    for i in 0..structured {
        let combo = i % combos;
        let variant = (i / combos) as u64;
        let rule = RULES[combo / (SHAPES.len() * VALUES.len())];
        let shape = SHAPES[(combo / VALUES.len()) % SHAPES.len()];
        let value = VALUES[combo % VALUES.len()];
        let seq = random_rule(&mut rng, rule);
        let lo = if variant == 0 { 1 } else { rng.gen_range(2..=16) };
        let support = shape_set(&mut rng, shape, &seq, lo)?;
        let value_spec = if value == "one" { spec::DigitValueSpec::One } else { spec::DigitValueSpec::QMinusOne };
        let x = ElementSpec::DigitElement { rule: spec::DigitRuleSpec::Indicator { support, value: value_spec } };
        out.push(CorpusEntry {
            id: format!("{:03}", out.len()),
            ratio_rule: rule.into(),
            support: shape.into(),
            value: value.into(),
            variant,
            seq,
            x,
        });
    }
    for _ in 0..rationals {
        let rule = RULES[rng.gen_range(0..RULES.len())];
        let seq = random_rule(&mut rng, rule);
        let den: i64 = rng.gen_range(2..=200);
        let num: i64 = rng.gen_range(1..den);
        out.push(CorpusEntry {
            id: format!("{:03}", out.len()),
            ratio_rule: rule.into(),
            support: "rational".into(),
            value: "rational".into(),
            variant: 0,
            seq,
            x: ElementSpec::Rational { num: spec::BigIntSpec::Small(num), den: spec::BigIntSpec::Small(den) },
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    id: &'a str,
    seq_file: String,
    x_file: String,
    ratio_rule: &'a str,
    support: &'a str,
    value: &'a str,
    variant: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    seed: u64,
    size: usize,
    entries: Vec<ManifestEntry<'a>>,
}

/// Writes `<id>.seq.json`, `<id>.x.json` and `manifest.json` into `dir`.
pub fn write_corpus(dir: &Path, seed: u64, entries: &[CorpusEntry]) -> Result<String> {
    fs::create_dir_all(dir)?;
    let mut listed = Vec::new();
    for e in entries {
        let seq_file = format!("{}.seq.json", e.id);
        let x_file = format!("{}.x.json", e.id);
        fs::write(dir.join(&seq_file), to_json(&e.seq)?)?;
        fs::write(dir.join(&x_file), to_json(&e.x)?)?;
        listed.push(ManifestEntry {
            id: &e.id,
            seq_file,
            x_file,
            ratio_rule: &e.ratio_rule,
            support: &e.support,
            value: &e.value,
            variant: e.variant,
        });
    }
    let manifest = to_json(&Manifest { seed, size: entries.len(), entries: listed })?;
    fs::write(dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn corpus_cmd(c: &RunConfig) -> Result<Artifact> {
    let seed = c.seed.ok_or_else(|| Error::InvalidParameter("missing --seed".into()))?;
    let dir = need(&c.output, "output")?;
    let entries = generate_corpus(seed, c.size)?;
    write_corpus(dir, seed, &entries)?;
    Ok(Artifact { text: String::new(), code: 0 })
}

/// Runs one command and returns its report without writing it.
pub fn execute(c: &RunConfig) -> Result<Artifact> {
    c.validate()?;
    match c.command {
        Command::Expand => expand_cmd(c),
        Command::Density => density_cmd(c),
        Command::ClassifySeq => classify_cmd(c),
        Command::Oracle => oracle_cmd(c),
        Command::Check => check_cmd(c),
        Command::Compare => compare_cmd(c),
        Command::Corpus => corpus_cmd(c),
    }
}

/// Runs one command, writes its report and returns the exit code.
pub fn run(c: &RunConfig) -> i32 {
    let result = execute(c).and_then(|a| {
        if c.command != Command::Corpus {
            match &c.output {
                Some(path) => fs::write(path, &a.text)?,
                None => print!("{}", a.text),
            }
        }
        Ok(a.code)
    });
    result.unwrap_or_else(report_error)
}

pub fn report_error(e: Error) -> i32 {
    let text = serde_json::to_string(&ErrorReport::from(&e)).unwrap_or_else(|_| e.to_string());
    eprintln!("{text}");
    1
}

/// Parses `std::env::args` and runs.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match cli.into_config() {
        Ok(c) => run(&c),
        Err(e) => report_error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_files(seq: &str, x: &str) -> (tempfile::TempDir, RunConfig) {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("seq.json"), seq).unwrap();
        fs::write(dir.path().join("x.json"), x).unwrap();
        let mut c = RunConfig::new(Command::Check);
        c.seq = Some(dir.path().join("seq.json"));
        c.x = Some(dir.path().join("x.json"));
        c.prefix = 2000;
        (dir, c)
    }

    #[test]
    fn check_and_oracle_examples() {
        let (_d, mut c) = with_files(r#"{"type":"constant_ratio","q":2}"#, r#"{"type":"rational","num":1,"den":3}"#);
        let a = execute(&c).unwrap();
        assert_eq!(a.code, 0);
        assert!(a.text.contains("\"outcome\": \"NonMember\""));

        let (_d, mut half) = with_files(r#"{"type":"constant_ratio","q":2}"#, r#"{"type":"rational","num":1,"den":2}"#);
        half.command = Command::Oracle;
        half.prefix = 1000;
        let a = execute(&half).unwrap();
        assert_eq!(a.code, 0);
        assert!(a.text.contains("ConvergesEvidence"));

        c.command = Command::Expand;
        c.prefix = 4;
        c.format = Format::Csv;
        let a = execute(&c).unwrap();
        assert_eq!(a.text, "n,q,c,frac\n1,2,0,2/3\n2,2,1,1/3\n3,2,0,2/3\n4,2,1,1/3\n");
    }

    #[test]
    fn classify_example() {
        let (_d, mut c) = with_files(r#"{"type":"example_2_7"}"#, "{}");
        c.command = Command::ClassifySeq;
        c.prefix = 4096;
        let a = execute(&c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&a.text).unwrap();
        assert_eq!(v["d_splitting"]["verdict"], "Fails");
        assert_eq!(a.code, 0);
    }

    #[test]
    fn spec_errors_carry_locations() {
        let (_d, c) = with_files(r#"{"type":"table_tail","prefix":[2],"tail":{"type":"constant_ratio","q":"x"}}"#, "{}");
        let e = execute(&c).err().unwrap();
        let r = ErrorReport::from(&e);
        assert_eq!((r.error, r.location.as_deref()), ("malformed_spec", Some("/tail/q")));
    }

    #[test]
    fn corpus_is_reproducible_and_round_trips() {
        let a = generate_corpus(42, 200).unwrap();
        assert_eq!(a, generate_corpus(42, 200).unwrap());
        assert_eq!(a.len(), 200);
        assert_eq!(a.iter().filter(|e| e.support == "rational").count(), 50);
        let combos: std::collections::BTreeSet<_> =
            a.iter().filter(|e| e.support != "rational").map(|e| (&e.ratio_rule, &e.support, &e.value)).collect();
        assert_eq!(combos.len(), 50);
        for e in &a {
            let seq: SeqSpec = spec::from_json(&to_json(&e.seq).unwrap()).unwrap();
            let x: ElementSpec = spec::from_json(&to_json(&e.x).unwrap()).unwrap();
            assert_eq!((&seq, &x), (&e.seq, &e.x));
            seq.to_sequence("").unwrap();
            x.to_element("").unwrap();
        }
        assert_eq!(generate_corpus(42, 10).unwrap().len(), 10);
    }
}
