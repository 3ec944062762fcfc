//! The `invforge` command line.
//!
//! Every report is available as prose (`--format text`) or as one JSON object
//! per line (`--format json-lines`) carrying the same fields.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::anf::{parse_with, render_with, Names, Polynomial, VarClass, VarId};
use crate::boolfun::{annihilators, is_absorber, BoolFun6};
use crate::cipher::{step, CipherState, RoundBits, RoundMode, RoundSystem, Wiring};
use crate::fe::{build_fe_with_budget, symbolic_fe, CoefficientSystem, FeError, DEFAULT_TERM_BUDGET};
use crate::lab::{explore_factorizations, search_random_functions, verify_invariant, LinearFormBank};
use crate::lincycle::{affine_of, functional_polynomial, linear_invariant_periods, orbit, weight_sequence, WeightMask};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Caps the worker threads of the parallel commands.
pub const THREADS_ENV: &str = "INVFORGE_THREADS";

/// A comment line switching a polynomial file to the form alphabet, where
/// `A..H` are the eight linear forms.
const FORMS_DIRECTIVE: &str = "# names: forms";

#[derive(Debug, Parser)]
#[command(name = "invforge", version, about = "Polynomial invariants of T-310 style rounds")]
pub struct RunConfig {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the fundamental equation of an invariant.
    Fe(FeArgs),
    /// Check the proof chain of the degree-7 invariant.
    VerifyThm(VerifyArgs),
    /// Annihilator space of a polynomial up to a degree.
    Annihilators(AnnihilatorArgs),
    /// Absorbers of a polynomial up to a degree.
    Absorbers(AbsorberArgs),
    /// Explore affine factorizations.
    Factor(FactorArgs),
    /// Periods of linear invariants of the key-independent round.
    LinearCycle(LinearCycleArgs),
    /// Look for random functions admitting an invariant.
    Search(SearchArgs),
    /// Run rounds of the cipher on one state.
    Step(StepArgs),
}

#[derive(Debug, Args)]
pub struct FeArgs {
    #[arg(long)]
    pub lzs: PathBuf,
    #[arg(long)]
    pub invariant: PathBuf,
    #[arg(long, conflicts_with = "symbolic")]
    pub boolfun: Option<PathBuf>,
    /// Keep the function's 64 ANF coefficients as unknowns.
    #[arg(long)]
    pub symbolic: bool,
    /// Maximal number of terms in any intermediate polynomial.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub lzs: PathBuf,
    #[arg(long)]
    pub boolfun: PathBuf,
    /// Another invariant to check instead of the theorem's.
    #[arg(long)]
    pub invariant: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Detail::Steps)]
    pub report: Detail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Detail {
    Steps,
    Summary,
}

#[derive(Debug, Args)]
pub struct AnnihilatorArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Comma separated variables; defaults to the support.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
}

#[derive(Debug, Args)]
pub struct AbsorberArgs {
    #[command(flatten)]
    pub space: AnnihilatorArgs,
    /// Only test whether this polynomial absorbs.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub trees: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct LinearCycleArgs {
    #[arg(long)]
    pub lzs: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub max_period: usize,
    /// `lowercase26`, `all36` or a hex mask over `x1..x36`.
    #[arg(long, default_value = "lowercase26")]
    pub mask: String,
    /// Length of each weight sequence.
    #[arg(long, default_value_t = 127)]
    pub rounds: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub lzs: PathBuf,
    #[arg(long)]
    pub invariant: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StepArgs {
    #[arg(long)]
    pub lzs: PathBuf,
    #[arg(long)]
    pub boolfun: PathBuf,
    /// Starting state as hex, bit `i - 1` holding `x_i`; random from the seed
    /// when absent.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    /// Fixed `F K L` bits for every round, e.g. `101`; random otherwise.
    #[arg(long)]
    pub fkl: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

fn usage(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{context}: {e}"))
}

impl From<FeError> for CliError {
    fn from(e: FeError) -> Self {
        match e {
            FeError::Budget(b) => CliError::Budget(b.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Collects the records of one run.
struct Output {
    format: Format,
    text: String,
}

impl Output {
    fn line(&mut self, text: impl AsRef<str>) {
        if self.format == Format::Text {
            self.text.push_str(text.as_ref());
            self.text.push('\n');
        }
    }

    fn record(&mut self, value: Value) {
        if self.format == Format::JsonLines {
            self.text.push_str(&value.to_string());
            self.text.push('\n');
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| usage("stdin", e))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| usage(&path.display().to_string(), e))
}

fn load_wiring(path: &PathBuf) -> Result<Wiring, CliError> {
    Wiring::parse(&read_input(path)?).map_err(|e| usage(&path.display().to_string(), e))
}

fn load_boolfun(path: &PathBuf) -> Result<BoolFun6, CliError> {
    BoolFun6::from_file_contents(&read_input(path)?).map_err(|e| usage(&path.display().to_string(), e))
}

/// A polynomial file and the alphabet it is written in.
fn load_poly(path: &PathBuf) -> Result<(Polynomial, Names), CliError> {
    let text = read_input(path)?;
    let names = if text.lines().any(|l| l.trim() == FORMS_DIRECTIVE) { Names::Forms } else { Names::Standard };
    let p = parse_with(&text, names).map_err(|e| usage(&path.display().to_string(), e))?;
    Ok((p, names))
}

/// An invariant over the state bits. Forms are expanded with the standard bank.
fn load_invariant(path: &PathBuf) -> Result<Polynomial, CliError> {
    let (p, _) = load_poly(path)?;
    if p.support().iter().any(|v| v.class() == VarClass::Form) {
        Ok(LinearFormBank::standard().expand(&p))
    } else {
        Ok(p)
    }
}

fn names_of(vars: &[VarId], names: Names) -> Vec<String> {
    vars.iter().map(|&v| render_with(&Polynomial::var(v), names)).collect()
}

fn fe(args: &FeArgs, out: &mut Output) -> Result<i32, CliError> {
    let w = load_wiring(&args.lzs)?;
    let p = load_invariant(&args.invariant)?;
    let report = if args.symbolic {
        symbolic_fe(&p, &w, Some(args.budget.unwrap_or(DEFAULT_TERM_BUDGET)))?
    } else {
        let mode = match &args.boolfun {
            Some(path) => RoundMode::Expanded(load_boolfun(path)?),
            None => RoundMode::Placeholder,
        };
        build_fe_with_budget(&p, &RoundSystem::new(&w, mode), args.budget)?
    };
    let depends: Vec<String> = report.depends_on.iter().map(|v| v.name()).collect();
    let rendered = render_with(&report.fe, Names::Standard);
    out.line(format!("mode: {}", report.mode.name()));
    out.line(format!("is_zero: {}", report.is_zero));
    out.line(format!("terms: {}", report.fe.len()));
    out.line(format!("degree: {}", report.fe.degree()));
    out.line(format!("depends_on: {}", if depends.is_empty() { "-".to_string() } else { depends.join(",") }));
    let mut record = json!({
        "kind": "fe",
        "mode": report.mode.name(),
        "is_zero": report.is_zero,
        "terms": report.fe.len(),
        "degree": report.fe.degree(),
        "depends_on": depends,
    });
    if args.symbolic {
        let system = CoefficientSystem::from_report(&report);
        out.line(format!("coefficient_equations: {}", system.equations.len()));
        out.line(format!("linear: {}", system.is_linear()));
        record["coefficient_equations"] = json!(system.equations.len());
        record["linear"] = json!(system.is_linear());
    }
    out.line(format!("fe: {rendered}"));
    record["fe"] = json!(rendered);
    out.record(record);
    let verdict = match report.mode {
        RoundMode::Expanded(_) => report.is_zero,
        _ => true,
    };
    Ok(if verdict { EXIT_OK } else { EXIT_FALSE })
}

fn verify_thm(args: &VerifyArgs, out: &mut Output) -> Result<i32, CliError> {
    let w = load_wiring(&args.lzs)?;
    let f = load_boolfun(&args.boolfun)?;
    let p = match &args.invariant {
        Some(path) => load_invariant(path)?,
        None => crate::lab::theorem_invariant(),
    };
    let report = verify_invariant(&w, &f, &p).map_err(|e| usage("hypothesis violated", e))?;
    for s in &report.steps {
        if args.report == Detail::Steps {
            let verdict = if s.passed { "PASS" } else { "FAIL" };
            out.line(format!("step {:<4} {verdict}  {}: {}", s.step.label(), s.step.title(), s.detail));
        }
        out.record(json!({
            "kind": "step",
            "step": s.step.label(),
            "title": s.step.title(),
            "passed": s.passed,
            "detail": s.detail,
        }));
    }
    let verdict = if report.all_passed() { "ALL STEPS PASS" } else { "SOME STEPS FAIL" };
    out.line(format!("full_chain: {}", report.full_chain));
    out.line(verdict);
    out.record(json!({
        "kind": "verdict",
        "full_chain": report.full_chain,
        "all_passed": report.all_passed(),
        "verdict": verdict,
    }));
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FALSE })
}

fn annihilator_space(
    args: &AnnihilatorArgs,
) -> Result<(Polynomial, Names, crate::boolfun::AnnihilatorBasis), CliError> {
    let (p, names) = load_poly(&args.poly)?;
    let vars = if args.vars.is_empty() {
        p.support()
    } else {
        args.vars
            .iter()
            .map(|s| {
                parse_with(s, names)
                    .ok()
                    .and_then(|v| v.support().first().copied().filter(|_| v.len() == 1 && v.degree() == 1))
                    .ok_or_else(|| CliError::Usage(format!("--vars: {s:?} is not a variable")))
            })
            .collect::<Result<_, _>>()?
    };
    let space = annihilators(&p, &vars, args.degree).map_err(|e| usage("annihilators", e))?;
    Ok((p, names, space))
}

fn annihilators_cmd(args: &AnnihilatorArgs, out: &mut Output) -> Result<i32, CliError> {
    let (_, names, space) = annihilator_space(args)?;
    let basis: Vec<String> = space.basis.iter().map(|g| render_with(g, names)).collect();
    out.line(format!("variables: {}", names_of(&space.variables, names).join(",")));
    out.line(format!("degree_bound: {}", space.degree_bound));
    out.line(format!("dimension: {}", space.dimension()));
    for g in &basis {
        out.line(format!("basis: {g}"));
    }
    out.record(json!({
        "kind": "annihilators",
        "variables": names_of(&space.variables, names),
        "degree_bound": space.degree_bound,
        "dimension": space.dimension(),
        "basis": basis,
    }));
    Ok(EXIT_OK)
}

/// Absorbers are listed one by one up to this annihilator dimension.
const MAX_LISTED_DIM: usize = 10;

fn absorbers_cmd(args: &AbsorberArgs, out: &mut Output) -> Result<i32, CliError> {
    if let Some(path) = &args.check {
        let (f, names) = load_poly(&args.space.poly)?;
        let (g, _) = load_poly(path)?;
        let absorbs = is_absorber(&f, &g);
        out.line(format!("candidate: {}", render_with(&g, names)));
        out.line(format!("absorbs: {absorbs}"));
        out.record(json!({"kind": "absorber-check", "candidate": render_with(&g, names), "absorbs": absorbs}));
        return Ok(if absorbs { EXIT_OK } else { EXIT_FALSE });
    }
    // g absorbs f exactly when g + 1 annihilates f
    let (_, names, space) = annihilator_space(&args.space)?;
    let basis: Vec<String> = space.basis.iter().map(|g| render_with(g, names)).collect();
    let listed: Vec<String> = if space.dimension() <= MAX_LISTED_DIM {
        std::iter::once("1".to_string())
            .chain(space.elements().iter().map(|g| render_with(&g.complement(), names)))
            .collect()
    } else {
        Vec::new()
    };
    out.line(format!("variables: {}", names_of(&space.variables, names).join(",")));
    out.line(format!("degree_bound: {}", space.degree_bound));
    out.line(format!("dimension: {}", space.dimension()));
    out.line("offset: 1");
    for g in &basis {
        out.line(format!("direction: {g}"));
    }
    for g in &listed {
        out.line(format!("absorber: {g}"));
    }
    out.record(json!({
        "kind": "absorbers",
        "variables": names_of(&space.variables, names),
        "degree_bound": space.degree_bound,
        "dimension": space.dimension(),
        "offset": "1",
        "directions": basis,
        "absorbers": listed,
    }));
    Ok(EXIT_OK)
}

fn factor(args: &FactorArgs, out: &mut Output) -> Result<i32, CliError> {
    let (p, names) = load_poly(&args.poly)?;
    if args.trees == 0 {
        return Err(CliError::Usage("--trees must be positive".into()));
    }
    let trees = explore_factorizations(&p, args.trees, args.seed);
    let paths: Vec<_> = trees.iter().flat_map(|t| t.paths()).collect();
    // a factor set is the sorted list of factors with the cofactor
    let sets: BTreeSet<(Vec<String>, String)> = paths
        .iter()
        .map(|path| {
            let mut fs: Vec<String> = path.factors.iter().map(|l| format!("({})", render_with(l, names))).collect();
            fs.sort();
            (fs, render_with(&path.cofactor, names))
        })
        .collect();
    let verified = trees.iter().all(|t| t.verify()) && paths.iter().all(|path| path.product() == p);
    out.line(format!("poly: {}", render_with(&p, names)));
    out.line(format!("trees: {}", trees.len()));
    out.line(format!("paths: {}", paths.len()));
    out.line(format!("verified: {verified}"));
    out.line(format!("distinct_factor_sets: {}", sets.len()));
    out.record(json!({
        "kind": "factor",
        "poly": render_with(&p, names),
        "trees": trees.len(),
        "paths": paths.len(),
        "verified": verified,
        "distinct_factor_sets": sets.len(),
    }));
    for (factors, cofactor) in &sets {
        out.line(format!("set: {} cofactor: {cofactor}", factors.concat()));
        out.record(json!({"kind": "factor-set", "factors": factors, "cofactor": cofactor}));
    }
    Ok(if verified { EXIT_OK } else { EXIT_FALSE })
}

fn linear_cycle(args: &LinearCycleArgs, out: &mut Output) -> Result<i32, CliError> {
    let w = load_wiring(&args.lzs)?;
    let mask = WeightMask::parse(&args.mask).map_err(|e| usage("--mask", e))?;
    let ar = affine_of(&w);
    let classes = linear_invariant_periods(&ar, args.max_period).map_err(|e| usage("--max-period", e))?;
    out.line(format!("invertible: {}", ar.is_invertible()));
    out.line(format!("classes: {}", classes.len()));
    out.record(json!({"kind": "linear-cycle", "invertible": ar.is_invertible(), "classes": classes.len()}));
    for class in &classes {
        for u in &class.basis {
            let weights = weight_sequence(&orbit(&ar, u, args.rounds), &mask);
            let functional = render_with(&functional_polynomial(u), Names::Standard);
            let listed: Vec<String> = weights.iter().map(u32::to_string).collect();
            out.line(format!(
                "period {} dim {} functional {functional} weights {}",
                class.period,
                class.invariant_dim,
                listed.join(",")
            ));
            out.record(json!({
                "kind": "period",
                "period": class.period,
                "dim": class.invariant_dim,
                "functional": functional,
                "weights": weights,
            }));
        }
    }
    Ok(EXIT_OK)
}

fn search(args: &SearchArgs, out: &mut Output) -> Result<i32, CliError> {
    let w = load_wiring(&args.lzs)?;
    let p = load_invariant(&args.invariant)?;
    let r = search_random_functions(&w, &p, args.trials, args.seed)?;
    out.line(format!("trials: {}", r.trials));
    out.line(format!("seed: {}", r.seed));
    out.line(format!("hits: {}", r.hits.len()));
    out.line(format!("frequency: {:.6e}", r.frequency));
    out.line(format!("wilson95: [{:.6e}, {:.6e}]", r.interval.0, r.interval.1));
    out.record(json!({
        "kind": "search",
        "trials": r.trials,
        "seed": r.seed,
        "hits": r.hits.len(),
        "frequency": r.frequency,
        "wilson95": [r.interval.0, r.interval.1],
    }));
    for (i, f) in &r.hits {
        out.line(format!("hit: {i} {} {}", f.to_hex(), f.render_anf()));
        out.record(json!({"kind": "hit", "trial": i, "truth_table": f.to_hex(), "anf": f.render_anf()}));
    }
    Ok(EXIT_OK)
}

fn parse_fkl(text: &str) -> Result<RoundBits, CliError> {
    match text.as_bytes() {
        [f, k, l] if [f, k, l].iter().all(|b| matches!(b, b'0' | b'1')) => {
            Ok(RoundBits::new(*f == b'1', *k == b'1', *l == b'1'))
        }
        _ => Err(CliError::Usage(format!("--fkl: expected three bits like 101, got {text:?}"))),
    }
}

fn step_cmd(args: &StepArgs, out: &mut Output) -> Result<i32, CliError> {
    let w = load_wiring(&args.lzs)?;
    let f = load_boolfun(&args.boolfun)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut state = match &args.state {
        Some(hex) => {
            let bits = u64::from_str_radix(hex.trim_start_matches("0x"), 16).map_err(|e| usage("--state", e))?;
            if bits > CipherState::MASK {
                return Err(CliError::Usage(format!("--state: {hex} has more than 36 bits")));
            }
            CipherState::new(bits)
        }
        None => CipherState::random(&mut rng),
    };
    let fixed = args.fkl.as_deref().map(parse_fkl).transpose()?;
    let fkl = |b: RoundBits| format!("{}{}{}", b.f as u8, b.k as u8, b.l as u8);
    out.line(format!("round 0 state {:09x}", state.bits()));
    out.record(json!({"kind": "state", "round": 0, "state": format!("{:09x}", state.bits())}));
    for r in 1..=args.rounds {
        let bits = fixed.unwrap_or_else(|| RoundBits::random(&mut rng));
        state = step(state, &w, &f, bits);
        out.line(format!("round {r} state {:09x} fkl {}", state.bits(), fkl(bits)));
        out.record(json!({"kind": "state", "round": r, "state": format!("{:09x}", state.bits()), "fkl": fkl(bits)}));
    }
    Ok(EXIT_OK)
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        // a second run in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs one command, writing its report to `out` and diagnostics to `err`.
/// Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    configure_threads();
    let mut output = Output { format: config.format, text: String::new() };
    let result = match &config.command {
        Command::Fe(a) => fe(a, &mut output),
        Command::VerifyThm(a) => verify_thm(a, &mut output),
        Command::Annihilators(a) => annihilators_cmd(a, &mut output),
        Command::Absorbers(a) => absorbers_cmd(a, &mut output),
        Command::Factor(a) => factor(a, &mut output),
        Command::LinearCycle(a) => linear_cycle(a, &mut output),
        Command::Search(a) => search(a, &mut output),
        Command::Step(a) => step_cmd(a, &mut output),
    };
    match result {
        Ok(code) => {
            let _ = out.write_all(output.text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "invforge: {e}");
            e.code()
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
