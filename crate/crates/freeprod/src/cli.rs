//! Command-line front end.
//!
//! One binary, subcommand style. Algebra inputs are JSON (inline or a file
//! path), weights are exact-fraction strings, and every randomized command
//! takes a seed (flag, else the FREEPROD_SEED environment variable, else
//! 42) so published numbers reproduce bit for bit.
//!
//! Exit codes: 0 success, 1 hypothesis violations (the violated hypothesis
//! is quoted), 2 input/parse/backend errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, Side, TracialAlgebra};
use crate::exact::{format_rational, parse_rational, rational_to_f64, Rational, Scalar};
use crate::moments::{self, FreenessReport, MomentError};
use crate::oracle::{self, OracleError, SpectralSummary};
use crate::structure::{
    self, Decomposition, StructureError, TwoProjectionCase, TwoProjectionStructure,
    VnDecomposition,
};

pub const DEFAULT_AMBIENT: usize = 1000;
pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_MAX_LEN: usize = 8;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(
    name = "freeprod",
    version,
    about = "Exact structure calculator and Monte Carlo verifier for reduced free products \
             of finite-dimensional tracial C*-algebras"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Engine {
    Closed,
    Induction,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact decomposition, simplicity and unique-trace verdicts of A * B.
    Decompose {
        /// Left algebra: inline JSON or a path to a JSON file.
        #[arg(long)]
        left: String,
        /// Right algebra: inline JSON or a path to a JSON file.
        #[arg(long)]
        right: String,
        /// Which engine to run; `both` cross-checks them against each other.
        #[arg(long, value_enum, default_value_t = Engine::Closed)]
        engine: Engine,
    },
    /// Von Neumann variant: interpolated-free-group-factor part plus the
    /// same matrix blocks.
    Vn {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Exact structure of two free projections with traces alpha >= beta.
    Twoproj {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Exact free-product trace of a word.
    Moments {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Word syntax: whitespace-separated letters like
        /// `L:p1 R:e11 L:u^2*p1*u^-2 center(R:e11)`.
        #[arg(long)]
        word: String,
    },
    /// Monte Carlo simulations against the exact predictions.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Randomized exact-freeness verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Spectrum of the rotated projection product p·q̃·p at dimension N.
    Twoproj {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long = "N", default_value_t = DEFAULT_AMBIENT)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the eigenvalue sample as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Empirical word trace under a fresh Haar rotation per trial.
    Word {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        word: String,
        #[arg(long = "N", default_value_t = DEFAULT_AMBIENT)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Alternating words in the conjugated scalar subalgebras have exact
    /// trace zero against every trailing shift power.
    Lemma31 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Comma-separated exact weights, e.g. 1/2,1/2.
        #[arg(long)]
        weights: String,
        /// Proper divisor of n selecting the coarser subalgebra variant.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long = "max-len", default_value_t = DEFAULT_MAX_LEN)]
        max_len: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Products of conjugated projections and diagonal units are
    /// trace-orthogonal to every nontrivial shift power.
    Cor32 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        weights: String,
        #[arg(long = "spanning-words", default_value_t = 100)]
        spanning_words: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    /// A mathematical hypothesis failed; exits with code 1.
    #[error("{0}")]
    Hypothesis(String),
    /// I/O, parse or backend failure; exits with code 2.
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Hypothesis(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::DimensionHypothesisViolated { .. }
            | StructureError::HypothesisViolated(_)
            | StructureError::DomainError(_) => CliError::Hypothesis(e.to_string()),
            StructureError::IndexError(_) | StructureError::Algebra(_) => {
                CliError::Input(e.to_string())
            }
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::HypothesisViolated(_) => CliError::Hypothesis(e.to_string()),
            MomentError::ShapeMismatch(_) | MomentError::Parse(_) => {
                CliError::Input(e.to_string())
            }
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::AmbientTooSmall(_) | OracleError::InvalidInput(_) => {
                CliError::Hypothesis(e.to_string())
            }
            OracleError::Moment(m) => m.into(),
            OracleError::ShapeMismatch(_) | OracleError::Linalg(_) => {
                CliError::Input(e.to_string())
            }
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Seed precedence: explicit flag, then FREEPROD_SEED, then 42.
pub fn resolve_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var("FREEPROD_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_SEED)
}

fn load_algebra(input: &str) -> Result<TracialAlgebra, CliError> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        std::fs::read_to_string(input)
            .map_err(|e| CliError::Input(format!("cannot read '{input}': {e}")))?
    };
    Ok(TracialAlgebra::from_json(&text)?)
}

fn parse_weight_list(input: &str) -> Result<Vec<Rational>, CliError> {
    input
        .split(',')
        .map(|w| parse_rational(w).map_err(CliError::Input))
        .collect()
}

/// Executes a parsed configuration and renders its report.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    match &config.command {
        Command::Decompose { left, right, engine } => {
            let a = load_algebra(left)?;
            let b = load_algebra(right)?;
            let d = match engine {
                Engine::Closed => structure::decompose(&a, &b)?,
                Engine::Induction => structure::decompose_by_induction(&a, &b)?,
                Engine::Both => {
                    let d1 = structure::decompose(&a, &b)?;
                    let d2 = structure::decompose_by_induction(&a, &b)?;
                    if d1 != d2 {
                        return Err(CliError::Input(
                            "internal cross-check failed: the closed form and the induction \
                             engine disagree"
                                .into(),
                        ));
                    }
                    d1
                }
            };
            Ok(match config.format {
                Format::Json => to_json(&d)?,
                Format::Text => render_decomposition(&d),
            })
        }
        Command::Vn { left, right } => {
            let a = load_algebra(left)?;
            let b = load_algebra(right)?;
            let v = structure::vn_decompose(&a, &b)?;
            Ok(match config.format {
                Format::Json => to_json(&v)?,
                Format::Text => render_vn(&v),
            })
        }
        Command::Twoproj { alpha, beta } => {
            let alpha = parse_rational(alpha).map_err(CliError::Input)?;
            let beta = parse_rational(beta).map_err(CliError::Input)?;
            let t = structure::two_projection_structure(&alpha, &beta)?;
            Ok(match config.format {
                Format::Json => to_json(&t)?,
                Format::Text => render_two_projection(&t),
            })
        }
        Command::Moments { left, right, word } => {
            let a = load_algebra(left)?;
            let b = load_algebra(right)?;
            let w = moments::parse_word(word, &a, &b)?;
            let t = moments::word_trace(&w, &a, &b)?;
            Ok(match config.format {
                Format::Json => to_json(&WordTraceReport::new(word, &t))?,
                Format::Text => format!("τ({word}) = {}\n", scalar_text(&t)),
            })
        }
        Command::Simulate(sim) => run_simulate(sim, config.format),
        Command::Verify(v) => run_verify(v, config.format),
    }
}

fn run_simulate(sim: &SimulateCommand, format: Format) -> Result<String, CliError> {
    match sim {
        SimulateCommand::Twoproj { alpha, beta, n, trials, seed, csv } => {
            let alpha = parse_rational(alpha).map_err(CliError::Input)?;
            let beta = parse_rational(beta).map_err(CliError::Input)?;
            let seed = resolve_seed(*seed);
            let run = oracle::two_projection_spectrum(&alpha, &beta, *n, *trials, seed)?;
            if let Some(path) = csv {
                let file = std::fs::File::create(path)
                    .map_err(|e| CliError::Input(format!("cannot write '{}': {e}", path.display())))?;
                oracle::write_eigenvalue_csv(std::io::BufWriter::new(file), &run.sample)
                    .map_err(|e| CliError::Input(e.to_string()))?;
            }
            Ok(match format {
                Format::Json => to_json(&run.summary)?,
                Format::Text => render_spectral_summary(&run.summary, &alpha, &beta),
            })
        }
        SimulateCommand::Word { left, right, word, n, trials, seed } => {
            let a = load_algebra(left)?;
            let b = load_algebra(right)?;
            let w = moments::parse_word(word, &a, &b)?;
            let seed = resolve_seed(*seed);
            let est = oracle::empirical_word_trace(&a, &b, &w, *n, *trials, seed)?;
            let exact = moments::word_trace(&w, &a, &b)?;
            let exact_re = rational_to_f64(&exact.re);
            Ok(match format {
                Format::Json => to_json(&SimulatedWordReport {
                    word: word.clone(),
                    mean: est.mean,
                    stderr: est.stderr,
                    exact: scalar_text(&exact),
                    n: *n,
                    trials: *trials,
                    seed,
                })?,
                Format::Text => format!(
                    "empirical τ({word}) = {:.6} ± {:.6}   (exact {} ≈ {:.6}; N={n}, trials={trials}, seed={seed})",
                    est.mean, est.stderr, scalar_text(&exact), exact_re
                ),
            })
        }
    }
}

fn run_verify(v: &VerifyCommand, format: Format) -> Result<String, CliError> {
    let (report, seed) = match v {
        VerifyCommand::Lemma31 { m, n, weights, l, samples, max_len, seed } => {
            let ws = parse_weight_list(weights)?;
            let seed = resolve_seed(*seed);
            (moments::verify_lemma31(*m, *n, &ws, *l, *samples, *max_len, seed)?, seed)
        }
        VerifyCommand::Cor32 { n, weights, spanning_words, seed } => {
            let ws = parse_weight_list(weights)?;
            let seed = resolve_seed(*seed);
            (moments::verify_corollary32(*n, &ws, *spanning_words, seed)?, seed)
        }
    };
    Ok(match format {
        Format::Json => to_json(&report)?,
        Format::Text => render_freeness(&report, seed),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Serialize)]
struct WordTraceReport {
    word: String,
    trace: TraceRepr,
}

#[derive(Serialize)]
struct TraceRepr {
    re: String,
    im: String,
}

impl WordTraceReport {
    fn new(word: &str, t: &Scalar) -> Self {
        WordTraceReport {
            word: word.to_string(),
            trace: TraceRepr { re: format_rational(&t.re), im: format_rational(&t.im) },
        }
    }
}

#[derive(Serialize)]
struct SimulatedWordReport {
    word: String,
    mean: f64,
    stderr: f64,
    exact: String,
    n: usize,
    trials: usize,
    seed: u64,
}

// ---------------------------------------------------------------------------
// text rendering
// ---------------------------------------------------------------------------

fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn matrix_symbol(n: usize) -> String {
    format!("𝕄{}", subscript(n))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn scalar_text(t: &Scalar) -> String {
    use num_traits::Zero;
    if t.im.is_zero() {
        format_rational(&t.re)
    } else {
        format!("{} + {}·i", format_rational(&t.re), format_rational(&t.im))
    }
}

fn witness_name(side: Side, idx: usize) -> String {
    match side {
        Side::Left => format!("f·p{}", subscript(idx)),
        Side::Right => format!("f·q{}", subscript(idx)),
    }
}

fn projection_name(side: Side, idx: usize) -> String {
    match side {
        Side::Left => format!("p{}", subscript(idx)),
        Side::Right => format!("q{}", subscript(idx)),
    }
}

/// Renders the decomposition in ⊕-notation with verdict lines and, when
/// boundary maps exist, the exact-sequence line.
pub fn render_decomposition(d: &Decomposition) -> String {
    let mut out = String::new();
    let mut pieces = vec![format!("𝔄₀^{{{}}}", format_rational(&d.factor.weight))];
    for b in &d.plus_blocks {
        pieces.push(format!(
            "{}^{{{}}} (p{}∧q{})",
            matrix_symbol(b.size),
            format_rational(&b.gamma),
            subscript(b.left),
            subscript(b.right)
        ));
    }
    out.push_str(&format!("𝔄 = {}\n", pieces.join(" ⊕ ")));
    if d.plus_blocks.is_empty() && d.boundary_maps.is_empty() && d.factor.simple {
        out.push_str("𝔄 simple with unique trace\n");
    } else {
        out.push_str(&format!(
            "𝔄₀: unital: {}, simple: {}, unique trace: {}\n",
            yes_no(d.factor.unital),
            yes_no(d.factor.simple),
            yes_no(d.factor.unique_trace)
        ));
    }
    for bm in &d.boundary_maps {
        out.push_str(&format!(
            "0 → 𝔄₀₀ → 𝔄₀ → {} → 0   (π₍{},{}₎ sends f·p{} and f·q{} to 1)\n",
            matrix_symbol(bm.target_size),
            subscript(bm.left),
            subscript(bm.right),
            subscript(bm.left),
            subscript(bm.right)
        ));
    }
    if let Some(k) = &d.kernel {
        out.push_str(&format!(
            "𝔄₀₀ = ∩ ker π: simple: {}, unital: {}, unique trace: {}\n",
            yes_no(k.simple),
            yes_no(k.unital),
            yes_no(k.unique_trace)
        ));
    }
    if !d.factor.diffuse_witnesses.is_empty() {
        let names: Vec<String> =
            d.factor.diffuse_witnesses.iter().map(|&(s, i)| witness_name(s, i)).collect();
        out.push_str(&format!("diffuse abelian witnesses on {}\n", names.join(", ")));
    }
    for claim in &d.fullness {
        let (side, idx) = claim.projection;
        let target = match &claim.within {
            structure::IdealRef::Algebra => "𝔄".to_string(),
            structure::IdealRef::FactorPart => "𝔄₀".to_string(),
            structure::IdealRef::KernelIntersection { pairs } => {
                let kers: Vec<String> = pairs
                    .iter()
                    .map(|(i, j)| format!("ker π₍{},{}₎", subscript(*i), subscript(*j)))
                    .collect();
                format!("𝔄₀ ∩ {}", kers.join(" ∩ "))
            }
        };
        let name = match &claim.within {
            structure::IdealRef::Algebra => projection_name(side, idx),
            _ => witness_name(side, idx),
        };
        out.push_str(&format!("{name} is full in {target}\n"));
    }
    if let Some(note) = &d.note {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

fn render_vn(v: &VnDecomposition) -> String {
    let mut pieces = vec![format!("{}^{{{}}}", v.factor.label, format_rational(&v.factor.weight))];
    for b in &v.plus_blocks {
        pieces.push(format!(
            "{}^{{{}}} (p{}∧q{})",
            matrix_symbol(b.size),
            format_rational(&b.gamma),
            subscript(b.left),
            subscript(b.right)
        ));
    }
    let mut out = format!("A ⋆ B = {}\n", pieces.join(" ⊕ "));
    out.push_str("the interpolation parameter t is not computed\n");
    if let Some(note) = &v.note {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

fn render_two_projection(t: &TwoProjectionStructure) -> String {
    let case = match t.case {
        TwoProjectionCase::Distinct => "distinct traces (1 > α > β ≥ 1/2)",
        TwoProjectionCase::EqualAboveHalf => "equal traces above one half",
        TwoProjectionCase::Half => "both traces one half",
    };
    format!(
        "case: {case}\natom at p∧(1−q): {}\natom at p∧q: {}\ncontinuous part: 𝕄₂-valued on support ≈ [{:.6}, {:.6}]\n",
        format_rational(&t.atom_p_not_q),
        format_rational(&t.atom_p_and_q),
        t.support.0,
        t.support.1
    )
}

fn render_spectral_summary(s: &SpectralSummary, alpha: &Rational, beta: &Rational) -> String {
    use num_traits::{One, Zero};
    let one = Rational::one();
    let overlap = alpha + beta - &one;
    let expected_atom1 = if overlap > Rational::zero() { overlap } else { Rational::zero() };
    let gap = alpha - beta;
    let expected_atom0 = if gap > Rational::zero() { gap } else { Rational::zero() };
    format!(
        "two-projection spectrum: N={}, trials={}, seed={}\n\
         atom at 1: mass {:.5} ± {:.5}   (expected α+β−1 = {})\n\
         atom at 0: mass {:.5}           (expected α−β = {})\n\
         support: [{:.4}, {:.4}]\n",
        s.n,
        s.trials,
        s.seed,
        s.atom1_mass,
        s.stderr,
        format_rational(&expected_atom1),
        s.atom0_mass,
        format_rational(&expected_atom0),
        s.support.0,
        s.support.1
    )
}

fn render_freeness(r: &FreenessReport, seed: u64) -> String {
    if r.all_zero() {
        format!(
            "{}/{} words: τ = 0\nall {} trace evaluations exactly zero (seed {})\n",
            r.words_checked, r.words_checked, r.trace_evaluations, seed
        )
    } else {
        let mut out = format!(
            "{}/{} words: τ = 0 FAILED for {} evaluations (seed {})\n",
            r.words_checked - r.failures.len(),
            r.words_checked,
            r.failures.len(),
            seed
        );
        for f in &r.failures {
            out.push_str(&format!("  {f}\n"));
        }
        out
    }
}
