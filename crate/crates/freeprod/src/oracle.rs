//! Random-matrix Monte Carlo oracle.
//!
//! Both algebras are realized as block matrices at a finite ambient
//! dimension N — matrix summands as 𝕄_n ⊗ 1_d blocks, diffuse summands as
//! diagonal blocks whose Haar generator gets a deterministic equispaced
//! unit-circle spectrum — and the right side is conjugated by a fresh Haar
//! unitary per trial. Asymptotic freeness makes empirical word traces
//! converge to the exact free-product values, finite-dimensional kernel and
//! intersection dimensions estimate the atom weights, and the spectrum of
//! the compressed projection product estimates the continuous part.
//!
//! Reproducibility contract: every randomized entry point takes a master
//! seed, trial t draws from an independent ChaCha20 stream derived from
//! (seed, t), and reductions run in fixed trial order, so identical calls
//! give bit-identical results.

use std::collections::HashMap;
use std::io::Write;
use std::rc::Rc;

use ndarray::{s, Array2};
use ndarray_linalg::{Determinant, QR, SVD};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Side, SummandKind, TracialAlgebra};
use crate::exact::{rat, rational_to_f64, Rational};
use crate::moments::{FreeWord, Letter, MomentError, SideElement, SummandElem};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("ambient dimension too small: {0}")]
    AmbientTooSmall(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("linear algebra backend: {0}")]
    Linalg(String),
}

fn lin<E: std::fmt::Display>(e: E) -> OracleError {
    OracleError::Linalg(e.to_string())
}

/// One realized summand: which block of the ambient space it occupies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizedSummand {
    pub position: usize,
    pub offset: usize,
    pub kind: RealizedKind,
    /// d·n/N, exactly.
    pub achieved_weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealizedKind {
    /// 𝕄_n ⊗ 1_multiplicity.
    Matrix { n: usize, multiplicity: usize },
    /// Diagonal block of the given dimension.
    Diffuse { dim: usize },
}

impl RealizedKind {
    fn span(&self) -> usize {
        match self {
            RealizedKind::Matrix { n, multiplicity } => n * multiplicity,
            RealizedKind::Diffuse { dim } => *dim,
        }
    }
}

/// Block layout of one algebra inside ℂ^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub ambient: usize,
    pub slots: Vec<RealizedSummand>,
}

impl BlockLayout {
    pub fn achieved_weights(&self) -> Vec<Rational> {
        self.slots.iter().map(|s| s.achieved_weight.clone()).collect()
    }
}

/// Finite-dimensional model of a free product: both layouts share the
/// ambient dimension; the right side is conjugated by a per-trial rotation.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    pub ambient: usize,
    pub left: BlockLayout,
    pub right: BlockLayout,
}

impl MatrixModel {
    pub fn new(
        a: &TracialAlgebra,
        b: &TracialAlgebra,
        ambient: usize,
    ) -> Result<Self, OracleError> {
        Ok(MatrixModel { ambient, left: realize(a, ambient)?, right: realize(b, ambient)? })
    }

    /// A fresh Haar rotation for one trial.
    pub fn sample_rotation<R: Rng>(&self, rng: &mut R) -> Array2<Complex64> {
        haar_unitary(self.ambient, rng)
    }
}

/// Derives the independent RNG stream of one trial from the master seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<Complex64> {
    Array2::from_shape_fn((rows, cols), |_| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

fn phase_fix(q: Array2<Complex64>, r: &Array2<Complex64>) -> Array2<Complex64> {
    // multiply column k by r_kk/|r_kk| so the sampled factor is Haar
    let mut u = q;
    for k in 0..u.ncols() {
        let d = r[[k, k]];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        u.column_mut(k).mapv_inplace(|z| z * phase);
    }
    u
}

/// N×N Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phases absorbed into Q.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> Array2<Complex64> {
    let g = ginibre(n, n, rng);
    let (q, r) = g.qr().expect("QR of a Ginibre matrix");
    phase_fix(q, &r)
}

/// First `cols` columns of a Haar unitary (a Haar-distributed isometry).
pub fn haar_isometry<R: Rng>(n: usize, cols: usize, rng: &mut R) -> Array2<Complex64> {
    let g = ginibre(n, cols, rng);
    let (q, r) = g.qr().expect("QR of a Ginibre matrix");
    phase_fix(q, &r)
}

/// Block multiplicities by largest-remainder rounding of αᵢN/nᵢ, subject to
/// Σ dᵢnᵢ = N with every summand receiving dᵢ ≥ 1. Diffuse summands get
/// diagonal blocks (grain 1).
pub fn realize(a: &TracialAlgebra, ambient: usize) -> Result<BlockLayout, OracleError> {
    if ambient == 0 {
        return Err(OracleError::AmbientTooSmall("ambient dimension is zero".into()));
    }
    let grains: Vec<usize> = a
        .summands()
        .iter()
        .map(|s| s.matrix_size().unwrap_or(1))
        .collect();
    let targets: Vec<Rational> = a
        .summands()
        .iter()
        .zip(&grains)
        .map(|(s, &g)| &s.weight * rat(ambient as i64, g as i64))
        .collect();
    let mut counts: Vec<i64> = targets
        .iter()
        .map(|t| t.floor().to_integer().to_i64().unwrap_or(0).max(1))
        .collect();
    let mut diff: i64 =
        ambient as i64 - counts.iter().zip(&grains).map(|(d, &g)| d * g as i64).sum::<i64>();
    let remainders: Vec<Rational> = targets
        .iter()
        .zip(&counts)
        .map(|(t, &d)| t - rat(d, 1))
        .collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    if diff > 0 {
        order.sort_by(|&i, &j| remainders[j].cmp(&remainders[i]));
        loop {
            let mut progressed = false;
            for &idx in &order {
                let g = grains[idx] as i64;
                if g <= diff {
                    counts[idx] += 1;
                    diff -= g;
                    progressed = true;
                }
            }
            if diff == 0 || !progressed {
                break;
            }
        }
    } else if diff < 0 {
        order.sort_by(|&i, &j| remainders[i].cmp(&remainders[j]));
        loop {
            let mut progressed = false;
            for &idx in &order {
                while counts[idx] > 1 && diff < 0 {
                    counts[idx] -= 1;
                    diff += grains[idx] as i64;
                    progressed = true;
                }
            }
            if diff >= 0 || !progressed {
                break;
            }
        }
    }
    if diff != 0 {
        return Err(OracleError::AmbientTooSmall(format!(
            "cannot fill dimension {ambient} exactly with blocks of sizes {grains:?}"
        )));
    }
    let mut offset = 0usize;
    let mut slots = Vec::with_capacity(counts.len());
    for ((pos, s), (&d, &g)) in a.iter1().zip(counts.iter().zip(&grains)) {
        let d = d as usize;
        let kind = match s.kind {
            SummandKind::Matrix { n } => RealizedKind::Matrix { n, multiplicity: d },
            SummandKind::Diffuse { .. } => RealizedKind::Diffuse { dim: d },
        };
        let span = kind.span();
        slots.push(RealizedSummand {
            position: pos,
            offset,
            kind,
            achieved_weight: rat((d * g) as i64, ambient as i64),
        });
        offset += span;
    }
    debug_assert_eq!(offset, ambient);
    Ok(BlockLayout { ambient, slots })
}

// ---------------------------------------------------------------------------
// realized elements
// ---------------------------------------------------------------------------

enum PartMat {
    /// block ⊗ 1_times, laid out as `times` consecutive copies.
    Repeat { block: Array2<Complex64>, times: usize },
    Diag(Vec<Complex64>),
}

/// Block-diagonal realization of a side element; products against dense
/// matrices cost O(N²·block) instead of a full N³ multiply.
pub struct BlockDiag {
    ambient: usize,
    parts: Vec<(usize, PartMat)>,
}

fn to_c64(z: &crate::exact::Scalar) -> Complex64 {
    Complex64::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

impl BlockDiag {
    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut out = Array2::zeros((self.ambient, self.ambient));
        for (offset, part) in &self.parts {
            match part {
                PartMat::Repeat { block, times } => {
                    let b = block.nrows();
                    for t in 0..*times {
                        let o = offset + t * b;
                        out.slice_mut(s![o..o + b, o..o + b]).assign(block);
                    }
                }
                PartMat::Diag(d) => {
                    for (i, z) in d.iter().enumerate() {
                        out[[offset + i, offset + i]] = *z;
                    }
                }
            }
        }
        out
    }

    /// self · x.
    pub fn left_mul(&self, x: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros(x.raw_dim());
        for (offset, part) in &self.parts {
            match part {
                PartMat::Repeat { block, times } => {
                    let b = block.nrows();
                    for t in 0..*times {
                        let o = offset + t * b;
                        let rows = x.slice(s![o..o + b, ..]);
                        out.slice_mut(s![o..o + b, ..]).assign(&block.dot(&rows));
                    }
                }
                PartMat::Diag(d) => {
                    for (i, z) in d.iter().enumerate() {
                        let row = x.row(offset + i).mapv(|v| v * z);
                        out.row_mut(offset + i).assign(&row);
                    }
                }
            }
        }
        out
    }

    /// x · self.
    pub fn right_mul(&self, x: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros(x.raw_dim());
        for (offset, part) in &self.parts {
            match part {
                PartMat::Repeat { block, times } => {
                    let b = block.nrows();
                    for t in 0..*times {
                        let o = offset + t * b;
                        let cols = x.slice(s![.., o..o + b]);
                        out.slice_mut(s![.., o..o + b]).assign(&cols.dot(block));
                    }
                }
                PartMat::Diag(d) => {
                    for (i, z) in d.iter().enumerate() {
                        let col = x.column(offset + i).mapv(|v| v * z);
                        out.column_mut(offset + i).assign(&col);
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for (_, part) in &self.parts {
            match part {
                PartMat::Repeat { block, times } => {
                    let bt: Complex64 = block.diag().sum();
                    t += bt * (*times as f64);
                }
                PartMat::Diag(d) => t += d.iter().sum::<Complex64>(),
            }
        }
        t
    }
}

/// Realizes one side element on its layout. The diffuse generator u becomes
/// the diagonal with equispaced unit-circle spectrum e^{2πi t/d}, so its
/// k-th moments vanish exactly for 0 < |k| < d.
pub fn realize_element(layout: &BlockLayout, elem: &SideElement) -> BlockDiag {
    let mut parts = Vec::with_capacity(layout.slots.len());
    for (slot, part) in layout.slots.iter().zip(&elem.parts) {
        match (&slot.kind, part) {
            (RealizedKind::Matrix { n, multiplicity }, SummandElem::Matrix(m)) => {
                let block = Array2::from_shape_fn((*n, *n), |(i, j)| to_c64(m.get(i, j)));
                parts.push((slot.offset, PartMat::Repeat { block, times: *multiplicity }));
            }
            (RealizedKind::Diffuse { dim }, SummandElem::Haar(p)) => {
                let d = *dim;
                let mut diag = vec![Complex64::new(0.0, 0.0); d];
                for (k, c) in p.coeffs() {
                    let c = to_c64(c);
                    for (t, v) in diag.iter_mut().enumerate() {
                        let angle = 2.0 * std::f64::consts::PI * (t as f64) * (*k as f64)
                            / (d as f64);
                        *v += c * Complex64::from_polar(1.0, angle);
                    }
                }
                parts.push((slot.offset, PartMat::Diag(diag)));
            }
            _ => unreachable!("validated elements share the summand layout"),
        }
    }
    BlockDiag { ambient: layout.ambient, parts }
}

/// Empirical mean and standard error of a word's normalized trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTrace {
    pub mean: f64,
    pub stderr: f64,
}

fn mean_stderr(values: &[f64]) -> EmpiricalTrace {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0);
        (var / t).sqrt()
    } else {
        0.0
    };
    EmpiricalTrace { mean, stderr }
}

/// Monte Carlo word trace: per trial the right side is conjugated by a
/// fresh Haar rotation and the word product's normalized trace is taken;
/// returns mean and standard error over trials.
pub fn empirical_word_trace(
    a: &TracialAlgebra,
    b: &TracialAlgebra,
    word: &FreeWord,
    ambient: usize,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalTrace, OracleError> {
    Ok(empirical_word_traces(a, b, std::slice::from_ref(word), ambient, trials, seed)?[0])
}

/// Batch variant sharing the per-trial rotation and conjugated letters
/// across words. Consecutive words that extend each other letter-for-letter
/// (for instance increasing powers of the same word) also share their
/// partial products.
pub fn empirical_word_traces(
    a: &TracialAlgebra,
    b: &TracialAlgebra,
    words: &[FreeWord],
    ambient: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<EmpiricalTrace>, OracleError> {
    if trials == 0 {
        return Err(OracleError::InvalidInput("need at least one trial".into()));
    }
    let model = MatrixModel::new(a, b, ambient)?;
    let canon: Vec<Option<Vec<Letter>>> =
        words.iter().map(|w| w.canonical(a, b)).collect::<Result<_, _>>()?;
    let mut per_word: Vec<Vec<f64>> = vec![Vec::with_capacity(trials); words.len()];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let rotation = model.sample_rotation(&mut rng);
        let rot_dag = rotation.t().mapv(|z| z.conj());
        let mut conj_cache: HashMap<SideElement, Rc<Array2<Complex64>>> = HashMap::new();
        let mut left_cache: HashMap<SideElement, Rc<BlockDiag>> = HashMap::new();
        let mut prev: Option<(Vec<Letter>, WordState)> = None;
        for (w, letters) in canon.iter().enumerate() {
            let Some(letters) = letters else {
                per_word[w].push(0.0);
                continue;
            };
            let mut state = WordState::Empty;
            let mut start = 0usize;
            if let Some((prev_letters, prev_state)) = &prev {
                if letters.len() >= prev_letters.len()
                    && letters[..prev_letters.len()] == prev_letters[..]
                {
                    state = prev_state.clone();
                    start = prev_letters.len();
                }
            }
            for letter in &letters[start..] {
                match letter.side {
                    Side::Left => {
                        let bd = left_cache
                            .entry(letter.element.clone())
                            .or_insert_with(|| {
                                Rc::new(realize_element(&model.left, &letter.element))
                            })
                            .clone();
                        state = state.apply_block(bd);
                    }
                    Side::Right => {
                        let dense = conj_cache
                            .entry(letter.element.clone())
                            .or_insert_with(|| {
                                let bd = realize_element(&model.right, &letter.element);
                                Rc::new(bd.right_mul(&rotation).dot(&rot_dag))
                            })
                            .clone();
                        state = state.apply_dense(&dense);
                    }
                }
            }
            per_word[w].push(state.trace(model.ambient) / ambient as f64);
            prev = Some((letters.clone(), state));
        }
    }
    Ok(per_word.iter().map(|v| mean_stderr(v)).collect())
}

/// Running word product: a leading block-diagonal letter stays symbolic
/// until the first dense factor arrives, so words like p·q̃ never pay a
/// dense-by-dense multiply for the opening projection.
#[derive(Clone)]
enum WordState {
    Empty,
    Pending(Rc<BlockDiag>),
    Dense(Array2<Complex64>),
}

impl WordState {
    fn apply_block(self, bd: Rc<BlockDiag>) -> WordState {
        match self {
            WordState::Empty => WordState::Pending(bd),
            // canonical words alternate sides, so two block-diagonal letters
            // in a row cannot happen
            WordState::Pending(_) => unreachable!("canonical words alternate sides"),
            WordState::Dense(x) => WordState::Dense(bd.right_mul(&x)),
        }
    }

    fn apply_dense(self, d: &Array2<Complex64>) -> WordState {
        match self {
            WordState::Empty => WordState::Dense(d.clone()),
            WordState::Pending(bd) => WordState::Dense(bd.left_mul(d)),
            WordState::Dense(x) => WordState::Dense(x.dot(d)),
        }
    }

    fn trace(&self, ambient: usize) -> f64 {
        match self {
            WordState::Empty => ambient as f64,
            WordState::Pending(bd) => bd.trace().re,
            WordState::Dense(x) => x.diag().sum().re,
        }
    }
}

/// Eigenvalue sample of the rotated projection product, all N eigenvalues
/// per trial (the N − rank(p) trivial zeros outside the range of p
/// included), clipped to [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Atom and support estimates derived from a [`SpectralSample`].
///
/// `atom1_mass` is the fraction of eigenvalues above 1 − 10⁻⁶ (estimating
/// the p∧q atom), `atom0_mass` the fraction below 10⁻⁶ minus the trivial
/// 1 − α kernel outside p (estimating the p∧(1−q) atom), `support` the range
/// of the interior eigenvalues, `stderr` the standard error of the per-trial
/// atom-at-1 masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub atom1_mass: f64,
    pub atom0_mass: f64,
    pub support: (f64, f64),
    pub stderr: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct TwoProjectionRun {
    pub sample: SpectralSample,
    pub summary: SpectralSummary,
}

const ATOM_EPS: f64 = 1e-6;
const CLIP_EPS: f64 = 1e-9;

/// Spectrum of p·q̃·p at ambient dimension N for free projections of traces
/// α, β, with q̃ Haar-rotated: per trial the eigenvalues are the squared
/// singular values of the top-left r×s corner of a Haar isometry.
pub fn two_projection_spectrum(
    alpha: &Rational,
    beta: &Rational,
    ambient: usize,
    trials: usize,
    seed: u64,
) -> Result<TwoProjectionRun, OracleError> {
    use num_traits::{One, Zero};
    if !(alpha > &Rational::zero()
        && alpha < &Rational::one()
        && beta > &Rational::zero()
        && beta < &Rational::one())
    {
        return Err(OracleError::InvalidInput("traces must lie strictly in (0, 1)".into()));
    }
    if trials == 0 {
        return Err(OracleError::InvalidInput("need at least one trial".into()));
    }
    let left = realize(
        &TracialAlgebra::scalars(&[alpha.clone(), Rational::one() - alpha])
            .map_err(|e| OracleError::InvalidInput(e.to_string()))?,
        ambient,
    )?;
    let right = realize(
        &TracialAlgebra::scalars(&[beta.clone(), Rational::one() - beta])
            .map_err(|e| OracleError::InvalidInput(e.to_string()))?,
        ambient,
    )?;
    let rank_p = left.slots[0].kind.span();
    let rank_q = right.slots[0].kind.span();
    let achieved_alpha = rational_to_f64(&left.slots[0].achieved_weight);

    let mut eigenvalues = Vec::with_capacity(ambient * trials);
    let mut atom1_per_trial = Vec::with_capacity(trials);
    let mut atom0_raw_per_trial = Vec::with_capacity(trials);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let v = haar_isometry(ambient, rank_q, &mut rng);
        let w = v.slice(s![..rank_p, ..]).to_owned();
        let (_, sv, _) = w.svd(false, false).map_err(lin)?;
        let mut lambdas: Vec<f64> = sv.iter().map(|x| x * x).collect();
        lambdas.resize(ambient, 0.0);
        let mut atom1 = 0usize;
        let mut atom0 = 0usize;
        for l in &mut lambdas {
            debug_assert!(*l > -CLIP_EPS && *l < 1.0 + CLIP_EPS);
            *l = l.clamp(0.0, 1.0);
            if *l > 1.0 - ATOM_EPS {
                atom1 += 1;
            } else if *l < ATOM_EPS {
                atom0 += 1;
            } else {
                lo = lo.min(*l);
                hi = hi.max(*l);
            }
        }
        atom1_per_trial.push(atom1 as f64 / ambient as f64);
        atom0_raw_per_trial.push(atom0 as f64 / ambient as f64);
        eigenvalues.extend_from_slice(&lambdas);
    }
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let atom1 = mean_stderr(&atom1_per_trial);
    let atom0_raw = mean_stderr(&atom0_raw_per_trial);
    let support = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    Ok(TwoProjectionRun {
        sample: SpectralSample { eigenvalues, n: ambient, trials, seed },
        summary: SpectralSummary {
            atom1_mass: atom1.mean,
            atom0_mass: {
                // masses are multiples of 1/(N·trials); snap the float dust
                // from the trivial-kernel subtraction to zero
                let a0 = atom0_raw.mean - (1.0 - achieved_alpha);
                if a0.abs() < 1e-12 {
                    0.0
                } else {
                    a0
                }
            },
            support,
            stderr: atom1.stderr,
            n: ambient,
            trials,
            seed,
        },
    })
}

/// dim(ran P ∩ ran Q): the multiplicity of singular value 1 of P·Q, within
/// 1e−8.
pub fn intersection_rank(
    p: &Array2<Complex64>,
    q: &Array2<Complex64>,
) -> Result<usize, OracleError> {
    if p.nrows() != p.ncols() || q.nrows() != q.ncols() || p.nrows() != q.nrows() {
        return Err(OracleError::ShapeMismatch(format!(
            "projections must be square and share dimensions, got {:?} and {:?}",
            p.dim(),
            q.dim()
        )));
    }
    let prod = p.dot(q);
    let (_, sv, _) = prod.svd(false, false).map_err(lin)?;
    Ok(sv.iter().filter(|&&x| x > 1.0 - 1e-8).count())
}

/// Diagonal 0/1 projection of the given rank.
pub fn coordinate_projection(n: usize, rank: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j && i < rank {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Unit-modulus determinant check helper for tests and examples.
pub fn det_modulus(u: &Array2<Complex64>) -> Result<f64, OracleError> {
    Ok(u.det().map_err(lin)?.norm())
}

/// Writes the eigenvalue sample as a one-column CSV.
pub fn write_eigenvalue_csv<W: Write>(
    mut out: W,
    sample: &SpectralSample,
) -> std::io::Result<()> {
    writeln!(out, "eigenvalue")?;
    for v in &sample.eigenvalues {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{mk_algebra, Summand};
    use crate::exact::rat;
    use crate::moments::word_trace;

    fn unitarity_defect(u: &Array2<Complex64>) -> f64 {
        let udag = u.t().mapv(|z| z.conj());
        let prod = u.dot(&udag);
        let mut worst: f64 = 0.0;
        for i in 0..u.nrows() {
            for j in 0..u.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[[i, j]] - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn haar_unitary_is_unitary_with_unit_determinant_modulus() {
        let mut rng = trial_rng(42, 0);
        let u = haar_unitary(60, &mut rng);
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((det_modulus(&u).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn haar_first_moment_vanishes() {
        let n = 200;
        let trials = 200;
        let mut values = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = trial_rng(7, t as u64);
            let u = haar_unitary(n, &mut rng);
            values.push(u.diag().sum().re / n as f64);
        }
        let est = mean_stderr(&values);
        assert!(
            est.mean.abs() <= 3.0 * est.stderr + 1e-12,
            "mean {} stderr {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn realize_examples() {
        let a = TracialAlgebra::scalars(&[rat(1, 2), rat(1, 2)]).unwrap();
        let l = realize(&a, 10).unwrap();
        assert_eq!(l.slots[0].kind, RealizedKind::Matrix { n: 1, multiplicity: 5 });
        assert_eq!(l.slots[1].kind, RealizedKind::Matrix { n: 1, multiplicity: 5 });

        let m2 = TracialAlgebra::full_matrix(2);
        let l = realize(&m2, 10).unwrap();
        assert_eq!(l.slots[0].kind, RealizedKind::Matrix { n: 2, multiplicity: 5 });

        let a = TracialAlgebra::scalars(&[rat(9, 10), rat(1, 10)]).unwrap();
        let l = realize(&a, 20).unwrap();
        assert_eq!(l.achieved_weights(), vec![rat(9, 10), rat(1, 10)]);

        // rounding keeps each achieved weight within grain/N of the target
        let a = mk_algebra(vec![
            Summand::matrix(2, rat(1, 3)),
            Summand::scalar(rat(1, 3)),
            Summand::diffuse("A0", rat(1, 3)),
        ])
        .unwrap();
        let l = realize(&a, 100).unwrap();
        for (slot, s) in l.slots.iter().zip(a.summands()) {
            let grain = s.matrix_size().unwrap_or(1) as f64;
            let err = (rational_to_f64(&slot.achieved_weight) - rational_to_f64(&s.weight)).abs();
            assert!(err <= grain / 100.0 + 1e-12);
        }

        assert!(realize(&TracialAlgebra::full_matrix(2), 7).is_err());
        assert!(realize(&a, 2).is_err());
    }

    #[test]
    fn empirical_matches_exact_for_projection_words() {
        let a = TracialAlgebra::scalars(&[rat(1, 2), rat(1, 2)]).unwrap();
        let b = a.clone();
        let p = Letter::left(SideElement::projection(&a, 1).unwrap());
        let q = Letter::right(SideElement::projection(&b, 1).unwrap());
        let words: Vec<FreeWord> = (1..=3)
            .map(|k| {
                let mut letters = Vec::new();
                for _ in 0..k {
                    letters.push(p.clone());
                    letters.push(q.clone());
                }
                FreeWord::new(letters)
            })
            .collect();
        let estimates = empirical_word_traces(&a, &b, &words, 300, 16, 11).unwrap();
        for (k, est) in (1..=3).zip(&estimates) {
            let exact = word_trace(&words[k - 1], &a, &b).unwrap();
            let exact = rational_to_f64(&exact.re);
            let len = (2 * k) as f64;
            let tol = 3.0 * est.stderr + len * len / 300.0;
            assert!(
                (est.mean - exact).abs() <= tol,
                "k={k}: got {} want {exact} tol {tol}",
                est.mean
            );
        }
    }

    #[test]
    fn empirical_handles_haar_and_matrix_letters() {
        let a = mk_algebra(vec![
            Summand::diffuse("A0", rat(1, 2)),
            Summand::scalar(rat(1, 2)),
        ])
        .unwrap();
        let b = TracialAlgebra::full_matrix(2);
        // Haar letter: expect trace ≈ 0
        let u = FreeWord::new(vec![Letter::left(SideElement::haar_power(&a, 1, 1).unwrap())]);
        let est = empirical_word_trace(&a, &b, &u, 200, 8, 5).unwrap();
        assert!(est.mean.abs() < 1e-9, "equispaced spectrum sums to zero exactly");
        // mixed word u e11 u* e11
        let w = FreeWord::new(vec![
            Letter::left(SideElement::haar_power(&a, 1, 1).unwrap()),
            Letter::right(SideElement::matrix_unit(&b, 1, 1, 1).unwrap()),
            Letter::left(SideElement::haar_power(&a, 1, -1).unwrap()),
            Letter::right(SideElement::matrix_unit(&b, 1, 1, 1).unwrap()),
        ]);
        let est = empirical_word_trace(&a, &b, &w, 300, 16, 5).unwrap();
        let exact = rational_to_f64(&word_trace(&w, &a, &b).unwrap().re);
        assert!(
            (est.mean - exact).abs() <= 3.0 * est.stderr + 16.0 / 300.0,
            "got {} want {exact}",
            est.mean
        );
    }

    #[test]
    fn empirical_runs_are_reproducible() {
        let a = TracialAlgebra::scalars(&[rat(1, 3), rat(2, 3)]).unwrap();
        let b = TracialAlgebra::full_matrix(2);
        let w = FreeWord::new(vec![
            Letter::left(SideElement::projection(&a, 1).unwrap()),
            Letter::right(SideElement::matrix_unit(&b, 1, 1, 1).unwrap()),
        ]);
        let e1 = empirical_word_trace(&a, &b, &w, 120, 6, 99).unwrap();
        let e2 = empirical_word_trace(&a, &b, &w, 120, 6, 99).unwrap();
        assert_eq!(e1, e2, "identical seeds give bit-identical estimates");
        let run1 = two_projection_spectrum(&rat(7, 10), &rat(8, 10), 100, 4, 21).unwrap();
        let run2 = two_projection_spectrum(&rat(7, 10), &rat(8, 10), 100, 4, 21).unwrap();
        assert_eq!(run1.sample, run2.sample);
    }

    #[test]
    fn two_projection_spectrum_estimates_atoms() {
        // α + β − 1 = 1/2: intersection has dimension 500 of 1000 in
        // generic position; at N=200, 100 of 200
        let run = two_projection_spectrum(&rat(7, 10), &rat(8, 10), 200, 6, 3).unwrap();
        assert!((run.summary.atom1_mass - 0.5).abs() < 0.02, "{}", run.summary.atom1_mass);
        assert_eq!(run.sample.eigenvalues.len(), 200 * 6);
        // α = 3/4, β = 1/2: atom at 0 inside ran p has mass α − β = 1/4
        let run = two_projection_spectrum(&rat(3, 4), &rat(1, 2), 200, 6, 3).unwrap();
        assert!((run.summary.atom0_mass - 0.25).abs() < 0.02, "{}", run.summary.atom0_mass);
        // α = β = 1/2: no atoms, support fills (0, 1)
        let run = two_projection_spectrum(&rat(1, 2), &rat(1, 2), 400, 6, 3).unwrap();
        assert!(run.summary.atom1_mass < 0.01);
        assert!(run.summary.support.0 < 0.05 && run.summary.support.1 > 0.95);
    }

    #[test]
    fn intersection_rank_generic_position() {
        let n = 10;
        let p = coordinate_projection(n, 7);
        let qdiag = coordinate_projection(n, 8);
        for t in 0..20 {
            let mut rng = trial_rng(13, t);
            let u = haar_unitary(n, &mut rng);
            let udag = u.t().mapv(|z| z.conj());
            let q = u.dot(&qdiag).dot(&udag);
            assert_eq!(intersection_rank(&p, &q).unwrap(), 5, "7 + 8 − 10 = 5");
        }
        // disjoint ranks give zero
        let q2 = coordinate_projection(n, 2);
        for t in 0..20 {
            let mut rng = trial_rng(14, t);
            let u = haar_unitary(n, &mut rng);
            let udag = u.t().mapv(|z| z.conj());
            let q = u.dot(&q2).dot(&udag);
            assert_eq!(intersection_rank(&p, &q).unwrap(), 0);
        }
        // q = p returns rank p
        assert_eq!(intersection_rank(&p, &p).unwrap(), 7);
    }

    #[test]
    fn csv_output_shape() {
        let sample = SpectralSample { eigenvalues: vec![0.0, 0.5, 1.0], n: 3, trials: 1, seed: 0 };
        let mut buf = Vec::new();
        write_eigenvalue_csv(&mut buf, &sample).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("eigenvalue\n"));
    }
}
