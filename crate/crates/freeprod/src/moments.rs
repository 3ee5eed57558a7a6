//! Exact free-moment calculus on words.
//!
//! A [`FreeWord`] is a product of letters, each letter an exact element of
//! one of the two free factors: per matrix summand an exact matrix, per
//! diffuse summand a Laurent polynomial in that summand's Haar unitary. The
//! trace of a word in the reduced free product is determined by freeness:
//! alternating products of trace-zero letters have trace zero. The evaluator
//! turns that defining property into a computation — merge adjacent letters
//! from the same side, split the leftmost letter with nonzero trace into its
//! centered part plus a scalar, and recurse; fully centered alternating
//! words evaluate to zero, the empty word to one. All arithmetic is exact.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Side, SummandKind, TracialAlgebra};
use crate::exact::{format_rational, rat, ExactMatrix, HaarPoly, Rational, Scalar};
use num_traits::{One, Zero};

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("word syntax error: {0}")]
    Parse(String),
}

/// Element of one free factor: one component per summand of the algebra.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SummandElem {
    Matrix(ExactMatrix),
    Haar(HaarPoly),
}

impl SummandElem {
    fn is_zero(&self) -> bool {
        match self {
            SummandElem::Matrix(m) => m.is_zero(),
            SummandElem::Haar(p) => p.is_zero(),
        }
    }
}

/// A direct-sum element of one side, componentwise over the summands.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SideElement {
    pub parts: Vec<SummandElem>,
}

impl SideElement {
    pub fn validate(&self, alg: &TracialAlgebra) -> Result<(), MomentError> {
        if self.parts.len() != alg.len() {
            return Err(MomentError::ShapeMismatch(format!(
                "element has {} components, algebra has {} summands",
                self.parts.len(),
                alg.len()
            )));
        }
        for ((pos, s), part) in alg.iter1().zip(&self.parts) {
            match (&s.kind, part) {
                (SummandKind::Matrix { n }, SummandElem::Matrix(m)) if m.dim() == *n => {}
                (SummandKind::Diffuse { .. }, SummandElem::Haar(_)) => {}
                (SummandKind::Matrix { n }, SummandElem::Matrix(m)) => {
                    return Err(MomentError::ShapeMismatch(format!(
                        "summand {pos} is {n}x{n}, component is {d}x{d}",
                        d = m.dim()
                    )))
                }
                _ => {
                    return Err(MomentError::ShapeMismatch(format!(
                        "component kind at position {pos} does not match the summand"
                    )))
                }
            }
        }
        Ok(())
    }

    /// The unit of the side.
    pub fn unit(alg: &TracialAlgebra) -> Self {
        let parts = alg
            .summands()
            .iter()
            .map(|s| match s.kind {
                SummandKind::Matrix { n } => SummandElem::Matrix(ExactMatrix::identity(n)),
                SummandKind::Diffuse { .. } => SummandElem::Haar(HaarPoly::unit()),
            })
            .collect();
        SideElement { parts }
    }

    pub fn zero(alg: &TracialAlgebra) -> Self {
        let parts = alg
            .summands()
            .iter()
            .map(|s| match s.kind {
                SummandKind::Matrix { n } => SummandElem::Matrix(ExactMatrix::zero(n)),
                SummandKind::Diffuse { .. } => SummandElem::Haar(HaarPoly::zero()),
            })
            .collect();
        SideElement { parts }
    }

    /// Indicator projection of the summand at `pos` (1-based).
    pub fn projection(alg: &TracialAlgebra, pos: usize) -> Result<Self, MomentError> {
        let s = alg
            .summand(pos)
            .ok_or_else(|| MomentError::ShapeMismatch(format!("no summand at position {pos}")))?;
        let mut e = Self::zero(alg);
        e.parts[pos - 1] = match s.kind {
            SummandKind::Matrix { n } => SummandElem::Matrix(ExactMatrix::identity(n)),
            SummandKind::Diffuse { .. } => SummandElem::Haar(HaarPoly::unit()),
        };
        Ok(e)
    }

    /// Σ c_s p_s over the summand projections.
    pub fn projection_combination(
        alg: &TracialAlgebra,
        coeffs: &[Scalar],
    ) -> Result<Self, MomentError> {
        if coeffs.len() != alg.len() {
            return Err(MomentError::ShapeMismatch(
                "coefficient count must equal summand count".into(),
            ));
        }
        let parts = alg
            .summands()
            .iter()
            .zip(coeffs)
            .map(|(s, c)| match s.kind {
                SummandKind::Matrix { n } => {
                    SummandElem::Matrix(ExactMatrix::identity(n).scale(c))
                }
                SummandKind::Diffuse { .. } => SummandElem::Haar(HaarPoly::unit().scale(c)),
            })
            .collect();
        Ok(SideElement { parts })
    }

    /// A concrete matrix in the summand at `pos`, zero elsewhere.
    pub fn from_matrix(
        alg: &TracialAlgebra,
        pos: usize,
        m: ExactMatrix,
    ) -> Result<Self, MomentError> {
        match alg.summand(pos).map(|s| &s.kind) {
            Some(SummandKind::Matrix { n }) if *n == m.dim() => {
                let mut e = Self::zero(alg);
                e.parts[pos - 1] = SummandElem::Matrix(m);
                Ok(e)
            }
            Some(SummandKind::Matrix { n }) => Err(MomentError::ShapeMismatch(format!(
                "summand {pos} is {n}x{n}, matrix is {d}x{d}",
                d = m.dim()
            ))),
            _ => Err(MomentError::ShapeMismatch(format!(
                "position {pos} is not a matrix summand"
            ))),
        }
    }

    /// Matrix unit e_ij (1-based) of the matrix summand at `pos`.
    pub fn matrix_unit(
        alg: &TracialAlgebra,
        pos: usize,
        i: usize,
        j: usize,
    ) -> Result<Self, MomentError> {
        match alg.summand(pos).map(|s| &s.kind) {
            Some(SummandKind::Matrix { n }) if i >= 1 && j >= 1 && i <= *n && j <= *n => {
                Self::from_matrix(alg, pos, ExactMatrix::unit(*n, i - 1, j - 1))
            }
            Some(SummandKind::Matrix { n }) => Err(MomentError::ShapeMismatch(format!(
                "matrix unit ({i},{j}) out of range for size {n}"
            ))),
            _ => Err(MomentError::ShapeMismatch(format!(
                "position {pos} is not a matrix summand"
            ))),
        }
    }

    /// u^k in the diffuse summand at `pos`, zero elsewhere. As an element of
    /// the whole side this is supported on the summand, so its side trace
    /// for k = 0 is the summand weight.
    pub fn haar_power(alg: &TracialAlgebra, pos: usize, k: i64) -> Result<Self, MomentError> {
        match alg.summand(pos).map(|s| &s.kind) {
            Some(SummandKind::Diffuse { .. }) => {
                let mut e = Self::zero(alg);
                e.parts[pos - 1] = SummandElem::Haar(HaarPoly::power(k));
                Ok(e)
            }
            _ => Err(MomentError::ShapeMismatch(format!(
                "position {pos} is not a diffuse summand"
            ))),
        }
    }

    /// k-th power of the cyclic shift on the matrix summand at `pos`,
    /// identity on the other summands — a unitary of the whole side.
    pub fn shift_unitary(alg: &TracialAlgebra, pos: usize, k: i64) -> Result<Self, MomentError> {
        match alg.summand(pos).map(|s| &s.kind) {
            Some(SummandKind::Matrix { n }) => {
                let mut e = Self::unit(alg);
                e.parts[pos - 1] = SummandElem::Matrix(ExactMatrix::cyclic_shift_pow(*n, k));
                Ok(e)
            }
            _ => Err(MomentError::ShapeMismatch(format!(
                "position {pos} is not a matrix summand"
            ))),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let parts = self
            .parts
            .iter()
            .zip(&rhs.parts)
            .map(|(a, b)| match (a, b) {
                (SummandElem::Matrix(x), SummandElem::Matrix(y)) => SummandElem::Matrix(x.mul(y)),
                (SummandElem::Haar(x), SummandElem::Haar(y)) => SummandElem::Haar(x.mul(y)),
                _ => unreachable!("validated elements share the summand layout"),
            })
            .collect();
        SideElement { parts }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let parts = self
            .parts
            .iter()
            .zip(&rhs.parts)
            .map(|(a, b)| match (a, b) {
                (SummandElem::Matrix(x), SummandElem::Matrix(y)) => SummandElem::Matrix(x.add(y)),
                (SummandElem::Haar(x), SummandElem::Haar(y)) => SummandElem::Haar(x.add(y)),
                _ => unreachable!("validated elements share the summand layout"),
            })
            .collect();
        SideElement { parts }
    }

    pub fn adjoint(&self) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                SummandElem::Matrix(x) => SummandElem::Matrix(x.adjoint()),
                SummandElem::Haar(x) => SummandElem::Haar(x.adjoint()),
            })
            .collect();
        SideElement { parts }
    }

    /// self − c·1 (the side unit).
    pub fn sub_scalar(&self, c: &Scalar) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                SummandElem::Matrix(x) => SummandElem::Matrix(x.sub_scalar(c)),
                SummandElem::Haar(x) => SummandElem::Haar(x.sub_scalar(c)),
            })
            .collect();
        SideElement { parts }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(SummandElem::is_zero)
    }

    /// The side trace: Σ weight_s · (normalized trace of the component).
    pub fn trace(&self, alg: &TracialAlgebra) -> Scalar {
        let mut t = Scalar::zero();
        for (s, part) in alg.summands().iter().zip(&self.parts) {
            let local = match part {
                SummandElem::Matrix(m) => m.normalized_trace(),
                SummandElem::Haar(p) => p.trace(),
            };
            t = t + Scalar::new(local.re * &s.weight, local.im * &s.weight);
        }
        t
    }
}

/// A word letter: an exact element of the left or the right factor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub side: Side,
    pub element: SideElement,
}

impl Letter {
    pub fn left(element: SideElement) -> Self {
        Letter { side: Side::Left, element }
    }

    pub fn right(element: SideElement) -> Self {
        Letter { side: Side::Right, element }
    }

    pub fn adjoint(&self) -> Self {
        Letter { side: self.side, element: self.element.adjoint() }
    }
}

/// A product of letters. No alternation is required at construction;
/// adjacent same-side letters are multiplied out before evaluation.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FreeWord {
    pub letters: Vec<Letter>,
}

impl FreeWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        FreeWord { letters }
    }

    pub fn empty() -> Self {
        FreeWord::default()
    }

    pub fn push(&mut self, l: Letter) {
        self.letters.push(l);
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        FreeWord { letters }
    }

    /// w* — reversed order, each letter adjointed.
    pub fn adjoint(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(Letter::adjoint).collect() }
    }

    /// Merges adjacent same-side letters. `None` means some letter (or a
    /// merged product) is zero, so the word itself is zero.
    pub fn canonical(
        &self,
        left: &TracialAlgebra,
        right: &TracialAlgebra,
    ) -> Result<Option<Vec<Letter>>, MomentError> {
        for l in &self.letters {
            let alg = if l.side == Side::Left { left } else { right };
            l.element.validate(alg)?;
        }
        Ok(merge_letters(self.letters.clone()))
    }
}

fn merge_letters(letters: Vec<Letter>) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for l in letters {
        if let Some(last) = out.last_mut() {
            if last.side == l.side {
                last.element = last.element.mul(&l.element);
                if last.element.is_zero() {
                    return None;
                }
                continue;
            }
        }
        if l.element.is_zero() {
            return None;
        }
        out.push(l);
    }
    Some(out)
}

/// A letter split as scalar·1 + centered part, the centered part having
/// side trace exactly zero.
#[derive(Clone, Debug)]
pub struct CenteredForm {
    pub scalar: Scalar,
    pub centered: Letter,
}

/// Splits a letter into its trace and its centered part.
pub fn center(letter: &Letter, alg: &TracialAlgebra) -> Result<CenteredForm, MomentError> {
    letter.element.validate(alg)?;
    let scalar = letter.element.trace(alg);
    let centered = Letter { side: letter.side, element: letter.element.sub_scalar(&scalar) };
    Ok(CenteredForm { scalar, centered })
}

/// Memoizing evaluator for the free-product trace. Reuse one instance to
/// share work across related words; the memo table is per instance, so
/// concurrent evaluations with separate instances are independent.
pub struct TraceEvaluator<'a> {
    left: &'a TracialAlgebra,
    right: &'a TracialAlgebra,
    memo: HashMap<Vec<Letter>, Scalar>,
}

impl<'a> TraceEvaluator<'a> {
    pub fn new(left: &'a TracialAlgebra, right: &'a TracialAlgebra) -> Self {
        TraceEvaluator { left, right, memo: HashMap::new() }
    }

    pub fn evaluate(&mut self, word: &FreeWord) -> Result<Scalar, MomentError> {
        match word.canonical(self.left, self.right)? {
            None => Ok(Scalar::zero()),
            Some(letters) => Ok(self.eval_canonical(&letters)),
        }
    }

    fn side_trace(&self, l: &Letter) -> Scalar {
        let alg = if l.side == Side::Left { self.left } else { self.right };
        l.element.trace(alg)
    }

    fn eval_canonical(&mut self, word: &[Letter]) -> Scalar {
        if word.is_empty() {
            return Scalar::one();
        }
        if word.len() == 1 {
            return self.side_trace(&word[0]);
        }
        if let Some(v) = self.memo.get(word) {
            return v.clone();
        }
        let pos = word.iter().position(|l| !self.side_trace(l).is_zero());
        let value = match pos {
            // alternating word of centered letters: zero by freeness
            None => Scalar::zero(),
            Some(idx) => {
                let c = self.side_trace(&word[idx]);
                let centered = word[idx].element.sub_scalar(&c);
                let mut value = Scalar::zero();
                if !centered.is_zero() {
                    let mut with_centered = word.to_vec();
                    with_centered[idx].element = centered;
                    value = value + self.eval_canonical(&with_centered);
                }
                // scalar part: drop position idx and re-merge the seam
                let rest = match remove_and_merge(word, idx) {
                    None => Scalar::zero(),
                    Some(w) => self.eval_canonical(&w),
                };
                value + c * rest
            }
        };
        self.memo.insert(word.to_vec(), value.clone());
        value
    }
}

fn remove_and_merge(word: &[Letter], idx: usize) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len().saturating_sub(1));
    out.extend_from_slice(&word[..idx]);
    if idx > 0 && idx + 1 < word.len() && word[idx - 1].side == word[idx + 1].side {
        let merged = word[idx - 1].element.mul(&word[idx + 1].element);
        if merged.is_zero() {
            return None;
        }
        out.last_mut().unwrap().element = merged;
        out.extend_from_slice(&word[idx + 2..]);
    } else {
        out.extend_from_slice(&word[idx + 1..]);
    }
    Some(out)
}

/// The free-product trace of a word: exact, via the centering recursion.
pub fn word_trace(
    word: &FreeWord,
    left: &TracialAlgebra,
    right: &TracialAlgebra,
) -> Result<Scalar, MomentError> {
    TraceEvaluator::new(left, right).evaluate(word)
}

/// True iff the moment list is that of a Haar unitary: moment 0 is 1 and
/// every other moment up to `k_max` in modulus is present and zero.
pub fn haar_check(moments: &BTreeMap<i64, Scalar>, k_max: i64) -> bool {
    match moments.get(&0) {
        Some(m0) if m0.is_one() => {}
        _ => return false,
    }
    for k in 1..=k_max {
        for key in [k, -k] {
            match moments.get(&key) {
                Some(m) if m.is_zero() => {}
                _ => return false,
            }
        }
    }
    true
}

/// Outcome of a randomized exact-freeness verification.
#[derive(Debug, Serialize)]
pub struct FreenessReport {
    pub words_checked: usize,
    pub trace_evaluations: usize,
    pub failures: Vec<String>,
}

impl FreenessReport {
    pub fn all_zero(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.random_range(-3..=3), rng.random_range(1..=3))
}

fn random_scalar<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::new(random_rational(rng), Rational::zero())
}

/// Random trace-zero combination Σ c_s p_s of the scalar-side projections.
fn random_centered_scalar_combo<R: Rng>(rng: &mut R, alg: &TracialAlgebra) -> SideElement {
    for _ in 0..32 {
        let coeffs: Vec<Scalar> = (0..alg.len()).map(|_| random_scalar(rng)).collect();
        let e = SideElement::projection_combination(alg, &coeffs).unwrap();
        let c = e.trace(alg);
        let centered = e.sub_scalar(&c);
        if !centered.is_zero() {
            return centered;
        }
    }
    // fallback: p1 − α1 is centered and nonzero whenever m ≥ 2
    let p1 = SideElement::projection(alg, 1).unwrap();
    let c = p1.trace(alg);
    p1.sub_scalar(&c)
}

/// Random trace-zero diagonal matrix in 𝕄_n.
fn random_centered_diagonal<R: Rng>(rng: &mut R, n: usize) -> ExactMatrix {
    for _ in 0..32 {
        let entries: Vec<Scalar> = (0..n).map(|_| random_scalar(rng)).collect();
        let m = ExactMatrix::diag(entries);
        let centered = m.sub_scalar(&m.normalized_trace());
        if !centered.is_zero() {
            return centered;
        }
    }
    ExactMatrix::unit(n, 0, 0).sub_scalar(&crate::exact::scalar_rat(1, n as i64))
}

/// Random trace-zero element of the subalgebra spanned by the diagonal and
/// the shift powers u^{l·j}: Σ_j D_j·u^{lj}, centered by its trace.
fn random_centered_shift_combo<R: Rng>(rng: &mut R, n: usize, l: usize) -> ExactMatrix {
    for _ in 0..32 {
        let mut x = ExactMatrix::zero(n);
        for j in 0..n / l {
            if j > 0 && !rng.random_bool(0.5) {
                continue;
            }
            let diag = ExactMatrix::diag((0..n).map(|_| random_scalar(rng)).collect());
            x = x.add(&diag.mul(&ExactMatrix::cyclic_shift_pow(n, (l * j) as i64)));
        }
        let centered = x.sub_scalar(&x.normalized_trace());
        if !centered.is_zero() {
            return centered;
        }
    }
    ExactMatrix::cyclic_shift_pow(n, l as i64)
}

struct ConjugatedModel {
    scalars: TracialAlgebra,
    matrix: TracialAlgebra,
}

impl ConjugatedModel {
    fn new(weights: &[Rational], n: usize) -> Result<Self, MomentError> {
        let scalars = TracialAlgebra::scalars(weights)
            .map_err(|e| MomentError::HypothesisViolated(e.to_string()))?;
        Ok(ConjugatedModel { scalars, matrix: TracialAlgebra::full_matrix(n) })
    }

    fn shift(&self, k: i64) -> Letter {
        Letter::right(SideElement::shift_unitary(&self.matrix, 1, k).unwrap())
    }

    /// u^k · x · u^{−k} for a scalar-side element x.
    fn conjugated(&self, k: usize, x: SideElement) -> Vec<Letter> {
        if k == 0 {
            vec![Letter::left(x)]
        } else {
            vec![self.shift(k as i64), Letter::left(x), self.shift(-(k as i64))]
        }
    }

    fn projection(&self, s: usize) -> SideElement {
        SideElement::projection(&self.scalars, s).unwrap()
    }

    fn matrix_letter(&self, m: ExactMatrix) -> Letter {
        Letter::right(SideElement::from_matrix(&self.matrix, 1, m).unwrap())
    }
}

/// Randomized exact check that alternating words in the conjugated scalar
/// subalgebras and the diagonal (or diagonal-plus-shift-powers) subalgebra
/// of (ℂ^m, weights) * (𝕄_n, tr_n) have trace zero against every trailing
/// shift power in range.
///
/// With `l = None` the conjugation exponents run over 0..n, the matrix
/// letters are trace-zero diagonals and the trailing powers are u^r with
/// 0 ≤ r < n. With `l = Some(l)`, l a proper divisor of n, exponents run
/// over 0..l, matrix letters come from the diagonal-plus-{u^{lj}}
/// subalgebra and trailing powers run over 0 ≤ r < l.
///
/// Sampling is uniform over the generator set with uniform word length in
/// 1..=max_len; the sampling distribution is an implementation choice, not
/// part of the verified statement.
pub fn verify_lemma31(
    m: usize,
    n: usize,
    weights: &[Rational],
    l: Option<usize>,
    samples: usize,
    max_len: usize,
    seed: u64,
) -> Result<FreenessReport, MomentError> {
    if n < 2 {
        return Err(MomentError::HypothesisViolated("need n ≥ 2".into()));
    }
    if weights.len() != m {
        return Err(MomentError::HypothesisViolated(format!(
            "expected {m} weights, got {}",
            weights.len()
        )));
    }
    if max_len == 0 || max_len > 16 {
        return Err(MomentError::HypothesisViolated(
            "word length cap must be in 1..=16".into(),
        ));
    }
    if let Some(l) = l {
        if !(1 < l && l < n && n % l == 0) {
            return Err(MomentError::HypothesisViolated(
                "l must be a proper divisor of n with 1 < l < n".into(),
            ));
        }
    }
    let model = ConjugatedModel::new(weights, n)?;
    let conj_range = l.unwrap_or(n); // conjugation exponents 0..conj_range
    let r_range = l.unwrap_or(n); // trailing powers 0..r_range
    let family = conj_range + 1; // the extra id is the matrix-side subalgebra
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut evaluator = TraceEvaluator::new(&model.scalars, &model.matrix);
    let mut report =
        FreenessReport { words_checked: 0, trace_evaluations: 0, failures: Vec::new() };

    for sample in 0..samples {
        let len = rng.random_range(1..=max_len);
        let mut ids = Vec::with_capacity(len);
        let mut prev = usize::MAX;
        for _ in 0..len {
            let mut id = rng.random_range(0..family);
            while id == prev {
                id = rng.random_range(0..family);
            }
            ids.push(id);
            prev = id;
        }
        let mut word = FreeWord::empty();
        for &id in &ids {
            if id == conj_range {
                let x = match l {
                    None => random_centered_diagonal(&mut rng, n),
                    Some(l) => random_centered_shift_combo(&mut rng, n, l),
                };
                word.push(model.matrix_letter(x));
            } else {
                let x = random_centered_scalar_combo(&mut rng, &model.scalars);
                for letter in model.conjugated(id, x) {
                    word.push(letter);
                }
            }
        }
        report.words_checked += 1;
        for r in 0..r_range {
            let mut w = word.clone();
            if r > 0 {
                w.push(model.shift(r as i64));
            }
            let t = evaluator.evaluate(&w)?;
            report.trace_evaluations += 1;
            if !t.is_zero() {
                report.failures.push(format!(
                    "sample {sample}: τ(ω·u^{r}) = {} + {}i ≠ 0",
                    format_rational(&t.re),
                    format_rational(&t.im)
                ));
            }
        }
    }
    Ok(report)
}

/// Randomized exact check that τ(b·u^k) = 0 for products b of conjugated
/// projections and diagonal matrix units, 0 < k < n; also checks the
/// associated inner products τ(u^{k₂}·b₂·b₁*·u^{−k₁}) for k₁ ≠ k₂, which is
/// the Hilbert-space orthogonality of the translates u^k·(closure of b's).
pub fn verify_corollary32(
    n: usize,
    weights: &[Rational],
    spanning_words: usize,
    seed: u64,
) -> Result<FreenessReport, MomentError> {
    if n < 2 {
        return Err(MomentError::HypothesisViolated("need n ≥ 2".into()));
    }
    let model = ConjugatedModel::new(weights, n)?;
    let m = weights.len();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut evaluator = TraceEvaluator::new(&model.scalars, &model.matrix);
    let mut report =
        FreenessReport { words_checked: 0, trace_evaluations: 0, failures: Vec::new() };

    let random_b = |rng: &mut ChaCha20Rng| -> FreeWord {
        let gens = rng.random_range(1..=6);
        let mut b = FreeWord::empty();
        for _ in 0..gens {
            if rng.random_bool(0.5) {
                let k = rng.random_range(0..n);
                let s = rng.random_range(1..=m);
                for letter in model.conjugated(k, model.projection(s)) {
                    b.push(letter);
                }
            } else {
                let i = rng.random_range(1..=n);
                b.push(model.matrix_letter(ExactMatrix::unit(n, i - 1, i - 1)));
            }
        }
        b
    };

    for sample in 0..spanning_words {
        let b = random_b(&mut rng);
        report.words_checked += 1;
        for k in 1..n {
            let mut w = b.clone();
            w.push(model.shift(k as i64));
            let t = evaluator.evaluate(&w)?;
            report.trace_evaluations += 1;
            if !t.is_zero() {
                report.failures.push(format!(
                    "sample {sample}: τ(b·u^{k}) = {} + {}i ≠ 0",
                    format_rational(&t.re),
                    format_rational(&t.im)
                ));
            }
        }
        // orthogonality of translates: ⟨u^{k1}·b1, u^{k2}·b2⟩ = τ(u^{k2}·b2·b1*·u^{−k1})
        if sample % 5 == 0 {
            let b2 = random_b(&mut rng);
            let k1 = rng.random_range(0..n);
            let mut k2 = rng.random_range(0..n);
            while k2 == k1 {
                k2 = rng.random_range(0..n);
            }
            let mut w = FreeWord::new(vec![model.shift(k2 as i64)]);
            w = w.concat(&b2).concat(&b.adjoint());
            w.push(model.shift(-(k1 as i64)));
            let t = evaluator.evaluate(&w)?;
            report.trace_evaluations += 1;
            if !t.is_zero() {
                report
                    .failures
                    .push(format!("sample {sample}: ⟨u^{k1}·b₁, u^{k2}·b₂⟩ ≠ 0"));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// word syntax
// ---------------------------------------------------------------------------

/// Parses the command-line word syntax into a [`FreeWord`].
///
/// Whitespace-separated tokens, each `L:expr`, `R:expr` or `center(S:expr)`;
/// an expr is a `*`-separated product of factors `p<i>`, `e<i><j>`, `u`,
/// `id`, each optionally raised to an integer power (`u^-2`). `p<i>` is the
/// i-th summand projection of the tagged side, `e<i><j>` a matrix unit of
/// the tagged side's unique matrix summand of size ≥ 2, and `u` the tagged
/// side's Haar unitary (diffuse summand) or shift unitary (matrix summand),
/// falling back to the other side so conjugated tokens like
/// `L:u^2*p1*u^-2` read naturally. `center(...)` subtracts the trace.
pub fn parse_word(
    input: &str,
    left: &TracialAlgebra,
    right: &TracialAlgebra,
) -> Result<FreeWord, MomentError> {
    let mut letters = Vec::new();
    for token in input.split_whitespace() {
        let (is_centered, body) = match token.strip_prefix("center(") {
            Some(rest) => (
                true,
                rest.strip_suffix(')').ok_or_else(|| {
                    MomentError::Parse(format!("unterminated center(...) in '{token}'"))
                })?,
            ),
            None => (false, token),
        };
        let (tag, expr) = if let Some(e) = body.strip_prefix("L:") {
            (Side::Left, e)
        } else if let Some(e) = body.strip_prefix("R:") {
            (Side::Right, e)
        } else {
            return Err(MomentError::Parse(format!(
                "letter '{body}' must start with 'L:' or 'R:'"
            )));
        };
        let mut token_letters = Vec::new();
        for factor in expr.split('*') {
            token_letters.push(resolve_factor(tag, factor, left, right)?);
        }
        if is_centered {
            token_letters = center_token(token_letters, left, right)?;
        }
        letters.extend(token_letters);
    }
    Ok(FreeWord::new(letters))
}

fn resolve_factor(
    tag: Side,
    factor: &str,
    left: &TracialAlgebra,
    right: &TracialAlgebra,
) -> Result<Letter, MomentError> {
    let (name, exp) = match factor.split_once('^') {
        Some((n, e)) => (
            n,
            e.parse::<i64>()
                .map_err(|_| MomentError::Parse(format!("bad exponent in '{factor}'")))?,
        ),
        None => (factor, 1),
    };
    let tagged = if tag == Side::Left { left } else { right };
    let positive_pow = |alg: &TracialAlgebra,
                        e: SideElement,
                        exp: i64|
     -> Result<SideElement, MomentError> {
        if exp < 0 {
            return Err(MomentError::Parse(format!(
                "'{name}' cannot be raised to a negative power"
            )));
        }
        let mut acc = SideElement::unit(alg);
        for _ in 0..exp {
            acc = acc.mul(&e);
        }
        Ok(acc)
    };
    if name == "id" || name == "1" {
        return Ok(Letter { side: tag, element: SideElement::unit(tagged) });
    }
    if let Some(idx) = name.strip_prefix('p').and_then(|s| s.parse::<usize>().ok()) {
        let p = SideElement::projection(tagged, idx)
            .map_err(|e| MomentError::Parse(format!("{factor}: {e}")))?;
        return Ok(Letter { side: tag, element: positive_pow(tagged, p, exp)? });
    }
    if let Some(rest) = name.strip_prefix('e') {
        let digits: Vec<u32> = rest.chars().filter_map(|c| c.to_digit(10)).collect();
        if digits.len() != rest.len() || digits.len() != 2 {
            return Err(MomentError::Parse(format!(
                "matrix unit '{name}' must be e<i><j> with single digits"
            )));
        }
        let pos = unique_matrix_position(tagged).ok_or_else(|| {
            MomentError::Parse(format!(
                "'{name}': the {tag} side needs exactly one matrix summand of size ≥ 2"
            ))
        })?;
        let e = SideElement::matrix_unit(tagged, pos, digits[0] as usize, digits[1] as usize)
            .map_err(|e| MomentError::Parse(format!("{factor}: {e}")))?;
        return Ok(Letter { side: tag, element: positive_pow(tagged, e, exp)? });
    }
    if name == "u" {
        for side in [tag, tag.flip()] {
            let alg = if side == Side::Left { left } else { right };
            if let Some((pos, _)) = alg.iter1().find(|(_, s)| s.is_diffuse()) {
                return Ok(Letter {
                    side,
                    element: SideElement::haar_power(alg, pos, exp).unwrap(),
                });
            }
            if let Some(pos) = unique_matrix_position(alg) {
                return Ok(Letter {
                    side,
                    element: SideElement::shift_unitary(alg, pos, exp).unwrap(),
                });
            }
        }
        return Err(MomentError::Parse(
            "'u' needs a diffuse summand or a matrix summand of size ≥ 2 on either side".into(),
        ));
    }
    Err(MomentError::Parse(format!("unknown factor '{factor}'")))
}

fn unique_matrix_position(alg: &TracialAlgebra) -> Option<usize> {
    match alg.matrix_positions(2).as_slice() {
        [pos] => Some(*pos),
        _ => None,
    }
}

fn center_token(
    letters: Vec<Letter>,
    left: &TracialAlgebra,
    right: &TracialAlgebra,
) -> Result<Vec<Letter>, MomentError> {
    let alg_of = |side: Side| if side == Side::Left { left } else { right };
    let fold_same_side = |ls: &[Letter]| -> Option<Letter> {
        let side = ls.first()?.side;
        if ls.iter().any(|l| l.side != side) {
            return None;
        }
        let mut e = ls[0].element.clone();
        for l in &ls[1..] {
            e = e.mul(&l.element);
        }
        Some(Letter { side, element: e })
    };
    if let Some(folded) = fold_same_side(&letters) {
        let c = center(&folded, alg_of(folded.side))?;
        return Ok(vec![c.centered]);
    }
    // conjugated form g · x · g⁻¹ with g·g⁻¹ = 1: centering the core centers
    // the whole token
    if letters.len() >= 3 {
        let first = &letters[0];
        let last = letters.last().unwrap();
        if first.side == last.side
            && first.element.mul(&last.element) == SideElement::unit(alg_of(first.side))
        {
            if let Some(core) = fold_same_side(&letters[1..letters.len() - 1]) {
                let c = center(&core, alg_of(core.side))?;
                return Ok(vec![first.clone(), c.centered, last.clone()]);
            }
        }
    }
    Err(MomentError::Parse(
        "center(...) needs a single-side token or a unitary-conjugated token g*x*g^-1".into(),
    ))
}
