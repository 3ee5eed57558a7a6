//! Data model for finite-dimensional tracial C*-algebras.
//!
//! A [`TracialAlgebra`] is a weighted direct sum of matrix summands 𝕄_n and
//! optional diffuse summands. The diffuse flag asserts that the summand
//! contains a unital, diffuse abelian C*-subalgebra; it is an input assertion
//! the structure engines trust. Weights are exact rationals summing to 1, and
//! the trace is the weight combination of the normalized summand traces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, parse_rational, rat_int, ExactMatrix, Rational, Scalar};
use num_traits::{One, Zero};

/// Which free factor a projection, witness or word letter belongs to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("algebra must have at least one summand")]
    EmptyAlgebra,
    #[error("summand {index} has non-positive weight {weight}; zero-weight summands are rejected, not dropped")]
    ZeroWeight { index: usize, weight: String },
    #[error("summand weights sum to {total}, expected exactly 1")]
    WeightSum { total: String },
    #[error("matrix summand {index} has size 0")]
    ZeroSize { index: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{0}")]
    Parse(String),
}

/// One direct summand: a matrix algebra 𝕄_n, or a diffuse summand.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SummandKind {
    Matrix { n: usize },
    Diffuse { label: String },
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Summand {
    #[serde(flatten)]
    pub kind: SummandKind,
    #[serde(with = "rational_str")]
    pub weight: Rational,
}

impl Summand {
    pub fn matrix(n: usize, weight: Rational) -> Self {
        Summand { kind: SummandKind::Matrix { n }, weight }
    }

    pub fn scalar(weight: Rational) -> Self {
        Summand::matrix(1, weight)
    }

    pub fn diffuse(label: &str, weight: Rational) -> Self {
        Summand { kind: SummandKind::Diffuse { label: label.to_string() }, weight }
    }

    pub fn matrix_size(&self) -> Option<usize> {
        match self.kind {
            SummandKind::Matrix { n } => Some(n),
            SummandKind::Diffuse { .. } => None,
        }
    }

    pub fn is_diffuse(&self) -> bool {
        matches!(self.kind, SummandKind::Diffuse { .. })
    }
}

/// Weighted direct sum with validated weights. Summand indices throughout the
/// crate are 1-based positions in the input order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct TracialAlgebra {
    summands: Vec<Summand>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraRepr {
    summands: Vec<Summand>,
}

impl TryFrom<AlgebraRepr> for TracialAlgebra {
    type Error = AlgebraError;
    fn try_from(raw: AlgebraRepr) -> Result<Self, Self::Error> {
        TracialAlgebra::new(raw.summands)
    }
}

impl From<TracialAlgebra> for AlgebraRepr {
    fn from(a: TracialAlgebra) -> Self {
        AlgebraRepr { summands: a.summands }
    }
}

impl TracialAlgebra {
    /// Validates and builds; several diffuse summands are merged into the
    /// first one (the engines only consume one diffuse weight per side).
    pub fn new(summands: Vec<Summand>) -> Result<Self, AlgebraError> {
        Self::new_with_warnings(summands).map(|(a, _)| a)
    }

    /// Like [`TracialAlgebra::new`], also reporting validation warnings
    /// (currently only the diffuse-merge remap).
    pub fn new_with_warnings(
        summands: Vec<Summand>,
    ) -> Result<(Self, Vec<String>), AlgebraError> {
        if summands.is_empty() {
            return Err(AlgebraError::EmptyAlgebra);
        }
        let mut warnings = Vec::new();
        for (idx, s) in summands.iter().enumerate() {
            if s.weight <= Rational::zero() {
                return Err(AlgebraError::ZeroWeight {
                    index: idx + 1,
                    weight: format_rational(&s.weight),
                });
            }
            if s.matrix_size() == Some(0) {
                return Err(AlgebraError::ZeroSize { index: idx + 1 });
            }
        }
        let total: Rational = summands.iter().map(|s| s.weight.clone()).sum();
        if !total.is_one() {
            return Err(AlgebraError::WeightSum { total: format_rational(&total) });
        }
        // merge extra diffuse summands into the first one
        let mut merged: Vec<Summand> = Vec::with_capacity(summands.len());
        let mut first_diffuse: Option<usize> = None;
        for (idx, s) in summands.into_iter().enumerate() {
            if s.is_diffuse() {
                if let Some(d) = first_diffuse {
                    merged[d].weight = merged[d].weight.clone() + s.weight;
                    warnings.push(format!(
                        "diffuse summand at position {} merged into position {}; later indices shift down",
                        idx + 1,
                        d + 1
                    ));
                    continue;
                }
                first_diffuse = Some(merged.len());
            }
            merged.push(s);
        }
        Ok((TracialAlgebra { summands: merged }, warnings))
    }

    /// ℂ^{w₁} ⊕ ... ⊕ ℂ^{w_m}.
    pub fn scalars(weights: &[Rational]) -> Result<Self, AlgebraError> {
        Self::new(weights.iter().cloned().map(Summand::scalar).collect())
    }

    /// (𝕄_n, tr_n) with full weight.
    pub fn full_matrix(n: usize) -> Self {
        TracialAlgebra { summands: vec![Summand::matrix(n, Rational::one())] }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// (1-based position, summand) pairs.
    pub fn iter1(&self) -> impl Iterator<Item = (usize, &Summand)> {
        self.summands.iter().enumerate().map(|(i, s)| (i + 1, s))
    }

    pub fn summand(&self, pos: usize) -> Option<&Summand> {
        self.summands.get(pos.checked_sub(1)?)
    }

    pub fn weight(&self, pos: usize) -> Option<&Rational> {
        self.summand(pos).map(|s| &s.weight)
    }

    pub fn has_diffuse(&self) -> bool {
        self.summands.iter().any(Summand::is_diffuse)
    }

    /// Positions of matrix summands with size at least `min_n`.
    pub fn matrix_positions(&self, min_n: usize) -> Vec<usize> {
        self.iter1()
            .filter(|(_, s)| s.matrix_size().map_or(false, |n| n >= min_n))
            .map(|(i, _)| i)
            .collect()
    }

    /// True when every summand is a scalar ℂ.
    pub fn is_all_scalar(&self) -> bool {
        self.summands.iter().all(|s| s.matrix_size() == Some(1))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, AlgebraError> {
        serde_json::from_str(s).map_err(|e| AlgebraError::Parse(e.to_string()))
    }
}

/// Dimension extended by ∞: any diffuse summand makes the algebra
/// infinite-dimensional; otherwise the dimension is Σ n_i².
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtendedDim {
    Finite(u64),
    Infinite,
}

impl ExtendedDim {
    pub fn at_least(self, k: u64) -> bool {
        match self {
            ExtendedDim::Finite(d) => d >= k,
            ExtendedDim::Infinite => true,
        }
    }

    pub fn plus(self, other: ExtendedDim) -> ExtendedDim {
        match (self, other) {
            (ExtendedDim::Finite(a), ExtendedDim::Finite(b)) => ExtendedDim::Finite(a + b),
            _ => ExtendedDim::Infinite,
        }
    }
}

impl std::fmt::Display for ExtendedDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedDim::Finite(d) => write!(f, "{d}"),
            ExtendedDim::Infinite => write!(f, "∞"),
        }
    }
}

/// Validated construction; the spec-level entry point.
pub fn mk_algebra(summands: Vec<Summand>) -> Result<TracialAlgebra, AlgebraError> {
    TracialAlgebra::new(summands)
}

/// Σ n_i² over matrix summands, or ∞ when a diffuse summand is present.
pub fn ext_dim(a: &TracialAlgebra) -> ExtendedDim {
    let mut total: u64 = 0;
    for s in a.summands() {
        match s.matrix_size() {
            Some(n) => total += (n * n) as u64,
            None => return ExtendedDim::Infinite,
        }
    }
    ExtendedDim::Finite(total)
}

/// Trace contribution of one matrix summand: weight · tr_n(element).
/// Diffuse summands carry Haar polynomials and are traced by the word
/// calculus, not here.
pub fn summand_trace(
    a: &TracialAlgebra,
    pos: usize,
    element: &ExactMatrix,
) -> Result<Scalar, AlgebraError> {
    let s = a
        .summand(pos)
        .ok_or_else(|| AlgebraError::ShapeMismatch(format!("no summand at position {pos}")))?;
    match s.matrix_size() {
        Some(n) if n == element.dim() => {
            let t = element.normalized_trace();
            let w = &s.weight;
            Ok(Scalar::new(t.re * w, t.im * w))
        }
        Some(n) => Err(AlgebraError::ShapeMismatch(format!(
            "summand {pos} is {n}x{n}, element is {d}x{d}",
            d = element.dim()
        ))),
        None => Err(AlgebraError::ShapeMismatch(format!(
            "summand {pos} is diffuse; its elements are Haar polynomials"
        ))),
    }
}

/// Serialize rationals as `"p/q"` strings so JSON never corrupts a weight.
pub mod rational_str {
    use super::*;
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(de::Error::custom)
    }
}

/// Convenience: builds the left/right comparison quantity weight/n².
pub(crate) fn weight_over_nsq(weight: &Rational, n: usize) -> Rational {
    weight / rat_int((n * n) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn mk_algebra_accepts_unit_sum() {
        let a = mk_algebra(vec![Summand::scalar(rat(9, 10)), Summand::scalar(rat(1, 10))]).unwrap();
        assert_eq!(a.len(), 2);
        let m2 = mk_algebra(vec![Summand::matrix(2, rat(1, 1))]).unwrap();
        assert_eq!(m2.summands()[0].matrix_size(), Some(2));
    }

    #[test]
    fn mk_algebra_rejects_bad_sums() {
        let err = mk_algebra(vec![Summand::scalar(rat(1, 2)), Summand::scalar(rat(1, 3))])
            .unwrap_err();
        assert!(matches!(err, AlgebraError::WeightSum { .. }), "5/6 must be rejected");
        assert!(matches!(
            mk_algebra(vec![]),
            Err(AlgebraError::EmptyAlgebra)
        ));
        assert!(matches!(
            mk_algebra(vec![Summand::scalar(rat(0, 1)), Summand::scalar(rat(1, 1))]),
            Err(AlgebraError::ZeroWeight { .. })
        ));
    }

    #[test]
    fn ext_dim_examples() {
        let a = TracialAlgebra::scalars(&[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(ext_dim(&a), ExtendedDim::Finite(2));
        assert_eq!(ext_dim(&TracialAlgebra::full_matrix(2)), ExtendedDim::Finite(4));
        let d = mk_algebra(vec![
            Summand::diffuse("A0", rat(1, 3)),
            Summand::matrix(2, rat(2, 3)),
        ])
        .unwrap();
        assert_eq!(ext_dim(&d), ExtendedDim::Infinite);
        assert!(ExtendedDim::Infinite.at_least(1_000_000));
    }

    #[test]
    fn ext_dim_permutation_invariant() {
        let a = mk_algebra(vec![
            Summand::matrix(2, rat(1, 2)),
            Summand::scalar(rat(1, 3)),
            Summand::scalar(rat(1, 6)),
        ])
        .unwrap();
        let b = mk_algebra(vec![
            Summand::scalar(rat(1, 6)),
            Summand::matrix(2, rat(1, 2)),
            Summand::scalar(rat(1, 3)),
        ])
        .unwrap();
        assert_eq!(ext_dim(&a), ext_dim(&b));
    }

    #[test]
    fn summand_trace_examples() {
        let a = mk_algebra(vec![
            Summand::matrix(2, rat(1, 2)),
            Summand::matrix(1, rat(1, 6)),
            Summand::matrix(3, rat(1, 3)),
        ])
        .unwrap();
        let id2 = ExactMatrix::identity(2);
        assert_eq!(summand_trace(&a, 1, &id2).unwrap(), crate::exact::scalar_rat(1, 2));
        let e11 = ExactMatrix::unit(2, 0, 0);
        assert_eq!(summand_trace(&a, 1, &e11).unwrap(), crate::exact::scalar_rat(1, 4));
        let traceless = ExactMatrix::unit(3, 0, 1);
        assert!(summand_trace(&a, 3, &traceless).unwrap().is_zero());
        assert!(summand_trace(&a, 1, &ExactMatrix::identity(3)).is_err());
    }

    #[test]
    fn summand_trace_is_tracial() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        let a = mk_algebra(vec![Summand::matrix(3, rat(1, 1))]).unwrap();
        for _ in 0..20 {
            let rand_mat = |rng: &mut rand_chacha::ChaCha20Rng| {
                ExactMatrix::new(
                    3,
                    (0..9)
                        .map(|_| {
                            Scalar::new(
                                rat(rng.random_range(-3..=3), rng.random_range(1..=3)),
                                rat(rng.random_range(-3..=3), rng.random_range(1..=3)),
                            )
                        })
                        .collect(),
                )
            };
            let x = rand_mat(&mut rng);
            let y = rand_mat(&mut rng);
            assert_eq!(
                summand_trace(&a, 1, &x.mul(&y)).unwrap(),
                summand_trace(&a, 1, &y.mul(&x)).unwrap()
            );
            // linearity
            assert_eq!(
                summand_trace(&a, 1, &x.add(&y)).unwrap(),
                summand_trace(&a, 1, &x).unwrap() + summand_trace(&a, 1, &y).unwrap()
            );
        }
    }

    #[test]
    fn diffuse_summands_merge_with_warning() {
        let (a, warnings) = TracialAlgebra::new_with_warnings(vec![
            Summand::diffuse("A0", rat(1, 4)),
            Summand::scalar(rat(1, 2)),
            Summand::diffuse("A1", rat(1, 4)),
        ])
        .unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.weight(1), Some(&rat(1, 2)));
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn json_schema_round_trip() {
        let json = r#"{"summands":[{"kind":"matrix","n":2,"weight":"1/2"},{"kind":"diffuse","label":"A0","weight":"1/2"}]}"#;
        let a = TracialAlgebra::from_json(json).unwrap();
        assert_eq!(a.summands()[0].matrix_size(), Some(2));
        assert!(a.summands()[1].is_diffuse());
        let back = a.to_json();
        let a2 = TracialAlgebra::from_json(&back).unwrap();
        assert_eq!(a, a2);
        // float weights are rejected at parse time
        let bad = r#"{"summands":[{"kind":"matrix","n":2,"weight":"0.5"}]}"#;
        assert!(TracialAlgebra::from_json(bad).is_err());
        // weight sums are re-validated on deserialization
        let bad_sum = r#"{"summands":[{"kind":"matrix","n":2,"weight":"1/3"}]}"#;
        assert!(TracialAlgebra::from_json(bad_sum).is_err());
    }
}
