//! Shared random-input generation for the integration suites.

use freeprod::algebra::{ext_dim, ExtendedDim, Summand, TracialAlgebra};
use freeprod::exact::{rat, Rational};
use num_traits::One;
use rand::Rng;

pub fn random_algebra<R: Rng>(rng: &mut R, allow_diffuse: bool) -> TracialAlgebra {
    let count = rng.random_range(1..=4);
    let mut raw: Vec<(Option<usize>, Rational)> = Vec::with_capacity(count);
    let mut has_diffuse = false;
    for _ in 0..count {
        let kind = if allow_diffuse && !has_diffuse && rng.random_bool(0.2) {
            has_diffuse = true;
            None
        } else {
            Some(rng.random_range(1..=3))
        };
        raw.push((kind, rat(rng.random_range(1..=6), rng.random_range(1..=6))));
    }
    let total: Rational = raw.iter().map(|(_, w)| w.clone()).sum();
    let summands = raw
        .into_iter()
        .map(|(kind, w)| match kind {
            Some(n) => Summand::matrix(n, &w / &total),
            None => Summand::diffuse("A0", &w / &total),
        })
        .collect();
    TracialAlgebra::new(summands).expect("normalized weights sum to one")
}

/// A pair satisfying the classification hypotheses: both dimensions at
/// least 2 and their sum at least 5.
pub fn random_valid_pair<R: Rng>(rng: &mut R) -> (TracialAlgebra, TracialAlgebra) {
    loop {
        let a = random_algebra(rng, true);
        let b = random_algebra(rng, true);
        let (da, db) = (ext_dim(&a), ext_dim(&b));
        let ok = da.at_least(2)
            && db.at_least(2)
            && match (da, db) {
                (ExtendedDim::Finite(x), ExtendedDim::Finite(y)) => x + y >= 5,
                _ => true,
            };
        if ok {
            return (a, b);
        }
    }
}

/// A pair engineered to contain a threshold (boundary-map) pair: a matrix
/// summand of size n and weight α on one side against a scalar of weight
/// exactly 1 − α/n² on the other.
pub fn random_threshold_pair<R: Rng>(rng: &mut R) -> (TracialAlgebra, TracialAlgebra) {
    let n = rng.random_range(2..=3);
    let num = rng.random_range(1..=8);
    let den = rng.random_range(num + 1..=9);
    let alpha = rat(num, den);
    let beta = Rational::one() - &alpha / rat((n * n) as i64, 1);
    let rest_a = Rational::one() - &alpha;
    let rest_b = Rational::one() - &beta;
    let a = TracialAlgebra::new(vec![
        Summand::matrix(n, alpha),
        Summand::scalar(rest_a),
    ])
    .expect("valid left side");
    // split the right remainder so the right side never degenerates to C ⊕ C
    let b = TracialAlgebra::new(vec![
        Summand::scalar(beta),
        Summand::scalar(&rest_b / rat(2, 1)),
        Summand::scalar(&rest_b / rat(2, 1)),
    ])
    .expect("valid right side");
    if rng.random_bool(0.5) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Mixed stream: mostly generic pairs, a quarter engineered threshold pairs.
pub fn random_classification_pair<R: Rng>(rng: &mut R) -> (TracialAlgebra, TracialAlgebra) {
    if rng.random_bool(0.25) {
        random_threshold_pair(rng)
    } else {
        random_valid_pair(rng)
    }
}
