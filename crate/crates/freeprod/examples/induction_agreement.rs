//! Two engines, one answer.
//!
//! The closed form classifies summand pairs directly; the induction engine
//! instead peels matrix summands one at a time, decomposes the smaller
//! product, and rebuilds the peeled corner as a compressed free product
//! against 𝕄_n. This example shows a worked compression and then
//! cross-validates the engines on a stream of random inputs.
//!
//! ```bash
//! cargo run -p freeprod --example induction_agreement
//! ```

use freeprod::algebra::{ext_dim, mk_algebra, ExtendedDim, Summand, TracialAlgebra};
use freeprod::exact::{format_rational, rat, Rational};
use freeprod::structure::{compression_rewrite, decompose, decompose_by_induction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random_algebra<R: Rng>(rng: &mut R) -> TracialAlgebra {
    let count = rng.random_range(1..=4);
    let mut raw: Vec<(Option<usize>, Rational)> = Vec::new();
    let mut has_diffuse = false;
    for _ in 0..count {
        let kind = if !has_diffuse && rng.random_bool(0.2) {
            has_diffuse = true;
            None
        } else {
            Some(rng.random_range(1..=3))
        };
        raw.push((kind, rat(rng.random_range(1..=6), rng.random_range(1..=6))));
    }
    let total: Rational = raw.iter().map(|(_, w)| w.clone()).sum();
    TracialAlgebra::new(
        raw.into_iter()
            .map(|(kind, w)| match kind {
                Some(n) => Summand::matrix(n, &w / &total),
                None => Summand::diffuse("A0", &w / &total),
            })
            .collect(),
    )
    .unwrap()
}

fn hypotheses_hold(a: &TracialAlgebra, b: &TracialAlgebra) -> bool {
    let (da, db) = (ext_dim(a), ext_dim(b));
    da.at_least(2)
        && db.at_least(2)
        && match (da, db) {
            (ExtendedDim::Finite(x), ExtendedDim::Finite(y)) => x + y >= 5,
            _ => true,
        }
}

fn main() {
    // worked compression: peeling the M2 summand of
    // A = M2^{1/2} ⊕ C^{1/2} against B = C^{1/10} ⊕ C^{9/10}
    let a = mk_algebra(vec![Summand::matrix(2, rat(1, 2)), Summand::scalar(rat(1, 2))]).unwrap();
    let b = TracialAlgebra::scalars(&[rat(1, 10), rat(9, 10)]).unwrap();
    let (corner_left, alpha) = compression_rewrite(&a, &b, 1).unwrap();
    println!("compressing at the M2 summand (weight {}):", format_rational(&alpha));
    println!("corner left factor = {}", corner_left.to_json());
    println!("(the corner itself is that algebra freely multiplied with M2)\n");

    let closed = decompose(&a, &b).unwrap();
    let peeled = decompose_by_induction(&a, &b).unwrap();
    assert_eq!(closed, peeled);
    println!("worked example decomposition (both engines):");
    print!("{}", freeprod::cli::render_decomposition(&closed));

    // a threshold input: (1/2)/2² + 7/8 = 1 exactly, so the pair (1,1)
    // carries a boundary map instead of a block, and both engines must
    // find it through their different arithmetic routes
    let a = mk_algebra(vec![Summand::matrix(2, rat(1, 2)), Summand::scalar(rat(1, 2))]).unwrap();
    let b = TracialAlgebra::scalars(&[rat(7, 8), rat(1, 8)]).unwrap();
    let closed = decompose(&a, &b).unwrap();
    let peeled = decompose_by_induction(&a, &b).unwrap();
    assert_eq!(closed, peeled);
    println!("\nthreshold example (boundary map, both engines):");
    print!("{}", freeprod::cli::render_decomposition(&closed));

    // randomized cross-validation
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let rounds = 500;
    let mut blocks = 0usize;
    let mut boundaries = 0usize;
    let mut done = 0usize;
    while done < rounds {
        let a = random_algebra(&mut rng);
        let b = random_algebra(&mut rng);
        if !hypotheses_hold(&a, &b) {
            continue;
        }
        let d1 = decompose(&a, &b).unwrap();
        let d2 = decompose_by_induction(&a, &b).unwrap();
        assert_eq!(d1, d2, "engines disagreed on {} * {}", a.to_json(), b.to_json());
        blocks += d1.plus_blocks.len();
        boundaries += d1.boundary_maps.len();
        done += 1;
    }
    println!(
        "\n{rounds} random products: engines agree field by field \
         ({blocks} blocks, {boundaries} boundary maps encountered)"
    );
}
