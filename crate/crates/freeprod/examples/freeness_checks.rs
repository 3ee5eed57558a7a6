//! Randomized exact-freeness verification.
//!
//! In (ℂ^m, weights) * (𝕄_n, tr_n) the projections conjugated by powers of
//! the trace-zero shift unitary generate subalgebras that are free from the
//! diagonal; consequently every alternating word of centered letters from
//! those subalgebras is trace-orthogonal to every shift power. These checks
//! sample hundreds of such words and assert the traces vanish exactly — no
//! tolerance, rational zero.
//!
//! ```bash
//! cargo run -p freeprod --example freeness_checks
//! ```

use freeprod::exact::rat;
use freeprod::moments::{verify_corollary32, verify_lemma31};

fn main() {
    // fine family: all conjugation exponents 0..n against the diagonal
    let report = verify_lemma31(2, 2, &[rat(1, 2), rat(1, 2)], None, 200, 8, 7).unwrap();
    println!(
        "fine family, n=2: {}/{} words, {} evaluations, all zero: {}",
        report.words_checked,
        report.words_checked,
        report.trace_evaluations,
        report.all_zero()
    );
    assert!(report.all_zero());

    let report = verify_lemma31(3, 3, &[rat(1, 6), rat(1, 3), rat(1, 2)], None, 150, 8, 9).unwrap();
    println!(
        "fine family, n=3, three weights: {} evaluations, all zero: {}",
        report.trace_evaluations,
        report.all_zero()
    );
    assert!(report.all_zero());

    // coarse family: exponents 0..l with the diagonal-plus-shift-powers
    // subalgebra, l a proper divisor of n
    let report = verify_lemma31(2, 4, &[rat(1, 3), rat(2, 3)], Some(2), 150, 8, 11).unwrap();
    println!(
        "coarse family, (n,l)=(4,2): {} evaluations, all zero: {}",
        report.trace_evaluations,
        report.all_zero()
    );
    assert!(report.all_zero());

    // spanning products b: τ(b·u^k) = 0 for 0 < k < n, and translates
    // u^{k1}·B ⟂ u^{k2}·B at the inner-product level
    let report = verify_corollary32(3, &[rat(1, 4), rat(3, 4)], 150, 13).unwrap();
    println!(
        "spanning products, n=3: {}/{} words, {} evaluations, all zero: {}",
        report.words_checked,
        report.words_checked,
        report.trace_evaluations,
        report.all_zero()
    );
    assert!(report.all_zero());

    println!("\nevery trace was computed exactly; a single nonzero rational would fail the run");
}
