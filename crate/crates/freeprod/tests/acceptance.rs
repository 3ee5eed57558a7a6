//! Acceptance suite: one test per criterion, each printing its pass line
//! with the measured values (run with `--nocapture` to see them).

mod common;

use std::time::Instant;

use freeprod::algebra::{Side, TracialAlgebra};
use freeprod::exact::{rat, rational_to_f64, scalar, scalar_rat, Rational};
use freeprod::moments::{word_trace, verify_corollary32, verify_lemma31, FreeWord, Letter, SideElement};
use freeprod::oracle::{
    coordinate_projection, empirical_word_traces, haar_unitary, intersection_rank, trial_rng,
    two_projection_spectrum,
};
use freeprod::structure::{
    classify_pairs, decompose, decompose_by_induction, two_projection_structure, IdealRef,
};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn scalars(ws: &[(i64, i64)]) -> TracialAlgebra {
    TracialAlgebra::scalars(&ws.iter().map(|&(n, d)| rat(n, d)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn criterion_01_golden_block_case() {
    let t0 = Instant::now();
    let a = scalars(&[(9, 10), (1, 10)]);
    let b = TracialAlgebra::full_matrix(2);
    let d = decompose(&a, &b).unwrap();
    assert_eq!(d.factor.weight, rat(2, 5));
    assert!(d.factor.simple && d.factor.unique_trace && d.factor.unital);
    assert_eq!(d.plus_blocks.len(), 1);
    let block = &d.plus_blocks[0];
    assert_eq!((block.left, block.right, block.size), (1, 1, 2));
    assert_eq!(block.gamma, rat(3, 5), "block weight must equal n²·α − n² + 1 = 3/5");
    assert!(d.boundary_maps.is_empty() && d.kernel.is_none());
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    println!(
        "criterion 1 PASS: (C^{{9/10}} ⊕ C^{{1/10}}) * M2 = A0^{{2/5}} ⊕ M2^{{3/5}}, simple + unique trace ({:?})",
        t0.elapsed()
    );
}

#[test]
fn criterion_02_golden_exact_sequence_case() {
    let t0 = Instant::now();
    let a = scalars(&[(3, 4), (1, 4)]);
    let b = TracialAlgebra::full_matrix(2);
    let d = decompose(&a, &b).unwrap();
    assert!(d.plus_blocks.is_empty());
    assert_eq!(d.factor.weight, Rational::one());
    assert_eq!(d.boundary_maps.len(), 1);
    let bm = &d.boundary_maps[0];
    assert_eq!((bm.left, bm.right, bm.target_size), (1, 1, 2));
    let k = d.kernel.as_ref().expect("threshold pair must produce a kernel report");
    assert!(k.simple && !k.unital && k.unique_trace);
    assert!(!d.factor.simple && !d.factor.unique_trace);
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    println!(
        "criterion 2 PASS: (C^{{3/4}} ⊕ C^{{1/4}}) * M2 has boundary pair (1,1), kernel simple/nonunital/unique-trace ({:?})",
        t0.elapsed()
    );
}

#[test]
fn criterion_03_golden_matrix_matrix_case() {
    let t0 = Instant::now();
    let m2 = TracialAlgebra::full_matrix(2);
    let d = decompose(&m2, &m2).unwrap();
    assert!(d.plus_blocks.is_empty() && d.boundary_maps.is_empty());
    assert!(d.factor.simple && d.factor.unique_trace);
    assert_eq!(d.factor.weight, Rational::one());
    let (plus, zero) = classify_pairs(&m2, &m2);
    assert!(plus.is_empty() && zero.is_empty(), "1/4 + 1/4 < 1");
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    println!("criterion 3 PASS: M2 * M2 simple with unique trace ({:?})", t0.elapsed());
}

#[test]
fn criterion_04_golden_two_projection_atoms() {
    let t0 = Instant::now();
    let t = two_projection_structure(&rat(3, 4), &rat(1, 2)).unwrap();
    assert_eq!(t.atom_p_not_q, rat(1, 4), "atom at p∧(1−q) is α − β");
    assert_eq!(t.atom_p_and_q, rat(1, 4), "atom at p∧q is α + β − 1");
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    println!("criterion 4 PASS: two_projection_structure(3/4, 1/2) atoms (1/4, 1/4) exactly ({:?})", t0.elapsed());
}

#[test]
fn criterion_05_weight_conservation_property() {
    let t0 = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1001);
    let cases = 1000;
    for case in 0..cases {
        let (a, b) = common::random_classification_pair(&mut rng);
        let d = decompose(&a, &b).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let total: Rational = d.plus_blocks.iter().map(|bl| bl.gamma.clone()).sum();
        assert_eq!(&total + &d.factor.weight, Rational::one(), "case {case}: γ + Σγij = 1");
        assert!(d.factor.weight > Rational::zero(), "case {case}: γ > 0");
        for bl in &d.plus_blocks {
            assert!(bl.gamma > Rational::zero(), "case {case}: γij > 0");
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0);
    println!("criterion 5 PASS: weight conservation exact on {cases} random inputs ({dt:?})");
}

#[test]
fn criterion_06_engine_agreement_property() {
    let t0 = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1002);
    let cases = 1000;
    let mut with_boundary = 0;
    let mut with_blocks = 0;
    for case in 0..cases {
        let (a, b) = common::random_classification_pair(&mut rng);
        let closed = decompose(&a, &b).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let peeled = decompose_by_induction(&a, &b).unwrap_or_else(|e| panic!("case {case}: {e}"));
        assert_eq!(closed, peeled, "case {case}: engines must agree field by field");
        with_boundary += usize::from(!closed.boundary_maps.is_empty());
        with_blocks += usize::from(!closed.plus_blocks.is_empty());
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0);
    println!(
        "criterion 6 PASS: closed form ≡ induction on {cases} random inputs \
         ({with_blocks} with blocks, {with_boundary} with boundary pairs) ({dt:?})"
    );
}

#[test]
fn criterion_07_swap_symmetry_property() {
    let t0 = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(1003);
    let cases = 1000;
    for case in 0..cases {
        let (a, b) = common::random_classification_pair(&mut rng);
        let d_ab = decompose(&a, &b).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let d_ba = decompose(&b, &a).unwrap_or_else(|e| panic!("case {case}: {e}"));
        assert_eq!(
            d_ab.normalized(),
            d_ba.swapped().normalized(),
            "case {case}: swapping the factors must transpose the indices"
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0);
    println!("criterion 7 PASS: decompose(A,B) ≡ decompose(B,A) under index swap on {cases} inputs ({dt:?})");
}

#[test]
fn criterion_08_lemma31_part_one_exact_zeros() {
    let t0 = Instant::now();
    let runs = [
        (2usize, 2usize, vec![rat(1, 2), rat(1, 2)], 167usize, 81u64),
        (2, 3, vec![rat(1, 3), rat(2, 3)], 167, 82),
        (3, 4, vec![rat(1, 6), rat(1, 3), rat(1, 2)], 166, 83),
    ];
    let mut words = 0;
    let mut evals = 0;
    for (m, n, weights, samples, seed) in runs {
        let report = verify_lemma31(m, n, &weights, None, samples, 8, seed).unwrap();
        assert!(report.all_zero(), "n={n}: {:?}", report.failures);
        words += report.words_checked;
        evals += report.trace_evaluations;
    }
    assert_eq!(words, 500);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 120.0);
    println!("criterion 8 PASS: 500 conjugated-family words over n ∈ {{2,3,4}}, {evals} exact zeros ({dt:?})");
}

#[test]
fn criterion_09_lemma31_part_two_exact_zeros() {
    let t0 = Instant::now();
    let runs = [
        (4usize, 2usize, vec![rat(1, 4), rat(3, 4)], 120usize, 91u64),
        (6, 2, vec![rat(2, 5), rat(3, 5)], 120, 92),
        (6, 3, vec![rat(1, 6), rat(5, 6)], 120, 93),
    ];
    let mut evals = 0;
    for (n, l, weights, samples, seed) in runs {
        let report = verify_lemma31(2, n, &weights, Some(l), samples, 8, seed).unwrap();
        assert!(report.all_zero(), "(n,l)=({n},{l}): {:?}", report.failures);
        evals += report.trace_evaluations;
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 120.0);
    println!("criterion 9 PASS: coarse-subalgebra words for (n,l) ∈ {{(4,2),(6,2),(6,3)}}, {evals} exact zeros ({dt:?})");
}

#[test]
fn criterion_10_corollary32_exact_zeros() {
    let t0 = Instant::now();
    let runs = [
        (2usize, vec![rat(1, 2), rat(1, 2)], 200usize, 71u64),
        (3, vec![rat(1, 4), rat(3, 4)], 150, 72),
        (4, vec![rat(1, 5), rat(4, 5)], 150, 73),
    ];
    let mut words = 0;
    let mut evals = 0;
    for (n, weights, samples, seed) in runs {
        let report = verify_corollary32(n, &weights, samples, seed).unwrap();
        assert!(report.all_zero(), "n={n}: {:?}", report.failures);
        words += report.words_checked;
        evals += report.trace_evaluations;
    }
    assert_eq!(words, 500);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 120.0);
    println!("criterion 10 PASS: 500 random spanning products, {evals} exact zeros ({dt:?})");
}

#[test]
fn criterion_11_pqpq_exact_value() {
    let t0 = Instant::now();
    let a = scalars(&[(1, 2), (1, 2)]);
    let p = Letter::left(SideElement::projection(&a, 1).unwrap());
    let q = Letter::right(SideElement::projection(&a, 1).unwrap());
    let w = FreeWord::new(vec![p, q.clone()]);
    let w = w.concat(&w);
    let t = word_trace(&w, &a, &a).unwrap();
    assert_eq!(t, scalar_rat(3, 16), "τ(pqpq) = 3/16 at α = β = 1/2");
    // the derived closed formula α²β(1−β) + αβ²(1−α) + α²β² at several points
    for (alpha, beta) in [(rat(1, 2), rat(1, 2)), (rat(2, 3), rat(1, 5)), (rat(3, 7), rat(5, 6))] {
        let aa = TracialAlgebra::scalars(&[alpha.clone(), Rational::one() - &alpha]).unwrap();
        let bb = TracialAlgebra::scalars(&[beta.clone(), Rational::one() - &beta]).unwrap();
        let w = FreeWord::new(vec![
            Letter::left(SideElement::projection(&aa, 1).unwrap()),
            Letter::right(SideElement::projection(&bb, 1).unwrap()),
        ]);
        let w = w.concat(&w);
        let expect = &alpha * &alpha * &beta * (Rational::one() - &beta)
            + &alpha * &beta * &beta * (Rational::one() - &alpha)
            + &alpha * &alpha * &beta * &beta;
        assert_eq!(word_trace(&w, &aa, &bb).unwrap(), scalar(expect));
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    println!("criterion 11 PASS: τ(pqpq) = 3/16 exactly; closed formula verified at three points ({:?})", t0.elapsed());
}

#[test]
fn criterion_12_monte_carlo_word_traces() {
    let t0 = Instant::now();
    let ambient = 1000;
    let trials = 50;
    let seed = 42;
    let a = scalars(&[(1, 2), (1, 2)]);
    let p = Letter::left(SideElement::projection(&a, 1).unwrap());
    let q = Letter::right(SideElement::projection(&a, 1).unwrap());
    let words: Vec<FreeWord> = (1..=4)
        .map(|k| {
            let mut letters = Vec::new();
            for _ in 0..k {
                letters.push(p.clone());
                letters.push(q.clone());
            }
            FreeWord::new(letters)
        })
        .collect();
    let estimates = empirical_word_traces(&a, &a, &words, ambient, trials, seed).unwrap();
    for (k, est) in (1..=4).zip(&estimates) {
        let exact = rational_to_f64(&word_trace(&words[k - 1], &a, &a).unwrap().re);
        let tol = 3.0 * est.stderr + 16.0 / ambient as f64;
        let err = (est.mean - exact).abs();
        assert!(
            err <= tol,
            "k={k}: empirical {:.6} vs exact {exact:.6}, err {err:.2e} > tol {tol:.2e}",
            est.mean
        );
        println!(
            "criterion 12 [k={k}]: empirical {:.6} exact {exact:.6} err {err:.2e} ≤ tol {tol:.2e}",
            est.mean
        );
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 300.0);
    println!("criterion 12 PASS: τ((pq)^k), k ≤ 4, within 3·stderr + 16/N at N={ambient}, trials={trials}, seed={seed} ({dt:?})");
}

#[test]
fn criterion_13_monte_carlo_atom_mass() {
    let t0 = Instant::now();
    let ambient = 1000;
    let trials = 50;
    let seed = 42;
    let run = two_projection_spectrum(&rat(7, 10), &rat(8, 10), ambient, trials, seed).unwrap();
    let tol = 2.0 / ((ambient * trials) as f64).sqrt() + 2.0 / ambient as f64;
    let err = (run.summary.atom1_mass - 0.5).abs();
    assert!(err <= tol, "atom mass {} err {err:.2e} > tol {tol:.2e}", run.summary.atom1_mass);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 300.0);
    println!(
        "criterion 13 PASS: atom-at-1 mass {:.6} within {tol:.4} of 1/2 at N={ambient}, trials={trials} ({dt:?})",
        run.summary.atom1_mass
    );
}

#[test]
fn criterion_14_monte_carlo_support() {
    let t0 = Instant::now();
    let ambient = 1000;
    let trials = 50;
    let seed = 42;
    let run = two_projection_spectrum(&rat(1, 2), &rat(1, 2), ambient, trials, seed).unwrap();
    let (lo, hi) = run.summary.support;
    assert!(lo >= -0.02 && hi <= 1.02, "support [{lo}, {hi}] must lie in [−0.02, 1.02]");
    assert!(lo <= 0.05 && hi >= 0.95, "support [{lo}, {hi}] must cover [0.05, 0.95]");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 300.0);
    println!("criterion 14 PASS: empirical support [{lo:.4}, {hi:.4}] covers [0.05, 0.95] within [−0.02, 1.02] ({dt:?})");
}

#[test]
fn criterion_15_intersection_rank_law() {
    let t0 = Instant::now();
    let n = 12;
    let mut rng = ChaCha20Rng::seed_from_u64(1500);
    let mut hits = 0;
    let trials = 100;
    for trial in 0..trials {
        let rp = rng.random_range(1..n);
        let rq = rng.random_range(1..n);
        let p = coordinate_projection(n, rp);
        let qdiag = coordinate_projection(n, rq);
        let mut trng = trial_rng(1501, trial as u64);
        let u = haar_unitary(n, &mut trng);
        let udag = u.t().mapv(|z| z.conj());
        let q = u.dot(&qdiag).dot(&udag);
        let want = (rp + rq).saturating_sub(n);
        let got = intersection_rank(&p, &q).unwrap();
        if got == want {
            hits += 1;
        } else {
            panic!("trial {trial}: rank {got}, generic position predicts {want}");
        }
    }
    assert_eq!(hits, trials);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 300.0);
    println!("criterion 15 PASS: max(0, rP + rQ − N) held in {hits}/{trials} Haar trials ({dt:?})");
}

// The L₀ machinery carries its own acceptance weight through criteria 2, 5,
// 6 and the threshold generator; this sanity check pins the kernel verdicts
// the spec fixes for every boundary case.
#[test]
fn threshold_pairs_always_report_fixed_kernel_verdicts() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    for _ in 0..50 {
        let (a, b) = common::random_threshold_pair(&mut rng);
        let d = decompose(&a, &b).unwrap();
        assert!(!d.boundary_maps.is_empty());
        let k = d.kernel.as_ref().unwrap();
        assert!(k.simple && !k.unital && k.unique_trace);
        assert!(!d.factor.simple && !d.factor.unique_trace);
        // every boundary pair also appears in some fullness claim's ideal
        for bm in &d.boundary_maps {
            let pair = (bm.left, bm.right);
            let mentioned = d.fullness.iter().any(|c| match &c.within {
                IdealRef::KernelIntersection { pairs } => pairs.contains(&pair),
                _ => false,
            }) || d.fullness.iter().any(|c| {
                c.projection == (Side::Left, bm.left) || c.projection == (Side::Right, bm.right)
            });
            assert!(mentioned);
        }
    }
}
