//! The exact word calculus.
//!
//! Words are products of letters from the two sides; the trace is computed
//! by the centering recursion that defines freeness. This example evaluates
//! the classic projection moments, checks a Haar unitary's moments, and
//! shows the text syntax the command line accepts.
//!
//! ```bash
//! cargo run -p freeprod --example word_moments
//! ```

use std::collections::BTreeMap;

use freeprod::algebra::{mk_algebra, Summand, TracialAlgebra};
use freeprod::exact::{format_rational, rat};
use freeprod::moments::{
    center, haar_check, parse_word, word_trace, FreeWord, Letter, SideElement,
};

fn scalar_pair(alpha: (i64, i64)) -> TracialAlgebra {
    use num_traits::One;
    let w = rat(alpha.0, alpha.1);
    TracialAlgebra::scalars(&[w.clone(), freeprod::exact::Rational::one() - w]).unwrap()
}

fn main() {
    let a = scalar_pair((1, 2));
    let b = scalar_pair((1, 2));
    let p = Letter::left(SideElement::projection(&a, 1).unwrap());
    let q = Letter::right(SideElement::projection(&b, 1).unwrap());

    // τ((pq)^k) for two free trace-1/2 projections
    println!("moments of two free projections at α = β = 1/2:");
    for k in 1..=5usize {
        let mut letters = Vec::new();
        for _ in 0..k {
            letters.push(p.clone());
            letters.push(q.clone());
        }
        let t = word_trace(&FreeWord::new(letters), &a, &b).unwrap();
        println!("  τ((pq)^{k}) = {}", format_rational(&t.re));
    }

    // the general pqpq formula α²β(1−β) + αβ²(1−α) + α²β²
    let a25 = scalar_pair((2, 5));
    let b37 = scalar_pair((3, 7));
    let w = parse_word("L:p1 R:p1 L:p1 R:p1", &a25, &b37).unwrap();
    println!(
        "\nτ(pqpq) at α = 2/5, β = 3/7: {}",
        format_rational(&word_trace(&w, &a25, &b37).unwrap().re)
    );

    // centering splits a letter into scalar + trace-zero part
    let c = center(&p, &a).unwrap();
    println!(
        "\ncenter(p): scalar {}, centered part has trace {}",
        format_rational(&c.scalar.re),
        format_rational(&c.centered.element.trace(&a).re)
    );

    // a diffuse summand is generated by a Haar unitary: all moments vanish
    let d = mk_algebra(vec![Summand::diffuse("A0", rat(1, 1))]).unwrap();
    let m2 = TracialAlgebra::full_matrix(2);
    let mut moments = BTreeMap::new();
    for k in -4i64..=4 {
        let w = FreeWord::new(vec![Letter::left(SideElement::haar_power(&d, 1, k).unwrap())]);
        moments.insert(k, word_trace(&w, &d, &m2).unwrap());
    }
    println!("\nHaar moments up to order 4 pass the check: {}", haar_check(&moments, 4));

    // the text syntax: conjugated and centered tokens
    let scalars = scalar_pair((1, 3));
    let w = parse_word("center(L:u^1*p1*u^-1) R:e11 center(L:p2)", &scalars, &m2).unwrap();
    println!(
        "conjugated/centered word evaluates to {}",
        format_rational(&word_trace(&w, &scalars, &m2).unwrap().re)
    );
}
