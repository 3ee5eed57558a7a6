//! Exact decomposition of reduced free products.
//!
//! Builds a few weighted direct sums, runs the closed-form engine, and
//! prints factor weights, matrix-block atoms, boundary maps and verdicts.
//!
//! ```bash
//! cargo run -p freeprod --example decompose
//! ```

use freeprod::algebra::{mk_algebra, Summand, TracialAlgebra};
use freeprod::exact::rat;
use freeprod::structure::{decompose, vn_decompose};

fn show(title: &str, a: &TracialAlgebra, b: &TracialAlgebra) {
    println!("== {title}");
    println!("left  = {}", a.to_json());
    println!("right = {}", b.to_json());
    match decompose(a, b) {
        Ok(d) => {
            print!("{}", freeprod::cli::render_decomposition(&d));
            println!("json: {}", serde_json::to_string(&d).unwrap());
        }
        Err(e) => println!("rejected: {e}"),
    }
    println!();
}

fn main() {
    // a heavy scalar against the 2x2 matrix algebra: one matrix-block atom
    // of weight 4·(9/10) − 4 + 1 = 3/5 splits off
    let a = TracialAlgebra::scalars(&[rat(9, 10), rat(1, 10)]).unwrap();
    let m2 = TracialAlgebra::full_matrix(2);
    show("block case: (C^{9/10} ⊕ C^{1/10}) * M2", &a, &m2);

    // the threshold weight 3/4 = 1 − 1/4 produces a boundary map onto M2
    // instead of a block: the factor part is an extension of M2 by a
    // simple nonunital ideal
    let a = TracialAlgebra::scalars(&[rat(3, 4), rat(1, 4)]).unwrap();
    show("boundary case: (C^{3/4} ⊕ C^{1/4}) * M2", &a, &m2);

    // two matrix algebras: no pair crosses the threshold, the product is
    // simple with unique trace
    show("simple case: M2 * M2", &m2, &m2);

    // a mixed input with a diffuse summand
    let a = mk_algebra(vec![
        Summand::diffuse("A0", rat(1, 5)),
        Summand::matrix(2, rat(3, 10)),
        Summand::scalar(rat(1, 2)),
    ])
    .unwrap();
    let b = TracialAlgebra::scalars(&[rat(1, 10), rat(9, 10)]).unwrap();
    show("mixed case with a diffuse summand", &a, &b);

    // the von Neumann variant reports the factor part symbolically
    let a = TracialAlgebra::scalars(&[rat(9, 10), rat(1, 10)]).unwrap();
    let v = vn_decompose(&a, &m2).unwrap();
    println!("== von Neumann variant");
    println!(
        "factor {} with weight {}, {} block(s)",
        v.factor.label,
        freeprod::exact::format_rational(&v.factor.weight),
        v.plus_blocks.len()
    );

    // excluded input: both sides C ⊕ C
    let cc = TracialAlgebra::scalars(&[rat(1, 2), rat(1, 2)]).unwrap();
    println!("\n== excluded two-projection input");
    match decompose(&cc, &cc) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected as expected: {e}"),
    }
}
