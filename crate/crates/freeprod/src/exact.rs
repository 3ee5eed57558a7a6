//! Exact scalars and small exact matrices.
//!
//! Everything the classification and the word calculus touch is computed over
//! the Gaussian rationals ℚ(i): a [`Scalar`] is a complex number whose real
//! and imaginary parts are arbitrary-precision rationals. No float enters any
//! verdict; floats appear only in the Monte Carlo oracle.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number, stored in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Exact Gaussian rational: a pair of [`Rational`]s under complex arithmetic.
pub type Scalar = Complex<Rational>;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A real rational as a scalar.
pub fn scalar(re: Rational) -> Scalar {
    Scalar::new(re, Rational::zero())
}

/// `n/d` as a (real) scalar.
pub fn scalar_rat(n: i64, d: i64) -> Scalar {
    scalar(rat(n, d))
}

/// Renders `p/q`, or just `p` for integers. Inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected: weights must be
/// exact, equality of weights is semantically meaningful and must not be
/// decided by float comparison.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    t.parse::<Rational>()
        .map_err(|_| format!("invalid rational '{t}': expected an exact fraction like \"3/4\""))
}

/// Rational to nearest f64, for the numerical oracle only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Square matrix over the Gaussian rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        ExactMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        ExactMatrix { n, entries: vec![Scalar::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    /// Matrix unit e_ij (0-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.entries[i * n + j] = Scalar::one();
        m
    }

    pub fn diag(entries: Vec<Scalar>) -> Self {
        let n = entries.len();
        let mut m = Self::zero(n);
        for (i, e) in entries.into_iter().enumerate() {
            m.entries[i * n + i] = e;
        }
        m
    }

    /// k-th power of the cyclic shift unitary: the permutation matrix with
    /// entry 1 at (i, i+k mod n). Its normalized trace vanishes for k ≢ 0.
    pub fn cyclic_shift_pow(n: usize, k: i64) -> Self {
        let kk = k.rem_euclid(n as i64) as usize;
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + (i + kk) % n] = Scalar::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        ExactMatrix { n: self.n, entries }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        ExactMatrix { n: self.n, entries }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if !b.is_zero() {
                        out.entries[i * n + j] = &out.entries[i * n + j] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let entries = self.entries.iter().map(|a| a * c).collect();
        ExactMatrix { n: self.n, entries }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    /// Unnormalized trace Σ mᵢᵢ.
    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.n {
            t = t + self.entries[i * self.n + i].clone();
        }
        t
    }

    /// tr_n = trace / n.
    pub fn normalized_trace(&self) -> Scalar {
        let t = self.trace();
        let n = rat_int(self.n as i64);
        Scalar::new(t.re / n.clone(), t.im / n)
    }

    /// self − c·I.
    pub fn sub_scalar(&self, c: &Scalar) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] = &out.entries[i * self.n + i] - c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }
}

/// Laurent polynomial Σ c_k u^k in the Haar unitary generating a diffuse
/// abelian summand. The key 0 stands for the summand's own unit, and the
/// normalized summand trace is the coefficient at 0.
///
/// Canonical form: zero coefficients are never stored, so equality and
/// hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct HaarPoly {
    coeffs: BTreeMap<i64, Scalar>,
}

impl HaarPoly {
    pub fn zero() -> Self {
        HaarPoly::default()
    }

    /// The summand unit u^0.
    pub fn unit() -> Self {
        HaarPoly::power(0)
    }

    /// u^k.
    pub fn power(k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, Scalar::one());
        HaarPoly { coeffs }
    }

    pub fn from_coeffs(pairs: Vec<(i64, Scalar)>) -> Self {
        let mut p = HaarPoly::default();
        for (k, c) in pairs {
            p.accumulate(k, c);
        }
        p
    }

    fn accumulate(&mut self, k: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(k).or_insert_with(Scalar::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.accumulate(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.accumulate(*k, -c.clone());
        }
        out
    }

    /// Convolution product: u^a · u^b = u^{a+b}.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = HaarPoly::default();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                out.accumulate(a + b, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = HaarPoly::default();
        for (k, a) in &self.coeffs {
            out.accumulate(*k, a * c);
        }
        out
    }

    /// (Σ c_k u^k)* = Σ c̄_k u^{−k}.
    pub fn adjoint(&self) -> Self {
        let mut out = HaarPoly::default();
        for (k, c) in &self.coeffs {
            out.accumulate(-k, c.conj());
        }
        out
    }

    /// Normalized trace within the summand: τ(u^k) = δ_{k,0}.
    pub fn trace(&self) -> Scalar {
        self.coeffs.get(&0).cloned().unwrap_or_else(Scalar::zero)
    }

    /// self − c·u^0.
    pub fn sub_scalar(&self, c: &Scalar) -> Self {
        let mut out = self.clone();
        out.accumulate(0, -c.clone());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&i64, &Scalar)> {
        self.coeffs.iter()
    }
}

/// Signum helper used by classification comparisons in error messages.
pub fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
