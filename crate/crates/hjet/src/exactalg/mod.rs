//! Exact scalar, polynomial, power-series and matrix kernels.
//!
//! Everything here computes over the rationals or over sparse multivariate
//! polynomials with rational coefficients. No floating point anywhere.

pub mod matrix;
pub mod poly;
pub mod series;
pub mod unipoly;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational scalar. `num_rational` keeps the
/// denominator positive and the fraction reduced, which is exactly the
/// invariant we need.
pub type Rational = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Binomial coefficient C(n, k) as a rational, with C(n, k) = 0 for k > n.
/// Callers pass k as `isize` so that k < 0 naturally yields zero.
pub fn binomial(n: usize, k: isize) -> Rational {
    if k < 0 || k as usize > n {
        return <Rational as Zero>::zero();
    }
    let k = k as usize;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rational::new(num, den)
}

/// Factorial as a rational.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Rational::from_integer(acc)
}

/// The scalar rings our matrices and series are generic over: the
/// rationals and sparse multivariate polynomials. `exact_div` must
/// succeed whenever the divisor genuinely divides (which fraction-free
/// elimination guarantees at every step).
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero(&self) -> Self;
    fn one(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(&self, r: &Rational) -> Self;
    fn exact_div(&self, other: &Self) -> Self;

    fn scale(&self, r: &Rational) -> Self {
        self.mul(&self.from_rational(r))
    }
}

impl Scalar for Rational {
    fn zero(&self) -> Self {
        <Rational as Zero>::zero()
    }
    fn one(&self) -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn exact_div(&self, other: &Self) -> Self {
        assert!(!Zero::is_zero(other), "division by zero");
        self / other
    }
}

/// Sign helper for pivot heuristics on rationals.
pub fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}
