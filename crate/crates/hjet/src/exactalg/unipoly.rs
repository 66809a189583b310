//! Univariate polynomials and rational functions in t, used as the
//! coefficient field for differential operators along a curve.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::Rational;

/// Dense univariate polynomial; no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UniPoly {
            coeffs: vec![Rational::one()],
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn t() -> Self {
        UniPoly {
            coeffs: vec![Rational::zero(), Rational::one()],
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            (1..self.coeffs.len())
                .map(|k| &self.coeffs[k] * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Euclidean division: (quotient, remainder).
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len()];
        let dl = d.leading();
        while !rem.is_zero() && rem.degree() >= d.degree() {
            let shift = rem.degree() - d.degree();
            let f = rem.leading() / &dl;
            quot[shift] = f.clone();
            let mut sub = vec![Rational::zero(); shift];
            sub.extend(d.coeffs.iter().map(|c| c * &f));
            rem = rem.sub(&Self::new(sub));
        }
        (Self::new(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.leading();
            a.scale(&(Rational::one() / l))
        }
    }

    /// Number of distinct real roots in the open interval (a, b),
    /// assuming neither endpoint is a root, via Sturm's theorem.
    pub fn sturm_roots_in(&self, a: &Rational, b: &Rational) -> usize {
        if self.degree() == 0 || self.is_zero() {
            return 0;
        }
        // square-free part
        let sf = {
            let g = self.gcd(&self.derivative());
            if g.degree() == 0 {
                self.clone()
            } else {
                self.div_rem(&g).0
            }
        };
        let mut chain = vec![sf.clone(), sf.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            chain.push(r.neg());
        }
        let sign_changes = |t: &Rational| {
            let mut count = 0usize;
            let mut last: Option<bool> = None;
            for p in &chain {
                let v = p.eval(t);
                if Zero::is_zero(&v) {
                    continue;
                }
                let s = v.is_positive();
                if let Some(l) = last {
                    if l != s {
                        count += 1;
                    }
                }
                last = Some(s);
            }
            count
        };
        sign_changes(a).saturating_sub(sign_changes(b))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if Zero::is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            if k == 0 || !a.is_one() {
                write!(f, "{a}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            if k == 1 {
                write!(f, "t")?;
            } else if k > 1 {
                write!(f, "t^{k}")?;
            }
        }
        Ok(())
    }
}

/// Rational function num/den, gcd-reduced with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFunc { num, den };
        r.normalize();
        r
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(UniPoly::constant(c))
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = UniPoly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        let l = self.den.leading();
        if !l.is_one() {
            let inv = Rational::one() / l;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero rational function");
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }

    /// Quotient-rule derivative.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    /// Evaluation; None when the denominator vanishes at t.
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let d = self.den.eval(t);
        if Zero::is_zero(&d) {
            None
        } else {
            Some(self.num.eval(t) / d)
        }
    }
}

impl super::Scalar for RatFunc {
    fn zero(&self) -> Self {
        RatFunc::zero()
    }
    fn one(&self) -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RatFunc::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        RatFunc::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        RatFunc::mul(self, other)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn from_rational(&self, r: &Rational) -> Self {
        RatFunc::constant(r.clone())
    }
    fn exact_div(&self, other: &Self) -> Self {
        self.div(other)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Largest dyadic interval (t0 - h, t0 + h), h in [2^-20, 2^10], on which
/// `den` has no real roots. Used to report the working interval of an
/// operator with rational-function coefficients; `den(t0)` must be nonzero.
pub fn root_free_interval(den: &UniPoly, t0: &Rational) -> (Rational, Rational) {
    assert!(!Zero::is_zero(&den.eval(t0)), "denominator vanishes at t0");
    if den.degree() == 0 {
        // no roots at all; report a fixed wide interval
        let h = Rational::from_integer(1024.into());
        return (t0 - &h, t0 + &h);
    }
    let mut h = Rational::from_integer(1024.into());
    let min_h = Rational::new(1.into(), (1 << 20).into());
    while h > min_h {
        let a = t0 - &h;
        let b = t0 + &h;
        if !Zero::is_zero(&den.eval(&a))
            && !Zero::is_zero(&den.eval(&b))
            && den.sturm_roots_in(&a, &b) == 0
        {
            return (a, b);
        }
        h /= Rational::from_integer(2.into());
    }
    (t0 - &min_h, t0 + &min_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rat_int};

    fn p(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn div_rem_roundtrip() {
        let a = p(&[1, 0, -3, 2]); // 2t^3 - 3t^2 + 1
        let d = p(&[-1, 1]); // t - 1
        let (q, r) = a.div_rem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.is_zero()); // t = 1 is a root
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = p(&[-1, 1]); // t - 1
        let a = f.mul(&p(&[2, 1]));
        let b = f.mul(&p(&[3, 0, 1]));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn ratfunc_field_ops() {
        let x = RatFunc::from_poly(UniPoly::t());
        let one = RatFunc::one();
        // 1/(t+1) + t/(t+1) = 1
        let den = RatFunc::from_poly(p(&[1, 1]));
        let a = one.div(&den);
        let b = x.div(&den);
        assert_eq!(a.add(&b), RatFunc::one());
    }

    #[test]
    fn ratfunc_derivative_quotient_rule() {
        // d/dt (1/t) = -1/t^2
        let inv_t = RatFunc::new(UniPoly::one(), UniPoly::t());
        let d = inv_t.derivative();
        assert_eq!(
            d,
            RatFunc::new(UniPoly::constant(rat_int(-1)), UniPoly::t().mul(&UniPoly::t()))
        );
    }

    #[test]
    fn sturm_counts_roots() {
        // (t - 1)(t + 2) has roots 1 and -2
        let f = p(&[-2, 1, 1]);
        assert_eq!(f.sturm_roots_in(&rat_int(-3), &rat_int(2)), 2);
        assert_eq!(f.sturm_roots_in(&rat_int(0), &rat(1, 2)), 0);
        assert_eq!(f.sturm_roots_in(&rat(1, 2), &rat_int(2)), 1);
    }

    #[test]
    fn root_free_interval_avoids_roots() {
        let f = p(&[-1, 0, 1]); // t^2 - 1, roots +-1
        let (a, b) = root_free_interval(&f, &rat_int(0));
        assert!(a < rat_int(0) && rat_int(0) < b);
        assert_eq!(f.sturm_roots_in(&a, &b), 0);
    }
}
