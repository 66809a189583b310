//! Truncated power series with coefficients in an exact scalar ring.
//!
//! The carrier for k-th derivatives of composites like (f ∘ u) u': we
//! expand everything to the needed order around the base parameter and
//! read off coefficients. All operations are exact modulo t^{d+1}.

use super::poly::MultiPoly;
use super::{factorial, Rational, Scalar};
use crate::error::{HjetError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S: Scalar> {
    /// c_0 .. c_d; the length fixes the truncation order d.
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty());
        TruncatedSeries { coeffs }
    }

    pub fn constant(c: S, order: usize) -> Self {
        let z = c.zero();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// k! * c_k, i.e. the k-th derivative at the expansion point.
    pub fn derivative_value(&self, k: usize) -> S {
        self.coeffs[k].scale(&factorial(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order(), "series order mismatch");
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order(), "series order mismatch");
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order(), "series order mismatch");
        let d = self.order();
        let zero = self.coeffs[0].zero();
        let mut out = vec![zero; d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > d {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
        }
    }

    /// Formal derivative; lowers the truncation order by one.
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 series");
        TruncatedSeries {
            coeffs: (1..self.coeffs.len())
                .map(|k| self.coeffs[k].scale(&Rational::from_integer(k.into())))
                .collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }
}

/// Taylor expansion of f(u(t)) to the common truncation order of the u
/// components. The coefficient of t^k depends only on c_0..c_k of u.
pub fn series_compose<S: Scalar>(
    f: &MultiPoly,
    u: &[TruncatedSeries<S>],
) -> Result<TruncatedSeries<S>> {
    if f.nvars() != u.len() {
        return Err(HjetError::ArityMismatch {
            expected: f.nvars(),
            got: u.len(),
        });
    }
    assert!(!u.is_empty());
    let d = u[0].order();
    for s in u {
        assert_eq!(s.order(), d, "series order mismatch");
    }
    let zero_s = u[0].coeff(0).zero();

    // Cache powers of each component up to the degree f actually uses.
    let mut powers: Vec<Vec<TruncatedSeries<S>>> = u
        .iter()
        .map(|s| vec![TruncatedSeries::constant(zero_s.one(), d), s.clone()])
        .collect();
    for (i, comp_powers) in powers.iter_mut().enumerate() {
        let need = f.degree_in(i);
        while comp_powers.len() <= need {
            let next = comp_powers.last().unwrap().mul(&u[i]);
            comp_powers.push(next);
        }
    }

    let mut acc = TruncatedSeries::constant(zero_s.clone(), d);
    for (exps, coeff) in f.terms() {
        let mut term = TruncatedSeries::constant(zero_s.from_rational(coeff), d);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                term = term.mul(&powers[i][e as usize]);
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::var_set;
    use crate::exactalg::{rat, rat_int};
    use num_traits::{One, Zero};

    fn series(coeffs: &[Rational]) -> TruncatedSeries<Rational> {
        TruncatedSeries::from_coeffs(coeffs.to_vec())
    }

    #[test]
    fn compose_projection() {
        let vs = var_set("y", 1);
        let f = MultiPoly::var(&vs, 0);
        let t = series(&[<Rational as Zero>::zero(), <Rational as One>::one(), <Rational as Zero>::zero()]);
        let out = series_compose(&f, &[t.clone()]).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn compose_product() {
        // f = y1*y2, u = (t, 1+t), d = 2  ->  t + t^2
        let vs = var_set("y", 2);
        let f = MultiPoly::var(&vs, 0).mul_poly(&MultiPoly::var(&vs, 1));
        let u1 = series(&[rat_int(0), rat_int(1), rat_int(0)]);
        let u2 = series(&[rat_int(1), rat_int(1), rat_int(0)]);
        let out = series_compose(&f, &[u1, u2]).unwrap();
        assert_eq!(out, series(&[rat_int(0), rat_int(1), rat_int(1)]));
    }

    #[test]
    fn compose_square_of_exp_jet() {
        // f = y1^2, u1 = 1 + t + t^2/2, d = 2  ->  1 + 2t + 2t^2
        let vs = var_set("y", 1);
        let f = MultiPoly::var(&vs, 0).pow(2);
        let u1 = series(&[rat_int(1), rat_int(1), rat(1, 2)]);
        let out = series_compose(&f, &[u1]).unwrap();
        assert_eq!(out, series(&[rat_int(1), rat_int(2), rat_int(2)]));
    }

    #[test]
    fn compose_arity_mismatch() {
        let vs = var_set("y", 2);
        let f = MultiPoly::var(&vs, 0);
        let u1 = series(&[rat_int(0), rat_int(1)]);
        assert!(series_compose(&f, &[u1]).is_err());
    }

    #[test]
    fn derivative_lowers_order() {
        let s = series(&[rat_int(1), rat_int(2), rat_int(3)]);
        let d = s.derivative();
        assert_eq!(d, series(&[rat_int(2), rat_int(6)]));
        assert_eq!(d.order(), 1);
    }

    /// Independent oracle: coefficient k of the composition must agree
    /// with repeated formal differentiation of the substituted
    /// polynomial, for k <= 5.
    #[test]
    fn compose_matches_symbolic_substitution() {
        let vs = var_set("y", 2);
        let tset = var_set("t", 1);
        // f = y1^2 y2 + 3 y2
        let f = MultiPoly::var(&vs, 0)
            .pow(2)
            .mul_poly(&MultiPoly::var(&vs, 1))
            .add_poly(&MultiPoly::var(&vs, 1).scale_poly(&rat_int(3)));
        // u = (1 + 2t + t^2, -1 + t^3) as polynomials in t
        let t = MultiPoly::var(&tset, 0);
        let u1p = MultiPoly::one(&tset)
            .add_poly(&t.scale_poly(&rat_int(2)))
            .add_poly(&t.pow(2));
        let u2p = MultiPoly::constant(&tset, rat_int(-1)).add_poly(&t.pow(3));
        // substitute symbolically
        let subst = {
            let mut acc = MultiPoly::zero(&tset);
            for (e, c) in f.terms() {
                let mut term = MultiPoly::constant(&tset, c.clone());
                term = term.mul_poly(&u1p.pow(e[0] as u32));
                term = term.mul_poly(&u2p.pow(e[1] as u32));
                acc = acc.add_poly(&term);
            }
            acc
        };
        // series route
        let d = 5usize;
        let to_series = |p: &MultiPoly| {
            let mut coeffs = vec![<Rational as Zero>::zero(); d + 1];
            for (e, c) in p.terms() {
                if (e[0] as usize) <= d {
                    coeffs[e[0] as usize] = c.clone();
                }
            }
            TruncatedSeries::from_coeffs(coeffs)
        };
        let out = series_compose(&f, &[to_series(&u1p), to_series(&u2p)]).unwrap();
        // repeated formal differentiation oracle
        let mut g = subst;
        for k in 0..=5usize {
            let expect = g.eval(&[<Rational as Zero>::zero()]);
            assert_eq!(out.derivative_value(k), expect, "derivative {k}");
            g = g.derivative(0);
        }
    }
}
