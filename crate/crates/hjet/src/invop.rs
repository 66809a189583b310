//! Ordinary differential operators along a polynomial curve, with
//! rational-function coefficients in t: the linearization of the tangency
//! operator, formal adjoints, composition, and the order-q right inverse
//! obtained by solving S o N_u = Id.

// Operator names follow the established notation (L, N, S, M, R, Lambda).
#![allow(non_snake_case)]

use num_traits::Zero;

use crate::error::{HjetError, Result};
use crate::exactalg::matrix::ExactMatrix;
use crate::exactalg::poly::MultiPoly;
use crate::exactalg::unipoly::{root_free_interval, RatFunc, UniPoly};
use crate::exactalg::{binomial, Rational};
use crate::geometry::Distribution;
use crate::jets::PolyCurve;
use crate::regmat::is_W_regular;

type RfMatrix = ExactMatrix<RatFunc>;

fn rf_zeros(rows: usize, cols: usize) -> RfMatrix {
    ExactMatrix::filled(rows, cols, RatFunc::zero())
}

fn rf_identity(n: usize) -> RfMatrix {
    ExactMatrix::from_fn(n, n, |i, j| {
        if i == j {
            RatFunc::one()
        } else {
            RatFunc::zero()
        }
    })
}

/// matmul that tolerates empty operands (ExactMatrix::matmul needs a
/// sample entry to exist).
fn rf_matmul(a: &RfMatrix, b: &RfMatrix) -> RfMatrix {
    assert_eq!(a.cols(), b.rows());
    ExactMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = RatFunc::zero();
        for k in 0..a.cols() {
            if a.get(i, k).is_zero() || b.get(k, j).is_zero() {
                continue;
            }
            acc = acc.add(&a.get(i, k).mul(b.get(k, j)));
        }
        acc
    })
}

fn rf_map(a: &RfMatrix, mut f: impl FnMut(&RatFunc) -> RatFunc) -> RfMatrix {
    ExactMatrix::from_fn(a.rows(), a.cols(), |i, j| f(a.get(i, j)))
}

fn rf_derivative(a: &RfMatrix) -> RfMatrix {
    rf_map(a, |e| e.derivative())
}

/// Linear ordinary differential operator sum_i S^i(t) d_t^i acting on
/// vector functions, with b x a rational-function coefficient matrices.
#[derive(Clone, Debug)]
pub struct DiffOp {
    target: usize,
    source: usize,
    coeffs: Vec<RfMatrix>,
}

impl DiffOp {
    pub fn new(target: usize, source: usize, coeffs: Vec<RfMatrix>) -> Self {
        assert!(!coeffs.is_empty(), "operator needs at least one level");
        for c in &coeffs {
            assert_eq!(c.rows(), target);
            assert_eq!(c.cols(), source);
        }
        DiffOp {
            target,
            source,
            coeffs,
        }
    }

    pub fn identity(n: usize) -> Self {
        DiffOp::new(n, n, vec![rf_identity(n)])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn target_dim(&self) -> usize {
        self.target
    }

    pub fn source_dim(&self) -> usize {
        self.source
    }

    pub fn coeff(&self, i: usize) -> &RfMatrix {
        &self.coeffs[i]
    }

    /// (S f)(t) = sum_i S^i(t) f^(i)(t).
    pub fn apply(&self, f: &[RatFunc]) -> Result<Vec<RatFunc>> {
        if f.len() != self.source {
            return Err(HjetError::ArityMismatch {
                expected: self.source,
                got: f.len(),
            });
        }
        let mut out = vec![RatFunc::zero(); self.target];
        let mut der: Vec<RatFunc> = f.to_vec();
        for s in &self.coeffs {
            for (i, o) in out.iter_mut().enumerate() {
                for j in 0..self.source {
                    if s.get(i, j).is_zero() || der[j].is_zero() {
                        continue;
                    }
                    *o = o.add(&s.get(i, j).mul(&der[j]));
                }
            }
            der = der.iter().map(|e| e.derivative()).collect();
        }
        Ok(out)
    }

    /// Largest dyadic interval around t0 on which every coefficient
    /// denominator stays nonzero.
    pub fn working_interval(&self, t0: &Rational) -> Result<(Rational, Rational)> {
        let mut den = UniPoly::one();
        for c in &self.coeffs {
            for i in 0..c.rows() {
                for j in 0..c.cols() {
                    let d = c.get(i, j).den();
                    if Zero::is_zero(&d.eval(t0)) {
                        return Err(HjetError::Precondition(
                            "coefficient denominator vanishes at t0".into(),
                        ));
                    }
                    if d.degree() > 0 {
                        den = den.mul(d);
                    }
                }
            }
        }
        Ok(root_free_interval(&den, t0))
    }
}

fn to_unipoly(p: &MultiPoly) -> UniPoly {
    assert_eq!(p.nvars(), 1, "expected a univariate polynomial");
    let mut coeffs = vec![<Rational as Zero>::zero(); p.total_degree() + 1];
    for (e, c) in p.terms() {
        coeffs[e[0] as usize] = c.clone();
    }
    UniPoly::new(coeffs)
}

/// f(u(t)) as a univariate polynomial, by direct substitution.
fn compose_with_curve(f: &MultiPoly, u: &PolyCurve) -> UniPoly {
    let comps: Vec<UniPoly> = u.comps().iter().map(to_unipoly).collect();
    let mut acc = UniPoly::zero();
    for (e, c) in f.terms() {
        let mut term = UniPoly::constant(c.clone());
        for (i, &exp) in e.iter().enumerate() {
            for _ in 0..exp {
                term = term.mul(&comps[i]);
            }
        }
        acc = acc.add(&term);
    }
    acc
}

/// Linearization of the tangency operator along u: the order-1 operator
/// L_u = L0 + L1 d_t with L1 = (lambda^s_mu o u) and
/// L0 = ((d_mu lambda^s_nu o u) d_t u^nu).
pub fn linearization(d: &Distribution, u: &PolyCurve) -> Result<DiffOp> {
    if u.arity() != d.dim() {
        return Err(HjetError::ArityMismatch {
            expected: d.dim(),
            got: u.arity(),
        });
    }
    let p = d.corank();
    let n = d.dim();
    let udot: Vec<UniPoly> = u
        .comps()
        .iter()
        .map(|c| to_unipoly(c).derivative())
        .collect();
    let l1 = ExactMatrix::from_fn(p, n, |s, mu| {
        RatFunc::from_poly(compose_with_curve(d.coframe()[s].comp(mu), u))
    });
    let l0 = ExactMatrix::from_fn(p, n, |s, mu| {
        let mut acc = UniPoly::zero();
        for (nu, ud) in udot.iter().enumerate() {
            let w = d.coframe()[s].comp(nu).derivative(mu);
            if w.num_terms() == 0 || ud.is_zero() {
                continue;
            }
            acc = acc.add(&compose_with_curve(&w, u).mul(ud));
        }
        RatFunc::from_poly(acc)
    });
    Ok(DiffOp::new(p, n, vec![l0, l1]))
}

/// Leibniz composition: S^m d^m o R^j d^j contributes
/// C(m,k) S^m (d^{m-k} R^j) at level k + j.
pub fn op_compose(s: &DiffOp, r: &DiffOp) -> Result<DiffOp> {
    if s.source_dim() != r.target_dim() {
        return Err(HjetError::DimensionMismatch(format!(
            "compose: source {} vs target {}",
            s.source_dim(),
            r.target_dim()
        )));
    }
    let order = s.order() + r.order();
    let mut out = vec![rf_zeros(s.target_dim(), r.source_dim()); order + 1];
    for m in 0..=s.order() {
        for j in 0..=r.order() {
            let mut der = r.coeff(j).clone();
            for step in 0..=m {
                let k = m - step;
                let c = binomial(m, k as isize);
                if !Zero::is_zero(&c) {
                    let contrib = rf_map(&rf_matmul(s.coeff(m), &der), |e| e.scale(&c));
                    let cur = &out[k + j];
                    let updated = ExactMatrix::from_fn(cur.rows(), cur.cols(), |i, l| {
                        cur.get(i, l).add(contrib.get(i, l))
                    });
                    out[k + j] = updated;
                }
                if step < m {
                    der = rf_derivative(&der);
                }
            }
        }
    }
    Ok(DiffOp::new(s.target_dim(), r.source_dim(), out))
}

/// Formal adjoint: (sum_i S^i d^i)^dagger f = sum_i (-1)^i d^i((S^i)^T f),
/// so coefficient k of the adjoint is
/// sum_{i >= k} (-1)^i C(i,k) d^{i-k}((S^i)^T).
pub fn op_adjoint(s: &DiffOp) -> DiffOp {
    let q = s.order();
    let mut out = vec![rf_zeros(s.source_dim(), s.target_dim()); q + 1];
    for i in 0..=q {
        let sign = if i % 2 == 0 {
            Rational::from_integer(1.into())
        } else {
            Rational::from_integer((-1).into())
        };
        let mut der = s.coeff(i).transpose();
        for step in 0..=i {
            let k = i - step;
            let c = binomial(i, k as isize) * &sign;
            let cur = &out[k];
            let updated = ExactMatrix::from_fn(cur.rows(), cur.cols(), |a, b| {
                cur.get(a, b).add(&der.get(a, b).scale(&c))
            });
            out[k] = updated;
            if step < i {
                der = rf_derivative(&der);
            }
        }
    }
    DiffOp::new(s.source_dim(), s.target_dim(), out)
}

/// R_u(t) and Lambda(t) along the curve, as polynomial matrices.
fn curve_R_Lambda(d: &Distribution, u: &PolyCurve) -> Result<(RfMatrix, RfMatrix)> {
    let l = linearization(d, u)?;
    let lam = l.coeff(1).clone();
    // R_u = d_t Lambda - L0, entrywise dlambda^s(d_t u, d_mu).
    let r = ExactMatrix::from_fn(lam.rows(), lam.cols(), |i, j| {
        l.coeff(1).get(i, j).derivative().sub(l.coeff(0).get(i, j))
    });
    Ok((r, lam))
}

/// A(t): the regularity matrix with blocks
/// block(k, m) = C(m,k) d^{m-k} R_u + C(m,k-1) d^{m+1-k} Lambda,
/// as rational functions of t along the curve.
pub fn curve_regularity_matrix(
    d: &Distribution,
    u: &PolyCurve,
    q: usize,
) -> Result<RfMatrix> {
    let p = d.corank();
    let n = d.dim();
    let (r0, l0) = curve_R_Lambda(d, u)?;
    let mut r_levels = vec![r0];
    for k in 1..=q {
        r_levels.push(rf_derivative(&r_levels[k - 1]));
    }
    let mut l_levels = vec![l0];
    for k in 1..=q + 1 {
        l_levels.push(rf_derivative(&l_levels[k - 1]));
    }
    let mut a = rf_zeros(p * (q + 2), n * (q + 1));
    for k in 0..=q + 1 {
        for m in 0..=q {
            if k > m + 1 {
                continue;
            }
            let c_r = binomial(m, k as isize);
            let c_l = binomial(m, k as isize - 1);
            for i in 0..p {
                for j in 0..n {
                    let mut e = RatFunc::zero();
                    if !Zero::is_zero(&c_r) {
                        e = e.add(&r_levels[m - k].get(i, j).scale(&c_r));
                    }
                    if !Zero::is_zero(&c_l) {
                        e = e.add(&l_levels[m + 1 - k].get(i, j).scale(&c_l));
                    }
                    a.set(k * p + i, m * n + j, e);
                }
            }
        }
    }
    Ok(a)
}

/// Gaussian elimination of A(t) X = B over the rational-function field.
/// Pivot rule: eligible entries are nonzero at t0; among those pick the
/// minimal combined degree, tie-broken leftmost. Free unknowns are set to
/// zero, which makes the solution deterministic.
fn solve_linear_rf(
    a: &RfMatrix,
    b: &RfMatrix,
    t0: &Rational,
) -> Result<RfMatrix> {
    let rows = a.rows();
    let cols = a.cols();
    assert_eq!(b.rows(), rows);
    let mut m = a.clone();
    let mut rhs = b.clone();
    let mut pivot_col_of_row = vec![usize::MAX; rows];
    let mut used = vec![false; cols];
    for r in 0..rows {
        let mut best: Option<(usize, usize)> = None; // (degree, col)
        for c in 0..cols {
            if used[c] {
                continue;
            }
            let e = m.get(r, c);
            if e.is_zero() {
                continue;
            }
            match e.eval(t0) {
                Some(v) if !Zero::is_zero(&v) => {}
                _ => continue,
            }
            let deg = e.num().degree() + e.den().degree();
            if best.map_or(true, |(bd, _)| deg < bd) {
                best = Some((deg, c));
            }
        }
        let (_, pc) = best.ok_or_else(|| {
            HjetError::NotRegular(format!(
                "no admissible pivot at t0 in equation {r}"
            ))
        })?;
        used[pc] = true;
        pivot_col_of_row[r] = pc;
        let piv = m.get(r, pc).clone();
        for r2 in 0..rows {
            if r2 == r || m.get(r2, pc).is_zero() {
                continue;
            }
            let factor = m.get(r2, pc).div(&piv);
            for c in 0..cols {
                let v = m.get(r2, c).sub(&factor.mul(m.get(r, c)));
                m.set(r2, c, v);
            }
            for c in 0..rhs.cols() {
                let v = rhs.get(r2, c).sub(&factor.mul(rhs.get(r, c)));
                rhs.set(r2, c, v);
            }
        }
    }
    let mut x = rf_zeros(cols, rhs.cols());
    for r in 0..rows {
        let pc = pivot_col_of_row[r];
        let piv = m.get(r, pc).clone();
        for c in 0..rhs.cols() {
            x.set(pc, c, rhs.get(r, c).div(&piv));
        }
    }
    Ok(x)
}

/// Solve S o N_u = Id for the order-q operator S (target p, source N),
/// where N_u is the formal adjoint of the linearization. The block system
/// is A(t) X = -E with X the stacked transposes of the S^m and E the
/// identity over zeros; pivots are chosen nonzero at t0, so the identity
/// holds on an interval around t0.
pub fn solve_S(d: &Distribution, u: &PolyCurve, t0: &Rational, q: usize) -> Result<DiffOp> {
    let p = d.corank();
    let n = d.dim();
    let jet = u.jet(t0, q + 1);
    let verdict = is_W_regular(d, &jet, q)?;
    if !verdict.regular {
        return Err(HjetError::NotRegular(format!(
            "rank {} of {} required at t0, first derivative nonzero: {}",
            verdict.rank, verdict.required_rank, verdict.first_derivative_nonzero
        )));
    }
    let a = curve_regularity_matrix(d, u, q)?;
    let rhs = ExactMatrix::from_fn(p * (q + 2), p, |i, j| {
        if i == j {
            RatFunc::constant(Rational::from_integer((-1).into()))
        } else {
            RatFunc::zero()
        }
    });
    let x = solve_linear_rf(&a, &rhs, t0)?;
    let coeffs: Vec<RfMatrix> = (0..=q)
        .map(|m| ExactMatrix::from_fn(p, n, |i, j| x.get(m * n + j, i).clone()))
        .collect();
    Ok(DiffOp::new(p, n, coeffs))
}

/// The order-q right inverse M_u = (solve_S)^dagger of the linearization:
/// L_u o M_u = Id on the working interval.
pub fn build_M(d: &Distribution, u: &PolyCurve, t0: &Rational, q: usize) -> Result<DiffOp> {
    Ok(op_adjoint(&solve_S(d, u, t0, q)?))
}
