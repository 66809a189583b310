//! The regularity matrix A of a curve jet and the weak-regularity
//! predicates built on its rank.

// Operator and matrix names follow the established notation (A, R, Lambda, W).
#![allow(non_snake_case)]

use num_traits::Zero;
use rand::Rng;

use crate::error::{HjetError, Result};
use crate::exactalg::matrix::{exact_rank, rank_probabilistic, ExactMatrix};
use crate::exactalg::poly::MultiPoly;
use crate::exactalg::series::{series_compose, TruncatedSeries};
use crate::exactalg::{binomial, Rational, Scalar};
use crate::geometry::{Distribution, OneForm};
use crate::jets::{pullback_jet, CurveJet};

/// A is p(q+2) x N(q+1), assembled from p x N blocks
/// block(k, m) = C(m,k) d_t^{m-k} R_u + C(m,k-1) d_t^{m-k+1} Lambda,
/// where R_u(t) = (dlambda^s(d_t u, d_mu)) and Lambda(t) = (lambda^s_mu o u).
/// The rule makes block(m+1, m) = Lambda and block(k, m) = 0 for k > m + 1.
#[derive(Clone, Debug)]
pub struct RegularityMatrix<S: Scalar> {
    p: usize,
    n_dim: usize,
    q: usize,
    mat: ExactMatrix<S>,
}

impl<S: Scalar> RegularityMatrix<S> {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn matrix(&self) -> &ExactMatrix<S> {
        &self.mat
    }

    /// p x N block at row-block k, column-block m.
    pub fn block(&self, k: usize, m: usize) -> ExactMatrix<S> {
        assert!(k <= self.q + 1 && m <= self.q, "block index out of range");
        ExactMatrix::from_fn(self.p, self.n_dim, |i, j| {
            self.mat.get(k * self.p + i, m * self.n_dim + j).clone()
        })
    }
}

fn check_jet_order<S: Scalar>(jet: &CurveJet<S>, need: usize) -> Result<()> {
    if jet.order() < need {
        return Err(HjetError::InsufficientJetOrder {
            need,
            got: jet.order(),
        });
    }
    Ok(())
}

fn jet_series<S: Scalar>(jet: &CurveJet<S>, order: usize) -> Vec<TruncatedSeries<S>> {
    let factorials: Vec<Rational> = {
        let mut f = vec![crate::exactalg::factorial(0)];
        for k in 1..=order {
            f.push(&f[k - 1] * Rational::from_integer(k.into()));
        }
        f
    };
    (0..jet.arity())
        .map(|mu| {
            TruncatedSeries::from_coeffs(
                (0..=order)
                    .map(|k| jet.deriv(k)[mu].scale(&factorials[k].recip()))
                    .collect(),
            )
        })
        .collect()
}

/// d_t^k R_u at t0 for k = 0..=k_max, with R_u entry
/// (s, mu) = dlambda^s(d_t u(t), d_mu)|_{u(t)}. Level k consumes exactly
/// the (k+1)-jet of u.
pub fn block_R_derivatives<S: Scalar>(
    coframe: &[OneForm],
    jet: &CurveJet<S>,
    k_max: usize,
) -> Result<Vec<ExactMatrix<S>>> {
    check_jet_order(jet, k_max + 1)?;
    let n = jet.arity();
    for l in coframe {
        if l.arity() != n {
            return Err(HjetError::ArityMismatch {
                expected: l.arity(),
                got: n,
            });
        }
    }
    let proto = jet.deriv(0)[0].zero();
    let u = jet_series(jet, k_max + 1);
    let u_tr: Vec<TruncatedSeries<S>> = u.iter().map(|s| s.truncate(k_max)).collect();
    let udot: Vec<TruncatedSeries<S>> = u.iter().map(|s| s.derivative()).collect();
    let p = coframe.len();
    let mut per_entry = vec![vec![TruncatedSeries::constant(proto.clone(), k_max); n]; p];
    for (s, l) in coframe.iter().enumerate() {
        for mu in 0..n {
            let mut g = TruncatedSeries::constant(proto.clone(), k_max);
            for nu in 0..n {
                // dlambda(d_t u, d_mu) = sum_nu u'^nu (d_nu l_mu - d_mu l_nu)
                let w = l.comp(mu).derivative(nu).sub_poly(&l.comp(nu).derivative(mu));
                if w.num_terms() == 0 {
                    continue;
                }
                g = g.add(&series_compose(&w, &u_tr)?.mul(&udot[nu]));
            }
            per_entry[s][mu] = g;
        }
    }
    Ok((0..=k_max)
        .map(|k| ExactMatrix::from_fn(p, n, |s, mu| per_entry[s][mu].derivative_value(k)))
        .collect())
}

/// d_t^k Lambda at t0 for k = 0..=k_max, with Lambda entry
/// (s, mu) = lambda^s_mu(u(t)). Level k consumes exactly the k-jet of u.
pub fn block_Lambda_derivatives<S: Scalar>(
    coframe: &[OneForm],
    jet: &CurveJet<S>,
    k_max: usize,
) -> Result<Vec<ExactMatrix<S>>> {
    check_jet_order(jet, k_max)?;
    let n = jet.arity();
    for l in coframe {
        if l.arity() != n {
            return Err(HjetError::ArityMismatch {
                expected: l.arity(),
                got: n,
            });
        }
    }
    let u = jet_series(jet, k_max);
    let p = coframe.len();
    let mut per_entry = Vec::with_capacity(p);
    for l in coframe {
        let mut row = Vec::with_capacity(n);
        for mu in 0..n {
            row.push(series_compose(l.comp(mu), &u)?);
        }
        per_entry.push(row);
    }
    Ok((0..=k_max)
        .map(|k| ExactMatrix::from_fn(p, n, |s, mu| per_entry[s][mu].derivative_value(k)))
        .collect())
}

/// Assemble A from the closed-form block rule. Requires jet order q + 1.
pub fn build_A<S: Scalar>(
    d: &Distribution,
    jet: &CurveJet<S>,
    q: usize,
) -> Result<RegularityMatrix<S>> {
    check_jet_order(jet, q + 1)?;
    if jet.arity() != d.dim() {
        return Err(HjetError::ArityMismatch {
            expected: d.dim(),
            got: jet.arity(),
        });
    }
    let p = d.corank();
    let n_dim = d.dim();
    let r_levels = block_R_derivatives(d.coframe(), jet, q)?;
    let l_levels = block_Lambda_derivatives(d.coframe(), jet, q + 1)?;
    let proto = jet.deriv(0)[0].zero();
    let mut mat = ExactMatrix::filled(p * (q + 2), n_dim * (q + 1), proto.clone());
    for k in 0..=q + 1 {
        for m in 0..=q {
            if k > m + 1 {
                continue;
            }
            let c_r = binomial(m, k as isize);
            let c_l = binomial(m, k as isize - 1);
            for i in 0..p {
                for j in 0..n_dim {
                    let mut e = proto.zero();
                    if !Zero::is_zero(&c_r) {
                        e = e.add(&r_levels[m - k].get(i, j).scale(&c_r));
                    }
                    if !Zero::is_zero(&c_l) {
                        e = e.add(&l_levels[m + 1 - k].get(i, j).scale(&c_l));
                    }
                    mat.set(k * p + i, m * n_dim + j, e);
                }
            }
        }
    }
    Ok(RegularityMatrix { p, n_dim, q, mat })
}

/// Verdict of a weak-regularity test: rank is exact for rational jets and
/// a certified lower bound for symbolic jets, with the failure bound of
/// the randomized check reported.
#[derive(Clone, Debug)]
pub struct RegularityVerdict {
    pub regular: bool,
    pub rank: usize,
    pub required_rank: usize,
    pub first_derivative_nonzero: bool,
    pub probabilistic: bool,
    pub failure_probability: Option<Rational>,
}

fn check_q_threshold(d: &Distribution, q: usize) -> Result<()> {
    let p = d.corank();
    let n = d.dim() - p;
    if n * q + n < p {
        return Err(HjetError::QBelowThreshold { q, n, p });
    }
    Ok(())
}

/// Weak regularity at level q: D^1 nonzero and rank A = p(q+2), with A
/// built from the (q+1)-truncation of the jet.
pub fn is_W_regular(
    d: &Distribution,
    jet: &CurveJet<Rational>,
    q: usize,
) -> Result<RegularityVerdict> {
    check_q_threshold(d, q)?;
    check_jet_order(jet, q + 1)?;
    let a = build_A(d, &jet.truncate(q + 1), q)?;
    let rank = exact_rank(a.matrix());
    let required_rank = d.corank() * (q + 2);
    let d1_nonzero = jet.deriv(1).iter().any(|c| !Zero::is_zero(c));
    Ok(RegularityVerdict {
        regular: d1_nonzero && rank == required_rank,
        rank,
        required_rank,
        first_derivative_nonzero: d1_nonzero,
        probabilistic: false,
        failure_probability: None,
    })
}

/// Weak regularity for a symbolic jet: the rank clause is certified as a
/// lower bound by randomized evaluation, so `regular = true` is reliable
/// up to D^1 genericity while `regular = false` may be a false negative
/// with the reported probability.
pub fn is_W_regular_symbolic(
    d: &Distribution,
    jet: &CurveJet<MultiPoly>,
    q: usize,
    trials: usize,
    bound: u64,
    rng: &mut impl Rng,
) -> Result<RegularityVerdict> {
    check_q_threshold(d, q)?;
    check_jet_order(jet, q + 1)?;
    let a = build_A(d, &jet.truncate(q + 1), q)?;
    let pr = rank_probabilistic(a.matrix(), trials, bound, rng);
    let required_rank = d.corank() * (q + 2);
    let d1_nonzero = jet.deriv(1).iter().any(|c| !Scalar::is_zero(c));
    Ok(RegularityVerdict {
        regular: d1_nonzero && pr.rank_lower_bound == required_rank,
        rank: pr.rank_lower_bound,
        required_rank,
        first_derivative_nonzero: d1_nonzero,
        probabilistic: true,
        failure_probability: Some(pr.failure_probability),
    })
}

/// Membership verdict for the tangency-plus-regularity class, with the
/// failed clause when negative.
#[derive(Clone, Debug)]
pub struct WAlphaVerdict {
    pub member: bool,
    pub reason: Option<&'static str>,
    pub regularity: Option<RegularityVerdict>,
}

/// Membership in the order-alpha class: the pullback jet vanishes through
/// order alpha and the (q+1)-truncation is weakly regular. Requires
/// alpha >= 2q.
pub fn is_in_W_alpha(
    d: &Distribution,
    jet: &CurveJet<Rational>,
    alpha: usize,
    q: usize,
) -> Result<WAlphaVerdict> {
    if alpha < 2 * q {
        return Err(HjetError::AlphaBelowThreshold {
            alpha,
            min: 2 * q,
        });
    }
    check_jet_order(jet, alpha + 1)?;
    let pb = pullback_jet(d.coframe(), &jet.truncate(alpha + 1))?;
    let tangent = pb.iter().all(|row| row.iter().all(|e| Zero::is_zero(e)));
    if !tangent {
        return Ok(WAlphaVerdict {
            member: false,
            reason: Some("tangency"),
            regularity: None,
        });
    }
    let reg = is_W_regular(d, jet, q)?;
    if !reg.regular {
        return Ok(WAlphaVerdict {
            member: false,
            reason: Some("rank"),
            regularity: Some(reg),
        });
    }
    Ok(WAlphaVerdict {
        member: true,
        reason: None,
        regularity: Some(reg),
    })
}

/// Smallest q >= 0 with n q >= p - n.
pub fn min_q(n: usize, p: usize) -> usize {
    assert!(n >= 1);
    if p <= n {
        return 0;
    }
    // ceil((p - n) / n)
    (p - n).div_ceil(n)
}

/// The linear system S o R_u = Id is underdetermined iff n q > p - n.
pub fn underdetermined(n: usize, p: usize, q: usize) -> bool {
    n * q + n > p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::{var_set, MultiPoly};
    use crate::exactalg::{rat, rat_int};
    use crate::geometry::OneForm;
    use crate::jets::{tangency_solve, PolyCurve};
    use crate::samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn contact_curve_jet(order: usize) -> CurveJet<Rational> {
        let t = MultiPoly::var(&var_set("t", 1), 0);
        let u = PolyCurve::new(vec![t.clone(), t.clone(), t.pow(2).scale_poly(&rat(1, 2))]);
        u.jet(&rat_int(0), order)
    }

    #[test]
    fn contact_R_and_Lambda_levels() {
        let d = samples::contact_r3();
        let jet = contact_curve_jet(2);
        let r = block_R_derivatives(d.coframe(), &jet, 1).unwrap();
        assert_eq!(
            (0..3).map(|j| r[0].get(0, j).clone()).collect::<Vec<_>>(),
            vec![rat_int(-1), rat_int(1), rat_int(0)]
        );
        let l = block_Lambda_derivatives(d.coframe(), &jet, 1).unwrap();
        assert_eq!(
            (0..3).map(|j| l[0].get(0, j).clone()).collect::<Vec<_>>(),
            vec![rat_int(0), rat_int(0), rat_int(1)]
        );
        // d_t Lambda = (-y'(t), 0, 0) = (-1, 0, 0) at 0
        assert_eq!(
            (0..3).map(|j| l[1].get(0, j).clone()).collect::<Vec<_>>(),
            vec![rat_int(-1), rat_int(0), rat_int(0)]
        );
    }

    #[test]
    fn flat_coframe_has_zero_R() {
        // lambda = dy3 on Q^3: dlambda = 0, so every R level vanishes.
        let vs = var_set("y", 3);
        let mut comps = vec![MultiPoly::zero(&vs); 3];
        comps[2] = MultiPoly::one(&vs);
        let coframe = [OneForm::new(comps)];
        let jet = contact_curve_jet(3);
        for lev in block_R_derivatives(&coframe, &jet, 2).unwrap() {
            assert!(lev.is_zero_matrix());
        }
    }

    #[test]
    fn constant_coframe_lambda_levels_vanish_above_zero() {
        let vs = var_set("y", 3);
        let mut comps = vec![MultiPoly::zero(&vs); 3];
        comps[2] = MultiPoly::one(&vs);
        let coframe = [OneForm::new(comps)];
        let jet = contact_curve_jet(3);
        let levels = block_Lambda_derivatives(&coframe, &jet, 3).unwrap();
        for lev in &levels[1..] {
            assert!(lev.is_zero_matrix());
        }
    }

    #[test]
    fn constant_curve_lambda_levels_vanish_above_zero() {
        let d = samples::engel_r4();
        let jet = CurveJet::new(
            rat_int(0),
            vec![vec![rat_int(1), rat_int(2), rat_int(3), rat_int(4)]; 4],
        );
        // overwrite derivatives above 0 with zeros
        let mut derivs = jet.derivs().to_vec();
        for d_k in derivs.iter_mut().skip(1) {
            for e in d_k.iter_mut() {
                *e = rat_int(0);
            }
        }
        let jet = CurveJet::new(rat_int(0), derivs);
        let levels = block_Lambda_derivatives(d.coframe(), &jet, 3).unwrap();
        for lev in &levels[1..] {
            assert!(lev.is_zero_matrix());
        }
    }

    #[test]
    fn build_A_contact_q0_matches_hand_matrix() {
        let d = samples::contact_r3();
        let jet = contact_curve_jet(1);
        let a = build_A(&d, &jet, 0).unwrap();
        assert_eq!(a.matrix().rows(), 2);
        assert_eq!(a.matrix().cols(), 3);
        let expect = [[-1i64, 1, 0], [0, 0, 1]];
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(*a.matrix().get(i, j), rat_int(expect[i][j]));
            }
        }
    }

    #[test]
    fn build_A_shape_and_lambda_subdiagonal() {
        let d = samples::engel_r4();
        let t = MultiPoly::var(&var_set("t", 1), 0);
        // horizontal curve along X2 flow direction starting at 0:
        // x = t, y = t^2 (w = 2t forced? keep it simple: use tangency_solve)
        let nk = d.dim() - d.corank();
        let mut fj = vec![rat_int(0); 4];
        fj[0] = rat_int(1);
        let free = vec![vec![rat(1, 2); nk]; 3];
        let jet = tangency_solve(&d, &fj, 3, &free).unwrap();
        drop(t);
        let q = 2;
        let a = build_A(&d, &jet, q).unwrap();
        let p = d.corank();
        assert_eq!(a.matrix().rows(), p * (q + 2));
        assert_eq!(a.matrix().cols(), d.dim() * (q + 1));
        let lam = block_Lambda_derivatives(d.coframe(), &jet, 0).unwrap();
        for m in 0..=q {
            let b = a.block(m + 1, m);
            assert_eq!(b, lam[0], "block ({}, {m}) must be Lambda", m + 1);
            for k in m + 2..=q + 1 {
                assert!(a.block(k, m).is_zero_matrix());
            }
        }
    }

    #[test]
    fn build_A_matches_display_for_small_q() {
        // Hand transcription of the displayed matrix for q = 1 and q = 2.
        let d = samples::contact_r3();
        let jet = contact_curve_jet(3);
        let r = block_R_derivatives(d.coframe(), &jet, 2).unwrap();
        let l = block_Lambda_derivatives(d.coframe(), &jet, 3).unwrap();
        let add = |a: &ExactMatrix<Rational>, b: &ExactMatrix<Rational>| {
            ExactMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) + b.get(i, j))
        };
        let sc = |a: &ExactMatrix<Rational>, c: i64| {
            ExactMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) * rat_int(c))
        };
        // q = 1:
        // [ R      d_t R        ]
        // [ L      R + d_t L    ]
        // [ 0      L            ]
        let a1 = build_A(&d, &jet, 1).unwrap();
        assert_eq!(a1.block(0, 0), r[0]);
        assert_eq!(a1.block(0, 1), r[1]);
        assert_eq!(a1.block(1, 0), l[0]);
        assert_eq!(a1.block(1, 1), add(&r[0], &l[1]));
        assert!(a1.block(2, 0).is_zero_matrix());
        assert_eq!(a1.block(2, 1), l[0]);
        // q = 2 top rows:
        // [ R    d_t R        d_t^2 R            ]
        // [ L    R + d_t L    2 d_t R + d_t^2 L  ]
        // [ 0    L            R + 2 d_t L        ]
        // [ 0    0            L                  ]
        let a2 = build_A(&d, &jet, 2).unwrap();
        assert_eq!(a2.block(0, 2), r[2]);
        assert_eq!(a2.block(1, 2), add(&sc(&r[1], 2), &l[2]));
        assert_eq!(a2.block(2, 2), add(&r[0], &sc(&l[1], 2)));
        assert_eq!(a2.block(3, 2), l[0]);
    }

    #[test]
    fn column_block_consumes_exactly_next_derivative() {
        // Changing D^{m+2} must leave column-blocks 0..=m unchanged and
        // change only higher column-blocks.
        let d = samples::contact_r3();
        let jet = contact_curve_jet(3);
        let mut derivs = jet.derivs().to_vec();
        derivs[3][0] += rat_int(5);
        let jet2 = CurveJet::new(rat_int(0), derivs);
        let a = build_A(&d, &jet, 2).unwrap();
        let b = build_A(&d, &jet2, 2).unwrap();
        for k in 0..=3 {
            for m in 0..=1 {
                assert_eq!(a.block(k, m), b.block(k, m), "low column-block changed");
            }
        }
        assert_ne!(a.block(0, 2), b.block(0, 2), "top row-block must see D^3");
    }

    #[test]
    fn contact_is_regular_at_q0() {
        let d = samples::contact_r3();
        let jet = contact_curve_jet(1);
        let v = is_W_regular(&d, &jet, 0).unwrap();
        assert!(v.regular);
        assert_eq!(v.rank, 2);
    }

    #[test]
    fn zero_first_derivative_is_never_regular() {
        let d = samples::contact_r3();
        let jet = CurveJet::new(rat_int(0), vec![vec![rat_int(0); 3]; 2]);
        let v = is_W_regular(&d, &jet, 0).unwrap();
        assert!(!v.regular);
        assert!(!v.first_derivative_nonzero);
    }

    #[test]
    fn integrable_structure_is_never_regular() {
        // dlambda = 0 kills the top row-block: rank <= p(q+1) < p(q+2).
        let d = samples::integrable_r3();
        let t = MultiPoly::var(&var_set("t", 1), 0);
        let u = PolyCurve::new(vec![t.clone(), t.pow(2), MultiPoly::zero(t.vars())]);
        for q in 0..3usize {
            let jet = u.jet(&rat_int(0), q + 1);
            let v = is_W_regular(&d, &jet, q).unwrap();
            assert!(!v.regular, "q = {q}");
            assert!(v.rank <= d.corank() * (q + 1));
        }
    }

    #[test]
    fn dlambda_regular_implies_regular_at_all_q() {
        // rank [R; L] = 2p at q = 0 propagates to every admissible q.
        let d = samples::contact_r3();
        let jet0 = contact_curve_jet(1);
        assert!(is_W_regular(&d, &jet0, 0).unwrap().regular);
        for q in 1..=3usize {
            let jet = contact_curve_jet(q + 1);
            assert!(is_W_regular(&d, &jet, q).unwrap().regular, "q = {q}");
        }
    }

    #[test]
    fn verdict_invariant_under_coframe_recombination() {
        // An invertible constant recombination of the coframe must not
        // change the regularity verdict.
        let d = samples::engel_r4();
        let nk = d.dim() - d.corank();
        let mut fj = vec![rat_int(0); 4];
        fj[0] = rat_int(1);
        let jet = tangency_solve(&d, &fj, 2, &vec![vec![rat(1, 3); nk]; 2]).unwrap();
        let verdicts: Vec<bool> = [
            vec![vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]],
            vec![vec![rat_int(2), rat_int(1)], vec![rat_int(1), rat_int(1)]],
            vec![vec![rat_int(0), rat_int(1)], vec![rat_int(-1), rat_int(3)]],
        ]
        .iter()
        .map(|m| {
            let coframe: Vec<OneForm> = (0..2)
                .map(|i| OneForm::combine(&m[i], d.coframe()))
                .collect();
            let d2 = Distribution::new(
                d.vars(),
                coframe,
                Some(d.generators().to_vec()),
                d.base().to_vec(),
            )
            .unwrap();
            is_W_regular(&d2, &jet, 1).unwrap().regular
        })
        .collect();
        assert!(verdicts.iter().all(|&v| v == verdicts[0]));
    }

    #[test]
    fn symbolic_rank_certifies_generic_regularity() {
        use crate::geometry::{adapted_frame, GrowthVector};
        use crate::jets::{symbolic_fiber, TauAssignment, TauLabel};
        let d = samples::contact_r3();
        let gv = GrowthVector::new(vec![0, 2, 3]).unwrap();
        let frame = adapted_frame(&d, &gv).unwrap();
        let mut tau = TauAssignment::zeros(1);
        tau.set(1, TauLabel::Tau(1, 1));
        let jet =
            symbolic_fiber(&d, &[rat_int(1), rat_int(1), rat_int(0)], 1, &tau, &frame).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = is_W_regular_symbolic(&d, &jet, 0, 5, 1 << 62, &mut rng).unwrap();
        assert!(v.regular);
        assert!(v.probabilistic);
        assert!(v.failure_probability.unwrap() < rat(1, 1000));
    }

    #[test]
    fn w_alpha_membership() {
        let d = samples::contact_r3();
        // tangent and regular
        let jet = contact_curve_jet(3);
        let v = is_in_W_alpha(&d, &jet, 2, 0).unwrap();
        assert!(v.member);
        // non-horizontal curve fails the tangency clause
        let t = MultiPoly::var(&var_set("t", 1), 0);
        let z = MultiPoly::zero(t.vars());
        let vert = PolyCurve::new(vec![z.clone(), z, t]).jet(&rat_int(0), 3);
        let v = is_in_W_alpha(&d, &vert, 2, 0).unwrap();
        assert!(!v.member);
        assert_eq!(v.reason, Some("tangency"));
        // zero jet is tangent but fails the rank clause
        let zero = CurveJet::new(rat_int(0), vec![vec![rat_int(0); 3]; 4]);
        let v = is_in_W_alpha(&d, &zero, 2, 0).unwrap();
        assert!(!v.member);
        assert_eq!(v.reason, Some("rank"));
        // threshold
        assert!(matches!(
            is_in_W_alpha(&d, &jet, 1, 1),
            Err(HjetError::AlphaBelowThreshold { .. })
        ));
    }

    #[test]
    fn q_thresholds() {
        assert_eq!(min_q(2, 1), 0);
        assert!(underdetermined(2, 1, 0));
        assert_eq!(min_q(10, 4), 0);
        assert_eq!(min_q(1, 3), 2);
        assert!(!underdetermined(1, 3, 2));
        assert!(matches!(
            is_W_regular(
                &samples::integrable_r3(),
                &contact_curve_jet(1),
                0
            ),
            Ok(_)
        ));
    }
}
