//! Curve jets, pullback jets of the defining one-forms, the triangular
//! tangency solve, and symbolic fibers with indeterminates X_q.

use num_traits::Zero;

use crate::error::{HjetError, Result};
use crate::exactalg::matrix::ExactMatrix;
use crate::exactalg::poly::{var_set, MultiPoly};
use crate::exactalg::series::{series_compose, TruncatedSeries};
use crate::exactalg::{factorial, Rational, Scalar};
use crate::geometry::{AdaptedFrameData, Distribution, OneForm};

/// Jet of a curve at parameter t0: derivative vectors D^0 = u(t0),
/// D^1 = u'(t0), ..., D^order. Entries live in an exact scalar ring, so
/// the same type carries rational jets and symbolic jets in the X_q.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveJet<S: Scalar> {
    t0: Rational,
    derivs: Vec<Vec<S>>,
}

impl<S: Scalar> CurveJet<S> {
    pub fn new(t0: Rational, derivs: Vec<Vec<S>>) -> Self {
        assert!(!derivs.is_empty(), "jet needs at least D^0");
        let n = derivs[0].len();
        assert!(n > 0, "jet needs at least one component");
        assert!(derivs.iter().all(|d| d.len() == n), "jet arity mismatch");
        CurveJet { t0, derivs }
    }

    pub fn t0(&self) -> &Rational {
        &self.t0
    }

    /// Highest derivative index carried by the jet.
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn arity(&self) -> usize {
        self.derivs[0].len()
    }

    pub fn deriv(&self, k: usize) -> &[S] {
        &self.derivs[k]
    }

    pub fn derivs(&self) -> &[Vec<S>] {
        &self.derivs
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        CurveJet {
            t0: self.t0.clone(),
            derivs: self.derivs[..=order].to_vec(),
        }
    }

    /// Taylor series of component mu in h = t - t0, to the jet order:
    /// coefficient of h^k is D^k_mu / k!.
    fn component_series(&self, mu: usize) -> TruncatedSeries<S> {
        let coeffs = (0..=self.order())
            .map(|k| self.derivs[k][mu].scale(&(factorial(k).recip())))
            .collect();
        TruncatedSeries::from_coeffs(coeffs)
    }
}

impl CurveJet<MultiPoly> {
    /// Substitute rational values for the jet's polynomial indeterminates.
    pub fn specialize(&self, values: &[Rational]) -> CurveJet<Rational> {
        CurveJet {
            t0: self.t0.clone(),
            derivs: self
                .derivs
                .iter()
                .map(|d| d.iter().map(|p| p.eval(values)).collect())
                .collect(),
        }
    }
}

/// Polynomial curve u : Q -> Q^N in a single parameter.
#[derive(Clone, Debug)]
pub struct PolyCurve {
    comps: Vec<MultiPoly>,
}

impl PolyCurve {
    pub fn new(comps: Vec<MultiPoly>) -> Self {
        assert!(!comps.is_empty());
        assert!(comps.iter().all(|c| c.nvars() == 1), "curve parameter must be a single variable");
        PolyCurve { comps }
    }

    pub fn arity(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[MultiPoly] {
        &self.comps
    }

    pub fn eval(&self, t: &Rational) -> Vec<Rational> {
        let pt = [t.clone()];
        self.comps.iter().map(|c| c.eval(&pt)).collect()
    }

    /// Jet at t0 by formal differentiation of the components.
    pub fn jet(&self, t0: &Rational, order: usize) -> CurveJet<Rational> {
        let pt = [t0.clone()];
        let mut cur = self.comps.clone();
        let mut derivs = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            derivs.push(cur.iter().map(|c| c.eval(&pt)).collect());
            cur = cur.iter().map(|c| c.derivative(0)).collect();
        }
        CurveJet::new(t0.clone(), derivs)
    }
}

/// Entry (s, k) = d_t^k((lambda^s o u)(d_t u)) at t0, for 0 <= k <= alpha
/// with alpha = jet order - 1. Row s vanishing through order alpha is the
/// tangency condition for the curve against the coframe. Entry (s, k)
/// consumes exactly D^0..D^{k+1}.
pub fn pullback_jet<S: Scalar>(coframe: &[OneForm], jet: &CurveJet<S>) -> Result<Vec<Vec<S>>> {
    if jet.order() < 1 {
        return Err(HjetError::InsufficientJetOrder {
            need: 1,
            got: jet.order(),
        });
    }
    let n = jet.arity();
    for l in coframe {
        if l.arity() != n {
            return Err(HjetError::ArityMismatch {
                expected: l.arity(),
                got: n,
            });
        }
    }
    let alpha = jet.order() - 1;
    let proto = jet.derivs[0][0].zero();
    let u: Vec<TruncatedSeries<S>> = (0..n).map(|mu| jet.component_series(mu)).collect();
    let u_tr: Vec<TruncatedSeries<S>> = u.iter().map(|s| s.truncate(alpha)).collect();
    let udot: Vec<TruncatedSeries<S>> = u.iter().map(|s| s.derivative()).collect();
    let mut out = Vec::with_capacity(coframe.len());
    for l in coframe {
        let mut g = TruncatedSeries::constant(proto.clone(), alpha);
        for mu in 0..n {
            if l.comp(mu).num_terms() == 0 {
                continue;
            }
            g = g.add(&series_compose(l.comp(mu), &u_tr)?.mul(&udot[mu]));
        }
        out.push((0..=alpha).map(|k| g.derivative_value(k)).collect());
    }
    Ok(out)
}

/// Shared triangular solve: level r consumes D^0..D^r and produces
/// D^{r+1} = Rinv * (-lower terms) + K * free_r, with Rinv the fixed
/// leftmost-pivot right inverse of the coframe values at the base and K
/// the fixed kernel basis. Determinism of both makes the output a
/// function of the inputs alone.
fn solve_levels<S: Scalar>(
    d: &Distribution,
    first_jet: Vec<S>,
    alpha: usize,
    free: &[Vec<S>],
    proto: &S,
) -> Result<CurveJet<S>> {
    let n_dim = d.dim();
    let p = d.corank();
    if first_jet.len() != n_dim {
        return Err(HjetError::ArityMismatch {
            expected: n_dim,
            got: first_jet.len(),
        });
    }
    let lx = d.coframe_at_base();
    let rinv = lx
        .right_inverse()
        .map_err(|_| HjetError::CoframeRankDeficient)?;
    let kernel = lx.kernel_basis();
    if free.len() != alpha {
        return Err(HjetError::DimensionMismatch(format!(
            "need one free vector per level: {} levels, got {}",
            alpha,
            free.len()
        )));
    }
    for f in free {
        if f.len() != kernel.len() {
            return Err(HjetError::DimensionMismatch(format!(
                "free vector length {} does not match kernel dimension {}",
                f.len(),
                kernel.len()
            )));
        }
    }
    // Lambda * D^1 = 0 is the level-0 equation; it must already hold.
    for s in 0..p {
        let mut acc = proto.zero();
        for mu in 0..n_dim {
            acc = acc.add(&first_jet[mu].scale(lx.get(s, mu)));
        }
        if !acc.is_zero() {
            return Err(HjetError::NonTangentFirstJet);
        }
    }
    let d0: Vec<S> = d.base().iter().map(|c| proto.from_rational(c)).collect();
    let mut derivs = vec![d0, first_jet];
    for r in 1..=alpha {
        // Probe with D^{r+1} = 0: entry (s, r) then holds exactly the
        // lower-order terms, since D^{r+1} enters linearly as Lambda*D^{r+1}.
        derivs.push(vec![proto.zero(); n_dim]);
        let probe = CurveJet::new(<Rational as Zero>::zero(), derivs.clone());
        let pb = pullback_jet(d.coframe(), &probe)?;
        let mut dk = Vec::with_capacity(n_dim);
        for mu in 0..n_dim {
            let mut acc = proto.zero();
            for s in 0..p {
                acc = acc.add(&pb[s][r].neg().scale(rinv.get(mu, s)));
            }
            for (i, kv) in kernel.iter().enumerate() {
                acc = acc.add(&free[r - 1][i].scale(&kv[mu]));
            }
            dk.push(acc);
        }
        *derivs.last_mut().unwrap() = dk;
    }
    Ok(CurveJet::new(<Rational as Zero>::zero(), derivs))
}

/// Extend a tangent first jet at the base of the distribution to a jet of
/// order alpha + 1 whose pullback jet vanishes through order alpha. The
/// free vector at level r selects the kernel component of D^{r+1}.
pub fn tangency_solve(
    d: &Distribution,
    first_jet: &[Rational],
    alpha: usize,
    free: &[Vec<Rational>],
) -> Result<CurveJet<Rational>> {
    let proto = <Rational as Zero>::zero();
    solve_levels(d, first_jet.to_vec(), alpha, free, &proto)
}

/// Free-vector label per level: zero, a named frame vector tau^{s,j}, or
/// an explicit vector in the distribution plane at the base.
#[derive(Clone, Debug, PartialEq)]
pub enum TauLabel {
    Zero,
    Tau(usize, usize),
    Vector(Vec<Rational>),
}

/// Assignment q -> tau^q for levels q = 1..=alpha.
#[derive(Clone, Debug)]
pub struct TauAssignment {
    labels: Vec<TauLabel>,
}

impl TauAssignment {
    pub fn zeros(alpha: usize) -> Self {
        TauAssignment {
            labels: vec![TauLabel::Zero; alpha],
        }
    }

    /// Set the label at level q (1-based).
    pub fn set(&mut self, q: usize, label: TauLabel) {
        assert!(q >= 1 && q <= self.labels.len(), "level out of range");
        self.labels[q - 1] = label;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, q: usize) -> &TauLabel {
        &self.labels[q - 1]
    }
}

/// Run the triangular solve with the level-q free part set to
/// X_q * (coordinates of tau^q in the kernel basis). The entries of
/// D^{q+1} are then polynomials whose X_q-linear part is exactly
/// X_q * tau^q, and every rational specialization of the X_q stays
/// tangent through order alpha.
pub fn symbolic_fiber(
    d: &Distribution,
    first_jet: &[Rational],
    alpha: usize,
    tau: &TauAssignment,
    frame: &AdaptedFrameData,
) -> Result<CurveJet<MultiPoly>> {
    if tau.len() != alpha {
        return Err(HjetError::DimensionMismatch(format!(
            "assignment covers {} levels, need {}",
            tau.len(),
            alpha
        )));
    }
    let xvars = var_set("X", alpha);
    let proto = MultiPoly::zero(&xvars);
    let lx = d.coframe_at_base();
    let kernel = lx.kernel_basis();
    let kmat = ExactMatrix::from_fn(d.dim(), kernel.len(), |mu, i| kernel[i][mu].clone());
    let mut free = Vec::with_capacity(alpha);
    for q in 1..=alpha {
        let vec = match tau.label(q) {
            TauLabel::Zero => {
                free.push(vec![proto.zero(); kernel.len()]);
                continue;
            }
            TauLabel::Tau(s, j) => frame.pair(*s, *j).tau.clone(),
            TauLabel::Vector(v) => v.clone(),
        };
        if vec.len() != d.dim() {
            return Err(HjetError::ArityMismatch {
                expected: d.dim(),
                got: vec.len(),
            });
        }
        let coords = kmat.solve(&vec).map_err(|_| HjetError::NotInDistribution)?;
        let xq = MultiPoly::var(&xvars, q - 1);
        free.push(coords.iter().map(|c| xq.scale_poly(c)).collect());
    }
    let first: Vec<MultiPoly> = first_jet
        .iter()
        .map(|c| MultiPoly::constant(&xvars, c.clone()))
        .collect();
    solve_levels(d, first, alpha, &free, &proto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, rat_int};
    use crate::geometry::{adapted_frame, GrowthVector};
    use crate::samples;

    fn tvar() -> MultiPoly {
        MultiPoly::var(&var_set("t", 1), 0)
    }

    fn assert_all_zero(pb: &[Vec<Rational>]) {
        for row in pb {
            for e in row {
                assert!(Zero::is_zero(e), "nonzero pullback entry {e}");
            }
        }
    }

    #[test]
    fn poly_curve_jet_matches_hand_derivatives() {
        // u = (t^2, 1 + 3t) at t0 = 1: D^0 = (1, 4), D^1 = (2, 3), D^2 = (2, 0)
        let t = tvar();
        let u = PolyCurve::new(vec![
            t.pow(2),
            MultiPoly::one(t.vars()).add_poly(&t.scale_poly(&rat_int(3))),
        ]);
        let jet = u.jet(&rat_int(1), 2);
        assert_eq!(jet.deriv(0), &[rat_int(1), rat_int(4)]);
        assert_eq!(jet.deriv(1), &[rat_int(2), rat_int(3)]);
        assert_eq!(jet.deriv(2), &[rat_int(2), rat_int(0)]);
    }

    #[test]
    fn pullback_horizontal_contact_curve_vanishes() {
        // u = (t, t, t^2/2): z' - y x' = t - t = 0 identically.
        let d = samples::contact_r3();
        let t = tvar();
        let u = PolyCurve::new(vec![t.clone(), t.clone(), t.pow(2).scale_poly(&rat(1, 2))]);
        let jet = u.jet(&rat_int(0), 3);
        let pb = pullback_jet(d.coframe(), &jet).unwrap();
        assert_eq!(pb.len(), 1);
        assert_eq!(pb[0].len(), 3);
        assert_all_zero(&pb);
    }

    #[test]
    fn pullback_constant_curve_vanishes() {
        let d = samples::engel_r4();
        let jet = CurveJet::new(
            rat_int(0),
            vec![
                vec![rat_int(1), rat_int(2), rat_int(3), rat_int(4)],
                vec![rat_int(0); 4],
                vec![rat_int(0); 4],
            ],
        );
        let pb = pullback_jet(d.coframe(), &jet).unwrap();
        assert_all_zero(&pb);
    }

    #[test]
    fn pullback_vertical_curve() {
        // u = (0, 0, t) against dz - y dx: entry (1, 0) = 1, higher entries 0.
        let d = samples::contact_r3();
        let t = tvar();
        let zero = MultiPoly::zero(t.vars());
        let u = PolyCurve::new(vec![zero.clone(), zero, t]);
        let jet = u.jet(&rat_int(0), 3);
        let pb = pullback_jet(d.coframe(), &jet).unwrap();
        assert_eq!(pb[0][0], rat_int(1));
        assert!(Zero::is_zero(&pb[0][1]));
        assert!(Zero::is_zero(&pb[0][2]));
    }

    #[test]
    fn pullback_requires_first_derivative() {
        let d = samples::contact_r3();
        let jet = CurveJet::new(rat_int(0), vec![vec![rat_int(0); 3]]);
        assert!(matches!(
            pullback_jet(d.coframe(), &jet),
            Err(HjetError::InsufficientJetOrder { .. })
        ));
    }

    #[test]
    fn tangency_solve_contact_forces_z_acceleration() {
        // First jet (1, 1, 0), free = 0: the level-1 equation reads
        // d2z/dt2 = dy/dt * dx/dt = 1.
        let d = samples::contact_r3();
        let jet = tangency_solve(
            &d,
            &[rat_int(1), rat_int(1), rat_int(0)],
            1,
            &[vec![rat_int(0), rat_int(0)]],
        )
        .unwrap();
        assert_eq!(jet.deriv(2), &[rat_int(0), rat_int(0), rat_int(1)]);
        assert_all_zero(&pullback_jet(d.coframe(), &jet).unwrap());
    }

    #[test]
    fn tangency_solve_zero_jet_stays_zero() {
        let d = samples::engel_r4();
        let free = vec![vec![rat_int(0), rat_int(0)]; 3];
        let jet = tangency_solve(&d, &vec![rat_int(0); 4], 3, &free).unwrap();
        for k in 1..=4 {
            assert!(jet.deriv(k).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn tangency_solve_rejects_non_tangent_first_jet() {
        let d = samples::contact_r3();
        let out = tangency_solve(&d, &[rat_int(0), rat_int(0), rat_int(1)], 1, &[vec![
            rat_int(0),
            rat_int(0),
        ]]);
        assert!(matches!(out, Err(HjetError::NonTangentFirstJet)));
    }

    #[test]
    fn tangency_solve_outputs_are_affine_over_kernel() {
        // Two free choices differing at the final level give jets equal
        // below level alpha + 1, with the top difference in ker Lambda.
        let d = samples::engel_r4();
        let fj = vec![rat_int(1), rat_int(0), rat_int(0), rat_int(2)];
        let base_free = vec![vec![rat_int(1), rat(1, 2)], vec![rat_int(0), rat_int(0)]];
        let mut other_free = base_free.clone();
        other_free[1] = vec![rat_int(3), rat_int(-1)];
        let a = tangency_solve(&d, &fj, 2, &base_free).unwrap();
        let b = tangency_solve(&d, &fj, 2, &other_free).unwrap();
        for k in 0..=2 {
            assert_eq!(a.deriv(k), b.deriv(k));
        }
        let diff: Vec<Rational> = a
            .deriv(3)
            .iter()
            .zip(b.deriv(3))
            .map(|(x, y)| x - y)
            .collect();
        assert!(diff.iter().any(|c| !Zero::is_zero(c)));
        let lx = d.coframe_at_base();
        assert!(lx.mul_vec(&diff).iter().all(Zero::is_zero));
    }

    #[test]
    fn tangency_solve_vanishes_for_sample_structures() {
        // Random-looking free choices across the sample corpus; the
        // pullback jet must vanish identically through order alpha.
        let cases: Vec<(Distribution, usize)> = vec![
            (samples::contact_r3(), 4),
            (samples::engel_r4(), 4),
            (samples::two_step_r14(), 3),
        ];
        for (d, alpha) in cases {
            let lx = d.coframe_at_base();
            let nk = d.dim() - d.corank();
            // deterministic pseudo-random rationals
            let mut seed = 17i64;
            let mut next = || {
                seed = (seed * 31 + 7) % 101;
                rat(seed - 50, 3)
            };
            let fj_free: Vec<Rational> = (0..nk).map(|_| next()).collect();
            let kernel = lx.kernel_basis();
            let mut fj = vec![rat_int(0); d.dim()];
            for (i, kv) in kernel.iter().enumerate() {
                for mu in 0..d.dim() {
                    fj[mu] += &fj_free[i] * &kv[mu];
                }
            }
            let free: Vec<Vec<Rational>> =
                (0..alpha).map(|_| (0..nk).map(|_| next()).collect()).collect();
            let jet = tangency_solve(&d, &fj, alpha, &free).unwrap();
            assert_all_zero(&pullback_jet(d.coframe(), &jet).unwrap());
        }
    }

    #[test]
    fn symbolic_fiber_contact_level_one() {
        // D^2 = X1 * tau^{1,1} + V1 with V1 = (0, 0, 1).
        let d = samples::contact_r3();
        let gv = GrowthVector::new(vec![0, 2, 3]).unwrap();
        let frame = adapted_frame(&d, &gv).unwrap();
        let mut tau = TauAssignment::zeros(1);
        tau.set(1, TauLabel::Tau(1, 1));
        let jet =
            symbolic_fiber(&d, &[rat_int(1), rat_int(1), rat_int(0)], 1, &tau, &frame).unwrap();
        let d2 = jet.deriv(2);
        let x1 = MultiPoly::var(&var_set("X", 1), 0);
        assert_eq!(d2[0], x1);
        assert!(Scalar::is_zero(&d2[1]));
        assert_eq!(d2[2], MultiPoly::one(x1.vars()));
    }

    #[test]
    fn symbolic_fiber_linear_part_is_tau_and_lower_levels_are_free_of_xq() {
        let d = samples::engel_r4();
        let gv = GrowthVector::new(vec![0, 2, 3, 4]).unwrap();
        let frame = adapted_frame(&d, &gv).unwrap();
        let mut tau = TauAssignment::zeros(2);
        tau.set(1, TauLabel::Tau(1, 1));
        tau.set(2, TauLabel::Tau(2, 1));
        let fj = frame.pair(1, 1).tau.clone();
        let jet = symbolic_fiber(&d, &fj, 2, &tau, &frame).unwrap();
        for q in 1..=2usize {
            // X_q absent below level q + 1
            for k in 0..=q {
                for e in jet.deriv(k) {
                    assert!(Scalar::is_zero(&e.derivative(q - 1)), "X{q} occurs in D^{k}");
                }
            }
            // linear coefficient of X_q in D^{q+1} equals tau^q
            let expect = match tau.label(q) {
                TauLabel::Tau(s, j) => frame.pair(*s, *j).tau.clone(),
                _ => unreachable!(),
            };
            for (mu, e) in jet.deriv(q + 1).iter().enumerate() {
                let coeff = e.linear_coefficient_in(q - 1);
                assert!(coeff.is_constant());
                assert_eq!(coeff.constant_term(), expect[mu]);
            }
        }
        // symbolic tangency holds identically in the X_q
        for row in pullback_jet(d.coframe(), &jet).unwrap() {
            for e in row {
                assert!(Scalar::is_zero(&e));
            }
        }
    }

    #[test]
    fn symbolic_fiber_specializes_to_rational_solve() {
        let d = samples::engel_r4();
        let gv = GrowthVector::new(vec![0, 2, 3, 4]).unwrap();
        let frame = adapted_frame(&d, &gv).unwrap();
        let mut tau = TauAssignment::zeros(2);
        tau.set(1, TauLabel::Tau(1, 1));
        tau.set(2, TauLabel::Vector(frame.pair(1, 1).tau.clone()));
        let fj = frame.pair(1, 1).tau.clone();
        let jet = symbolic_fiber(&d, &fj, 2, &tau, &frame).unwrap();
        let zeroed = jet.specialize(&[rat_int(0), rat_int(0)]);
        let nk = d.dim() - d.corank();
        let plain =
            tangency_solve(&d, &fj, 2, &vec![vec![rat_int(0); nk]; 2]).unwrap();
        assert_eq!(zeroed, plain);
        // all-zero assignment reduces to the plain solve directly
        let jet0 = symbolic_fiber(&d, &fj, 2, &TauAssignment::zeros(2), &frame).unwrap();
        assert_eq!(jet0.specialize(&[rat_int(0), rat_int(0)]), plain);
    }

    #[test]
    fn symbolic_fiber_rejects_vector_outside_distribution() {
        let d = samples::contact_r3();
        let gv = GrowthVector::new(vec![0, 2, 3]).unwrap();
        let frame = adapted_frame(&d, &gv).unwrap();
        let mut tau = TauAssignment::zeros(1);
        tau.set(1, TauLabel::Vector(vec![rat_int(0), rat_int(0), rat_int(1)]));
        let out = symbolic_fiber(&d, &[rat_int(1), rat_int(1), rat_int(0)], 1, &tau, &frame);
        assert!(matches!(out, Err(HjetError::NotInDistribution)));
    }

    #[test]
    fn tangency_solve_is_deterministic() {
        let d = samples::two_step_r14();
        let nk = d.dim() - d.corank();
        let mut fj = vec![rat_int(0); d.dim()];
        fj[0] = rat_int(1);
        let free = vec![vec![rat(1, 3); nk]; 2];
        let a = tangency_solve(&d, &fj, 2, &free).unwrap();
        let b = tangency_solve(&d, &fj, 2, &free).unwrap();
        assert_eq!(a, b);
    }
}
