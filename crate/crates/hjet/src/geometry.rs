//! Polynomial vector fields and 1-forms on ℚ^N, Lie brackets, the flag of
//! a distribution at a point, and the adapted frame construction.
//!
//! The adapted frame pairs horizontal vectors τ with flag vectors η so
//! that the brackets -[τ,η] frame each quotient 𝒟^{s+1}/𝒟^s, then
//! recombines the defining coframe so that duality and the triangularity
//! certificate dλ^{s',j'}|_x(τ^{s,j}, η^{s,j}) hold exactly.

use num_traits::{One, Zero};

use crate::error::{HjetError, Result};
use crate::exactalg::matrix::{exact_rank, ExactMatrix};
use crate::exactalg::poly::{MultiPoly, VarSet};
use crate::exactalg::Rational;

/// Polynomial vector field X = X^μ ∂_μ on ℚ^N.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<MultiPoly>,
}

impl VectorField {
    pub fn new(comps: Vec<MultiPoly>) -> Self {
        assert!(!comps.is_empty());
        VectorField { comps }
    }

    pub fn constant(vars: &VarSet, v: &[Rational]) -> Self {
        assert_eq!(v.len(), vars.len());
        VectorField {
            comps: v
                .iter()
                .map(|c| MultiPoly::constant(vars, c.clone()))
                .collect(),
        }
    }

    /// The coordinate field ∂_μ.
    pub fn coordinate(vars: &VarSet, mu: usize) -> Self {
        let mut comps = vec![MultiPoly::zero(vars); vars.len()];
        comps[mu] = MultiPoly::one(vars);
        VectorField { comps }
    }

    pub fn arity(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, mu: usize) -> &MultiPoly {
        &self.comps[mu]
    }

    pub fn comps(&self) -> &[MultiPoly] {
        &self.comps
    }

    pub fn eval(&self, point: &[Rational]) -> Vec<Rational> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| Zero::is_zero(&c.constant_term()) && c.num_terms() == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity(), other.arity());
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add_poly(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        VectorField {
            comps: self.comps.iter().map(|c| c.neg_poly()).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        VectorField {
            comps: self.comps.iter().map(|c| c.scale_poly(r)).collect(),
        }
    }

    /// self + f * other, with a polynomial coefficient f.
    pub fn add_scaled(&self, f: &MultiPoly, other: &Self) -> Self {
        assert_eq!(self.arity(), other.arity());
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add_poly(&f.mul_poly(b)))
                .collect(),
        }
    }

    /// Directional derivative X(f) = X^μ ∂_μ f.
    pub fn derive(&self, f: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(f.vars());
        for (mu, x) in self.comps.iter().enumerate() {
            acc = acc.add_poly(&x.mul_poly(&f.derivative(mu)));
        }
        acc
    }
}

/// Polynomial 1-form λ = λ_μ dy^μ.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    comps: Vec<MultiPoly>,
}

impl OneForm {
    pub fn new(comps: Vec<MultiPoly>) -> Self {
        assert!(!comps.is_empty());
        OneForm { comps }
    }

    pub fn arity(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, mu: usize) -> &MultiPoly {
        &self.comps[mu]
    }

    pub fn comps(&self) -> &[MultiPoly] {
        &self.comps
    }

    /// λ(X) as a polynomial function.
    pub fn apply(&self, x: &VectorField) -> Result<MultiPoly> {
        if self.arity() != x.arity() {
            return Err(HjetError::ArityMismatch {
                expected: self.arity(),
                got: x.arity(),
            });
        }
        let mut acc = MultiPoly::zero(self.comps[0].vars());
        for (l, c) in self.comps.iter().zip(x.comps()) {
            acc = acc.add_poly(&l.mul_poly(c));
        }
        Ok(acc)
    }

    /// λ|_point(v) for a plain vector v.
    pub fn pair_at(&self, v: &[Rational], point: &[Rational]) -> Rational {
        assert_eq!(v.len(), self.arity());
        let mut acc = <Rational as Zero>::zero();
        for (l, c) in self.comps.iter().zip(v) {
            acc += l.eval(point) * c;
        }
        acc
    }

    /// Constant-coefficient recombination Σ c_i λ_i.
    pub fn combine(coeffs: &[Rational], forms: &[OneForm]) -> OneForm {
        assert_eq!(coeffs.len(), forms.len());
        assert!(!forms.is_empty());
        let mut comps = vec![MultiPoly::zero(forms[0].comps[0].vars()); forms[0].arity()];
        for (c, f) in coeffs.iter().zip(forms) {
            for (acc, l) in comps.iter_mut().zip(&f.comps) {
                *acc = acc.add_poly(&l.scale_poly(c));
            }
        }
        OneForm { comps }
    }

    /// Polynomial-coefficient recombination Σ f_i λ_i.
    pub fn combine_poly(coeffs: &[MultiPoly], forms: &[OneForm]) -> OneForm {
        assert_eq!(coeffs.len(), forms.len());
        assert!(!forms.is_empty());
        let mut comps = vec![MultiPoly::zero(forms[0].comps[0].vars()); forms[0].arity()];
        for (f, form) in coeffs.iter().zip(forms) {
            for (acc, l) in comps.iter_mut().zip(&form.comps) {
                *acc = acc.add_poly(&l.mul_poly(f));
            }
        }
        OneForm { comps }
    }
}

/// dλ(X,Y) = X(λ(Y)) - Y(λ(X)) - λ([X,Y]), as a polynomial. The value at
/// any point is tensorial: it depends only on X, Y at that point.
pub fn d_oneform_eval(l: &OneForm, x: &VectorField, y: &VectorField) -> Result<MultiPoly> {
    if x.arity() != y.arity() || l.arity() != x.arity() {
        return Err(HjetError::ArityMismatch {
            expected: l.arity(),
            got: x.arity().max(y.arity()),
        });
    }
    let xy = x.derive(&l.apply(y)?);
    let yx = y.derive(&l.apply(x)?);
    let br = l.apply(&lie_bracket(x, y)?)?;
    Ok(xy.sub_poly(&yx).sub_poly(&br))
}

/// [X,Y]^μ = X^ν ∂_ν Y^μ - Y^ν ∂_ν X^μ.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    if x.arity() != y.arity() {
        return Err(HjetError::ArityMismatch {
            expected: x.arity(),
            got: y.arity(),
        });
    }
    let comps = (0..x.arity())
        .map(|mu| x.derive(y.comp(mu)).sub_poly(&y.derive(x.comp(mu))))
        .collect();
    Ok(VectorField { comps })
}

/// Growth vector (m_0, ..., m_{r+1}) of a flag at a point; m_0 = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthVector {
    m: Vec<usize>,
}

impl GrowthVector {
    pub fn new(m: Vec<usize>) -> Result<Self> {
        if m.len() < 2 || m[0] != 0 {
            return Err(HjetError::Precondition(
                "growth vector must start with 0 and list at least (m_0, m_1)".into(),
            ));
        }
        if m.windows(2).any(|w| w[0] > w[1]) {
            return Err(HjetError::Precondition(
                "growth vector must be weakly increasing".into(),
            ));
        }
        Ok(GrowthVector { m })
    }

    pub fn entries(&self) -> &[usize] {
        &self.m
    }

    /// Number of bracket steps r; the vector is (m_0, ..., m_{r+1}).
    pub fn step(&self) -> usize {
        self.m.len() - 2
    }

    pub fn rank(&self) -> usize {
        self.m[1]
    }

    pub fn dim(&self) -> usize {
        *self.m.last().unwrap()
    }

    pub fn corank(&self) -> usize {
        self.dim() - self.rank()
    }

    /// Jump p_s = m_{s+1} - m_s for 1 <= s <= r; p_0 = 0 by convention.
    pub fn jump(&self, s: usize) -> usize {
        if s == 0 {
            return 0;
        }
        assert!(s <= self.step(), "jump index out of range");
        self.m[s + 1] - self.m[s]
    }

    /// Flat index of the frame slot (s,j), grouping slots by step:
    /// (1,1), ..., (1,p_1), (2,1), ... 1-based j.
    pub fn flat_index(&self, s: usize, j: usize) -> usize {
        assert!(1 <= s && s <= self.step() && 1 <= j && j <= self.jump(s));
        self.m[s] - self.m[1] + (j - 1)
    }

    /// Inverse of flat_index.
    pub fn slot(&self, flat: usize) -> (usize, usize) {
        let mut acc = 0;
        for s in 1..=self.step() {
            if flat < acc + self.jump(s) {
                return (s, flat - acc + 1);
            }
            acc += self.jump(s);
        }
        panic!("flat frame index out of range");
    }
}

/// A corank-p distribution 𝒟 = ∩ ker λ^i on ℚ^N with a rational base
/// point. Spanning fields annihilate the coframe identically; when not
/// supplied they are built by polynomial Cramer elimination.
#[derive(Clone, Debug)]
pub struct Distribution {
    vars: VarSet,
    coframe: Vec<OneForm>,
    generators: Vec<VectorField>,
    base: Vec<Rational>,
}

impl Distribution {
    pub fn new(
        vars: &VarSet,
        coframe: Vec<OneForm>,
        generators: Option<Vec<VectorField>>,
        base: Vec<Rational>,
    ) -> Result<Self> {
        let nn = vars.len();
        if coframe.is_empty() || coframe.iter().any(|l| l.arity() != nn) || base.len() != nn {
            return Err(HjetError::DimensionMismatch(
                "coframe arity and base point must match the ambient dimension".into(),
            ));
        }
        let p = coframe.len();
        if p >= nn {
            return Err(HjetError::DimensionMismatch(
                "corank must be smaller than the ambient dimension".into(),
            ));
        }
        let lx = coframe_at(&coframe, &base);
        if exact_rank(&lx) != p {
            return Err(HjetError::CoframeRankDeficient);
        }
        let n = nn - p;
        let generators = match generators {
            Some(g) => {
                if g.len() != n || g.iter().any(|f| f.arity() != nn) {
                    return Err(HjetError::DimensionMismatch(format!(
                        "expected {n} spanning fields of arity {nn}"
                    )));
                }
                for (i, f) in g.iter().enumerate() {
                    for (s, l) in coframe.iter().enumerate() {
                        if l.apply(f)?.num_terms() != 0 {
                            return Err(HjetError::Precondition(format!(
                                "spanning field {i} does not annihilate coframe form {s} identically"
                            )));
                        }
                    }
                }
                let vals = ExactMatrix::from_fn(nn, n, |mu, i| g[i].eval(&base)[mu].clone());
                if exact_rank(&vals) != n {
                    return Err(HjetError::Precondition(
                        "spanning fields are dependent at the base point".into(),
                    ));
                }
                g
            }
            None => generators_from_coframe(vars, &coframe, &base)?,
        };
        Ok(Distribution {
            vars: vars.clone(),
            coframe,
            generators,
            base,
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn rank(&self) -> usize {
        self.dim() - self.corank()
    }

    pub fn corank(&self) -> usize {
        self.coframe.len()
    }

    pub fn coframe(&self) -> &[OneForm] {
        &self.coframe
    }

    pub fn generators(&self) -> &[VectorField] {
        &self.generators
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    /// The p×N matrix of coframe values at the base point.
    pub fn coframe_at_base(&self) -> ExactMatrix<Rational> {
        coframe_at(&self.coframe, &self.base)
    }
}

fn coframe_at(coframe: &[OneForm], point: &[Rational]) -> ExactMatrix<Rational> {
    ExactMatrix::from_fn(coframe.len(), point.len(), |s, mu| {
        coframe[s].comp(mu).eval(point)
    })
}

/// Exact spanning fields from a polynomial coframe: with P the pivot-column
/// minor of the coframe matrix Λ, each free column f yields the field with
/// det(P) in slot f and adj(P)·(-Λ_f) in the pivot slots, so Λ·v = 0 as a
/// polynomial identity and the values at the base point are independent.
pub fn generators_from_coframe(
    vars: &VarSet,
    coframe: &[OneForm],
    base: &[Rational],
) -> Result<Vec<VectorField>> {
    let p = coframe.len();
    let nn = vars.len();
    let lx = coframe_at(coframe, base);
    let (_, _, pivots) = lx.rref();
    if pivots.len() != p {
        return Err(HjetError::CoframeRankDeficient);
    }
    let lam = ExactMatrix::from_fn(p, nn, |s, mu| coframe[s].comp(mu).clone());
    let pmat = lam.submatrix(&(0..p).collect::<Vec<_>>(), &pivots);
    let det = pmat.det_bareiss();
    let adj = adjugate(&pmat);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; nn];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut gens = Vec::new();
    for f in 0..nn {
        if is_pivot[f] {
            continue;
        }
        let mut comps = vec![MultiPoly::zero(vars); nn];
        comps[f] = det.clone();
        for (k, &pc) in pivots.iter().enumerate() {
            let mut acc = MultiPoly::zero(vars);
            for j in 0..p {
                acc = acc.add_poly(&adj.get(k, j).mul_poly(&lam.get(j, f).neg_poly()));
            }
            comps[pc] = acc;
        }
        let v = VectorField::new(comps);
        debug_assert!(coframe.iter().all(|l| l.apply(&v).unwrap().num_terms() == 0));
        gens.push(v);
    }
    Ok(gens)
}

fn adjugate(m: &ExactMatrix<MultiPoly>) -> ExactMatrix<MultiPoly> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 1 {
        let one = m.get(0, 0).vars();
        return ExactMatrix::from_fn(1, 1, |_, _| MultiPoly::one(one));
    }
    ExactMatrix::from_fn(n, n, |i, j| {
        // adj[i][j] = (-1)^{i+j} det(m with row j, column i removed)
        let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let minor = m.submatrix(&rows, &cols).det_bareiss();
        if (i + j) % 2 == 0 {
            minor
        } else {
            minor.neg_poly()
        }
    })
}

/// Certificate that a flag direction arose as a bracket: value_at_base is
/// [left, right] evaluated at the base point and lies in 𝒟^level there.
#[derive(Clone, Debug)]
pub struct BracketCertificate {
    pub level: usize,
    pub left: VectorField,
    pub right: VectorField,
    pub bracket: VectorField,
    pub value_at_base: Vec<Rational>,
}

/// The flag 𝒟 ⊂ 𝒟² ⊂ ... at the base point: a basis adapted to the
/// filtration, the bracket fields that produced each new direction, and
/// the resulting growth vector.
#[derive(Clone, Debug)]
pub struct FlagData {
    pub growth: GrowthVector,
    /// Basis vectors of the top computed 𝒟^i_x, in discovery order; the
    /// first m_s span 𝒟^s_x.
    pub basis: Vec<Vec<Rational>>,
    /// Level of each basis vector (1 for horizontal directions).
    pub levels: Vec<usize>,
    /// For each level i >= 1, fields whose values at the base extend
    /// 𝒟^{i-1}_x to 𝒟^i_x (level 1 holds the spanning fields).
    pub level_fields: Vec<Vec<VectorField>>,
    pub certificates: Vec<BracketCertificate>,
    pub bracket_generating: bool,
}

fn extends_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let rows = basis.len() + 1;
    let m = ExactMatrix::from_fn(rows, v.len(), |i, j| {
        if i < basis.len() {
            basis[i][j].clone()
        } else {
            v[j].clone()
        }
    });
    exact_rank(&m) == rows
}

/// Compute the flag 𝒟^i_x for i <= max_step by bracketing spanning fields
/// against the accumulated level fields and extending a basis at the base
/// point. Stops early on stabilization or when the flag fills ℚ^N.
pub fn flag_at_point(d: &Distribution, max_step: usize) -> Result<FlagData> {
    assert!(max_step >= 1);
    let nn = d.dim();
    let base = d.base();
    let gens = d.generators().to_vec();

    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut levels: Vec<usize> = Vec::new();
    for g in &gens {
        let v = g.eval(base);
        debug_assert!(extends_span(&basis, &v));
        basis.push(v);
        levels.push(1);
    }
    let mut m = vec![0usize, basis.len()];
    let mut level_fields: Vec<Vec<VectorField>> = vec![gens.clone()];
    let mut certificates = Vec::new();

    let mut level = 1usize;
    while level < max_step && *m.last().unwrap() < nn {
        let mut new_fields = Vec::new();
        for g in &gens {
            for h in &level_fields[level - 1] {
                let b = lie_bracket(g, h)?;
                let v = b.eval(base);
                if extends_span(&basis, &v) {
                    basis.push(v.clone());
                    levels.push(level + 1);
                    certificates.push(BracketCertificate {
                        level: level + 1,
                        left: g.clone(),
                        right: h.clone(),
                        bracket: b.clone(),
                        value_at_base: v,
                    });
                    new_fields.push(b);
                }
            }
        }
        if new_fields.is_empty() {
            break;
        }
        level_fields.push(new_fields);
        m.push(basis.len());
        level += 1;
    }

    let bracket_generating = *m.last().unwrap() == nn;
    Ok(FlagData {
        growth: GrowthVector::new(m)?,
        basis,
        levels,
        level_fields,
        certificates,
        bracket_generating,
    })
}

/// One adapted frame slot (s,j): the paired vectors, the frame direction
/// ζ completing 𝒟^s_x towards 𝒟^{s+1}_x, and the bracket certificate
/// fields witnessing ζ + [τ̃, η̃]_x ∈ 𝒟^s_x.
#[derive(Clone, Debug)]
pub struct FramePair {
    pub s: usize,
    pub j: usize,
    pub tau: Vec<Rational>,
    pub eta: Vec<Rational>,
    pub zeta: Vec<Rational>,
    pub tau_field: VectorField,
    pub eta_field: VectorField,
    pub bracket_value: Vec<Rational>,
}

/// Adapted frame and coframe at the base point: pairs in flat (s,j)
/// order, and the recombined coframe λ^{s,j}, dual to the ζ's at the base
/// and satisfying the exact triangularity certificate.
#[derive(Clone, Debug)]
pub struct AdaptedFrameData {
    pub growth: GrowthVector,
    pub pairs: Vec<FramePair>,
    pub coframe: Vec<OneForm>,
    pub base: Vec<Rational>,
}

impl AdaptedFrameData {
    pub fn pair(&self, s: usize, j: usize) -> &FramePair {
        &self.pairs[self.growth.flat_index(s, j)]
    }

    /// Duality matrix λ^{s,j}(ζ^{s',j'}) at the base.
    pub fn duality_matrix(&self) -> ExactMatrix<Rational> {
        let p = self.pairs.len();
        ExactMatrix::from_fn(p, p, |i, j| {
            self.coframe[i].pair_at(&self.pairs[j].zeta, &self.base)
        })
    }
}

/// Linear Taylor part of g at the point x: Σ_μ ∂_μ g(x) (y_μ - x_μ).
fn linear_taylor_part(g: &MultiPoly, x: &[Rational]) -> MultiPoly {
    let vars = g.vars().clone();
    let mut acc = MultiPoly::zero(&vars);
    for mu in 0..x.len() {
        let c = g.derivative(mu).eval(x);
        if Zero::is_zero(&c) {
            continue;
        }
        let shifted = MultiPoly::var(&vars, mu)
            .sub_poly(&MultiPoly::constant(&vars, x[mu].clone()));
        acc = acc.add_poly(&shifted.scale_poly(&c));
    }
    acc
}

/// Build the adapted frame of a bracket-generating distribution with the
/// given growth vector. Greedy pair selection with leftmost-pivot
/// tie-breaking; the final coframe makes the full certificate matrix
/// dλ^{s',j'}|_x(τ^{s,j}, η^{s,j}) the exact identity.
pub fn adapted_frame(d: &Distribution, gv: &GrowthVector) -> Result<AdaptedFrameData> {
    let flag = flag_at_point(d, gv.step() + 1)?;
    check_growth_matches(&flag.growth, gv, flag.bracket_generating, d.dim())?;
    let r = flag.growth.step();
    let p = d.corank();
    let nn = d.dim();
    let base = d.base().to_vec();
    let vars = d.vars().clone();
    let gv = flag.growth.clone();

    // Greedy selection: for each step s pick pairs (generator, level-s
    // field) whose bracket values extend 𝒟^s_x, in lexicographic order.
    struct Chosen {
        s: usize,
        j: usize,
        tau_field: VectorField,
        eta_field: VectorField,
        eta: Vec<Rational>,
        zeta_prov: Vec<Rational>,
    }
    let mut chosen: Vec<Chosen> = Vec::new();
    for s in 1..=r {
        let p_s = gv.jump(s);
        if p_s == 0 {
            continue;
        }
        let d_s_basis: Vec<Vec<Rational>> = flag
            .basis
            .iter()
            .zip(&flag.levels)
            .filter(|(_, &lv)| lv <= s)
            .map(|(v, _)| v.clone())
            .collect();
        let mut span = d_s_basis.clone();
        let mut j = 1usize;
        'candidates: for g in d.generators() {
            for h in &flag.level_fields[s - 1] {
                if j > p_s {
                    break 'candidates;
                }
                let b = lie_bracket(g, h)?;
                let w: Vec<Rational> = b.eval(&base).iter().map(|c| -c).collect();
                if extends_span(&span, &w) {
                    span.push(w.clone());
                    chosen.push(Chosen {
                        s,
                        j,
                        tau_field: g.clone(),
                        eta_field: h.clone(),
                        eta: h.eval(&base),
                        zeta_prov: w,
                    });
                    j += 1;
                }
            }
        }
        if j <= p_s {
            return Err(HjetError::PairingNotSurjective { step: s });
        }
    }
    debug_assert_eq!(chosen.len(), p);

    // Provisional duality: T0 inverts the coframe values on the ζ's.
    let lx = d.coframe_at_base();
    let z_prov = ExactMatrix::from_fn(nn, p, |mu, k| chosen[k].zeta_prov[mu].clone());
    let t0 = lx
        .matmul(&z_prov)
        .right_inverse()
        .map_err(|_| HjetError::Internal("provisional frame does not complete the flag".into()))?;

    // Exact certificate matrix against the user coframe; tensorial, so a
    // constant extension of η is enough.
    let dl_column = |tau_field: &VectorField, eta: &[Rational]| -> Result<Vec<Rational>> {
        let eta_const = VectorField::constant(&vars, eta);
        let mut col = Vec::with_capacity(p);
        for l in d.coframe() {
            col.push(d_oneform_eval(l, tau_field, &eta_const)?.eval(&base));
        }
        Ok(col)
    };
    let mut u = ExactMatrix::zeros(p, p);
    for (k, c) in chosen.iter().enumerate() {
        for (i, v) in dl_column(&c.tau_field, &c.eta)?.into_iter().enumerate() {
            u.set(i, k, v);
        }
    }
    let v0 = t0.matmul(&u);

    // A constant recombination T0·λ misses the certificate target on
    // steps s >= 2 whenever the user coframe has degenerate dλ at the
    // base (this is exactly what the sheaf-level kernel condition would
    // rule out). First-order coefficients supply the missing freedom:
    // with rows λ^ρ = Σ_i (T0[ρ,i] + L_{ρ,i}) λ_user^i, L_{ρ,i} linear
    // and vanishing at the base, the certificate gains the tensorial term
    // ∂_τ L_{ρ,i}(x) · λ_user^i|_x(η). Solve for the gradients row by
    // row. Step-1 columns carry no freedom (λ_user|_x(η) = 0 for
    // horizontal η) and are already exact there.
    let taus: Vec<Vec<Rational>> = chosen.iter().map(|c| c.tau_field.eval(&base)).collect();
    let eta_coords: Vec<Vec<Rational>> = chosen.iter().map(|c| lx.mul_vec(&c.eta)).collect();
    let mut lin = vec![vec![MultiPoly::zero(&vars); p]; p];
    for rho in 0..p {
        let s_rho = chosen[rho].s;
        let cols: Vec<usize> = (0..p).filter(|&k| chosen[k].s <= s_rho).collect();
        let amat = ExactMatrix::from_fn(cols.len(), p * nn, |ci, col| {
            let k = cols[ci];
            let (i, mu) = (col / nn, col % nn);
            &eta_coords[k][i] * &taus[k][mu]
        });
        let rhs: Vec<Rational> = cols
            .iter()
            .map(|&k| {
                let target = if k == rho {
                    <Rational as One>::one()
                } else {
                    <Rational as Zero>::zero()
                };
                target - v0.get(rho, k)
            })
            .collect();
        let grad = amat.solve(&rhs).map_err(|_| {
            HjetError::Precondition(format!(
                "cannot realize the coframe certificate at step {s_rho}"
            ))
        })?;
        for i in 0..p {
            let mut ell = MultiPoly::zero(&vars);
            for mu in 0..nn {
                let c = &grad[i * nn + mu];
                if Zero::is_zero(c) {
                    continue;
                }
                let shifted = MultiPoly::var(&vars, mu)
                    .sub_poly(&MultiPoly::constant(&vars, base[mu].clone()));
                ell = ell.add_poly(&shifted.scale_poly(c));
            }
            lin[rho][i] = ell;
        }
    }
    let coframe: Vec<OneForm> = (0..p)
        .map(|rho| {
            let coeffs: Vec<MultiPoly> = (0..p)
                .map(|i| {
                    MultiPoly::constant(&vars, t0.get(rho, i).clone()).add_poly(&lin[rho][i])
                })
                .collect();
            OneForm::combine_poly(&coeffs, d.coframe())
        })
        .collect();

    // Certificate extensions: cancel the linear Taylor part of
    // λ^{s'>=s}(η̃) so that ζ + [τ̃, η̂]_x lies in 𝒟^s_x exactly.
    let mut pairs = Vec::with_capacity(p);
    for c in &chosen {
        let mut eta_hat = c.eta_field.clone();
        for i in 0..p {
            if chosen[i].s < c.s {
                continue;
            }
            let g = coframe[i].apply(&c.eta_field)?;
            let ell = linear_taylor_part(&g, &base);
            if ell.num_terms() == 0 {
                continue;
            }
            let zi = VectorField::constant(&vars, &chosen[i].zeta_prov);
            eta_hat = eta_hat.add_scaled(&ell.neg_poly(), &zi);
        }
        let bracket = lie_bracket(&c.tau_field, &eta_hat)?;
        pairs.push(FramePair {
            s: c.s,
            j: c.j,
            tau: c.tau_field.eval(&base),
            eta: c.eta.clone(),
            zeta: c.zeta_prov.clone(),
            tau_field: c.tau_field.clone(),
            eta_field: eta_hat.clone(),
            bracket_value: bracket.eval(&base),
        });
    }

    Ok(AdaptedFrameData {
        growth: gv,
        pairs,
        coframe,
        base,
    })
}

/// The requested growth vector must match the computed flag, allowing
/// trailing repeats of the full dimension (steps with p_s = 0).
fn check_growth_matches(
    flag: &GrowthVector,
    requested: &GrowthVector,
    bracket_generating: bool,
    dim: usize,
) -> Result<()> {
    if !bracket_generating {
        return Err(HjetError::Precondition(
            "distribution is not bracket-generating at the base point".into(),
        ));
    }
    let f = flag.entries();
    let q = requested.entries();
    let ok = q.len() >= f.len()
        && q[..f.len()] == *f
        && q[f.len()..].iter().all(|&m| m == dim);
    if ok {
        Ok(())
    } else {
        Err(HjetError::Precondition(format!(
            "requested growth vector {:?} does not match the computed flag {:?}",
            q, f
        )))
    }
}
