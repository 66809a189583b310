//! Ready-made distributions used across tests and as CLI demo input:
//! the contact structure on ℚ³, the Engel structure on ℚ⁴, an integrable
//! plane field, and a corank-4 two-step structure on ℚ^14.

use crate::exactalg::poly::{var_set, MultiPoly, VarSet};
use crate::exactalg::{rat, rat_int, Rational};
use crate::geometry::{Distribution, OneForm, VectorField};

fn zeros(n: usize) -> Vec<Rational> {
    vec![rat_int(0); n]
}

fn form(vars: &VarSet, entries: &[(usize, MultiPoly)]) -> OneForm {
    let mut comps = vec![MultiPoly::zero(vars); vars.len()];
    for (idx, p) in entries {
        comps[*idx] = p.clone();
    }
    OneForm::new(comps)
}

fn field(vars: &VarSet, entries: &[(usize, MultiPoly)]) -> VectorField {
    let mut comps = vec![MultiPoly::zero(vars); vars.len()];
    for (idx, p) in entries {
        comps[*idx] = p.clone();
    }
    VectorField::new(comps)
}

/// Contact structure on ℚ³ with coordinates (x, y, z): λ = dz - y dx,
/// growth (0, 2, 3) at the origin.
pub fn contact_r3() -> Distribution {
    let vs = var_set("y", 3);
    let l = form(
        &vs,
        &[(0, MultiPoly::var(&vs, 1).neg_poly()), (2, MultiPoly::one(&vs))],
    );
    let gens = vec![
        field(&vs, &[(0, MultiPoly::one(&vs)), (2, MultiPoly::var(&vs, 1))]),
        VectorField::coordinate(&vs, 1),
    ];
    Distribution::new(&vs, vec![l], Some(gens), zeros(3)).unwrap()
}

/// Engel structure on ℚ⁴ with coordinates (x, y, z, w):
/// λ¹ = dz - y dx, λ² = dy - w dx, growth (0, 2, 3, 4) at the origin.
pub fn engel_r4() -> Distribution {
    let vs = var_set("y", 4);
    let l1 = form(
        &vs,
        &[(0, MultiPoly::var(&vs, 1).neg_poly()), (2, MultiPoly::one(&vs))],
    );
    let l2 = form(
        &vs,
        &[(0, MultiPoly::var(&vs, 3).neg_poly()), (1, MultiPoly::one(&vs))],
    );
    let gens = vec![
        VectorField::coordinate(&vs, 3),
        field(
            &vs,
            &[
                (0, MultiPoly::one(&vs)),
                (1, MultiPoly::var(&vs, 3)),
                (2, MultiPoly::var(&vs, 1)),
            ],
        ),
    ];
    Distribution::new(&vs, vec![l1, l2], Some(gens), zeros(4)).unwrap()
}

/// Integrable plane field span{∂_x, ∂_y} on ℚ³: the flag stabilizes at
/// dimension 2, so the structure is not bracket-generating.
pub fn integrable_r3() -> Distribution {
    let vs = var_set("y", 3);
    let l = form(&vs, &[(2, MultiPoly::one(&vs))]);
    Distribution::new(&vs, vec![l], None, zeros(3)).unwrap()
}

/// Corank-4 two-step structure on ℚ^14 with growth (0, 10, 12, 14) at the
/// origin. Coordinates: y1..y10, then z1, z2, w1, w2; the coframe is
/// λ¹ = dz1 - y1 dy2, λ² = dz2 - y1 dy3,
/// λ³ = dw1 - (y1²/2) dy2, λ⁴ = dw2 - (y1²/2) dy3.
pub fn two_step_r14() -> Distribution {
    let vs = var_set("y", 14);
    let y1 = MultiPoly::var(&vs, 0);
    let half_sq = y1.pow(2).scale_poly(&rat(1, 2));
    let l1 = form(&vs, &[(1, y1.neg_poly()), (10, MultiPoly::one(&vs))]);
    let l2 = form(&vs, &[(2, y1.neg_poly()), (11, MultiPoly::one(&vs))]);
    let l3 = form(&vs, &[(1, half_sq.neg_poly()), (12, MultiPoly::one(&vs))]);
    let l4 = form(&vs, &[(2, half_sq.neg_poly()), (13, MultiPoly::one(&vs))]);
    let mut gens = vec![VectorField::coordinate(&vs, 0)];
    gens.push(field(
        &vs,
        &[
            (1, MultiPoly::one(&vs)),
            (10, y1.clone()),
            (12, half_sq.clone()),
        ],
    ));
    gens.push(field(
        &vs,
        &[(2, MultiPoly::one(&vs)), (11, y1), (13, half_sq)],
    ));
    for i in 3..10 {
        gens.push(VectorField::coordinate(&vs, i));
    }
    Distribution::new(&vs, vec![l1, l2, l3, l4], Some(gens), zeros(14)).unwrap()
}
