//! Column-block frame schedules for the regularity matrix: the recursive
//! block labeling with its level bound, the prescribed-column square
//! minor B, the reduction to the core matrix C, the upper-triangular
//! certificate, and rational witness points for generic regularity.

// Matrix names follow the established notation (A, B, C).
#![allow(non_snake_case)]

use num_traits::Zero;
use rand::Rng;

use crate::error::{HjetError, Result};
use crate::exactalg::matrix::ExactMatrix;
use crate::exactalg::poly::MultiPoly;
use crate::exactalg::{rat_int, Rational, Scalar};
use crate::geometry::{AdaptedFrameData, Distribution, GrowthVector};
use crate::jets::{tangency_solve, CurveJet, TauAssignment, TauLabel};
use crate::regmat::{build_A, is_W_regular, min_q, RegularityVerdict};

/// Prescribed frame for one column block: either the full frame of zeta
/// directions, or the frame with the zeta group one step below (s, j)
/// removed and eta^{s,j} appended. Steps are indices into the original
/// growth vector, so zero-jump levels never appear as labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameLabel {
    FullZeta,
    ZetaHatWithEta(usize, usize),
}

/// Mutable labeling state: growth data with zero jumps compressed away,
/// per-block frame labels, and the free-direction assignment per level.
#[derive(Clone, Debug)]
pub struct ScheduleState {
    /// Nonzero jumps, in step order.
    jumps: Vec<usize>,
    /// Original step index of each nonzero jump.
    steps: Vec<usize>,
    labels: Vec<Option<FrameLabel>>,
    tau: Vec<TauLabel>,
    /// For each block carrying an eta column, the level whose free
    /// direction that column controls.
    tau_block_level: Vec<Option<usize>>,
}

impl ScheduleState {
    pub fn new(gv: &GrowthVector) -> Result<Self> {
        let mut jumps = Vec::new();
        let mut steps = Vec::new();
        for s in 1..=gv.step() {
            let p_s = gv.jump(s);
            if p_s > 0 {
                jumps.push(p_s);
                steps.push(s);
            }
        }
        if jumps.is_empty() {
            return Err(HjetError::Precondition(
                "growth vector has no jumps; nothing to schedule".into(),
            ));
        }
        Ok(ScheduleState {
            jumps,
            steps,
            labels: Vec::new(),
            tau: Vec::new(),
            tau_block_level: Vec::new(),
        })
    }

    /// Label blocks 0..=q0 with the full frame and zero the levels up to q0.
    pub fn seed(&mut self, q0: usize) -> Result<()> {
        for b in 0..=q0 {
            self.set_label(b, FrameLabel::FullZeta)?;
        }
        for lv in 1..=q0 {
            self.set_tau(lv, TauLabel::Zero)?;
        }
        Ok(())
    }

    fn set_label(&mut self, q: usize, label: FrameLabel) -> Result<()> {
        if self.labels.len() <= q {
            self.labels.resize(q + 1, None);
        }
        if self.labels[q].is_some() {
            return Err(HjetError::ScheduleIndex(format!("block {q} labeled twice")));
        }
        self.labels[q] = Some(label);
        Ok(())
    }

    fn set_tau(&mut self, q: usize, label: TauLabel) -> Result<()> {
        if q == 0 {
            return Err(HjetError::ScheduleIndex("free directions start at level 1".into()));
        }
        if self.tau.len() < q {
            self.tau.resize(q, TauLabel::Zero);
        }
        if self.tau[q - 1] != TauLabel::Zero && self.tau[q - 1] != label {
            return Err(HjetError::ScheduleIndex(format!("level {q} assigned twice")));
        }
        self.tau[q - 1] = label;
        Ok(())
    }

    fn set_tau_block_level(&mut self, block: usize, level: usize) {
        if self.tau_block_level.len() <= block {
            self.tau_block_level.resize(block + 1, None);
        }
        self.tau_block_level[block] = Some(level);
    }

    /// Label block q with (zeta-hat^{s-1,•}, eta^{s,j}) and assign the
    /// free direction tau^{s,j} at level q - d, then recurse through the
    /// lower steps. Indices (s, j) are compressed: s counts nonzero
    /// jumps only. Filler blocks between recursive calls get the full
    /// frame and a zero level; the back-assigned level of each recursive
    /// call stays untouched. Returns the last block labeled.
    pub fn choose_subframe(&mut self, q: usize, s: usize, j: usize, d: usize) -> Result<usize> {
        if s < 1 || s > self.jumps.len() || j < 1 || j > self.jumps[s - 1] {
            return Err(HjetError::ScheduleIndex(format!(
                "subframe index (s, j) = ({s}, {j}) out of range"
            )));
        }
        if d > 0 && d >= q {
            return Err(HjetError::ScheduleIndex(format!(
                "back-assignment distance {d} reaches below level 1 from block {q}"
            )));
        }
        let step = self.steps[s - 1];
        if d == 0 {
            self.set_tau(q, TauLabel::Tau(step, j))?;
            self.set_tau_block_level(q, q);
        } else {
            self.set_tau(q, TauLabel::Zero)?;
            self.set_tau(q - d, TauLabel::Tau(step, j))?;
            self.set_tau_block_level(q, q - d);
        }
        self.set_label(q, FrameLabel::ZetaHatWithEta(step, j))?;
        let q0_local = q;
        let mut q = q;
        let pred = if s == 1 { 0 } else { self.jumps[s - 2] };
        for a in 1..=pred {
            for b in 1..=q0_local + 1 {
                self.set_label(q + b, FrameLabel::FullZeta)?;
                self.set_tau(q + b, TauLabel::Zero)?;
            }
            q = self.choose_subframe(q + q0_local + 2, s - 1, a, q0_local + 1)?;
        }
        Ok(q)
    }

    /// One full pass over all (s, j) starting at block q_start; returns
    /// the last block labeled.
    pub fn choose_all_subframes(&mut self, q_start: usize) -> Result<usize> {
        let mut q = q_start;
        for s in 1..=self.jumps.len() {
            for j in 1..=self.jumps[s - 1] {
                q = self.choose_subframe(q, s, j, 0)? + 1;
            }
        }
        Ok(q - 1)
    }
}

/// Complete schedule for a number of passes: cumulative block labels,
/// the level assignment, and the last block of every pass. The square
/// minor of pass i reads blocks 0..=q_i with every block at or before
/// q_{i-1} reset to the full frame, which restores the width identity
/// sum = p(q_i + 2) for each pass separately.
#[derive(Clone, Debug)]
pub struct SubframeSchedule {
    jumps: Vec<usize>,
    steps: Vec<usize>,
    p: usize,
    q0: usize,
    q_values: Vec<usize>,
    labels: Vec<FrameLabel>,
    tau: TauAssignment,
    tau_block_level: Vec<Option<usize>>,
}

impl SubframeSchedule {
    pub fn build(gv: &GrowthVector, passes: usize) -> Result<Self> {
        if passes == 0 {
            return Err(HjetError::Precondition(
                "a schedule needs at least one pass".into(),
            ));
        }
        let mut st = ScheduleState::new(gv)?;
        let q0 = min_q(gv.rank(), gv.corank());
        st.seed(q0)?;
        let mut q = q0;
        let mut q_values = Vec::with_capacity(passes);
        for _ in 0..passes {
            q = st.choose_all_subframes(q + 1)?;
            q_values.push(q);
        }
        let q_final = q;
        if st.labels.len() != q_final + 1 || st.labels.iter().any(|l| l.is_none()) {
            return Err(HjetError::Internal("schedule left an unlabeled block".into()));
        }
        if st.tau.len() != q_final {
            return Err(HjetError::Internal("schedule left an unassigned level".into()));
        }
        let labels: Vec<FrameLabel> = st.labels.into_iter().map(|l| l.unwrap()).collect();
        let mut tau = TauAssignment::zeros(q_final);
        for (idx, l) in st.tau.iter().enumerate() {
            if *l != TauLabel::Zero {
                tau.set(idx + 1, l.clone());
            }
        }
        let mut tau_block_level = st.tau_block_level;
        tau_block_level.resize(q_final + 1, None);
        let sched = SubframeSchedule {
            jumps: st.jumps,
            steps: st.steps,
            p: gv.corank(),
            q0,
            q_values,
            labels,
            tau,
            tau_block_level,
        };
        for i in 1..=passes {
            let got = sched.level_width_sum(i);
            let expected = sched.p * (sched.q_value(i) + 2);
            if got != expected {
                return Err(HjetError::WidthMismatch { got, expected });
            }
        }
        Ok(sched)
    }

    pub fn q0(&self) -> usize {
        self.q0
    }

    pub fn passes(&self) -> usize {
        self.q_values.len()
    }

    pub fn corank(&self) -> usize {
        self.p
    }

    pub fn q_values(&self) -> &[usize] {
        &self.q_values
    }

    /// Last block of pass `level` (1-based).
    pub fn q_value(&self, level: usize) -> usize {
        assert!(1 <= level && level <= self.q_values.len(), "pass out of range");
        self.q_values[level - 1]
    }

    pub fn q_final(&self) -> usize {
        *self.q_values.last().unwrap()
    }

    /// Cumulative label of a block (the label it received when created).
    pub fn label(&self, block: usize) -> &FrameLabel {
        &self.labels[block]
    }

    pub fn labels(&self) -> &[FrameLabel] {
        &self.labels
    }

    /// Last block owned by passes before `level` (the seed for level 1).
    fn prev_q(&self, level: usize) -> usize {
        if level == 1 {
            self.q0
        } else {
            self.q_value(level - 1)
        }
    }

    /// Label of a block in the pass-`level` minor: blocks of earlier
    /// passes are reset to the full frame.
    pub fn level_label(&self, level: usize, block: usize) -> FrameLabel {
        assert!(block <= self.q_value(level), "block out of range for pass");
        if block <= self.prev_q(level) {
            FrameLabel::FullZeta
        } else {
            self.labels[block].clone()
        }
    }

    pub fn tau(&self) -> &TauAssignment {
        &self.tau
    }

    /// Level whose free direction the eta column of this block controls.
    pub fn tau_level_of_block(&self, block: usize) -> Option<usize> {
        self.tau_block_level.get(block).copied().flatten()
    }

    /// Original step whose zeta group is dropped under this eta label:
    /// the nearest lower step with a nonzero jump.
    pub fn dropped_step(&self, s: usize) -> Option<usize> {
        let i = self
            .steps
            .iter()
            .position(|&t| t == s)
            .expect("step carries no jump");
        if i == 0 {
            None
        } else {
            Some(self.steps[i - 1])
        }
    }

    pub fn width(&self, label: &FrameLabel) -> usize {
        match label {
            FrameLabel::FullZeta => self.p,
            FrameLabel::ZetaHatWithEta(s, _) => {
                let i = self
                    .steps
                    .iter()
                    .position(|t| t == s)
                    .expect("step carries no jump");
                let dropped = if i == 0 { 0 } else { self.jumps[i - 1] };
                self.p - dropped + 1
            }
        }
    }

    pub fn level_width_sum(&self, level: usize) -> usize {
        (0..=self.q_value(level))
            .map(|m| self.width(&self.level_label(level, m)))
            .sum()
    }

    /// Levels with a nonzero free direction introduced by pass `level`;
    /// these are exactly the indeterminates the pass-`level` minor is
    /// designated on, and they are disjoint from all earlier passes.
    pub fn fresh_levels(&self, level: usize) -> Vec<usize> {
        let lo = self.prev_q(level);
        let hi = self.q_value(level);
        (lo + 1..=hi)
            .filter_map(|m| self.tau_level_of_block(m))
            .collect()
    }
}

/// Last block of the schedule with the given number of passes.
pub fn q_bound(gv: &GrowthVector, passes: usize) -> Result<usize> {
    Ok(SubframeSchedule::build(gv, passes)?.q_final())
}

/// The distribution presented in the adapted coframe, which is dual to
/// the zeta frame at the base. Prescribed-column minors need this
/// presentation so that the off-diagonal blocks carry exact identity
/// pivots.
pub fn adapted_distribution(d: &Distribution, frame: &AdaptedFrameData) -> Result<Distribution> {
    Distribution::new(
        d.vars(),
        frame.coframe.clone(),
        Some(d.generators().to_vec()),
        d.base().to_vec(),
    )
}

/// One column block of the prescribed minor: which frame it carries,
/// where its columns live, the identity pivots its zeta columns produce
/// one row-block down, and its eta column if any.
#[derive(Clone, Debug)]
pub struct ColumnBlock {
    pub block: usize,
    pub label: FrameLabel,
    pub col_start: usize,
    pub width: usize,
    /// (row, column) of the exact 1 under each zeta column.
    pub id_pivots: Vec<(usize, usize)>,
    /// (column, s, j) of the eta column.
    pub eta: Option<(usize, usize, usize)>,
}

enum ColKind {
    Zeta(usize),
    Eta(usize, usize),
}

fn prescribed_columns(
    frame: &AdaptedFrameData,
    sched: &SubframeSchedule,
    label: &FrameLabel,
) -> Vec<(Vec<Rational>, ColKind)> {
    match label {
        FrameLabel::FullZeta => frame
            .pairs
            .iter()
            .enumerate()
            .map(|(flat, pr)| (pr.zeta.clone(), ColKind::Zeta(flat)))
            .collect(),
        FrameLabel::ZetaHatWithEta(s, j) => {
            let dropped = sched.dropped_step(*s);
            let mut out: Vec<(Vec<Rational>, ColKind)> = frame
                .pairs
                .iter()
                .enumerate()
                .filter(|(_, pr)| Some(pr.s) != dropped)
                .map(|(flat, pr)| (pr.zeta.clone(), ColKind::Zeta(flat)))
                .collect();
            out.push((frame.pair(*s, *j).eta.clone(), ColKind::Eta(*s, *j)));
            out
        }
    }
}

/// Square minor of the regularity matrix for one pass: each column
/// block is rewritten in its prescribed frame and only the prescribed
/// columns are kept, so the result has size p(q + 2) with q the last
/// block of the pass. Frame extension columns never enter the minor.
/// The distribution must be in the adapted coframe presentation.
pub fn build_B<S: Scalar>(
    d: &Distribution,
    frame: &AdaptedFrameData,
    sched: &SubframeSchedule,
    level: usize,
    jet: &CurveJet<S>,
) -> Result<(ExactMatrix<S>, Vec<ColumnBlock>)> {
    let q = sched.q_value(level);
    let p = d.corank();
    let nn = d.dim();
    if p != sched.corank() || frame.pairs.len() != p {
        return Err(HjetError::DimensionMismatch(
            "schedule and frame corank must match the distribution".into(),
        ));
    }
    let size = p * (q + 2);
    let got = sched.level_width_sum(level);
    if got != size {
        return Err(HjetError::WidthMismatch { got, expected: size });
    }
    let a = build_A(d, &jet.truncate(q + 1), q)?;
    let proto = jet.deriv(0)[0].zero();
    let mut b = ExactMatrix::filled(size, size, proto.clone());
    let mut blocks = Vec::with_capacity(q + 1);
    let mut col = 0usize;
    for m in 0..=q {
        let label = sched.level_label(level, m);
        let col_start = col;
        let mut id_pivots = Vec::new();
        let mut eta = None;
        for (w, kind) in prescribed_columns(frame, sched, &label) {
            for row in 0..size {
                let mut e = proto.zero();
                for (mu, wmu) in w.iter().enumerate() {
                    if Zero::is_zero(wmu) {
                        continue;
                    }
                    e = e.add(&a.matrix().get(row, m * nn + mu).scale(wmu));
                }
                b.set(row, col, e);
            }
            match kind {
                ColKind::Zeta(flat) => id_pivots.push(((m + 1) * p + flat, col)),
                ColKind::Eta(s, j) => eta = Some((col, s, j)),
            }
            col += 1;
        }
        blocks.push(ColumnBlock {
            block: m,
            label,
            col_start,
            width: col - col_start,
            id_pivots,
            eta,
        });
    }
    debug_assert_eq!(col, size);
    Ok((b, blocks))
}

/// Core matrix left after pivoting out the identity blocks, with its
/// surviving row labels (row block, coframe row) and column labels
/// (column block, s, j) of the eta columns.
#[derive(Clone, Debug)]
pub struct CoreMatrix<S: Scalar> {
    pub mat: ExactMatrix<S>,
    pub rows: Vec<(usize, usize)>,
    pub cols: Vec<(usize, usize, usize)>,
}

/// Eliminate with the exact identity pivots from the bottom-right block
/// to the top-left, then delete the pivot rows and columns. The
/// eliminations are unimodular, so det of the input equals det of the
/// core up to sign.
pub fn reduce_to_C<S: Scalar>(
    b: &ExactMatrix<S>,
    blocks: &[ColumnBlock],
    p: usize,
) -> Result<CoreMatrix<S>> {
    let n = b.rows();
    if b.cols() != n {
        return Err(HjetError::DimensionMismatch(
            "prescribed minor must be square".into(),
        ));
    }
    let mut work = b.clone();
    let mut is_pivot_row = vec![false; n];
    let mut is_pivot_col = vec![false; n];
    for blk in blocks.iter().rev() {
        for &(r, c) in blk.id_pivots.iter().rev() {
            let e = work.get(r, c);
            if !e.sub(&e.one()).is_zero() {
                return Err(HjetError::MissingIdPivot { row: r, col: c });
            }
            let prow: Vec<(usize, S)> = (0..n)
                .filter_map(|cc| {
                    let v = work.get(r, cc);
                    if v.is_zero() {
                        None
                    } else {
                        Some((cc, v.clone()))
                    }
                })
                .collect();
            for rr in 0..n {
                if rr == r {
                    continue;
                }
                let f = work.get(rr, c).clone();
                if f.is_zero() {
                    continue;
                }
                for (cc, pv) in &prow {
                    let cur = work.get(rr, *cc).sub(&f.mul(pv));
                    work.set(rr, *cc, cur);
                }
            }
            is_pivot_row[r] = true;
            is_pivot_col[c] = true;
        }
    }
    let kept_rows: Vec<usize> = (0..n).filter(|&r| !is_pivot_row[r]).collect();
    let kept_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot_col[c]).collect();
    let mut col_label = vec![None; n];
    for blk in blocks {
        if let Some((c, s, j)) = blk.eta {
            col_label[c] = Some((blk.block, s, j));
        }
    }
    let mut cols = Vec::with_capacity(kept_cols.len());
    for &c in &kept_cols {
        cols.push(col_label[c].ok_or_else(|| {
            HjetError::Internal("surviving column is not an eta column".into())
        })?);
    }
    let rows: Vec<(usize, usize)> = kept_rows.iter().map(|&r| (r / p, r % p)).collect();
    Ok(CoreMatrix {
        mat: work.submatrix(&kept_rows, &kept_cols),
        rows,
        cols,
    })
}

/// One certified entry of the core matrix: the sole constant-coefficient
/// linear occurrence of its column's indeterminate.
#[derive(Clone, Debug)]
pub struct Designated {
    pub row: usize,
    pub col: usize,
    /// Level q of the indeterminate X_q.
    pub level: usize,
    pub coeff: Rational,
}

/// Certificate that the core matrix is generically invertible: each row
/// has a unique designated entry c X_q + (terms in X_1..X_{q-1}), the
/// indeterminate appears nowhere to the left or below, and the matrix of
/// designated coefficients is upper triangular with nonzero diagonal
/// after the column permutation.
#[derive(Clone, Debug)]
pub struct TriangularCertificate {
    pub size: usize,
    pub designated: Vec<Designated>,
    /// Column of the designated entry of each row, in row order.
    pub column_order: Vec<usize>,
    pub ctilde: ExactMatrix<Rational>,
    pub diagonal_integral: bool,
}

/// Check the occurrence structure of a core matrix built from a
/// symbolic fiber jet against the pass-`level` schedule.
pub fn check_C_structure(
    core: &CoreMatrix<MultiPoly>,
    sched: &SubframeSchedule,
    level: usize,
) -> Result<TriangularCertificate> {
    let size = core.mat.rows();
    if core.mat.cols() != size {
        return Err(HjetError::DimensionMismatch("core matrix must be square".into()));
    }
    let fresh = sched.fresh_levels(level);
    if size != fresh.len() {
        return Err(HjetError::DimensionMismatch(format!(
            "core matrix has size {size}, pass assigns {} free directions",
            fresh.len()
        )));
    }
    let mut col_level = Vec::with_capacity(size);
    for (m, _, _) in &core.cols {
        col_level.push(sched.tau_level_of_block(*m).ok_or_else(|| {
            HjetError::Internal("eta column block carries no level".into())
        })?);
    }
    if col_level.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HjetError::Internal("column levels out of order".into()));
    }
    if col_level != fresh {
        return Err(HjetError::Internal(
            "column levels do not match the pass assignment".into(),
        ));
    }
    let mut designated: Vec<Designated> = Vec::with_capacity(size);
    let mut col_used = vec![false; size];
    for i in 0..size {
        let mut found: Option<(usize, Rational)> = None;
        for (jc, lv) in col_level.iter().enumerate() {
            let v = lv - 1;
            let e = core.mat.get(i, jc);
            let present = e.vars_present();
            if !present.contains(&v) || *present.iter().max().unwrap() != v {
                continue;
            }
            if e.degree_in(v) != 1 {
                continue;
            }
            let lc = e.linear_coefficient_in(v);
            if !lc.is_constant() {
                continue;
            }
            let c = lc.constant_term();
            if Zero::is_zero(&c) {
                continue;
            }
            if found.is_some() {
                return Err(HjetError::StructureViolation {
                    row: i,
                    col: jc,
                    reason: "second designated entry in the same row".into(),
                });
            }
            found = Some((jc, c));
        }
        let (jc, c) = found.ok_or(HjetError::StructureViolation {
            row: i,
            col: 0,
            reason: "row has no designated entry".into(),
        })?;
        if col_used[jc] {
            return Err(HjetError::StructureViolation {
                row: i,
                col: jc,
                reason: "designated column reused".into(),
            });
        }
        col_used[jc] = true;
        designated.push(Designated {
            row: i,
            col: jc,
            level: col_level[jc],
            coeff: c,
        });
    }
    for dsg in &designated {
        let v = dsg.level - 1;
        for jc in 0..dsg.col {
            for i in 0..size {
                if core.mat.get(i, jc).vars_present().contains(&v) {
                    return Err(HjetError::StructureViolation {
                        row: i,
                        col: jc,
                        reason: format!("X_{} appears left of its designated column", dsg.level),
                    });
                }
            }
        }
        for i in dsg.row + 1..size {
            if core.mat.get(i, dsg.col).vars_present().contains(&v) {
                return Err(HjetError::StructureViolation {
                    row: i,
                    col: dsg.col,
                    reason: format!("X_{} appears below its designated row", dsg.level),
                });
            }
        }
    }
    let column_order: Vec<usize> = designated.iter().map(|d| d.col).collect();
    let ctilde = ExactMatrix::from_fn(size, size, |a, bi| {
        let jc = column_order[bi];
        let lc = core.mat.get(a, jc).linear_coefficient_in(col_level[jc] - 1);
        if lc.is_constant() {
            lc.constant_term()
        } else {
            <Rational as Zero>::zero()
        }
    });
    for a in 0..size {
        for bi in 0..a {
            if !Zero::is_zero(ctilde.get(a, bi)) {
                return Err(HjetError::StructureViolation {
                    row: a,
                    col: column_order[bi],
                    reason: "certificate coefficient below the diagonal".into(),
                });
            }
        }
        if Zero::is_zero(ctilde.get(a, a)) {
            return Err(HjetError::StructureViolation {
                row: a,
                col: column_order[a],
                reason: "certificate diagonal vanishes".into(),
            });
        }
    }
    let diagonal_integral = (0..size).all(|a| ctilde.get(a, a).is_integer());
    Ok(TriangularCertificate {
        size,
        designated,
        column_order,
        ctilde,
        diagonal_integral,
    })
}

/// Witness that the non-regular locus in the tangency fiber has
/// codimension at least the number of passes: a rational assignment of
/// the free scalars at which every pass minor has nonzero determinant,
/// together with the fresh levels of each pass and the regularity
/// verdict at the final level.
#[derive(Clone, Debug)]
pub struct CodimWitness {
    pub passes: usize,
    pub q_values: Vec<usize>,
    /// Value of X_q at index q - 1; zero levels stay zero.
    pub assignment: Vec<Rational>,
    /// det B_i at the assignment, one per pass, all nonzero.
    pub minor_values: Vec<Rational>,
    /// Levels introduced by each pass, disjoint and nonempty.
    pub fresh_levels: Vec<Vec<usize>>,
    pub attempts: usize,
    pub regularity: RegularityVerdict,
}

const WITNESS_ATTEMPTS: usize = 24;

/// Search for a regularity witness by sampling the free scalars of the
/// schedule. Every pass minor is evaluated on the specialized rational
/// jet; a vanishing determinant triggers a resample.
pub fn codim_witness(
    d: &Distribution,
    frame: &AdaptedFrameData,
    first_jet: &[Rational],
    passes: usize,
    rng: &mut impl Rng,
) -> Result<CodimWitness> {
    codim_witness_with_attempts(d, frame, first_jet, passes, WITNESS_ATTEMPTS, rng)
}

/// Witness search with an explicit retry budget.
pub fn codim_witness_with_attempts(
    d: &Distribution,
    frame: &AdaptedFrameData,
    first_jet: &[Rational],
    passes: usize,
    max_attempts: usize,
    rng: &mut impl Rng,
) -> Result<CodimWitness> {
    let sched = SubframeSchedule::build(&frame.growth, passes)?;
    let dad = adapted_distribution(d, frame)?;
    let qk = sched.q_final();
    let lx = dad.coframe_at_base();
    let kernel = lx.kernel_basis();
    let kmat = ExactMatrix::from_fn(dad.dim(), kernel.len(), |mu, i| kernel[i][mu].clone());
    let mut coords: Vec<Option<Vec<Rational>>> = Vec::with_capacity(qk);
    for lv in 1..=qk {
        let dir = match sched.tau().label(lv) {
            TauLabel::Zero => {
                coords.push(None);
                continue;
            }
            TauLabel::Tau(s, j) => frame.pair(*s, *j).tau.clone(),
            TauLabel::Vector(v) => v.clone(),
        };
        coords.push(Some(
            kmat.solve(&dir).map_err(|_| HjetError::NotInDistribution)?,
        ));
    }
    let fresh_levels: Vec<Vec<usize>> = (1..=passes).map(|i| sched.fresh_levels(i)).collect();
    if fresh_levels.iter().any(|f| f.is_empty()) {
        return Err(HjetError::Internal("a pass introduced no fresh level".into()));
    }
    for attempt in 1..=max_attempts {
        let mut assignment = vec![rat_int(0); qk];
        let mut free = Vec::with_capacity(qk);
        for lv in 1..=qk {
            match &coords[lv - 1] {
                None => free.push(vec![rat_int(0); kernel.len()]),
                Some(cs) => {
                    let x = rat_int(rng.random_range(1..=1_000_000i64));
                    free.push(cs.iter().map(|c| c * &x).collect());
                    assignment[lv - 1] = x;
                }
            }
        }
        let jet = tangency_solve(&dad, first_jet, qk, &free)?;
        let mut minor_values = Vec::with_capacity(passes);
        let mut ok = true;
        for i in 1..=passes {
            let qi = sched.q_value(i);
            let (bi, _) = build_B::<Rational>(&dad, frame, &sched, i, &jet.truncate(qi + 1))?;
            let det = bi.det_bareiss();
            if Zero::is_zero(&det) {
                ok = false;
                break;
            }
            minor_values.push(det);
        }
        if !ok {
            continue;
        }
        let regularity = is_W_regular(&dad, &jet, qk)?;
        if !regularity.regular {
            continue;
        }
        return Ok(CodimWitness {
            passes,
            q_values: sched.q_values().to_vec(),
            assignment,
            minor_values,
            fresh_levels,
            attempts: attempt,
            regularity,
        });
    }
    Err(HjetError::NotRegular(format!(
        "no regularity witness found in {max_attempts} attempts"
    )))
}
