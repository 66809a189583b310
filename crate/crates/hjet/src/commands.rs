//! Command layer: each command runs a pipeline over a problem file and
//! emits a schema-versioned report. Failures carry the pipeline stage
//! they occurred in.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::HjetError;
use crate::exactalg::unipoly::{RatFunc, UniPoly};
use crate::exactalg::rat_int;
use crate::geometry::{adapted_frame, flag_at_point, GrowthVector};
use crate::invop::{build_M, linearization, op_compose};
use crate::jets::{symbolic_fiber, TauLabel};
use crate::problem::ProblemFile;
use crate::regmat::{is_in_W_alpha, is_W_regular};
use crate::report::{
    rational_string, CertificateReport, CertifyReport, DesignatedReport, FlagReport,
    InversionReport, RegularityReport, Report, ScheduleReport, TauEntry, WAlphaReport,
    WitnessReport,
};
use crate::schedule::{
    adapted_distribution, build_B, check_C_structure, codim_witness_with_attempts, reduce_to_C,
    FrameLabel, SubframeSchedule,
};

/// Error with the pipeline stage it occurred in.
#[derive(Debug)]
pub struct StagedError {
    pub stage: &'static str,
    pub error: HjetError,
}

impl std::fmt::Display for StagedError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.error)
    }
}

pub type CmdResult = std::result::Result<Report, StagedError>;

fn st<T>(stage: &'static str, r: crate::Result<T>) -> std::result::Result<T, StagedError> {
    r.map_err(|error| StagedError { stage, error })
}

/// Process exit code for an error: 2 parse, 3 precondition, 4 negative
/// mathematical verdict, 5 internal inconsistency.
pub fn exit_code(error: &HjetError) -> i32 {
    match error {
        HjetError::Parse(_) => 2,
        HjetError::Precondition(_)
        | HjetError::DimensionMismatch(_)
        | HjetError::ArityMismatch { .. }
        | HjetError::InsufficientJetOrder { .. }
        | HjetError::QBelowThreshold { .. }
        | HjetError::AlphaBelowThreshold { .. }
        | HjetError::NonTangentFirstJet
        | HjetError::NotInDistribution
        | HjetError::CoframeRankDeficient
        | HjetError::ScheduleIndex(_) => 3,
        HjetError::NotRegular(_)
        | HjetError::RankDeficient { .. }
        | HjetError::PairingNotSurjective { .. }
        | HjetError::MissingIdPivot { .. }
        | HjetError::StructureViolation { .. } => 4,
        HjetError::WidthMismatch { .. } | HjetError::Internal(_) => 5,
    }
}

fn args(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Growth vector, step count and bracket-generating verdict at the base.
pub fn cmd_flag(problem: &ProblemFile, max_step: usize) -> CmdResult {
    let d = st("problem", problem.to_distribution())?;
    let flag = st("flag", flag_at_point(&d, max_step))?;
    let mut report = Report::new("flag", args(&[("max_step", max_step.to_string())]));
    let note = if flag.bracket_generating {
        None
    } else {
        Some(format!("not bracket-generating within max_step {max_step}"))
    };
    report.flag = Some(FlagReport {
        growth: flag.growth.entries().to_vec(),
        step: flag.growth.step(),
        rank: d.rank(),
        corank: d.corank(),
        dimension: d.dim(),
        bracket_generating: flag.bracket_generating,
        note,
    });
    report.verdict = Some(flag.bracket_generating);
    Ok(report)
}

/// Weak regularity of the problem's curve jet at level q, optionally
/// with membership in the order-alpha tangency class.
pub fn cmd_wcheck(problem: &ProblemFile, q: usize, alpha: Option<usize>) -> CmdResult {
    let d = st("problem", problem.to_distribution())?;
    let curve = st("problem", problem.to_curve())?.ok_or(StagedError {
        stage: "problem",
        error: HjetError::Precondition("regularity check needs a curve entry".into()),
    })?;
    let order = (q + 1).max(alpha.map(|a| a + 1).unwrap_or(0));
    let jet = curve.jet(&rat_int(0), order);
    let verdict = st("regularity", is_W_regular(&d, &jet, q))?;
    let mut report = Report::new(
        "wcheck",
        args(&[
            ("q", q.to_string()),
            (
                "alpha",
                alpha.map(|a| a.to_string()).unwrap_or_else(|| "-".into()),
            ),
        ]),
    );
    report.regularity = Some(RegularityReport {
        q,
        regular: verdict.regular,
        rank: verdict.rank,
        required_rank: verdict.required_rank,
        first_derivative_nonzero: verdict.first_derivative_nonzero,
        probabilistic: verdict.probabilistic,
        failure_probability: verdict.failure_probability.as_ref().map(rational_string),
        matrix_rows: d.corank() * (q + 2),
        matrix_cols: d.dim() * (q + 1),
    });
    let mut overall = verdict.regular;
    if let Some(alpha) = alpha {
        let wa = st("tangency", is_in_W_alpha(&d, &jet, alpha, q))?;
        overall = wa.member;
        report.w_alpha = Some(WAlphaReport {
            alpha,
            member: wa.member,
            failed_clause: wa.reason.map(|r| r.to_string()),
        });
    }
    report.verdict = Some(overall);
    Ok(report)
}

/// Right inverse of the linearization along the problem's curve,
/// verified exactly on the monomial basis through test_degree.
pub fn cmd_invert(problem: &ProblemFile, q: usize, test_degree: usize) -> CmdResult {
    if problem.coframe.is_empty() {
        let mut report = Report::new(
            "invert",
            args(&[
                ("q", q.to_string()),
                ("test_degree", test_degree.to_string()),
            ]),
        );
        report.notes.push("corank 0: nothing to invert".to_string());
        report.inversion = Some(InversionReport {
            q,
            order: 0,
            test_degree,
            monomials_checked: 0,
            residuals_zero: true,
            working_interval: ("-1".to_string(), "1".to_string()),
        });
        report.verdict = Some(true);
        return Ok(report);
    }
    let d = st("problem", problem.to_distribution())?;
    let curve = st("problem", problem.to_curve())?.ok_or(StagedError {
        stage: "problem",
        error: HjetError::Precondition("inversion needs a curve entry".into()),
    })?;
    let t0 = rat_int(0);
    let m = st("inversion", build_M(&d, &curve, &t0, q))?;
    let l = st("inversion", linearization(&d, &curve))?;
    let composite = st("inversion", op_compose(&l, &m))?;
    let p = d.corank();
    let mut residuals_zero = true;
    let mut checked = 0usize;
    for i in 0..p {
        for k in 0..=test_degree {
            let mut input = vec![RatFunc::zero(); p];
            let mut cs = vec![rat_int(0); k + 1];
            cs[k] = rat_int(1);
            input[i] = RatFunc::from_poly(UniPoly::new(cs));
            let out = st("inversion", composite.apply(&input))?;
            if out != input {
                residuals_zero = false;
            }
            checked += 1;
        }
    }
    let (lo, hi) = st("inversion", m.working_interval(&t0))?;
    let mut report = Report::new(
        "invert",
        args(&[
            ("q", q.to_string()),
            ("test_degree", test_degree.to_string()),
        ]),
    );
    report.inversion = Some(InversionReport {
        q,
        order: m.order(),
        test_degree,
        monomials_checked: checked,
        residuals_zero,
        working_interval: (rational_string(&lo), rational_string(&hi)),
    });
    report.verdict = Some(residuals_zero);
    Ok(report)
}

fn label_line(sched: &SubframeSchedule, label: &FrameLabel) -> String {
    match label {
        FrameLabel::FullZeta => "(zeta^*)".to_string(),
        FrameLabel::ZetaHatWithEta(s, j) => match sched.dropped_step(*s) {
            None => format!("(zeta^*, eta^{{{s},{j}}})"),
            Some(b) => format!("(zeta-hat^{{{b},*}}, eta^{{{s},{j}}})"),
        },
    }
}

/// Consecutive blocks with the same frame collapsed to one line each.
pub fn label_table(sched: &SubframeSchedule) -> Vec<String> {
    let labels = sched.labels();
    let mut out = Vec::new();
    let mut start = 0usize;
    for b in 1..=labels.len() {
        if b == labels.len() || labels[b] != labels[start] {
            let text = label_line(sched, &labels[start]);
            if b - 1 == start {
                out.push(format!("block {start}: {text}"));
            } else {
                out.push(format!("blocks {start}-{}: {text}", b - 1));
            }
            start = b;
        }
    }
    out
}

fn schedule_report(gv: &GrowthVector, sched: &SubframeSchedule) -> ScheduleReport {
    let mut tau_table = Vec::new();
    for lv in 1..=sched.q_final() {
        if let TauLabel::Tau(s, j) = sched.tau().label(lv) {
            tau_table.push(TauEntry {
                level: lv,
                s: *s,
                j: *j,
            });
        }
    }
    ScheduleReport {
        growth: gv.entries().to_vec(),
        passes: sched.passes(),
        q0: sched.q0(),
        q_values: sched.q_values().to_vec(),
        q_final: sched.q_final(),
        label_table: label_table(sched),
        tau_table,
        fresh_levels: (1..=sched.passes()).map(|i| sched.fresh_levels(i)).collect(),
    }
}

/// Block-label and free-direction tables for a growth vector.
pub fn cmd_schedule(growth: &[usize], passes: usize) -> CmdResult {
    let gv = st("parse", GrowthVector::new(growth.to_vec()))?;
    let sched = st("schedule", SubframeSchedule::build(&gv, passes))?;
    let mut report = Report::new(
        "schedule",
        args(&[
            (
                "growth",
                growth
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("K", passes.to_string()),
        ]),
    );
    report.schedule = Some(schedule_report(&gv, &sched));
    report.verdict = Some(true);
    Ok(report)
}

/// Full pipeline: flag, adapted frame, schedule, symbolic fiber, the
/// square minors with their triangular certificates, and a rational
/// witness of generic regularity.
pub fn cmd_certify(
    problem: &ProblemFile,
    passes: usize,
    seed: u64,
    max_step: usize,
    trials: usize,
) -> CmdResult {
    let d = st("problem", problem.to_distribution())?;
    let gv = match &problem.growth {
        Some(m) => st("problem", GrowthVector::new(m.clone()))?,
        None => {
            let flag = st("flag", flag_at_point(&d, max_step))?;
            if !flag.bracket_generating {
                return Err(StagedError {
                    stage: "flag",
                    error: HjetError::Precondition(format!(
                        "not bracket-generating within max_step {max_step}"
                    )),
                });
            }
            flag.growth
        }
    };
    let frame = st("frame", adapted_frame(&d, &gv))?;
    let sched = st("schedule", SubframeSchedule::build(&gv, passes))?;
    let dad = st("frame", adapted_distribution(&d, &frame))?;
    let first = frame.pairs[0].tau.clone();
    let jet = st(
        "fiber",
        symbolic_fiber(&dad, &first, sched.q_final(), sched.tau(), &frame),
    )?;
    let mut certificates = Vec::with_capacity(passes);
    for i in 1..=passes {
        let (b, blocks) = st("minor", build_B(&dad, &frame, &sched, i, &jet))?;
        let core = st("reduction", reduce_to_C(&b, &blocks, dad.corank()))?;
        let cert = st("certificate", check_C_structure(&core, &sched, i))?;
        certificates.push(CertificateReport {
            pass: i,
            q: sched.q_value(i),
            minor_size: b.rows(),
            core_size: cert.size,
            designated: cert
                .designated
                .iter()
                .map(|dg| DesignatedReport {
                    row: dg.row,
                    col: dg.col,
                    level: dg.level,
                    coeff: rational_string(&dg.coeff),
                })
                .collect(),
            column_order: cert.column_order.clone(),
            diagonal_integral: cert.diagonal_integral,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let witness = st(
        "witness",
        codim_witness_with_attempts(&d, &frame, &first, passes, trials, &mut rng),
    )?;
    let assignment: Vec<(usize, String)> = witness
        .assignment
        .iter()
        .enumerate()
        .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
        .map(|(idx, x)| (idx + 1, rational_string(x)))
        .collect();
    let mut report = Report::new(
        "certify",
        args(&[
            ("K", passes.to_string()),
            ("max_step", max_step.to_string()),
            ("trials", trials.to_string()),
        ]),
    );
    report.seed = Some(seed);
    report.certify = Some(CertifyReport {
        growth: gv.entries().to_vec(),
        passes,
        certificates,
        witness: WitnessReport {
            passes: witness.passes,
            q_values: witness.q_values.clone(),
            assignment,
            minor_values: witness.minor_values.iter().map(rational_string).collect(),
            fresh_levels: witness.fresh_levels.clone(),
            attempts: witness.attempts,
            regular: witness.regularity.regular,
            rank: witness.regularity.rank,
            required_rank: witness.regularity.required_rank,
        },
    });
    report.verdict = Some(true);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contact_problem() -> ProblemFile {
        ProblemFile::from_str(
            r#"{
            "schema": "hjet-problem/1",
            "dimension": 3,
            "coframe": [["-y2", "0", "1"]],
            "base": ["0", "0", "0"],
            "curve": [["0", "1"], ["0", "1"], ["0", "0", "1/2"]]
        }"#,
        )
        .unwrap()
    }

    fn engel_problem() -> ProblemFile {
        ProblemFile::from_str(
            r#"{
            "schema": "hjet-problem/1",
            "dimension": 4,
            "coframe": [["-y2", "0", "1", "0"], ["-y4", "1", "0", "0"]],
            "base": ["0", "0", "0", "0"]
        }"#,
        )
        .unwrap()
    }

    fn integrable_problem() -> ProblemFile {
        ProblemFile::from_str(
            r#"{
            "schema": "hjet-problem/1",
            "dimension": 3,
            "coframe": [["0", "0", "1"]],
            "base": ["0", "0", "0"]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn flag_reports_growth() {
        let r = cmd_flag(&contact_problem(), 4).unwrap();
        let f = r.flag.unwrap();
        assert_eq!(f.growth, vec![0, 2, 3]);
        assert!(f.bracket_generating);
        assert_eq!(r.verdict, Some(true));

        let r = cmd_flag(&engel_problem(), 4).unwrap();
        assert_eq!(r.flag.unwrap().growth, vec![0, 2, 3, 4]);

        let r = cmd_flag(&integrable_problem(), 4).unwrap();
        let f = r.flag.unwrap();
        assert!(!f.bracket_generating);
        assert!(f.note.unwrap().contains("not bracket-generating"));
        assert_eq!(r.verdict, Some(false));
    }

    #[test]
    fn wcheck_contact_curve() {
        let r = cmd_wcheck(&contact_problem(), 0, None).unwrap();
        let reg = r.regularity.unwrap();
        assert!(reg.regular);
        assert_eq!(reg.rank, 2);
        assert_eq!(r.verdict, Some(true));

        let r = cmd_wcheck(&contact_problem(), 0, Some(3)).unwrap();
        assert!(r.w_alpha.unwrap().member);
    }

    #[test]
    fn wcheck_needs_a_curve() {
        let e = cmd_wcheck(&engel_problem(), 0, None).unwrap_err();
        assert_eq!(e.stage, "problem");
        assert_eq!(exit_code(&e.error), 3);
    }

    #[test]
    fn invert_contact_has_zero_residuals() {
        let r = cmd_invert(&contact_problem(), 0, 3).unwrap();
        let inv = r.inversion.unwrap();
        assert!(inv.residuals_zero);
        assert_eq!(inv.monomials_checked, 4);
        assert_eq!(r.verdict, Some(true));
    }

    #[test]
    fn invert_flat_coframe_fails_regularity() {
        let mut p = integrable_problem();
        p.curve = contact_problem().curve;
        let e = cmd_invert(&p, 0, 3).unwrap_err();
        assert_eq!(e.stage, "inversion");
        assert_eq!(exit_code(&e.error), 4);
    }

    #[test]
    fn schedule_tables() {
        let r = cmd_schedule(&[0, 10, 12, 14], 1).unwrap();
        let s = r.schedule.unwrap();
        assert_eq!(s.q_final, 46);
        assert_eq!(s.label_table.len(), 13);
        assert_eq!(s.label_table[0], "block 0: (zeta^*)");
        assert_eq!(s.label_table[4], "blocks 4-7: (zeta^*)");
        assert_eq!(s.label_table[3], "block 3: (zeta-hat^{1,*}, eta^{2,1})");
        assert_eq!(s.tau_table.len(), 8);

        assert_eq!(cmd_schedule(&[0, 2, 3], 1).unwrap().schedule.unwrap().q_final, 1);
        assert_eq!(cmd_schedule(&[0, 2, 3, 4], 1).unwrap().schedule.unwrap().q_final, 6);
        let e = cmd_schedule(&[3, 2], 1).unwrap_err();
        assert_eq!(exit_code(&e.error), 3);
    }

    #[test]
    fn certify_engel_single_pass() {
        let r = cmd_certify(&engel_problem(), 1, 7, 4, 24).unwrap();
        let c = r.certify.unwrap();
        assert_eq!(c.certificates.len(), 1);
        assert_eq!(c.certificates[0].core_size, 3);
        assert!(c.witness.regular);
        assert_eq!(r.verdict, Some(true));
    }

    #[test]
    fn certify_contact_two_passes() {
        let r = cmd_certify(&contact_problem(), 2, 7, 4, 24).unwrap();
        let c = r.certify.unwrap();
        assert_eq!(c.witness.fresh_levels, vec![vec![1], vec![2]]);
        assert_eq!(c.certificates.len(), 2);
    }

    #[test]
    fn certify_rejects_integrable_at_flag_stage() {
        let e = cmd_certify(&integrable_problem(), 1, 7, 4, 24).unwrap_err();
        assert_eq!(e.stage, "flag");
        assert_eq!(exit_code(&e.error), 3);
    }

    #[test]
    fn reports_round_trip_and_are_deterministic() {
        let a = cmd_certify(&engel_problem(), 1, 42, 4, 24).unwrap();
        let b = cmd_certify(&engel_problem(), 1, 42, 4, 24).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let back = Report::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back.to_json().unwrap(), a.to_json().unwrap());
        assert!(!a.to_text().is_empty());
    }
}
