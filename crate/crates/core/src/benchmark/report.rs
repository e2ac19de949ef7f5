use std::io::Write;

use super::metrics::{PoseErrorSummary, AUC_THRESHOLDS_DEG};
use crate::formats::write_comment_header;
use crate::geom::AngularError;
use crate::FrameId;

#[derive(Clone, Debug, PartialEq)]
pub enum PairStatus {
    Ok,
    /// Estimation failed; the pair is scored as `+∞`.
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairResult {
    pub reference_trajectory: String,
    pub query_trajectory: String,
    pub reference: FrameId,
    pub query: FrameId,
    pub error: Option<AngularError>,
    pub status: PairStatus,
}

impl PairResult {
    /// Pose error in degrees, `+∞` on failure.
    pub fn pose_error_deg(&self) -> f64 {
        self.error.map_or(f64::INFINITY, |e| e.pose_error_deg)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

pub fn write_results_csv<W: Write>(w: &mut W, results: &[PairResult], provenance: &[String]) -> std::io::Result<()> {
    write_comment_header(w, provenance)?;
    writeln!(w, "ref_traj,query_traj,ref_frame,query_frame,rot_err_deg,trans_err_deg,pose_err_deg,status")?;
    for r in results {
        let status = match &r.status {
            PairStatus::Ok => "ok".to_string(),
            PairStatus::Failed(why) => format!("failed:{why}"),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.reference_trajectory,
            r.query_trajectory,
            r.reference,
            r.query,
            fmt_opt(r.error.map(|e| e.rotation_deg)),
            fmt_opt(r.error.and_then(|e| e.translation_deg)),
            r.pose_error_deg(),
            status
        )?;
    }
    Ok(())
}

/// Summary block: one `[ref -> query]` section per trajectory pair with
/// counts, median and AUCs, then the cross-domain means.
pub fn write_summary<W: Write>(w: &mut W, summary: &PoseErrorSummary, provenance: &[String]) -> std::io::Result<()> {
    write_comment_header(w, provenance)?;
    for ((r, q), s) in &summary.pairs {
        writeln!(w, "[{r} -> {q}]")?;
        writeln!(w, "pairs = {}", s.errors.len())?;
        writeln!(w, "failures = {}", s.failures)?;
        writeln!(w, "median_deg = {}", s.median_deg)?;
        for (t, a) in &s.auc {
            writeln!(w, "auc@{t} = {a}")?;
        }
    }
    if !summary.cross_domain.is_empty() {
        writeln!(w, "[cross_domain_mean_median_deg]")?;
        for (r, m) in &summary.cross_domain {
            writeln!(w, "{r} = {m}")?;
        }
    }
    Ok(())
}

/// Cumulative fraction of errors at or below each threshold from 0° to the
/// largest AUC threshold in 0.1° steps.
pub fn write_curve_csv<W: Write>(w: &mut W, errors: &[f64], provenance: &[String]) -> std::io::Result<()> {
    write_comment_header(w, provenance)?;
    writeln!(w, "threshold_deg,fraction")?;
    let max = AUC_THRESHOLDS_DEG[AUC_THRESHOLDS_DEG.len() - 1];
    let steps = (max * 10.0).round() as usize;
    for k in 0..=steps {
        let t = k as f64 / 10.0;
        let f = if errors.is_empty() { 0.0 } else { errors.iter().filter(|e| **e <= t).count() as f64 / errors.len() as f64 };
        writeln!(w, "{t},{f}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::summarize;
    use std::collections::BTreeMap;

    #[test]
    fn outputs_have_expected_shape() {
        let results = vec![
            PairResult {
                reference_trajectory: "a".into(),
                query_trajectory: "b".into(),
                reference: 0,
                query: 5,
                error: Some(AngularError::new(1.0, Some(2.0))),
                status: PairStatus::Ok,
            },
            PairResult {
                reference_trajectory: "a".into(),
                query_trajectory: "b".into(),
                reference: 10,
                query: 12,
                error: None,
                status: PairStatus::Failed("no_consensus".into()),
            },
        ];
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &results, &["v".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(2).unwrap(), "a,b,0,5,1,2,2,ok");
        assert_eq!(text.lines().nth(3).unwrap(), "a,b,10,12,NaN,NaN,inf,failed:no_consensus");

        let mut errs = BTreeMap::new();
        errs.insert(("a".to_string(), "b".to_string()), results.iter().map(PairResult::pose_error_deg).collect());
        let mut buf = Vec::new();
        write_summary(&mut buf, &summarize(&errs), &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("median_deg = inf") && text.contains("failures = 1") && text.contains("auc@5 = 0.3"));

        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &[1.0, 2.0], &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 202);
        assert_eq!(text.lines().last().unwrap(), "20,1");
    }
}
