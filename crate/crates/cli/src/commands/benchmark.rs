use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use icdc_core::benchmark::{
    absolute_accuracy, estimate_relative_pose, keyframe_eval_with, summarize, write_curve_csv, write_results_csv,
    write_summary, KeyframePair, KeyframeParams, PairResult, PairStatus,
};
use icdc_core::correspondence::{read_csv, Method};
use icdc_core::formats::{read_poses, write_comment_header, PoseConvention};
use icdc_core::geom::{pose_error, rotation_angle_deg};
use icdc_core::seed::derive_seed;
use icdc_core::{FrameId, Pixel, Pose};
use rayon::prelude::*;

use super::correspond::generate;
use crate::error::{CliError, CliResult};
use crate::run::{read_text, write_file, Dataset, Run};

/// Where relative-pose correspondences come from.
pub enum Source {
    Generate(Method),
    /// Directory of `<ref>_<query>.csv` files.
    Directory(PathBuf),
}

impl Source {
    pub fn parse(s: &str) -> Self {
        match Method::parse(s) {
            Some(m @ (Method::Icdc | Method::SparseMap)) => Source::Generate(m),
            _ => Source::Directory(PathBuf::from(s)),
        }
    }
}

pub struct RelposeArgs {
    pub source: Source,
    pub reference_trajectory: Option<String>,
    pub query_trajectory: Option<String>,
}

fn trajectory_pairs(data: &Dataset, args: &RelposeArgs) -> CliResult<Vec<(String, String)>> {
    let all = data.map.trajectories();
    let check = |t: &String| {
        if all.contains(t) {
            Ok(vec![t.clone()])
        } else {
            Err(CliError::data(format!("unknown trajectory {t:?}")))
        }
    };
    let refs = args.reference_trajectory.as_ref().map_or(Ok(all.clone()), check)?;
    let queries = args.query_trajectory.as_ref().map_or(Ok(all.clone()), check)?;
    Ok(refs.iter().flat_map(|r| queries.iter().map(move |q| (r.clone(), q.clone()))).collect())
}

fn correspondences(run: &Run, data: &Dataset, source: &Source, p: &KeyframePair) -> CliResult<Vec<(Pixel, Pixel)>> {
    let pairs = match source {
        Source::Generate(m) => generate(run, data, *m, p.reference, p.query)?.pairs,
        Source::Directory(dir) => {
            let path = dir.join(format!("{}_{}.csv", p.reference, p.query));
            read_csv(&read_text(&path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        }
    };
    Ok(pairs.iter().map(|c| (c.p, c.q)).collect())
}

fn evaluate(run: &Run, data: &Dataset, source: &Source, p: &KeyframePair) -> CliResult<PairResult> {
    let pts = correspondences(run, data, source, p)?;
    let map = &data.map;
    let gt = Pose::relative(&map.frame(p.reference).map_err(CliError::data)?.pose, &map.frame(p.query).map_err(CliError::data)?.pose);
    let cam_i = map.camera_of(p.reference).map_err(CliError::data)?;
    let cam_j = map.camera_of(p.query).map_err(CliError::data)?;
    let cfg = run.cfg.ransac_config(derive_seed(run.seed, &[p.reference, p.query]));
    let (error, status) = match estimate_relative_pose(&pts, cam_i, cam_j, &cfg) {
        Ok(est) => (Some(pose_error(&gt, &est.pose)), PairStatus::Ok),
        Err(e) => (None, PairStatus::Failed(e.to_string().replace(',', ";"))),
    };
    Ok(PairResult {
        reference_trajectory: p.reference_trajectory.clone(),
        query_trajectory: p.query_trajectory.clone(),
        reference: p.reference,
        query: p.query,
        error,
        status,
    })
}

/// Keyframes every trajectory pair, estimates each relative pose and writes
/// per-pair results, a summary and one cumulative curve per trajectory pair.
pub fn relpose(run: &Run, args: &RelposeArgs) -> CliResult<()> {
    let data = Dataset::load(&run.cfg.paths)?;
    let k = &run.cfg.keyframes;
    let params = KeyframeParams {
        reference_spacing_m: k.reference_spacing_m,
        max_distance_m: k.max_distance_m,
        max_angle_deg: k.max_angle_deg,
        query_spacing_m: k.query_spacing_m,
    };
    let mut pairs = Vec::new();
    for (r, q) in trajectory_pairs(&data, args)? {
        pairs.extend(keyframe_eval_with(&data.map, &r, &q, params).map_err(CliError::data)?.pairs);
    }
    if pairs.is_empty() {
        return Err(CliError::data("keyframing produced no pairs"));
    }
    let results: Vec<PairResult> =
        pairs.par_iter().map(|p| evaluate(run, &data, &args.source, p)).collect::<CliResult<_>>()?;

    let mut errors: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for r in &results {
        errors.entry((r.reference_trajectory.clone(), r.query_trajectory.clone())).or_default().push(r.pose_error_deg());
    }
    let summary = summarize(&errors);
    let out = run.output()?;
    let header = run.header();
    write_file(&out.join("results.csv"), |w| write_results_csv(w, &results, &header))?;
    write_file(&out.join("summary.txt"), |w| write_summary(w, &summary, &header))?;
    for ((r, q), errs) in &errors {
        write_file(&out.join(format!("curve_{r}_{q}.csv")), |w| write_curve_csv(w, errs, &header))?;
    }
    let failed = results.iter().filter(|r| r.status != PairStatus::Ok).count();
    for ((r, q), s) in &summary.pairs {
        println!("relpose {r} -> {q}: pairs={} failures={} median_deg={}", s.errors.len(), s.failures, s.median_deg);
    }
    if failed == results.len() {
        return Err(CliError::Numerical(format!("estimation failed on all {failed} pairs")));
    }
    Ok(())
}

pub struct AbsposeArgs {
    pub world_from_camera: bool,
}

fn load_poses(path: &Path, conv: PoseConvention) -> CliResult<BTreeMap<FrameId, Pose>> {
    read_poses(&read_text(path)?, conv).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Scores estimated absolute poses against the ground-truth pose file.
pub fn abspose(run: &Run, args: &AbsposeArgs) -> CliResult<()> {
    let paths = &run.cfg.paths;
    let gt_path = match (&paths.poses, &paths.dataset) {
        (Some(p), _) => p.clone(),
        (None, Some(d)) => d.join("poses.txt"),
        (None, None) => return Err(CliError::config("no ground-truth poses: set --dataset or paths.poses")),
    };
    let est_path = paths
        .estimates
        .clone()
        .ok_or_else(|| CliError::config("no estimates given (--estimates or paths.estimates)"))?;
    let gt = load_poses(&gt_path, PoseConvention::CameraFromWorld)?;
    let conv = if args.world_from_camera { PoseConvention::WorldFromCamera } else { PoseConvention::CameraFromWorld };
    let est = load_poses(&est_path, conv)?;
    if gt.is_empty() {
        return Err(CliError::data(format!("{}: no poses", gt_path.display())));
    }
    let acc = absolute_accuracy(&gt, &est);
    let out = run.output()?;
    let header = run.header();
    write_file(&out.join("abspose_results.csv"), |w| {
        use std::io::Write;
        write_comment_header(w, &header)?;
        writeln!(w, "frame,position_err_m,rotation_err_deg,status")?;
        for (id, g) in &gt {
            match est.get(id) {
                Some(e) => writeln!(
                    w,
                    "{id},{},{},ok",
                    (g.center() - e.center()).norm(),
                    rotation_angle_deg(&g.rotation(), &e.rotation())
                )?,
                None => writeln!(w, "{id},NaN,NaN,missing")?,
            }
        }
        Ok(())
    })?;
    write_file(&out.join("abspose_summary.txt"), |w| {
        use std::io::Write;
        write_comment_header(w, &header)?;
        writeln!(w, "images = {}", acc.images)?;
        for (d, a, f) in &acc.fractions {
            writeln!(w, "within({d}m,{a}deg) = {f}")?;
        }
        Ok(())
    })?;
    let fr: Vec<String> = acc.fractions.iter().map(|(d, a, f)| format!("{d}m/{a}deg={f}")).collect();
    println!("abspose: images={} {}", acc.images, fr.join(" "));
    Ok(())
}
