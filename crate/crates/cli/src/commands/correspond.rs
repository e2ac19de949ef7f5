use std::path::PathBuf;

use icdc_core::correspondence::{
    homography_correspondences, icdc, sparse_map_correspondences, write_binary, write_csv, write_meta,
    ConsistencyThresholds, CorrespondenceSet, FramePair, Method,
};
use icdc_core::geom::Homography;
use icdc_core::{FrameId, Pose};
use nalgebra::Matrix3;

use crate::error::{CliError, CliResult};
use crate::run::{write_file, Dataset, Run};

pub struct CorrespondArgs {
    pub reference: FrameId,
    pub query: FrameId,
    pub out: Option<PathBuf>,
    pub binary: bool,
}

pub fn method(run: &Run) -> CliResult<Method> {
    let name = &run.cfg.correspond.method;
    Method::parse(name).ok_or_else(|| CliError::config(format!("unknown method {name:?} (icdc, homography, sparse-map)")))
}

/// Builds one correspondence set between two dataset frames.
pub fn generate(run: &Run, data: &Dataset, method: Method, reference: FrameId, query: FrameId) -> CliResult<CorrespondenceSet> {
    let map = &data.map;
    let fi = map.frame(reference).map_err(CliError::data)?;
    let fj = map.frame(query).map_err(CliError::data)?;
    let cam_i = map.camera_of(reference).map_err(CliError::data)?;
    let cam_j = map.camera_of(query).map_err(CliError::data)?;
    let frames = FramePair { reference, query, domain_pair: (fi.trajectory.clone(), fj.trajectory.clone()) };
    let c = &run.cfg.correspond;
    let set = match method {
        Method::Icdc => {
            let thresholds = ConsistencyThresholds::new(c.alpha_px, c.beta_m).map_err(CliError::config)?;
            let t_ji = Pose::relative(&fi.pose, &fj.pose);
            icdc(&frames, &data.depth(reference)?, &data.depth(query)?, cam_i, cam_j, &t_ji, &thresholds, c.stride)
        }
        Method::Homography => {
            let h = Homography::new(Matrix3::from_row_slice(&c.homography)).map_err(CliError::config)?;
            homography_correspondences(&frames, cam_i, &h, c.stride)
        }
        Method::SparseMap => sparse_map_correspondences(map, reference, query),
    };
    set.map_err(CliError::data)
}

fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the CSV, a `.meta` sidecar and optionally a `.bin` twin, then
/// prints the filter counts.
pub fn run(run: &Run, args: &CorrespondArgs) -> CliResult<()> {
    let method = method(run)?;
    let data = Dataset::load(&run.cfg.paths)?;
    let set = generate(run, &data, method, args.reference, args.query)?;
    let out = match &args.out {
        Some(p) => p.clone(),
        None => run.output()?.join(format!("corr_{}_{}.csv", args.reference, args.query)),
    };
    let header = run.header();
    write_file(&out, |w| write_csv(w, &set, &header))?;
    write_file(&with_suffix(&out, ".meta"), |w| write_meta(w, &set, &header))?;
    if args.binary {
        write_file(&with_suffix(&out, ".bin"), |w| write_binary(w, &set))?;
    }
    println!(
        "correspond {} {}->{}: candidates={} survived_loop={} survived_depth={} rows={}",
        method.as_str(),
        args.reference,
        args.query,
        set.counts.candidates,
        set.counts.survived_loop,
        set.counts.survived_depth,
        set.pairs.len()
    );
    Ok(())
}
