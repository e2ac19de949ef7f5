use std::collections::BTreeMap;
use std::path::Path;

use icdc_core::formats::{write_comment_header, write_intrinsics, write_pfm_file, write_poses};
use icdc_core::mapping::{synthesize_map, write_map};
use icdc_core::scene::{
    corridor, corridor_camera, loop_trajectory, out_and_back_trajectory, parse_scene, perturb, render_depth,
    straight_trajectory, write_scene, DomainPerturbation, SyntheticScene,
};
use icdc_core::seed::derive_seed;
use icdc_core::{Camera, DepthMap, FrameId, Pose};
use nalgebra::Vector3;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::TrajectorySpec;
use crate::error::{CliError, CliResult};
use crate::run::{write_file, Run};

const CAMERA_ID: u32 = 0;

fn load_scene(run: &Run) -> CliResult<SyntheticScene> {
    match &run.cfg.paths.scene {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("scene file {}: {e}", path.display())))?;
            parse_scene(&text).map_err(|e| CliError::config(format!("scene file {}: {e}", path.display())))
        }
        None => match run.cfg.synth.preset.as_str() {
            "corridor" => Ok(corridor()),
            other => Err(CliError::config(format!("unknown scene preset {other:?}"))),
        },
    }
}

fn camera(run: &Run) -> CliResult<Camera> {
    match run.cfg.synth.camera {
        Some([fx, fy, cx, cy, w, h]) => {
            if w.fract() != 0.0 || h.fract() != 0.0 || w < 1.0 || h < 1.0 {
                return Err(CliError::config("camera width and height must be positive integers"));
            }
            Camera::new(fx, fy, cx, cy, w as u32, h as u32).map_err(CliError::config)
        }
        None => Ok(corridor_camera()),
    }
}

fn poses_of(t: &TrajectorySpec) -> Vec<Pose> {
    let v = |a: [f64; 3]| Vector3::new(a[0], a[1], a[2]);
    match t.kind.as_str() {
        "loop" => loop_trajectory(v(t.center), t.radius, t.frames, t.loops),
        "out-and-back" => out_and_back_trajectory(v(t.start), t.frames, t.step),
        _ => straight_trajectory(v(t.start), t.frames, t.step, t.yaw_deg),
    }
}

struct Frame {
    id: FrameId,
    trajectory: usize,
    pose: Pose,
}

/// Renders the scene along every configured trajectory and writes the scene,
/// intrinsics, poses, sparse map, per-frame PFM depth and a manifest with
/// file checksums.
pub fn run(run: &Run) -> CliResult<()> {
    let scene = load_scene(run)?;
    let cam = camera(run)?;
    let out = run.output()?;
    let specs = &run.cfg.synth.trajectories;
    if specs.is_empty() {
        return Err(CliError::config("no trajectories configured"));
    }
    let mut frames = Vec::new();
    for (k, t) in specs.iter().enumerate() {
        for pose in poses_of(t) {
            frames.push(Frame { id: frames.len() as FrameId, trajectory: k, pose });
        }
    }

    let depths: Vec<DepthMap> = frames
        .par_iter()
        .map(|f| {
            let t = &specs[f.trajectory];
            let pert = DomainPerturbation {
                depth_noise_sigma: t.depth_noise_sigma,
                outlier_fraction: t.outlier_fraction,
                outlier_magnitude_min: t.outlier_magnitude_min,
                seed: derive_seed(run.seed, &[f.trajectory as u64, f.id]),
            };
            perturb(&render_depth(&scene, &cam, &f.pose), &pert).map_err(CliError::config)
        })
        .collect::<CliResult<_>>()?;

    let grouped: Vec<(String, Vec<(FrameId, Pose)>)> = specs
        .iter()
        .enumerate()
        .map(|(k, t)| (t.label.clone(), frames.iter().filter(|f| f.trajectory == k).map(|f| (f.id, f.pose)).collect()))
        .collect();
    let map = synthesize_map(&scene, CAMERA_ID, &cam, &grouped, run.cfg.synth.map_stride);
    let poses: BTreeMap<FrameId, Pose> = frames.iter().map(|f| (f.id, f.pose)).collect();
    let header = run.header();

    let mut written: Vec<String> = Vec::new();
    let mut emit = |name: String, f: &dyn Fn(&Path) -> CliResult<()>| -> CliResult<()> {
        f(&out.join(&name))?;
        written.push(name);
        Ok(())
    };
    emit("scene.txt".into(), &|p| write_file(p, |w| write_comment_header(w, &header).and_then(|_| write_scene(w, &scene))))?;
    emit("intrinsics.txt".into(), &|p| {
        write_file(p, |w| write_comment_header(w, &header).and_then(|_| write_intrinsics(w, &BTreeMap::from([(CAMERA_ID, cam)]))))
    })?;
    emit("poses.txt".into(), &|p| write_file(p, |w| write_comment_header(w, &header).and_then(|_| write_poses(w, &poses))))?;
    emit("map.txt".into(), &|p| write_file(p, |w| write_comment_header(w, &header).and_then(|_| write_map(w, &map))))?;
    std::fs::create_dir_all(out.join("depth")).map_err(|e| CliError::io(&out.join("depth"), e))?;
    for (f, d) in frames.iter().zip(&depths) {
        emit(format!("depth/{}.pfm", f.id), &|p| write_pfm_file(p, d).map_err(|e| CliError::io(p, e)))?;
    }

    let mut checksums = Vec::with_capacity(written.len());
    for name in &written {
        let path = out.join(name);
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        checksums.push((name.clone(), hex::encode(Sha256::digest(&bytes))));
    }
    write_file(&out.join("manifest.txt"), |w| {
        use std::io::Write;
        write_comment_header(w, &header)?;
        writeln!(w, "frames={}", frames.len())?;
        writeln!(w, "trajectories={}", specs.len())?;
        for (k, t) in specs.iter().enumerate() {
            writeln!(w, "trajectory={} {}", t.label, frames.iter().filter(|f| f.trajectory == k).count())?;
        }
        for (name, sum) in &checksums {
            writeln!(w, "file={name} {sum}")?;
        }
        Ok(())
    })?;
    println!("synth: {} frames, {} trajectories, {} map points -> {}", frames.len(), specs.len(), map.points3d.len(), out.display());
    Ok(())
}
