use std::io::Write;
use std::path::PathBuf;

use icdc_core::formats::write_comment_header;
use icdc_core::mapping::{align_block, partition_blocks, SceneBlock};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::run::{write_file, Dataset, Run};

pub struct BlocksArgs {
    pub trajectory: String,
    pub out: Option<PathBuf>,
}

fn join_ids(ids: &[u64]) -> String {
    ids.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

/// Space-separated vector with negative zeros printed as `0`.
fn vec3(v: &nalgebra::Vector3<f64>) -> String {
    format!("{} {} {}", v.x + 0.0, v.y + 0.0, v.z + 0.0)
}

fn write_block<W: Write>(w: &mut W, b: &SceneBlock, aligned: &Result<SceneBlock, String>) -> std::io::Result<()> {
    let e = b.core_bounds.extent();
    writeln!(w, "[block {}]", b.index)?;
    writeln!(w, "trajectory = {}", b.trajectory)?;
    writeln!(w, "members = {}", join_ids(&b.members))?;
    writeln!(w, "buffer = {}", join_ids(&b.buffer))?;
    writeln!(w, "core_min = {}", vec3(&b.core_bounds.min))?;
    writeln!(w, "core_max = {}", vec3(&b.core_bounds.max))?;
    writeln!(w, "extent_m = {}", vec3(&e))?;
    match aligned {
        Ok(a) => {
            if let Some(al) = &a.alignment {
                let q = al.rotation.quaternion();
                writeln!(w, "rotation_xyzw = {} {} {} {}", q.i, q.j, q.k, q.w)?;
                writeln!(w, "center = {}", vec3(&al.center))?;
                writeln!(w, "scale = {}", al.scale)?;
                writeln!(w, "principal_axis = {}", vec3(&al.principal_axis))?;
            }
            if let Some(c) = &a.containment {
                writeln!(w, "points = {}", c.point_count)?;
                for (s, f) in &c.fractions {
                    writeln!(w, "containment@{s} = {f}")?;
                }
            }
        }
        Err(why) => writeln!(w, "alignment = failed: {why}")?,
    }
    Ok(())
}

/// Partitions one trajectory into blocks, aligns each and writes the report.
pub fn run(run: &Run, args: &BlocksArgs) -> CliResult<()> {
    let data = Dataset::load(&run.cfg.paths)?;
    if !data.map.trajectories().contains(&args.trajectory) {
        return Err(CliError::data(format!("unknown trajectory {:?}", args.trajectory)));
    }
    let b = &run.cfg.blocks;
    let blocks = partition_blocks(&data.map, &args.trajectory, b.max_extent_m, b.buffer_fraction);
    let aligned: Vec<Result<SceneBlock, String>> =
        blocks.par_iter().map(|blk| align_block(blk, &data.map).map_err(|e| e.to_string())).collect();
    let out = match &args.out {
        Some(p) => p.clone(),
        None => run.output()?.join(format!("blocks_{}.txt", args.trajectory)),
    };
    let header = run.header();
    write_file(&out, |w| {
        write_comment_header(w, &header)?;
        writeln!(w, "blocks = {}", blocks.len())?;
        for (blk, a) in blocks.iter().zip(&aligned) {
            write_block(w, blk, a)?;
        }
        Ok(())
    })?;
    println!("blocks {}: {} blocks", args.trajectory, blocks.len());
    Ok(())
}
