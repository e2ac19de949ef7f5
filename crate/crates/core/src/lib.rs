//! Cross-domain pixel correspondences from rendered depth, and the tooling to
//! benchmark relative and absolute localization on top of them.
//!
//! Modules, bottom-up:
//!
//! - [`geom`]: poses, cameras, depth maps, homographies, angular errors.
//! - [`formats`]: pose, intrinsics and PFM depth files.
//! - [`scene`]: synthetic ray-cast scenes used as a ground-truth depth source.
//! - [`mapping`]: multi-trajectory sparse maps, triangulation, block partitioning.
//! - [`correspondence`]: depth reprojection with loop and depth consistency filters.
//! - [`benchmark`]: keyframing, essential-matrix relative pose, error statistics.
//! - [`losses`]: repeatability / reliability loss kernels with analytic gradients.

pub mod geom;
pub mod formats;
pub mod scene;
pub mod mapping;
pub mod correspondence;
pub mod benchmark;
pub mod losses;
pub mod seed;

pub use geom::{Camera, DepthMap, Pixel, Pose};

/// Frame identifier shared by pose files, maps and depth directories.
pub type FrameId = u64;
