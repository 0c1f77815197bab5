//! Fourier occupancy fields.
//!
//! A Fourier occupancy field (FOF) stores, for every pixel of an image-aligned
//! grid, the first `N` cosine-series coefficients of the 1D occupancy signal
//! along the view axis. This crate converts triangle meshes to that grid,
//! reconstructs occupancy at any z sampling rate and extracts meshes back out
//! of it, together with the metrics used to judge the round trip.
//!
//! Coordinates live in the normalized cube `[-1, 1]^3`. The view direction is
//! `+z`, pixel `(x, y)` samples its center and `y` grows downward in raster
//! order (see [`geometry::pixel_center`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod basis;
pub mod error;
pub mod field;
pub mod fof2mesh;
pub mod geometry;
pub mod mesh2fof;
pub mod metrics;
pub mod raster;
pub mod shapes;
pub mod vec3;

pub use basis::{make_basis, uniform_z_grid, CosineBasis};
pub use error::{Error, Result};
pub use field::{evaluate_field, evaluate_point, FofGrid, OccupancyVolume};
pub use fof2mesh::{fof_to_mesh, ExtractReport, Repair};
pub use geometry::{normalize_mesh, Similarity, TriangleMesh};
pub use mesh2fof::{mesh_to_fof, MatchMode, MatchReport};
pub use vec3::Vec3;
