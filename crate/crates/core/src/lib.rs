//! Multi-view rendering and classification of protein structures.
//!
//! Structures are parsed from PDB text ([`pdb`]), turned into colored
//! primitives under one of 13 styles ([`repr`]), rotated through a pose grid
//! ([`multiview`]) and rasterized to small RGB images ([`raster`]). A small
//! convolutional network ([`cnn`]) is trained on the views and its scores are
//! averaged, fused and evaluated under stratified cross-validation
//! ([`fusion`]). [`pipeline`] ties the stages together over dataset manifests.

pub mod cnn;
pub mod fusion;
pub mod multiview;
pub mod palette;
pub mod pdb;
pub mod pipeline;
pub mod raster;
pub mod repr;

pub type Vec3 = nalgebra::Vector3<f64>;
