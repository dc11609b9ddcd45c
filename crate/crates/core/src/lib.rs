//! Reconstruction, refinement and analysis of matchstick graphs: planar
//! drawings whose edges all have unit length and never cross.

pub mod catalog;
pub mod embedding;
pub mod geom;
pub mod motifs;
pub mod refine;
pub mod report;
pub mod rigidity;
pub mod svg;
pub mod symmetry;
pub mod verify;
