//! Generators for the graph families used in the experiments.

mod band;
mod penrose;
mod sierpinski;
mod stacked;

pub use band::{build_band_graph, BandGraphSpec, Norm};
pub use penrose::{build_penrose, rhombus_faces, PenroseSpec, Rhombus, RhombusKind};
pub use sierpinski::{build_sierpinski, sierpinski_vertex_count, SierpinskiSpec};
pub use stacked::{build_stacked, StackSpec};
