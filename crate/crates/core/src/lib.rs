//! Planar Voronoi diagrams: forward construction, recognition and inversion.
//!
//! * [`forward`] builds the diagram of a generator set clipped to a rectangle.
//! * [`tess`] stores tessellations as vertex lists with adjacency and extracts faces.
//! * [`invert`] recovers generators from a tessellation and tests whether it is Voronoi.
//! * [`harness`] re-synthesizes diagrams from estimates and measures errors under noise.

pub mod forward;
pub mod geom;
pub mod harness;
pub mod invert;
pub mod lsq;
pub mod tess;

pub use forward::{build_voronoi, GeneratorSet, VoronoiDiagram};
pub use geom::{Point2, Ray, Rect};
pub use invert::{GeneratorEstimate, Method, RecognitionVerdict};
pub use tess::{Polygon, Tessellation};
