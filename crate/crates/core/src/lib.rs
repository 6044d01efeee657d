//! Exact-arithmetic engine for weight-averaging ("sharing") moves on
//! finite graphs: simulation, certified upper bounds, depth-bounded
//! optimal-sequence search, limits of repeated move families, and the
//! adjoint duality identity. All core arithmetic is arbitrary-precision
//! rational; floating point appears only in clearly marked diagnostics.

pub mod bounds;
pub mod dynamics;
pub mod gen;
pub mod graph;
pub mod io;
pub mod limits;
pub mod rational;
pub mod search;

pub use bounds::{FeasibilityReport, PhiCertificate};
pub use dynamics::{MoveSequence, QuasiMove, ShareMatrix, SharingMove, WeightDistribution};
pub use graph::{Graph, VertexSet};
pub use limits::MoveFamily;
pub use rational::{format_rational, parse_rational, Rational};
pub use search::{SearchConfig, SearchResult};
