//! Biased graphs, frame matroids, and the machinery to decide frame
//! representability by pruned exhaustive search.
//!
//! The crate is organized around five pieces:
//!
//! * [`matroid`] — finite matroids stored by circuits: rank, duality,
//!   minors, 2-sums, connectivity, isomorphism.
//! * [`graph`] / [`biased`] — multigraphs and biased graphs: theta-property
//!   validation, signatures, balancing vertices, biased minors.
//! * [`frame`] — the frame-matroid functor and the biased-graph
//!   transformations that preserve it (pinch/split, roll-up/unroll, twisted
//!   flip, loop- and link-sums, biseparation classification).
//! * [`rep`] — representability decisions: exhaustive L-biased search with a
//!   recursive 2-sum decomposition fast path, plus a persistent result cache.
//! * [`named`] / [`verify`] / [`rooted`] — the named matroid families, the
//!   excluded-minor verification campaigns, and the rooted K4/W4 minor
//!   finder behind the `framekit` CLI.

pub mod biased;
pub mod frame;
pub mod graph;
pub mod matroid;
pub mod named;
pub mod par;
pub mod rep;
pub mod rooted;
pub mod subset;
pub mod verify;

pub use biased::{BiasError, BiasSpec, BiasedGraph};
pub use graph::{GraphError, Multigraph};
pub use matroid::{Matroid, MatroidError, Separation};
pub use rep::{RepStatus, RepVerdict, SearchLimits};

