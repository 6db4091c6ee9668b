//! Qualitative spatiotemporal reasoning over tracked 2D bounding boxes.
//!
//! Multi-frame scenes of tracked boxes become qualitative scene graphs:
//! objects are nodes, and every pair that shares a frame carries the
//! atomic rectangle-algebra relation holding between the two boxes at
//! each shared frame. The relation machinery is interval algebra lifted
//! to two axes (13² = 169 atomic relations), relations are learned by
//! oracle queries with path-consistency pruning, and finished graphs
//! serialize to a compact binary format a fraction the size of the
//! original detections.

pub mod acquisition;
pub mod allen;
pub mod bench;
pub mod builder;
pub mod calculus;
pub mod graph;
pub mod io;
pub mod rectangle;
pub mod scene;

pub use acquisition::{acquire_pair, geqca, path_consistency, Inconsistent, Oracle, PairStrategy};
pub use allen::{AllenRelation, AllenSet, Interval};
pub use builder::{build, build_instrumented, BuildMethod, BuildOptions};
pub use graph::{EdgeVector, Qxg, QxgStats, TrackedObject};
pub use rectangle::{BBox, RaRelation, RaSet};
pub use scene::{Detection, FrameDetections, Scene, SynthParams};
