//! Incremental scene-graph construction: walk the frames, acquire the
//! relation of every co-present object pair, update the graph. Two
//! acquisition backends (oracle queries vs the 169-relation sweep) that
//! must produce identical graphs, and an optional data-parallel pair loop
//! that must as well.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::acquisition::{acquire_pair_eps, PairStrategy};
use crate::graph::{GraphError, Qxg};
use crate::rectangle::RaRelation;
use crate::scene::{Scene, SceneError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMethod {
    /// Per-axis oracle queries (at most 26 per pair).
    Acquisition,
    /// Checks all 169 rectangle relations per pair.
    BruteForce,
}

impl BuildMethod {
    /// Tag used in benchmark CSV rows.
    pub fn tag(self) -> &'static str {
        match self {
            BuildMethod::Acquisition => "acq",
            BuildMethod::BruteForce => "bf",
        }
    }

    fn strategy(self) -> PairStrategy {
        match self {
            BuildMethod::Acquisition => PairStrategy::PerAxis,
            BuildMethod::BruteForce => PairStrategy::Flat,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub method: BuildMethod,
    /// Endpoint comparisons snap differences of at most this to equality.
    pub epsilon: f64,
    /// 1 runs the pair loop sequentially; anything larger runs it on the
    /// ambient rayon pool (callers size the pool; the CLI sets the global
    /// pool to this value). The assembled graph is identical either way.
    pub threads: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            method: BuildMethod::Acquisition,
            epsilon: 0.0,
            threads: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid scene: {0}")]
    InvalidScene(#[from] SceneError),
    #[error("graph update failed at frame {frame}: {source}")]
    Update {
        frame: u32,
        #[source]
        source: GraphError,
    },
}

/// Wall time and query effort of one frame's pair loop.
#[derive(Debug, Clone, Copy)]
pub struct FrameStats {
    pub frame: u32,
    /// Objects detected in this frame.
    pub objects: usize,
    /// Time spent acquiring and recording relations (detection input and
    /// node bookkeeping excluded).
    pub wall: Duration,
    /// Oracle queries issued (the sweep counts its 169 checks per pair).
    pub queries: u64,
}

pub fn build(scene: &Scene, options: &BuildOptions) -> Result<Qxg, BuildError> {
    Ok(build_instrumented(scene, options)?.0)
}

/// Builds the graph and reports per-frame timing and query counts.
pub fn build_instrumented(
    scene: &Scene,
    options: &BuildOptions,
) -> Result<(Qxg, Vec<FrameStats>), BuildError> {
    scene.validate()?;
    let mut graph = Qxg::new();
    let mut stats = Vec::with_capacity(scene.frames.len());
    for frame in &scene.frames {
        // detections enter the graph before the timed region, mirroring a
        // pipeline where detection/tracking cost is accounted separately
        let mut present: Vec<usize> = (0..frame.entries.len()).collect();
        present.sort_by(|&a, &b| frame.entries[a].id.cmp(&frame.entries[b].id));
        for det in &frame.entries {
            graph.upsert_object(&det.id, &det.class_label);
        }

        let started = Instant::now();
        let queries = classify_frame(&mut graph, frame.frame_index, &present, frame, options)
            .map_err(|source| BuildError::Update {
                frame: frame.frame_index,
                source,
            })?;
        stats.push(FrameStats {
            frame: frame.frame_index,
            objects: frame.entries.len(),
            wall: started.elapsed(),
            queries,
        });
    }
    Ok((graph, stats))
}

/// Classifies every unordered pair of the frame (in id order) and records
/// the results. Returns the number of oracle queries spent.
fn classify_frame(
    graph: &mut Qxg,
    frame_index: u32,
    present: &[usize],
    frame: &crate::scene::FrameDetections,
    options: &BuildOptions,
) -> Result<u64, GraphError> {
    let strategy = options.method.strategy();
    let eps = options.epsilon;
    let mut pairs = Vec::with_capacity(present.len().saturating_sub(1) * present.len() / 2);
    for (pos, &a) in present.iter().enumerate() {
        for &b in &present[pos + 1..] {
            pairs.push((a, b));
        }
    }

    let classify_one = |&(a, b): &(usize, usize)| -> (usize, usize, RaRelation, u64) {
        let (rel, queries) =
            acquire_pair_eps(&frame.entries[a].bbox, &frame.entries[b].bbox, strategy, eps);
        (a, b, rel, queries)
    };

    let results: Vec<(usize, usize, RaRelation, u64)> = run_pairs(&pairs, options.threads, classify_one);

    let mut total_queries = 0;
    for (a, b, rel, queries) in results {
        total_queries += queries;
        graph.update(frame_index, &frame.entries[a].id, &frame.entries[b].id, rel)?;
    }
    Ok(total_queries)
}

#[cfg(feature = "parallel")]
fn run_pairs<F>(pairs: &[(usize, usize)], threads: usize, f: F) -> Vec<(usize, usize, RaRelation, u64)>
where
    F: Fn(&(usize, usize)) -> (usize, usize, RaRelation, u64) + Sync + Send,
{
    use rayon::prelude::*;
    if threads <= 1 {
        pairs.iter().map(f).collect()
    } else {
        // ordered collect keeps the result sequence identical to the
        // sequential path, so the assembled graph is too
        pairs.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_pairs<F>(pairs: &[(usize, usize)], _threads: usize, f: F) -> Vec<(usize, usize, RaRelation, u64)>
where
    F: Fn(&(usize, usize)) -> (usize, usize, RaRelation, u64) + Sync,
{
    pairs.iter().map(f).collect()
}
