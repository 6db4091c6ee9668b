//! Per-frame benchmark harness: repeated instrumented builds, median
//! timings as CSV rows, and power-law trend fits over object counts.

use crate::builder::{build_instrumented, BuildError, BuildMethod, BuildOptions};
use crate::scene::Scene;

/// One CSV row: median per-frame wall time for one (frame, method).
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scene_id: String,
    pub frame: u32,
    pub objects: usize,
    pub method: BuildMethod,
    pub wall_ms: f64,
    pub query_count: u64,
}

pub const BENCH_CSV_HEADER: &str = "scene_id,frame,objects,method,wall_ms,query_count";

impl BenchRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{}",
            self.scene_id,
            self.frame,
            self.objects,
            self.method.tag(),
            self.wall_ms,
            self.query_count
        )
    }
}

/// Builds the scene `repeats` times per method (single-threaded, so the
/// numbers track the algorithm, not the scheduler) and reports per-frame
/// medians. Rows are ordered by frame, then by the given method order.
pub fn bench_scene(
    scene: &Scene,
    methods: &[BuildMethod],
    repeats: usize,
    epsilon: f64,
) -> Result<Vec<BenchRow>, BuildError> {
    assert!(repeats >= 1, "need at least one repeat");
    let mut per_method = Vec::new();
    for &method in methods {
        let options = BuildOptions {
            method,
            epsilon,
            threads: 1,
        };
        let mut runs = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let (_, frames) = build_instrumented(scene, &options)?;
            runs.push(frames);
        }
        per_method.push((method, runs));
    }

    let frame_count = scene.frames.len();
    let mut rows = Vec::with_capacity(frame_count * methods.len());
    for frame_pos in 0..frame_count {
        for (method, runs) in &per_method {
            let samples: Vec<f64> = runs
                .iter()
                .map(|frames| frames[frame_pos].wall.as_secs_f64() * 1e3)
                .collect();
            let first = &runs[0][frame_pos];
            rows.push(BenchRow {
                scene_id: scene.scene_id.clone(),
                frame: first.frame,
                objects: first.objects,
                method: *method,
                wall_ms: median(&samples),
                query_count: first.queries,
            });
        }
    }
    Ok(rows)
}

/// Median of a non-empty sample; the mean of the middle two for even sizes.
pub fn median(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN timings"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Least-squares fit of y ≈ c · x^b on (ln x, ln y). Requires at least two
/// points with positive coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Option<PowerLawFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let exponent = (n * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / n;
    Some(PowerLawFit {
        exponent,
        coefficient: intercept.exp(),
    })
}
