//! Storage comparison between a scene file and its encoded graph.

use std::path::Path;

/// One plot-ready row comparing on-disk sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    pub scene_path: String,
    pub graph_path: String,
    pub scene_bytes: u64,
    pub graph_bytes: u64,
    /// 100 · (1 − graph/scene); negative when the graph is larger.
    pub reduction_pct: f64,
}

pub const SIZE_CSV_HEADER: &str = "scene_path,graph_path,scene_bytes,graph_bytes,reduction_pct";

impl SizeReport {
    pub fn from_sizes(
        scene_path: impl Into<String>,
        graph_path: impl Into<String>,
        scene_bytes: u64,
        graph_bytes: u64,
    ) -> Self {
        let reduction_pct = if scene_bytes == 0 {
            0.0
        } else {
            (1.0 - graph_bytes as f64 / scene_bytes as f64) * 100.0
        };
        Self {
            scene_path: scene_path.into(),
            graph_path: graph_path.into(),
            scene_bytes,
            graph_bytes,
            reduction_pct,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.2}",
            self.scene_path, self.graph_path, self.scene_bytes, self.graph_bytes, self.reduction_pct
        )
    }
}

/// Measures the two files and reports the reduction.
pub fn size_report(
    scene_path: impl AsRef<Path>,
    graph_path: impl AsRef<Path>,
) -> std::io::Result<SizeReport> {
    let scene_bytes = std::fs::metadata(scene_path.as_ref())?.len();
    let graph_bytes = std::fs::metadata(graph_path.as_ref())?.len();
    Ok(SizeReport::from_sizes(
        scene_path.as_ref().display().to_string(),
        graph_path.as_ref().display().to_string(),
        scene_bytes,
        graph_bytes,
    ))
}
