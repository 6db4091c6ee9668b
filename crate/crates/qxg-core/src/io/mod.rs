//! Ingestion, export and serialization: the JSON Lines scene format, the
//! compact `QXG1` binary graph format, a debug JSON export and storage
//! size reporting.

pub mod binary;
pub mod export;
pub mod report;
pub mod scene_file;

pub use binary::{decode_qxg, encode_qxg, read_graph_file, write_graph_file, CodecError};
pub use export::{export, export_json, GraphExport};
pub use report::{size_report, SizeReport, SIZE_CSV_HEADER};
pub use scene_file::{
    read_scene, read_scene_file, write_scene, write_scene_file, SceneReadError,
};
