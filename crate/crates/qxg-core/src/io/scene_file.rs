//! Scene interchange format: JSON Lines. The first line is a header
//! record, then one record per frame.
//!
//! ```text
//! {"format":"qxg-scene","version":1,"scene_id":"...","sensor":"...","frame_count":4}
//! {"frame":1,"objects":[{"id":"o1","class":"car","bbox":[0.0,10.0,6.0,6.0]}, ...]}
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rectangle::BBox;
use crate::scene::{Detection, FrameDetections, Scene};

pub const FORMAT_TAG: &str = "qxg-scene";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct HeaderRecord {
    format: String,
    version: u32,
    scene_id: String,
    sensor: String,
    frame_count: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectRecord {
    id: String,
    class: String,
    bbox: [f64; 4],
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameRecord {
    frame: u32,
    objects: Vec<ObjectRecord>,
}

#[derive(Debug, Error)]
pub enum SceneReadError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed JSON: {source}")]
    Syntax {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: {message}")]
    Order { line: usize, message: String },
}

/// Parses a scene from JSON Lines, enforcing all format invariants.
pub fn read_scene(reader: impl BufRead) -> Result<Scene, SceneReadError> {
    let mut lines = reader.lines().enumerate();

    let (header, header_line) = loop {
        match lines.next() {
            None => {
                return Err(SceneReadError::Schema {
                    line: 1,
                    message: "empty input: expected a header record".to_string(),
                })
            }
            Some((idx, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let header: HeaderRecord =
                    serde_json::from_str(&line).map_err(|source| syntax_or_schema(idx + 1, source))?;
                break (header, idx + 1);
            }
        }
    };
    if header.format != FORMAT_TAG {
        return Err(SceneReadError::Schema {
            line: header_line,
            message: format!("unknown format {:?}, expected {FORMAT_TAG:?}", header.format),
        });
    }
    if header.version != FORMAT_VERSION {
        return Err(SceneReadError::Schema {
            line: header_line,
            message: format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                header.version
            ),
        });
    }

    let mut frames: Vec<FrameDetections> = Vec::with_capacity(header.frame_count as usize);
    let mut classes: std::collections::HashMap<String, String> = Default::default();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: FrameRecord =
            serde_json::from_str(&line).map_err(|source| syntax_or_schema(line_no, source))?;

        let expected = frames.len() as u32 + 1;
        if record.frame != expected {
            return Err(SceneReadError::Order {
                line: line_no,
                message: format!(
                    "frame indices must increase contiguously from 1: found frame {}, expected {}",
                    record.frame, expected
                ),
            });
        }

        let mut entries = Vec::with_capacity(record.objects.len());
        let mut seen = std::collections::HashSet::new();
        for obj in record.objects {
            if obj.id.is_empty() {
                return Err(SceneReadError::Schema {
                    line: line_no,
                    message: format!("frame {}: empty object id", record.frame),
                });
            }
            if !seen.insert(obj.id.clone()) {
                return Err(SceneReadError::Schema {
                    line: line_no,
                    message: format!("frame {}: duplicate object id {:?}", record.frame, obj.id),
                });
            }
            match classes.get(&obj.id) {
                None => {
                    classes.insert(obj.id.clone(), obj.class.clone());
                }
                Some(first) if *first != obj.class => {
                    return Err(SceneReadError::Schema {
                        line: line_no,
                        message: format!(
                            "frame {}: object {:?} changes class from {:?} to {:?}",
                            record.frame, obj.id, first, obj.class
                        ),
                    });
                }
                Some(_) => {}
            }
            let [x, y, w, h] = obj.bbox;
            let bbox = BBox::new(x, y, w, h).map_err(|e| SceneReadError::Schema {
                line: line_no,
                message: format!("frame {}: object {:?}: {}", record.frame, obj.id, e),
            })?;
            entries.push(Detection {
                id: obj.id,
                class_label: obj.class,
                bbox,
            });
        }
        frames.push(FrameDetections {
            frame_index: record.frame,
            entries,
        });
    }

    if frames.len() as u32 != header.frame_count {
        return Err(SceneReadError::Schema {
            line: header_line,
            message: format!(
                "header announces {} frames but {} were present",
                header.frame_count,
                frames.len()
            ),
        });
    }

    Ok(Scene {
        scene_id: header.scene_id,
        sensor: header.sensor,
        frames,
    })
}

fn syntax_or_schema(line: usize, source: serde_json::Error) -> SceneReadError {
    if source.is_syntax() || source.is_eof() {
        SceneReadError::Syntax { line, source }
    } else {
        // valid JSON that does not match the schema (missing field, wrong type)
        SceneReadError::Schema {
            line,
            message: source.to_string(),
        }
    }
}

/// Writes a scene in the JSON Lines format. Output is deterministic for a
/// given scene.
pub fn write_scene(scene: &Scene, mut out: impl Write) -> std::io::Result<()> {
    let header = HeaderRecord {
        format: FORMAT_TAG.to_string(),
        version: FORMAT_VERSION,
        scene_id: scene.scene_id.clone(),
        sensor: scene.sensor.clone(),
        frame_count: scene.frames.len() as u32,
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for frame in &scene.frames {
        let record = FrameRecord {
            frame: frame.frame_index,
            objects: frame
                .entries
                .iter()
                .map(|d| ObjectRecord {
                    id: d.id.clone(),
                    class: d.class_label.clone(),
                    bbox: [d.bbox.x(), d.bbox.y(), d.bbox.w(), d.bbox.h()],
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_scene_file(path: impl AsRef<std::path::Path>) -> Result<Scene, SceneReadError> {
    let file = std::fs::File::open(path)?;
    read_scene(std::io::BufReader::new(file))
}

pub fn write_scene_file(
    scene: &Scene,
    path: impl AsRef<std::path::Path>,
) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_scene(scene, std::io::BufWriter::new(file))
}
