//! Scene data model: a time-ordered sequence of frames, each carrying the
//! tracked objects visible in it. Includes a deterministic synthetic scene
//! generator and the field mapping for bird's-eye-view annotation records.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use crate::rectangle::BBox;

/// One tracked detection: a stable object id, its category and its box.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub id: String,
    pub class_label: String,
    pub bbox: BBox,
}

/// The detections of one frame. Frame indices start at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDetections {
    pub frame_index: u32,
    pub entries: Vec<Detection>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub scene_id: String,
    pub sensor: String,
    pub frames: Vec<FrameDetections>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("frame {frame}: duplicate object id {id:?}")]
    DuplicateObject { frame: u32, id: String },
    #[error("frame {frame}: object {id:?} changes class from {first:?} to {now:?}")]
    ClassChange {
        frame: u32,
        id: String,
        first: String,
        now: String,
    },
    #[error("frame indices must be contiguous from 1: found {found} where {expected} was expected")]
    FrameOrder { expected: u32, found: u32 },
}

impl Scene {
    /// Checks the scene invariants: contiguous frame indices starting at 1,
    /// no duplicate ids within a frame, stable class per id.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut classes: std::collections::HashMap<&str, &str> = Default::default();
        for (pos, frame) in self.frames.iter().enumerate() {
            let expected = pos as u32 + 1;
            if frame.frame_index != expected {
                return Err(SceneError::FrameOrder {
                    expected,
                    found: frame.frame_index,
                });
            }
            let mut seen = std::collections::HashSet::new();
            for det in &frame.entries {
                if !seen.insert(det.id.as_str()) {
                    return Err(SceneError::DuplicateObject {
                        frame: frame.frame_index,
                        id: det.id.clone(),
                    });
                }
                match classes.get(det.id.as_str()) {
                    None => {
                        classes.insert(&det.id, &det.class_label);
                    }
                    Some(first) if *first != det.class_label => {
                        return Err(SceneError::ClassChange {
                            frame: frame.frame_index,
                            id: det.id.clone(),
                            first: first.to_string(),
                            now: det.class_label.clone(),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Distinct object ids across all frames.
    pub fn object_count(&self) -> usize {
        let mut ids = std::collections::HashSet::new();
        for frame in &self.frames {
            for det in &frame.entries {
                ids.insert(det.id.as_str());
            }
        }
        ids.len()
    }
}

/// Knobs for the synthetic generator. Boxes perform bounded random walks;
/// objects disappear and reappear according to the death/birth rates.
#[derive(Debug, Clone)]
pub struct SynthParams {
    /// Maximum per-frame displacement along each axis.
    pub motion_step: f64,
    /// Probability that an absent object reappears at the next frame.
    pub birth_rate: f64,
    /// Probability that a present object disappears at the next frame.
    pub death_rate: f64,
    /// Extent of the square region initial positions are drawn from.
    pub world_extent: f64,
    pub min_size: f64,
    pub max_size: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            motion_step: 2.0,
            birth_rate: 0.05,
            death_rate: 0.05,
            world_extent: 1000.0,
            min_size: 1.0,
            max_size: 8.0,
        }
    }
}

impl SynthParams {
    /// No churn: every object stays present in every frame.
    pub fn steady() -> Self {
        Self {
            birth_rate: 0.0,
            death_rate: 0.0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("bad generator parameters: {0}")]
pub struct BadParams(String);

const CLASSES: [&str; 6] = [
    "vehicle.car",
    "vehicle.truck",
    "vehicle.bicycle",
    "human.pedestrian",
    "movable_object.barrier",
    "vehicle.bus",
];

/// Generates a deterministic synthetic scene: `m` objects over `n` frames.
/// The same (seed, m, n, params) always yields the same scene.
pub fn synth_scene(seed: u64, m: usize, n: usize, params: &SynthParams) -> Result<Scene, BadParams> {
    if m < 2 {
        return Err(BadParams(format!("need at least 2 objects, got {m}")));
    }
    if n < 1 {
        return Err(BadParams(format!("need at least 1 frame, got {n}")));
    }
    for (name, rate) in [("birth_rate", params.birth_rate), ("death_rate", params.death_rate)] {
        if !(0.0..=1.0).contains(&rate) {
            return Err(BadParams(format!("{name} must be in [0, 1], got {rate}")));
        }
    }
    if !(params.motion_step.is_finite() && params.motion_step >= 0.0) {
        return Err(BadParams(format!(
            "motion_step must be finite and non-negative, got {}",
            params.motion_step
        )));
    }
    if !(params.min_size > 0.0 && params.max_size >= params.min_size) {
        return Err(BadParams(format!(
            "sizes must satisfy 0 < min <= max, got {}..{}",
            params.min_size, params.max_size
        )));
    }
    if !(params.world_extent > 0.0 && params.world_extent.is_finite()) {
        return Err(BadParams(format!(
            "world_extent must be positive and finite, got {}",
            params.world_extent
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = (m as f64).log10().floor() as usize + 1;

    struct Obj {
        id: String,
        class: &'static str,
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        present: bool,
    }

    let mut objects: Vec<Obj> = (0..m)
        .map(|i| Obj {
            id: format!("o{:0width$}", i + 1),
            class: CLASSES[rng.gen_range(0..CLASSES.len())],
            x: rng.gen_range(0.0..params.world_extent),
            y: rng.gen_range(0.0..params.world_extent),
            w: rng.gen_range(params.min_size..=params.max_size),
            h: rng.gen_range(params.min_size..=params.max_size),
            present: true,
        })
        .collect();

    let mut frames = Vec::with_capacity(n);
    for k in 1..=n as u32 {
        let entries: Vec<Detection> = objects
            .iter()
            .filter(|o| o.present)
            .map(|o| Detection {
                id: o.id.clone(),
                class_label: o.class.to_string(),
                bbox: BBox::new(o.x, o.y, o.w, o.h).expect("generator keeps boxes valid"),
            })
            .collect();
        frames.push(FrameDetections {
            frame_index: k,
            entries,
        });

        // evolve towards the next frame; draws happen for every object in
        // index order so the stream is independent of presence
        for o in objects.iter_mut() {
            let flip: f64 = rng.gen();
            if o.present {
                if flip < params.death_rate {
                    o.present = false;
                }
            } else if flip < params.birth_rate {
                o.present = true;
            }
            let dx = rng.gen_range(-params.motion_step..=params.motion_step);
            let dy = rng.gen_range(-params.motion_step..=params.motion_step);
            o.x += dx;
            o.y += dy;
        }
    }

    Ok(Scene {
        scene_id: format!("synth-{seed}-{m}x{n}"),
        sensor: "synthetic".to_string(),
        frames,
    })
}

/// Extracts (object id, class, bbox) from a bird's-eye-view annotation
/// record: the box is centred on `translation` with footprint `size`, so
/// the top-left corner is (x − w/2, y − l/2).
pub fn nuscenes_map(record: &Value) -> Result<(String, String, BBox), MappingError> {
    let id = record
        .get("instance_token")
        .and_then(Value::as_str)
        .ok_or(MappingError::MissingField("instance_token"))?;
    let class = record
        .get("category_name")
        .and_then(Value::as_str)
        .ok_or(MappingError::MissingField("category_name"))?;
    let translation = number_array(record, "translation", 2)?;
    let size = number_array(record, "size", 2)?;
    let (cx, cy) = (translation[0], translation[1]);
    let (w, l) = (size[0], size[1]);
    let bbox = BBox::new(cx - w / 2.0, cy - l / 2.0, w, l)
        .map_err(|e| MappingError::BadBox(e.to_string()))?;
    Ok((id.to_string(), class.to_string(), bbox))
}

fn number_array(record: &Value, field: &'static str, min_len: usize) -> Result<Vec<f64>, MappingError> {
    let arr = record
        .get(field)
        .and_then(Value::as_array)
        .ok_or(MappingError::MissingField(field))?;
    let nums: Option<Vec<f64>> = arr.iter().map(Value::as_f64).collect();
    match nums {
        Some(v) if v.len() >= min_len => Ok(v),
        _ => Err(MappingError::MissingField(field)),
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("annotation record is missing field {0:?}")]
    MissingField(&'static str),
    #[error("annotation record carries an invalid box: {0}")]
    BadBox(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn synth_is_deterministic() {
        let a = synth_scene(1, 5, 4, &SynthParams::default()).unwrap();
        let b = synth_scene(1, 5, 4, &SynthParams::default()).unwrap();
        assert_eq!(a, b);
        let c = synth_scene(2, 5, 4, &SynthParams::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn synth_respects_counts() {
        let scene = synth_scene(7, 285, 40, &SynthParams::default()).unwrap();
        assert_eq!(scene.frames.len(), 40);
        assert!(scene.object_count() <= 285);
        scene.validate().unwrap();
    }

    #[test]
    fn steady_params_keep_everyone_present() {
        let scene = synth_scene(3, 10, 12, &SynthParams::steady()).unwrap();
        for frame in &scene.frames {
            assert_eq!(frame.entries.len(), 10, "frame {}", frame.frame_index);
        }
    }

    #[test]
    fn churn_params_make_objects_blink() {
        let params = SynthParams {
            death_rate: 0.3,
            birth_rate: 0.3,
            ..SynthParams::default()
        };
        let scene = synth_scene(11, 20, 30, &params).unwrap();
        let some_frame_is_partial = scene.frames.iter().any(|f| f.entries.len() < 20);
        assert!(some_frame_is_partial);
        scene.validate().unwrap();
    }

    #[test]
    fn bad_params_are_rejected() {
        assert!(synth_scene(0, 1, 4, &SynthParams::default()).is_err());
        assert!(synth_scene(0, 5, 0, &SynthParams::default()).is_err());
        let bad = SynthParams {
            death_rate: 1.5,
            ..SynthParams::default()
        };
        assert!(synth_scene(0, 5, 4, &bad).is_err());
    }

    #[test]
    fn validate_catches_duplicates() {
        let mut scene = synth_scene(1, 3, 2, &SynthParams::steady()).unwrap();
        let dup = scene.frames[0].entries[0].clone();
        scene.frames[0].entries.push(dup);
        assert!(matches!(
            scene.validate(),
            Err(SceneError::DuplicateObject { frame: 1, .. })
        ));
    }

    #[test]
    fn validate_catches_frame_gaps() {
        let mut scene = synth_scene(1, 3, 3, &SynthParams::steady()).unwrap();
        scene.frames[2].frame_index = 5;
        assert_eq!(
            scene.validate(),
            Err(SceneError::FrameOrder {
                expected: 3,
                found: 5
            })
        );
    }

    #[test]
    fn nuscenes_mapping_example() {
        let record = json!({
            "instance_token": "abc123",
            "category_name": "vehicle.car",
            "translation": [10.0, 20.0, 1.5],
            "size": [2.0, 4.0, 1.8],
        });
        let (id, class, bbox) = nuscenes_map(&record).unwrap();
        assert_eq!(id, "abc123");
        assert_eq!(class, "vehicle.car");
        assert_eq!(
            (bbox.x(), bbox.y(), bbox.w(), bbox.h()),
            (9.0, 18.0, 2.0, 4.0)
        );
    }

    #[test]
    fn nuscenes_missing_size() {
        let record = json!({
            "instance_token": "abc123",
            "category_name": "vehicle.car",
            "translation": [10.0, 20.0],
        });
        assert_eq!(
            nuscenes_map(&record).unwrap_err(),
            MappingError::MissingField("size")
        );
    }

    #[test]
    fn nuscenes_identity_is_the_instance_token() {
        let a = json!({
            "instance_token": "same",
            "category_name": "vehicle.car",
            "translation": [0.0, 0.0],
            "size": [1.0, 1.0],
        });
        let b = json!({
            "instance_token": "same",
            "category_name": "vehicle.car",
            "translation": [5.0, 5.0],
            "size": [1.0, 1.0],
        });
        let (id_a, _, _) = nuscenes_map(&a).unwrap();
        let (id_b, _, _) = nuscenes_map(&b).unwrap();
        assert_eq!(id_a, id_b);
    }
}
