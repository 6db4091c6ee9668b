//! The qualitative scene graph: tracked objects as nodes, edges labelled
//! with sparse per-frame vectors of atomic rectangle relations.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::rectangle::RaRelation;

/// A node of the graph: one tracked object, identified by a stable id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedObject {
    pub id: String,
    pub class_label: String,
    pub attributes: BTreeMap<String, String>,
}

impl TrackedObject {
    pub fn new(id: impl Into<String>, class_label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            class_label: class_label.into(),
            attributes: BTreeMap::new(),
        }
    }
}

/// Sparse per-frame relation vector for one object pair: an entry exists
/// at frame k iff both objects were detected in frame k.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeVector {
    entries: BTreeMap<u32, RaRelation>,
}

impl EdgeVector {
    pub fn get(&self, frame: u32) -> Option<RaRelation> {
        self.entries.get(&frame).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in frame order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, RaRelation)> + '_ {
        self.entries.iter().map(|(k, r)| (*k, *r))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("no edge between {0:?} and {1:?}")]
    UnknownPair(String, String),
    #[error(
        "conflicting relation for ({a}, {b}) at frame {frame}: slot holds {existing}, got {new}"
    )]
    DuplicateEntry {
        a: String,
        b: String,
        frame: u32,
        existing: RaRelation,
        new: RaRelation,
    },
}

/// Qualitative scene graph. Nodes are inserted on first appearance; each
/// unordered pair of objects that ever co-occurs carries an [`EdgeVector`].
/// Pairs are stored once, oriented by lexicographic id order, and queries
/// in the opposite orientation are answered through the converse.
#[derive(Debug, Clone, Default)]
pub struct Qxg {
    objects: Vec<TrackedObject>,
    by_id: HashMap<String, usize>,
    // key: object indices, ordered so that id[key.0] < id[key.1]
    edges: BTreeMap<(u32, u32), EdgeVector>,
}

impl Qxg {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn objects(&self) -> &[TrackedObject] {
        &self.objects
    }

    pub fn object(&self, id: &str) -> Option<&TrackedObject> {
        self.by_id.get(id).map(|&i| &self.objects[i])
    }

    /// Total number of (pair, frame) relation entries.
    pub fn entry_count(&self) -> usize {
        self.edges.values().map(EdgeVector::len).sum()
    }

    /// Edges as (a, b, vector) with a.id < b.id, in deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = (&TrackedObject, &TrackedObject, &EdgeVector)> {
        self.edges.iter().map(move |(&(i, j), v)| {
            (&self.objects[i as usize], &self.objects[j as usize], v)
        })
    }

    /// Inserts the object if absent; returns its index. An existing object
    /// keeps its class unless it was inserted implicitly (empty class).
    pub fn upsert_object(&mut self, id: &str, class_label: &str) -> usize {
        if let Some(&idx) = self.by_id.get(id) {
            if self.objects[idx].class_label.is_empty() && !class_label.is_empty() {
                self.objects[idx].class_label = class_label.to_string();
            }
            return idx;
        }
        let idx = self.objects.len();
        self.objects.push(TrackedObject::new(id, class_label));
        self.by_id.insert(id.to_string(), idx);
        idx
    }

    fn canonical(&self, a: usize, b: usize) -> ((u32, u32), bool) {
        if self.objects[a].id < self.objects[b].id {
            ((a as u32, b as u32), false)
        } else {
            ((b as u32, a as u32), true)
        }
    }

    /// Records that relation `r` holds from `a` to `b` at `frame`. Missing
    /// nodes are inserted; a reversed caller order is canonicalized through
    /// the converse. Re-recording the same fact is a no-op.
    pub fn update(&mut self, frame: u32, a: &str, b: &str, r: RaRelation) -> Result<(), GraphError> {
        assert_ne!(a, b, "an object has no edge to itself");
        let ia = self.upsert_object(a, "");
        let ib = self.upsert_object(b, "");
        let (key, flipped) = self.canonical(ia, ib);
        let stored = if flipped { r.converse() } else { r };
        let vector = self.edges.entry(key).or_default();
        match vector.entries.get(&frame) {
            None => {
                vector.entries.insert(frame, stored);
                Ok(())
            }
            Some(&existing) if existing == stored => Ok(()),
            Some(&existing) => Err(GraphError::DuplicateEntry {
                a: self.objects[key.0 as usize].id.clone(),
                b: self.objects[key.1 as usize].id.clone(),
                frame,
                existing,
                new: stored,
            }),
        }
    }

    fn lookup_pair(&self, a: &str, b: &str) -> Result<(Option<&EdgeVector>, bool), GraphError> {
        let ia = *self
            .by_id
            .get(a)
            .ok_or_else(|| GraphError::UnknownObject(a.to_string()))?;
        let ib = *self
            .by_id
            .get(b)
            .ok_or_else(|| GraphError::UnknownObject(b.to_string()))?;
        let (key, flipped) = self.canonical(ia, ib);
        Ok((self.edges.get(&key), flipped))
    }

    /// The relation holding from `a` to `b` at frame `k`, if both objects
    /// were present there.
    pub fn relation_at(&self, a: &str, b: &str, k: u32) -> Result<Option<RaRelation>, GraphError> {
        let (vector, flipped) = self.lookup_pair(a, b)?;
        Ok(vector.and_then(|v| v.get(k)).map(|r| {
            if flipped {
                r.converse()
            } else {
                r
            }
        }))
    }

    /// Fraction of the m(m−1)/2 possible pairs that share at least one
    /// frame. `m` is the object universe to count against.
    pub fn density(&self, m: usize) -> f64 {
        assert!(m >= 2, "density needs at least 2 objects");
        self.edge_count() as f64 / (m * (m - 1) / 2) as f64
    }

    /// Renders the stored relations of a pair as one line per maximal run
    /// of consecutive frames with an identical relation.
    pub fn describe_pair(&self, a: &str, b: &str) -> Result<Vec<String>, GraphError> {
        let (vector, flipped) = self.lookup_pair(a, b)?;
        let vector =
            vector.ok_or_else(|| GraphError::UnknownPair(a.to_string(), b.to_string()))?;
        let mut lines = Vec::new();
        let mut run: Option<(u32, u32, RaRelation)> = None;
        let emit = |lines: &mut Vec<String>, start: u32, end: u32, r: RaRelation| {
            lines.push(format!(
                "{} {} {} on x, {} on y @ frames {}-{}",
                a,
                r.rx.long_name(),
                b,
                r.ry.long_name(),
                start,
                end
            ));
        };
        for (frame, stored) in vector.iter() {
            let r = if flipped { stored.converse() } else { stored };
            run = match run {
                Some((start, end, prev)) if prev == r && frame == end + 1 => {
                    Some((start, frame, prev))
                }
                Some((start, end, prev)) => {
                    emit(&mut lines, start, end, prev);
                    Some((frame, frame, r))
                }
                None => Some((frame, frame, r)),
            };
        }
        if let Some((start, end, r)) = run {
            emit(&mut lines, start, end, r);
        }
        Ok(lines)
    }

    /// Read-only summary of the graph.
    pub fn stats(&self) -> QxgStats {
        let mut per_frame: BTreeMap<u32, usize> = BTreeMap::new();
        for vector in self.edges.values() {
            for (frame, _) in vector.iter() {
                *per_frame.entry(frame).or_default() += 1;
            }
        }
        let frames = per_frame.keys().next_back().copied().unwrap_or(0);
        let mut lifespans: BTreeMap<String, (u32, u32)> = BTreeMap::new();
        for (a, b, vector) in self.edges() {
            for (frame, _) in vector.iter() {
                for id in [&a.id, &b.id] {
                    lifespans
                        .entry(id.clone())
                        .and_modify(|(lo, hi)| {
                            *lo = (*lo).min(frame);
                            *hi = (*hi).max(frame);
                        })
                        .or_insert((frame, frame));
                }
            }
        }
        QxgStats {
            objects: self.object_count(),
            edges: self.edge_count(),
            entries: self.entry_count(),
            frames,
            density: if self.object_count() >= 2 {
                self.density(self.object_count())
            } else {
                0.0
            },
            relations_per_frame: per_frame,
            lifespans,
        }
    }
}

/// Objects are compared as sets and edges by their endpoint ids, so two
/// graphs are equal whenever they store the same facts, regardless of
/// node insertion order.
impl PartialEq for Qxg {
    fn eq(&self, other: &Self) -> bool {
        if self.object_count() != other.object_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut mine: Vec<&TrackedObject> = self.objects.iter().collect();
        let mut theirs: Vec<&TrackedObject> = other.objects.iter().collect();
        mine.sort_by(|a, b| a.id.cmp(&b.id));
        theirs.sort_by(|a, b| a.id.cmp(&b.id));
        if mine != theirs {
            return false;
        }
        let key = |a: &TrackedObject, b: &TrackedObject| (a.id.clone(), b.id.clone());
        let lhs: BTreeMap<_, _> = self.edges().map(|(a, b, v)| (key(a, b), v)).collect();
        let rhs: BTreeMap<_, _> = other.edges().map(|(a, b, v)| (key(a, b), v)).collect();
        lhs == rhs
    }
}

impl Eq for Qxg {}

#[derive(Debug, Clone, PartialEq)]
pub struct QxgStats {
    pub objects: usize,
    pub edges: usize,
    pub entries: usize,
    /// Highest frame index with a stored relation (0 when empty).
    pub frames: u32,
    pub density: f64,
    pub relations_per_frame: BTreeMap<u32, usize>,
    /// First/last frame each object participates in an edge.
    pub lifespans: BTreeMap<String, (u32, u32)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allen::AllenRelation::*;

    fn rel(x: crate::allen::AllenRelation, y: crate::allen::AllenRelation) -> RaRelation {
        RaRelation::new(x, y)
    }

    #[test]
    fn update_inserts_nodes_and_entries() {
        let mut g = Qxg::new();
        g.update(1, "o2", "o3", rel(Precedes, PrecededBy)).unwrap();
        assert_eq!(g.object_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(
            g.relation_at("o2", "o3", 1).unwrap(),
            Some(rel(Precedes, PrecededBy))
        );
    }

    #[test]
    fn update_canonicalizes_reversed_order() {
        let mut g = Qxg::new();
        g.update(4, "o3", "o2", rel(PrecededBy, Precedes)).unwrap();
        assert_eq!(
            g.relation_at("o2", "o3", 4).unwrap(),
            Some(rel(Precedes, PrecededBy))
        );
        assert_eq!(
            g.relation_at("o3", "o2", 4).unwrap(),
            Some(rel(PrecededBy, Precedes))
        );
    }

    #[test]
    fn update_is_idempotent_but_rejects_conflicts() {
        let mut g = Qxg::new();
        let r = rel(Overlaps, Precedes);
        g.update(2, "a", "b", r).unwrap();
        g.update(2, "a", "b", r).unwrap(); // same fact: fine
        let err = g.update(2, "a", "b", rel(Meets, Precedes)).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEntry { frame: 2, .. }));
    }

    #[test]
    fn relation_at_edge_cases() {
        let mut g = Qxg::new();
        g.update(1, "a", "b", rel(Equals, Equals)).unwrap();
        assert_eq!(g.relation_at("a", "b", 2).unwrap(), None);
        assert!(matches!(
            g.relation_at("a", "zz", 1),
            Err(GraphError::UnknownObject(_))
        ));
        // both known but never co-present
        g.upsert_object("c", "car");
        assert_eq!(g.relation_at("a", "c", 1).unwrap(), None);
    }

    #[test]
    fn density_cases() {
        let mut g = Qxg::new();
        g.upsert_object("a", "");
        g.upsert_object("b", "");
        g.upsert_object("c", "");
        assert_eq!(g.density(3), 0.0);
        g.update(1, "a", "b", rel(Equals, Equals)).unwrap();
        assert!((g.density(3) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn describe_groups_consecutive_identical_relations() {
        let mut g = Qxg::new();
        let r = rel(Precedes, PrecededBy);
        for k in 1..=3 {
            g.update(k, "o2", "o3", r).unwrap();
        }
        g.update(5, "o2", "o3", r).unwrap(); // gap at 4 breaks the run
        g.update(6, "o2", "o3", rel(Meets, PrecededBy)).unwrap();
        let lines = g.describe_pair("o2", "o3").unwrap();
        assert_eq!(
            lines,
            vec![
                "o2 precedes o3 on x, preceded-by on y @ frames 1-3",
                "o2 precedes o3 on x, preceded-by on y @ frames 5-5",
                "o2 meets o3 on x, preceded-by on y @ frames 6-6",
            ]
        );
    }

    #[test]
    fn describe_single_frame_pair() {
        let mut g = Qxg::new();
        g.update(7, "a", "b", rel(During, Contains)).unwrap();
        let lines = g.describe_pair("a", "b").unwrap();
        assert_eq!(lines, vec!["a during b on x, contains on y @ frames 7-7"]);
    }

    #[test]
    fn describe_unknown_pair() {
        let mut g = Qxg::new();
        g.upsert_object("a", "");
        g.upsert_object("b", "");
        assert_eq!(
            g.describe_pair("a", "b").unwrap_err(),
            GraphError::UnknownPair("a".into(), "b".into())
        );
        assert!(matches!(
            g.describe_pair("a", "nope"),
            Err(GraphError::UnknownObject(_))
        ));
    }

    #[test]
    fn stats_on_empty_graph() {
        let g = Qxg::new();
        let s = g.stats();
        assert_eq!((s.objects, s.edges, s.entries, s.frames), (0, 0, 0, 0));
        assert_eq!(s.density, 0.0);
    }

    #[test]
    fn equality_ignores_insertion_order() {
        let mut g1 = Qxg::new();
        g1.upsert_object("a", "car");
        g1.upsert_object("b", "truck");
        g1.update(1, "a", "b", rel(Precedes, Equals)).unwrap();

        let mut g2 = Qxg::new();
        g2.upsert_object("b", "truck");
        g2.upsert_object("a", "car");
        g2.update(1, "b", "a", rel(PrecededBy, Equals)).unwrap();

        assert_eq!(g1, g2);
    }
}
