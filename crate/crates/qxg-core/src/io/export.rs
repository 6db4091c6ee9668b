//! Debug-friendly JSON view of a graph: objects plus edges with their
//! per-frame relations in the `(o,p)` text form.

use serde::{Deserialize, Serialize};

use crate::graph::Qxg;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphExport {
    pub objects: Vec<ObjectExport>,
    pub edges: Vec<EdgeExport>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ObjectExport {
    pub id: String,
    pub class: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EdgeExport {
    pub i: String,
    pub j: String,
    pub entries: Vec<EntryExport>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EntryExport {
    pub frame: u32,
    pub rel: String,
}

/// Deterministic export: objects sorted by id, edges by endpoint ids,
/// entries by frame.
pub fn export(graph: &Qxg) -> GraphExport {
    let mut objects: Vec<ObjectExport> = graph
        .objects()
        .iter()
        .map(|o| ObjectExport {
            id: o.id.clone(),
            class: o.class_label.clone(),
        })
        .collect();
    objects.sort_by(|a, b| a.id.cmp(&b.id));

    let mut edges: Vec<EdgeExport> = graph
        .edges()
        .map(|(a, b, vector)| EdgeExport {
            i: a.id.clone(),
            j: b.id.clone(),
            entries: vector
                .iter()
                .map(|(frame, rel)| EntryExport {
                    frame,
                    rel: rel.to_string(),
                })
                .collect(),
        })
        .collect();
    edges.sort_by(|a, b| (&a.i, &a.j).cmp(&(&b.i, &b.j)));

    GraphExport { objects, edges }
}

pub fn export_json(graph: &Qxg) -> String {
    serde_json::to_string_pretty(&export(graph)).expect("export serializes")
}
