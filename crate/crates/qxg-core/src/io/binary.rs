//! Compact binary graph format `QXG1`.
//!
//! Layout (all counts LEB128 varints, relation bytes are flat indices):
//!
//! ```text
//! magic "QXG1"
//! varint object_count
//!   per object (sorted by id): varint id_len, id bytes (UTF-8),
//!                              varint class_len, class bytes
//! varint edge_count
//!   per edge (sorted by endpoint indices): varint i, varint j,
//!     varint entry_count,
//!     first entry:  varint absolute frame index, 1 relation byte
//!     later entries: varint frame delta (>= 1),  1 relation byte
//! ```

use thiserror::Error;

use crate::graph::Qxg;
use crate::rectangle::{RaRelation, RA_RELATION_COUNT};

pub const MAGIC: &[u8; 4] = b"QXG1";

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt data: {0}")]
    CorruptData(String),
}

fn corrupt(msg: impl Into<String>) -> CodecError {
    CodecError::CorruptData(msg.into())
}

fn write_varint(out: &mut Vec<u8>, mut value: u64) {
    loop {
        let byte = (value & 0x7f) as u8;
        value >>= 7;
        if value == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Result<u64, CodecError> {
    let mut value = 0u64;
    let mut shift = 0u32;
    loop {
        let byte = *bytes
            .get(*pos)
            .ok_or_else(|| corrupt("truncated varint"))?;
        *pos += 1;
        if shift >= 64 {
            return Err(corrupt("varint overflows 64 bits"));
        }
        value |= u64::from(byte & 0x7f) << shift;
        if byte & 0x80 == 0 {
            return Ok(value);
        }
        shift += 7;
    }
}

fn write_str(out: &mut Vec<u8>, s: &str) {
    write_varint(out, s.len() as u64);
    out.extend_from_slice(s.as_bytes());
}

fn read_str(bytes: &[u8], pos: &mut usize) -> Result<String, CodecError> {
    let len = read_varint(bytes, pos)? as usize;
    let end = pos
        .checked_add(len)
        .filter(|&end| end <= bytes.len())
        .ok_or_else(|| corrupt("truncated string"))?;
    let s = std::str::from_utf8(&bytes[*pos..end])
        .map_err(|_| corrupt("string is not valid UTF-8"))?
        .to_string();
    *pos = end;
    Ok(s)
}

/// Encodes a graph. Bytes are deterministic: objects sorted by id, edges
/// by endpoint indices, entries by frame.
pub fn encode_qxg(graph: &Qxg) -> Vec<u8> {
    let mut sorted: Vec<&crate::graph::TrackedObject> = graph.objects().iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let index_of: std::collections::HashMap<&str, u64> = sorted
        .iter()
        .enumerate()
        .map(|(i, o)| (o.id.as_str(), i as u64))
        .collect();

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    write_varint(&mut out, sorted.len() as u64);
    for obj in &sorted {
        write_str(&mut out, &obj.id);
        write_str(&mut out, &obj.class_label);
    }

    let mut edges: Vec<(u64, u64, &crate::graph::EdgeVector)> = graph
        .edges()
        .map(|(a, b, v)| (index_of[a.id.as_str()], index_of[b.id.as_str()], v))
        .collect();
    edges.sort_by_key(|&(i, j, _)| (i, j));

    write_varint(&mut out, edges.len() as u64);
    for (i, j, vector) in edges {
        write_varint(&mut out, i);
        write_varint(&mut out, j);
        write_varint(&mut out, vector.len() as u64);
        let mut previous: Option<u32> = None;
        for (frame, rel) in vector.iter() {
            match previous {
                None => write_varint(&mut out, u64::from(frame)),
                Some(p) => write_varint(&mut out, u64::from(frame - p)),
            }
            out.push(rel.flat_index() as u8);
            previous = Some(frame);
        }
    }
    out
}

/// Decodes a graph, validating every structural invariant of the format.
pub fn decode_qxg(bytes: &[u8]) -> Result<Qxg, CodecError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(corrupt("bad magic: expected QXG1"));
    }
    let mut pos = MAGIC.len();

    let object_count = read_varint(bytes, &mut pos)? as usize;
    let mut graph = Qxg::new();
    let mut ids = Vec::with_capacity(object_count);
    for _ in 0..object_count {
        let id = read_str(bytes, &mut pos)?;
        let class = read_str(bytes, &mut pos)?;
        if id.is_empty() {
            return Err(corrupt("empty object id"));
        }
        if graph.object(&id).is_some() {
            return Err(corrupt(format!("duplicate object id {id:?}")));
        }
        graph.upsert_object(&id, &class);
        ids.push(id);
    }

    let edge_count = read_varint(bytes, &mut pos)? as usize;
    for _ in 0..edge_count {
        let i = read_varint(bytes, &mut pos)? as usize;
        let j = read_varint(bytes, &mut pos)? as usize;
        if i >= object_count || j >= object_count {
            return Err(corrupt(format!("edge endpoint {} out of range", i.max(j))));
        }
        if i >= j {
            return Err(corrupt(format!("edge endpoints not canonical: ({i}, {j})")));
        }
        let entry_count = read_varint(bytes, &mut pos)?;
        if entry_count == 0 {
            return Err(corrupt("edge with no entries"));
        }
        let mut frame = 0u32;
        for e in 0..entry_count {
            let v = read_varint(bytes, &mut pos)?;
            if e > 0 && v == 0 {
                return Err(corrupt("zero frame delta"));
            }
            frame = u32::try_from(u64::from(frame) + v)
                .map_err(|_| corrupt("frame index overflows 32 bits"))?;
            if e == 0 && frame == 0 {
                return Err(corrupt("frame indices start at 1"));
            }
            let rel_byte = *bytes
                .get(pos)
                .ok_or_else(|| corrupt("truncated relation byte"))?;
            pos += 1;
            if usize::from(rel_byte) >= RA_RELATION_COUNT {
                return Err(corrupt(format!("relation byte {rel_byte} out of range")));
            }
            let rel = RaRelation::from_flat_index(usize::from(rel_byte)).expect("checked range");
            graph
                .update(frame, &ids[i], &ids[j], rel)
                .map_err(|e| corrupt(e.to_string()))?;
        }
    }

    if pos != bytes.len() {
        return Err(corrupt(format!(
            "{} trailing bytes after graph payload",
            bytes.len() - pos
        )));
    }
    Ok(graph)
}

pub fn write_graph_file(graph: &Qxg, path: impl AsRef<std::path::Path>) -> Result<(), CodecError> {
    Ok(std::fs::write(path, encode_qxg(graph))?)
}

pub fn read_graph_file(path: impl AsRef<std::path::Path>) -> Result<Qxg, CodecError> {
    decode_qxg(&std::fs::read(path)?)
}
