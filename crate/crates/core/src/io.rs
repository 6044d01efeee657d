//! JSON file formats: graphs, weight maps, move sequences (plain or
//! quasi), and helpers for canonical serialization. All rationals are
//! written as lowest-terms strings, never floats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, MoveSequence, QuasiMove, SharingMove, WeightDistribution};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::rational::{format_rational, parse_rational, ParseRationalError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("invalid rational in quasi move {index}: {source}")]
    QuasiAmount {
        index: usize,
        source: ParseRationalError,
    },
}

/// On-disk graph: `{"vertices": [...], "edges": [["a","b"], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<Graph, GraphError> {
        let edges: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|[a, b]| (a.clone(), b.clone()))
            .collect();
        Graph::build(&self.vertices, &edges)
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphFile {
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(a, b)| {
                    [g.vertex_name(a).to_string(), g.vertex_name(b).to_string()]
                })
                .collect(),
        }
    }
}

pub fn parse_graph(json: &str) -> Result<Graph, IoError> {
    let file: GraphFile = serde_json::from_str(json)?;
    Ok(file.to_graph()?)
}

/// Weights file: `{"vertex": "rational-string", ...}`, covering exactly
/// the declared vertices.
pub fn parse_weights(json: &str, g: &Graph) -> Result<WeightDistribution, IoError> {
    let map: BTreeMap<String, String> = serde_json::from_str(json)?;
    Ok(WeightDistribution::from_named_map(g, &map)?)
}

/// Serializes a distribution as a sorted vertex-name map of canonical
/// rational strings.
pub fn weights_to_map(g: &Graph, w: &WeightDistribution) -> BTreeMap<String, String> {
    (0..g.vertex_count())
        .map(|i| (g.vertex_name(i).to_string(), format_rational(w.get(i))))
        .collect()
}

/// A quasi move on disk: `{"edge": ["x", "y"], "s": "1/4"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiMoveFile {
    pub edge: [String; 2],
    pub s: String,
}

/// A move file is either a list of plain sharing moves (arrays of
/// vertex names) or a list of quasi moves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MovesFile {
    Sharing(Vec<Vec<String>>),
    Quasi(Vec<QuasiMoveFile>),
}

/// Parsed move file, resolved against a graph.
#[derive(Debug, Clone)]
pub enum ParsedMoves {
    Sharing(MoveSequence),
    Quasi(Vec<QuasiMove>),
}

pub fn parse_moves(json: &str, g: &Graph) -> Result<ParsedMoves, IoError> {
    let file: MovesFile = serde_json::from_str(json)?;
    match file {
        MovesFile::Sharing(list) => {
            let mut seq = Vec::with_capacity(list.len());
            for names in &list {
                let indices = names
                    .iter()
                    .map(|n| g.vertex_index(n))
                    .collect::<Result<Vec<_>, _>>()?;
                seq.push(SharingMove::new(g, VertexSet::new(indices))?);
            }
            Ok(ParsedMoves::Sharing(seq))
        }
        MovesFile::Quasi(list) => {
            let mut seq = Vec::with_capacity(list.len());
            for (index, qm) in list.iter().enumerate() {
                let x = g.vertex_index(&qm.edge[0])?;
                let y = g.vertex_index(&qm.edge[1])?;
                let amount = parse_rational(&qm.s)
                    .map_err(|source| IoError::QuasiAmount { index, source })?;
                seq.push(QuasiMove { x, y, amount });
            }
            Ok(ParsedMoves::Quasi(seq))
        }
    }
}

/// Serializes a move sequence as arrays of vertex names.
pub fn moves_to_lists(g: &Graph, seq: &[SharingMove]) -> Vec<Vec<String>> {
    seq.iter()
        .map(|m| {
            m.target()
                .iter()
                .map(|i| g.vertex_name(i).to_string())
                .collect()
        })
        .collect()
}

/// Serializes a vertex set as a list of names.
pub fn set_to_names(g: &Graph, s: &VertexSet) -> Vec<String> {
    s.iter().map(|i| g.vertex_name(i).to_string()).collect()
}
