//! Bipartite separated graphs: layers with per-vertex edge partitions,
//! generalized finite shift graphs and their adjacency matrices, and plain
//! digraphs.
//!
//! Edges run from a `bottom` vertex (source) to a `top` vertex (range).
//! Vertices and edges are sorted lexicographically by name on construction so
//! matrices and serializations are deterministic; separation blocks keep
//! their declaration order, which the resolution machinery relies on.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Blue => write!(f, "blue"),
            Color::Red => write!(f, "red"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerEdge {
    pub name: String,
    /// Index into `bottom`.
    pub src: u32,
    /// Index into `top`.
    pub tgt: u32,
    pub color: Color,
}

/// One bipartite layer of colored edges together with a separation: an
/// ordered list of disjoint, non-empty edge blocks partitioning the incoming
/// edges of each top vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedBipartiteLayer {
    top: Vec<String>,
    bottom: Vec<String>,
    edges: Vec<LayerEdge>,
    /// Per top vertex, the blocks as sorted lists of edge indices.
    separation: Vec<Vec<Vec<u32>>>,
}

/// Raw building blocks before canonicalization: edge tuples are
/// `(name, source name, target name, color)`; separation maps a top vertex
/// name to a list of blocks of edge names.
pub struct LayerSpec {
    pub top: Vec<String>,
    pub bottom: Vec<String>,
    pub edges: Vec<(String, String, String, Color)>,
    pub separation: BTreeMap<String, Vec<Vec<String>>>,
}

impl SeparatedBipartiteLayer {
    pub fn from_spec(spec: LayerSpec) -> Result<Self> {
        let mut top = spec.top;
        let mut bottom = spec.bottom;
        top.sort();
        top.dedup();
        bottom.sort();
        bottom.dedup();
        let top_idx: BTreeMap<&str, u32> = top
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let bottom_idx: BTreeMap<&str, u32> = bottom
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();

        let mut edges: Vec<LayerEdge> = Vec::with_capacity(spec.edges.len());
        let mut seen = BTreeSet::new();
        for (name, src, tgt, color) in spec.edges {
            if !seen.insert(name.clone()) {
                return Err(Error::Invalid(format!("duplicate edge id `{name}`")));
            }
            let src = *bottom_idx
                .get(src.as_str())
                .ok_or_else(|| Error::Invalid(format!("unknown source vertex `{src}`")))?;
            let tgt = *top_idx
                .get(tgt.as_str())
                .ok_or_else(|| Error::Invalid(format!("unknown target vertex `{tgt}`")))?;
            edges.push(LayerEdge {
                name,
                src,
                tgt,
                color,
            });
        }
        edges.sort_by(|a, b| a.name.cmp(&b.name));
        let edge_idx: BTreeMap<&str, u32> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.name.as_str(), i as u32))
            .collect();

        let mut separation = vec![Vec::new(); top.len()];
        for (vname, blocks) in spec.separation {
            let v = *top_idx
                .get(vname.as_str())
                .ok_or_else(|| Error::Invalid(format!("unknown separation vertex `{vname}`")))?;
            let mut out_blocks = Vec::with_capacity(blocks.len());
            for block in blocks {
                let mut ids = Vec::with_capacity(block.len());
                for ename in block {
                    let e = *edge_idx.get(ename.as_str()).ok_or_else(|| {
                        Error::Invalid(format!("unknown edge `{ename}` in separation"))
                    })?;
                    ids.push(e);
                }
                ids.sort();
                out_blocks.push(ids);
            }
            separation[v as usize] = out_blocks;
        }

        Ok(SeparatedBipartiteLayer {
            top,
            bottom,
            edges,
            separation,
        })
    }

    pub fn top(&self) -> &[String] {
        &self.top
    }

    pub fn bottom(&self) -> &[String] {
        &self.bottom
    }

    pub fn edges(&self) -> &[LayerEdge] {
        &self.edges
    }

    pub fn separation(&self) -> &[Vec<Vec<u32>>] {
        &self.separation
    }

    pub fn edge(&self, i: u32) -> &LayerEdge {
        &self.edges[i as usize]
    }

    pub fn incoming(&self, top: u32) -> Vec<u32> {
        (0..self.edges.len() as u32)
            .filter(|&i| self.edge(i).tgt == top)
            .collect()
    }

    pub fn blocks_at(&self, top: u32) -> &[Vec<u32>] {
        &self.separation[top as usize]
    }

    /// Replace the separation blocks (used when a construction derives them).
    pub(crate) fn set_separation(&mut self, separation: Vec<Vec<Vec<u32>>>) {
        self.separation = separation;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<R> {
    pub rule: R,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report<R> {
    pub violations: Vec<Violation<R>>,
    /// Conditions that could not be decided inside the stored horizon.
    pub unchecked: Vec<String>,
}

impl<R> Default for Report<R> {
    fn default() -> Self {
        Report {
            violations: Vec::new(),
            unchecked: Vec::new(),
        }
    }
}

impl<R> Report<R> {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: R, witness: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            witness: witness.into(),
        });
    }
}

impl<R: fmt::Debug> fmt::Display for Report<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{:?}: {}", v.rule, v.witness)?;
        }
        for u in &self.unchecked {
            writeln!(f, "unchecked at horizon: {}", u)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerRule {
    /// A separation block is empty.
    BlockEmpty,
    /// A block at vertex v contains an edge whose range is not v.
    BlockRangeMismatch,
    /// An incoming edge is not covered by any block of its range vertex.
    EdgeUncovered,
    /// An edge appears in more than one block.
    EdgeDoublyCovered,
}

/// Check the separation axioms of a bipartite layer. Report-style: all
/// violations are collected, each naming the offending vertex or edge.
pub fn validate_layer(layer: &SeparatedBipartiteLayer) -> Report<LayerRule> {
    let mut report = Report::default();
    let mut covered = vec![0usize; layer.edges.len()];
    for (v, blocks) in layer.separation.iter().enumerate() {
        for block in blocks {
            if block.is_empty() {
                report.push(
                    LayerRule::BlockEmpty,
                    format!("empty block at vertex `{}`", layer.top[v]),
                );
            }
            for &e in block {
                let edge = layer.edge(e);
                if edge.tgt as usize != v {
                    report.push(
                        LayerRule::BlockRangeMismatch,
                        format!(
                            "edge `{}` (range `{}`) listed in a block of `{}`",
                            edge.name, layer.top[edge.tgt as usize], layer.top[v]
                        ),
                    );
                }
                covered[e as usize] += 1;
            }
        }
    }
    for (i, edge) in layer.edges.iter().enumerate() {
        match covered[i] {
            0 => report.push(
                LayerRule::EdgeUncovered,
                format!("edge `{}` belongs to no block of `{}`", edge.name, layer.top[edge.tgt as usize]),
            ),
            1 => {}
            n => report.push(
                LayerRule::EdgeDoublyCovered,
                format!("edge `{}` appears in {n} blocks", edge.name),
            ),
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfsRule {
    /// Separation at a top vertex is not one non-empty all-blue block plus
    /// one non-empty all-red block.
    SeparationShape,
    /// A bottom vertex is the source of no blue edge.
    BlueSourceMissing,
    /// Two distinct blue edges share a source (`s(e) != s(e')` clause).
    BlueSourceShared,
    /// A bottom vertex is the source of no red edge.
    RedSourceMissing,
}

/// Check the generalized finite shift graph conditions on a layer that
/// already passes [`validate_layer`].
pub fn validate_gfs(layer: &SeparatedBipartiteLayer) -> Report<GfsRule> {
    let mut report = Report::default();
    for (v, blocks) in layer.separation.iter().enumerate() {
        let vname = &layer.top[v];
        let mut blue_blocks = 0;
        let mut red_blocks = 0;
        let mut mixed = false;
        for block in blocks {
            let mut colors: BTreeSet<Color> = BTreeSet::new();
            for &e in block {
                colors.insert(layer.edge(e).color);
            }
            match (colors.contains(&Color::Blue), colors.contains(&Color::Red)) {
                (true, true) => mixed = true,
                (true, false) => blue_blocks += 1,
                (false, true) => red_blocks += 1,
                (false, false) => {}
            }
        }
        if mixed || blue_blocks != 1 || red_blocks != 1 || blocks.len() != 2 {
            report.push(
                GfsRule::SeparationShape,
                format!(
                    "vertex `{vname}`: expected one blue and one red block, found {} block(s)",
                    blocks.len()
                ),
            );
        }
    }

    let mut blue_source: BTreeMap<u32, &str> = BTreeMap::new();
    let mut red_source: BTreeSet<u32> = BTreeSet::new();
    for edge in &layer.edges {
        match edge.color {
            Color::Blue => {
                if let Some(prev) = blue_source.insert(edge.src, &edge.name) {
                    report.push(
                        GfsRule::BlueSourceShared,
                        format!(
                            "blue edges `{}` and `{}` share source `{}`",
                            prev, edge.name, layer.bottom[edge.src as usize]
                        ),
                    );
                }
            }
            Color::Red => {
                red_source.insert(edge.src);
            }
        }
    }
    for (w, name) in layer.bottom.iter().enumerate() {
        if !blue_source.contains_key(&(w as u32)) {
            report.push(
                GfsRule::BlueSourceMissing,
                format!("bottom vertex `{name}` emits no blue edge"),
            );
        }
        if !red_source.contains(&(w as u32)) {
            report.push(
                GfsRule::RedSourceMissing,
                format!("bottom vertex `{name}` emits no red edge"),
            );
        }
    }
    report
}

/// A layer validated as a generalized finite shift graph, with the blue
/// block stored first at every top vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfsGraph {
    layer: SeparatedBipartiteLayer,
}

impl GfsGraph {
    pub fn new(mut layer: SeparatedBipartiteLayer) -> Result<Self> {
        let lr = validate_layer(&layer);
        if !lr.is_empty() {
            return Err(Error::Invalid(format!("not a valid layer:\n{lr}")));
        }
        let gr = validate_gfs(&layer);
        if !gr.is_empty() {
            return Err(Error::Invalid(format!(
                "not a generalized finite shift graph:\n{gr}"
            )));
        }
        // Canonical block order: blue first.
        let mut separation = layer.separation.clone();
        for blocks in &mut separation {
            blocks.sort_by_key(|block| layer.edges[block[0] as usize].color);
        }
        layer.set_separation(separation);
        Ok(GfsGraph { layer })
    }

    pub fn layer(&self) -> &SeparatedBipartiteLayer {
        &self.layer
    }

    /// The red multiplicity matrix `A` and the blue incidence matrix `I`,
    /// both indexed bottom x top in lexicographic name order.
    pub fn red_blue_matrices(&self) -> Result<(IntMatrix, IntMatrix)> {
        let layer = &self.layer;
        let rows = layer.bottom.to_vec();
        let cols = layer.top.to_vec();
        let mut a = IntMatrix::zero(rows.clone(), cols.clone());
        let mut i = IntMatrix::zero(rows, cols);
        for edge in &layer.edges {
            match edge.color {
                Color::Red => a.add_at(edge.src as usize, edge.tgt as usize, 1)?,
                Color::Blue => i.set(edge.src as usize, edge.tgt as usize, 1),
            }
        }
        Ok((a, i))
    }

    /// A generalized finite shift graph is refined when its red multiplicity
    /// matrix is a 0/1 matrix.
    pub fn is_refined(&self) -> Result<bool> {
        Ok(self.red_blue_matrices()?.0.is_zero_one())
    }
}

/// Plain finite digraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<String>,
    edges: Vec<(String, u32, u32)>,
}

impl Digraph {
    pub fn new(mut vertices: Vec<String>, edges: Vec<(String, String, String)>) -> Result<Self> {
        vertices.sort();
        vertices.dedup();
        let idx: BTreeMap<&str, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let mut out = Vec::with_capacity(edges.len());
        let mut seen = BTreeSet::new();
        for (name, src, tgt) in edges {
            if !seen.insert(name.clone()) {
                return Err(Error::Invalid(format!("duplicate edge id `{name}`")));
            }
            let s = *idx
                .get(src.as_str())
                .ok_or_else(|| Error::Invalid(format!("unknown vertex `{src}`")))?;
            let t = *idx
                .get(tgt.as_str())
                .ok_or_else(|| Error::Invalid(format!("unknown vertex `{tgt}`")))?;
            out.push((name, s, t));
        }
        out.sort();
        Ok(Digraph {
            vertices,
            edges: out,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Edges as `(name, source index, target index)`.
    pub fn edges(&self) -> &[(String, u32, u32)] {
        &self.edges
    }

    pub fn check_no_sinks_sources(&self) -> Result<()> {
        let mut has_out = vec![false; self.vertices.len()];
        let mut has_in = vec![false; self.vertices.len()];
        for (_, s, t) in &self.edges {
            has_out[*s as usize] = true;
            has_in[*t as usize] = true;
        }
        for (i, name) in self.vertices.iter().enumerate() {
            if !has_out[i] || !has_in[i] {
                return Err(Error::SinkOrSource {
                    vertex: name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Build the bipartite generalized finite shift graph of a digraph: both
/// vertex classes are copies of the digraph's vertices, each vertex
/// contributes one blue edge between its two copies, and each digraph edge
/// contributes one red edge from the copy of its source to the copy of its
/// target.
pub fn gfs_from_digraph(digraph: &Digraph) -> Result<GfsGraph> {
    digraph.check_no_sinks_sources()?;
    let top: Vec<String> = digraph.vertices().iter().map(|v| format!("{v}^")).collect();
    let bottom: Vec<String> = digraph.vertices().iter().map(|v| format!("{v}_")).collect();
    let mut edges = Vec::new();
    let mut separation: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for v in digraph.vertices() {
        edges.push((
            format!("e({v})"),
            format!("{v}_"),
            format!("{v}^"),
            Color::Blue,
        ));
    }
    for (name, s, t) in digraph.edges() {
        let sv = &digraph.vertices()[*s as usize];
        let tv = &digraph.vertices()[*t as usize];
        edges.push((
            format!("r({name})"),
            format!("{sv}_"),
            format!("{tv}^"),
            Color::Red,
        ));
    }
    for (vi, v) in digraph.vertices().iter().enumerate() {
        let blue = vec![format!("e({v})")];
        let red: Vec<String> = digraph
            .edges()
            .iter()
            .filter(|(_, _, t)| *t as usize == vi)
            .map(|(name, _, _)| format!("r({name})"))
            .collect();
        separation.insert(format!("{v}^"), vec![blue, red]);
    }
    let layer = SeparatedBipartiteLayer::from_spec(LayerSpec {
        top,
        bottom,
        edges,
        separation,
    })?;
    GfsGraph::new(layer)
}
