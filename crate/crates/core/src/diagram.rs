//! Depth-truncated two-colored separated Bratteli diagrams.
//!
//! A diagram stores vertex levels `0..=N` and edge layers `0..N`; edges in
//! layer `k` run from a level-`k+1` vertex (source) up to a level-`k` vertex
//! (range). Even-level vertices carry a two-block separation (all blue
//! edges, all red edges); odd-level vertices carry one blue block plus one
//! red block per red edge of the previous layer leaving that vertex,
//! recorded through the block's `parent` field.

use crate::error::{Error, Result};
use crate::graph::{Color, GfsGraph, LayerSpec, Report, SeparatedBipartiteLayer};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagEdge {
    pub name: String,
    /// Index into the level below (source).
    pub src: u32,
    /// Index into the level above (range).
    pub tgt: u32,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepBlock {
    /// For red blocks at odd levels: the red edge of the previous layer this
    /// block belongs to (index into that layer's edge list).
    pub parent: Option<u32>,
    pub edges: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagLayer {
    pub edges: Vec<DiagEdge>,
    /// Separation blocks per top vertex.
    pub seps: Vec<Vec<SepBlock>>,
    // Derived adjacency lists.
    in_blue: Vec<Vec<u32>>,
    in_red: Vec<Vec<u32>>,
    out_blue: Vec<Vec<u32>>,
    out_red: Vec<Vec<u32>>,
}

impl DiagLayer {
    fn new(
        top_len: usize,
        bottom_len: usize,
        edges: Vec<DiagEdge>,
        seps: Vec<Vec<SepBlock>>,
    ) -> Self {
        let mut layer = DiagLayer {
            edges,
            seps,
            in_blue: vec![Vec::new(); top_len],
            in_red: vec![Vec::new(); top_len],
            out_blue: vec![Vec::new(); bottom_len],
            out_red: vec![Vec::new(); bottom_len],
        };
        for (i, e) in layer.edges.iter().enumerate() {
            match e.color {
                Color::Blue => {
                    layer.in_blue[e.tgt as usize].push(i as u32);
                    layer.out_blue[e.src as usize].push(i as u32);
                }
                Color::Red => {
                    layer.in_red[e.tgt as usize].push(i as u32);
                    layer.out_red[e.src as usize].push(i as u32);
                }
            }
        }
        layer
    }

    pub fn edge(&self, i: u32) -> &DiagEdge {
        &self.edges[i as usize]
    }

    pub fn in_blue(&self, v: u32) -> &[u32] {
        &self.in_blue[v as usize]
    }

    pub fn in_red(&self, v: u32) -> &[u32] {
        &self.in_red[v as usize]
    }

    pub fn out_blue(&self, w: u32) -> &[u32] {
        &self.out_blue[w as usize]
    }

    pub fn out_red(&self, w: u32) -> &[u32] {
        &self.out_red[w as usize]
    }

    /// The red block labeled by `parent` at top vertex `v`, if any.
    pub fn red_block(&self, v: u32, parent: u32) -> Option<&[u32]> {
        self.seps[v as usize]
            .iter()
            .find(|b| b.parent == Some(parent))
            .map(|b| b.edges.as_slice())
    }

    /// The parent edge of the block containing red edge `e`.
    pub fn parent_of_red(&self, e: u32) -> Option<u32> {
        let v = self.edge(e).tgt;
        self.seps[v as usize]
            .iter()
            .find(|b| b.edges.contains(&e))
            .and_then(|b| b.parent)
    }

    /// Whether edges `e` and `f` lie in a common separation block.
    pub fn same_block(&self, e: u32, f: u32) -> bool {
        let v = self.edge(e).tgt;
        if self.edge(f).tgt != v {
            return false;
        }
        self.seps[v as usize]
            .iter()
            .any(|b| b.edges.contains(&e) && b.edges.contains(&f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LDiagramTrunc {
    levels: Vec<Vec<String>>,
    layers: Vec<DiagLayer>,
}

/// A romb: blue pair `(e0, e1)` and red pair `(f0, f1)` spanning levels
/// `base..base+2`, with `r(e0) = r(f0)`, `s(e0) = r(e1)`, `s(f0) = r(f1)`
/// and `s(e1) = s(f1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Romb {
    pub base_level: usize,
    pub e0: u32,
    pub e1: u32,
    pub f0: u32,
    pub f1: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagRule {
    /// A layer fails the basic separation axioms.
    LayerAxioms,
    /// Even-level separation is not {blue block, red block}.
    EvenSeparationShape,
    /// Odd-level separation is not {blue block} plus labeled red blocks.
    OddSeparationShape,
    /// The labels of the red blocks at an odd vertex do not match the red
    /// edges of the previous layer leaving it.
    OddRedBlockParents,
    /// A vertex is not the source of exactly one blue edge.
    BlueSourceCount,
    /// An even-level vertex is not the source of exactly one red edge.
    RedSourceCountEven,
    /// An odd-level vertex is the source of no red edge.
    RedSourceMissingOdd,
    /// Compatibility at an even vertex: grandchild sets along blue and red
    /// routes disagree.
    Compatibility,
    /// A red pair admits no blue completion.
    RedPairNoBlueCompletion,
    /// A red pair admits several blue completions.
    RedPairAmbiguousBlueCompletion,
    /// A blue pair (with a parent red edge at odd base) admits no red
    /// completion.
    BluePairNoRedCompletion,
    /// A blue pair admits several red completions.
    BluePairAmbiguousRedCompletion,
}

impl LDiagramTrunc {
    /// Assemble a diagram from explicit parts. Edges of each layer are
    /// sorted by name, blocks are put in canonical order (blue block first,
    /// red blocks by parent index) and block contents are sorted, so two
    /// diagrams describing the same labeled structure compare equal.
    pub fn from_parts(
        levels: Vec<Vec<String>>,
        raw_layers: Vec<(Vec<DiagEdge>, Vec<Vec<SepBlock>>)>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("diagram needs at least one level".into()));
        }
        if raw_layers.len() + 1 != levels.len() {
            return Err(Error::Invalid(format!(
                "{} levels require {} layers, got {}",
                levels.len(),
                levels.len() - 1,
                raw_layers.len()
            )));
        }
        let mut layers = Vec::with_capacity(raw_layers.len());
        // New index of the previous layer's old edge index (for parents).
        let mut prev_perm: Option<Vec<u32>> = None;
        for (k, (mut edges, seps)) in raw_layers.into_iter().enumerate() {
            let top_len = levels[k].len();
            let bottom_len = levels[k + 1].len();
            for e in &edges {
                if e.tgt as usize >= top_len || e.src as usize >= bottom_len {
                    return Err(Error::Invalid(format!(
                        "edge `{}` out of range in layer {k}",
                        e.name
                    )));
                }
            }
            if seps.len() != top_len {
                return Err(Error::Invalid(format!(
                    "layer {k} has {} separation entries for {top_len} top vertices",
                    seps.len()
                )));
            }
            let mut order: Vec<u32> = (0..edges.len() as u32).collect();
            order.sort_by(|&a, &b| edges[a as usize].name.cmp(&edges[b as usize].name));
            let mut remap = vec![0u32; edges.len()];
            for (new, &old) in order.iter().enumerate() {
                remap[old as usize] = new as u32;
            }
            let mut sorted_edges: Vec<(u32, DiagEdge)> = Vec::with_capacity(edges.len());
            for (old, e) in edges.drain(..).enumerate() {
                sorted_edges.push((remap[old], e));
            }
            sorted_edges.sort_by_key(|(new, _)| *new);
            {
                let mut seen = BTreeSet::new();
                for (_, e) in &sorted_edges {
                    if !seen.insert(e.name.clone()) {
                        return Err(Error::Invalid(format!(
                            "duplicate edge id `{}` in layer {k}",
                            e.name
                        )));
                    }
                }
            }
            let edges: Vec<DiagEdge> = sorted_edges.into_iter().map(|(_, e)| e).collect();

            let mut new_seps: Vec<Vec<SepBlock>> = Vec::with_capacity(top_len);
            for blocks in seps {
                let mut out = Vec::with_capacity(blocks.len());
                for mut b in blocks {
                    for e in &mut b.edges {
                        *e = remap[*e as usize];
                    }
                    b.edges.sort();
                    if let (Some(p), Some(pmap)) = (b.parent, prev_perm.as_ref()) {
                        b.parent = Some(pmap[p as usize]);
                    }
                    out.push(b);
                }
                out.sort_by_key(|b| {
                    let first_color = b
                        .edges
                        .first()
                        .map(|&e| edges[e as usize].color)
                        .unwrap_or(Color::Blue);
                    (first_color, b.parent)
                });
                new_seps.push(out);
            }
            prev_perm = Some(remap);
            layers.push(DiagLayer::new(top_len, bottom_len, edges, new_seps));
        }
        Ok(LDiagramTrunc { levels, layers })
    }

    /// Number of stored vertex levels (`horizon + 1`).
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Number of stored edge layers.
    pub fn horizon(&self) -> usize {
        self.layers.len()
    }

    pub fn level(&self, k: usize) -> &[String] {
        &self.levels[k]
    }

    pub fn layer(&self, k: usize) -> &DiagLayer {
        &self.layers[k]
    }

    pub fn require_layer(&self, k: usize) -> Result<&DiagLayer> {
        self.layers.get(k).ok_or(Error::HorizonExceeded {
            needed: k,
            stored: self.horizon(),
        })
    }

    pub fn vertex_index(&self, level: usize, name: &str) -> Option<u32> {
        self.levels[level]
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    pub fn edge_index(&self, layer: usize, name: &str) -> Option<u32> {
        self.layers[layer]
            .edges
            .iter()
            .position(|e| e.name == name)
            .map(|i| i as u32)
    }

    /// The unique blue edge with source `v` (a level-`level` vertex,
    /// `level >= 1`), i.e. the blue edge of layer `level-1` leaving `v`.
    pub fn blue_up(&self, level: usize, v: u32) -> Result<u32> {
        match self.layers[level - 1].out_blue(v) {
            [e] => Ok(*e),
            [] => Err(Error::Invalid(format!(
                "vertex `{}` at level {level} has no blue edge upward",
                self.levels[level][v as usize]
            ))),
            _ => Err(Error::Invalid(format!(
                "vertex `{}` at level {level} has several blue edges upward",
                self.levels[level][v as usize]
            ))),
        }
    }

    /// Red edges with source `v` (level `level >= 1`), in layer `level-1`.
    pub fn red_ups(&self, level: usize, v: u32) -> &[u32] {
        self.layers[level - 1].out_red(v)
    }

    /// The unique blue path from the level-`level` vertex `v` up to level 0,
    /// returned as layer-0-first edge indices.
    pub fn blue_path_to(&self, level: usize, v: u32) -> Result<Vec<u32>> {
        let mut path = vec![0u32; level];
        let mut cur = v;
        for k in (1..=level).rev() {
            let e = self.blue_up(k, cur)?;
            path[k - 1] = e;
            cur = self.layers[k - 1].edge(e).tgt;
        }
        Ok(path)
    }

    /// View of edge layer `k` as a standalone bipartite separated layer.
    pub fn layer_as_bipartite(&self, k: usize) -> SeparatedBipartiteLayer {
        let layer = &self.layers[k];
        let spec = LayerSpec {
            top: self.levels[k].clone(),
            bottom: self.levels[k + 1].clone(),
            edges: layer
                .edges
                .iter()
                .map(|e| {
                    (
                        e.name.clone(),
                        self.levels[k + 1][e.src as usize].clone(),
                        self.levels[k][e.tgt as usize].clone(),
                        e.color,
                    )
                })
                .collect(),
            separation: self.levels[k]
                .iter()
                .enumerate()
                .map(|(v, name)| {
                    (
                        name.clone(),
                        layer.seps[v]
                            .iter()
                            .map(|b| {
                                b.edges
                                    .iter()
                                    .map(|&e| layer.edge(e).name.clone())
                                    .collect()
                            })
                            .collect(),
                    )
                })
                .collect(),
        };
        SeparatedBipartiteLayer::from_spec(spec).expect("stored layer is internally consistent")
    }

    /// The generalized finite shift graph formed by even edge layer `2j`.
    pub fn even_layer_gfs(&self, two_j: usize) -> Result<GfsGraph> {
        if two_j % 2 != 0 {
            return Err(Error::Invalid(format!("layer {two_j} is not even")));
        }
        self.require_layer(two_j)?;
        GfsGraph::new(self.layer_as_bipartite(two_j))
    }

    /// Stack the first `keep` layers of `top` above `rest`; the interface
    /// level of `top` must equal level 0 of `rest` by name.
    pub fn stack(top: &LDiagramTrunc, keep: usize, rest: &LDiagramTrunc) -> Result<LDiagramTrunc> {
        if top.levels[keep] != rest.levels[0] {
            return Err(Error::StructureMismatch {
                reason: "interface vertex sets differ".into(),
            });
        }
        let mut levels: Vec<Vec<String>> = top.levels[..keep].to_vec();
        levels.extend(rest.levels.iter().cloned());
        let mut layers: Vec<DiagLayer> = top.layers[..keep].to_vec();
        layers.extend(rest.layers.iter().cloned());
        Ok(LDiagramTrunc { levels, layers })
    }

    /// Drop everything below vertex level `n` (keeping `n` edge layers).
    pub fn truncate(&self, n: usize) -> LDiagramTrunc {
        LDiagramTrunc {
            levels: self.levels[..=n].to_vec(),
            layers: self.layers[..n].to_vec(),
        }
    }
}

// ---------------------------------------------------------------------------
// Romb solvers
// ---------------------------------------------------------------------------

fn composable_blue(l0: &DiagLayer, l1: &DiagLayer, e0: u32, e1: u32) -> Result<()> {
    if l1.edge(e1).tgt != l0.edge(e0).src {
        return Err(Error::Invalid("blue pair is not composable".into()));
    }
    Ok(())
}

/// Complete a blue pair based at an even level to its unique romb.
/// `e0` lies in layer `base` (even), `e1` in layer `base+1`.
pub fn complete_romb_from_blue(d: &LDiagramTrunc, base: usize, e0: u32, e1: u32) -> Result<Romb> {
    if base % 2 != 0 {
        return Err(Error::Invalid(
            "blue pair at odd base needs a parent red edge; use complete_romb_odd".into(),
        ));
    }
    d.require_layer(base + 1)?;
    let l0 = d.layer(base);
    let l1 = d.layer(base + 1);
    composable_blue(l0, l1, e0, e1)?;
    let v = l0.edge(e0).tgt;
    let target = l1.edge(e1).src;
    let mut found = Vec::new();
    for &f0 in l0.in_red(v) {
        let w = l0.edge(f0).src;
        if let Some(block) = l1.red_block(w, f0) {
            for &f1 in block {
                if l1.edge(f1).src == target {
                    found.push((f0, f1));
                }
            }
        }
    }
    match found.as_slice() {
        [(f0, f1)] => Ok(Romb {
            base_level: base,
            e0,
            e1,
            f0: *f0,
            f1: *f1,
        }),
        [] => Err(Error::NoCompletion),
        _ => Err(Error::AmbiguousCompletion),
    }
}

/// Complete a blue pair based at an odd level, relative to the red edge `g`
/// of layer `base-1` with `s(g) = r(e0)`: the red completion has `f0` in the
/// block labeled `g`.
pub fn complete_romb_odd(d: &LDiagramTrunc, base: usize, g: u32, e0: u32, e1: u32) -> Result<Romb> {
    if base % 2 != 1 {
        return Err(Error::Invalid(
            "complete_romb_odd needs an odd base level".into(),
        ));
    }
    d.require_layer(base + 1)?;
    let l0 = d.layer(base);
    let l1 = d.layer(base + 1);
    composable_blue(l0, l1, e0, e1)?;
    let v = l0.edge(e0).tgt;
    if d.layer(base - 1).edge(g).src != v {
        return Err(Error::Invalid(
            "parent red edge does not leave the base vertex".into(),
        ));
    }
    let target = l1.edge(e1).src;
    let mut found = Vec::new();
    if let Some(block) = l0.red_block(v, g) {
        for &f0 in block {
            let w = l0.edge(f0).src;
            for &f1 in l1.in_red(w) {
                if l1.edge(f1).src == target {
                    found.push((f0, f1));
                }
            }
        }
    }
    match found.as_slice() {
        [(f0, f1)] => Ok(Romb {
            base_level: base,
            e0,
            e1,
            f0: *f0,
            f1: *f1,
        }),
        [] => Err(Error::NoCompletion),
        _ => Err(Error::AmbiguousCompletion),
    }
}

/// Complete a red pair `(f0, f1)` (layer `base`, layer `base+1`) to its
/// unique blue pair. At an even base the pair must satisfy the block
/// condition `f1 in R(f0)`.
pub fn complete_romb_from_red(d: &LDiagramTrunc, base: usize, f0: u32, f1: u32) -> Result<Romb> {
    d.require_layer(base + 1)?;
    let l0 = d.layer(base);
    let l1 = d.layer(base + 1);
    if l1.edge(f1).tgt != l0.edge(f0).src {
        return Err(Error::Invalid("red pair is not composable".into()));
    }
    if base % 2 == 0 && l1.parent_of_red(f1) != Some(f0) {
        return Err(Error::Invalid(
            "red pair violates the block condition at an even base".into(),
        ));
    }
    let v = l0.edge(f0).tgt;
    let target = l1.edge(f1).src;
    let mut found = Vec::new();
    for &e0 in l0.in_blue(v) {
        let w = l0.edge(e0).src;
        for &e1 in l1.in_blue(w) {
            if l1.edge(e1).src == target {
                found.push((e0, e1));
            }
        }
    }
    match found.as_slice() {
        [(e0, e1)] => Ok(Romb {
            base_level: base,
            e0: *e0,
            e1: *e1,
            f0,
            f1,
        }),
        [] => Err(Error::NoCompletion),
        _ => Err(Error::AmbiguousCompletion),
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Check every diagram condition decidable inside the stored horizon; romb
/// existence and uniqueness are verified by exhaustive search. Conditions
/// that look one layer past the horizon are reported as unchecked.
pub fn validate_ldiagram(d: &LDiagramTrunc) -> Report<DiagRule> {
    let mut report = Report::default();

    for k in 0..d.horizon() {
        let bip = d.layer_as_bipartite(k);
        let lr = crate::graph::validate_layer(&bip);
        for v in lr.violations {
            report.push(DiagRule::LayerAxioms, format!("layer {k}: {}", v.witness));
        }
        check_separation_shape(d, k, &mut report);
    }

    for n in 1..d.num_levels() {
        let layer = d.layer(n - 1);
        for v in 0..d.level(n).len() as u32 {
            let name = &d.level(n)[v as usize];
            let blues = layer.out_blue(v).len();
            if blues != 1 {
                report.push(
                    DiagRule::BlueSourceCount,
                    format!("vertex `{name}` at level {n} emits {blues} blue edges"),
                );
            }
            let reds = layer.out_red(v).len();
            if n % 2 == 0 {
                if reds != 1 {
                    report.push(
                        DiagRule::RedSourceCountEven,
                        format!("vertex `{name}` at level {n} emits {reds} red edges"),
                    );
                }
            } else if reds == 0 {
                report.push(
                    DiagRule::RedSourceMissingOdd,
                    format!("vertex `{name}` at level {n} emits no red edge"),
                );
            }
        }
    }

    for level in (0..d.num_levels()).step_by(2) {
        if level + 2 >= d.num_levels() {
            report
                .unchecked
                .push(format!("compatibility at even level {level}"));
            continue;
        }
        check_compatibility(d, level, &mut report);
    }

    for base in 0..d.horizon().saturating_sub(1) {
        check_rombs(d, base, &mut report);
    }
    if d.horizon() >= 1 {
        report
            .unchecked
            .push(format!("rombs based at layer {}", d.horizon() - 1));
    }

    report
}

fn check_separation_shape(d: &LDiagramTrunc, k: usize, report: &mut Report<DiagRule>) {
    let layer = d.layer(k);
    let all_color = |b: &SepBlock, c: Color| {
        !b.edges.is_empty() && b.edges.iter().all(|&e| layer.edge(e).color == c)
    };
    for v in 0..d.level(k).len() as u32 {
        let name = &d.level(k)[v as usize];
        let blocks = &layer.seps[v as usize];
        if k % 2 == 0 {
            let shape_ok = blocks.len() == 2
                && blocks.iter().all(|b| b.parent.is_none())
                && blocks.iter().filter(|b| all_color(b, Color::Blue)).count() == 1
                && blocks.iter().filter(|b| all_color(b, Color::Red)).count() == 1;
            if !shape_ok {
                report.push(
                    DiagRule::EvenSeparationShape,
                    format!("vertex `{name}` at even level {k}"),
                );
            }
        } else {
            let blue_blocks: Vec<&SepBlock> = blocks.iter().filter(|b| b.parent.is_none()).collect();
            let red_blocks: Vec<&SepBlock> = blocks.iter().filter(|b| b.parent.is_some()).collect();
            if blue_blocks.len() != 1
                || !all_color(blue_blocks[0], Color::Blue)
                || !red_blocks.iter().all(|b| all_color(b, Color::Red))
            {
                report.push(
                    DiagRule::OddSeparationShape,
                    format!("vertex `{name}` at odd level {k}"),
                );
            }
            let expected: BTreeSet<u32> = d.red_ups(k, v).iter().copied().collect();
            let mut got = BTreeSet::new();
            let mut dup = false;
            for b in &red_blocks {
                if let Some(p) = b.parent {
                    if !got.insert(p) {
                        dup = true;
                    }
                }
            }
            if got != expected || dup {
                report.push(
                    DiagRule::OddRedBlockParents,
                    format!(
                        "vertex `{name}` at level {k}: block labels {got:?} vs red edges upward {expected:?}"
                    ),
                );
            }
        }
    }
}

fn check_compatibility(d: &LDiagramTrunc, level: usize, report: &mut Report<DiagRule>) {
    let l0 = d.layer(level);
    let l1 = d.layer(level + 1);
    for v in 0..d.level(level).len() as u32 {
        let vname = &d.level(level)[v as usize];
        let mut via_blue: Vec<u32> = Vec::new();
        for &e in l0.in_blue(v) {
            let w = l0.edge(e).src;
            for &e1 in l1.in_blue(w) {
                via_blue.push(l1.edge(e1).src);
            }
        }
        let mut via_red: Vec<u32> = Vec::new();
        for &f in l0.in_red(v) {
            let w = l0.edge(f).src;
            if let Some(block) = l1.red_block(w, f) {
                for &f1 in block {
                    via_red.push(l1.edge(f1).src);
                }
            }
        }
        let blue_set: BTreeSet<u32> = via_blue.iter().copied().collect();
        let red_set: BTreeSet<u32> = via_red.iter().copied().collect();
        if blue_set.len() != via_blue.len() || red_set.len() != via_red.len() || blue_set != red_set
        {
            report.push(
                DiagRule::Compatibility,
                format!(
                    "vertex `{vname}` at level {level}: blue route reaches {blue_set:?}, red route {red_set:?}"
                ),
            );
        }
    }
}

fn check_rombs(d: &LDiagramTrunc, base: usize, report: &mut Report<DiagRule>) {
    let l0 = d.layer(base);
    let l1 = d.layer(base + 1);

    for f0 in 0..l0.edges.len() as u32 {
        if l0.edge(f0).color != Color::Red {
            continue;
        }
        let w = l0.edge(f0).src;
        let f1s: Vec<u32> = if base % 2 == 0 {
            l1.red_block(w, f0).map(|b| b.to_vec()).unwrap_or_default()
        } else {
            l1.in_red(w).to_vec()
        };
        for f1 in f1s {
            match complete_romb_from_red(d, base, f0, f1) {
                Ok(_) => {}
                Err(Error::NoCompletion) => report.push(
                    DiagRule::RedPairNoBlueCompletion,
                    format!(
                        "red pair (`{}`, `{}`) based at layer {base}",
                        l0.edge(f0).name,
                        l1.edge(f1).name
                    ),
                ),
                Err(Error::AmbiguousCompletion) => report.push(
                    DiagRule::RedPairAmbiguousBlueCompletion,
                    format!(
                        "red pair (`{}`, `{}`) based at layer {base}",
                        l0.edge(f0).name,
                        l1.edge(f1).name
                    ),
                ),
                Err(_) => {}
            }
        }
    }

    for e0 in 0..l0.edges.len() as u32 {
        if l0.edge(e0).color != Color::Blue {
            continue;
        }
        let w = l0.edge(e0).src;
        for &e1 in l1.in_blue(w) {
            if base % 2 == 0 {
                match complete_romb_from_blue(d, base, e0, e1) {
                    Ok(_) => {}
                    Err(Error::NoCompletion) => report.push(
                        DiagRule::BluePairNoRedCompletion,
                        format!(
                            "blue pair (`{}`, `{}`) based at layer {base}",
                            l0.edge(e0).name,
                            l1.edge(e1).name
                        ),
                    ),
                    Err(Error::AmbiguousCompletion) => report.push(
                        DiagRule::BluePairAmbiguousRedCompletion,
                        format!(
                            "blue pair (`{}`, `{}`) based at layer {base}",
                            l0.edge(e0).name,
                            l1.edge(e1).name
                        ),
                    ),
                    Err(_) => {}
                }
            } else {
                let v = l0.edge(e0).tgt;
                for &g in d.red_ups(base, v) {
                    match complete_romb_odd(d, base, g, e0, e1) {
                        Ok(_) => {}
                        Err(Error::NoCompletion) => report.push(
                            DiagRule::BluePairNoRedCompletion,
                            format!(
                                "blue pair (`{}`, `{}`) with parent `{}` at layer {base}",
                                l0.edge(e0).name,
                                l1.edge(e1).name,
                                d.layer(base - 1).edge(g).name
                            ),
                        ),
                        Err(Error::AmbiguousCompletion) => report.push(
                            DiagRule::BluePairAmbiguousRedCompletion,
                            format!(
                                "blue pair (`{}`, `{}`) with parent `{}` at layer {base}",
                                l0.edge(e0).name,
                                l1.edge(e1).name,
                                d.layer(base - 1).edge(g).name
                            ),
                        ),
                        Err(_) => {}
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HDiagRule {
    /// Separation at some vertex is not exactly {blue block, red block}.
    TwoBlockShape,
    /// A vertex does not emit exactly one blue and one red edge.
    SourceCounts,
    /// Grandchild compatibility along blue and red routes fails.
    Compatibility,
}

/// Check the homeomorphism-diagram conditions within the horizon.
pub fn validate_hdiagram(d: &LDiagramTrunc) -> Report<HDiagRule> {
    let mut report = Report::default();
    for k in 0..d.horizon() {
        let layer = d.layer(k);
        for v in 0..d.level(k).len() as u32 {
            let name = &d.level(k)[v as usize];
            let blocks = &layer.seps[v as usize];
            let blue = blocks
                .iter()
                .filter(|b| {
                    !b.edges.is_empty()
                        && b.edges.iter().all(|&e| layer.edge(e).color == Color::Blue)
                })
                .count();
            let red = blocks
                .iter()
                .filter(|b| {
                    !b.edges.is_empty()
                        && b.edges.iter().all(|&e| layer.edge(e).color == Color::Red)
                })
                .count();
            if blocks.len() != 2 || blue != 1 || red != 1 {
                report.push(
                    HDiagRule::TwoBlockShape,
                    format!("vertex `{name}` at level {k} has {} blocks", blocks.len()),
                );
            }
        }
    }
    for n in 1..d.num_levels() {
        let layer = d.layer(n - 1);
        for v in 0..d.level(n).len() as u32 {
            let name = &d.level(n)[v as usize];
            if layer.out_blue(v).len() != 1 || layer.out_red(v).len() != 1 {
                report.push(
                    HDiagRule::SourceCounts,
                    format!(
                        "vertex `{name}` at level {n}: {} blue / {} red edges upward",
                        layer.out_blue(v).len(),
                        layer.out_red(v).len()
                    ),
                );
            }
        }
    }
    for level in 0..d.num_levels() {
        if level + 2 >= d.num_levels() {
            report
                .unchecked
                .push(format!("compatibility at level {level}"));
            continue;
        }
        let l0 = d.layer(level);
        let l1 = d.layer(level + 1);
        for v in 0..d.level(level).len() as u32 {
            let mut via_blue = BTreeSet::new();
            let mut blue_count = 0usize;
            for &e in l0.in_blue(v) {
                for &e1 in l1.in_blue(l0.edge(e).src) {
                    via_blue.insert(l1.edge(e1).src);
                    blue_count += 1;
                }
            }
            let mut via_red = BTreeSet::new();
            let mut red_count = 0usize;
            for &f in l0.in_red(v) {
                for &f1 in l1.in_red(l0.edge(f).src) {
                    via_red.insert(l1.edge(f1).src);
                    red_count += 1;
                }
            }
            if via_blue != via_red || via_blue.len() != blue_count || via_red.len() != red_count {
                report.push(
                    HDiagRule::Compatibility,
                    format!("vertex `{}` at level {level}", d.level(level)[v as usize]),
                );
            }
        }
    }
    report
}

/// Layers containing parallel red edges (same source and range).
pub fn refinement_violations(d: &LDiagramTrunc) -> Vec<usize> {
    let mut out = Vec::new();
    for k in 0..d.horizon() {
        let layer = d.layer(k);
        let mut seen = BTreeSet::new();
        for e in &layer.edges {
            if e.color == Color::Red && !seen.insert((e.src, e.tgt)) {
                out.push(k);
                break;
            }
        }
    }
    out
}

/// A diagram is refined when no two parallel red edges join the same pair
/// of vertices.
pub fn is_refined(d: &LDiagramTrunc) -> bool {
    refinement_violations(d).is_empty()
}

// ---------------------------------------------------------------------------
// Telescoping
// ---------------------------------------------------------------------------

/// A strictly increasing index sequence with even head and odd gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionSequence(Vec<usize>);

impl ContractionSequence {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Invalid("empty contraction sequence".into()));
        }
        if indices[0] % 2 != 0 {
            return Err(Error::CrViolated { index: 0 });
        }
        for i in 1..indices.len() {
            if indices[i] <= indices[i - 1] || (indices[i] - indices[i - 1]) % 2 != 1 {
                return Err(Error::CrViolated { index: i });
            }
        }
        Ok(ContractionSequence(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// The single sequence describing two successive contractions:
    /// telescoping by `self` and then by `other` equals telescoping once by
    /// `self.compose(other)`, whose `n`-th index is `self[other[n]]`.
    pub fn compose(&self, other: &ContractionSequence) -> Result<ContractionSequence> {
        let composed = other.0.iter().map(|&i| self.0[i]).collect();
        ContractionSequence::new(composed)
    }
}

#[derive(Clone)]
struct TelePath {
    /// Constituent edge indices, topmost layer first.
    edges: Vec<u32>,
    src: u32,
    tgt: u32,
}

/// Contract a diagram along the sequence `m`: output level `n` is input
/// level `m_n`, output edges are the monochromatic composable paths between
/// consecutive picked levels (red paths obeying the block rule when leaving
/// an even layer), and a contracted edge is named by the comma-joined names
/// of its constituents, so iterated contractions flatten structurally.
pub fn telescope(d: &LDiagramTrunc, m: &ContractionSequence) -> Result<LDiagramTrunc> {
    let idx = m.indices();
    let last = *idx.last().unwrap();
    if last >= d.num_levels() {
        return Err(Error::HorizonExceeded {
            needed: last,
            stored: d.num_levels().saturating_sub(1),
        });
    }

    let levels: Vec<Vec<String>> = idx.iter().map(|&k| d.level(k).to_vec()).collect();
    let mut raw_layers = Vec::new();

    let blue_paths = |j: usize, l: usize| -> Vec<TelePath> {
        let mut acc: Vec<TelePath> = d
            .layer(j)
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.color == Color::Blue)
            .map(|(i, e)| TelePath {
                edges: vec![i as u32],
                src: e.src,
                tgt: e.tgt,
            })
            .collect();
        for k in j + 1..l {
            let layer = d.layer(k);
            let mut next = Vec::new();
            for p in &acc {
                for &e in layer.in_blue(p.src) {
                    let mut edges = p.edges.clone();
                    edges.push(e);
                    next.push(TelePath {
                        edges,
                        src: layer.edge(e).src,
                        tgt: p.tgt,
                    });
                }
            }
            acc = next;
        }
        acc
    };

    let red_paths = |j: usize, l: usize| -> Vec<TelePath> {
        let mut acc: Vec<TelePath> = d
            .layer(j)
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.color == Color::Red)
            .map(|(i, e)| TelePath {
                edges: vec![i as u32],
                src: e.src,
                tgt: e.tgt,
            })
            .collect();
        for k in j + 1..l {
            let layer = d.layer(k);
            let mut next = Vec::new();
            for p in &acc {
                let last_edge = *p.edges.last().unwrap();
                let candidates: Vec<u32> = if (k - 1) % 2 == 0 {
                    layer
                        .red_block(p.src, last_edge)
                        .map(|b| b.to_vec())
                        .unwrap_or_default()
                } else {
                    layer.in_red(p.src).to_vec()
                };
                for e in candidates {
                    let mut edges = p.edges.clone();
                    edges.push(e);
                    next.push(TelePath {
                        edges,
                        src: layer.edge(e).src,
                        tgt: p.tgt,
                    });
                }
            }
            acc = next;
        }
        acc
    };

    let path_name = |j: usize, p: &TelePath| -> String {
        p.edges
            .iter()
            .enumerate()
            .map(|(off, &e)| d.layer(j + off).edge(e).name.clone())
            .collect::<Vec<_>>()
            .join(",")
    };

    let mut prev_reds: Vec<TelePath> = Vec::new();
    let mut prev_blue_count = 0u32;
    for n in 0..idx.len() - 1 {
        let j = idx[n];
        let l = idx[n + 1];
        let blues = blue_paths(j, l);
        let reds = red_paths(j, l);

        let mut edges = Vec::new();
        for p in &blues {
            edges.push(DiagEdge {
                name: path_name(j, p),
                src: p.src,
                tgt: p.tgt,
                color: Color::Blue,
            });
        }
        let red_offset = edges.len() as u32;
        for p in &reds {
            edges.push(DiagEdge {
                name: path_name(j, p),
                src: p.src,
                tgt: p.tgt,
                color: Color::Red,
            });
        }

        let top_len = d.level(j).len();
        let mut blue_at: Vec<Vec<u32>> = vec![Vec::new(); top_len];
        for (i, p) in blues.iter().enumerate() {
            blue_at[p.tgt as usize].push(i as u32);
        }
        let mut seps: Vec<Vec<SepBlock>> = vec![Vec::new(); top_len];
        if n % 2 == 0 {
            let mut red_at: Vec<Vec<u32>> = vec![Vec::new(); top_len];
            for (i, p) in reds.iter().enumerate() {
                red_at[p.tgt as usize].push(red_offset + i as u32);
            }
            for v in 0..top_len {
                let mut blocks = Vec::new();
                if !blue_at[v].is_empty() {
                    blocks.push(SepBlock {
                        parent: None,
                        edges: blue_at[v].clone(),
                    });
                }
                if !red_at[v].is_empty() {
                    blocks.push(SepBlock {
                        parent: None,
                        edges: red_at[v].clone(),
                    });
                }
                seps[v] = blocks;
            }
        } else {
            // Red blocks are indexed by the contracted red edge of the
            // previous output layer whose last constituent labels the block
            // of the path's first constituent.
            let mut parent_by_tail: BTreeMap<u32, u32> = BTreeMap::new();
            for (i, p) in prev_reds.iter().enumerate() {
                parent_by_tail.insert(*p.edges.last().unwrap(), prev_blue_count + i as u32);
            }
            let mut grouped: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
            for (i, p) in reds.iter().enumerate() {
                let first = p.edges[0];
                let g = d
                    .layer(j)
                    .parent_of_red(first)
                    .expect("red edge at an odd layer lies in a labeled block");
                let parent = *parent_by_tail
                    .get(&g)
                    .expect("every red edge upward is the tail of a contracted red path");
                grouped
                    .entry((p.tgt, parent))
                    .or_default()
                    .push(red_offset + i as u32);
            }
            for v in 0..top_len {
                let mut blocks = Vec::new();
                if !blue_at[v].is_empty() {
                    blocks.push(SepBlock {
                        parent: None,
                        edges: blue_at[v].clone(),
                    });
                }
                for ((tgt, parent), block) in &grouped {
                    if *tgt as usize == v {
                        blocks.push(SepBlock {
                            parent: Some(*parent),
                            edges: block.clone(),
                        });
                    }
                }
                seps[v] = blocks;
            }
        }
        raw_layers.push((edges, seps));
        prev_reds = reds;
        prev_blue_count = red_offset;
    }

    LDiagramTrunc::from_parts(levels, raw_layers)
}
