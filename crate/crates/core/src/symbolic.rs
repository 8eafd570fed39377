//! Built-in symbolic systems and their exact clopen-set calculus.
//!
//! Clopen subsets are finite unions of word cylinders normalized to a common
//! window; every operation (shift image, shift preimage, intersection,
//! wedge) is computed exactly on word sets. Diagrams are built from refined
//! partition sequences of these systems, and the word-level shift acts as
//! the independent oracle for all diagram-side dynamics.

use crate::diagram::{DiagEdge, LDiagramTrunc, SepBlock};
use crate::error::{Error, Result};
use crate::graph::{Color, Digraph};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicSystem {
    /// Full one-sided shift on `q` symbols.
    FullOneSided(usize),
    /// Full two-sided shift on `q` symbols.
    FullTwoSided(usize),
    /// One-sided edge shift of a finite digraph without sinks or sources.
    EdgeShift(Digraph),
}

impl SymbolicSystem {
    pub fn full_one_sided(q: usize) -> Self {
        assert!(q >= 1 && q <= 255);
        SymbolicSystem::FullOneSided(q)
    }

    pub fn full_two_sided(q: usize) -> Self {
        assert!(q >= 1 && q <= 255);
        SymbolicSystem::FullTwoSided(q)
    }

    pub fn edge_shift(digraph: Digraph) -> Result<Self> {
        digraph.check_no_sinks_sources()?;
        assert!(digraph.edges().len() <= 255);
        Ok(SymbolicSystem::EdgeShift(digraph))
    }

    fn two_sided(&self) -> bool {
        matches!(self, SymbolicSystem::FullTwoSided(_))
    }

    fn symbol_name(&self, s: u8) -> String {
        match self {
            SymbolicSystem::FullOneSided(_) | SymbolicSystem::FullTwoSided(_) => s.to_string(),
            SymbolicSystem::EdgeShift(d) => d.edges()[s as usize].0.clone(),
        }
    }

    /// Symbols that may follow `prev` (one position later in time).
    fn successors(&self, prev: Option<u8>) -> Vec<u8> {
        match self {
            SymbolicSystem::FullOneSided(q) | SymbolicSystem::FullTwoSided(q) => {
                (0..*q as u8).collect()
            }
            SymbolicSystem::EdgeShift(d) => match prev {
                // Consecutive edges e_i, e_{i+1} satisfy s(e_i) = r(e_{i+1}).
                Some(p) => {
                    let src = d.edges()[p as usize].1;
                    (0..d.edges().len() as u8)
                        .filter(|&c| d.edges()[c as usize].2 == src)
                        .collect()
                }
                None => (0..d.edges().len() as u8).collect(),
            },
        }
    }

    /// Symbols that may precede `next`.
    fn predecessors(&self, next: Option<u8>) -> Vec<u8> {
        match self {
            SymbolicSystem::FullOneSided(q) | SymbolicSystem::FullTwoSided(q) => {
                (0..*q as u8).collect()
            }
            SymbolicSystem::EdgeShift(d) => match next {
                Some(nx) => {
                    let rng = d.edges()[nx as usize].2;
                    (0..d.edges().len() as u8)
                        .filter(|&c| d.edges()[c as usize].1 == rng)
                        .collect()
                }
                None => (0..d.edges().len() as u8).collect(),
            },
        }
    }

    /// Maximal number of shift preimages of a point.
    pub fn max_preimages(&self) -> usize {
        match self {
            SymbolicSystem::FullOneSided(q) => *q,
            SymbolicSystem::FullTwoSided(_) => 1,
            SymbolicSystem::EdgeShift(d) => {
                let mut out_deg = vec![0usize; d.vertices().len()];
                for (_, s, _) in d.edges() {
                    out_deg[*s as usize] += 1;
                }
                out_deg.into_iter().max().unwrap_or(0)
            }
        }
    }
}

/// A clopen set: words of a fixed length placed at a fixed window start
/// (always 0 for one-sided systems). An empty word set is the empty set; the
/// single empty word at length zero is the whole space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clopen {
    pub start: i64,
    pub len: usize,
    pub words: BTreeSet<Vec<u8>>,
}

impl Clopen {
    pub fn whole_space() -> Self {
        Clopen {
            start: 0,
            len: 0,
            words: BTreeSet::from([Vec::new()]),
        }
    }

    pub fn cylinder(start: i64, word: Vec<u8>) -> Self {
        Clopen {
            start,
            len: word.len(),
            words: BTreeSet::from([word]),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.len as i64
    }

    /// Deterministic display name.
    pub fn name(&self, sys: &SymbolicSystem) -> String {
        if self.len == 0 && !self.words.is_empty() {
            return "X".to_string();
        }
        let words: Vec<String> = self
            .words
            .iter()
            .map(|w| {
                w.iter()
                    .map(|&s| sys.symbol_name(s))
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        if sys.two_sided() {
            format!("{}:{}", self.start, words.join("|"))
        } else {
            words.join("|")
        }
    }

    /// Refine to the window `[start, start+len)`; the new window must
    /// contain the old one, and one-sided systems keep `start == 0`.
    pub fn refine_to(&self, sys: &SymbolicSystem, start: i64, len: usize) -> Clopen {
        assert!(start <= self.start && start + len as i64 >= self.end());
        if !sys.two_sided() {
            assert_eq!(start, 0, "one-sided windows start at the origin");
        }
        let right = (start + len as i64 - self.end()) as usize;
        let left = (self.start - start) as usize;
        let mut words: BTreeSet<Vec<u8>> = self.words.clone();
        for _ in 0..right {
            let mut next = BTreeSet::new();
            for w in &words {
                for c in sys.successors(w.last().copied()) {
                    let mut nw = w.clone();
                    nw.push(c);
                    next.insert(nw);
                }
            }
            words = next;
        }
        for _ in 0..left {
            let mut next = BTreeSet::new();
            for w in &words {
                for c in sys.predecessors(w.first().copied()) {
                    let mut nw = Vec::with_capacity(w.len() + 1);
                    nw.push(c);
                    nw.extend_from_slice(w);
                    next.insert(nw);
                }
            }
            words = next;
        }
        Clopen { start, len, words }
    }

    fn common_window(sys: &SymbolicSystem, sets: &[&Clopen]) -> (i64, usize) {
        let start = sets.iter().map(|c| c.start).min().unwrap_or(0);
        let end = sets.iter().map(|c| c.end()).max().unwrap_or(0);
        if sys.two_sided() {
            (start, (end - start) as usize)
        } else {
            (0, end.max(0) as usize)
        }
    }

    pub fn intersect(&self, sys: &SymbolicSystem, other: &Clopen) -> Clopen {
        let (s, l) = Clopen::common_window(sys, &[self, other]);
        let a = self.refine_to(sys, s, l);
        let b = other.refine_to(sys, s, l);
        Clopen {
            start: s,
            len: l,
            words: a.words.intersection(&b.words).cloned().collect(),
        }
    }

    pub fn union(&self, sys: &SymbolicSystem, other: &Clopen) -> Clopen {
        let (s, l) = Clopen::common_window(sys, &[self, other]);
        let a = self.refine_to(sys, s, l);
        let b = other.refine_to(sys, s, l);
        Clopen {
            start: s,
            len: l,
            words: a.words.union(&b.words).cloned().collect(),
        }
    }

    pub fn is_subset(&self, sys: &SymbolicSystem, other: &Clopen) -> bool {
        let (s, l) = Clopen::common_window(sys, &[self, other]);
        let a = self.refine_to(sys, s, l);
        let b = other.refine_to(sys, s, l);
        a.words.is_subset(&b.words)
    }

    /// Exact shift image.
    pub fn image(&self, sys: &SymbolicSystem) -> Clopen {
        if sys.two_sided() {
            return Clopen {
                start: self.start - 1,
                len: self.len,
                words: self.words.clone(),
            };
        }
        // Edge shifts need length >= 2 so that tails stay constrained.
        let min_len = if matches!(sys, SymbolicSystem::EdgeShift(_)) {
            2
        } else {
            1
        };
        let c = if self.len < min_len {
            self.refine_to(sys, 0, min_len)
        } else {
            self.clone()
        };
        Clopen {
            start: 0,
            len: c.len - 1,
            words: c.words.iter().map(|w| w[1..].to_vec()).collect(),
        }
    }

    pub fn image_pow(&self, sys: &SymbolicSystem, k: usize) -> Clopen {
        let mut c = self.clone();
        for _ in 0..k {
            c = c.image(sys);
        }
        c
    }

    /// Exact shift preimage.
    pub fn preimage(&self, sys: &SymbolicSystem) -> Clopen {
        if sys.two_sided() {
            return Clopen {
                start: self.start + 1,
                len: self.len,
                words: self.words.clone(),
            };
        }
        let c = if matches!(sys, SymbolicSystem::EdgeShift(_)) && self.len == 0 {
            self.refine_to(sys, 0, 1)
        } else {
            self.clone()
        };
        let mut words = BTreeSet::new();
        for w in &c.words {
            for p in sys.predecessors(w.first().copied()) {
                let mut nw = Vec::with_capacity(w.len() + 1);
                nw.push(p);
                nw.extend_from_slice(w);
                words.insert(nw);
            }
        }
        Clopen {
            start: 0,
            len: c.len + 1,
            words,
        }
    }

    /// Whether the shift restricted to this set is injective (exact: for a
    /// union of positive-length cylinders this means pairwise distinct
    /// tails; the two-sided shift is globally injective).
    pub fn shift_injective(&self, sys: &SymbolicSystem) -> bool {
        if sys.two_sided() {
            return true;
        }
        let min_len = if matches!(sys, SymbolicSystem::EdgeShift(_)) {
            2
        } else {
            1
        };
        if self.len < min_len {
            if self.words.is_empty() {
                return true;
            }
            return self.refine_to(sys, 0, min_len).shift_injective(sys);
        }
        let tails: BTreeSet<&[u8]> = self.words.iter().map(|w| &w[1..]).collect();
        tails.len() == self.words.len()
    }
}

/// A partition into clopen cells, sorted by display name.
pub type Partition = Vec<Clopen>;

fn sort_partition(sys: &SymbolicSystem, mut cells: Partition) -> Partition {
    cells.sort_by_key(|c| c.name(sys));
    cells
}

/// All valid words on the window, as the refinement of the whole space.
fn all_words(sys: &SymbolicSystem, start: i64, len: usize) -> Clopen {
    let x = if sys.two_sided() {
        Clopen {
            start,
            len: 0,
            words: BTreeSet::from([Vec::new()]),
        }
    } else {
        Clopen::whole_space()
    };
    x.refine_to(sys, start, len)
}

/// The natural cylinder partition at depth `n`: all length-`n+1` windows
/// (growing left on odd steps for the two-sided shift).
pub fn natural_partition(sys: &SymbolicSystem, n: usize) -> Partition {
    let (start, len) = match sys {
        SymbolicSystem::FullTwoSided(_) => {
            let j = n / 2;
            if n % 2 == 0 {
                (-(j as i64), n + 1)
            } else {
                (-(j as i64) - 1, n + 1)
            }
        }
        _ => (0, n + 1),
    };
    let words = all_words(sys, start, len);
    sort_partition(
        sys,
        words
            .words
            .into_iter()
            .map(|w| Clopen::cylinder(start, w))
            .collect(),
    )
}

/// Partition membership map at a fixed window: word -> cell index.
fn membership(
    sys: &SymbolicSystem,
    partition: &Partition,
    start: i64,
    len: usize,
) -> BTreeMap<Vec<u8>, usize> {
    let mut map = BTreeMap::new();
    for (i, cell) in partition.iter().enumerate() {
        let refined = cell.refine_to(sys, start, len);
        for w in refined.words {
            let prev = map.insert(w, i);
            assert!(prev.is_none(), "partition cells overlap");
        }
    }
    map
}

fn partition_window(sys: &SymbolicSystem, parts: &[&Partition]) -> (i64, usize) {
    let refs: Vec<&Clopen> = parts.iter().flat_map(|p| p.iter()).collect();
    Clopen::common_window(sys, &refs)
}

/// Wedge of two partitions: common refinement with empty cells dropped.
pub fn wedge(sys: &SymbolicSystem, a: &Partition, b: &Partition) -> Partition {
    let (start, len) = partition_window(sys, &[a, b]);
    let ma = membership(sys, a, start, len);
    let mb = membership(sys, b, start, len);
    let mut groups: BTreeMap<(usize, usize), BTreeSet<Vec<u8>>> = BTreeMap::new();
    for (w, &ia) in &ma {
        let ib = *mb.get(w).expect("partitions cover the same space");
        groups.entry((ia, ib)).or_default().insert(w.clone());
    }
    sort_partition(
        sys,
        groups
            .into_values()
            .map(|words| Clopen { start, len, words })
            .collect(),
    )
}

/// The image-side partition: group the words of a common window by the set
/// of cell images containing them (each point of a group has exactly one
/// preimage per listed cell, and none elsewhere).
pub fn p_sigma(sys: &SymbolicSystem, p: &Partition) -> Partition {
    let images: Vec<Clopen> = p.iter().map(|c| c.image(sys)).collect();
    let image_refs: Vec<&Clopen> = images.iter().collect();
    let (start, len) = Clopen::common_window(sys, &image_refs);
    let refined: Vec<Clopen> = images
        .into_iter()
        .map(|c| c.refine_to(sys, start, len))
        .collect();
    let mut groups: BTreeMap<Vec<usize>, BTreeSet<Vec<u8>>> = BTreeMap::new();
    for w in all_words(sys, start, len).words {
        let pattern: Vec<usize> = refined
            .iter()
            .enumerate()
            .filter(|(_, c)| c.words.contains(&w))
            .map(|(i, _)| i)
            .collect();
        assert!(!pattern.is_empty(), "the shift is surjective");
        groups.entry(pattern).or_default().insert(w);
    }
    sort_partition(
        sys,
        groups
            .into_values()
            .map(|words| Clopen { start, len, words })
            .collect(),
    )
}

/// The pullback partition `{preimage(Z)}`.
pub fn sigma_inv_partition(sys: &SymbolicSystem, p: &Partition) -> Partition {
    sort_partition(sys, p.iter().map(|c| c.preimage(sys)).collect())
}

/// The two wedges used to close a partition sequence under the shift:
/// `(P v P^sigma, P v sigma^{-1}(P))`. Requires the shift to be injective on
/// every cell of `P`.
pub fn refine_partition(sys: &SymbolicSystem, p: &Partition) -> Result<(Partition, Partition)> {
    for cell in p {
        if !cell.shift_injective(sys) {
            return Err(Error::NonInjectiveCell {
                cell: cell.name(sys),
            });
        }
    }
    let with_images = wedge(sys, p, &p_sigma(sys, p));
    let with_preimages = wedge(sys, p, &sigma_inv_partition(sys, p));
    Ok((with_images, with_preimages))
}

/// The closed partition sequence `P_0..P_depth`: natural partitions wedged
/// at odd steps with the image-side partition of the previous level and at
/// even steps with its preimage pullback.
pub fn sigma_refined_partitions(sys: &SymbolicSystem, depth: usize) -> Result<Vec<Partition>> {
    let mut out: Vec<Partition> = Vec::with_capacity(depth + 1);
    let p0 = natural_partition(sys, 0);
    for cell in &p0 {
        if !cell.shift_injective(sys) {
            return Err(Error::NonInjectiveCell {
                cell: cell.name(sys),
            });
        }
    }
    out.push(p0);
    for n in 1..=depth {
        let natural = natural_partition(sys, n);
        let prev = &out[n - 1];
        let next = if n % 2 == 1 {
            wedge(sys, &wedge(sys, &natural, prev), &p_sigma(sys, prev))
        } else {
            wedge(
                sys,
                &wedge(sys, &natural, prev),
                &sigma_inv_partition(sys, prev),
            )
        };
        out.push(next);
    }
    Ok(out)
}

/// A diagram whose level-`n` vertices are the cells of the `n`-th partition,
/// retained for word-oracle cross checks.
pub struct BuiltDiagram {
    pub diagram: LDiagramTrunc,
    pub system: SymbolicSystem,
    pub partitions: Vec<Partition>,
}

impl BuiltDiagram {
    pub fn cell_of(&self, level: usize, vertex: u32) -> &Clopen {
        &self.partitions[level][vertex as usize]
    }
}

/// Build the depth-`depth` diagram of a symbolic system from its closed
/// partition sequence: vertices are cells, blue edges are inclusions, red
/// edges at even layers connect a cell to every cell whose shift image
/// contains it, and red edges at odd layers follow the shift forward into
/// the coarser level.
pub fn build_ldiagram(sys: &SymbolicSystem, depth: usize) -> Result<BuiltDiagram> {
    let partitions = sigma_refined_partitions(sys, depth)?;
    build_ldiagram_from_partitions(sys, partitions)
}

/// Same construction from an explicitly supplied refined partition sequence
/// (for instance a subsampled one).
pub fn build_ldiagram_from_partitions(
    sys: &SymbolicSystem,
    partitions: Vec<Partition>,
) -> Result<BuiltDiagram> {
    let levels: Vec<Vec<String>> = partitions
        .iter()
        .map(|p| p.iter().map(|c| c.name(sys)).collect())
        .collect();
    let mut raw_layers: Vec<(Vec<DiagEdge>, Vec<Vec<SepBlock>>)> = Vec::new();

    for n in 0..partitions.len() - 1 {
        let coarse = &partitions[n];
        let fine = &partitions[n + 1];
        let mut edges: Vec<DiagEdge> = Vec::new();

        let mut blue_of_src: Vec<u32> = Vec::with_capacity(fine.len());
        for (wi, cell) in fine.iter().enumerate() {
            let parent = coarse
                .iter()
                .position(|z| cell.is_subset(sys, z))
                .expect("every fine cell has a parent");
            blue_of_src.push(edges.len() as u32);
            edges.push(DiagEdge {
                name: format!("b[{}]", cell.name(sys)),
                src: wi as u32,
                tgt: parent as u32,
                color: Color::Blue,
            });
        }

        let mut red_ids: Vec<(usize, usize, u32)> = Vec::new();
        if n % 2 == 0 {
            for (wi, cell) in fine.iter().enumerate() {
                for (vi, z) in coarse.iter().enumerate() {
                    if cell.is_subset(sys, &z.image(sys)) {
                        red_ids.push((wi, vi, edges.len() as u32));
                        edges.push(DiagEdge {
                            name: format!("r[{}<{}]", cell.name(sys), z.name(sys)),
                            src: wi as u32,
                            tgt: vi as u32,
                            color: Color::Red,
                        });
                    }
                }
            }
        } else {
            for (wi, cell) in fine.iter().enumerate() {
                let img = cell.image(sys);
                let vi = coarse
                    .iter()
                    .position(|z| img.is_subset(sys, z))
                    .expect("the image of a fine cell lands in one coarse cell");
                red_ids.push((wi, vi, edges.len() as u32));
                edges.push(DiagEdge {
                    name: format!("r[{}]", cell.name(sys)),
                    src: wi as u32,
                    tgt: vi as u32,
                    color: Color::Red,
                });
            }
        }

        let mut seps: Vec<Vec<SepBlock>> = vec![Vec::new(); coarse.len()];
        for vi in 0..coarse.len() {
            let blue: Vec<u32> = (0..fine.len())
                .filter(|&wi| edges[blue_of_src[wi] as usize].tgt as usize == vi)
                .map(|wi| blue_of_src[wi])
                .collect();
            let mut blocks = Vec::new();
            if !blue.is_empty() {
                blocks.push(SepBlock {
                    parent: None,
                    edges: blue,
                });
            }
            let reds: Vec<u32> = red_ids
                .iter()
                .filter(|(_, tgt, _)| *tgt == vi)
                .map(|(_, _, e)| *e)
                .collect();
            if n % 2 == 0 {
                if !reds.is_empty() {
                    blocks.push(SepBlock {
                        parent: None,
                        edges: reds,
                    });
                }
            } else {
                let (prev_edges, _) = &raw_layers[n - 1];
                let prev_coarse = &partitions[n - 1];
                for (pe_idx, pe) in prev_edges.iter().enumerate() {
                    if pe.color != Color::Red || pe.src as usize != vi {
                        continue;
                    }
                    let parent_range = &prev_coarse[pe.tgt as usize];
                    let members: Vec<u32> = reds
                        .iter()
                        .copied()
                        .filter(|&e| {
                            let src_cell = &fine[edges[e as usize].src as usize];
                            src_cell.is_subset(sys, parent_range)
                        })
                        .collect();
                    if !members.is_empty() {
                        blocks.push(SepBlock {
                            parent: Some(pe_idx as u32),
                            edges: members,
                        });
                    }
                }
            }
            seps[vi] = blocks;
        }
        raw_layers.push((edges, seps));
    }

    let diagram = LDiagramTrunc::from_parts(levels, raw_layers)?;
    Ok(BuiltDiagram {
        diagram,
        system: sys.clone(),
        partitions,
    })
}
