//! Truncated dynamics on the space of infinite blue paths: shifting a prefix
//! through romb chains, enumerating preimage branches, exact cylinder images
//! and preimages, and the cylinder decompositions carried by even layers.
//!
//! Depth ledger: shifting an even-depth prefix loses one level; each
//! preimage branch of an odd-depth prefix loses one level; one exact image
//! step of a cylinder set raises the depth by one (after evening out) and
//! consumes two extra stored layers.

use crate::diagram::{
    complete_romb_from_blue, complete_romb_from_red, complete_romb_odd, LDiagramTrunc,
};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use std::collections::{BTreeMap, BTreeSet};

/// A finite all-blue path from level 0: `edges[k]` lies in layer `k`, the
/// root is the level-0 vertex `r(edges[0])` (for depth 0, just a vertex).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BluePrefix {
    pub root: u32,
    pub edges: Vec<u32>,
}

impl BluePrefix {
    pub fn vertex(root: u32) -> Self {
        BluePrefix {
            root,
            edges: Vec::new(),
        }
    }

    pub fn new(d: &LDiagramTrunc, edges: Vec<u32>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Invalid(
                "use BluePrefix::vertex for depth-0 prefixes".into(),
            ));
        }
        let p = BluePrefix {
            root: d.layer(0).edge(edges[0]).tgt,
            edges,
        };
        p.check(d)?;
        Ok(p)
    }

    pub fn check(&self, d: &LDiagramTrunc) -> Result<()> {
        for (k, &e) in self.edges.iter().enumerate() {
            let layer = d.require_layer(k)?;
            let edge = layer.edge(e);
            if edge.color != crate::graph::Color::Blue {
                return Err(Error::Invalid(format!("edge `{}` is not blue", edge.name)));
            }
            if k == 0 {
                if edge.tgt != self.root {
                    return Err(Error::Invalid("prefix root mismatch".into()));
                }
            } else if d.layer(k - 1).edge(self.edges[k - 1]).src != edge.tgt {
                return Err(Error::Invalid("prefix is not composable".into()));
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    /// Deepest vertex as `(level, index)`.
    pub fn tip(&self, d: &LDiagramTrunc) -> (usize, u32) {
        match self.edges.last() {
            Some(&e) => (self.edges.len(), d.layer(self.edges.len() - 1).edge(e).src),
            None => (0, self.root),
        }
    }

    pub fn truncate(&self, depth: usize) -> BluePrefix {
        assert!(depth <= self.depth());
        BluePrefix {
            root: self.root,
            edges: self.edges[..depth].to_vec(),
        }
    }

    /// The unique prefix reaching the level-`level` vertex `v`.
    pub fn to_vertex(d: &LDiagramTrunc, level: usize, v: u32) -> Result<BluePrefix> {
        if level == 0 {
            return Ok(BluePrefix::vertex(v));
        }
        let edges = d.blue_path_to(level, v)?;
        Ok(BluePrefix {
            root: d.layer(0).edge(edges[0]).tgt,
            edges,
        })
    }

    pub fn name(&self, d: &LDiagramTrunc) -> String {
        if self.edges.is_empty() {
            return format!("<{}>", d.level(0)[self.root as usize]);
        }
        let names: Vec<String> = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &e)| d.layer(k).edge(e).name.clone())
            .collect();
        format!("<{}>", names.join(";"))
    }
}

/// All blue extensions of `p` down to depth `to_depth`; their cylinders
/// partition the cylinder of `p`.
pub fn extensions(d: &LDiagramTrunc, p: &BluePrefix, to_depth: usize) -> Result<Vec<BluePrefix>> {
    if to_depth < p.depth() {
        return Err(Error::InsufficientDepth {
            depth: to_depth,
            needed: p.depth(),
        });
    }
    if to_depth > d.horizon() {
        return Err(Error::HorizonExceeded {
            needed: to_depth,
            stored: d.horizon(),
        });
    }
    let mut acc = vec![p.clone()];
    for k in p.depth()..to_depth {
        let layer = d.layer(k);
        let mut next = Vec::new();
        for q in &acc {
            let (_, tip) = q.tip(d);
            for &e in layer.in_blue(tip) {
                let mut edges = q.edges.clone();
                edges.push(e);
                next.push(BluePrefix {
                    root: q.root,
                    edges,
                });
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// All depth-`depth` prefixes of the diagram.
pub fn all_prefixes(d: &LDiagramTrunc, depth: usize) -> Result<Vec<BluePrefix>> {
    let mut out = Vec::new();
    for v in 0..d.level(0).len() as u32 {
        out.extend(extensions(d, &BluePrefix::vertex(v), depth)?);
    }
    Ok(out)
}

/// Shift a prefix of even depth `2n+2`: complete each blue pair to a romb,
/// close the red pairs back to blue, and prepend the unique first blue edge.
/// The image cylinder is contained in the output's depth-`2n+1` cylinder.
pub fn shift_prefix(d: &LDiagramTrunc, p: &BluePrefix) -> Result<BluePrefix> {
    let m = p.depth();
    if m < 2 || m % 2 != 0 {
        return Err(Error::OddDepth { depth: m });
    }
    let n = (m - 2) / 2;
    let mut f = vec![0u32; m];
    for j in 0..=n {
        let romb = complete_romb_from_blue(d, 2 * j, p.edges[2 * j], p.edges[2 * j + 1])?;
        f[2 * j] = romb.f0;
        f[2 * j + 1] = romb.f1;
    }
    let mut out = vec![0u32; m - 1];
    for j in 1..=n {
        let romb = complete_romb_from_red(d, 2 * j - 1, f[2 * j - 1], f[2 * j])?;
        out[2 * j - 1] = romb.e0;
        out[2 * j] = romb.e1;
    }
    // First edge: the unique blue edge into the mid vertex of the first romb.
    let mid = d.layer(0).edge(f[0]).src;
    out[0] = d.blue_up(1, mid)?;
    BluePrefix::new(d, out)
}

/// Preimage branches of a prefix of odd depth `2n+1`: one branch per red
/// edge leaving `s(e_0)`, each carrying the branch edge and the unique
/// depth-`2n` prefix of the preimage points in that branch.
pub fn preimages(d: &LDiagramTrunc, p: &BluePrefix) -> Result<Vec<(u32, BluePrefix)>> {
    let m = p.depth();
    if m % 2 != 1 {
        return Err(Error::EvenDepth { depth: m });
    }
    let n = (m - 1) / 2;
    let v1 = d.layer(0).edge(p.edges[0]).src;
    let mut out = Vec::new();
    for &f0 in d.red_ups(1, v1) {
        let mut f = vec![0u32; m];
        f[0] = f0;
        for j in 0..n {
            let romb = complete_romb_odd(
                d,
                2 * j + 1,
                f[2 * j],
                p.edges[2 * j + 1],
                p.edges[2 * j + 2],
            )?;
            f[2 * j + 1] = romb.f0;
            f[2 * j + 2] = romb.f1;
        }
        let mut edges = vec![0u32; 2 * n];
        for j in 0..n {
            let romb = complete_romb_from_red(d, 2 * j, f[2 * j], f[2 * j + 1])?;
            edges[2 * j] = romb.e0;
            edges[2 * j + 1] = romb.e1;
        }
        let branch = if n == 0 {
            BluePrefix::vertex(d.layer(0).edge(f0).tgt)
        } else {
            BluePrefix::new(d, edges)?
        };
        out.push((f0, branch));
    }
    Ok(out)
}

/// Invert the shift on a prefix over a diagram with homeomorphism structure
/// (every vertex emits exactly one red edge): output depth is
/// `2 * floor((depth - 1) / 2)`.
pub fn inverse_shift_prefix(d: &LDiagramTrunc, p: &BluePrefix) -> Result<BluePrefix> {
    let m = p.depth();
    if m < 2 {
        return Err(Error::InsufficientDepth { depth: m, needed: 2 });
    }
    let v1 = d.layer(0).edge(p.edges[0]).src;
    let single_red = |level: usize, v: u32| -> Result<u32> {
        match d.red_ups(level, v) {
            [f] => Ok(*f),
            reds => Err(Error::NotHDiagram {
                reason: format!(
                    "vertex `{}` at level {level} emits {} red edges",
                    d.level(level)[v as usize],
                    reds.len()
                ),
            }),
        }
    };
    let t = (m - 1) / 2;
    let mut f = vec![0u32; 2 * t + 1];
    f[0] = single_red(1, v1)?;
    for j in 0..t {
        let romb = complete_romb_odd(
            d,
            2 * j + 1,
            f[2 * j],
            p.edges[2 * j + 1],
            p.edges[2 * j + 2],
        )?;
        f[2 * j + 1] = romb.f0;
        f[2 * j + 2] = romb.f1;
    }
    let mut edges = vec![0u32; 2 * t];
    for j in 0..t {
        let romb = complete_romb_from_red(d, 2 * j, f[2 * j], f[2 * j + 1])?;
        edges[2 * j] = romb.e0;
        edges[2 * j + 1] = romb.e1;
    }
    if t == 0 {
        Ok(BluePrefix::vertex(d.layer(0).edge(f[0]).tgt))
    } else {
        BluePrefix::new(d, edges)
    }
}

/// A set of pairwise distinct prefixes at a common depth; its cylinders are
/// pairwise disjoint, so the set denotes their disjoint union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixSet {
    pub depth: usize,
    pub prefixes: BTreeSet<BluePrefix>,
}

impl PrefixSet {
    pub fn empty(depth: usize) -> Self {
        PrefixSet {
            depth,
            prefixes: BTreeSet::new(),
        }
    }

    pub fn single(p: BluePrefix) -> Self {
        PrefixSet {
            depth: p.depth(),
            prefixes: BTreeSet::from([p]),
        }
    }

    pub fn from_prefixes(depth: usize, prefixes: impl IntoIterator<Item = BluePrefix>) -> Self {
        let set: BTreeSet<BluePrefix> = prefixes.into_iter().collect();
        for p in &set {
            assert_eq!(p.depth(), depth, "prefix set depth mismatch");
        }
        PrefixSet {
            depth,
            prefixes: set,
        }
    }

    pub fn whole_space(d: &LDiagramTrunc) -> Self {
        PrefixSet {
            depth: 0,
            prefixes: (0..d.level(0).len() as u32).map(BluePrefix::vertex).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.prefixes.len()
    }

    pub fn refine_to(&self, d: &LDiagramTrunc, depth: usize) -> Result<PrefixSet> {
        if depth < self.depth {
            return Err(Error::InsufficientDepth {
                depth,
                needed: self.depth,
            });
        }
        let mut out = BTreeSet::new();
        for p in &self.prefixes {
            for q in extensions(d, p, depth)? {
                out.insert(q);
            }
        }
        Ok(PrefixSet {
            depth,
            prefixes: out,
        })
    }

    fn common_depth(&self, other: &PrefixSet) -> usize {
        self.depth.max(other.depth)
    }

    pub fn intersect(&self, d: &LDiagramTrunc, other: &PrefixSet) -> Result<PrefixSet> {
        let depth = self.common_depth(other);
        let a = self.refine_to(d, depth)?;
        let b = other.refine_to(d, depth)?;
        Ok(PrefixSet {
            depth,
            prefixes: a.prefixes.intersection(&b.prefixes).cloned().collect(),
        })
    }

    pub fn union(&self, d: &LDiagramTrunc, other: &PrefixSet) -> Result<PrefixSet> {
        let depth = self.common_depth(other);
        let a = self.refine_to(d, depth)?;
        let b = other.refine_to(d, depth)?;
        Ok(PrefixSet {
            depth,
            prefixes: a.prefixes.union(&b.prefixes).cloned().collect(),
        })
    }

    pub fn minus(&self, d: &LDiagramTrunc, other: &PrefixSet) -> Result<PrefixSet> {
        let depth = self.common_depth(other);
        let a = self.refine_to(d, depth)?;
        let b = other.refine_to(d, depth)?;
        Ok(PrefixSet {
            depth,
            prefixes: a.prefixes.difference(&b.prefixes).cloned().collect(),
        })
    }

    pub fn is_subset(&self, d: &LDiagramTrunc, other: &PrefixSet) -> Result<bool> {
        let depth = self.common_depth(other);
        let a = self.refine_to(d, depth)?;
        if other.depth == depth {
            return Ok(a.prefixes.is_subset(&other.prefixes));
        }
        Ok(a
            .prefixes
            .iter()
            .all(|p| other.prefixes.contains(&p.truncate(other.depth))))
    }

    pub fn set_eq(&self, d: &LDiagramTrunc, other: &PrefixSet) -> Result<bool> {
        let depth = self.common_depth(other);
        Ok(self.refine_to(d, depth)?.prefixes == other.refine_to(d, depth)?.prefixes)
    }

    /// One exact image step: even out the depth, extend two layers, shift
    /// every extension and deduplicate. Output depth is `depth+1` for even
    /// input and `depth+2` for odd input.
    pub fn image_once(&self, d: &LDiagramTrunc) -> Result<PrefixSet> {
        let even = if self.depth % 2 == 0 {
            self.clone()
        } else {
            self.refine_to(d, self.depth + 1)?
        };
        let extended = even.refine_to(d, even.depth + 2)?;
        let mut out = BTreeSet::new();
        for p in &extended.prefixes {
            out.insert(shift_prefix(d, p)?);
        }
        Ok(PrefixSet {
            depth: even.depth + 1,
            prefixes: out,
        })
    }

    pub fn image(&self, d: &LDiagramTrunc, k: usize) -> Result<PrefixSet> {
        let mut cur = self.clone();
        for _ in 0..k {
            cur = cur.image_once(d)?;
        }
        Ok(cur)
    }

    /// One exact preimage step: odd out the depth, then collect every
    /// prefix one level deeper than each branch whose shift lands back in
    /// the set. Output depth is `depth+1` for odd input, `depth+2` for even.
    pub fn preimage_once(&self, d: &LDiagramTrunc) -> Result<PrefixSet> {
        let odd = if self.depth % 2 == 1 {
            self.clone()
        } else {
            self.refine_to(d, self.depth + 1)?
        };
        let mut out = BTreeSet::new();
        for p in &odd.prefixes {
            for (_, branch) in preimages(d, p)? {
                for r in extensions(d, &branch, odd.depth + 1)? {
                    if shift_prefix(d, &r)? == *p {
                        out.insert(r);
                    }
                }
            }
        }
        Ok(PrefixSet {
            depth: odd.depth + 1,
            prefixes: out,
        })
    }

    pub fn preimage(&self, d: &LDiagramTrunc, k: usize) -> Result<PrefixSet> {
        let mut cur = self.clone();
        for _ in 0..k {
            cur = cur.preimage_once(d)?;
        }
        Ok(cur)
    }
}

/// The exact image of a single cylinder under `k` shift steps, as a
/// disjoint union of equal-depth cylinders.
pub fn sigma_image(d: &LDiagramTrunc, p: &BluePrefix, k: usize) -> Result<PrefixSet> {
    PrefixSet::single(p.clone()).image(d, k)
}

/// The exact preimage of a cylinder set under `k` shift steps.
pub fn sigma_preimage_set(d: &LDiagramTrunc, set: &PrefixSet, k: usize) -> Result<PrefixSet> {
    set.preimage(d, k)
}

/// One part of a cylinder decomposition: the points of the branch cylinder
/// whose shift image lands in the cell of `gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VCell {
    /// Index into `gamma` (the cell the shift maps this part onto).
    pub gamma: usize,
    /// Index into `coarse` (the depth-`2j` prefix this part lives in).
    pub coarse: usize,
    /// The layer-0 red edge selecting the branch.
    pub branch_edge: u32,
    /// Exact extent, at depth `2j+2`.
    pub set: PrefixSet,
}

/// The cylinder decomposition carried by even level `2j`: cells are the
/// depth-`2j+1` cylinders, grouped by their depth-`2j` truncations, with one
/// V-cell per preimage branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCylinderDecomposition {
    pub level: usize,
    /// Depth-`2j+1` prefixes, sorted; `Z` cells.
    pub gamma: Vec<BluePrefix>,
    /// Depth-`2j` prefixes, sorted; the grouping index set.
    pub coarse: Vec<BluePrefix>,
    /// For each gamma, the index of its truncation in `coarse`.
    pub group_of: Vec<usize>,
    pub v_cells: Vec<VCell>,
}

pub fn extract_cylinder_decomposition(
    d: &LDiagramTrunc,
    two_j: usize,
) -> Result<SigmaCylinderDecomposition> {
    if two_j % 2 != 0 {
        return Err(Error::Invalid(format!("level {two_j} is not even")));
    }
    d.require_layer(two_j)?;
    let coarse = all_prefixes(d, two_j)?;
    let gamma = all_prefixes(d, two_j + 1)?;
    let coarse_index: BTreeMap<&BluePrefix, usize> =
        coarse.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut group_of = Vec::with_capacity(gamma.len());
    for g in &gamma {
        group_of.push(coarse_index[&g.truncate(two_j)]);
    }
    let mut v_cells = Vec::new();
    for (gi, g) in gamma.iter().enumerate() {
        for (branch_edge, branch) in preimages(d, g)? {
            let ci = coarse_index[&branch];
            let mut members = BTreeSet::new();
            for r in extensions(d, &branch, two_j + 2)? {
                // Member prefixes shift onto the cell AND select this
                // branch through the romb of their first blue pair.
                let romb = complete_romb_from_blue(d, 0, r.edges[0], r.edges[1])?;
                if romb.f0 == branch_edge && shift_prefix(d, &r)? == *g {
                    members.insert(r);
                }
            }
            v_cells.push(VCell {
                gamma: gi,
                coarse: ci,
                branch_edge,
                set: PrefixSet {
                    depth: two_j + 2,
                    prefixes: members,
                },
            });
        }
    }
    Ok(SigmaCylinderDecomposition {
        level: two_j,
        gamma,
        coarse,
        group_of,
        v_cells,
    })
}

impl SigmaCylinderDecomposition {
    /// Red multiplicity and blue incidence matrices of the decomposition,
    /// rows indexed by the tip vertices of `gamma`, columns by the tips of
    /// `coarse`.
    pub fn matrices(&self, d: &LDiagramTrunc) -> Result<(IntMatrix, IntMatrix)> {
        let rows: Vec<String> = self
            .gamma
            .iter()
            .map(|g| {
                let (lvl, v) = g.tip(d);
                d.level(lvl)[v as usize].clone()
            })
            .collect();
        let cols: Vec<String> = self
            .coarse
            .iter()
            .map(|c| {
                let (lvl, v) = c.tip(d);
                d.level(lvl)[v as usize].clone()
            })
            .collect();
        let mut a = IntMatrix::zero(rows.clone(), cols.clone());
        let mut i = IntMatrix::zero(rows, cols);
        for cell in &self.v_cells {
            a.add_at(cell.gamma, cell.coarse, 1)?;
        }
        for (gi, &ci) in self.group_of.iter().enumerate() {
            i.set(gi, ci, 1);
        }
        Ok((a, i))
    }

    /// Check the decomposition axioms at the truncation: the cells partition
    /// the space, the V-cells partition each group, and every V-cell maps
    /// bijectively onto its cell (at prefix resolution).
    pub fn validate(&self, d: &LDiagramTrunc) -> std::result::Result<(), String> {
        let depth = self.level + 2;
        let all = PrefixSet::from_prefixes(depth, all_prefixes(d, depth).map_err(err_str)?);

        let mut z_union = PrefixSet::empty(depth);
        for g in &self.gamma {
            let z = PrefixSet::single(g.clone()).refine_to(d, depth).map_err(err_str)?;
            if !z.intersect(d, &z_union).map_err(err_str)?.is_empty() {
                return Err(format!("cell {} overlaps earlier cells", g.name(d)));
            }
            z_union = z_union.union(d, &z).map_err(err_str)?;
        }
        if z_union != all {
            return Err("cells do not cover the space".into());
        }

        for (ci, c) in self.coarse.iter().enumerate() {
            let group = PrefixSet::single(c.clone()).refine_to(d, depth).map_err(err_str)?;
            let mut v_union = PrefixSet::empty(depth);
            for cell in self.v_cells.iter().filter(|v| v.coarse == ci) {
                if !cell
                    .set
                    .intersect(d, &v_union)
                    .map_err(err_str)?
                    .is_empty()
                {
                    return Err(format!(
                        "V-cells overlap inside group {}",
                        c.name(d)
                    ));
                }
                v_union = v_union.union(d, &cell.set).map_err(err_str)?;
            }
            if v_union != group {
                return Err(format!("V-cells do not cover group {}", c.name(d)));
            }
        }

        for cell in &self.v_cells {
            // Bijectivity onto the cell at prefix resolution: the exact
            // images of the member cylinders are pairwise disjoint and tile
            // the cell.
            let mut pieces = 0usize;
            let mut image = PrefixSet::empty(0);
            let mut first = true;
            for p in &cell.set.prefixes {
                let img = PrefixSet::single(p.clone()).image_once(d).map_err(err_str)?;
                pieces += img.len();
                image = if first {
                    first = false;
                    img
                } else {
                    image.union(d, &img).map_err(err_str)?
                };
            }
            if pieces != image.len() {
                return Err(format!(
                    "shift not injective on a V-cell over {}",
                    self.coarse[cell.coarse].name(d)
                ));
            }
            let target = PrefixSet::single(self.gamma[cell.gamma].clone());
            if !image.set_eq(d, &target).map_err(err_str)? {
                return Err(format!(
                    "V-cell for {} does not map onto its cell",
                    self.gamma[cell.gamma].name(d)
                ));
            }
        }
        Ok(())
    }
}

fn err_str(e: Error) -> String {
    e.to_string()
}

/// Check that `fine` refines `coarse` in the structured sense: cell-wise
/// containment, V-cell-wise containment, and the projection of the fine
/// V-cells inside one coarse V-cell hits the fine cells of its target group
/// bijectively.
pub fn check_refinement(
    d: &LDiagramTrunc,
    fine: &SigmaCylinderDecomposition,
    coarse: &SigmaCylinderDecomposition,
) -> std::result::Result<(), String> {
    if fine.level < coarse.level {
        return Err("fine decomposition sits above the coarse one".into());
    }
    // (a) every fine cell inside a unique coarse cell.
    let coarse_cell_index: BTreeMap<&BluePrefix, usize> =
        coarse.gamma.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut cell_map = Vec::with_capacity(fine.gamma.len());
    for (li, t) in fine.gamma.iter().enumerate() {
        let trunc = t.truncate(coarse.level + 1);
        match coarse_cell_index.get(&trunc) {
            Some(&gi) => cell_map.push(gi),
            None => {
                return Err(format!(
                    "fine cell {} lies in no coarse cell (index {li})",
                    t.name(d)
                ))
            }
        }
    }

    // (b) every fine V-cell inside a unique coarse V-cell.
    let mut w_map: Vec<usize> = Vec::with_capacity(fine.v_cells.len());
    for (wi, w) in fine.v_cells.iter().enumerate() {
        let mut homes = Vec::new();
        for (vi, v) in coarse.v_cells.iter().enumerate() {
            if w.set.is_subset(d, &v.set).map_err(err_str)? {
                homes.push(vi);
            }
        }
        match homes.as_slice() {
            [vi] => w_map.push(*vi),
            [] => {
                return Err(format!(
                    "fine V-cell {wi} lies in no coarse V-cell"
                ))
            }
            _ => {
                return Err(format!(
                    "fine V-cell {wi} lies in several coarse V-cells"
                ))
            }
        }
    }

    // (c) inside each coarse V-cell, the fine V-cells project bijectively
    // onto the fine cells refining the coarse target cell.
    for (vi, v) in coarse.v_cells.iter().enumerate() {
        let mut projected: Vec<usize> = w_map
            .iter()
            .enumerate()
            .filter(|(_, &home)| home == vi)
            .map(|(wi, _)| fine.v_cells[wi].gamma)
            .collect();
        projected.sort();
        let expected: Vec<usize> = (0..fine.gamma.len())
            .filter(|&li| cell_map[li] == v.gamma)
            .collect();
        if projected.windows(2).any(|w| w[0] == w[1]) {
            return Err(format!(
                "projection not injective inside coarse V-cell {vi}"
            ));
        }
        if projected != expected {
            return Err(format!(
                "projection inside coarse V-cell {vi} misses fine cells"
            ));
        }
    }
    Ok(())
}
