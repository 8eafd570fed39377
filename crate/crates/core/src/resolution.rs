//! One-step and iterated resolutions of bipartite separated graphs, higher
//! edge graphs of digraphs, and the adjacency recursion between even layers.

use crate::diagram::{DiagEdge, LDiagramTrunc, SepBlock};
use crate::error::{Error, Result};
use crate::graph::{Color, Digraph, GfsGraph, LayerSpec, SeparatedBipartiteLayer};
use crate::matrix::IntMatrix;
use std::collections::BTreeMap;

/// Per-layer vertex cap for iterated resolutions; they grow exponentially
/// and must fail loudly instead of thrashing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceBudget {
    pub max_vertices_per_level: usize,
}

impl Default for ResourceBudget {
    fn default() -> Self {
        ResourceBudget {
            max_vertices_per_level: 1_000_000,
        }
    }
}

/// New bottom vertex of a one-step resolution: a base top vertex plus one
/// chosen edge per separation block of it, in block order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleVertex {
    pub base: u32,
    pub choices: Vec<u32>,
}

struct ResolvedLayer {
    /// New level vertices (sorted by name) with their structure.
    bottom: Vec<(String, TupleVertex)>,
    /// New edges: `(name, src new-bottom index, tgt old-bottom index, color,
    /// distinguished edge of the input layer)`.
    edges: Vec<(String, u32, u32, Color, u32)>,
}

/// The combinatorial core of the one-step resolution: enumerate choice
/// tuples over each top vertex's ordered blocks and emit one edge per block,
/// pointing at the source of the distinguished choice.
fn resolve_blocks(
    top_names: &[String],
    edge_color: impl Fn(u32) -> Color,
    edge_src: impl Fn(u32) -> u32,
    blocks: &[Vec<Vec<u32>>],
) -> ResolvedLayer {
    let mut bottom: Vec<(String, TupleVertex)> = Vec::new();
    for (u, ublocks) in blocks.iter().enumerate() {
        if ublocks.is_empty() {
            continue;
        }
        let mut counters = vec![0usize; ublocks.len()];
        loop {
            let choices: Vec<u32> = ublocks
                .iter()
                .zip(&counters)
                .map(|(b, &c)| b[c])
                .collect();
            let positions: Vec<String> = counters.iter().map(|c| c.to_string()).collect();
            let name = format!("{}({})", top_names[u], positions.join(","));
            bottom.push((
                name,
                TupleVertex {
                    base: u as u32,
                    choices,
                },
            ));
            // Mixed-radix increment.
            let mut i = ublocks.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                counters[i] += 1;
                if counters[i] < ublocks[i].len() {
                    break;
                }
                counters[i] = 0;
            }
            if counters.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    bottom.sort_by(|a, b| a.0.cmp(&b.0));

    let mut edges = Vec::new();
    for (ti, (tname, tuple)) in bottom.iter().enumerate() {
        for (i, &x) in tuple.choices.iter().enumerate() {
            edges.push((
                format!("{tname}!{i}"),
                ti as u32,
                edge_src(x),
                edge_color(x),
                x,
            ));
        }
    }
    ResolvedLayer { bottom, edges }
}

/// The one-step resolution of a bipartite separated layer: the old bottom
/// becomes the top, the new bottom holds one vertex per block-choice tuple
/// of each old top vertex, and the separation at a new top vertex has one
/// block per old edge leaving it.
pub fn one_step_resolution(layer: &SeparatedBipartiteLayer) -> Result<SeparatedBipartiteLayer> {
    for (v, blocks) in layer.separation().iter().enumerate() {
        for b in blocks {
            if b.is_empty() {
                return Err(Error::Invalid(format!(
                    "empty separation block at `{}`",
                    layer.top()[v]
                )));
            }
        }
    }
    let resolved = resolve_blocks(
        layer.top(),
        |e| layer.edge(e).color,
        |e| layer.edge(e).src,
        layer.separation(),
    );
    let top: Vec<String> = layer.bottom().to_vec();
    let bottom: Vec<String> = resolved.bottom.iter().map(|(n, _)| n.clone()).collect();
    let edges: Vec<(String, String, String, Color)> = resolved
        .edges
        .iter()
        .map(|(name, src, tgt, color, _)| {
            (
                name.clone(),
                bottom[*src as usize].clone(),
                top[*tgt as usize].clone(),
                *color,
            )
        })
        .collect();
    // One block per old edge leaving each new top vertex, in edge order.
    let mut separation: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for (w, wname) in top.iter().enumerate() {
        let mut old_out: Vec<u32> = (0..layer.edges().len() as u32)
            .filter(|&e| layer.edge(e).src == w as u32)
            .collect();
        old_out.sort();
        let blocks: Vec<Vec<String>> = old_out
            .iter()
            .map(|&x| {
                resolved
                    .edges
                    .iter()
                    .filter(|(_, _, _, _, dist)| *dist == x)
                    .map(|(name, _, _, _, _)| name.clone())
                    .collect()
            })
            .filter(|b: &Vec<String>| !b.is_empty())
            .collect();
        separation.insert(wname.clone(), blocks);
    }
    SeparatedBipartiteLayer::from_spec(LayerSpec {
        top,
        bottom,
        edges,
        separation,
    })
}

/// A canonical resolution together with the structural identity of its
/// vertices and edges.
pub struct Resolution {
    pub diagram: LDiagramTrunc,
    /// `tuples[level]` (level >= 2): per vertex, its base level-`level-2`
    /// vertex and the chosen edges of layer `level-2`, in block order.
    pub tuples: Vec<Vec<TupleVertex>>,
    /// `distinguished[layer]` (layer >= 1): per edge, the edge of layer-1
    /// below... the input-layer edge the resolution step distinguished.
    pub distinguished: Vec<Vec<u32>>,
}

/// Iterate the one-step resolution `depth` times over a generalized finite
/// shift graph, stacking the layers into a truncated diagram.
pub fn canonical_resolution(
    g: &GfsGraph,
    depth: usize,
    budget: &ResourceBudget,
) -> Result<Resolution> {
    assert!(depth >= 1);
    let base = g.layer();
    let mut levels: Vec<Vec<String>> = vec![base.top().to_vec(), base.bottom().to_vec()];
    let mut tuples: Vec<Vec<TupleVertex>> = vec![Vec::new(), Vec::new()];
    let mut distinguished: Vec<Vec<u32>> = vec![Vec::new()];

    // Working state of the current deepest layer, index-based.
    struct Work {
        edges: Vec<DiagEdge>,
        blocks: Vec<Vec<Vec<u32>>>,
        parents: Vec<Vec<Option<u32>>>,
    }

    let mut raw_layers: Vec<(Vec<DiagEdge>, Vec<Vec<SepBlock>>)> = Vec::new();
    let mut cur = Work {
        edges: base
            .edges()
            .iter()
            .map(|e| DiagEdge {
                name: e.name.clone(),
                src: e.src,
                tgt: e.tgt,
                color: e.color,
            })
            .collect(),
        blocks: base.separation().to_vec(),
        parents: base
            .separation()
            .iter()
            .map(|blocks| vec![None; blocks.len()])
            .collect(),
    };

    for k in 0..depth {
        // Record layer k.
        let seps: Vec<Vec<SepBlock>> = cur
            .blocks
            .iter()
            .zip(&cur.parents)
            .map(|(blocks, parents)| {
                blocks
                    .iter()
                    .zip(parents)
                    .map(|(b, &parent)| SepBlock {
                        parent,
                        edges: b.clone(),
                    })
                    .collect()
            })
            .collect();
        raw_layers.push((cur.edges.clone(), seps));
        if k + 1 == depth {
            break;
        }

        // Resolve into layer k+1.
        let top_names = &levels[k];
        let edges = &cur.edges;
        let resolved = resolve_blocks(
            top_names,
            |e| edges[e as usize].color,
            |e| edges[e as usize].src,
            &cur.blocks,
        );
        if resolved.bottom.len() > budget.max_vertices_per_level {
            return Err(Error::ResourceBudgetExceeded {
                layer: k + 2,
                requested: resolved.bottom.len(),
                cap: budget.max_vertices_per_level,
            });
        }

        let new_level: Vec<String> = resolved.bottom.iter().map(|(n, _)| n.clone()).collect();
        tuples.push(resolved.bottom.iter().map(|(_, t)| t.clone()).collect());
        distinguished.push(resolved.edges.iter().map(|(_, _, _, _, d)| *d).collect());

        // Separation of the new layer: one block per edge of layer k
        // leaving each level-(k+1) vertex; parity of level k+1 decides
        // whether the red blocks carry their distinguished edge as parent.
        let new_top_len = levels[k + 1].len();
        let mut out_edges_of: Vec<Vec<u32>> = vec![Vec::new(); new_top_len];
        for (i, e) in cur.edges.iter().enumerate() {
            out_edges_of[e.src as usize].push(i as u32);
        }
        let mut new_blocks: Vec<Vec<Vec<u32>>> = vec![Vec::new(); new_top_len];
        let mut new_parents: Vec<Vec<Option<u32>>> = vec![Vec::new(); new_top_len];
        let odd = (k + 1) % 2 == 1;
        for w in 0..new_top_len {
            if odd {
                for &x in &out_edges_of[w] {
                    let members: Vec<u32> = resolved
                        .edges
                        .iter()
                        .enumerate()
                        .filter(|(_, (_, _, _, _, dist))| *dist == x)
                        .map(|(i, _)| i as u32)
                        .collect();
                    if members.is_empty() {
                        continue;
                    }
                    new_blocks[w].push(members);
                    new_parents[w].push(if cur.edges[x as usize].color == Color::Red {
                        Some(x)
                    } else {
                        None
                    });
                }
            } else {
                for color in [Color::Blue, Color::Red] {
                    let members: Vec<u32> = resolved
                        .edges
                        .iter()
                        .enumerate()
                        .filter(|(_, (_, _, tgt, c, _))| *tgt == w as u32 && *c == color)
                        .map(|(i, _)| i as u32)
                        .collect();
                    if !members.is_empty() {
                        new_blocks[w].push(members);
                        new_parents[w].push(None);
                    }
                }
            }
        }

        levels.push(new_level);
        cur = Work {
            edges: resolved
                .edges
                .iter()
                .map(|(name, src, tgt, color, _)| DiagEdge {
                    name: name.clone(),
                    src: *src,
                    tgt: *tgt,
                    color: *color,
                })
                .collect(),
            blocks: new_blocks,
            parents: new_parents,
        };
    }

    let raw_names: Vec<Vec<String>> = raw_layers
        .iter()
        .map(|(edges, _)| edges.iter().map(|e| e.name.clone()).collect())
        .collect();
    let diagram = LDiagramTrunc::from_parts(levels, raw_layers)?;
    // Re-align the per-edge metadata with the sorted edge order.
    let sorted_index: Vec<BTreeMap<&str, u32>> = (0..diagram.horizon())
        .map(|k| {
            diagram
                .layer(k)
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| (e.name.as_str(), i as u32))
                .collect()
        })
        .collect();
    let mut distinguished_sorted: Vec<Vec<u32>> = vec![Vec::new()];
    for layer in 1..diagram.horizon() {
        let mut aligned = vec![0u32; diagram.layer(layer).edges.len()];
        for (raw_idx, name) in raw_names[layer].iter().enumerate() {
            let new_idx = sorted_index[layer][name.as_str()];
            let raw_dist = distinguished[layer][raw_idx];
            let dist_name = &raw_names[layer - 1][raw_dist as usize];
            aligned[new_idx as usize] = sorted_index[layer - 1][dist_name.as_str()];
        }
        distinguished_sorted.push(aligned);
    }

    Ok(Resolution {
        diagram,
        tuples,
        distinguished: distinguished_sorted,
    })
}

/// The `(n+1)`-th higher edge graph: vertices are the length-`n` paths, with
/// one edge between two paths exactly when they overlap in all but their
/// outermost edges (`n = 0` returns the graph itself).
pub fn higher_edge_graph(digraph: &Digraph, n: usize) -> Result<Digraph> {
    digraph.check_no_sinks_sources()?;
    if n == 0 {
        return Ok(digraph.clone());
    }
    // Paths stored outermost-first: consecutive entries (p[i], p[i+1])
    // satisfy s(p[i]) = r(p[i+1]).
    let mut paths: Vec<Vec<u32>> = (0..digraph.edges().len() as u32).map(|e| vec![e]).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for p in &paths {
            let tail = *p.last().unwrap();
            let src = digraph.edges()[tail as usize].1;
            for (f, (_, _, tgt)) in digraph.edges().iter().enumerate() {
                if *tgt == src {
                    let mut q = p.clone();
                    q.push(f as u32);
                    next.push(q);
                }
            }
        }
        paths = next;
    }
    let path_name = |p: &[u32]| -> String {
        p.iter()
            .map(|&e| digraph.edges()[e as usize].0.clone())
            .collect::<Vec<_>>()
            .join(".")
    };
    let vertices: Vec<String> = paths.iter().map(|p| path_name(p)).collect();
    let mut edges = Vec::new();
    for p in &paths {
        // Extend p by a new outermost edge f with s(f) = r(p[0]); the edge
        // goes from p to the extended path's length-n suffix shift, i.e. to
        // (f, p[0], ..., p[n-2]).
        for (f, (fname, s_f, _)) in digraph.edges().iter().enumerate() {
            if *s_f != digraph.edges()[p[0] as usize].2 {
                continue;
            }
            let mut target: Vec<u32> = Vec::with_capacity(p.len());
            target.push(f as u32);
            target.extend_from_slice(&p[..p.len() - 1]);
            edges.push((
                format!("{}.{}", fname, path_name(p)),
                path_name(p),
                path_name(&target),
            ));
        }
    }
    Digraph::new(vertices, edges)
}

/// A witness isomorphism between two generalized finite shift graphs:
/// index maps for tops and bottoms of `a` into `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfsIsoWitness {
    pub top_map: Vec<u32>,
    pub bottom_map: Vec<u32>,
}

/// Search for a color-, source-, range- and block-preserving isomorphism by
/// degree refinement plus backtracking (instances are kept tiny by the
/// resource budget). Separations of these graphs are determined by the edge
/// colors, so edge-level compatibility suffices.
pub fn gfs_isomorphism(a: &GfsGraph, b: &GfsGraph) -> Option<GfsIsoWitness> {
    let la = a.layer();
    let lb = b.layer();
    if la.top().len() != lb.top().len()
        || la.bottom().len() != lb.bottom().len()
        || la.edges().len() != lb.edges().len()
    {
        return None;
    }
    let (aa, ai) = a.red_blue_matrices().ok()?;
    let (ba, bi) = b.red_blue_matrices().ok()?;

    let nt = la.top().len();
    let nb = la.bottom().len();

    // Invariants: sorted red column with blue incidence attached.
    let col_sig = |m: &IntMatrix, i: &IntMatrix, c: usize| -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = (0..m.nrows()).map(|r| (m.get(r, c), i.get(r, c))).collect();
        v.sort();
        v
    };
    let row_sig = |m: &IntMatrix, i: &IntMatrix, r: usize| -> Vec<(i64, i64)> {
        let mut v: Vec<(i64, i64)> = (0..m.ncols()).map(|c| (m.get(r, c), i.get(r, c))).collect();
        v.sort();
        v
    };

    let mut top_map = vec![usize::MAX; nt];
    let mut top_used = vec![false; nt];
    let mut bottom_map = vec![usize::MAX; nb];
    let mut bottom_used = vec![false; nb];

    fn assign_bottoms(
        aa: &IntMatrix,
        ai: &IntMatrix,
        ba: &IntMatrix,
        bi: &IntMatrix,
        top_map: &[usize],
        bottom_map: &mut [usize],
        bottom_used: &mut [bool],
        w: usize,
    ) -> bool {
        let nb = bottom_map.len();
        if w == nb {
            return true;
        }
        for cand in 0..nb {
            if bottom_used[cand] {
                continue;
            }
            let ok = (0..top_map.len()).all(|v| {
                aa.get(w, v) == ba.get(cand, top_map[v]) && ai.get(w, v) == bi.get(cand, top_map[v])
            });
            if ok {
                bottom_map[w] = cand;
                bottom_used[cand] = true;
                if assign_bottoms(aa, ai, ba, bi, top_map, bottom_map, bottom_used, w + 1) {
                    return true;
                }
                bottom_used[cand] = false;
                bottom_map[w] = usize::MAX;
            }
        }
        false
    }

    fn assign_tops(
        aa: &IntMatrix,
        ai: &IntMatrix,
        ba: &IntMatrix,
        bi: &IntMatrix,
        col_sigs_a: &[Vec<(i64, i64)>],
        col_sigs_b: &[Vec<(i64, i64)>],
        top_map: &mut [usize],
        top_used: &mut [bool],
        bottom_map: &mut [usize],
        bottom_used: &mut [bool],
        v: usize,
    ) -> bool {
        let nt = top_map.len();
        if v == nt {
            return assign_bottoms(aa, ai, ba, bi, top_map, bottom_map, bottom_used, 0);
        }
        for cand in 0..nt {
            if top_used[cand] || col_sigs_a[v] != col_sigs_b[cand] {
                continue;
            }
            top_map[v] = cand;
            top_used[cand] = true;
            if assign_tops(
                aa, ai, ba, bi, col_sigs_a, col_sigs_b, top_map, top_used, bottom_map,
                bottom_used, v + 1,
            ) {
                return true;
            }
            top_used[cand] = false;
            top_map[v] = usize::MAX;
        }
        false
    }

    // Quick row-signature screen.
    {
        let mut ra: Vec<Vec<(i64, i64)>> = (0..nb).map(|r| row_sig(&aa, &ai, r)).collect();
        let mut rb: Vec<Vec<(i64, i64)>> = (0..nb).map(|r| row_sig(&ba, &bi, r)).collect();
        ra.sort();
        rb.sort();
        if ra != rb {
            return None;
        }
    }
    let col_sigs_a: Vec<Vec<(i64, i64)>> = (0..nt).map(|c| col_sig(&aa, &ai, c)).collect();
    let col_sigs_b: Vec<Vec<(i64, i64)>> = (0..nt).map(|c| col_sig(&ba, &bi, c)).collect();

    if assign_tops(
        &aa,
        &ai,
        &ba,
        &bi,
        &col_sigs_a,
        &col_sigs_b,
        &mut top_map,
        &mut top_used,
        &mut bottom_map,
        &mut bottom_used,
        0,
    ) {
        Some(GfsIsoWitness {
            top_map: top_map.into_iter().map(|x| x as u32).collect(),
            bottom_map: bottom_map.into_iter().map(|x| x as u32).collect(),
        })
    } else {
        None
    }
}

/// Compare even layer `2n` of the canonical resolution of the graph of `E`
/// with the graph of the `(n+1)`-th higher edge graph of `E`.
pub fn check_resolution_vs_higher_edge(
    digraph: &Digraph,
    n: usize,
    budget: &ResourceBudget,
) -> Result<Option<GfsIsoWitness>> {
    let gfs = crate::graph::gfs_from_digraph(digraph)?;
    let res = canonical_resolution(&gfs, 2 * n + 1, budget)?;
    let lhs = res.diagram.even_layer_gfs(2 * n)?;
    let rhs = crate::graph::gfs_from_digraph(&higher_edge_graph(digraph, n)?)?;
    Ok(gfs_isomorphism(&lhs, &rhs))
}

/// Verify the exact matrix identity linking the red adjacency matrices of
/// even layers `2j` and `2j+2` through the characteristic matrices of the
/// intervening refinements and the diagonal of blue two-path counts.
pub fn adjacency_recursion_check(d: &LDiagramTrunc, j: usize) -> Result<bool> {
    let l0 = 2 * j;
    d.require_layer(l0 + 2)?;

    let red_adj = |layer: usize| -> Result<IntMatrix> {
        let rows: Vec<String> = d.level(layer + 1).to_vec();
        let cols: Vec<String> = d.level(layer).to_vec();
        let mut m = IntMatrix::zero(rows, cols);
        for e in &d.layer(layer).edges {
            if e.color == Color::Red {
                m.add_at(e.src as usize, e.tgt as usize, 1)?;
            }
        }
        Ok(m)
    };

    // Characteristic matrix between levels `n` and `n+2`: 1 when the
    // level-(n+2) vertex lies below the level-n vertex along blue edges.
    let charac = |n: usize| -> Result<IntMatrix> {
        let rows: Vec<String> = d.level(n).to_vec();
        let cols: Vec<String> = d.level(n + 2).to_vec();
        let mut m = IntMatrix::zero(rows, cols);
        for w in 0..d.level(n + 2).len() as u32 {
            let e1 = d.blue_up(n + 2, w)?;
            let mid = d.layer(n + 1).edge(e1).tgt;
            let e0 = d.blue_up(n + 1, mid)?;
            let anc = d.layer(n).edge(e0).tgt;
            m.set(anc as usize, w as usize, 1);
        }
        Ok(m)
    };

    let a0 = red_adj(l0)?;
    let a2 = red_adj(l0 + 2)?;
    let p1 = charac(l0)?;
    let p2 = charac(l0 + 1)?;

    let diag_entries: Vec<i64> = (0..d.level(l0 + 1).len() as u32)
        .map(|w| {
            d.layer(l0 + 1)
                .in_blue(w)
                .iter()
                .map(|&a| d.layer(l0 + 2).in_blue(d.layer(l0 + 1).edge(a).src).len() as i64)
                .sum()
        })
        .collect();
    let diag = IntMatrix::diagonal(d.level(l0 + 1).to_vec(), diag_entries);

    let lhs = diag.mul(&a0)?;
    let rhs = p2.mul(&a2)?.mul(&p1.transpose())?;
    Ok(lhs.same_entries(&rhs))
}
