//! Small reference graphs used across tests, the CLI docs and the
//! verification suite.

use crate::diagram::{DiagEdge, LDiagramTrunc, SepBlock};
use crate::graph::{Color, Digraph, GfsGraph, LayerSpec, SeparatedBipartiteLayer};
use std::collections::BTreeMap;

/// Six-by-four generalized finite shift graph: four top vertices `v1..v4`,
/// six bottom vertices `w1..w6`, blue edges `e{j}_{i}` and red edges
/// `f{j}_{i}(k)` from `w{j}` to `v{i}`.
pub fn gfs_six_by_four() -> GfsGraph {
    let top: Vec<String> = (1..=4).map(|i| format!("v{i}")).collect();
    let bottom: Vec<String> = (1..=6).map(|j| format!("w{j}")).collect();

    let blue = [(1, 1), (2, 1), (3, 2), (4, 3), (5, 4), (6, 4)];
    let red = [
        (1, 1, 1),
        (1, 2, 1),
        (1, 3, 1),
        (2, 2, 1),
        (3, 2, 1),
        (3, 2, 2),
        (4, 3, 1),
        (4, 3, 2),
        (5, 3, 1),
        (6, 3, 1),
        (6, 4, 1),
    ];

    let mut edges = Vec::new();
    for (j, i) in blue {
        edges.push((
            format!("e{j}_{i}"),
            format!("w{j}"),
            format!("v{i}"),
            Color::Blue,
        ));
    }
    for (j, i, k) in red {
        edges.push((
            format!("f{j}_{i}({k})"),
            format!("w{j}"),
            format!("v{i}"),
            Color::Red,
        ));
    }

    let mut separation: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for i in 1..=4u32 {
        let blues: Vec<String> = blue
            .iter()
            .filter(|(_, bi)| *bi == i)
            .map(|(j, bi)| format!("e{j}_{bi}"))
            .collect();
        let reds: Vec<String> = red
            .iter()
            .filter(|(_, ri, _)| *ri == i)
            .map(|(j, ri, k)| format!("f{j}_{ri}({k})"))
            .collect();
        separation.insert(format!("v{i}"), vec![blues, reds]);
    }

    let layer = SeparatedBipartiteLayer::from_spec(LayerSpec {
        top,
        bottom,
        edges,
        separation,
    })
    .expect("fixture layer is well-formed");
    GfsGraph::new(layer).expect("fixture is a generalized finite shift graph")
}

/// One top vertex `v`, two bottom vertices `w1, w2`; blue edges
/// `alpha0` (from `w1`) and `alpha1` (from `w2`); red edges `beta0`, `beta1`
/// (from `w1`) and `beta2` (from `w2`). Red/blue adjacency matrices
/// `A = (2,1)^T`, `I = (1,1)^T`.
pub fn gfs_two_one() -> GfsGraph {
    let layer = SeparatedBipartiteLayer::from_spec(LayerSpec {
        top: vec!["v".into()],
        bottom: vec!["w1".into(), "w2".into()],
        edges: vec![
            ("alpha0".into(), "w1".into(), "v".into(), Color::Blue),
            ("alpha1".into(), "w2".into(), "v".into(), Color::Blue),
            ("beta0".into(), "w1".into(), "v".into(), Color::Red),
            ("beta1".into(), "w1".into(), "v".into(), Color::Red),
            ("beta2".into(), "w2".into(), "v".into(), Color::Red),
        ],
        separation: BTreeMap::from([(
            "v".into(),
            vec![
                vec!["alpha0".into(), "alpha1".into()],
                vec!["beta0".into(), "beta1".into(), "beta2".into()],
            ],
        )]),
    })
    .expect("fixture layer is well-formed");
    GfsGraph::new(layer).expect("fixture is a generalized finite shift graph")
}

/// De Bruijn-style digraph on the four 2-bit words in which the only missing
/// transition is `00 -> 00`: the edge shift it codes forbids the word `000`.
pub fn digraph_no_triple_zero() -> Digraph {
    let vs: Vec<String> = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    let arcs = [
        ("00", "01"),
        ("01", "10"),
        ("01", "11"),
        ("10", "00"),
        ("10", "01"),
        ("11", "10"),
        ("11", "11"),
    ];
    let edges = arcs
        .iter()
        .map(|(s, t)| (format!("{s}>{t}"), s.to_string(), t.to_string()))
        .collect();
    Digraph::new(vs, edges).expect("fixture digraph is well-formed")
}

/// One vertex with `loops` loop edges; `loops = q` codes the full one-sided
/// shift on `q` symbols.
pub fn digraph_bouquet(loops: usize) -> Digraph {
    let edges = (0..loops)
        .map(|i| (format!("l{i}"), "p".to_string(), "p".to_string()))
        .collect();
    Digraph::new(vec!["p".into()], edges).expect("fixture digraph is well-formed")
}

/// A hand-built three-layer diagram (levels of sizes 2, 2, 4, 4) with a
/// doubled red edge in the first layer, satisfying every truncation
/// condition. Vertex names: `A1 A2 / B1 B2 / C1..C4 / D1..D4`.
pub fn ldiagram_three_layers() -> LDiagramTrunc {
    let levels: Vec<Vec<String>> = vec![
        vec!["A1".into(), "A2".into()],
        vec!["B1".into(), "B2".into()],
        vec!["C1".into(), "C2".into(), "C3".into(), "C4".into()],
        vec!["D1".into(), "D2".into(), "D3".into(), "D4".into()],
    ];
    let e = |name: &str, src: u32, tgt: u32, color: Color| DiagEdge {
        name: name.into(),
        src,
        tgt,
        color,
    };
    let blue = Color::Blue;
    let red = Color::Red;

    // Layer 0 between {A1,A2} and {B1,B2}.
    let layer0 = vec![
        e("bB1", 0, 0, blue), // 0
        e("bB2", 1, 1, blue), // 1
        e("f1", 0, 0, red),   // 2
        e("f2", 0, 1, red),   // 3
        e("f3", 1, 0, red),   // 4
        e("f4", 1, 1, red),   // 5
    ];
    let seps0 = vec![
        vec![
            SepBlock { parent: None, edges: vec![0] },
            SepBlock { parent: None, edges: vec![2, 4] },
        ],
        vec![
            SepBlock { parent: None, edges: vec![1] },
            SepBlock { parent: None, edges: vec![3, 5] },
        ],
    ];

    // Layer 1 between {B1,B2} and {C1..C4}.
    let layer1 = vec![
        e("bC1", 0, 0, blue), // 0
        e("bC2", 1, 0, blue), // 1
        e("bC3", 2, 1, blue), // 2
        e("bC4", 3, 1, blue), // 3
        e("g1", 0, 0, red),   // 4
        e("rC2", 1, 1, red),  // 5
        e("rC3", 2, 0, red),  // 6
        e("rC4", 3, 1, red),  // 7
    ];
    let seps1 = vec![
        vec![
            SepBlock { parent: None, edges: vec![0, 1] },
            SepBlock { parent: Some(2), edges: vec![4] }, // R(f1) = {g1}
            SepBlock { parent: Some(3), edges: vec![6] }, // R(f2) = {rC3}
        ],
        vec![
            SepBlock { parent: None, edges: vec![2, 3] },
            SepBlock { parent: Some(4), edges: vec![5] }, // R(f3) = {rC2}
            SepBlock { parent: Some(5), edges: vec![7] }, // R(f4) = {rC4}
        ],
    ];

    // Layer 2 between {C1..C4} and {D1..D4}.
    let layer2 = vec![
        e("bD1", 0, 0, blue),   // 0
        e("bD2", 1, 1, blue),   // 1
        e("bD3", 2, 2, blue),   // 2
        e("bD4", 3, 3, blue),   // 3
        e("rD1C1", 0, 0, red),  // 4
        e("g2", 1, 0, red),     // 5
        e("rD1C3", 0, 2, red),  // 6
        e("rD2C3", 1, 2, red),  // 7
        e("rD3C2", 2, 1, red),  // 8
        e("rD3C4", 2, 3, red),  // 9
        e("rD4C2", 3, 1, red),  // 10
        e("rD4C4", 3, 3, red),  // 11
    ];
    let seps2 = vec![
        vec![
            SepBlock { parent: None, edges: vec![0] },
            SepBlock { parent: None, edges: vec![4, 5] },
        ],
        vec![
            SepBlock { parent: None, edges: vec![1] },
            SepBlock { parent: None, edges: vec![8, 10] },
        ],
        vec![
            SepBlock { parent: None, edges: vec![2] },
            SepBlock { parent: None, edges: vec![6, 7] },
        ],
        vec![
            SepBlock { parent: None, edges: vec![3] },
            SepBlock { parent: None, edges: vec![9, 11] },
        ],
    ];

    LDiagramTrunc::from_parts(
        levels,
        vec![(layer0, seps0), (layer1, seps1), (layer2, seps2)],
    )
    .expect("fixture diagram is well-formed")
}
