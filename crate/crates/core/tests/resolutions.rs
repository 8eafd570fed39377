use sepshift_core::diagram::{is_refined, validate_ldiagram};
use sepshift_core::fixtures;
use sepshift_core::graph::{gfs_from_digraph, validate_gfs, Color};
use sepshift_core::matrix::IntMatrix;
use sepshift_core::resolution::{
    adjacency_recursion_check, canonical_resolution, check_resolution_vs_higher_edge,
    higher_edge_graph, one_step_resolution, ResourceBudget,
};
use sepshift_core::Error;

#[test]
fn one_step_counts_for_two_one_graph() {
    // Blocks of sizes 2 and 3: six choice tuples, 2*3 + 3*2 = 12 edges.
    let g = fixtures::gfs_two_one();
    let resolved = one_step_resolution(g.layer()).unwrap();
    assert_eq!(resolved.top().len(), 2);
    assert_eq!(resolved.bottom().len(), 6);
    assert_eq!(resolved.edges().len(), 12);
}

#[test]
fn one_step_on_singleton_blocks() {
    // All blocks singletons: one tuple per old top vertex, one edge per
    // block.
    let g = gfs_from_digraph(&fixtures::digraph_bouquet(1)).unwrap();
    let resolved = one_step_resolution(g.layer()).unwrap();
    assert_eq!(resolved.bottom().len(), 1);
    assert_eq!(resolved.edges().len(), 2);
}

#[test]
fn two_one_resolution_levels_and_validity() {
    let res = canonical_resolution(&fixtures::gfs_two_one(), 6, &ResourceBudget::default())
        .unwrap();
    let d = &res.diagram;
    assert_eq!(d.level(0).len(), 1);
    assert_eq!(d.level(1).len(), 2);
    assert_eq!(d.level(2).len(), 6);
    let layer0 = d.layer(0);
    let blue0 = layer0
        .edges
        .iter()
        .filter(|e| e.color == Color::Blue)
        .count();
    assert_eq!((blue0, layer0.edges.len() - blue0), (2, 3));

    let report = validate_ldiagram(d);
    assert!(report.is_empty(), "{report}");
    for j in 0..3 {
        let gfs = d.even_layer_gfs(2 * j).unwrap();
        assert!(validate_gfs(gfs.layer()).is_empty());
        if j > 0 {
            assert!(gfs.is_refined().unwrap());
        }
    }
}

#[test]
fn budget_is_enforced() {
    let tight = ResourceBudget {
        max_vertices_per_level: 5,
    };
    assert!(matches!(
        canonical_resolution(&fixtures::gfs_two_one(), 4, &tight),
        Err(Error::ResourceBudgetExceeded { .. })
    ));
}

#[test]
fn higher_edge_graph_of_single_loop() {
    let e = fixtures::digraph_bouquet(1);
    for n in 1..=3 {
        let h = higher_edge_graph(&e, n).unwrap();
        assert_eq!(h.vertices().len(), 1);
        assert_eq!(h.edges().len(), 1);
    }
}

#[test]
fn higher_edge_graph_of_full_two_shift() {
    // Length-2 words over two loops: 4 vertices, 8 overlap edges.
    let e = fixtures::digraph_bouquet(2);
    let h = higher_edge_graph(&e, 2).unwrap();
    assert_eq!(h.vertices().len(), 4);
    assert_eq!(h.edges().len(), 8);
}

#[test]
fn dual_graph_of_no_triple_zero() {
    let e = fixtures::digraph_no_triple_zero();
    let h = higher_edge_graph(&e, 1).unwrap();
    assert_eq!(h.vertices().len(), 7);
    // One edge per composable pair r(f) = s(g).
    let expected: usize = e
        .edges()
        .iter()
        .map(|(_, _, t)| e.edges().iter().filter(|(_, s2, _)| s2 == t).count())
        .sum();
    assert_eq!(h.edges().len(), expected);
}

#[test]
fn resolution_matches_higher_edge_graphs() {
    let budget = ResourceBudget::default();
    assert!(
        check_resolution_vs_higher_edge(&fixtures::digraph_no_triple_zero(), 1, &budget)
            .unwrap()
            .is_some()
    );
    assert!(
        check_resolution_vs_higher_edge(&fixtures::digraph_bouquet(1), 3, &budget)
            .unwrap()
            .is_some()
    );
    assert!(
        check_resolution_vs_higher_edge(&fixtures::digraph_bouquet(2), 2, &budget)
            .unwrap()
            .is_some()
    );
}

#[test]
fn second_level_of_no_triple_zero_matches_edges() {
    // The second even layer's top vertices correspond to the digraph's
    // edges, and its red adjacency is the incidence matrix r(f) = s(g).
    let e = fixtures::digraph_no_triple_zero();
    let gfs = gfs_from_digraph(&e).unwrap();
    let res = canonical_resolution(&gfs, 3, &ResourceBudget::default()).unwrap();
    let d = &res.diagram;
    assert_eq!(d.level(2).len(), e.edges().len());
    assert_eq!(d.level(3).len(), e.edges().len());

    // Identify a level-2 vertex with a digraph edge through its red tuple
    // component (a layer-0 edge named `r(<digraph edge>)`).
    let digraph_edge_of_level2 = |v: u32| -> usize {
        let tuple = &res.tuples[2][v as usize];
        let red = tuple
            .choices
            .iter()
            .copied()
            .find(|&c| d.layer(0).edge(c).color == Color::Red)
            .unwrap();
        let name = &d.layer(0).edge(red).name;
        let inner = name.strip_prefix("r(").unwrap().strip_suffix(')').unwrap();
        e.edges().iter().position(|(n, _, _)| n == inner).unwrap()
    };
    // A level-3 vertex corresponds to the digraph edge of the source tuple
    // of its blue choice.
    let digraph_edge_of_level3 = |v: u32| -> usize {
        let tuple = &res.tuples[3][v as usize];
        let blue = tuple
            .choices
            .iter()
            .copied()
            .find(|&c| d.layer(1).edge(c).color == Color::Blue)
            .unwrap();
        digraph_edge_of_level2(d.layer(1).edge(blue).src)
    };

    let n = e.edges().len();
    let mut adj = IntMatrix::zero(
        (0..n).map(|i| e.edges()[i].0.clone()).collect(),
        (0..n).map(|i| e.edges()[i].0.clone()).collect(),
    );
    for edge in &d.layer(2).edges {
        if edge.color == Color::Red {
            adj.add_at(
                digraph_edge_of_level3(edge.src),
                digraph_edge_of_level2(edge.tgt),
                1,
            )
            .unwrap();
        }
    }
    let mut incidence = IntMatrix::zero(
        (0..n).map(|i| e.edges()[i].0.clone()).collect(),
        (0..n).map(|i| e.edges()[i].0.clone()).collect(),
    );
    for (f, (_, _, tf)) in e.edges().iter().enumerate() {
        for (g, (_, sg, _)) in e.edges().iter().enumerate() {
            if tf == sg {
                incidence.set(f, g, 1);
            }
        }
    }
    assert!(adj.same_entries(&incidence));
}

#[test]
fn adjacency_recursion_holds() {
    let res = canonical_resolution(&fixtures::gfs_two_one(), 6, &ResourceBudget::default())
        .unwrap();
    assert!(adjacency_recursion_check(&res.diagram, 0).unwrap());
    assert!(adjacency_recursion_check(&res.diagram, 1).unwrap());

    let loops = canonical_resolution(
        &gfs_from_digraph(&fixtures::digraph_bouquet(1)).unwrap(),
        5,
        &ResourceBudget::default(),
    )
    .unwrap();
    assert!(adjacency_recursion_check(&loops.diagram, 0).unwrap());

    let built =
        sepshift_core::symbolic::build_ldiagram(&sepshift_core::SymbolicSystem::full_two_sided(2), 4)
            .unwrap();
    assert!(adjacency_recursion_check(&built.diagram, 0).unwrap());
}

#[test]
fn recursion_needs_horizon() {
    let res = canonical_resolution(&fixtures::gfs_two_one(), 3, &ResourceBudget::default())
        .unwrap();
    assert!(matches!(
        adjacency_recursion_check(&res.diagram, 1),
        Err(Error::HorizonExceeded { .. })
    ));
}

#[test]
fn resolution_blocks_follow_refined_structure() {
    // Refined even layers for the bouquet: every even layer past 0 is a
    // refined generalized finite shift graph.
    let gfs = gfs_from_digraph(&fixtures::digraph_bouquet(2)).unwrap();
    let res = canonical_resolution(&gfs, 5, &ResourceBudget::default()).unwrap();
    assert!(validate_ldiagram(&res.diagram).is_empty());
    assert!(!is_refined(&res.diagram));
    for j in 1..=2 {
        assert!(res
            .diagram
            .even_layer_gfs(2 * j)
            .unwrap()
            .is_refined()
            .unwrap());
    }
}
