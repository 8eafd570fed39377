use sepshift_core::diagram::validate_ldiagram;
use sepshift_core::fixtures;
use sepshift_core::graph::Color;
use sepshift_core::symbolic::{
    build_ldiagram, natural_partition, p_sigma, refine_partition, sigma_refined_partitions,
    Clopen, SymbolicSystem,
};
use sepshift_core::Error;

fn layer_counts(d: &sepshift_core::LDiagramTrunc, k: usize) -> (usize, usize) {
    let blue = d
        .layer(k)
        .edges
        .iter()
        .filter(|e| e.color == Color::Blue)
        .count();
    (blue, d.layer(k).edges.len() - blue)
}

#[test]
fn two_sided_build_counts() {
    let built = build_ldiagram(&SymbolicSystem::full_two_sided(2), 2).unwrap();
    let d = &built.diagram;
    assert_eq!(
        (d.level(0).len(), d.level(1).len(), d.level(2).len()),
        (2, 4, 8)
    );
    assert_eq!(layer_counts(d, 0), (4, 4));
    assert_eq!(layer_counts(d, 1), (8, 8));
    assert!(validate_ldiagram(d).is_empty());
}

#[test]
fn one_sided_build_counts() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 2).unwrap();
    let d = &built.diagram;
    assert_eq!(
        (d.level(0).len(), d.level(1).len(), d.level(2).len()),
        (2, 4, 8)
    );
    assert_eq!(layer_counts(d, 0), (4, 8));
    assert_eq!(layer_counts(d, 1), (8, 8));
    assert!(validate_ldiagram(d).is_empty());
}

#[test]
fn single_loop_build_is_trivial() {
    let sys = SymbolicSystem::edge_shift(fixtures::digraph_bouquet(1)).unwrap();
    let built = build_ldiagram(&sys, 5).unwrap();
    let d = &built.diagram;
    for k in 0..=5 {
        assert_eq!(d.level(k).len(), 1);
    }
    for k in 0..5 {
        assert_eq!(layer_counts(d, k), (1, 1));
    }
}

#[test]
fn image_partition_of_one_sided_pair_is_trivial() {
    // Both letter cylinders map onto the whole space, every point has two
    // preimages, so the image-side partition collapses to {X} and the wedge
    // returns the letter partition.
    let sys = SymbolicSystem::full_one_sided(2);
    let p = natural_partition(&sys, 0);
    let ps = p_sigma(&sys, &p);
    assert_eq!(ps.len(), 1);
    assert!(!ps[0].is_empty());
    let (wedge_img, _) = refine_partition(&sys, &p).unwrap();
    assert_eq!(wedge_img.len(), 2);
}

#[test]
fn image_partition_of_two_sided_pair_shifts_cells() {
    let sys = SymbolicSystem::full_two_sided(2);
    let p = natural_partition(&sys, 0);
    let ps = p_sigma(&sys, &p);
    assert_eq!(ps.len(), 2);
    for (cell, img) in p.iter().zip(&ps) {
        assert!(cell.image(&sys).is_subset(&sys, img));
        assert!(img.is_subset(&sys, &cell.image(&sys)));
    }
}

#[test]
fn whole_space_for_bijective_shift_is_fixed() {
    let sys = SymbolicSystem::full_two_sided(2);
    let p = vec![Clopen::whole_space()];
    let ps = p_sigma(&sys, &p);
    assert_eq!(ps.len(), 1);
    let (w1, w2) = refine_partition(&sys, &p).unwrap();
    assert_eq!(w1.len(), 1);
    assert_eq!(w2.len(), 1);
}

#[test]
fn non_injective_cell_is_rejected() {
    let sys = SymbolicSystem::full_one_sided(2);
    let p = vec![Clopen::whole_space()];
    assert!(matches!(
        refine_partition(&sys, &p),
        Err(Error::NonInjectiveCell { .. })
    ));
}

#[test]
fn closure_keeps_natural_partitions_for_full_shifts() {
    // For both full shifts the natural sequences are already closed, so the
    // closure reproduces cylinder partitions of the expected sizes.
    let sys = SymbolicSystem::full_one_sided(2);
    let ps = sigma_refined_partitions(&sys, 4).unwrap();
    let sizes: Vec<usize> = ps.iter().map(|p| p.len()).collect();
    assert_eq!(sizes, vec![2, 4, 8, 16, 32]);

    let sys2 = SymbolicSystem::full_two_sided(2);
    let ps2 = sigma_refined_partitions(&sys2, 4).unwrap();
    let sizes2: Vec<usize> = ps2.iter().map(|p| p.len()).collect();
    assert_eq!(sizes2, vec![2, 4, 8, 16, 32]);
}

#[test]
fn edge_shift_build_validates() {
    let sys = SymbolicSystem::edge_shift(fixtures::digraph_no_triple_zero()).unwrap();
    let built = build_ldiagram(&sys, 4).unwrap();
    let report = validate_ldiagram(&built.diagram);
    assert!(report.is_empty(), "{report}");
    assert_eq!(built.diagram.level(0).len(), 7);
}

#[test]
fn built_diagrams_validate_at_depth() {
    for sys in [
        SymbolicSystem::full_one_sided(2),
        SymbolicSystem::full_one_sided(3),
        SymbolicSystem::full_two_sided(2),
    ] {
        let built = build_ldiagram(&sys, 5).unwrap();
        let report = validate_ldiagram(&built.diagram);
        assert!(report.is_empty(), "{sys:?}: {report}");
    }
}
