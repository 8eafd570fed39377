use sepshift_core::fixtures;
use sepshift_core::graph::{
    gfs_from_digraph, validate_gfs, validate_layer, Color, GfsRule, LayerSpec,
    SeparatedBipartiteLayer,
};
use sepshift_core::Error;
use std::collections::BTreeMap;

#[test]
fn six_by_four_matrices() {
    let g = fixtures::gfs_six_by_four();
    assert!(validate_layer(g.layer()).is_empty());
    assert!(validate_gfs(g.layer()).is_empty());
    let (a, i) = g.red_blue_matrices().unwrap();
    assert_eq!(
        a.rows(),
        &[
            vec![1, 1, 1, 0],
            vec![0, 1, 0, 0],
            vec![0, 2, 0, 0],
            vec![0, 0, 2, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 1, 1],
        ]
    );
    assert_eq!(
        i.rows(),
        &[
            vec![1, 0, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 0, 1],
        ]
    );
    assert!(!g.is_refined().unwrap());
}

#[test]
fn two_one_matrices() {
    let g = fixtures::gfs_two_one();
    let (a, i) = g.red_blue_matrices().unwrap();
    assert_eq!(a.rows(), &[vec![2], vec![1]]);
    assert_eq!(i.rows(), &[vec![1], vec![1]]);
}

#[test]
fn single_loop_gfs() {
    let g = gfs_from_digraph(&fixtures::digraph_bouquet(1)).unwrap();
    let (a, i) = g.red_blue_matrices().unwrap();
    assert_eq!(a.rows(), &[vec![1]]);
    assert_eq!(i.rows(), &[vec![1]]);
}

#[test]
fn bouquet_two_loops_gfs() {
    // One blue edge per vertex, one red edge per digraph edge.
    let g = gfs_from_digraph(&fixtures::digraph_bouquet(2)).unwrap();
    let blue = g
        .layer()
        .edges()
        .iter()
        .filter(|e| e.color == Color::Blue)
        .count();
    let red = g.layer().edges().len() - blue;
    assert_eq!((blue, red), (1, 2));
    let (a, i) = g.red_blue_matrices().unwrap();
    assert_eq!(a.rows(), &[vec![2]]);
    assert_eq!(i.rows(), &[vec![1]]);
}

#[test]
fn no_triple_zero_gfs_counts() {
    let e = fixtures::digraph_no_triple_zero();
    assert_eq!(e.vertices().len(), 4);
    assert_eq!(e.edges().len(), 7);
    let g = gfs_from_digraph(&e).unwrap();
    let blue = g
        .layer()
        .edges()
        .iter()
        .filter(|e| e.color == Color::Blue)
        .count();
    let red = g.layer().edges().len() - blue;
    assert_eq!((blue, red), (4, 7));
}

#[test]
fn sink_or_source_rejected() {
    let d = sepshift_core::graph::Digraph::new(
        vec!["a".into(), "b".into()],
        vec![("e".into(), "a".into(), "b".into())],
    )
    .unwrap();
    assert!(matches!(
        gfs_from_digraph(&d),
        Err(Error::SinkOrSource { .. })
    ));
}

fn tiny_layer(separation: BTreeMap<String, Vec<Vec<String>>>) -> SeparatedBipartiteLayer {
    SeparatedBipartiteLayer::from_spec(LayerSpec {
        top: vec!["v".into(), "u".into()],
        bottom: vec!["w".into()],
        edges: vec![
            ("e".into(), "w".into(), "v".into(), Color::Blue),
            ("f".into(), "w".into(), "v".into(), Color::Red),
            ("g".into(), "w".into(), "u".into(), Color::Red),
        ],
        separation,
    })
    .unwrap()
}

#[test]
fn layer_violations_name_the_offender() {
    // `g` has range `u` but is listed in a block of `v`; `f` is uncovered.
    let layer = tiny_layer(BTreeMap::from([(
        "v".into(),
        vec![vec!["e".into()], vec!["g".into()]],
    )]));
    let report = validate_layer(&layer);
    assert!(!report.is_empty());
    let text = report.to_string();
    assert!(text.contains("`g`"), "{text}");
    assert!(text.contains("`f`"), "{text}");
}

#[test]
fn empty_layer_is_vacuously_valid() {
    let layer = SeparatedBipartiteLayer::from_spec(LayerSpec {
        top: vec!["v".into()],
        bottom: vec![],
        edges: vec![],
        separation: BTreeMap::new(),
    })
    .unwrap();
    assert!(validate_layer(&layer).is_empty());
}

#[test]
fn gfs_missing_blue_block_cited() {
    // `u` has only a red block: the separation shape rule fires for it, and
    // the red-block-at-`v` edge `f` is fine.
    let layer = tiny_layer(BTreeMap::from([
        ("v".into(), vec![vec!["e".into()], vec!["f".into()]]),
        ("u".into(), vec![vec!["g".into()]]),
    ]));
    assert!(validate_layer(&layer).is_empty());
    let report = validate_gfs(&layer);
    assert!(report
        .violations
        .iter()
        .any(|v| v.rule == GfsRule::SeparationShape && v.witness.contains("`u`")));
}

#[test]
fn gfs_shared_blue_source_cited() {
    let layer = SeparatedBipartiteLayer::from_spec(LayerSpec {
        top: vec!["v".into()],
        bottom: vec!["w1".into(), "w2".into()],
        edges: vec![
            ("e1".into(), "w1".into(), "v".into(), Color::Blue),
            ("e2".into(), "w1".into(), "v".into(), Color::Blue),
            ("f1".into(), "w1".into(), "v".into(), Color::Red),
            ("f2".into(), "w2".into(), "v".into(), Color::Red),
        ],
        separation: BTreeMap::from([(
            "v".into(),
            vec![
                vec!["e1".into(), "e2".into()],
                vec!["f1".into(), "f2".into()],
            ],
        )]),
    })
    .unwrap();
    let report = validate_gfs(&layer);
    assert!(report
        .violations
        .iter()
        .any(|v| v.rule == GfsRule::BlueSourceShared));
    // w2 emits no blue edge either.
    assert!(report
        .violations
        .iter()
        .any(|v| v.rule == GfsRule::BlueSourceMissing && v.witness.contains("`w2`")));
}
