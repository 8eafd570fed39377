use sepshift_core::dynamics::{
    all_prefixes, check_refinement, extensions, extract_cylinder_decomposition,
    inverse_shift_prefix, preimages, shift_prefix, sigma_image, sigma_preimage_set, BluePrefix,
    PrefixSet,
};
use sepshift_core::fixtures;
use sepshift_core::resolution::{canonical_resolution, ResourceBudget};
use sepshift_core::symbolic::{build_ldiagram, BuiltDiagram, Clopen, SymbolicSystem};
use sepshift_core::Error;

fn union_cell(built: &BuiltDiagram, set: &PrefixSet) -> Clopen {
    let sys = &built.system;
    let mut acc: Option<Clopen> = None;
    for p in &set.prefixes {
        let (lvl, v) = p.tip(&built.diagram);
        let cell = built.cell_of(lvl, v).clone();
        acc = Some(match acc {
            None => cell,
            Some(a) => a.union(sys, &cell),
        });
    }
    acc.expect("nonempty prefix set")
}

fn clopen_eq(sys: &SymbolicSystem, a: &Clopen, b: &Clopen) -> bool {
    a.is_subset(sys, b) && b.is_subset(sys, a)
}

/// The central oracle: on every stored prefix the diagram shift must agree
/// with the word shift on cylinders, and preimage branches must count red
/// edges and tile the word preimage exactly.
fn oracle_roundtrip(sys: SymbolicSystem, horizon: usize, max_depth: usize) {
    let built = build_ldiagram(&sys, horizon).unwrap();
    let d = &built.diagram;
    for depth in (2..=max_depth).step_by(2) {
        for p in all_prefixes(d, depth).unwrap() {
            let q = shift_prefix(d, &p).unwrap();
            assert_eq!(q.depth(), depth - 1);
            let (lvl, v) = p.tip(d);
            let image = built.cell_of(lvl, v).image(&sys);
            let (qlvl, qv) = q.tip(d);
            assert!(
                image.is_subset(&sys, built.cell_of(qlvl, qv)),
                "shift image escapes its cylinder at {}",
                p.name(d)
            );
        }
    }
    for depth in (1..=max_depth.saturating_sub(1)).step_by(2) {
        for p in all_prefixes(d, depth).unwrap() {
            let branches = preimages(d, &p).unwrap();
            let v1 = d.layer(0).edge(p.edges[0]).src;
            assert_eq!(branches.len(), d.red_ups(1, v1).len());
            // Branch count is the number of edges leaving s(e0) minus the
            // blue one.
            let total = d.red_ups(1, v1).len() + 1;
            assert_eq!(branches.len(), total - 1);

            let (plvl, pv) = p.tip(d);
            let target = built.cell_of(plvl, pv);
            let word_preimage = target.preimage(&sys);
            // Each branch contributes exactly the part of the preimage
            // lying in its cylinder, and the parts tile the preimage.
            let mut acc: Option<Clopen> = None;
            for (_, b) in &branches {
                let (blvl, bv) = b.tip(d);
                let part = built.cell_of(blvl, bv).intersect(&sys, &word_preimage);
                assert!(!part.is_empty());
                acc = Some(match acc {
                    None => part,
                    Some(a) => a.union(&sys, &part),
                });
            }
            assert!(
                clopen_eq(&sys, &acc.unwrap(), &word_preimage),
                "branches do not tile the preimage of {}",
                p.name(d)
            );
        }
    }
}

#[test]
fn oracle_one_sided() {
    oracle_roundtrip(SymbolicSystem::full_one_sided(2), 7, 6);
}

#[test]
fn oracle_two_sided() {
    oracle_roundtrip(SymbolicSystem::full_two_sided(2), 7, 6);
}

#[test]
fn oracle_edge_shift() {
    let sys = SymbolicSystem::edge_shift(fixtures::digraph_no_triple_zero()).unwrap();
    oracle_roundtrip(sys, 5, 4);
}

#[test]
fn extensions_partition_cylinders() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 4).unwrap();
    let d = &built.diagram;
    let p = all_prefixes(d, 1).unwrap().into_iter().next().unwrap();
    let exts = extensions(d, &p, 3).unwrap();
    assert_eq!(exts.len(), 4);
    assert_eq!(extensions(d, &p, 1).unwrap(), vec![p.clone()]);
    let whole: Clopen = union_cell(
        &built,
        &PrefixSet::from_prefixes(3, exts),
    );
    let (lvl, v) = p.tip(d);
    assert!(clopen_eq(&built.system, &whole, built.cell_of(lvl, v)));
}

#[test]
fn shift_depth_parity_is_enforced() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 4).unwrap();
    let d = &built.diagram;
    let p = all_prefixes(d, 3).unwrap().into_iter().next().unwrap();
    assert!(matches!(shift_prefix(d, &p), Err(Error::OddDepth { .. })));
    let q = all_prefixes(d, 2).unwrap().into_iter().next().unwrap();
    assert!(matches!(preimages(d, &q), Err(Error::EvenDepth { .. })));
}

#[test]
fn two_sided_inverse_round_trips() {
    let built = build_ldiagram(&SymbolicSystem::full_two_sided(2), 6).unwrap();
    let d = &built.diagram;
    let sys = &built.system;
    for p in all_prefixes(d, 4).unwrap() {
        let q = shift_prefix(d, &p).unwrap();
        let back = inverse_shift_prefix(d, &q).unwrap();
        assert_eq!(back, p.truncate(2));

        // Word oracle: the inverse shift sends the cylinder of q into the
        // word preimage of q's cell.
        let (qlvl, qv) = q.tip(d);
        let (blvl, bv) = back.tip(d);
        let preim = built.cell_of(qlvl, qv).preimage(sys);
        assert!(preim.is_subset(sys, built.cell_of(blvl, bv)));
    }
}

#[test]
fn one_sided_diagram_is_not_invertible() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 4).unwrap();
    let d = &built.diagram;
    let p = all_prefixes(d, 4).unwrap().into_iter().next().unwrap();
    assert!(matches!(
        inverse_shift_prefix(d, &p),
        Err(Error::NotHDiagram { .. })
    ));
}

#[test]
fn singleton_h_diagram_inverse_is_identity() {
    let sys = SymbolicSystem::edge_shift(fixtures::digraph_bouquet(1)).unwrap();
    let built = build_ldiagram(&sys, 5).unwrap();
    let d = &built.diagram;
    let p = all_prefixes(d, 4).unwrap().into_iter().next().unwrap();
    let q = inverse_shift_prefix(d, &p).unwrap();
    assert_eq!(q, p.truncate(q.depth()));
}

#[test]
fn sigma_image_matches_word_oracle() {
    for sys in [
        SymbolicSystem::full_one_sided(2),
        SymbolicSystem::full_two_sided(2),
    ] {
        let built = build_ldiagram(&sys, 9).unwrap();
        let d = &built.diagram;
        for depth in [0usize, 1, 2, 3] {
            for p in all_prefixes(d, depth).unwrap() {
                for k in 0..=2 {
                    let image = sigma_image(d, &p, k).unwrap();
                    let (plvl, pv) = p.tip(d);
                    let expected = built.cell_of(plvl, pv).image_pow(&sys, k);
                    assert!(
                        clopen_eq(&sys, &union_cell(&built, &image), &expected),
                        "sigma^{k} of {} mismatches the oracle",
                        p.name(d)
                    );
                }
            }
        }
    }
}

#[test]
fn sigma_image_zero_power_is_identity() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 4).unwrap();
    let d = &built.diagram;
    let p = all_prefixes(d, 2).unwrap().into_iter().next().unwrap();
    let image = sigma_image(d, &p, 0).unwrap();
    assert_eq!(image, PrefixSet::single(p));
}

#[test]
fn full_shift_image_of_letter_is_everything() {
    // The depth-0 prefix at a level-0 vertex is a one-letter cylinder; its
    // image under the full shift is the whole space.
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 5).unwrap();
    let d = &built.diagram;
    let p = BluePrefix::vertex(0);
    let image = sigma_image(d, &p, 1).unwrap();
    let whole = PrefixSet::whole_space(d).refine_to(d, image.depth).unwrap();
    assert_eq!(image, whole);
}

#[test]
fn preimage_of_image_contains_refinements() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 7).unwrap();
    let d = &built.diagram;
    for p in all_prefixes(d, 2).unwrap() {
        let image = sigma_image(d, &p, 1).unwrap();
        let back = sigma_preimage_set(d, &image, 1).unwrap();
        assert!(PrefixSet::single(p).is_subset(d, &back).unwrap());
    }
}

#[test]
fn word_oracle_for_preimage_sets() {
    let sys = SymbolicSystem::full_one_sided(2);
    let built = build_ldiagram(&sys, 7).unwrap();
    let d = &built.diagram;
    for p in all_prefixes(d, 3).unwrap() {
        let set = sigma_preimage_set(d, &PrefixSet::single(p.clone()), 1).unwrap();
        let (plvl, pv) = p.tip(d);
        let expected = built.cell_of(plvl, pv).preimage(&sys);
        assert!(clopen_eq(&sys, &union_cell(&built, &set), &expected));
    }
}

#[test]
fn decomposition_of_two_one_resolution_level_zero() {
    let res = canonical_resolution(&fixtures::gfs_two_one(), 4, &ResourceBudget::default())
        .unwrap();
    let d = &res.diagram;
    let dec = extract_cylinder_decomposition(d, 0).unwrap();
    let (a, i) = dec.matrices(d).unwrap();
    let (ga, gi) = d.even_layer_gfs(0).unwrap().red_blue_matrices().unwrap();
    assert_eq!(a.rows(), ga.rows());
    assert_eq!(i.rows(), gi.rows());
    assert_eq!(a.rows(), &[vec![2], vec![1]]);
    dec.validate(d).unwrap();
}

#[test]
fn decomposition_matches_layer_matrices() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 6).unwrap();
    let d = &built.diagram;
    for two_j in [0usize, 2] {
        let dec = extract_cylinder_decomposition(d, two_j).unwrap();
        dec.validate(d).unwrap();
        let (a, i) = dec.matrices(d).unwrap();
        let (ga, gi) = d
            .even_layer_gfs(two_j)
            .unwrap()
            .red_blue_matrices()
            .unwrap();
        // Rows/columns of both are indexed by the same sorted vertex names.
        assert_eq!(a.row_names, ga.row_names);
        assert_eq!(a.rows(), ga.rows());
        assert_eq!(i.rows(), gi.rows());
    }
    // Level 0 of the one-sided diagram: every bottom cell maps onto both
    // tops.
    let dec0 = extract_cylinder_decomposition(d, 0).unwrap();
    let (a0, _) = dec0.matrices(d).unwrap();
    let all_ones: Vec<Vec<i64>> = (0..4).map(|_| vec![1, 1]).collect();
    assert_eq!(a0.rows(), all_ones.as_slice());
}

#[test]
fn deeper_decompositions_refine_shallower_ones() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 6).unwrap();
    let d = &built.diagram;
    let dec0 = extract_cylinder_decomposition(d, 0).unwrap();
    let dec2 = extract_cylinder_decomposition(d, 2).unwrap();
    check_refinement(d, &dec2, &dec0).unwrap();
    check_refinement(d, &dec0, &dec0).unwrap();
}

#[test]
fn tampered_decomposition_is_rejected() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 6).unwrap();
    let d = &built.diagram;
    let dec0 = extract_cylinder_decomposition(d, 0).unwrap();
    let mut dec2 = extract_cylinder_decomposition(d, 2).unwrap();
    dec2.v_cells.pop();
    let err = check_refinement(d, &dec2, &dec0).unwrap_err();
    assert!(err.contains("misses"), "{err}");
}

#[test]
fn two_one_branch_counts_follow_red_multiplicity() {
    // Prefixes through w1 split into two branches, through w2 into one.
    let res = canonical_resolution(&fixtures::gfs_two_one(), 4, &ResourceBudget::default())
        .unwrap();
    let d = &res.diagram;
    for p in all_prefixes(d, 1).unwrap() {
        let (_, v1) = p.tip(d);
        let name = &d.level(1)[v1 as usize];
        let branches = preimages(d, &p).unwrap();
        if name == "w1" {
            assert_eq!(branches.len(), 2);
        } else {
            assert_eq!(branches.len(), 1);
        }
    }
}

#[test]
fn depth_zero_prefixes_are_supported() {
    let built = build_ldiagram(&SymbolicSystem::full_one_sided(2), 4).unwrap();
    let d = &built.diagram;
    let v = BluePrefix::vertex(0);
    let exts = extensions(d, &v, 2).unwrap();
    assert_eq!(exts.len(), 4);
    let img = sigma_image(d, &v, 1).unwrap();
    assert!(!img.is_empty());
}
