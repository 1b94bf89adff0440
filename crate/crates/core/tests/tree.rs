mod common;

use renormlab::tree::{adapted_check, export_dot, lambda_orbit, ClopenSet, CosetTree, DotOptions};

use common::*;

/// Vertex of `X_ℓ` holding the coset of `a^r` in the odometer.
fn odometer_vertex(t: &renormlab::chain::Tower<renormlab::backend::WreathAutomaton>, level: usize, r: usize) -> u32 {
    let b = t.backend();
    t.level(level).unwrap().locate(b, &element(b, &vec![(0, false); r])).unwrap()
}

#[test]
fn odometer_residue_sets() {
    let t = odometer_tower(3);
    let even = ClopenSet::new(2, vec![odometer_vertex(&t, 2, 0), odometer_vertex(&t, 2, 2)]);
    let report = adapted_check(&t, &even, None).unwrap();
    assert!(report.adapted && report.complete);
    assert_eq!(report.orbit_size, 2);
    // {0, 2} is the cylinder U_1 written at depth 2.
    assert_eq!(even.vertices, t.basepoint_cylinder(1, 2).unwrap());

    let adjacent = ClopenSet::new(2, vec![odometer_vertex(&t, 2, 0), odometer_vertex(&t, 2, 1)]);
    let report = adapted_check(&t, &adjacent, None).unwrap();
    assert!(!report.adapted);
    assert_eq!(report.orbit_size, 4);
}

#[test]
fn cylinders_are_adapted_with_orbit_size_n_k() {
    let t = grigorchuk_tower(4);
    let tree = CosetTree::from_tower(&t, 4).unwrap();
    for k in 0..=3 {
        let set = ClopenSet::cylinder(&tree, k, 0, 4);
        assert_eq!(set.len(), 1 << (4 - k));
        let report = adapted_check(&t, &set, None).unwrap();
        assert!(report.adapted, "U_{k}");
        assert_eq!(report.orbit_size, t.level(k).unwrap().size(), "U_{k}");
    }
}

#[test]
fn tree_shapes() {
    let t = grigorchuk_tower(5);
    let tree = CosetTree::from_tower(&t, 5).unwrap();
    assert_eq!(tree.vertex_count(), (1 << 6) - 1);
    assert_eq!(tree.edge_count(), tree.vertex_count() - 1);
    assert!(tree.is_spherically_homogeneous());
    assert!(tree.generators_preserve_edges(&t).unwrap());

    let t = heisenberg_23(2);
    let tree = CosetTree::from_tower(&t, 2).unwrap();
    assert_eq!(tree.child_counts(1), vec![36; 36]);
    assert_eq!(tree.vertex_count(), 1 + 36 + 1296);

    // The toy automaton acts on the first letter only.
    let t = toy_tower(3);
    let tree = CosetTree::from_tower(&t, 3).unwrap();
    assert_eq!(tree.child_counts(0), vec![2]);
    assert_eq!(tree.child_counts(1), vec![1, 1]);
}

#[test]
fn lambda_orbit_walks_down_the_basepoint() {
    for depth in [4, 6] {
        let t = odometer_tower(depth + 2);
        let steps = lambda_orbit(&t, 1, 2, depth).unwrap();
        assert_eq!(steps.len(), 3);
        for s in &steps {
            assert_eq!(s.cylinder_depth, 1 + s.step);
            assert_eq!(s.set.len(), 1 << (depth - 1));
        }
    }
    let t = heisenberg_23(3);
    let steps = lambda_orbit(&t, 1, 1, 2).unwrap();
    assert_eq!(steps[1].set.vertices, t.basepoint_cylinder(2, 3).unwrap());
}

#[test]
fn dot_lists_every_edge() {
    let t = odometer_tower(3);
    let tree = CosetTree::from_tower(&t, 3).unwrap();
    let dot = export_dot(&tree, &DotOptions::default());
    assert!(dot.starts_with("digraph \"coset_tree\" {"));
    assert_eq!(dot.matches(" -> ").count(), tree.edge_count());
    let shallow = export_dot(&tree, &DotOptions { graph_name: Some("top".into()), max_depth: Some(1) });
    assert_eq!(shallow.matches(" -> ").count(), 2);
    assert!(shallow.contains("\"0:0\" -> \"1:1\""));
}
