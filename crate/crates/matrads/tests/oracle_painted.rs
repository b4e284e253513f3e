//! Self-checks for the painted-tree model of the multiplihedra. These pin
//! the oracle against published face counts so that later comparisons
//! against the cell complexes test the complexes, not the oracle.

mod common;

use common::{multiplihedron_f_vector, painted_trees, planar_trees, PaintedTree, Tree};

#[test]
fn planar_tree_census_is_catalan_like() {
    // super-Catalan / little Schroeder numbers count K_n faces
    assert_eq!(planar_trees(1).len(), 1);
    assert_eq!(planar_trees(2).len(), 1);
    assert_eq!(planar_trees(3).len(), 3);
    assert_eq!(planar_trees(4).len(), 11);
    assert_eq!(planar_trees(5).len(), 45);
}

#[test]
fn j2_is_a_segment() {
    let faces = painted_trees(2);
    assert_eq!(faces.len(), 3);
    let dims: Vec<usize> = faces.iter().map(PaintedTree::dim).collect();
    assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 2);
    assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 1);
    // the two endpoints
    assert!(faces.contains(&PaintedTree {
        output: Tree::Leaf,
        beads: vec![1],
        inputs: vec![Tree::Node(vec![Tree::Leaf, Tree::Leaf])],
    }));
    assert!(faces.contains(&PaintedTree {
        output: Tree::Node(vec![Tree::Leaf, Tree::Leaf]),
        beads: vec![1, 1],
        inputs: vec![Tree::Leaf, Tree::Leaf],
    }));
}

#[test]
fn j3_is_a_hexagon() {
    let f = multiplihedron_f_vector(3);
    assert_eq!(f.get(&0), Some(&6));
    assert_eq!(f.get(&1), Some(&6));
    assert_eq!(f.get(&2), Some(&1));
    assert_eq!(f.len(), 3);
}

#[test]
fn j4_vertex_and_face_counts() {
    let f = multiplihedron_f_vector(4);
    assert_eq!(f.get(&0), Some(&21));
    assert_eq!(f.get(&3), Some(&1));
    // Euler characteristic of a convex polytope
    let euler: i64 = f.iter().map(|(&d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
    assert_eq!(euler, 1);
}

#[test]
fn every_face_keeps_leaf_count() {
    for n in 1..=4 {
        for face in painted_trees(n) {
            assert_eq!(face.leaves(), n);
            assert_eq!(face.output.leaves() as usize, face.beads.len());
            let width: u32 = face.beads.iter().sum();
            assert_eq!(width as usize, face.inputs.len());
        }
    }
}
