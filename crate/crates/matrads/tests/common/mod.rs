//! Shared test support: an independent combinatorial model of the
//! multiplihedra used as an oracle for the one-output bimultiplihedra.
//!
//! A face of `J_n` is a painted corolla tree, recorded as a triple:
//! a planar tree on the output side, a sequence of bead arities along the
//! paint line, and a forest on the input side. The output tree has one
//! leaf per bead, each bead of arity `m` feeds on `m` forest trees, and
//! the forest has `n` leaves in total. Dimension is
//! `sum(c - 2)` over output-tree nodes `+ sum(m_i - 1)` over beads
//! `+ sum(d - 2)` over forest nodes.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// A planar rooted tree; internal nodes have arity at least two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    pub fn leaves(&self) -> u32 {
        match self {
            Tree::Leaf => 1,
            Tree::Node(children) => children.iter().map(Tree::leaves).sum(),
        }
    }

    /// Sum of (arity - 2) over internal nodes.
    pub fn excess(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node(children) => {
                children.len() - 2 + children.iter().map(Tree::excess).sum::<usize>()
            }
        }
    }
}

/// All planar trees with `n` leaves (internal arities >= 2), i.e. the
/// faces of the associahedron `K_n`; for `n = 1` just the bare leaf.
pub fn planar_trees(n: u32) -> Vec<Tree> {
    if n == 1 {
        return vec![Tree::Leaf];
    }
    let mut out = Vec::new();
    // root arity k splits the leaves into k ordered positive parts
    for k in 2..=n {
        for composition in compositions(n, k) {
            let child_choices: Vec<Vec<Tree>> =
                composition.iter().map(|&part| planar_trees(part)).collect();
            for combo in cartesian(&child_choices) {
                out.push(Tree::Node(combo));
            }
        }
    }
    out
}

/// Ordered sequences of `k` positive integers summing to `n`.
pub fn compositions(n: u32, k: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn cartesian(choices: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    let mut combos = vec![Vec::new()];
    for pool in choices {
        let mut next = Vec::with_capacity(combos.len() * pool.len());
        for combo in &combos {
            for item in pool {
                let mut ext = combo.clone();
                ext.push(item.clone());
                next.push(ext);
            }
        }
        combos = next;
    }
    combos
}

/// A face of `J_n` as a painted corolla tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PaintedTree {
    pub output: Tree,
    pub beads: Vec<u32>,
    pub inputs: Vec<Tree>,
}

impl PaintedTree {
    pub fn dim(&self) -> usize {
        self.output.excess()
            + self.beads.iter().map(|&m| m as usize - 1).sum::<usize>()
            + self.inputs.iter().map(Tree::excess).sum::<usize>()
    }

    pub fn leaves(&self) -> u32 {
        self.inputs.iter().map(Tree::leaves).sum()
    }
}

/// All faces of `J_n` as painted trees.
pub fn painted_trees(n: u32) -> Vec<PaintedTree> {
    let mut out = Vec::new();
    for bead_count in 1..=n {
        for output in planar_trees(bead_count) {
            // bead arities: positive, and their total is the forest width
            for width in bead_count..=n {
                for beads in compositions(width, bead_count) {
                    for split in compositions(n, width) {
                        let tree_choices: Vec<Vec<Tree>> =
                            split.iter().map(|&part| planar_trees(part)).collect();
                        for inputs in cartesian(&tree_choices) {
                            out.push(PaintedTree {
                                output: output.clone(),
                                beads: beads.clone(),
                                inputs,
                            });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Cells of `J_n` per dimension.
pub fn multiplihedron_f_vector(n: u32) -> BTreeMap<usize, u64> {
    let mut counts = BTreeMap::new();
    for face in painted_trees(n) {
        *counts.entry(face.dim()).or_insert(0u64) += 1;
    }
    counts
}
