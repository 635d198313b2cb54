use std::fmt::Write as _;

use super::tree::ClusterTree;
use crate::scalar::Scalar;

/// Child indices leading from a root to a node. Forest roots are addressed by
/// their position as the first index.
pub type NodePath = Vec<usize>;

/// Finite truncation of a cluster: sorted distinct centers, each with the
/// path of the node it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    entries: Vec<(T, NodePath)>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn points(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(p, _)| p)
    }

    pub fn entries(&self) -> &[(T, NodePath)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path_of(&self, point: &T) -> Option<&NodePath> {
        self.entries
            .iter()
            .find(|(p, _)| p == point)
            .map(|(_, path)| path)
    }

    /// CSV with header `point,den_path`; paths are `/`-separated child
    /// indices, `/` alone for a root.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point,den_path\n");
        for (p, path) in &self.entries {
            let joined: Vec<String> = path.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{},/{}", p.to_fraction(), joined.join("/"));
        }
        out
    }
}

/// Walks `tree` down to `depth_budget` levels below the root and up to
/// `width_budget` children per node. Children past the materialized prefix
/// are generated from the tail, unless the node has already been derived.
pub fn materialize<T: Scalar>(
    tree: &ClusterTree<T>,
    depth_budget: usize,
    width_budget: usize,
) -> PointCloud<T> {
    let mut entries = Vec::new();
    walk(
        tree,
        depth_budget,
        width_budget,
        &mut Vec::new(),
        &mut entries,
    );
    finish(entries)
}

/// Like [`materialize`], with the root index prefixed to every path.
pub fn materialize_forest<T: Scalar>(
    forest: &[ClusterTree<T>],
    depth_budget: usize,
    width_budget: usize,
) -> PointCloud<T> {
    let mut entries = Vec::new();
    for (i, tree) in forest.iter().enumerate() {
        walk(tree, depth_budget, width_budget, &mut vec![i], &mut entries);
    }
    finish(entries)
}

fn finish<T: Scalar>(mut entries: Vec<(T, NodePath)>) -> PointCloud<T> {
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("coordinates are ordered"));
    entries.dedup_by(|a, b| a.0 == b.0);
    PointCloud { entries }
}

fn walk<T: Scalar>(
    node: &ClusterTree<T>,
    depth: usize,
    width: usize,
    path: &mut NodePath,
    out: &mut Vec<(T, NodePath)>,
) {
    out.push((node.center.clone(), path.clone()));
    if depth == 0 {
        return;
    }
    let materialized = node.children.len().min(width);
    for (i, child) in node.children.iter().take(materialized).enumerate() {
        path.push(i);
        walk(child, depth - 1, width, path, out);
        path.pop();
    }
    let Some(tail) = node.tail.as_ref().filter(|t| t.stage == 0) else {
        return;
    };
    for i in tail.next_index.max(materialized)..width {
        let child = node
            .generate_child(i)
            .expect("tail present")
            .expect("realized ranks follow their generator");
        path.push(i);
        walk(&child, depth - 1, width, path, out);
        path.pop();
    }
}
