//! Explicit compact countable subsets of the line with a prescribed
//! Cantor–Bendixson characteristic.
//!
//! A cluster of rank `α` around `z` with radius `r` is `{z}` when `α = 0`.
//! Otherwise it is `{z}` together with a sequence of sub-clusters `K_n`
//! centered at points `x_n` with `d(x_n, z) = r_n` strictly decreasing to
//! zero, each confined to the ball `B(x_n, ε_n)` where
//! `ε_n = ½·min(r_{n-1} − r_n, r_n − r_{n+1})` and `r_{-1} = r`. Successor
//! ranks `δ+1` use children of rank `δ`; limit ranks `λ` use children of rank
//! `λ[n]` along the canonical fundamental sequence.
//!
//! Only a prefix of each child family is stored; the remainder is described
//! by a [`TailSpec`] and can be generated on demand.

mod config;
mod points;
mod tree;

use thiserror::Error;

pub use config::{Ambient, RadiusSchedule, RealizationConfig, SideRule};
pub use points::{materialize, materialize_forest, NodePath, PointCloud};
pub(crate) use tree::generator_for;
pub use tree::{child_ball, child_rank, ClusterTree, Generator, TailSpec, TreeFile};

use crate::ordinal::Ordinal;
use crate::scalar::{distance, Scalar};
use crate::space::{union_all, CbChar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("radius must be positive, got {0}")]
    InvalidRadius(String),
    #[error("cluster count must be at least 1")]
    InvalidCount,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed tree: {0}")]
    Malformed(String),
}

/// Builds the cluster of rank `alpha` inside `B(z, r)`, materializing
/// `cfg.children_per_node` children per node down to `cfg.depth` levels.
pub fn realize_cluster<T: Scalar>(
    z: T,
    r: T,
    alpha: &Ordinal,
    cfg: &RealizationConfig,
) -> Result<ClusterTree<T>, RealizeError> {
    cfg.validate()?;
    if !r.is_positive() {
        return Err(RealizeError::InvalidRadius(r.to_fraction()));
    }
    build(z, r, alpha.clone(), cfg.depth, cfg)
}

fn build<T: Scalar>(
    z: T,
    r: T,
    rank: Ordinal,
    depth_left: usize,
    cfg: &RealizationConfig,
) -> Result<ClusterTree<T>, RealizeError> {
    if rank.is_zero() {
        return Ok(ClusterTree::leaf(z, r));
    }
    let generator = tree::generator_for(&rank);
    let m = if depth_left > 0 {
        cfg.children_per_node
    } else {
        0
    };
    let children = (0..m)
        .map(|n| {
            let (x, eps) = child_ball(&z, &r, n, cfg.radius_schedule, cfg.side_rule);
            build(
                x,
                eps,
                child_rank(&rank, generator, n)?,
                depth_left - 1,
                cfg,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClusterTree {
        center: z,
        radius: r,
        rank,
        children,
        tail: Some(TailSpec {
            next_index: m,
            generator,
            stage: 0,
            schedule: cfg.radius_schedule,
            side: cfg.side_rule,
        }),
    })
}

/// `p` clusters of rank `alpha` centered at the integers `0..p`, each with
/// radius half the minimal pairwise distance of the centers. Their union has
/// characteristic `(alpha, p)`.
pub fn realize_multi<T: Scalar>(
    alpha: &Ordinal,
    p: usize,
    cfg: &RealizationConfig,
) -> Result<Vec<ClusterTree<T>>, RealizeError> {
    if p == 0 {
        return Err(RealizeError::InvalidCount);
    }
    let centers: Vec<T> = (0..p as i64).map(T::from_int).collect();
    let radius = centers
        .iter()
        .enumerate()
        .flat_map(|(i, a)| centers[i + 1..].iter().map(move |b| distance(a, b)))
        .reduce(|m, d| if d < m { d } else { m })
        .unwrap_or_else(T::one)
        .half();
    centers
        .into_iter()
        .map(|z| realize_cluster(z, radius.clone(), alpha, cfg))
        .collect()
}

/// A compact subset of the line homeomorphic to `ω^alpha + 1` (a single
/// point for `alpha = 0`).
pub fn embed_ordinal<T: Scalar>(
    alpha: &Ordinal,
    cfg: &RealizationConfig,
) -> Result<ClusterTree<T>, RealizeError> {
    Ok(realize_multi(alpha, 1, cfg)?.remove(0))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rank audit failed at {path:?}: {reason}")]
pub struct AuditError {
    pub path: NodePath,
    pub reason: String,
}

/// Checks the rank annotations of a freshly realized forest against the
/// construction rule and returns the characteristic they certify.
pub fn audit_ranks<T: Scalar>(forest: &[ClusterTree<T>]) -> Result<CbChar, AuditError> {
    for (i, tree) in forest.iter().enumerate() {
        audit_node(tree, &mut vec![i])?;
    }
    let parts: Vec<CbChar> = forest
        .iter()
        .map(|t| CbChar::new(t.rank.clone(), 1).expect("count is positive"))
        .collect();
    Ok(union_all(&parts))
}

fn audit_node<T: Scalar>(node: &ClusterTree<T>, path: &mut NodePath) -> Result<(), AuditError> {
    let fail = |path: &NodePath, reason: String| AuditError {
        path: path.clone(),
        reason,
    };
    if node.rank.is_zero() {
        if !node.children.is_empty() || node.tail.is_some() {
            return Err(fail(path, "rank 0 node has descendants".into()));
        }
        return Ok(());
    }
    let Some(tail) = &node.tail else {
        return Err(fail(path, format!("rank {} node has no tail", node.rank)));
    };
    if tail.generator != tree::generator_for(&node.rank) {
        return Err(fail(
            path,
            format!("{:?} generator on rank {}", tail.generator, node.rank),
        ));
    }
    if tail.next_index != node.children.len() {
        return Err(fail(
            path,
            format!(
                "tail starts at {} but {} children are materialized",
                tail.next_index,
                node.children.len()
            ),
        ));
    }
    let mut previous: Option<&Ordinal> = None;
    for (n, child) in node.children.iter().enumerate() {
        let expected =
            child_rank(&node.rank, tail.generator, n).map_err(|e| fail(path, e.to_string()))?;
        if child.rank != expected {
            return Err(fail(
                path,
                format!("child {n} has rank {}, expected {expected}", child.rank),
            ));
        }
        if child.rank >= node.rank
            || previous.is_some_and(|p| tail.generator == Generator::Limit && p >= &child.rank)
        {
            return Err(fail(path, format!("child {n} breaks rank monotonicity")));
        }
        previous = Some(&child.rank);
        path.push(n);
        audit_node(child, path)?;
        path.pop();
    }
    Ok(())
}
