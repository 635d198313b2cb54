//! Verification that does not go through the ordinal calculus.
//!
//! Derived sets are computed structurally on cluster trees. A node is a limit
//! point of the ideal set exactly when infinitely many of its children keep a
//! point, and only the tail can supply infinitely many. Tail children are
//! probed by generating them from the tail rule: one probe for successor
//! tails, whose children are all alike, and a short window for limit tails,
//! whose children grow.
//!
//! Geometric checks evaluate the annulus separation of every node with exact
//! arithmetic. Failures are reported as data, never as errors.

use serde::Serialize;
use thiserror::Error;

use crate::ordinal::Ordinal;
use crate::realize::{audit_ranks, child_rank, generator_for, ClusterTree, Generator, NodePath};
use crate::scalar::{distance, fraction, Scalar};
use crate::space::CbChar;

pub type Forest<T> = Vec<ClusterTree<T>>;

pub const DEFAULT_STAGE_CAP: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("rank {0} is infinite; pruning only certifies finite ranks")]
    InfiniteRank(String),
    #[error("derived sets still infinite after {0} stages")]
    StageBudgetExceeded(u32),
    #[error("annulus {n} needs children up to {needed}, only {available} available")]
    IndexOutOfRange {
        n: usize,
        needed: usize,
        available: usize,
    },
    #[error("inconsistent tree: {0}")]
    Malformed(String),
}

fn probe<T: Scalar>(node: &ClusterTree<T>, n: usize) -> Option<ClusterTree<T>> {
    node.generate_child(n).and_then(Result::ok)
}

/// Whether the ideal cluster at `node` is nonempty after `stage` derived-set
/// steps, counted from the construction (ignoring the node's own stage).
fn ideal_survives<T: Scalar>(node: &ClusterTree<T>, stage: u32) -> bool {
    stage == 0 || tail_alive(node, stage - 1)
}

/// Whether infinitely many tail children keep a point after `stage` steps.
fn tail_alive<T: Scalar>(node: &ClusterTree<T>, stage: u32) -> bool {
    node.tail
        .as_ref()
        .is_some_and(|tail| ranks_alive(&node.rank, tail.generator, tail.next_index, stage))
}

// Survival depends only on ranks and the tail shape, so generated children
// are probed by rank alone; their balls are never computed.
fn ranks_alive(rank: &Ordinal, generator: Generator, first: usize, stage: u32) -> bool {
    let child_alive = |n| {
        child_rank(rank, generator, n).is_ok_and(|c| {
            stage == 0 || (!c.is_zero() && ranks_alive(&c, generator_for(&c), 0, stage - 1))
        })
    };
    match generator {
        Generator::Successor => child_alive(first),
        Generator::Limit => (first..=first + stage as usize).any(child_alive),
    }
}

/// Whether `node` survives `extra` further derived-set steps.
pub fn survives<T: Scalar>(node: &ClusterTree<T>, extra: u32) -> bool {
    ideal_survives(node, node.stage() + extra)
}

/// One derived-set step on a tree. Removed nodes whose descendants survive
/// (possible only in hand-built trees) leave those descendants as roots.
pub fn prune<T: Scalar>(tree: &ClusterTree<T>) -> Forest<T> {
    prune_forest(std::slice::from_ref(tree))
}

pub fn prune_forest<T: Scalar>(forest: &[ClusterTree<T>]) -> Forest<T> {
    let mut out = Vec::new();
    for node in forest {
        if survives(node, 1) {
            let mut tail = node.tail.clone().expect("surviving nodes have a tail");
            tail.stage += 1;
            out.push(ClusterTree {
                center: node.center.clone(),
                radius: node.radius.clone(),
                rank: node.rank.clone(),
                children: prune_forest(&node.children),
                tail: Some(tail),
            });
        } else {
            out.extend(prune_forest(&node.children));
        }
    }
    out
}

pub fn prune_steps<T: Scalar>(tree: &ClusterTree<T>, k: u32) -> Forest<T> {
    prune_forest_steps(std::slice::from_ref(tree), k)
}

pub fn prune_forest_steps<T: Scalar>(forest: &[ClusterTree<T>], k: u32) -> Forest<T> {
    let mut current = forest.to_vec();
    for _ in 0..k {
        current = prune_forest(&current);
    }
    current
}

fn forest_nodes<T: Scalar>(forest: &[ClusterTree<T>]) -> usize {
    forest.iter().map(ClusterTree::node_count).sum()
}

fn forest_centers<T: Scalar>(forest: &[ClusterTree<T>]) -> Vec<T> {
    let mut out: Vec<T> = forest.iter().flat_map(ClusterTree::centers).collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("coordinates are ordered"));
    out
}

/// Size of the ideal derived set after `extra` steps; `None` when infinite.
fn ideal_count<T: Scalar>(node: &ClusterTree<T>, extra: u32) -> Option<u64> {
    let stage = node.stage() + extra;
    let mut total = 0u64;
    for child in &node.children {
        total += ideal_count(child, extra)?;
    }
    if ideal_survives(node, stage) {
        if tail_alive(node, stage) {
            return None;
        }
        total += 1;
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneReport {
    pub stage: u32,
    pub removed: usize,
    pub survivors: usize,
    pub finite_reached: bool,
}

/// Materialized survivors stage by stage, until the ideal set is finite, the
/// forest is empty, or `max_stage` is reached.
pub fn prune_trace<T: Scalar>(forest: &[ClusterTree<T>], max_stage: u32) -> Vec<PruneReport> {
    let mut reports = Vec::new();
    let mut current = forest.to_vec();
    let mut previous = forest_nodes(&current);
    for stage in 0..=max_stage {
        if stage > 0 {
            current = prune_forest(&current);
        }
        let survivors = forest_nodes(&current);
        let finite_reached = current
            .iter()
            .map(|t| ideal_count(t, 0))
            .sum::<Option<u64>>()
            .is_some();
        reports.push(PruneReport {
            stage,
            removed: previous - survivors,
            survivors,
            finite_reached,
        });
        previous = survivors;
        if finite_reached || current.is_empty() {
            break;
        }
    }
    reports
}

/// Characteristic from structural pruning: the least stage at which the ideal
/// derived set is finite, and its size. Only finite ranks are accepted.
pub fn char_by_pruning<T: Scalar>(
    forest: &[ClusterTree<T>],
    stage_cap: u32,
) -> Result<CbChar, OracleError> {
    if let Some(t) = forest.iter().find(|t| !t.rank.is_finite()) {
        return Err(OracleError::InfiniteRank(t.rank.to_string()));
    }
    for stage in 0..=stage_cap {
        let total: Option<u64> = forest.iter().map(|t| ideal_count(t, stage)).sum();
        if let Some(count) = total {
            return CbChar::new(Ordinal::from(u64::from(stage)), count)
                .map_err(|e| OracleError::Malformed(e.to_string()));
        }
    }
    Err(OracleError::StageBudgetExceeded(stage_cap))
}

/// Separation test for the closed set `F_n = {x : d(x, z) ≥ (r_n + r_{n+1})/2}`
/// around one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AnnulusCheck<T> {
    pub path: NodePath,
    pub n: usize,
    #[serde(serialize_with = "fraction::serialize")]
    pub threshold: T,
    /// Children `k ≤ n` lie in `F_n`.
    pub inner_in_f: bool,
    /// Children `k > n` miss `F_n`.
    pub outer_miss_f: bool,
    /// No point sits on the boundary sphere of `F_n`.
    pub boundary_clear: bool,
    #[serde(serialize_with = "fraction::serialize_opt")]
    pub counterexample: Option<T>,
}

impl<T> AnnulusCheck<T> {
    pub fn ok(&self) -> bool {
        self.inner_in_f && self.outer_miss_f && self.boundary_clear
    }
}

/// Ball containment, disjointness or monotonicity failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct BallViolation<T> {
    pub path: NodePath,
    pub rule: String,
    #[serde(serialize_with = "fraction::serialize_opt")]
    pub point: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport<T> {
    pub annuli: Vec<AnnulusCheck<T>>,
    pub violations: Vec<BallViolation<T>>,
}

impl<T> Default for GeometryReport<T> {
    fn default() -> Self {
        Self {
            annuli: Vec::new(),
            violations: Vec::new(),
        }
    }
}

impl<T: Scalar> GeometryReport<T> {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.annuli.iter().all(AnnulusCheck::ok)
    }

    pub fn first_counterexample(&self) -> Option<&T> {
        self.annuli
            .iter()
            .find_map(|a| a.counterexample.as_ref())
            .or_else(|| self.violations.iter().find_map(|v| v.point.as_ref()))
    }
}

impl<T: Scalar> Serialize for GeometryReport<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(bound = "T: Scalar")]
        struct Summary<'a, T> {
            ok: bool,
            annuli_checked: usize,
            failed_annuli: Vec<&'a AnnulusCheck<T>>,
            violations: &'a [BallViolation<T>],
        }
        Summary {
            ok: self.ok(),
            annuli_checked: self.annuli.len(),
            failed_annuli: self.annuli.iter().filter(|a| !a.ok()).collect(),
            violations: &self.violations,
        }
        .serialize(s)
    }
}

pub fn geometry_check<T: Scalar>(tree: &ClusterTree<T>) -> GeometryReport<T> {
    let mut report = GeometryReport::default();
    check_node(tree, &mut Vec::new(), &mut report);
    report
}

/// Geometry of every root plus pairwise disjointness of the root balls.
pub fn geometry_check_forest<T: Scalar>(forest: &[ClusterTree<T>]) -> GeometryReport<T> {
    let mut report = GeometryReport::default();
    for (i, a) in forest.iter().enumerate() {
        for b in &forest[i + 1..] {
            if distance(&a.center, &b.center) < a.radius.clone() + b.radius.clone() {
                report.violations.push(BallViolation {
                    path: vec![i],
                    rule: "root balls overlap".into(),
                    point: Some(b.center.clone()),
                });
            }
        }
        check_node(a, &mut vec![i], &mut report);
    }
    report
}

/// Distances `d(x_k, z)` of the materialized children, plus the next tail
/// child when it directly follows them.
fn child_distances<T: Scalar>(node: &ClusterTree<T>) -> Vec<T> {
    let mut out: Vec<T> = node
        .children
        .iter()
        .map(|c| distance(&c.center, &node.center))
        .collect();
    let next = node
        .tail
        .as_ref()
        .filter(|t| t.stage == 0 && t.next_index == node.children.len())
        .and_then(|_| probe(node, node.children.len()));
    if let Some(child) = next {
        out.push(distance(&child.center, &node.center));
    }
    out
}

/// `(distance to the node center, point)`
type Sample<T> = (T, T);

fn check_node<T: Scalar>(
    node: &ClusterTree<T>,
    path: &mut NodePath,
    report: &mut GeometryReport<T>,
) {
    let z = &node.center;
    let mut violation = |rule: &str, point: Option<T>| {
        report.violations.push(BallViolation {
            path: path.clone(),
            rule: rule.to_string(),
            point,
        })
    };
    if !node.radius.is_positive() {
        violation("radius not positive", None);
    }
    let dists = child_distances(node);
    let child_points: Vec<Vec<Sample<T>>> = node
        .children
        .iter()
        .map(|c| {
            c.centers()
                .into_iter()
                .map(|p| (distance(&p, z), p))
                .collect()
        })
        .collect();
    // nearest and farthest sample of each child
    let extremes: Vec<Option<(&Sample<T>, &Sample<T>)>> = child_points
        .iter()
        .map(|points| {
            let first = points.first()?;
            Some(points.iter().fold((first, first), |(near, far), p| {
                (
                    if p.0 < near.0 { p } else { near },
                    if p.0 > far.0 { p } else { far },
                )
            }))
        })
        .collect();

    // r_{-1} = r > r_0 > r_1 > ...
    let mut outer = node.radius.clone();
    for (k, d) in dists.iter().enumerate() {
        if !(d < &outer) || d.is_zero() {
            let point = node.children.get(k).map(|c| c.center.clone());
            violation(
                "child distances not strictly decreasing inside the radius",
                point,
            );
        }
        outer = d.clone();
    }
    for (k, child) in node.children.iter().enumerate() {
        let eps = &child.radius;
        let d = &dists[k];
        let r_prev = if k == 0 { &node.radius } else { &dists[k - 1] };
        if d.clone() + eps.clone() > r_prev.clone() {
            violation(
                "child ball leaves B(z, r_{k-1})",
                Some(child.center.clone()),
            );
        }
        if let Some(r_next) = dists.get(k + 1) {
            if d.clone() - eps.clone() < r_next.clone() {
                violation("child ball meets B(z, r_{k+1})", Some(child.center.clone()));
            }
        }
        for other in &node.children[k + 1..] {
            if distance(&child.center, &other.center) < eps.clone() + other.radius.clone() {
                violation("sibling balls overlap", Some(other.center.clone()));
            }
        }
        if let Some((_, (d, far))) = extremes[k] {
            if !(d < &node.radius) {
                violation("point outside B(z, r)", Some(far.clone()));
            }
        }
    }

    for n in 0..dists.len().saturating_sub(1) {
        let threshold = (dists[n].clone() + dists[n + 1].clone()).half();
        let mut check = AnnulusCheck {
            path: path.clone(),
            n,
            threshold: threshold.clone(),
            inner_in_f: true,
            outer_miss_f: true,
            boundary_clear: true,
            counterexample: None,
        };
        for (k, points) in child_points.iter().enumerate() {
            let Some((nearest, farthest)) = extremes[k] else {
                continue;
            };
            let on_sphere = points.iter().find(|(d, _)| *d == threshold);
            let mut witness = None;
            if k <= n && nearest.0 < threshold {
                check.inner_in_f = false;
                witness = Some(nearest);
            }
            if k > n && farthest.0 >= threshold {
                check.outer_miss_f = false;
                witness = witness.or(Some(farthest));
            }
            if let Some(hit) = on_sphere {
                check.boundary_clear = false;
                witness = witness.or(Some(hit));
            }
            if check.counterexample.is_none() {
                check.counterexample = witness.map(|(_, p)| p.clone());
            }
        }
        report.annuli.push(check);
    }

    for (k, child) in node.children.iter().enumerate() {
        path.push(k);
        check_node(child, path, report);
        path.pop();
    }
}

/// Radius separating the first `n + 1` child clusters from the rest: halfway
/// between the distances of children `n` and `n + 1` from the center.
fn restriction_threshold<T: Scalar>(tree: &ClusterTree<T>, n: usize) -> Result<T, OracleError> {
    let out_of_range = |available| OracleError::IndexOutOfRange {
        n,
        needed: n + 1,
        available,
    };
    if n >= tree.children.len() {
        return Err(out_of_range(tree.children.len()));
    }
    let next = match tree.children.get(n + 1) {
        Some(c) => c.center.clone(),
        None => {
            probe(tree, n + 1)
                .ok_or_else(|| out_of_range(tree.children.len()))?
                .center
        }
    };
    let z = &tree.center;
    Ok((distance(&tree.children[n].center, z) + distance(&next, z)).half())
}

/// Compares `(K ∩ F_n)^(β)` with `K^(β) ∩ F_n`, where `K ∩ F_n` is taken to
/// be the first `n + 1` child clusters and `F_n` is evaluated metrically.
pub fn restriction_check<T: Scalar>(
    tree: &ClusterTree<T>,
    n: usize,
    beta: u32,
) -> Result<bool, OracleError> {
    let threshold = restriction_threshold(tree, n)?;
    let z = &tree.center;
    let left = forest_centers(&prune_forest_steps(&tree.children[..=n], beta));
    let right: Vec<T> = forest_centers(&prune_steps(tree, beta))
        .into_iter()
        .filter(|p| distance(p, z) >= threshold)
        .collect();
    Ok(left == right)
}

/// [`restriction_check`] for every `n < annuli` and `β ≤ max_beta`, pruning
/// each stage once. Returns `(n, β, holds)` ordered by `β`, then `n`.
pub fn restriction_checks<T: Scalar>(
    tree: &ClusterTree<T>,
    annuli: usize,
    max_beta: u32,
) -> Result<Vec<(usize, u32, bool)>, OracleError> {
    let thresholds = (0..annuli)
        .map(|n| restriction_threshold(tree, n))
        .collect::<Result<Vec<T>, _>>()?;
    let z = &tree.center;
    let mut whole = vec![tree.clone()];
    let mut parts: Vec<Forest<T>> = tree.children[..annuli]
        .iter()
        .map(|c| vec![c.clone()])
        .collect();
    // Each point tagged with the first n whose annulus keeps it (d ≥ t_n);
    // the thresholds decrease, so it stays kept for every later n.
    let mut tags: Vec<(T, usize)> = tree
        .centers()
        .into_iter()
        .map(|p| {
            let d = distance(&p, z);
            let first = thresholds.iter().position(|t| d >= *t).unwrap_or(annuli);
            (p, first)
        })
        .collect();
    tags.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let mut out = Vec::new();
    for beta in 0..=max_beta {
        if beta > 0 {
            whole = prune_forest(&whole);
            for part in &mut parts {
                *part = prune_forest(part);
            }
        }
        let survivors: Vec<(T, usize)> = whole
            .iter()
            .flat_map(ClusterTree::centers)
            .map(|p| {
                let i = tags
                    .binary_search_by(|(q, _)| q.canonical_cmp(&p))
                    .expect("survivors are points of the tree");
                (p, tags[i].1)
            })
            .collect();
        let mut left = Vec::new();
        for (n, pruned) in parts.iter().enumerate() {
            let mut part: Vec<T> = pruned.iter().flat_map(ClusterTree::centers).collect();
            part.sort_by(T::canonical_cmp);
            // two sorted runs: the stable sort merges them in linear time
            left.extend(part);
            left.sort_by(T::canonical_cmp);
            let mut right: Vec<T> = survivors
                .iter()
                .filter(|(_, first)| *first <= n)
                .map(|(p, _)| p.clone())
                .collect();
            right.sort_by(T::canonical_cmp);
            out.push((n, beta, left == right));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub stage_cap: u32,
    /// Annuli `n < max_annulus` and stages `β ≤ max_beta` are checked for the
    /// restriction identity at every root.
    pub max_annulus: usize,
    pub max_beta: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            stage_cap: DEFAULT_STAGE_CAP,
            max_annulus: 4,
            max_beta: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct VerifyReport<T> {
    pub geometry: GeometryReport<T>,
    /// Characteristic certified by the rank annotations.
    pub char_expected: Option<CbChar>,
    /// Characteristic found by structural pruning (finite ranks only).
    pub char_pruned: Option<CbChar>,
    pub restriction_ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub ok: bool,
}

/// Runs every check on a forest.
pub fn verify_forest<T: Scalar>(
    forest: &[ClusterTree<T>],
    opts: &VerifyOptions,
) -> VerifyReport<T> {
    let mut notes = Vec::new();
    let geometry = geometry_check_forest(forest);
    let char_expected = audit_ranks(forest)
        .map_err(|e| notes.push(e.to_string()))
        .ok();
    let mut pruning_ok = true;
    let char_pruned = match char_by_pruning(forest, opts.stage_cap) {
        Ok(c) => {
            pruning_ok = char_expected.as_ref() == Some(&c);
            Some(c)
        }
        Err(OracleError::InfiniteRank(rank)) => {
            notes.push(format!("rank {rank} checked by annotation audit only"));
            None
        }
        Err(e) => {
            pruning_ok = false;
            notes.push(e.to_string());
            None
        }
    };
    let mut restriction_ok = true;
    for (i, tree) in forest.iter().enumerate() {
        let annuli = opts.max_annulus.min(tree.children.len());
        match restriction_checks(tree, annuli, opts.max_beta) {
            Ok(cases) => {
                for (n, beta, _) in cases.into_iter().filter(|c| !c.2) {
                    restriction_ok = false;
                    notes.push(format!(
                        "restriction identity fails at root {i}, n = {n}, beta = {beta}"
                    ));
                }
            }
            Err(e) => {
                restriction_ok = false;
                notes.push(format!("restriction check at root {i}: {e}"));
            }
        }
    }
    let ok = geometry.ok() && char_expected.is_some() && pruning_ok && restriction_ok;
    VerifyReport {
        geometry,
        char_expected,
        char_pruned,
        restriction_ok,
        notes,
        ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::{realize_cluster, realize_multi, RealizationConfig};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn cluster(rank: &str, m: usize, depth: usize) -> ClusterTree<Q> {
        let cfg = RealizationConfig::default()
            .with_children(m)
            .with_depth(depth);
        realize_cluster(q(0, 1), q(1, 1), &rank.parse().unwrap(), &cfg).unwrap()
    }

    fn centers(forest: &[ClusterTree<Q>]) -> Vec<Q> {
        forest_centers(forest)
    }

    #[test]
    fn pruning_a_rank_one_cluster_leaves_its_center() {
        let t = cluster("1", 4, 6);
        let pruned = prune(&t);
        assert_eq!(centers(&pruned), vec![q(0, 1)]);
        assert_eq!(pruned[0].stage(), 1);
        assert!(prune_forest(&pruned).is_empty());
    }

    #[test]
    fn pruning_points_and_nothing() {
        assert!(prune(&ClusterTree::leaf(q(0, 1), q(1, 1))).is_empty());
        assert!(prune_forest::<Q>(&[]).is_empty());
    }

    #[test]
    fn iterated_pruning() {
        let t = cluster("2", 3, 6);
        assert_eq!(prune_steps(&t, 0), vec![t.clone()]);
        assert_eq!(centers(&prune_steps(&t, 2)), vec![q(0, 1)]);
        assert!(prune_steps(&t, 3).is_empty());
        // after one step the children survive as points
        assert_eq!(prune_steps(&t, 1)[0].node_count(), 4);
    }

    #[test]
    fn hand_built_finite_family_is_isolated() {
        // children without a tail cannot accumulate at the center
        let mut t = ClusterTree::leaf(q(0, 1), q(1, 1));
        t.rank = Ordinal::one();
        t.children = vec![ClusterTree::leaf(q(1, 2), q(1, 8))];
        assert!(prune(&t).is_empty());
        assert_eq!(char_by_pruning(&[t], 8).unwrap(), CbChar::finite(2));
    }

    #[test]
    fn lifted_descendants_survive_removed_parents() {
        let inner = cluster("1", 2, 1);
        let mut outer = ClusterTree::leaf(q(5, 1), q(10, 1));
        outer.children = vec![inner];
        let pruned = prune(&outer);
        assert_eq!(centers(&pruned), vec![q(0, 1)]);
    }

    #[test]
    fn characteristic_by_pruning() {
        let cfg = RealizationConfig::default();
        let two: Vec<ClusterTree<Q>> = realize_multi(&"2".parse().unwrap(), 1, &cfg).unwrap();
        assert_eq!(
            char_by_pruning(&two, 32).unwrap(),
            CbChar::new(Ordinal::from(2), 1).unwrap()
        );
        let leaf = [ClusterTree::leaf(q(0, 1), q(1, 1))];
        assert_eq!(char_by_pruning(&leaf, 32).unwrap(), CbChar::finite(1));
        let three: Vec<ClusterTree<Q>> = realize_multi(&"3".parse().unwrap(), 2, &cfg).unwrap();
        assert_eq!(
            char_by_pruning(&three, 32).unwrap(),
            CbChar::new(Ordinal::from(3), 2).unwrap()
        );
        assert_eq!(char_by_pruning::<Q>(&[], 32).unwrap(), CbChar::empty());
    }

    #[test]
    fn pruning_refuses_infinite_ranks_and_tight_caps() {
        let omega = cluster("w", 2, 2);
        assert!(matches!(
            char_by_pruning(&[omega], 32),
            Err(OracleError::InfiniteRank(_))
        ));
        let five = cluster("5", 2, 2);
        assert_eq!(
            char_by_pruning(&[five], 3),
            Err(OracleError::StageBudgetExceeded(3))
        );
    }

    #[test]
    fn limit_tails_survive_every_finite_stage() {
        let t = cluster("w", 3, 3);
        for k in 0..10 {
            assert!(survives(&t, k), "stage {k}");
        }
        let t = cluster("w*2", 2, 2);
        assert!(survives(&t, 20));
    }

    #[test]
    fn trace_reports_monotone_survivors() {
        let t = cluster("3", 3, 6);
        let trace = prune_trace(&[t], 10);
        assert_eq!(trace.len(), 4);
        assert!(trace.windows(2).all(|w| w[1].survivors <= w[0].survivors));
        assert!(trace[3].finite_reached && !trace[2].finite_reached);
        assert_eq!(trace[3].survivors, 1);
        assert_eq!(trace[1].removed, 27);
    }

    #[test]
    fn geometry_of_default_rank_one_cluster() {
        let report = geometry_check(&cluster("1", 4, 6));
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.annuli.len(), 4);
        assert_eq!(report.annuli[0].threshold, q(3, 8));
    }

    #[test]
    fn geometry_flags_points_on_the_sphere() {
        let mut t = cluster("1", 4, 6);
        // d = (r_0 + r_1) / 2 = 3/8
        t.children[0]
            .children
            .push(ClusterTree::leaf(q(3, 8), q(1, 64)));
        let report = geometry_check(&t);
        assert!(!report.ok());
        let bad = report.annuli.iter().find(|a| !a.ok()).unwrap();
        assert_eq!(bad.n, 0);
        assert!(!bad.boundary_clear);
        assert!(bad.inner_in_f);
        assert_eq!(bad.counterexample, Some(q(3, 8)));
        assert_eq!(report.first_counterexample(), Some(&q(3, 8)));
    }

    #[test]
    fn geometry_flags_misplaced_children() {
        let mut t = cluster("1", 4, 1);
        t.children[2].center = q(1, 2);
        let report = geometry_check(&t);
        assert!(!report.ok());
        assert!(!report.violations.is_empty());
        let leaf = ClusterTree::leaf(q(0, 1), q(1, 1));
        assert!(geometry_check(&leaf).ok());
    }

    #[test]
    fn restriction_identity_instances() {
        assert_eq!(restriction_check(&cluster("2", 4, 6), 2, 1), Ok(true));
        assert_eq!(restriction_check(&cluster("1", 4, 6), 0, 0), Ok(true));
        assert_eq!(restriction_check(&cluster("3", 4, 6), 1, 3), Ok(true));
        // last materialized child: the tail supplies r_{n+1}
        assert_eq!(restriction_check(&cluster("2", 4, 6), 3, 2), Ok(true));
        let t = cluster("w+1", 4, 5);
        let batched = restriction_checks(&t, 4, 3).unwrap();
        assert_eq!(batched.len(), 16);
        for (n, beta, holds) in batched {
            assert_eq!(Ok(holds), restriction_check(&t, n, beta));
        }
        assert!(matches!(
            restriction_check(&cluster("2", 4, 6), 4, 0),
            Err(OracleError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn verify_realized_forest() {
        let cfg = RealizationConfig::default().with_depth(3);
        let forest: Vec<ClusterTree<Q>> = realize_multi(&"2".parse().unwrap(), 3, &cfg).unwrap();
        let report = verify_forest(&forest, &VerifyOptions::default());
        assert!(report.ok, "{report:?}");
        assert_eq!(report.char_pruned, report.char_expected);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["geometry"]["ok"], true);
        assert_eq!(json["char_expected"]["count"], 3);
    }
}
