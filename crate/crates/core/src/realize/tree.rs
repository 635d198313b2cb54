use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use super::config::{RadiusSchedule, SideRule};
use super::RealizeError;
use crate::ordinal::Ordinal;
use crate::scalar::Scalar;

/// How the children of a node obtain their ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// Every child has the predecessor rank.
    Successor,
    /// Child `n` has rank `λ[n]`.
    Limit,
}

/// Deterministic description of the children not materialized in `children`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSpec {
    pub next_index: usize,
    pub generator: Generator,
    /// Number of derived-set steps already applied to this node.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub stage: u32,
    #[serde(default, skip_serializing_if = "RadiusSchedule::is_default")]
    pub schedule: RadiusSchedule,
    #[serde(default, skip_serializing_if = "SideRule::is_default")]
    pub side: SideRule,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

/// A cluster `K ⊆ B(center, radius)` whose derivative of order `rank` is
/// `{center}`, with a finite prefix of its infinite child family.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTree<T> {
    pub center: T,
    pub radius: T,
    pub rank: Ordinal,
    pub children: Vec<ClusterTree<T>>,
    pub tail: Option<TailSpec>,
}

/// Center and ball radius of child `n` of a cluster at `z` with radius `r`:
/// `x_n` at distance `r_n` and `ε_n = ½·min(r_{n-1} − r_n, r_n − r_{n+1})`.
pub fn child_ball<T: Scalar>(
    z: &T,
    r: &T,
    n: usize,
    schedule: RadiusSchedule,
    side: SideRule,
) -> (T, T) {
    let n = n as i64;
    let k: T = schedule.step();
    let prev = schedule.radius(r, n - 1);
    let here = prev.clone() / k.clone();
    let next = here.clone() / k;
    let gap_out = prev - here.clone();
    let gap_in = here.clone() - next;
    let eps = if gap_out < gap_in { gap_out } else { gap_in }.half();
    (side.place(z, here, n as usize), eps)
}

/// Rank of child `n` under the given generator.
pub fn child_rank(rank: &Ordinal, generator: Generator, n: usize) -> Result<Ordinal, RealizeError> {
    let out = match generator {
        Generator::Successor => rank.predecessor(),
        Generator::Limit => rank.fundamental(n as u64).ok(),
    };
    out.ok_or_else(|| {
        RealizeError::Malformed(format!(
            "rank {rank} does not fit a {generator:?} generator"
        ))
    })
}

impl<T: Scalar> ClusterTree<T> {
    pub fn leaf(center: T, radius: T) -> Self {
        Self {
            center,
            radius,
            rank: Ordinal::zero(),
            children: Vec::new(),
            tail: None,
        }
    }

    /// Child `n` of the ideal family, built from the tail rule with no
    /// materialized descendants. `None` for nodes without a tail.
    pub fn generate_child(&self, n: usize) -> Option<Result<ClusterTree<T>, RealizeError>> {
        let tail = self.tail.as_ref()?;
        Some(self.unexpanded_child(tail, n))
    }

    fn unexpanded_child(&self, tail: &TailSpec, n: usize) -> Result<ClusterTree<T>, RealizeError> {
        let rank = child_rank(&self.rank, tail.generator, n)?;
        let (center, radius) = child_ball(&self.center, &self.radius, n, tail.schedule, tail.side);
        let tail = (!rank.is_zero()).then(|| TailSpec {
            next_index: 0,
            generator: generator_for(&rank),
            stage: 0,
            schedule: tail.schedule,
            side: tail.side,
        });
        Ok(ClusterTree {
            center,
            radius,
            rank,
            children: Vec::new(),
            tail,
        })
    }

    /// Materialized nodes, including this one.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Self::node_count).sum::<usize>()
    }

    /// Centers of all materialized nodes, pre-order.
    pub fn centers(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.node_count());
        self.collect_centers(&mut out);
        out
    }

    fn collect_centers(&self, out: &mut Vec<T>) {
        out.push(self.center.clone());
        for c in &self.children {
            c.collect_centers(out);
        }
    }

    /// Derived-set steps already applied.
    pub fn stage(&self) -> u32 {
        self.tail.as_ref().map_or(0, |t| t.stage)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("trees serialize")
    }
}

pub(crate) fn generator_for(rank: &Ordinal) -> Generator {
    if rank.is_limit() {
        Generator::Limit
    } else {
        Generator::Successor
    }
}

impl<T: Scalar> Serialize for ClusterTree<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let fields = if self.tail.is_some() { 5 } else { 4 };
        let mut st = s.serialize_struct("ClusterTree", fields)?;
        st.serialize_field("center", &self.center.to_fraction())?;
        st.serialize_field("radius", &self.radius.to_fraction())?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("children", &self.children)?;
        if let Some(tail) = &self.tail {
            st.serialize_field("tail", tail)?;
        }
        st.end()
    }
}

#[derive(Deserialize)]
struct RawTree {
    center: String,
    radius: String,
    rank: Ordinal,
    #[serde(default)]
    children: Vec<RawTree>,
    #[serde(default)]
    tail: Option<TailSpec>,
}

impl RawTree {
    fn convert<T: Scalar>(self) -> Result<ClusterTree<T>, String> {
        let parse = |field: &str, text: &str| {
            T::parse_fraction(text)
                .ok_or_else(|| format!("{field} {text:?} is not an exact fraction"))
        };
        Ok(ClusterTree {
            center: parse("center", &self.center)?,
            radius: parse("radius", &self.radius)?,
            rank: self.rank,
            children: self
                .children
                .into_iter()
                .map(RawTree::convert)
                .collect::<Result<_, _>>()?,
            tail: self.tail,
        })
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ClusterTree<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        RawTree::deserialize(d)?
            .convert()
            .map_err(serde::de::Error::custom)
    }
}

/// A tree file holds one tree or a forest of trees.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
pub enum TreeFile<T> {
    Single(ClusterTree<T>),
    Forest(Vec<ClusterTree<T>>),
}

impl<T: Scalar> TreeFile<T> {
    pub fn from_forest(mut forest: Vec<ClusterTree<T>>) -> Self {
        if forest.len() == 1 {
            TreeFile::Single(forest.pop().expect("one tree"))
        } else {
            TreeFile::Forest(forest)
        }
    }

    pub fn into_forest(self) -> Vec<ClusterTree<T>> {
        match self {
            TreeFile::Single(t) => vec![t],
            TreeFile::Forest(f) => f,
        }
    }

    pub fn parse(text: &str) -> Result<Self, RealizeError> {
        serde_json::from_str(text).map_err(|e| RealizeError::Malformed(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        match self {
            TreeFile::Single(t) => t.to_json_pretty(),
            TreeFile::Forest(f) => serde_json::to_string_pretty(f).expect("trees serialize"),
        }
    }
}
