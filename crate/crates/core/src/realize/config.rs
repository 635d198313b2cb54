use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RealizeError;
use crate::scalar::Scalar;

/// Distances `r_n = d(x_n, z)` of the children of a cluster of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusSchedule {
    /// `r_n = r · 2^-(n+1)`
    #[default]
    Halving,
    /// `r_n = r · k^-(n+1)` for an integer ratio `k ≥ 2`.
    Geometric(u32),
}

impl RadiusSchedule {
    fn ratio(self) -> u32 {
        match self {
            RadiusSchedule::Halving => 2,
            RadiusSchedule::Geometric(k) => k,
        }
    }

    /// `r_n` for `n ≥ 0`, with `r_{-1} = r` when `n = -1`.
    pub fn radius<T: Scalar>(self, r: &T, n: i64) -> T {
        assert!(n >= -1, "schedule index below -1");
        let k = i64::from(self.ratio());
        let exp = (n + 1) as u32;
        match k.checked_pow(exp) {
            Some(scale) => r.clone() / T::from_int(scale),
            None => r.clone() / num_traits::pow(T::from_int(k), exp as usize),
        }
    }

    /// Ratio `r_n / r_{n+1}`.
    pub fn step<T: Scalar>(self) -> T {
        T::from_int(i64::from(self.ratio()))
    }

    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

impl fmt::Display for RadiusSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusSchedule::Halving => f.write_str("halving"),
            RadiusSchedule::Geometric(k) => write!(f, "geometric:{k}"),
        }
    }
}

impl FromStr for RadiusSchedule {
    type Err = RealizeError;

    fn from_str(s: &str) -> Result<Self, RealizeError> {
        let bad = || RealizeError::InvalidConfig(format!("radius_schedule {s:?}"));
        match s.trim() {
            "halving" => Ok(Self::Halving),
            other => {
                let k: u32 = other
                    .strip_prefix("geometric:")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(bad)?;
                if k < 2 {
                    return Err(bad());
                }
                Ok(if k == 2 {
                    Self::Halving
                } else {
                    Self::Geometric(k)
                })
            }
        }
    }
}

/// Side of the center on which child `n` is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SideRule {
    /// `x_n = z + r_n`
    #[default]
    Right,
    /// `x_n = z - r_n`
    Left,
    /// `x_n = z + (-1)^n r_n`
    Alternate,
}

impl SideRule {
    pub fn place<T: Scalar>(self, center: &T, offset: T, n: usize) -> T {
        let right = match self {
            SideRule::Right => true,
            SideRule::Left => false,
            SideRule::Alternate => n.is_multiple_of(2),
        };
        if right {
            center.clone() + offset
        } else {
            center.clone() - offset
        }
    }

    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

impl fmt::Display for SideRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SideRule::Right => "right",
            SideRule::Left => "left",
            SideRule::Alternate => "alternate",
        })
    }
}

impl FromStr for SideRule {
    type Err = RealizeError;

    fn from_str(s: &str) -> Result<Self, RealizeError> {
        match s.trim() {
            "right" => Ok(Self::Right),
            "left" => Ok(Self::Left),
            "alternate" => Ok(Self::Alternate),
            other => Err(RealizeError::InvalidConfig(format!("side_rule {other:?}"))),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?
                    .parse()
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(RadiusSchedule);
string_serde!(SideRule);

/// The perfect complete metric space the clusters live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ambient {
    /// Rational points of the real line.
    #[default]
    RationalLine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationConfig {
    /// Materialized children per node (`m`); the rest stay in the tail.
    pub children_per_node: usize,
    /// Levels materialized below each root.
    pub depth: usize,
    pub radius_schedule: RadiusSchedule,
    pub side_rule: SideRule,
    pub ambient: Ambient,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        Self {
            children_per_node: 4,
            depth: 6,
            radius_schedule: RadiusSchedule::Halving,
            side_rule: SideRule::Right,
            ambient: Ambient::RationalLine,
        }
    }
}

impl RealizationConfig {
    pub fn with_children(mut self, m: usize) -> Self {
        self.children_per_node = m;
        self
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn validate(&self) -> Result<(), RealizeError> {
        if self.children_per_node < 2 {
            return Err(RealizeError::InvalidConfig(format!(
                "children_per_node must be at least 2, got {}",
                self.children_per_node
            )));
        }
        if let RadiusSchedule::Geometric(k) = self.radius_schedule {
            if k < 2 {
                return Err(RealizeError::InvalidConfig(format!(
                    "geometric ratio must be at least 2, got {k}"
                )));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn from_kv_str(text: &str) -> Result<Self, RealizeError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    RealizeError::InvalidConfig(format!(
                        "line {}: expected key = value",
                        lineno + 1
                    ))
                })?;
            let value = value.trim().trim_matches('"');
            let number = |v: &str| {
                v.parse::<usize>().map_err(|_| {
                    RealizeError::InvalidConfig(format!(
                        "line {}: {v:?} is not a number",
                        lineno + 1
                    ))
                })
            };
            match key.trim() {
                "children_per_node" => cfg.children_per_node = number(value)?,
                "depth" => cfg.depth = number(value)?,
                "radius_schedule" => cfg.radius_schedule = value.parse()?,
                "side_rule" => cfg.side_rule = value.parse()?,
                "ambient" if value == "rational_line" => cfg.ambient = Ambient::RationalLine,
                other => {
                    return Err(RealizeError::InvalidConfig(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv_string(&self) -> String {
        format!(
            "children_per_node = {}\ndepth = {}\nradius_schedule = {}\nside_rule = {}\nambient = rational_line\n",
            self.children_per_node, self.depth, self.radius_schedule, self.side_rule
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    #[test]
    fn halving_schedule() {
        let r = Q::from_integer(1);
        let s = RadiusSchedule::Halving;
        assert_eq!(s.radius(&r, -1), r);
        assert_eq!(s.radius(&r, 0), Q::new(1, 2));
        assert_eq!(s.radius(&r, 2), Q::new(1, 8));
        assert_eq!(RadiusSchedule::Geometric(3).radius(&r, 1), Q::new(1, 9));
    }

    #[test]
    fn placement() {
        let z = Q::from_integer(1);
        let off = Q::new(1, 4);
        assert_eq!(SideRule::Right.place(&z, off, 3), Q::new(5, 4));
        assert_eq!(SideRule::Left.place(&z, off, 0), Q::new(3, 4));
        assert_eq!(SideRule::Alternate.place(&z, off, 1), Q::new(3, 4));
    }

    #[test]
    fn kv_round_trip() {
        let cfg = RealizationConfig {
            children_per_node: 3,
            depth: 2,
            radius_schedule: RadiusSchedule::Geometric(3),
            side_rule: SideRule::Alternate,
            ambient: Ambient::RationalLine,
        };
        assert_eq!(
            RealizationConfig::from_kv_str(&cfg.to_kv_string()).unwrap(),
            cfg
        );
        let parsed = RealizationConfig::from_kv_str("# comment\nchildren_per_node = 5\n").unwrap();
        assert_eq!(parsed, RealizationConfig::default().with_children(5));
    }

    #[test]
    fn kv_rejects_bad_input() {
        assert!(RealizationConfig::from_kv_str("children_per_node = 1").is_err());
        assert!(RealizationConfig::from_kv_str("radius_schedule = geometric:1").is_err());
        assert!(RealizationConfig::from_kv_str("colour = red").is_err());
        assert!(RealizationConfig::from_kv_str("depth").is_err());
    }
}
