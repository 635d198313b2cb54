//! Countable ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `ω^e₁·c₁ + … + ω^eₖ·cₖ` with strictly
//! decreasing exponents (themselves ordinals) and positive arbitrary-precision
//! coefficients. The empty sum is `0`. Every constructor and operation keeps
//! that normal form, so structural equality coincides with ordinal equality.

mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::{parse_ordinal, ParseMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("undefined: {subtrahend} exceeds {minuend}")]
    Undefined { subtrahend: String, minuend: String },
    #[error("not a limit ordinal: {0}")]
    NotLimit(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("not in canonical form at position {pos}: {msg}")]
    NotCanonical { pos: usize, msg: String },
}

/// One `ω^exponent · coefficient` summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    exponent: Ordinal,
    coefficient: BigUint,
}

impl Term {
    pub fn exponent(&self) -> &Ordinal {
        &self.exponent
    }

    pub fn coefficient(&self) -> &BigUint {
        &self.coefficient
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(1u64)
    }

    /// `ω`.
    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^exponent` as a single-term normal form.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Self::monomial(exponent, BigUint::one())
    }

    /// `ω^exponent · coefficient`; a zero coefficient gives `0`.
    pub fn monomial(exponent: Ordinal, coefficient: impl Into<BigUint>) -> Self {
        let coefficient = coefficient.into();
        if coefficient.is_zero() {
            return Self::zero();
        }
        Self {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs that must already
    /// be in normal form.
    pub fn from_terms<I>(terms: I) -> Result<Self, OrdinalError>
    where
        I: IntoIterator<Item = (Ordinal, BigUint)>,
    {
        let ord = Self {
            terms: terms
                .into_iter()
                .map(|(exponent, coefficient)| Term {
                    exponent,
                    coefficient,
                })
                .collect(),
        };
        if ord.is_canonical() {
            Ok(ord)
        } else {
            Err(OrdinalError::NotCanonical {
                pos: 0,
                msg: format!("terms {ord} are not strictly decreasing with positive coefficients"),
            })
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Structural check of the normal-form invariants, recursively.
    pub fn is_canonical(&self) -> bool {
        self.terms
            .iter()
            .all(|t| !t.coefficient.is_zero() && t.exponent.is_canonical())
            && self.terms.windows(2).all(|w| w[0].exponent > w[1].exponent)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// The value as a machine integer, if finite and small enough.
    pub fn to_u64(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => t.coefficient.to_u64(),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    pub fn successor(&self) -> Self {
        self + &Self::one()
    }

    /// The immediate predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut out = self.clone();
        let last = out.terms.last_mut()?;
        last.coefficient -= 1u32;
        if last.coefficient.is_zero() {
            out.terms.pop();
        }
        Some(out)
    }

    /// Exponent of the leading term; `None` for zero.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// The unique `γ` with `prefix + γ = self`.
    pub fn left_sub(&self, prefix: &Ordinal) -> Result<Ordinal, OrdinalError> {
        for (i, (mine, theirs)) in self.terms.iter().zip(&prefix.terms).enumerate() {
            match mine.exponent.cmp(&theirs.exponent) {
                Ordering::Greater => return Ok(self.suffix(i)),
                Ordering::Less => return Err(self.undefined(prefix)),
                Ordering::Equal => {}
            }
            match mine.coefficient.cmp(&theirs.coefficient) {
                Ordering::Greater => {
                    let mut out = self.suffix(i);
                    out.terms[0].coefficient = &mine.coefficient - &theirs.coefficient;
                    return Ok(out);
                }
                Ordering::Less => return Err(self.undefined(prefix)),
                Ordering::Equal => {}
            }
        }
        if prefix.terms.len() > self.terms.len() {
            Err(self.undefined(prefix))
        } else {
            Ok(self.suffix(prefix.terms.len()))
        }
    }

    fn suffix(&self, from: usize) -> Ordinal {
        Ordinal {
            terms: self.terms[from..].to_vec(),
        }
    }

    fn undefined(&self, prefix: &Ordinal) -> OrdinalError {
        OrdinalError::Undefined {
            subtrahend: prefix.to_string(),
            minuend: self.to_string(),
        }
    }

    /// The `n`-th element of the canonical fundamental sequence of a limit
    /// ordinal:
    ///
    /// * `(γ + ω^(δ+1))[n] = γ + ω^δ·(n+1)`
    /// * `(γ + ω^μ)[n] = γ + ω^(μ[n])` for limit `μ`
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.to_string()));
        }
        let mut base = self.clone();
        let last = base.terms.last_mut().expect("limit ordinals are nonzero");
        let exponent = last.exponent.clone();
        last.coefficient -= 1u32;
        if last.coefficient.is_zero() {
            base.terms.pop();
        }
        let step = match exponent.predecessor() {
            Some(delta) => Ordinal::monomial(delta, BigUint::from(n) + 1u32),
            None => Ordinal::omega_pow(exponent.fundamental(n)?),
        };
        Ok(&base + &step)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Self::monomial(Self::zero(), n)
    }
}

impl From<BigUint> for Ordinal {
    fn from(n: BigUint) -> Self {
        Self::monomial(Self::zero(), n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then_with(|| a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        let Some(head) = rhs.terms.first() else {
            return self.clone();
        };
        // terms of `self` below the leading exponent of `rhs` are absorbed
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= head.exponent)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        match terms.last_mut() {
            Some(last) if last.exponent == head.exponent => {
                last.coefficient += &head.coefficient;
                rest.next();
            }
            _ => {}
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }
}

impl Add for Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: Ordinal) -> Ordinal {
        &self + &rhs
    }
}

impl Mul for &Ordinal {
    type Output = Ordinal;

    fn mul(self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = self.terms.first() else {
            return Ordinal::zero();
        };
        // right factor distributes over its own terms
        rhs.terms.iter().fold(Ordinal::zero(), |acc, t| {
            let part = if t.exponent.is_zero() {
                let mut scaled = self.clone();
                scaled.terms[0].coefficient = &lead.coefficient * &t.coefficient;
                scaled
            } else {
                Ordinal::monomial(&lead.exponent + &t.exponent, t.coefficient.clone())
            };
            &acc + &part
        })
    }
}

impl Mul for Ordinal {
    type Output = Ordinal;

    fn mul(self, rhs: Ordinal) -> Ordinal {
        &self * &rhs
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if t.exponent != Ordinal::one() {
                write!(f, "^({})", t.exponent)?;
            }
            if !t.coefficient.is_one() {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ordinal(s, ParseMode::Normalizing)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
