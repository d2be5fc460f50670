//! Finitely generated abelian groups `Z^d x Z_m1 x ... x Z_mk` with exact
//! element arithmetic.
//!
//! Each coordinate carries a modulus: `0` marks a free integer coordinate,
//! any `m >= 2` marks `Z_m`. Elements are kept in canonical form (modular
//! coordinates reduced into `0..m`), so structural equality is group equality
//! and the derived lexicographic order is a total order on the group.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    moduli: Vec<u64>,
}

/// An element of some [`GroupSpec`], stored in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    coords: Vec<BigInt>,
}

impl GroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if let Some(j) = moduli.iter().position(|&m| m == 1) {
            return Err(Error::InvalidModulus(j));
        }
        Ok(GroupSpec { moduli })
    }

    /// Like [`GroupSpec::new`] but from signed input, so that negative moduli
    /// coming from JSON are reported as `InvalidModulus` rather than a
    /// parse failure.
    pub fn from_signed(moduli: &[i64]) -> Result<Self> {
        let mut out = Vec::with_capacity(moduli.len());
        for (j, &m) in moduli.iter().enumerate() {
            if m < 0 || m == 1 {
                return Err(Error::InvalidModulus(j));
            }
            out.push(m as u64);
        }
        GroupSpec::new(out)
    }

    /// The integers `Z`.
    pub fn integers() -> Self {
        GroupSpec { moduli: vec![0] }
    }

    /// The cyclic group `Z_m`.
    pub fn cyclic(m: u64) -> Result<Self> {
        GroupSpec::new(vec![m])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|&m| m != 0)
    }

    /// Group order, `None` when a free coordinate is present.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.moduli.iter().map(|&m| BigInt::from(m)).product())
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem {
            coords: vec![BigInt::zero(); self.moduli.len()],
        }
    }

    /// Builds an element, reducing modular coordinates.
    pub fn elem<I, T>(&self, coords: I) -> Result<GroupElem>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let coords: Vec<BigInt> = coords.into_iter().map(Into::into).collect();
        self.check_len(coords.len())?;
        let mut e = GroupElem { coords };
        self.reduce(&mut e);
        Ok(e)
    }

    /// Element with `x` in the first coordinate and zeros elsewhere.
    pub fn embed(&self, x: impl Into<BigInt>) -> GroupElem {
        let mut coords = vec![BigInt::zero(); self.moduli.len()];
        coords[0] = x.into();
        let mut e = GroupElem { coords };
        self.reduce(&mut e);
        e
    }

    pub fn canonicalize(&self, a: &GroupElem) -> Result<GroupElem> {
        self.conforms(a)?;
        let mut e = a.clone();
        self.reduce(&mut e);
        Ok(e)
    }

    pub fn is_canonical(&self, a: &GroupElem) -> bool {
        a.coords.len() == self.moduli.len()
            && a.coords.iter().zip(&self.moduli).all(|(c, &m)| {
                m == 0 || (!c.is_negative() && *c < BigInt::from(m))
            })
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.conforms(a)?;
        self.conforms(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn sub(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.conforms(a)?;
        self.conforms(b)?;
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect();
        let mut e = GroupElem { coords };
        self.reduce(&mut e);
        Ok(e)
    }

    pub fn neg(&self, a: &GroupElem) -> Result<GroupElem> {
        self.conforms(a)?;
        let coords = a.coords.iter().map(|x| -x).collect();
        let mut e = GroupElem { coords };
        self.reduce(&mut e);
        Ok(e)
    }

    /// Sum of a list of elements; the empty sum is the identity.
    pub fn sum_tuple<'a, I>(&self, elems: I) -> Result<GroupElem>
    where
        I: IntoIterator<Item = &'a GroupElem>,
    {
        let mut acc = self.identity();
        for e in elems {
            self.conforms(e)?;
            for (x, y) in acc.coords.iter_mut().zip(&e.coords) {
                *x += y;
            }
        }
        self.reduce(&mut acc);
        Ok(acc)
    }

    pub(crate) fn add_unchecked(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        let mut e = GroupElem { coords };
        self.reduce(&mut e);
        e
    }

    fn reduce(&self, e: &mut GroupElem) {
        for (c, &m) in e.coords.iter_mut().zip(&self.moduli) {
            if m != 0 {
                *c = c.mod_floor(&BigInt::from(m));
            }
        }
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.moduli.len() {
            return Err(Error::ShapeMismatch {
                expected: self.moduli.len(),
                got,
            });
        }
        Ok(())
    }

    pub(crate) fn conforms(&self, a: &GroupElem) -> Result<()> {
        self.check_len(a.coords.len())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .moduli
            .iter()
            .map(|&m| if m == 0 { "Z".to_string() } else { format!("Z_{m}") })
            .collect();
        write!(f, "{}", names.join(" x "))
    }
}

impl GroupElem {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// First coordinate as an `i64`, if it fits. Convenience for the common
    /// single-coordinate case.
    pub fn as_i64(&self) -> Option<i64> {
        (self.coords.len() == 1).then(|| self.coords[0].to_i64()).flatten()
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// Integers beyond 2^53 are written as decimal strings so they survive JSON
// readers that parse numbers as doubles.
const JSON_SAFE: i64 = 1 << 53;

impl Serialize for GroupElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            match c.to_i64() {
                Some(v) if v.abs() < JSON_SAFE => seq.serialize_element(&v)?,
                _ => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for GroupElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Coord>::deserialize(d)?;
        let coords = raw
            .into_iter()
            .map(|c| match c {
                Coord::Int(v) => Ok(BigInt::from(v)),
                Coord::Str(s) => s
                    .trim()
                    .parse::<BigInt>()
                    .map_err(|_| serde::de::Error::custom(format!("bad integer {s:?}"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GroupElem { coords })
    }
}

#[derive(Deserialize)]
struct RawSpec {
    moduli: Vec<i64>,
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(d)?;
        GroupSpec::from_signed(&raw.moduli).map_err(serde::de::Error::custom)
    }
}
