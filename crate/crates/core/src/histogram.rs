//! Dense exact histograms over a box of group elements, with schoolbook
//! convolution.
//!
//! Modular coordinates occupy their full cycle `0..m`; free coordinates
//! occupy the exact interval of attainable values, which grows by Minkowski
//! addition under convolution. Counters are big integers.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupElem, GroupSpec};

/// Default cap on the number of histogram cells.
pub const DEFAULT_CELL_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Axis {
    Modular(u64),
    Interval { lo: BigInt, len: u64 },
}

impl Axis {
    fn len(&self) -> u64 {
        match self {
            Axis::Modular(m) => *m,
            Axis::Interval { len, .. } => *len,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Histogram {
    spec: GroupSpec,
    axes: Vec<Axis>,
    cells: Vec<BigUint>,
}

impl Histogram {
    /// Indicator histogram of `elems` (multiplicities are summed).
    pub fn indicator(spec: &GroupSpec, elems: &[GroupElem], cap: u64) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut axes = Vec::with_capacity(spec.rank());
        for (j, &m) in spec.moduli().iter().enumerate() {
            if m != 0 {
                axes.push(Axis::Modular(m));
            } else {
                let lo = elems.iter().map(|e| &e.coords()[j]).min().unwrap().clone();
                let hi = elems.iter().map(|e| &e.coords()[j]).max().unwrap();
                let len = (hi - &lo + 1u32)
                    .to_u64()
                    .ok_or_else(|| Error::UnsupportedGroup("coordinate span overflow".into()))?;
                axes.push(Axis::Interval { lo, len });
            }
        }
        let size = cell_count(&axes, cap)?;
        let mut h = Histogram {
            spec: spec.clone(),
            axes,
            cells: vec![BigUint::zero(); size],
        };
        for e in elems {
            spec.conforms(e)?;
            let idx = h.index_of(e).expect("element inside its own bounding box");
            h.cells[idx] += 1u32;
        }
        Ok(h)
    }

    /// `self * other`, or `self * (-other)` when `negate_other` is set.
    pub fn convolve(&self, other: &Histogram, negate_other: bool, cap: u64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let axes: Vec<Axis> = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| match (a, b) {
                (Axis::Modular(m), _) => Axis::Modular(*m),
                (Axis::Interval { lo: la, len: na }, Axis::Interval { lo: lb, len: nb }) => {
                    let lo_b = if negate_other {
                        -(lb + BigInt::from(*nb - 1))
                    } else {
                        lb.clone()
                    };
                    Axis::Interval {
                        lo: la + lo_b,
                        len: na + nb - 1,
                    }
                }
                _ => unreachable!("axes follow the shared spec"),
            })
            .collect();
        let size = cell_count(&axes, cap)?;
        let mut out = vec![BigUint::zero(); size];

        let lhs = self.support();
        let rhs = other.support();
        let mut pos = vec![0u64; axes.len()];
        for (ia, va) in &lhs {
            for (ib, vb) in &rhs {
                for (k, axis) in axes.iter().enumerate() {
                    let (a, b) = (ia[k], ib[k]);
                    pos[k] = match (axis, &other.axes[k]) {
                        (Axis::Modular(m), _) => {
                            let b = if negate_other { (m - b) % m } else { b };
                            (a + b) % m
                        }
                        (Axis::Interval { .. }, Axis::Interval { len: nb, .. }) => {
                            a + if negate_other { nb - 1 - b } else { b }
                        }
                        _ => unreachable!(),
                    };
                }
                let idx = flat_index(&axes, &pos);
                out[idx] += *va * *vb;
            }
        }
        Ok(Histogram {
            spec: self.spec.clone(),
            axes,
            cells: out,
        })
    }

    /// Coefficient at `s`; zero outside the box.
    pub fn get(&self, s: &GroupElem) -> Result<BigUint> {
        self.spec.conforms(s)?;
        let s = self.spec.canonicalize(s)?;
        Ok(self
            .index_of(&s)
            .map(|i| self.cells[i].clone())
            .unwrap_or_default())
    }

    pub fn total(&self) -> BigUint {
        self.cells.iter().sum()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Non-zero entries as `(element, count)` in canonical element order.
    pub fn entries(&self) -> Vec<(GroupElem, BigUint)> {
        let mut out: Vec<(GroupElem, BigUint)> = self
            .support()
            .into_iter()
            .map(|(pos, v)| (self.elem_at(&pos), v.clone()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn support(&self) -> Vec<(Vec<u64>, &BigUint)> {
        let mut out = Vec::new();
        let mut pos = vec![0u64; self.axes.len()];
        for (idx, v) in self.cells.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let mut rem = idx as u64;
            for k in (0..self.axes.len()).rev() {
                let n = self.axes[k].len();
                pos[k] = rem % n;
                rem /= n;
            }
            out.push((pos.clone(), v));
        }
        out
    }

    fn elem_at(&self, pos: &[u64]) -> GroupElem {
        let coords: Vec<BigInt> = self
            .axes
            .iter()
            .zip(pos)
            .map(|(axis, &p)| match axis {
                Axis::Modular(_) => BigInt::from(p),
                Axis::Interval { lo, .. } => lo + BigInt::from(p),
            })
            .collect();
        self.spec.elem(coords).expect("shape matches spec")
    }

    fn index_of(&self, e: &GroupElem) -> Option<usize> {
        let mut pos = Vec::with_capacity(self.axes.len());
        for (axis, c) in self.axes.iter().zip(e.coords()) {
            let p = match axis {
                Axis::Modular(_) => c.to_u64()?,
                Axis::Interval { lo, len } => {
                    let off = (c - lo).to_u64()?;
                    if off >= *len {
                        return None;
                    }
                    off
                }
            };
            pos.push(p);
        }
        Some(flat_index(&self.axes, &pos))
    }
}

fn flat_index(axes: &[Axis], pos: &[u64]) -> usize {
    let mut idx = 0u64;
    for (axis, &p) in axes.iter().zip(pos) {
        idx = idx * axis.len() + p;
    }
    idx as usize
}

fn cell_count(axes: &[Axis], cap: u64) -> Result<usize> {
    let mut total: u64 = 1;
    for a in axes {
        total = total
            .checked_mul(a.len())
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                Error::UnsupportedGroup(format!("histogram box exceeds the cell cap {cap}"))
            })?;
    }
    Ok(total as usize)
}
