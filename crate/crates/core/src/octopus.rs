//! Legs and octopuses.
//!
//! An `i`-th leg on `(v, w)` (both in part `i`) is a tuple `u` over the other
//! parts such that inserting either `v` or `w` at coordinate `i` yields an
//! edge; the number of legs is the codegree of `v` and `w` in the flattening
//! of part `i`. An octopus supported on `(v_1, ..., v_r)` picks mates
//! `w_i != v_i` for the first `r - 1` parts with `(w_1, ..., w_{r-1}, v_r)`
//! an edge, plus one leg on each `(v_i, w_i)`.
//!
//! Three counters live here:
//!
//! * [`octopus_count_relaxed`]: the product formula, summing over closing
//!   edges the product of leg counts. Legs may overlap.
//! * [`octopus_count_exact`] with [`Disjointness::NamedOnly`]: legs are
//!   pairwise vertex-disjoint; leg fills may still meet `v_r`.
//! * [`octopus_count_exact`] with [`Disjointness::Full`]: additionally no
//!   leg fill vertex coincides with `v_r`.
//!
//! On every hypergraph `full <= named-only <= relaxed`.

use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::exact::{self, Rational};
use crate::group::GroupElem;
use crate::hypergraph::{Bipartite, PartiteHypergraph};
use crate::instance::Instance;

/// Default cap on candidate witnesses for exact enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disjointness {
    NamedOnly,
    Full,
}

impl std::str::FromStr for Disjointness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "named-only" => Ok(Disjointness::NamedOnly),
            "full" => Ok(Disjointness::Full),
            _ => Err(Error::Parse(format!("disjointness mode {s:?}"))),
        }
    }
}

/// One octopus. `leg_fill[i]` lists the leg's vertices in the parts other
/// than `i`, in part order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctopusWitness {
    pub support: Vec<usize>,
    pub mates: Vec<usize>,
    pub leg_fill: Vec<Vec<usize>>,
}

impl OctopusWitness {
    /// The two edges of leg `i`: through `v_i` and through `w_i`.
    pub fn leg_edges(&self, i: usize) -> (Vec<usize>, Vec<usize>) {
        let mut through_v = self.leg_fill[i].clone();
        through_v.insert(i, self.support[i]);
        let mut through_w = self.leg_fill[i].clone();
        through_w.insert(i, self.mates[i]);
        (through_v, through_w)
    }

    pub fn closing_edge(&self) -> Vec<usize> {
        let mut e = self.mates.clone();
        e.push(*self.support.last().expect("non-empty support"));
        e
    }

    /// The vertex of leg `i` in part `j` (`j != i`).
    pub fn fill_at(&self, i: usize, j: usize) -> usize {
        debug_assert_ne!(i, j);
        self.leg_fill[i][if j < i { j } else { j - 1 }]
    }

    /// Checks edge membership and the disjointness rules of `mode`.
    pub fn is_valid(&self, h: &PartiteHypergraph, mode: Disjointness) -> bool {
        let r = h.r();
        if self.support.len() != r || self.mates.len() != r - 1 || self.leg_fill.len() != r - 1 {
            return false;
        }
        if !h.contains_positions(&self.closing_edge()) {
            return false;
        }
        for i in 0..r - 1 {
            if self.mates[i] == self.support[i] {
                return false;
            }
            let (a, b) = self.leg_edges(i);
            if !h.contains_positions(&a) || !h.contains_positions(&b) {
                return false;
            }
        }
        for i in 0..r - 1 {
            for k in 0..r - 1 {
                if k == i {
                    continue;
                }
                let u = self.fill_at(i, k);
                if u == self.support[k] || u == self.mates[k] {
                    return false;
                }
                if k < i {
                    for j in 0..r {
                        if j != i && j != k && self.fill_at(i, j) == self.fill_at(k, j) {
                            return false;
                        }
                    }
                }
            }
            if mode == Disjointness::Full && self.fill_at(i, r - 1) == self.support[r - 1] {
                return false;
            }
        }
        true
    }

    /// The representation of the support sum as
    /// `(x_1 + ... + x_{r-1}) - (y_1 + ... + y_{r-1}) + z`, where `x_i` and
    /// `y_i` are the sums of the two edges of leg `i` and `z` is the sum of
    /// the closing edge. Each of them lies in the restricted sumset.
    pub fn representation(&self, inst: &Instance) -> (Vec<GroupElem>, Vec<GroupElem>, GroupElem) {
        let r = self.support.len();
        let mut xs = Vec::with_capacity(r - 1);
        let mut ys = Vec::with_capacity(r - 1);
        for i in 0..r - 1 {
            let (a, b) = self.leg_edges(i);
            xs.push(inst.tuple_sum(&a));
            ys.push(inst.tuple_sum(&b));
        }
        (xs, ys, inst.tuple_sum(&self.closing_edge()))
    }
}

/// Leg counts with a shared, symmetric cache. Safe to use from several
/// threads; concurrent inserts of the same key store the same value.
pub struct LegCounter<'a> {
    graph: &'a PartiteHypergraph,
    flats: Vec<Arc<Bipartite>>,
    cache: DashMap<(u32, u32, u32), u64>,
}

impl<'a> LegCounter<'a> {
    pub fn new(graph: &'a PartiteHypergraph) -> Self {
        let flats = (0..graph.r())
            .map(|i| graph.flatten_bipartite(i).expect("part in range"))
            .collect();
        LegCounter {
            graph,
            flats,
            cache: DashMap::new(),
        }
    }

    pub fn graph(&self) -> &'a PartiteHypergraph {
        self.graph
    }

    pub fn flattening(&self, part: usize) -> &Bipartite {
        &self.flats[part]
    }

    /// Number of legs on `(v, w)` in `part`. `v == w` is allowed here and
    /// yields the degree; the public [`leg_count`] rejects it.
    pub fn count(&self, part: usize, v: usize, w: usize) -> Result<u64> {
        if part >= self.flats.len() {
            return Err(out_of_range(format!("part {part}")));
        }
        let (a, b) = if v <= w { (v, w) } else { (w, v) };
        let key = (part as u32, a as u32, b as u32);
        if let Some(c) = self.cache.get(&key) {
            return Ok(*c);
        }
        let c = self.flats[part].codegree(a, b)? as u64;
        self.cache.insert(key, c);
        Ok(c)
    }
}

pub fn leg_count(h: &PartiteHypergraph, part: usize, v: usize, w: usize) -> Result<u64> {
    if v == w {
        return Err(Error::SameVertex);
    }
    LegCounter::new(h).count(part, v, w)
}

fn check_support(h: &PartiteHypergraph, support: &[usize]) -> Result<()> {
    if support.len() != h.r() {
        return Err(Error::ArityMismatch {
            expected: h.r(),
            got: support.len(),
        });
    }
    for (i, &v) in support.iter().enumerate() {
        h.degree(i, v)?;
    }
    Ok(())
}

/// Sum over closing edges `(w, v_r)` with `w_i != v_i` of
/// `prod_i legs_i(v_i, w_i)`.
pub fn octopus_count_relaxed(h: &PartiteHypergraph, support: &[usize]) -> Result<BigUint> {
    relaxed_with(&LegCounter::new(h), support)
}

pub(crate) fn relaxed_with(legs: &LegCounter<'_>, support: &[usize]) -> Result<BigUint> {
    let h = legs.graph();
    check_support(h, support)?;
    let r = h.r();
    let last = r - 1;
    let mut total = BigUint::zero();
    'edges: for &id in h.incident_edges(last, support[last])? {
        let e = h.edge(id as usize);
        let mut prod = BigUint::one();
        for i in 0..last {
            let w = e[i] as usize;
            if w == support[i] {
                continue 'edges;
            }
            let c = legs.count(i, support[i], w)?;
            if c == 0 {
                continue 'edges;
            }
            prod *= c;
        }
        total += prod;
    }
    Ok(total)
}

/// Exact number of octopuses under `mode`. The relaxed count is the number
/// of candidates examined, so it is checked against `budget` first.
pub fn octopus_count_exact(
    h: &PartiteHypergraph,
    support: &[usize],
    mode: Disjointness,
    budget: u64,
) -> Result<BigUint> {
    let n = for_each_witness(h, support, mode, budget, |_| {})?;
    Ok(BigUint::from(n))
}

/// Enumerates every octopus on `support` under `mode`, calling `f` on each.
/// Returns the number of witnesses.
pub fn for_each_witness(
    h: &PartiteHypergraph,
    support: &[usize],
    mode: Disjointness,
    budget: u64,
    mut f: impl FnMut(&OctopusWitness),
) -> Result<u64> {
    let legs = LegCounter::new(h);
    let estimate = relaxed_with(&legs, support)?;
    if estimate > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            estimate: estimate.to_string(),
            budget,
        });
    }
    let r = h.r();
    let last = r - 1;
    let mut count = 0u64;
    let mut witness = OctopusWitness {
        support: support.to_vec(),
        mates: vec![0; last],
        leg_fill: vec![Vec::new(); last],
    };
    for &id in h.incident_edges(last, support[last])? {
        let e = h.edge(id as usize);
        if (0..last).any(|i| e[i] as usize == support[i]) {
            continue;
        }
        for i in 0..last {
            witness.mates[i] = e[i] as usize;
        }
        let mut options: Vec<Vec<&[u32]>> = Vec::with_capacity(last);
        for i in 0..last {
            let flat = legs.flattening(i);
            let common = flat.common_neighbors(support[i], witness.mates[i])?;
            let labels = flat.right_labels();
            let opts: Vec<&[u32]> = common
                .into_iter()
                .map(|z| &*labels[z as usize])
                .filter(|fill| fill_avoids_named(fill, i, &witness, mode))
                .collect();
            if opts.is_empty() {
                break;
            }
            options.push(opts);
        }
        if options.len() < last {
            continue;
        }
        choose_legs(0, &options, &mut witness, &mut count, &mut f);
    }
    Ok(count)
}

/// Constraints on a single leg fill: it avoids the named vertices of the
/// other legs, and under `Full` it avoids `v_r`.
fn fill_avoids_named(fill: &[u32], i: usize, w: &OctopusWitness, mode: Disjointness) -> bool {
    let r = w.support.len();
    for (slot, &u) in fill.iter().enumerate() {
        let part = if slot < i { slot } else { slot + 1 };
        let u = u as usize;
        if part < r - 1 {
            if u == w.support[part] || u == w.mates[part] {
                return false;
            }
        } else if mode == Disjointness::Full && u == w.support[r - 1] {
            return false;
        }
    }
    true
}

fn choose_legs(
    i: usize,
    options: &[Vec<&[u32]>],
    witness: &mut OctopusWitness,
    count: &mut u64,
    f: &mut impl FnMut(&OctopusWitness),
) {
    if i == options.len() {
        *count += 1;
        f(witness);
        return;
    }
    let r = witness.support.len();
    'fills: for fill in &options[i] {
        // Fills of distinct legs must not share a vertex in any part that
        // neither leg is centred on.
        for k in 0..i {
            for j in 0..r {
                if j == i || j == k {
                    continue;
                }
                let mine = fill[if j < i { j } else { j - 1 }] as usize;
                if mine == witness.fill_at(k, j) {
                    continue 'fills;
                }
            }
        }
        witness.leg_fill[i] = fill.iter().map(|&u| u as usize).collect();
        choose_legs(i + 1, options, witness, count, f);
    }
}

/// Leg-count threshold for an ε-good pair in `part` (0-based):
/// `ε / (2^{r²} K^{part+2}) · prod_{j != part} ambient[j]`.
pub fn eps_good_threshold(part: usize, eps: &Rational, k: &Rational, ambient: &[usize]) -> Rational {
    let r = ambient.len() as u32;
    let others: BigUint = ambient
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != part)
        .map(|(_, &s)| BigUint::from(s))
        .product();
    let denom = Rational::from_integer(BigUint::from(2u32).pow(r * r).into())
        * exact::pow_rational(k, part as u32 + 2);
    eps / denom * Rational::from_integer(others.into())
}

#[allow(clippy::too_many_arguments)]
fn check_eps_params(eps: &Rational, k: &Rational, ambient: &[usize], h: &PartiteHypergraph) -> Result<()> {
    if *eps <= exact::int(0) || *eps >= exact::int(1) {
        return Err(Error::ConfigInvalid(format!("ε = {} outside (0, 1)", exact::fmt_rational(eps))));
    }
    if *k < exact::int(1) {
        return Err(Error::ConfigInvalid(format!("K = {} below 1", exact::fmt_rational(k))));
    }
    if ambient.len() != h.r() {
        return Err(Error::ArityMismatch {
            expected: h.r(),
            got: ambient.len(),
        });
    }
    Ok(())
}

/// Whether `(v, w)` in `part` has at least the ε-good number of legs, with
/// the threshold taken over the `ambient` part sizes.
pub fn is_eps_good(
    h: &PartiteHypergraph,
    part: usize,
    v: usize,
    w: usize,
    eps: &Rational,
    k: &Rational,
    ambient: &[usize],
) -> Result<bool> {
    if v == w {
        return Err(Error::SameVertex);
    }
    check_eps_params(eps, k, ambient, h)?;
    let c = leg_count(h, part, v, w)?;
    Ok(exact::nat_ge(&BigUint::from(c), &eps_good_threshold(part, eps, k, ambient)))
}

/// Whether at least `(1 - ε')|U|` of the vertices `w` in `U`, `w != v`,
/// form ε-good pairs with `v`.
#[allow(clippy::too_many_arguments)]
pub fn is_good_vertex(
    h: &PartiteHypergraph,
    part: usize,
    v: usize,
    u_set: &[usize],
    eps: &Rational,
    eps_prime: &Rational,
    k: &Rational,
    ambient: &[usize],
) -> Result<bool> {
    check_eps_params(eps, k, ambient, h)?;
    if *eps_prime < exact::int(0) || *eps_prime >= exact::int(1) {
        return Err(Error::ConfigInvalid("ε' outside [0, 1)".into()));
    }
    let legs = LegCounter::new(h);
    let threshold = eps_good_threshold(part, eps, k, ambient);
    let mut good = 0usize;
    for &w in u_set {
        if w == v {
            continue;
        }
        let c = legs.count(part, v, w)?;
        if exact::nat_ge(&BigUint::from(c), &threshold) {
            good += 1;
        }
    }
    let need = (exact::int(1) - eps_prime) * exact::int(u_set.len() as i64);
    Ok(exact::int(good as i64) >= need)
}
