//! Finite sets of group elements and their additive statistics.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::group::{GroupElem, GroupSpec};
use crate::histogram::Histogram;
use crate::instance::Instance;

/// A deduplicated set of elements of one group, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElemSet {
    spec: GroupSpec,
    elems: Vec<GroupElem>,
}

impl ElemSet {
    pub fn new<I>(spec: &GroupSpec, elems: I) -> Result<Self>
    where
        I: IntoIterator<Item = GroupElem>,
    {
        let mut v = elems
            .into_iter()
            .map(|e| spec.canonicalize(&e))
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        v.dedup();
        Ok(ElemSet {
            spec: spec.clone(),
            elems: v,
        })
    }

    /// Elements `x` embedded in the first coordinate.
    pub fn from_ints<I>(spec: &GroupSpec, xs: I) -> Self
    where
        I: IntoIterator<Item = i64>,
    {
        let mut v: Vec<_> = xs.into_iter().map(|x| spec.embed(x)).collect();
        v.sort();
        v.dedup();
        ElemSet {
            spec: spec.clone(),
            elems: v,
        }
    }

    pub(crate) fn from_sorted_unchecked(spec: &GroupSpec, elems: Vec<GroupElem>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        ElemSet {
            spec: spec.clone(),
            elems,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn elems(&self) -> &[GroupElem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &GroupElem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn position(&self, e: &GroupElem) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    /// Subset by position.
    pub fn select(&self, idx: &[usize]) -> Result<ElemSet> {
        let picked = idx
            .iter()
            .map(|&i| {
                self.elems
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::IndexOutOfRange(format!("position {i} of {}", self.len())))
            })
            .collect::<Result<Vec<_>>>()?;
        ElemSet::new(&self.spec, picked)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.elems.iter().all(|e| other.contains(e))
    }
}

/// Size, doubling and energy of a set, all exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumStats {
    pub size: usize,
    pub sumset_size: usize,
    #[serde(with = "exact::serde_rational")]
    pub doubling: Rational,
    #[serde(with = "exact::serde_biguint")]
    pub energy: BigUint,
}

pub fn sumset(a: &ElemSet, b: &ElemSet) -> Result<ElemSet> {
    if a.spec != b.spec {
        return Err(Error::SpecMismatch);
    }
    let mut seen: HashSet<GroupElem> = HashSet::with_capacity(a.len() * b.len());
    for x in &a.elems {
        for y in &b.elems {
            seen.insert(a.spec.add_unchecked(x, y));
        }
    }
    let mut v: Vec<_> = seen.into_iter().collect();
    v.sort();
    Ok(ElemSet::from_sorted_unchecked(&a.spec, v))
}

/// `A_1 + ... + A_k` as a left fold.
pub fn iterated_sumset(sets: &[ElemSet]) -> Result<ElemSet> {
    let (first, rest) = sets.split_first().ok_or(Error::EmptySet)?;
    rest.iter().try_fold(first.clone(), |acc, s| sumset(&acc, s))
}

/// Ordered quadruples `(x, y, x', y')` in `A^4` with `x + y = x' + y'`,
/// computed as the sum of squared representation counts.
pub fn additive_energy(a: &ElemSet) -> BigUint {
    let mut reps: HashMap<GroupElem, u64> = HashMap::new();
    for x in &a.elems {
        for y in &a.elems {
            *reps.entry(a.spec.add_unchecked(x, y)).or_default() += 1;
        }
    }
    reps.values()
        .map(|&c| BigUint::from(c) * BigUint::from(c))
        .sum()
}

/// `|A + A| / |A|`.
pub fn doubling_constant(a: &ElemSet) -> Result<Rational> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let s = sumset(a, a)?;
    Ok(exact::rational(s.len() as i64, a.len() as i64))
}

pub fn sum_stats(a: &ElemSet) -> Result<SumStats> {
    let doubling = doubling_constant(a)?;
    let sumset_size = sumset(a, a)?.len();
    Ok(SumStats {
        size: a.len(),
        sumset_size,
        doubling,
        energy: additive_energy(a),
    })
}

/// Sums over the edges of the instance hypergraph only.
pub fn restricted_sumset(inst: &Instance) -> ElemSet {
    let spec = inst.spec();
    let mut seen: HashSet<GroupElem> = HashSet::new();
    for e in inst.hypergraph().edges() {
        seen.insert(inst.edge_sum(e));
    }
    let mut v: Vec<_> = seen.into_iter().collect();
    v.sort();
    ElemSet::from_sorted_unchecked(spec, v)
}

/// Signed representation histogram: the coefficient at `s` counts tuples
/// `(c_1, ..., c_{2r-1})` of elements of `set` with
/// `s = (c_1 + ... + c_{r-1}) - (c_r + ... + c_{2r-2}) + c_{2r-1}`.
pub fn representation_histogram(set: &ElemSet, r: usize, cap: u64) -> Result<Histogram> {
    if r < 2 {
        return Err(Error::ConfigInvalid(format!("representation arity r = {r} < 2")));
    }
    let base = Histogram::indicator(&set.spec, &set.elems, cap)?;
    let mut acc = base.clone();
    for _ in 1..r - 1 {
        acc = acc.convolve(&base, false, cap)?;
    }
    for _ in 0..r - 1 {
        acc = acc.convolve(&base, true, cap)?;
    }
    acc.convolve(&base, false, cap)
}

pub fn representation_count(
    spec: &GroupSpec,
    set: &ElemSet,
    s: &GroupElem,
    r: usize,
    cap: u64,
) -> Result<BigUint> {
    if spec != &set.spec {
        return Err(Error::SpecMismatch);
    }
    representation_histogram(set, r, cap)?.get(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::DEFAULT_CELL_CAP;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn zset(xs: &[i64]) -> ElemSet {
        ElemSet::from_ints(&GroupSpec::integers(), xs.iter().copied())
    }

    fn ints(s: &ElemSet) -> Vec<i64> {
        s.elems().iter().map(|e| e.as_i64().unwrap()).collect()
    }

    /// Quadruple enumeration, independent of the histogram route.
    fn energy_brute(a: &ElemSet) -> u64 {
        let g = a.spec();
        let mut count = 0;
        for x in a.elems() {
            for y in a.elems() {
                let s = g.add(x, y).unwrap();
                for x2 in a.elems() {
                    for y2 in a.elems() {
                        if g.add(x2, y2).unwrap() == s {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    /// Tuple enumeration for the signed representation count.
    fn reps_brute(set: &ElemSet, s: &GroupElem, r: usize) -> u64 {
        let g = set.spec();
        let k = 2 * r - 1;
        let n = set.len();
        let mut idx = vec![0usize; k];
        let mut count = 0;
        loop {
            let mut acc = g.identity();
            for (slot, &i) in idx.iter().enumerate() {
                let c = &set.elems()[i];
                acc = if slot < r - 1 || slot == k - 1 {
                    g.add(&acc, c).unwrap()
                } else {
                    g.sub(&acc, c).unwrap()
                };
            }
            if &acc == s {
                count += 1;
            }
            let mut j = 0;
            loop {
                if j == k {
                    return count;
                }
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(ints(&sumset(&zset(&[0, 1]), &zset(&[0, 1])).unwrap()), vec![0, 1, 2]);
        let n = 7;
        let ap = zset(&(0..n).collect::<Vec<_>>());
        assert_eq!(sumset(&ap, &ap).unwrap().len(), 2 * n as usize - 1);
        let z5 = GroupSpec::cyclic(5).unwrap();
        let full = ElemSet::from_ints(&z5, 0..5);
        let zero = ElemSet::from_ints(&z5, [0]);
        assert_eq!(sumset(&full, &zero).unwrap(), full);
        assert_eq!(sumset(&full, &zset(&[0])), Err(Error::SpecMismatch));
    }

    #[test]
    fn iterated_sumset_examples() {
        let s = zset(&[0, 1]);
        let three = iterated_sumset(&[s.clone(), s.clone(), s]).unwrap();
        assert_eq!(ints(&three), vec![0, 1, 2, 3]);
        let ap = zset(&[0, 1, 2, 3, 4]);
        assert_eq!(iterated_sumset(std::slice::from_ref(&ap)).unwrap(), ap);
        let z4 = GroupSpec::cyclic(4).unwrap();
        let sub = ElemSet::from_ints(&z4, [0, 2]);
        assert_eq!(iterated_sumset(&[sub.clone(), sub.clone()]).unwrap(), sub);
        assert_eq!(iterated_sumset(&[]), Err(Error::EmptySet));
    }

    #[test]
    fn energy_examples() {
        assert_eq!(additive_energy(&zset(&[0])), BigUint::from(1u32));
        // 81 quadruples enumerated by the oracle.
        assert_eq!(energy_brute(&zset(&[0, 1, 2])), 19);
        assert_eq!(additive_energy(&zset(&[0, 1, 2])), BigUint::from(19u32));
        assert_eq!(energy_brute(&zset(&[0, 1, 2, 3])), 44);
        assert_eq!(additive_energy(&zset(&[0, 1, 2, 3])), BigUint::from(44u32));
    }

    #[test]
    fn doubling_examples() {
        let ap = zset(&(0..10).collect::<Vec<_>>());
        assert_eq!(doubling_constant(&ap).unwrap(), exact::rational(19, 10));
        let z5 = GroupSpec::cyclic(5).unwrap();
        assert_eq!(
            doubling_constant(&ElemSet::from_ints(&z5, 0..5)).unwrap(),
            exact::int(1)
        );
        // {1,2,5,11}: pairwise sums 2,3,4,6,7,10,12,13,16,22 are all distinct.
        let sidon = zset(&[1, 2, 5, 11]);
        assert_eq!(sumset(&sidon, &sidon).unwrap().len(), 10);
        assert_eq!(doubling_constant(&sidon).unwrap(), exact::rational(10, 4));
        assert_eq!(additive_energy(&sidon), BigUint::from(2 * 16u32 - 4));
        assert_eq!(doubling_constant(&zset(&[])), Err(Error::EmptySet));
    }

    #[test]
    fn representation_examples() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        let s01 = ElemSet::from_ints(&z5, [0, 1]);
        assert_eq!(reps_brute(&s01, &z5.embed(0), 2), 3);
        assert_eq!(
            representation_count(&z5, &s01, &z5.embed(0), 2, DEFAULT_CELL_CAP).unwrap(),
            BigUint::from(3u32)
        );
        for r in 2..5 {
            let id = ElemSet::from_ints(&z5, [0]);
            assert_eq!(
                representation_count(&z5, &id, &z5.embed(0), r, DEFAULT_CELL_CAP).unwrap(),
                BigUint::from(1u32)
            );
            assert_eq!(
                representation_count(&z5, &id, &z5.embed(3), r, DEFAULT_CELL_CAP).unwrap(),
                BigUint::from(0u32)
            );
        }
        let full = ElemSet::from_ints(&z5, 0..5);
        for s in 0..5 {
            assert_eq!(reps_brute(&full, &z5.embed(s), 2), 25);
            assert_eq!(
                representation_count(&z5, &full, &z5.embed(s), 2, DEFAULT_CELL_CAP).unwrap(),
                BigUint::from(25u32)
            );
        }
    }

    #[test]
    fn restricted_sumset_examples() {
        let g = GroupSpec::integers();
        let part = vec![g.embed(0), g.embed(1), g.embed(2)];
        let diag = Instance::new(
            g.clone(),
            vec![part.clone(), part.clone()],
            vec![vec![0, 0], vec![1, 1], vec![2, 2]],
        )
        .unwrap();
        assert_eq!(ints(&restricted_sumset(&diag)), vec![0, 2, 4]);
        let complete = Instance::complete(g.clone(), vec![part.clone(), part.clone()]).unwrap();
        let parts = complete.parts().to_vec();
        assert_eq!(restricted_sumset(&complete), iterated_sumset(&parts).unwrap());
        let single = Instance::new(g, vec![part.clone(), part], vec![vec![1, 2]]).unwrap();
        assert_eq!(ints(&restricted_sumset(&single)), vec![3]);
    }

    fn small_set() -> impl Strategy<Value = ElemSet> {
        prop_oneof![
            proptest::collection::vec(-40i64..40, 1..30)
                .prop_map(|xs| ElemSet::from_ints(&GroupSpec::integers(), xs)),
            proptest::collection::vec(0i64..13, 1..13)
                .prop_map(|xs| ElemSet::from_ints(&GroupSpec::cyclic(13).unwrap(), xs)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn energy_matches_enumeration_and_bounds(a in small_set()) {
            let e = additive_energy(&a);
            let n = a.len() as u64;
            prop_assert_eq!(e.to_u64().unwrap(), energy_brute(&a));
            prop_assert!(e >= BigUint::from(n * n));
            prop_assert!(e <= BigUint::from(n * n * n));
        }

        #[test]
        fn representation_total_and_oracle(xs in proptest::collection::vec(0i64..11, 1..6), r in 2usize..4) {
            let g = GroupSpec::cyclic(11).unwrap();
            let set = ElemSet::from_ints(&g, xs);
            let h = representation_histogram(&set, r, DEFAULT_CELL_CAP).unwrap();
            let n = BigUint::from(set.len());
            prop_assert_eq!(h.total(), n.pow(2 * r as u32 - 1));
            if set.len().pow(2 * r as u32 - 1) <= 200_000 {
                for s in [0i64, 3, 7] {
                    let s = g.embed(s);
                    prop_assert_eq!(h.get(&s).unwrap(), BigUint::from(reps_brute(&set, &s, r)));
                }
            }
        }

        #[test]
        fn representation_over_integers(xs in proptest::collection::vec(-6i64..6, 1..5)) {
            let g = GroupSpec::integers();
            let set = ElemSet::from_ints(&g, xs);
            let h = representation_histogram(&set, 2, DEFAULT_CELL_CAP).unwrap();
            prop_assert_eq!(h.total(), BigUint::from(set.len()).pow(3));
            for (s, c) in h.entries() {
                prop_assert_eq!(c, BigUint::from(reps_brute(&set, &s, 2)));
            }
        }
    }
}
