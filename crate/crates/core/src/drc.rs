//! Dependent random choice and the iterate step built on it.
//!
//! [`drc_extract`] looks for a left set `U` that is large and in which almost
//! every ordered pair has many common neighbours. The search is deterministic:
//! pivots are scanned in descending degree and each neighbourhood is repaired
//! by greedy deletion if needed. Averaging over a uniform pivot shows that
//! some neighbourhood already meets both conditions whenever the density
//! precondition holds, so the scan always succeeds on valid input. Every
//! returned outcome has been checked.

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, fmt_rational, serde_rational, Rational};
use crate::hypergraph::{Bipartite, PartiteHypergraph};
use crate::settings::PivotOrder;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrcOutcome {
    /// Index of the pivot among the materialized right vertices.
    pub pivot: usize,
    /// Greedy deletions applied to the pivot's neighbourhood.
    pub deletions: usize,
    /// Left vertices, ascending.
    pub u: Vec<usize>,
    #[serde(with = "serde_rational")]
    pub bad_pair_fraction: Rational,
    #[serde(with = "serde_rational")]
    pub codegree_threshold: Rational,
}

impl DrcOutcome {
    pub fn deletion_repaired(&self) -> bool {
        self.deletions > 0
    }
}

fn check_unit_interval(eps: &Rational) -> Result<()> {
    if *eps <= exact::int(0) || *eps >= exact::int(1) {
        return Err(Error::ConfigInvalid(format!("ε = {} outside (0, 1)", fmt_rational(eps))));
    }
    Ok(())
}

fn right_size_rational(g: &Bipartite) -> Rational {
    Rational::from_integer(BigInt::from(g.right_size().clone()))
}

/// Ordered pairs `(v, w)` of left vertices (including `v == w`) whose
/// codegree is below `min`, as bitset rows.
struct BadPairs {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BadPairs {
    fn new(g: &Bipartite, min: u64) -> Self {
        let n = g.left_size();
        let words = n.div_ceil(64).max(1);
        let rows = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut row = vec![0u64; words];
                for w in 0..n {
                    let c = g.codegree(v, w).expect("left vertex") as u64;
                    if c < min {
                        row[w / 64] |= 1 << (w % 64);
                    }
                }
                row
            })
            .collect();
        BadPairs { words, rows }
    }

    fn get(&self, v: usize, w: usize) -> bool {
        self.rows[v][w / 64] >> (w % 64) & 1 == 1
    }

    fn count_within(&self, u: &[usize]) -> u64 {
        let mut mask = vec![0u64; self.words];
        for &w in u {
            mask[w / 64] |= 1 << (w % 64);
        }
        u.iter()
            .map(|&v| {
                self.rows[v]
                    .iter()
                    .zip(&mask)
                    .map(|(a, b)| (a & b).count_ones() as u64)
                    .sum::<u64>()
            })
            .sum()
    }
}

/// `bad <= ε |U|²`, exactly.
fn fraction_ok(bad: u64, size: usize, eps: &Rational) -> bool {
    let lhs = Rational::from_integer(BigInt::from(bad));
    lhs <= eps * exact::int(size as u64 * size as u64)
}

fn bad_fraction(bad: u64, size: usize) -> Rational {
    if size == 0 {
        return exact::int(0);
    }
    Rational::new(BigInt::from(bad), BigInt::from(size as u64 * size as u64))
}

pub fn drc_extract(g: &Bipartite, k: &Rational, eps: &Rational) -> Result<DrcOutcome> {
    drc_extract_with(g, k, eps, PivotOrder::DegreeScan)
}

pub fn drc_extract_with(g: &Bipartite, k: &Rational, eps: &Rational, order: PivotOrder) -> Result<DrcOutcome> {
    check_unit_interval(eps)?;
    if *k <= exact::int(0) {
        return Err(Error::ConfigInvalid(format!("K = {} must be positive", fmt_rational(k))));
    }
    let n = g.left_size();
    let b = right_size_rational(g);
    let volume = exact::int(n as u64) * &b;
    if exact::int(g.edge_count() as u64) * k < volume || n == 0 {
        return Err(Error::DensityTooLow(format!(
            "{} edges, need |A||B|/K = {}",
            g.edge_count(),
            fmt_rational(&(volume / k))
        )));
    }
    let min_size = exact::int(n as u64) / (exact::int(2) * k);
    let codegree_threshold = eps * &b / (exact::int(2) * k * k);
    let min_codegree = exact::to_u64_saturating(&exact::ceil_to_biguint(&codegree_threshold));
    let bad = BadPairs::new(g, min_codegree);

    let mut pivots: Vec<usize> = (0..g.materialized_right()).collect();
    match order {
        PivotOrder::DegreeScan => {
            pivots.sort_by_key(|&z| (std::cmp::Reverse(g.right_neighbors(z).map_or(0, <[u32]>::len)), z));
        }
        PivotOrder::Random { seed } => pivots.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }

    for z in pivots {
        let mut u: Vec<usize> = g.right_neighbors(z)?.iter().map(|&v| v as usize).collect();
        if !exact::nat_ge(&BigUint::from(u.len()), &min_size) {
            continue;
        }
        let mut row_bad: Vec<u64> = u
            .iter()
            .map(|&v| u.iter().filter(|&&w| bad.get(v, w)).count() as u64)
            .collect();
        let mut total: u64 = row_bad.iter().sum();
        let mut deletions = 0;
        loop {
            if fraction_ok(total, u.len(), eps) {
                debug_assert_eq!(total, bad.count_within(&u));
                return Ok(DrcOutcome {
                    pivot: z,
                    deletions,
                    bad_pair_fraction: bad_fraction(total, u.len()),
                    u,
                    codegree_threshold,
                });
            }
            if !exact::nat_ge(&BigUint::from(u.len() - 1), &min_size) {
                break;
            }
            // Remove the vertex in the most bad ordered pairs; the first
            // one wins ties.
            let participation = |idx: usize| 2 * row_bad[idx] - u64::from(bad.get(u[idx], u[idx]));
            let worst = (0..u.len())
                .max_by_key(|&idx| (participation(idx), std::cmp::Reverse(idx)))
                .expect("non-empty");
            total -= participation(worst);
            let gone = u.remove(worst);
            row_bad.remove(worst);
            for (idx, &w) in u.iter().enumerate() {
                row_bad[idx] -= u64::from(bad.get(w, gone));
            }
            deletions += 1;
        }
    }
    Err(Error::NoWitness(format!(
        "no pivot neighbourhood of size >= {} with bad fraction <= {}",
        fmt_rational(&min_size),
        fmt_rational(eps)
    )))
}

/// Outcome of one iterate step on part `part`.
#[derive(Debug, Clone)]
pub struct IterateOutcome {
    /// The selected set, as positions of the part.
    pub u: Vec<usize>,
    /// Left vertices surviving the degree pruning, ascending.
    pub kept: Vec<usize>,
    /// The pruned flattening the pivot search ran on.
    pub pruned: Bipartite,
    /// `|Z| / (2K)`.
    pub degree_threshold: Rational,
    /// `|V'||Z| / |E(G')|`.
    pub k_prime: Rational,
    /// `ε|Z| / (2K²)`.
    pub leg_threshold: Rational,
    /// Fraction of ordered pairs of `u` below the leg threshold.
    pub bad_pair_fraction: Rational,
    pub drc: DrcOutcome,
}

/// Flattens `part`, prunes low-degree vertices, runs dependent random
/// choice with the pruned density, and verifies that the result is large,
/// that almost all of its ordered pairs carry many legs, and that all of
/// its vertices have large degree.
pub fn iterate_extract(
    h: &PartiteHypergraph,
    part: usize,
    k: &Rational,
    eps: &Rational,
    order: PivotOrder,
) -> Result<IterateOutcome> {
    check_unit_interval(eps)?;
    let density = h.density()?;
    if density * k < exact::int(1) {
        return Err(Error::DensityTooLow(format!(
            "{} edges, need prod|V_i|/K = {}",
            h.edge_count(),
            fmt_rational(&(Rational::from_integer(h.volume().into()) / k))
        )));
    }
    let flat = h.flatten_bipartite(part)?;
    let z = right_size_rational(&flat);
    let degree_threshold = &z / (exact::int(2) * k);
    let kept: Vec<usize> = (0..flat.left_size())
        .filter(|&v| exact::nat_ge(&BigUint::from(flat.degree(v).expect("in range")), &degree_threshold))
        .collect();
    let pruned = flat.restrict_left(&kept)?;
    if pruned.edge_count() == 0 {
        return Err(Error::PostconditionFailed("pruning removed every edge".into()));
    }
    let k_prime = exact::int(kept.len() as u64) * &z / exact::int(pruned.edge_count() as u64);
    let drc = drc_extract_with(&pruned, &k_prime, eps, order)?;
    let u: Vec<usize> = drc.u.iter().map(|&i| kept[i]).collect();

    let n = flat.left_size();
    let leg_threshold = eps * &z / (exact::int(2) * k * k);
    if exact::int(u.len() as u64) * exact::int(4) * k < exact::int(n as u64) {
        return Err(Error::PostconditionFailed(format!(
            "|U| = {} below |V|/(4K) = {}",
            u.len(),
            fmt_rational(&(exact::int(n as u64) / (exact::int(4) * k)))
        )));
    }
    let min_legs = exact::to_u64_saturating(&exact::ceil_to_biguint(&leg_threshold));
    let mut bad = 0u64;
    for &v in &u {
        for &w in &u {
            if (flat.codegree(v, w)? as u64) < min_legs {
                bad += 1;
            }
        }
    }
    if !fraction_ok(bad, u.len(), eps) {
        return Err(Error::PostconditionFailed(format!(
            "{bad} of {} ordered pairs have fewer than {} legs",
            u.len() * u.len(),
            fmt_rational(&leg_threshold)
        )));
    }
    for &v in &u {
        if !exact::nat_ge(&BigUint::from(flat.degree(v)?), &degree_threshold) {
            return Err(Error::PostconditionFailed(format!("vertex {v} has low degree")));
        }
    }
    Ok(IterateOutcome {
        bad_pair_fraction: bad_fraction(bad, u.len()),
        u,
        kept,
        pruned,
        degree_threshold,
        k_prime,
        leg_threshold,
        drc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};

    fn knn_minus_matching(n: usize) -> Bipartite {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        Bipartite::new(n, n, &pairs).unwrap()
    }

    #[test]
    fn complete_bipartite_keeps_everything() {
        let pairs: Vec<_> = (0..5).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
        let g = Bipartite::new(5, 4, &pairs).unwrap();
        let out = drc_extract(&g, &int(1), &rational(1, 3)).unwrap();
        assert_eq!(out.u, vec![0, 1, 2, 3, 4]);
        assert_eq!(out.bad_pair_fraction, int(0));
        assert!(!out.deletion_repaired());
    }

    #[test]
    fn sparse_graph_is_rejected() {
        let g = Bipartite::new(4, 4, &[(0, 0)]).unwrap();
        assert!(matches!(drc_extract(&g, &int(2), &rational(1, 2)), Err(Error::DensityTooLow(_))));
    }

    #[test]
    fn k66_minus_matching() {
        let g = knn_minus_matching(6);
        let (k, eps) = (rational(6, 5), rational(1, 4));
        let out = drc_extract(&g, &k, &eps).unwrap();
        assert!(out.u.len() >= 3);
        assert!(out.bad_pair_fraction <= eps);
        for order in (0..10).map(|seed| PivotOrder::Random { seed }) {
            let out = drc_extract_with(&g, &k, &eps, order).unwrap();
            assert!(out.u.len() >= 3 && out.bad_pair_fraction <= eps);
        }
    }

    #[test]
    fn iterate_on_complete_keeps_part() {
        let h = PartiteHypergraph::complete(vec![4, 3, 2]).unwrap();
        let out = iterate_extract(&h, 1, &int(1), &rational(1, 2), PivotOrder::DegreeScan).unwrap();
        assert_eq!(out.u, vec![0, 1, 2]);
        assert_eq!(out.kept, vec![0, 1, 2]);
        assert_eq!(out.k_prime, int(1));
    }

    #[test]
    fn iterate_rejects_sparse() {
        let h = PartiteHypergraph::build(vec![3, 3], [[0, 0]]).unwrap();
        assert!(matches!(
            iterate_extract(&h, 0, &int(2), &rational(1, 2), PivotOrder::DegreeScan),
            Err(Error::DensityTooLow(_))
        ));
    }
}
