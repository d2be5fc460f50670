//! Seeded instance generation and instance measurement.
//!
//! Every family is driven by ChaCha8 seeded from the configured 64-bit seed,
//! and the configuration is stored in the instance under `generator`, so an
//! instance can always be regenerated byte for byte.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, fmt_rational, serde_rational, Rational};
use crate::extraction::{measured_c_pow_r, measured_k};
use crate::group::{GroupElem, GroupSpec};
use crate::hypergraph::{for_each_tuple, PartiteHypergraph};
use crate::instance::Instance;
use crate::sumset::{iterated_sumset, restricted_sumset, ElemSet};

/// Identifier of the generator's random stream, recorded in instances.
pub const GENERATOR_ALGORITHM: &str = "chacha8";

/// Largest tuple space a generator will enumerate.
pub const MAX_TUPLES: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Family {
    /// Arithmetic-progression parts, every tuple an edge.
    Complete,
    /// Arithmetic-progression parts, each tuple kept with probability
    /// `1/K`, then topped up to `⌈prod |A_i| / K⌉` edges.
    RandomDensity {
        #[serde(with = "serde_rational")]
        k: Rational,
    },
    /// Parts are an arithmetic progression of length `⌈f n⌉` plus random
    /// elements; edges are the tuples whose sum lies in a small target set.
    Planted {
        #[serde(with = "serde_rational")]
        ap_fraction: Rational,
        #[serde(with = "serde_rational")]
        target_c: Rational,
    },
    /// The complete hypergraph minus `⌊δ prod |A_i|⌋` random edges.
    Dense {
        #[serde(with = "serde_rational")]
        delta: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub sizes: Vec<usize>,
    pub group: GroupSpec,
    pub seed: u64,
    pub family: Family,
}

impl GenConfig {
    /// `r` parts of size `n` each.
    pub fn uniform(r: usize, n: usize, group: GroupSpec, seed: u64, family: Family) -> Self {
        GenConfig {
            sizes: vec![n; r],
            group,
            seed,
            family,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.len() < 2 {
            return Err(Error::ConfigInvalid(format!("need r >= 2 parts, got {}", self.sizes.len())));
        }
        if self.sizes.contains(&0) {
            return Err(Error::ConfigInvalid("part sizes must be positive".into()));
        }
        if exact::product(&self.sizes) > BigUint::from(MAX_TUPLES) {
            return Err(Error::ConfigInvalid(format!("more than {MAX_TUPLES} tuples")));
        }
        let max = *self.sizes.iter().max().expect("non-empty");
        if let Some(order) = self.group.order() {
            if order < BigInt::from(max) {
                return Err(Error::ConfigInvalid(format!("group of order {order} has no {max} distinct elements")));
            }
        }
        let unit = exact::int(1);
        let zero = exact::int(0);
        match &self.family {
            Family::Complete => {}
            Family::RandomDensity { k } if *k < unit => {
                return Err(Error::ConfigInvalid(format!("K = {} below 1", fmt_rational(k))));
            }
            Family::RandomDensity { .. } => {}
            Family::Planted { ap_fraction, target_c } => {
                if *ap_fraction < zero || *ap_fraction > unit {
                    return Err(Error::ConfigInvalid("ap_fraction outside [0, 1]".into()));
                }
                if *target_c <= zero {
                    return Err(Error::ConfigInvalid("target C must be positive".into()));
                }
            }
            Family::Dense { delta } => {
                if *delta < zero || *delta >= unit {
                    return Err(Error::ConfigInvalid("δ outside [0, 1)".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "algorithm": GENERATOR_ALGORITHM,
            "config": serde_json::to_value(self).expect("config serializes"),
        })
    }
}

/// `(i, 0, ..., 0)` for `i` in `0..len`.
fn progression(spec: &GroupSpec, len: usize) -> Result<Vec<GroupElem>> {
    let m = spec.moduli()[0];
    if m != 0 && (m as usize) < len {
        return Err(Error::ConfigInvalid(format!(
            "first coordinate Z_{m} cannot hold a progression of length {len}"
        )));
    }
    (0..len)
        .map(|i| {
            let mut coords = vec![BigInt::from(0); spec.rank()];
            coords[0] = BigInt::from(i);
            spec.elem(coords)
        })
        .collect()
}

fn random_elem(spec: &GroupSpec, range: u64, rng: &mut ChaCha8Rng) -> GroupElem {
    let coords: Vec<BigInt> = spec
        .moduli()
        .iter()
        .map(|&m| BigInt::from(if m == 0 { rng.gen_range(0..range) } else { rng.gen_range(0..m) }))
        .collect();
    spec.elem(coords).expect("shape matches")
}

fn ratio_u64(x: &Rational) -> Result<(u64, u64)> {
    match (x.numer().to_u64(), x.denom().to_u64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::ConfigInvalid(format!("{} does not fit 64-bit parts", fmt_rational(x)))),
    }
}

fn all_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_tuple(sizes, |t| out.push(t.to_vec()));
    out
}

/// Builds the instance described by `cfg`. Identical configurations give
/// identical instances.
pub fn gen_instance(cfg: &GenConfig) -> Result<Instance> {
    cfg.validate()?;
    let spec = &cfg.group;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sizes = &cfg.sizes;
    let (parts, edges): (Vec<ElemSet>, Vec<Vec<usize>>) = match &cfg.family {
        Family::Complete => {
            let parts = ap_parts(spec, sizes)?;
            (parts, all_tuples(sizes))
        }
        Family::RandomDensity { k } => {
            let parts = ap_parts(spec, sizes)?;
            let (p, q) = ratio_u64(k)?;
            let mut kept = Vec::new();
            let mut dropped = Vec::new();
            for t in all_tuples(sizes) {
                if rng.gen_range(0..p) < q {
                    kept.push(t);
                } else {
                    dropped.push(t);
                }
            }
            let need = exact::ceil_to_biguint(&(Rational::from_integer(exact::product(sizes).into()) / k));
            let need = exact::to_u64_saturating(&need) as usize;
            if kept.len() < need {
                dropped.shuffle(&mut rng);
                kept.extend(dropped.into_iter().take(need - kept.len()));
            }
            (parts, kept)
        }
        Family::Dense { delta } => {
            let parts = ap_parts(spec, sizes)?;
            let total = exact::product(sizes);
            let remove = (delta * Rational::from_integer(total.clone().into())).floor().to_integer();
            let remove = remove.to_usize().expect("bounded by tuple count");
            let total = total.to_usize().expect("bounded by MAX_TUPLES");
            let gone: HashSet<usize> = rand::seq::index::sample(&mut rng, total, remove).into_iter().collect();
            let edges = all_tuples(sizes)
                .into_iter()
                .enumerate()
                .filter(|(i, _)| !gone.contains(i))
                .map(|(_, t)| t)
                .collect();
            (parts, edges)
        }
        Family::Planted { ap_fraction, target_c } => planted(spec, sizes, ap_fraction, target_c, &mut rng)?,
    };
    let inst = Instance::from_parts(parts, PartiteHypergraph::build(sizes.clone(), edges)?)?;
    Ok(inst.with_generator(cfg.to_json_value()))
}

fn ap_parts(spec: &GroupSpec, sizes: &[usize]) -> Result<Vec<ElemSet>> {
    sizes.iter().map(|&n| ElemSet::new(spec, progression(spec, n)?)).collect()
}

fn planted(
    spec: &GroupSpec,
    sizes: &[usize],
    ap_fraction: &Rational,
    target_c: &Rational,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<ElemSet>, Vec<Vec<usize>>)> {
    let mut parts = Vec::with_capacity(sizes.len());
    let mut ap_lens = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let len = exact::ceil_to_biguint(&(ap_fraction * exact::int(n as u64)))
            .to_usize()
            .expect("at most n")
            .min(n);
        let mut elems = progression(spec, len)?;
        let mut seen: HashSet<GroupElem> = elems.iter().cloned().collect();
        let range = 8 * (n as u64) * (n as u64);
        while elems.len() < n {
            let e = random_elem(spec, range, rng);
            if seen.insert(e.clone()) {
                elems.push(e);
            }
        }
        ap_lens.push(len);
        parts.push(ElemSet::new(spec, elems)?);
    }

    // Sums of progression tuples form the protected window; the remaining
    // budget of target sums goes to the most frequent other sums.
    let mut window: HashSet<GroupElem> = HashSet::new();
    if ap_lens.iter().all(|&l| l > 0) {
        let ap_parts: Vec<ElemSet> = ap_lens
            .iter()
            .map(|&l| ElemSet::new(spec, progression(spec, l)?))
            .collect::<Result<_>>()?;
        window.extend(iterated_sumset(&ap_parts)?.elems().iter().cloned());
    }
    let tuples = all_tuples(sizes);
    let sum_of = |t: &[usize]| -> GroupElem {
        spec.sum_tuple(t.iter().enumerate().map(|(i, &v)| &parts[i].elems()[v]))
            .expect("parts conform")
    };
    let sums: Vec<GroupElem> = tuples.iter().map(|t| sum_of(t)).collect();
    let mut freq: HashMap<&GroupElem, u64> = HashMap::new();
    for s in &sums {
        *freq.entry(s).or_default() += 1;
    }
    let r = sizes.len() as u32;
    let budget = Rational::from_integer(exact::product(sizes).into()) * exact::pow_rational(target_c, r);
    // largest b with b^r <= C^r prod |A_i|
    let mut b = exact::ceil_to_biguint(&budget).nth_root(r);
    while Rational::from_integer(b.clone().pow(r).into()) > budget {
        b -= 1u32;
    }
    let b = b.to_usize().unwrap_or(usize::MAX);
    let mut others: Vec<(&GroupElem, u64)> = freq.iter().filter(|(s, _)| !window.contains(**s)).map(|(s, &c)| (*s, c)).collect();
    others.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(y.0)));
    let mut target = window.clone();
    for (s, _) in others.into_iter().take(b.saturating_sub(window.len())) {
        target.insert(s.clone());
    }
    let edges: Vec<Vec<usize>> = tuples
        .into_iter()
        .zip(&sums)
        .filter(|(_, s)| target.contains(*s))
        .map(|(t, _)| t)
        .collect();
    if edges.is_empty() {
        return Err(Error::ConfigInvalid("planted family produced no edges".into()));
    }
    Ok((parts, edges))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub part_sizes: Vec<usize>,
    pub edges: usize,
    #[serde(with = "serde_rational")]
    pub density: Rational,
    /// `prod |A_i| / |E|`.
    #[serde(with = "serde_rational")]
    pub k: Rational,
    /// `|⊕_H|^r / prod |A_i|`.
    #[serde(with = "serde_rational")]
    pub c_pow_r: Rational,
    /// Decimal approximation of `C`, for display only.
    pub c_approx: String,
    pub restricted_sumset_size: usize,
    pub sumset_size: usize,
}

pub fn measure_instance(inst: &Instance) -> Result<Measurement> {
    let h = inst.hypergraph();
    let k = measured_k(inst)?;
    let c_pow_r = measured_c_pow_r(inst)?;
    Ok(Measurement {
        part_sizes: h.part_sizes().to_vec(),
        edges: h.edge_count(),
        density: h.density()?,
        c_approx: exact::root_decimal(&c_pow_r, inst.r() as u32, 6),
        k,
        c_pow_r,
        restricted_sumset_size: restricted_sumset(inst).len(),
        sumset_size: iterated_sumset(inst.parts())?.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};

    #[test]
    fn complete_family() {
        let cfg = GenConfig::uniform(2, 4, GroupSpec::integers(), 1, Family::Complete);
        let inst = gen_instance(&cfg).unwrap();
        assert_eq!(inst.hypergraph().edge_count(), 16);
        assert_eq!(inst.parts()[0].elems()[3], GroupSpec::integers().embed(3));
        assert_eq!(inst.to_json(), gen_instance(&cfg).unwrap().to_json());
    }

    #[test]
    fn planted_full_progression() {
        let fam = Family::Planted {
            ap_fraction: int(1),
            target_c: int(3),
        };
        let inst = gen_instance(&GenConfig::uniform(2, 16, GroupSpec::integers(), 7, fam)).unwrap();
        let m = measure_instance(&inst).unwrap();
        assert_eq!(m.c_pow_r, rational(31 * 31, 256));
        assert_eq!(m.c_approx, "1.937500");
    }

    #[test]
    fn random_density_meets_floor() {
        let fam = Family::RandomDensity { k: int(2) };
        let inst = gen_instance(&GenConfig::uniform(3, 6, GroupSpec::integers(), 3, fam)).unwrap();
        assert!(measure_instance(&inst).unwrap().k <= int(2));
    }

    #[test]
    fn dense_edge_count() {
        let fam = Family::Dense { delta: rational(1, 50) };
        let inst = gen_instance(&GenConfig::uniform(2, 10, GroupSpec::integers(), 5, fam)).unwrap();
        assert_eq!(inst.hypergraph().edge_count(), 98);
    }

    #[test]
    fn measure_examples() {
        let inst = gen_instance(&GenConfig::uniform(2, 10, GroupSpec::integers(), 0, Family::Complete)).unwrap();
        let m = measure_instance(&inst).unwrap();
        assert_eq!((m.k, m.restricted_sumset_size, m.c_pow_r), (int(1), 19, rational(361, 100)));
        let g = GroupSpec::integers();
        let single = Instance::new(g.clone(), vec![vec![g.embed(0), g.embed(1)]; 2], vec![vec![1, 0]]).unwrap();
        let m = measure_instance(&single).unwrap();
        assert_eq!((m.k, m.restricted_sumset_size), (int(4), 1));
    }

    #[test]
    fn invalid_configs() {
        let g = GroupSpec::cyclic(3).unwrap();
        assert!(gen_instance(&GenConfig::uniform(2, 5, g, 0, Family::Complete)).is_err());
        let fam = Family::RandomDensity { k: rational(1, 2) };
        assert!(gen_instance(&GenConfig::uniform(2, 3, GroupSpec::integers(), 0, fam)).is_err());
    }
}
