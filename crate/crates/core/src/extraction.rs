//! The extraction pipelines.
//!
//! * [`octopus_extract`]: the general case. Parts `1..r-1` go through an
//!   iterate step followed by a Markov filter; the last part is cut by
//!   degree. Every selected tuple then supports many octopuses.
//! * [`dense_extract`]: the very dense case, a single degree cut per part.
//! * [`bsg_extract`] and [`almost_all_extract`] run these and evaluate the
//!   resulting sumset bounds.
//!
//! All thresholds are exact rationals. Ambient part sizes in thresholds are
//! always those of the input instance.

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drc::iterate_extract;
use crate::error::{Error, Result};
use crate::exact::{self, fmt_rational, serde_opt_rational, serde_rational, Rational};
use crate::hypergraph::{for_each_tuple, PartiteHypergraph};
use crate::instance::Instance;
use crate::octopus::{eps_good_threshold, relaxed_with, LegCounter};
use crate::report::{self, BoundReport, Inequality, Relation};
use crate::settings::{Caps, PivotOrder, Settings};
use crate::sumset::restricted_sumset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    General,
    Dense,
    AlmostAll,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::General => "general",
            Mode::Dense => "dense",
            Mode::AlmostAll => "almost-all",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Mode::General),
            "dense" => Ok(Mode::Dense),
            "almost-all" => Ok(Mode::AlmostAll),
            _ => Err(Error::Parse(format!("mode {s:?}"))),
        }
    }
}

/// A parameter that is either supplied or measured from the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Param {
    Measured,
    Given(Rational),
}

/// One pipeline stage. Vertex lists are positions in the input instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum Stage {
    /// Density of the current hypergraph before working on `part`.
    Density {
        part: usize,
        edges: usize,
        #[serde(with = "serde_rational")]
        density: Rational,
        #[serde(with = "serde_rational")]
        floor: Rational,
        pass: bool,
    },
    Iterate {
        part: usize,
        #[serde(with = "serde_rational")]
        k: Rational,
        #[serde(with = "serde_rational")]
        degree_threshold: Rational,
        pruned: Vec<usize>,
        #[serde(with = "serde_rational")]
        k_prime: Rational,
        pivot: Vec<u32>,
        deletions: usize,
        #[serde(with = "serde_rational")]
        codegree_threshold: Rational,
        #[serde(with = "serde_rational")]
        leg_threshold: Rational,
        #[serde(with = "serde_rational")]
        bad_pair_fraction: Rational,
        selected: Vec<usize>,
    },
    Markov {
        part: usize,
        #[serde(with = "serde_rational")]
        good_pair_threshold: Rational,
        #[serde(with = "serde_rational")]
        partner_threshold: Rational,
        kept: Vec<usize>,
    },
    DegreeCut {
        part: usize,
        #[serde(with = "serde_rational")]
        threshold: Rational,
        kept: Vec<usize>,
    },
    Trim {
        part: usize,
        target: usize,
        kept: Vec<usize>,
    },
    AutoDelta {
        #[serde(with = "serde_rational")]
        delta: Rational,
    },
}

/// Outcome of checking relaxed octopus counts over support tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub supports: u64,
    pub exhaustive: bool,
    pub seed: u64,
    #[serde(with = "crate::exact::serde_opt_biguint")]
    pub min_relaxed: Option<BigUint>,
    pub argmin: Option<Vec<usize>>,
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub mode: Mode,
    pub r: usize,
    pub part_sizes: Vec<usize>,
    /// The selected sets, as ascending positions in each part.
    pub subsets: Vec<Vec<usize>>,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    #[serde(default, with = "serde_opt_rational")]
    pub delta: Option<Rational>,
    #[serde(default, with = "serde_opt_rational")]
    pub k: Option<Rational>,
    #[serde(default, with = "serde_opt_rational")]
    pub c_pow_r: Option<Rational>,
    pub pivots: PivotOrder,
    pub trace: Vec<Stage>,
    pub supports: SupportCheck,
}

impl ExtractionResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("result serializes")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        serde_json::from_value(v).map_err(|e| Error::Parse(format!("extraction result: {e}")))
    }
}

/// The `K` exponent in the octopus lower bound, `(r² + 5r - 4) / 2`.
pub fn k_exponent(r: usize) -> u32 {
    ((r * r + 5 * r - 4) / 2) as u32
}

/// `8^{r³} (r-1)^{r-1} K^{(r²+5r-4)/2}`, the reciprocal of the octopus
/// density guaranteed in the general case.
pub fn octopus_constant(r: usize, k: &Rational) -> Rational {
    let r32 = r as u32;
    let eight = Rational::from_integer(BigInt::from(8u32).pow(r32 * r32 * r32));
    let rm1 = Rational::from_integer(BigInt::from(r - 1).pow(r32 - 1));
    eight * rm1 * exact::pow_rational(k, k_exponent(r))
}

/// `(prod |A_i|)^{r-1} / octopus_constant`.
pub fn general_support_threshold(part_sizes: &[usize], k: &Rational) -> Rational {
    let r = part_sizes.len();
    let p = Rational::from_integer(exact::product(part_sizes).pow(r as u32 - 1).into());
    p / octopus_constant(r, k)
}

/// `n^{r(r-1)} / 2`.
pub fn dense_support_threshold(n: usize, r: usize) -> Rational {
    Rational::new(BigUint::from(n).pow((r * (r - 1)) as u32).into(), BigInt::from(2))
}

/// `1 / ((r-1) 2^{r+3} K)`.
pub fn general_epsilon(r: usize, k: &Rational) -> Rational {
    (exact::int((r as u64 - 1) << (r + 3)) * k).recip()
}

fn pow2(e: usize) -> Rational {
    Rational::from_integer(BigInt::from(1u8) << e)
}

fn positions(h: &PartiteHypergraph) -> Vec<Vec<usize>> {
    h.part_sizes().iter().map(|&n| (0..n).collect()).collect()
}

/// The support tuples to check: all of them up to the exhaustive cap,
/// otherwise `caps.samples` seeded uniform draws (sorted, duplicates
/// removed).
pub fn support_tuples(subsets: &[Vec<usize>], caps: &Caps, seed: u64) -> (Vec<Vec<usize>>, bool) {
    let sizes: Vec<usize> = subsets.iter().map(Vec::len).collect();
    let total = exact::product(&sizes);
    if total <= BigUint::from(caps.exhaustive) {
        let mut out = Vec::new();
        for_each_tuple(&sizes, |t| out.push(t.iter().enumerate().map(|(i, &j)| subsets[i][j]).collect()));
        return (out, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<usize>> = (0..caps.samples)
        .map(|_| subsets.iter().map(|s| s[rng.gen_range(0..s.len())]).collect())
        .collect();
    out.sort();
    out.dedup();
    (out, false)
}

/// Minimum relaxed octopus count over the chosen supports, compared with
/// `threshold`. Runs on the current rayon pool; the minimum and its
/// lexicographically least witness do not depend on scheduling.
pub fn verify_supports(
    h: &PartiteHypergraph,
    subsets: &[Vec<usize>],
    threshold: &Rational,
    caps: &Caps,
    seed: u64,
) -> Result<SupportCheck> {
    let legs = LegCounter::new(h);
    verify_supports_with(&legs, subsets, threshold, caps, seed)
}

fn verify_supports_with(
    legs: &LegCounter<'_>,
    subsets: &[Vec<usize>],
    threshold: &Rational,
    caps: &Caps,
    seed: u64,
) -> Result<SupportCheck> {
    if subsets.iter().any(Vec::is_empty) {
        return Ok(SupportCheck {
            supports: 0,
            exhaustive: true,
            seed,
            min_relaxed: None,
            argmin: None,
            threshold: threshold.clone(),
            pass: false,
        });
    }
    let (tuples, exhaustive) = support_tuples(subsets, caps, seed);
    let counts: Vec<BigUint> = tuples
        .par_iter()
        .map(|t| relaxed_with(legs, t))
        .collect::<Result<_>>()?;
    let (min, arg) = counts
        .iter()
        .zip(&tuples)
        .min_by(|a, b| a.0.cmp(b.0).then_with(|| a.1.cmp(b.1)))
        .expect("at least one support");
    Ok(SupportCheck {
        supports: tuples.len() as u64,
        exhaustive,
        seed,
        pass: exact::nat_ge(min, threshold),
        min_relaxed: Some(min.clone()),
        argmin: Some(arg.clone()),
        threshold: threshold.clone(),
    })
}

/// The general-case pipeline for density parameter `k`.
pub fn octopus_extract(inst: &Instance, k: &Rational, settings: &Settings) -> Result<ExtractionResult> {
    settings.install(|| octopus_extract_inner(inst, k, settings))?
}

fn octopus_extract_inner(inst: &Instance, k: &Rational, settings: &Settings) -> Result<ExtractionResult> {
    let h = inst.hypergraph();
    let r = h.r();
    let ambient = h.part_sizes().to_vec();
    if *k < exact::int(1) {
        return Err(Error::ConfigInvalid(format!("K = {} below 1", fmt_rational(k))));
    }
    if h.density()? * k < exact::int(1) {
        return Err(Error::DensityTooLow(format!(
            "{} edges, need prod|A_i|/K = {}",
            h.edge_count(),
            fmt_rational(&(Rational::from_integer(h.volume().into()) / k))
        )));
    }
    let eps = general_epsilon(r, k);
    if eps >= exact::rational(1, 4) {
        return Err(Error::InfeasibleEpsilon(fmt_rational(&eps)));
    }

    let legs = LegCounter::new(h);
    let mut trace = Vec::new();
    let mut current = h.clone();
    // current position -> input position, per part
    let mut maps = positions(h);
    let mut subsets: Vec<Vec<usize>> = Vec::with_capacity(r);

    for i in 0..r - 1 {
        let param = pow2(i) * k;
        trace.push(density_stage(&current, i, &param)?);
        let it = iterate_extract(&current, i, &param, &eps, settings.pivots)?;
        let tilde: Vec<usize> = it.u.iter().map(|&v| maps[i][v]).collect();
        trace.push(Stage::Iterate {
            part: i,
            k: param.clone(),
            degree_threshold: it.degree_threshold.clone(),
            pruned: it.kept.iter().map(|&v| maps[i][v]).collect(),
            k_prime: it.k_prime.clone(),
            pivot: it.pruned.right_labels()[it.drc.pivot].to_vec(),
            deletions: it.drc.deletions,
            codegree_threshold: it.drc.codegree_threshold.clone(),
            leg_threshold: it.leg_threshold.clone(),
            bad_pair_fraction: it.bad_pair_fraction.clone(),
            selected: tilde.clone(),
        });

        // Markov filter: keep v with at least (1 - 2ε)|Ã| ε-good partners
        // in Ã. The pair (v, v) counts when deg(v) clears the threshold,
        // matching the ordered-pair convention of the pivot search.
        let good_pair_threshold = eps_good_threshold(i, &eps, k, &ambient);
        let min_legs = exact::ceil_to_biguint(&good_pair_threshold);
        let partner_threshold = (exact::int(1) - exact::int(2) * &eps) * exact::int(tilde.len() as u64);
        let keep: Vec<bool> = tilde
            .par_iter()
            .map(|&v| -> Result<bool> {
                let mut good = 0u64;
                for &w in &tilde {
                    if BigUint::from(legs.count(i, v, w)?) >= min_legs {
                        good += 1;
                    }
                }
                Ok(exact::nat_ge(&BigUint::from(good), &partner_threshold))
            })
            .collect::<Result<_>>()?;
        let kept: Vec<usize> = tilde.iter().zip(&keep).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
        trace.push(Stage::Markov {
            part: i,
            good_pair_threshold,
            partner_threshold,
            kept: kept.clone(),
        });

        let mut induce_on: Vec<Vec<usize>> = current.part_sizes().iter().map(|&n| (0..n).collect()).collect();
        induce_on[i] = it.u.iter().zip(&keep).filter(|(_, &k)| k).map(|(&v, _)| v).collect();
        let induced = current.induce(&induce_on)?;
        for (j, m) in induced.mapping.iter().enumerate() {
            maps[j] = m.iter().map(|&v| maps[j][v]).collect();
        }
        current = induced.graph;
        subsets.push(kept);
    }

    let last = r - 1;
    let param = pow2(last) * k;
    trace.push(density_stage(&current, last, &param)?);
    let threshold = Rational::from_integer(exact::product(&current.part_sizes()[..last]).into()) / (pow2(r) * k);
    let kept: Vec<usize> = current
        .degrees(last)?
        .into_iter()
        .enumerate()
        .filter(|&(_, d)| exact::nat_ge(&BigUint::from(d), &threshold))
        .map(|(v, _)| maps[last][v])
        .collect();
    trace.push(Stage::DegreeCut {
        part: last,
        threshold,
        kept: kept.clone(),
    });
    subsets.push(kept);

    let support_threshold = general_support_threshold(&ambient, k);
    let supports = verify_supports_with(&legs, &subsets, &support_threshold, &settings.caps, settings.seed)?;
    Ok(ExtractionResult {
        mode: Mode::General,
        r,
        part_sizes: ambient,
        subsets,
        epsilon: eps,
        delta: None,
        k: Some(k.clone()),
        c_pow_r: None,
        pivots: settings.pivots,
        trace,
        supports,
    })
}

fn density_stage(h: &PartiteHypergraph, part: usize, k: &Rational) -> Result<Stage> {
    let density = h.density()?;
    let floor = k.recip();
    Ok(Stage::Density {
        part,
        edges: h.edge_count(),
        pass: density >= floor,
        density,
        floor,
    })
}

fn equal_size(h: &PartiteHypergraph) -> Result<usize> {
    let n = h.part_sizes()[0];
    if h.part_sizes().iter().any(|&s| s != n) {
        return Err(Error::UnequalParts);
    }
    if n == 0 {
        return Err(Error::EmptyPart(0));
    }
    Ok(n)
}

/// `1 / (10 r)`, the exclusive upper bound on ε in the dense case.
pub fn dense_epsilon_bound(r: usize) -> Rational {
    exact::rational(1, 10 * r as i64)
}

/// `⌈(1 - ε) n⌉`.
pub fn dense_target_size(n: usize, eps: &Rational) -> usize {
    exact::to_u64_saturating(&exact::ceil_to_biguint(&((exact::int(1) - eps) * exact::int(n as u64)))) as usize
}

/// Resolves `δ` (`None` means `ε / (10 r)`).
pub fn resolve_delta(r: usize, eps: &Rational, delta: Option<&Rational>) -> Rational {
    match delta {
        Some(d) => d.clone(),
        None => eps * dense_epsilon_bound(r),
    }
}

/// The dense-case pipeline. `delta = None` selects `ε / (10 r)`.
pub fn dense_extract(inst: &Instance, eps: &Rational, delta: Option<&Rational>, settings: &Settings) -> Result<ExtractionResult> {
    settings.install(|| dense_extract_inner(inst, eps, delta, settings))?
}

fn dense_extract_inner(
    inst: &Instance,
    eps: &Rational,
    delta_in: Option<&Rational>,
    settings: &Settings,
) -> Result<ExtractionResult> {
    let h = inst.hypergraph();
    let r = h.r();
    let n = equal_size(h)?;
    let bound = dense_epsilon_bound(r);
    if *eps <= exact::int(0) || *eps >= bound {
        return Err(Error::EpsilonTooLarge {
            eps: fmt_rational(eps),
            bound: fmt_rational(&bound),
        });
    }
    let delta = resolve_delta(r, eps, delta_in);
    if delta < exact::int(0) || delta >= exact::int(1) {
        return Err(Error::ConfigInvalid(format!("δ = {} outside [0, 1)", fmt_rational(&delta))));
    }
    let volume = Rational::from_integer(h.volume().into());
    let floor = (exact::int(1) - &delta) * &volume;
    if exact::int(h.edge_count() as u64) < floor {
        return Err(Error::DensityTooLow(format!(
            "{} edges, need (1 - δ) n^r = {}",
            h.edge_count(),
            fmt_rational(&floor)
        )));
    }
    let mut trace = Vec::new();
    if delta_in.is_none() {
        trace.push(Stage::AutoDelta { delta: delta.clone() });
    }
    let threshold = (exact::int(1) - &delta / eps) * Rational::from_integer(BigUint::from(n).pow(r as u32 - 1).into());
    let target = dense_target_size(n, eps);
    let mut subsets = Vec::with_capacity(r);
    for i in 0..r {
        let kept: Vec<usize> = h
            .degrees(i)?
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| exact::nat_ge(&BigUint::from(d), &threshold))
            .map(|(v, _)| v)
            .collect();
        trace.push(Stage::DegreeCut {
            part: i,
            threshold: threshold.clone(),
            kept: kept.clone(),
        });
        let trimmed: Vec<usize> = kept.into_iter().take(target).collect();
        trace.push(Stage::Trim {
            part: i,
            target,
            kept: trimmed.clone(),
        });
        subsets.push(trimmed);
    }
    let support_threshold = dense_support_threshold(n, r);
    let supports = verify_supports(h, &subsets, &support_threshold, &settings.caps, settings.seed)?;
    Ok(ExtractionResult {
        mode: Mode::Dense,
        r,
        part_sizes: h.part_sizes().to_vec(),
        subsets,
        epsilon: eps.clone(),
        delta: Some(delta),
        k: None,
        c_pow_r: None,
        pivots: settings.pivots,
        trace,
        supports,
    })
}

/// `prod |A_i| / |E|`.
pub fn measured_k(inst: &Instance) -> Result<Rational> {
    match inst.hypergraph().measured_k()? {
        crate::hypergraph::MeasuredK::Finite(k) => Ok(k),
        crate::hypergraph::MeasuredK::NoEdges => Err(Error::NoEdges),
    }
}

/// `|⊕_H|^r / prod |A_i|`, the exact r-th power of the measured `C`.
pub fn measured_c_pow_r(inst: &Instance) -> Result<Rational> {
    if inst.hypergraph().edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let s = restricted_sumset(inst).len();
    Ok(Rational::new(
        BigUint::from(s).pow(inst.r() as u32).into(),
        inst.hypergraph().volume().into(),
    ))
}

/// Resolves `C` to `C^r` and checks `|⊕_H|^r <= C^r prod |A_i|`.
pub fn resolve_c_pow_r(inst: &Instance, c: &Param) -> Result<Rational> {
    let measured = measured_c_pow_r(inst)?;
    match c {
        Param::Measured => Ok(measured),
        Param::Given(c) => {
            if *c <= exact::int(0) {
                return Err(Error::ConfigInvalid(format!("C = {} must be positive", fmt_rational(c))));
            }
            let c_pow = exact::pow_rational(c, inst.r() as u32);
            if measured > c_pow {
                return Err(Error::HypothesisViolated(fmt_rational(&c_pow)));
            }
            Ok(c_pow)
        }
    }
}

/// The general pipeline followed by the general sumset bound.
pub fn bsg_extract(inst: &Instance, k: &Param, c: &Param, settings: &Settings) -> Result<(ExtractionResult, BoundReport)> {
    let k = match k {
        Param::Measured => measured_k(inst)?,
        Param::Given(k) => k.clone(),
    };
    let c_pow_r = resolve_c_pow_r(inst, c)?;
    let mut result = octopus_extract(inst, &k, settings)?;
    result.c_pow_r = Some(c_pow_r);
    let report = report::check_bounds(&result, inst, Mode::General, settings)?;
    Ok((result, report))
}

/// The dense pipeline followed by the almost-all sumset bound
/// `|A'_1 + ... + A'_r| <= 2 C^{2r-1} n`.
pub fn almost_all_extract(
    inst: &Instance,
    c: &Param,
    eps: &Rational,
    delta: Option<&Rational>,
    settings: &Settings,
) -> Result<(ExtractionResult, BoundReport)> {
    equal_size(inst.hypergraph())?;
    let c_pow_r = resolve_c_pow_r(inst, c)?;
    let mut result = dense_extract(inst, eps, delta, settings)?;
    result.mode = Mode::AlmostAll;
    result.c_pow_r = Some(c_pow_r);
    let report = report::check_bounds(&result, inst, Mode::AlmostAll, settings)?;
    Ok((result, report))
}

/// Relaxed octopus threshold check used in reports.
pub(crate) fn support_inequality(name: &str, check: &SupportCheck, anchor: &str) -> Inequality {
    let min = check
        .min_relaxed
        .as_ref()
        .map(|m| Rational::from_integer(m.clone().into()))
        .unwrap_or_else(|| exact::int(-1));
    Inequality::compare(name, &min, Relation::Ge, &check.threshold, anchor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};
    use crate::group::GroupSpec;

    fn complete_ap(r: usize, n: usize) -> Instance {
        let g = GroupSpec::integers();
        let part: Vec<_> = (0..n as i64).map(|x| g.embed(x)).collect();
        Instance::complete(g, vec![part; r]).unwrap()
    }

    #[test]
    fn general_on_complete() {
        let inst = complete_ap(2, 6);
        let res = octopus_extract(&inst, &int(1), &Settings::default()).unwrap();
        assert!(res.subsets[0].len() * 8 >= 6);
        assert!(res.subsets[1].len() * 16 >= 6);
        assert!(res.supports.pass);
        assert_eq!(res.epsilon, rational(1, 32));
    }

    #[test]
    fn general_rejects_sparse() {
        let g = GroupSpec::integers();
        let inst = Instance::new(g.clone(), vec![vec![g.embed(0), g.embed(1)]; 2], vec![vec![0, 0]]).unwrap();
        assert!(matches!(
            octopus_extract(&inst, &int(2), &Settings::default()),
            Err(Error::DensityTooLow(_))
        ));
    }

    #[test]
    fn dense_on_complete() {
        let inst = complete_ap(2, 10);
        let res = dense_extract(&inst, &rational(1, 25), Some(&int(0)), &Settings::default()).unwrap();
        assert!(res.subsets.iter().all(|s| s.len() == 10));
        assert_eq!(res.supports.threshold, int(50));
        assert!(res.supports.pass);
        assert!(matches!(
            dense_extract(&inst, &rational(1, 20), None, &Settings::default()),
            Err(Error::EpsilonTooLarge { .. })
        ));
    }

    #[test]
    fn constants() {
        assert_eq!(k_exponent(2), 5);
        assert_eq!(k_exponent(3), 10);
        assert_eq!(octopus_constant(2, &int(1)), int(1 << 24));
        assert_eq!(dense_target_size(10, &rational(1, 25)), 10);
        assert_eq!(dense_target_size(12, &rational(1, 25)), 12);
        assert_eq!(dense_target_size(30, &rational(1, 25)), 29);
    }
}
