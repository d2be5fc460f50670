//! Bound reports: every inequality of a run evaluated in exact integers.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::exact::{self, Rational};
use crate::extraction::{
    dense_epsilon_bound, dense_support_threshold, dense_target_size, general_epsilon, general_support_threshold,
    octopus_constant, support_inequality, verify_supports, ExtractionResult, Mode,
};
use crate::group::GroupElem;
use crate::hypergraph::for_each_tuple;
use crate::instance::Instance;
use crate::octopus::octopus_count_relaxed;
use crate::settings::Settings;
use crate::sumset::{iterated_sumset, representation_histogram, restricted_sumset, ElemSet};

/// Serializes with sorted keys and no insignificant whitespace.
pub fn canonical_json(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

/// Pretty form of [`canonical_json`] with the same key order.
pub fn canonical_json_pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn holds<T: Ord>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Eq => "==",
        }
    }
}

/// One inequality. `lhs` and `rhs` are decimal integers obtained by
/// clearing denominators, so comparing them as integers decides `pass`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: Relation,
    pub pass: bool,
    pub anchor: String,
}

impl Inequality {
    /// Compares two rationals `a/b` and `c/d` as the integers `a·d` and
    /// `c·b`.
    pub fn compare(name: impl Into<String>, lhs: &Rational, relation: Relation, rhs: &Rational, anchor: impl Into<String>) -> Self {
        let l: BigInt = lhs.numer() * rhs.denom();
        let r: BigInt = rhs.numer() * lhs.denom();
        Inequality {
            name: name.into(),
            pass: relation.holds(&l, &r),
            lhs: l.to_string(),
            rhs: r.to_string(),
            relation,
            anchor: anchor.into(),
        }
    }

    /// Re-derives `pass` from the stored integers.
    pub fn recheck(&self) -> Option<bool> {
        let l: BigInt = self.lhs.parse().ok()?;
        let r: BigInt = self.rhs.parse().ok()?;
        Some(self.relation.holds(&l, &r))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequalities: Vec<Inequality>,
    pub overall: bool,
}

impl BoundReport {
    pub fn new(inequalities: Vec<Inequality>) -> Self {
        let overall = inequalities.iter().all(|i| i.pass);
        BoundReport { inequalities, overall }
    }

    pub fn push(&mut self, i: Inequality) {
        self.overall = self.inequalities.iter().all(|x| x.pass) && i.pass;
        self.inequalities.push(i);
    }

    pub fn extend(&mut self, other: BoundReport) {
        for i in other.inequalities {
            self.push(i);
        }
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }

    /// `name,relation,pass,lhs_digits,rhs_digits,anchor` rows with a header.
    /// The digit counts make margins easy to plot; exact values stay in the
    /// JSON report.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,relation,pass,lhs_digits,rhs_digits,anchor\n");
        for i in &self.inequalities {
            let digits = |s: &str| s.trim_start_matches('-').len();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(&i.name),
                i.relation.symbol(),
                i.pass,
                digits(&i.lhs),
                digits(&i.rhs),
                csv_field(&i.anchor)
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn nat(x: impl Into<BigUint>) -> Rational {
    Rational::from_integer(BigInt::from(x.into()))
}

fn pow_nat(x: usize, e: usize) -> Rational {
    nat(BigUint::from(x).pow(e as u32))
}

/// Checks that `result` fits `inst` and returns the selected element sets.
fn selected_sets(result: &ExtractionResult, inst: &Instance) -> Result<Vec<ElemSet>> {
    if result.r != inst.r() || result.subsets.len() != inst.r() {
        return Err(Error::ArityMismatch {
            expected: inst.r(),
            got: result.subsets.len(),
        });
    }
    if result.part_sizes != inst.part_sizes() {
        return Err(Error::ConfigInvalid("result part sizes differ from the instance".into()));
    }
    result
        .subsets
        .iter()
        .zip(inst.parts())
        .enumerate()
        .map(|(i, (idx, part))| {
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::ConfigInvalid(format!("subset {i} is not strictly ascending")));
            }
            if let Some(&bad) = idx.iter().find(|&&v| v >= part.len()) {
                return Err(out_of_range(format!("vertex {bad} in part {i} of size {}", part.len())));
            }
            part.select(idx)
        })
        .collect()
}

/// `|A'_1 + ... + A'_r|`, zero when some selected set is empty.
fn selected_sumset(sets: &[ElemSet]) -> Result<ElemSet> {
    if sets.iter().any(ElemSet::is_empty) {
        return Ok(ElemSet::from_sorted_unchecked(sets[0].spec(), Vec::new()));
    }
    iterated_sumset(sets)
}

/// Recomputes every inequality asserted for a run in `mode` from the
/// instance and the selected subsets alone. Support tuples are re-sampled
/// with the caps and seed of `settings`.
pub fn check_bounds(result: &ExtractionResult, inst: &Instance, mode: Mode, settings: &Settings) -> Result<BoundReport> {
    if result.mode != mode {
        return Err(Error::ModeMismatch {
            expected: mode.to_string(),
            found: result.mode.to_string(),
        });
    }
    let sets = selected_sets(result, inst)?;
    let h = inst.hypergraph();
    let r = inst.r();
    let sizes = inst.part_sizes();
    let volume = nat(h.volume());
    let edges = nat(h.edge_count());
    let s_len = selected_sumset(&sets)?.len();
    let s_pow = pow_nat(s_len, r);
    let oplus_pow = pow_nat(restricted_sumset(inst).len(), r);
    let mut out = BoundReport::default();

    match mode {
        Mode::General => {
            let k = result
                .k
                .as_ref()
                .ok_or_else(|| Error::ConfigInvalid("general result without K".into()))?;
            out.push(Inequality::compare("density hypothesis", &edges, Relation::Ge, &(&volume / k), "general density hypothesis"));
            if let Some(c) = &result.c_pow_r {
                out.push(Inequality::compare("sumset hypothesis", &oplus_pow, Relation::Le, &(c * &volume), "general sumset hypothesis"));
            }
            out.push(Inequality::compare("epsilon choice", &result.epsilon, Relation::Eq, &general_epsilon(r, k), "general epsilon"));
            for i in 0..r {
                let floor = h.induce(&chain_subsets(result, sizes, i))?.graph;
                let need = pow_nat(2, i) * k;
                out.push(Inequality::compare(
                    format!("chain density, stage {i}"),
                    &(nat(floor.edge_count()) * &need),
                    Relation::Ge,
                    &nat(floor.volume()),
                    "induction density invariant",
                ));
            }
            for (i, set) in sets.iter().enumerate() {
                let need = nat(sizes[i]) / (pow_nat(2, i + 3) * k);
                out.push(Inequality::compare(
                    format!("size of part {}", i + 1),
                    &nat(set.len()),
                    Relation::Ge,
                    &need,
                    "general size bound",
                ));
            }
            let check = settings.install(|| {
                verify_supports(h, &result.subsets, &general_support_threshold(sizes, k), &settings.caps, settings.seed)
            })??;
            out.push(support_inequality("octopus count lower bound", &check, "general count bound"));
            if let Some(c) = &result.c_pow_r {
                let rhs = exact::pow_rational(&octopus_constant(r, k), r as u32)
                    * exact::pow_rational(c, 2 * r as u32 - 1)
                    * &volume;
                out.push(Inequality::compare("sumset bound", &s_pow, Relation::Le, &rhs, "general sumset bound"));
            }
        }
        Mode::Dense | Mode::AlmostAll => {
            let n = sizes[0];
            if sizes.iter().any(|&x| x != n) {
                return Err(Error::UnequalParts);
            }
            let eps = &result.epsilon;
            let delta = result
                .delta
                .as_ref()
                .ok_or_else(|| Error::ConfigInvalid("dense result without delta".into()))?;
            out.push(Inequality::compare("epsilon range", eps, Relation::Lt, &dense_epsilon_bound(r), "dense epsilon range"));
            out.push(Inequality::compare(
                "density hypothesis",
                &edges,
                Relation::Ge,
                &((exact::int(1) - delta) * &volume),
                "dense density hypothesis",
            ));
            let target = dense_target_size(n, eps);
            for (i, set) in sets.iter().enumerate() {
                out.push(Inequality::compare(
                    format!("size of part {}", i + 1),
                    &nat(set.len()),
                    Relation::Eq,
                    &nat(target),
                    "dense size",
                ));
            }
            let check = settings.install(|| {
                verify_supports(h, &result.subsets, &dense_support_threshold(n, r), &settings.caps, settings.seed)
            })??;
            out.push(support_inequality("octopus count lower bound", &check, "dense count bound"));
            if mode == Mode::AlmostAll {
                let c = result
                    .c_pow_r
                    .as_ref()
                    .ok_or_else(|| Error::ConfigInvalid("almost-all result without C".into()))?;
                out.push(Inequality::compare("sumset hypothesis", &oplus_pow, Relation::Le, &(c * &volume), "almost-all sumset hypothesis"));
                let rhs = pow_nat(2, r) * exact::pow_rational(c, 2 * r as u32 - 1) * &volume;
                out.push(Inequality::compare("sumset bound", &s_pow, Relation::Le, &rhs, "almost-all sumset bound"));
            }
        }
    }
    Ok(out)
}

/// Vertex sets of the `i`-th hypergraph in the general chain: the first
/// `i` parts restricted to their selected sets, the rest whole.
fn chain_subsets(result: &ExtractionResult, sizes: &[usize], i: usize) -> Vec<Vec<usize>> {
    sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| if j < i { result.subsets[j].clone() } else { (0..n).collect() })
        .collect()
}

/// For each `s` in `A'_1 + ... + A'_r`, the lexicographically least tuple of
/// positions (one per part, from `subsets`) whose elements sum to `s`.
pub fn representative_tuples(inst: &Instance, subsets: &[Vec<usize>]) -> BTreeMap<GroupElem, Vec<usize>> {
    let sizes: Vec<usize> = subsets.iter().map(Vec::len).collect();
    let mut reps = BTreeMap::new();
    for_each_tuple(&sizes, |t| {
        let tuple: Vec<usize> = t.iter().enumerate().map(|(i, &j)| subsets[i][j]).collect();
        reps.entry(inst.tuple_sum(&tuple)).or_insert(tuple);
    });
    reps
}

/// The octopus density `L`: the least relaxed octopus count over the
/// representative tuples, divided by `(prod |A_i|)^{r-1}`.
pub fn octopus_density(inst: &Instance, subsets: &[Vec<usize>]) -> Result<Rational> {
    let reps = representative_tuples(inst, subsets);
    let h = inst.hypergraph();
    let mut min: Option<BigUint> = None;
    for t in reps.values() {
        let c = octopus_count_relaxed(h, t)?;
        if min.as_ref().is_none_or(|m| c < *m) {
            min = Some(c);
        }
    }
    let min = min.ok_or(Error::EmptySet)?;
    Ok(nat(min) / nat(h.volume().pow(inst.r() as u32 - 1)))
}

/// Counts representations of every `s` in `A'_1 + ... + A'_r` as signed
/// sums of `2r - 1` elements of the restricted sumset, and checks the
/// per-sum lower bound `L (prod |A_i|)^{(2r-2)/r}` and the aggregate bound
/// `|S| L (prod |A_i|)^{(2r-2)/r} <= |⊕_H|^{2r-1}`, both raised to the r-th
/// power. The per-sum bound relies on the last part being a largest one.
pub fn check_representations(result: &ExtractionResult, inst: &Instance, l: &Rational, settings: &Settings) -> Result<BoundReport> {
    let sets = selected_sets(result, inst)?;
    let r = inst.r();
    let oplus = restricted_sumset(inst);
    let hist = representation_histogram(&oplus, r, settings.caps.convolution)?;
    let s = selected_sumset(&sets)?;
    let mut min: Option<BigUint> = None;
    for x in s.elems() {
        let c = hist.get(x)?;
        if min.as_ref().is_none_or(|m| c < *m) {
            min = Some(c);
        }
    }
    let volume = nat(inst.hypergraph().volume());
    let l_pow = exact::pow_rational(l, r as u32);
    let per_sum_floor = &l_pow * exact::pow_rational(&volume, 2 * r as u32 - 2);
    let mut out = BoundReport::default();
    let min_pow = match min {
        Some(m) => nat(m.pow(r as u32)),
        None => exact::int(0),
    };
    if !s.is_empty() {
        out.push(Inequality::compare("least representation count", &min_pow, Relation::Ge, &per_sum_floor, "representation count per sum"));
    }
    let lhs = pow_nat(s.len(), r) * &per_sum_floor;
    let rhs = pow_nat(oplus.len(), r * (2 * r - 1));
    out.push(Inequality::compare("representation total", &lhs, Relation::Le, &rhs, "representation count total"));
    debug_assert!(!hist.total().is_zero() || oplus.is_empty());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};

    #[test]
    fn compare_clears_denominators() {
        let i = Inequality::compare("x", &rational(1, 3), Relation::Le, &rational(1, 2), "a");
        assert_eq!((i.lhs.as_str(), i.rhs.as_str(), i.pass), ("2", "3", true));
        assert_eq!(i.recheck(), Some(true));
        let j = Inequality::compare("y", &int(5), Relation::Ge, &rational(11, 2), "b");
        assert!(!j.pass);
        let report = BoundReport::new(vec![i, j]);
        assert!(!report.overall);
        assert!(report.to_csv().lines().count() == 3);
    }

    #[test]
    fn json_keys_are_sorted() {
        let v: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":{"d":2,"c":3}}"#).unwrap();
        assert_eq!(canonical_json(&v), r#"{"a":{"c":3,"d":2},"b":1}"#);
    }
}
