//! Exhaustive search for subsets with the smallest sumset.

use crate::error::{Error, Result};
use crate::group::GroupElem;
use crate::instance::Instance;
use crate::sumset::{sumset, ElemSet};

/// Largest total number of elements the search accepts.
pub const MAX_TOTAL_SIZE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestSubsets {
    pub subsets: Vec<Vec<usize>>,
    pub sumset_size: usize,
}

/// Sums of the first `j + 1` parts as a sorted universe, and for `j >= 1` the
/// table mapping (index in the previous universe, position in part `j`) to an
/// index in this one.
struct Level {
    words: usize,
    table: Vec<Vec<usize>>,
}

/// Finds `A'_i ⊆ A_i` with `|A'_i| >= min_sizes[i]` minimizing
/// `|A'_1 + ... + A'_r|`, returning `None` when a floor exceeds its part.
/// Floors below 1 are raised to 1. Shrinking a set never grows the sumset,
/// so only subsets of exactly the floor size are searched. Among optimal
/// choices the lexicographically least (part by part) is returned.
pub fn brute_force_best_subsets(inst: &Instance, min_sizes: &[usize]) -> Result<Option<BestSubsets>> {
    let total: usize = inst.part_sizes().iter().sum();
    if total > MAX_TOTAL_SIZE {
        return Err(Error::TooLarge(format!("{total} elements, limit {MAX_TOTAL_SIZE}")));
    }
    if min_sizes.len() != inst.r() {
        return Err(Error::ArityMismatch {
            expected: inst.r(),
            got: min_sizes.len(),
        });
    }
    let floors: Vec<usize> = min_sizes.iter().map(|&m| m.max(1)).collect();
    if floors.iter().zip(inst.part_sizes()).any(|(&m, &n)| m > n) {
        return Ok(None);
    }

    let parts = inst.parts();
    let mut universe: Vec<GroupElem> = parts[0].elems().to_vec();
    let mut levels = vec![Level {
        words: universe.len().div_ceil(64),
        table: Vec::new(),
    }];
    for part in &parts[1..] {
        let next = sumset(&ElemSet::new(inst.spec(), universe.iter().cloned())?, part)?;
        let table = universe
            .iter()
            .map(|w| {
                part.elems()
                    .iter()
                    .map(|a| next.position(&inst.spec().add(w, a).expect("same spec")).expect("in sumset"))
                    .collect()
            })
            .collect();
        universe = next.elems().to_vec();
        levels.push(Level {
            words: universe.len().div_ceil(64),
            table,
        });
    }

    let combos: Vec<Vec<Vec<usize>>> = floors
        .iter()
        .zip(inst.part_sizes())
        .map(|(&k, &n)| combinations(n, k))
        .collect();
    let mut search = Search {
        levels: &levels,
        combos: &combos,
        best: usize::MAX,
        best_choice: Vec::new(),
        choice: Vec::new(),
    };
    for c in &combos[0] {
        let mut bits = vec![0u64; levels[0].words];
        for &v in c {
            bits[v / 64] |= 1 << (v % 64);
        }
        search.choice.push(c.clone());
        search.descend(1, &bits);
        search.choice.pop();
    }
    Ok(Some(BestSubsets {
        subsets: search.best_choice,
        sumset_size: search.best,
    }))
}

struct Search<'a> {
    levels: &'a [Level],
    combos: &'a [Vec<Vec<usize>>],
    best: usize,
    best_choice: Vec<Vec<usize>>,
    choice: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, j: usize, prev: &[u64]) {
        let size: usize = prev.iter().map(|w| w.count_ones() as usize).sum();
        // |X + Y| >= |X| for non-empty Y, so partial sizes are lower bounds.
        if size >= self.best {
            return;
        }
        if j == self.levels.len() {
            self.best = size;
            self.best_choice = self.choice.clone();
            return;
        }
        let level = &self.levels[j];
        for c in &self.combos[j] {
            let mut bits = vec![0u64; level.words];
            for (wi, &word) in prev.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let w = wi * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    for &a in c {
                        let t = level.table[w][a];
                        bits[t / 64] |= 1 << (t % 64);
                    }
                }
            }
            self.choice.push(c.clone());
            self.descend(j + 1, &bits);
            self.choice.pop();
        }
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn ints(xs: &[i64]) -> Vec<GroupElem> {
        let g = GroupSpec::integers();
        xs.iter().map(|&x| g.embed(x)).collect()
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn full_floors_return_parts() {
        let inst = Instance::complete(GroupSpec::integers(), vec![ints(&[0, 1, 2]), ints(&[0, 1, 2])]).unwrap();
        let best = brute_force_best_subsets(&inst, &[3, 3]).unwrap().unwrap();
        assert_eq!(best.subsets, vec![vec![0, 1, 2], vec![0, 1, 2]]);
        assert_eq!(best.sumset_size, 5);
    }

    #[test]
    fn pair_subsets() {
        let inst = Instance::complete(GroupSpec::integers(), vec![ints(&[0, 1, 5]), ints(&[0, 1, 7])]).unwrap();
        let best = brute_force_best_subsets(&inst, &[2, 2]).unwrap().unwrap();
        // {0,1} + {0,1} = {0,1,2}; nothing smaller than 3 is possible.
        assert_eq!(best.sumset_size, 3);
        assert_eq!(best.subsets, vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(brute_force_best_subsets(&inst, &[4, 1]).unwrap(), None);
    }

    #[test]
    fn too_large() {
        let part = ints(&(0..15).collect::<Vec<_>>());
        let inst = Instance::complete(GroupSpec::integers(), vec![part.clone(), part]).unwrap();
        assert!(matches!(brute_force_best_subsets(&inst, &[1, 1]), Err(Error::TooLarge(_))));
    }
}
