//! r-partite r-uniform hypergraphs over indexed parts.
//!
//! A vertex is a `(part, position)` pair, so equal group elements sitting in
//! different parts are distinct vertices. Edges are ordered tuples with one
//! coordinate per part. Alongside the sorted edge list the graph keeps a hash
//! set for membership and per-vertex incidence lists for degree and link
//! queries. The bipartite flattening of each part (part `i` against the
//! product of the remaining parts) is built on first use and cached.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{out_of_range, Error, Result};
use crate::exact::{self, Rational};

#[derive(Debug, Clone)]
pub struct PartiteHypergraph {
    part_sizes: Vec<usize>,
    /// Flat, lexicographically sorted edge storage (`r` entries per edge).
    edges: Vec<u32>,
    edge_set: HashSet<Box<[u32]>>,
    /// part -> vertex -> ids of incident edges, ascending.
    incidence: Vec<Vec<Vec<u32>>>,
    flattenings: Vec<OnceLock<Arc<Bipartite>>>,
}

/// Reciprocal density, with a sentinel for the edgeless case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasuredK {
    Finite(Rational),
    NoEdges,
}

/// A sub-hypergraph together with the map back to the parent's positions:
/// `mapping[part][new] = old`.
#[derive(Debug, Clone)]
pub struct Induced {
    pub graph: PartiteHypergraph,
    pub mapping: Vec<Vec<usize>>,
}

impl PartiteHypergraph {
    /// Builds a hypergraph, dropping duplicate edges.
    pub fn build<I, E>(part_sizes: Vec<usize>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        let r = part_sizes.len();
        if r == 0 {
            return Err(Error::ArityMismatch { expected: 1, got: 0 });
        }
        if let Some(&big) = part_sizes.iter().find(|&&s| s > u32::MAX as usize) {
            return Err(out_of_range(format!("part size {big} exceeds u32 positions")));
        }
        let mut list: Vec<Box<[u32]>> = Vec::new();
        for e in edges {
            let e = e.as_ref();
            if e.len() != r {
                return Err(Error::ArityMismatch { expected: r, got: e.len() });
            }
            for (i, (&v, &n)) in e.iter().zip(&part_sizes).enumerate() {
                if v >= n {
                    return Err(out_of_range(format!(
                        "edge {e:?}: position {v} in part {i} of size {n}"
                    )));
                }
            }
            list.push(e.iter().map(|&v| v as u32).collect());
        }
        list.sort();
        list.dedup();
        Ok(Self::from_sorted(part_sizes, list))
    }

    /// Every tuple of the product is an edge.
    pub fn complete(part_sizes: Vec<usize>) -> Result<Self> {
        let total = exact::product(&part_sizes);
        if total > BigUint::from(50_000_000u64) {
            return Err(Error::TooLarge(format!("complete hypergraph with {total} edges")));
        }
        let mut list = Vec::new();
        for_each_tuple(&part_sizes, |t| list.push(t.iter().map(|&v| v as u32).collect()));
        Self::build_sorted_checked(part_sizes, list)
    }

    fn build_sorted_checked(part_sizes: Vec<usize>, list: Vec<Box<[u32]>>) -> Result<Self> {
        debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
        Ok(Self::from_sorted(part_sizes, list))
    }

    fn from_sorted(part_sizes: Vec<usize>, list: Vec<Box<[u32]>>) -> Self {
        let r = part_sizes.len();
        let mut incidence: Vec<Vec<Vec<u32>>> =
            part_sizes.iter().map(|&n| vec![Vec::new(); n]).collect();
        let mut flat = Vec::with_capacity(list.len() * r);
        for (id, e) in list.iter().enumerate() {
            for (i, &v) in e.iter().enumerate() {
                incidence[i][v as usize].push(id as u32);
            }
            flat.extend_from_slice(e);
        }
        PartiteHypergraph {
            flattenings: (0..r).map(|_| OnceLock::new()).collect(),
            part_sizes,
            edges: flat,
            edge_set: list.into_iter().collect(),
            incidence,
        }
    }

    pub fn r(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn edge_count(&self) -> usize {
        self.edge_set.len()
    }

    pub fn edge(&self, id: usize) -> &[u32] {
        let r = self.r();
        &self.edges[id * r..(id + 1) * r]
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.r())
    }

    pub fn contains(&self, e: &[u32]) -> bool {
        self.edge_set.contains(e)
    }

    pub fn contains_positions(&self, e: &[usize]) -> bool {
        e.len() == self.r()
            && e.iter().all(|&v| v <= u32::MAX as usize)
            && self
                .edge_set
                .contains(e.iter().map(|&v| v as u32).collect::<Vec<_>>().as_slice())
    }

    /// Product of the part sizes.
    pub fn volume(&self) -> BigUint {
        exact::product(&self.part_sizes)
    }

    /// `|E| / prod |V_i|`.
    pub fn density(&self) -> Result<Rational> {
        if let Some(i) = self.part_sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyPart(i));
        }
        Ok(Rational::new(
            BigUint::from(self.edge_count()).into(),
            self.volume().into(),
        ))
    }

    /// `prod |V_i| / |E|`.
    pub fn measured_k(&self) -> Result<MeasuredK> {
        let d = self.density()?;
        if d.is_zero() {
            return Ok(MeasuredK::NoEdges);
        }
        Ok(MeasuredK::Finite(d.recip()))
    }

    fn check_vertex(&self, part: usize, v: usize) -> Result<()> {
        if part >= self.r() {
            return Err(out_of_range(format!("part {part} of {}", self.r())));
        }
        if v >= self.part_sizes[part] {
            return Err(out_of_range(format!(
                "vertex {v} in part {part} of size {}",
                self.part_sizes[part]
            )));
        }
        Ok(())
    }

    pub fn degree(&self, part: usize, v: usize) -> Result<usize> {
        self.check_vertex(part, v)?;
        Ok(self.incidence[part][v].len())
    }

    pub fn degrees(&self, part: usize) -> Result<Vec<usize>> {
        if part >= self.r() {
            return Err(out_of_range(format!("part {part} of {}", self.r())));
        }
        Ok(self.incidence[part].iter().map(Vec::len).collect())
    }

    /// Ids of the edges through `v` in `part`, ascending.
    pub fn incident_edges(&self, part: usize, v: usize) -> Result<&[u32]> {
        self.check_vertex(part, v)?;
        Ok(&self.incidence[part][v])
    }

    /// The `(r-1)`-partite hypergraph of edge remainders through `v`.
    pub fn link(&self, part: usize, v: usize) -> Result<PartiteHypergraph> {
        self.check_vertex(part, v)?;
        let sizes: Vec<usize> = self
            .part_sizes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != part)
            .map(|(_, &s)| s)
            .collect();
        if sizes.is_empty() {
            return Err(Error::ArityMismatch { expected: 2, got: 1 });
        }
        let list: Vec<Box<[u32]>> = self.incidence[part][v]
            .iter()
            .map(|&id| drop_coord(self.edge(id as usize), part))
            .collect();
        // Removing a fixed coordinate keeps lexicographic order.
        Self::build_sorted_checked(sizes, list)
    }

    /// Part `part` against the tuples over the remaining parts.
    pub fn flatten_bipartite(&self, part: usize) -> Result<Arc<Bipartite>> {
        if part >= self.r() {
            return Err(out_of_range(format!("part {part} of {}", self.r())));
        }
        Ok(self.flattenings[part]
            .get_or_init(|| Arc::new(self.build_flattening(part)))
            .clone())
    }

    fn build_flattening(&self, part: usize) -> Bipartite {
        let mut labels: Vec<Box<[u32]>> = self
            .edges()
            .map(|e| drop_coord(e, part))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        labels.sort();
        let mut pairs = Vec::with_capacity(self.edge_count());
        for e in self.edges() {
            let z = labels
                .binary_search(&drop_coord(e, part))
                .expect("label collected above");
            pairs.push((e[part] as usize, z));
        }
        let right_size: BigUint = self
            .part_sizes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != part)
            .map(|(_, &s)| BigUint::from(s))
            .product();
        Bipartite::from_pairs(self.part_sizes[part], right_size, labels, &pairs)
    }

    /// Keeps the vertices of `part` whose degree is at least `threshold`.
    pub fn prune_low_degree(&self, part: usize, threshold: &Rational) -> Result<Induced> {
        let keep: Vec<usize> = self
            .degrees(part)?
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| exact::nat_ge(&BigUint::from(d), threshold))
            .map(|(v, _)| v)
            .collect();
        let mut subsets: Vec<Vec<usize>> =
            self.part_sizes.iter().map(|&n| (0..n).collect()).collect();
        subsets[part] = keep;
        self.induce(&subsets)
    }

    /// Induced sub-hypergraph on the chosen positions of each part,
    /// reindexed in ascending order of the old positions.
    pub fn induce(&self, subsets: &[Vec<usize>]) -> Result<Induced> {
        if subsets.len() != self.r() {
            return Err(Error::ArityMismatch {
                expected: self.r(),
                got: subsets.len(),
            });
        }
        let mut mapping = Vec::with_capacity(self.r());
        let mut renumber: Vec<Vec<Option<u32>>> = Vec::with_capacity(self.r());
        for (i, s) in subsets.iter().enumerate() {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&v| v >= self.part_sizes[i]) {
                return Err(out_of_range(format!(
                    "vertex {bad} in part {i} of size {}",
                    self.part_sizes[i]
                )));
            }
            let mut map = vec![None; self.part_sizes[i]];
            for (new, &old) in s.iter().enumerate() {
                map[old] = Some(new as u32);
            }
            renumber.push(map);
            mapping.push(s);
        }
        let list: Vec<Box<[u32]>> = self
            .edges()
            .filter_map(|e| {
                e.iter()
                    .enumerate()
                    .map(|(i, &v)| renumber[i][v as usize])
                    .collect::<Option<Box<[u32]>>>()
            })
            .collect();
        // Renumbering is monotone per coordinate, so order is preserved.
        let sizes = mapping.iter().map(Vec::len).collect();
        Ok(Induced {
            graph: Self::build_sorted_checked(sizes, list)?,
            mapping,
        })
    }
}

fn drop_coord(e: &[u32], part: usize) -> Box<[u32]> {
    e.iter()
        .enumerate()
        .filter(|&(j, _)| j != part)
        .map(|(_, &v)| v)
        .collect()
}

/// Calls `f` on every tuple of the product `0..sizes[0] x ...` in
/// lexicographic order.
pub fn for_each_tuple(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut t = vec![0usize; sizes.len()];
    loop {
        f(&t);
        let mut j = sizes.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            t[j] += 1;
            if t[j] < sizes[j] {
                break;
            }
            t[j] = 0;
        }
    }
}

/// A bipartite graph between `left_size` vertices and a right side of
/// nominal size `right_size`; only right vertices carrying at least one edge
/// are materialized (with their labels).
#[derive(Debug, Clone)]
pub struct Bipartite {
    left_size: usize,
    right_size: BigUint,
    right_labels: Vec<Box<[u32]>>,
    left_adj: Vec<Vec<u32>>,
    right_adj: Vec<Vec<u32>>,
    /// Bitset rows over materialized right vertices, one per left vertex.
    rows: Vec<Vec<u64>>,
    edge_count: usize,
}

impl Bipartite {
    /// Plain bipartite graph on `left_size x right_size` from `(left, right)`
    /// pairs. Right labels are the singletons `[z]`.
    pub fn new(left_size: usize, right_size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        for &(v, z) in pairs {
            if v >= left_size || z >= right_size {
                return Err(out_of_range(format!("edge ({v}, {z})")));
            }
        }
        let labels = (0..right_size as u32).map(|z| vec![z].into_boxed_slice()).collect();
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_pairs(left_size, BigUint::from(right_size), labels, &pairs))
    }

    fn from_pairs(
        left_size: usize,
        right_size: BigUint,
        right_labels: Vec<Box<[u32]>>,
        pairs: &[(usize, usize)],
    ) -> Self {
        let nr = right_labels.len();
        let words = nr.div_ceil(64);
        let mut left_adj = vec![Vec::new(); left_size];
        let mut right_adj = vec![Vec::new(); nr];
        let mut rows = vec![vec![0u64; words]; left_size];
        for &(v, z) in pairs {
            left_adj[v].push(z as u32);
            right_adj[z].push(v as u32);
            rows[v][z / 64] |= 1 << (z % 64);
        }
        left_adj.iter_mut().for_each(|a| a.sort_unstable());
        right_adj.iter_mut().for_each(|a| a.sort_unstable());
        Bipartite {
            left_size,
            right_size,
            right_labels,
            left_adj,
            right_adj,
            rows,
            edge_count: pairs.len(),
        }
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    /// Nominal size of the right side (the full product for flattenings).
    pub fn right_size(&self) -> &BigUint {
        &self.right_size
    }

    pub fn right_labels(&self) -> &[Box<[u32]>] {
        &self.right_labels
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.left_adj
            .get(v)
            .map(Vec::len)
            .ok_or_else(|| out_of_range(format!("left vertex {v}")))
    }

    pub fn neighbors(&self, v: usize) -> Result<&[u32]> {
        self.left_adj
            .get(v)
            .map(Vec::as_slice)
            .ok_or_else(|| out_of_range(format!("left vertex {v}")))
    }

    /// Left neighbours of a materialized right vertex.
    pub fn right_neighbors(&self, z: usize) -> Result<&[u32]> {
        self.right_adj
            .get(z)
            .map(Vec::as_slice)
            .ok_or_else(|| out_of_range(format!("right vertex {z}")))
    }

    pub fn materialized_right(&self) -> usize {
        self.right_labels.len()
    }

    /// `|N(v) ∩ N(w)|`; for `v == w` this is the degree.
    pub fn codegree(&self, v: usize, w: usize) -> Result<usize> {
        let (a, b) = (
            self.rows.get(v).ok_or_else(|| out_of_range(format!("left vertex {v}")))?,
            self.rows.get(w).ok_or_else(|| out_of_range(format!("left vertex {w}")))?,
        );
        Ok(a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum())
    }

    /// Right vertices adjacent to both `v` and `w`, ascending.
    pub fn common_neighbors(&self, v: usize, w: usize) -> Result<Vec<u32>> {
        let (a, b) = (self.neighbors(v)?, self.neighbors(w)?);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// Keeps only the listed left vertices, renumbered in the given order.
    /// The right side is unchanged.
    pub fn restrict_left(&self, keep: &[usize]) -> Result<Bipartite> {
        let mut pairs = Vec::new();
        for (new, &old) in keep.iter().enumerate() {
            for &z in self.neighbors(old)? {
                pairs.push((new, z as usize));
            }
        }
        Ok(Self::from_pairs(
            keep.len(),
            self.right_size.clone(),
            self.right_labels.clone(),
            &pairs,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};
    use proptest::prelude::*;

    fn k22_minus_one() -> PartiteHypergraph {
        PartiteHypergraph::build(vec![2, 2], [[0, 0], [0, 1], [1, 0]]).unwrap()
    }

    #[test]
    fn build_examples() {
        let k22 = PartiteHypergraph::complete(vec![2, 2]).unwrap();
        assert_eq!(k22.edge_count(), 4);
        let dup = PartiteHypergraph::build(vec![2, 2], [[0, 1], [0, 1]]).unwrap();
        assert_eq!(dup.edge_count(), 1);
        assert!(matches!(
            PartiteHypergraph::build(vec![2, 2], [[0, 5]]),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            PartiteHypergraph::build(vec![2, 2], [vec![0, 1, 1]]),
            Err(Error::ArityMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn density_examples() {
        let k = PartiteHypergraph::complete(vec![3, 4]).unwrap();
        assert_eq!(k.density().unwrap(), int(1));
        assert_eq!(k.measured_k().unwrap(), MeasuredK::Finite(int(1)));
        let h = k22_minus_one();
        assert_eq!(h.density().unwrap(), rational(3, 4));
        assert_eq!(h.measured_k().unwrap(), MeasuredK::Finite(rational(4, 3)));
        let empty = PartiteHypergraph::build(vec![2, 2], Vec::<[usize; 2]>::new()).unwrap();
        assert_eq!(empty.measured_k().unwrap(), MeasuredK::NoEdges);
        let hollow = PartiteHypergraph::build(vec![2, 0], Vec::<[usize; 2]>::new()).unwrap();
        assert_eq!(hollow.density(), Err(Error::EmptyPart(1)));
    }

    #[test]
    fn degree_examples() {
        let k = PartiteHypergraph::complete(vec![2, 3, 4]).unwrap();
        assert_eq!(k.degree(0, 1).unwrap(), 12);
        assert_eq!(k.degree(2, 3).unwrap(), 6);
        let one = PartiteHypergraph::build(vec![2, 2, 2], [[1, 0, 1]]).unwrap();
        assert_eq!(one.degree(1, 0).unwrap(), 1);
        assert_eq!(one.degree(1, 1).unwrap(), 0);
        assert!(one.degree(1, 2).is_err());
        assert!(one.degree(3, 0).is_err());
    }

    #[test]
    fn link_examples() {
        let k = PartiteHypergraph::complete(vec![2, 3, 4]).unwrap();
        let l = k.link(1, 2).unwrap();
        assert_eq!(l.part_sizes(), &[2, 4]);
        assert_eq!(l.edge_count(), 8);
        let h = k22_minus_one();
        let l = h.link(0, 0).unwrap();
        assert_eq!(l.edges().map(|e| e[0]).collect::<Vec<_>>(), vec![0, 1]);
        let empty = PartiteHypergraph::build(vec![2, 2], Vec::<[usize; 2]>::new()).unwrap();
        assert_eq!(empty.link(0, 1).unwrap().edge_count(), 0);
    }

    #[test]
    fn flatten_examples() {
        let h = k22_minus_one();
        let g = h.flatten_bipartite(0).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree(0).unwrap(), 2);
        assert_eq!(g.degree(1).unwrap(), 1);
        let k = PartiteHypergraph::complete(vec![2, 2, 2]).unwrap();
        let g = k.flatten_bipartite(0).unwrap();
        assert_eq!(g.left_size(), 2);
        assert_eq!(g.right_size(), &BigUint::from(4u32));
        assert_eq!(g.materialized_right(), 4);
        assert_eq!(g.edge_count(), 8);
        let one = PartiteHypergraph::build(vec![3, 3, 3], [[2, 0, 1]]).unwrap();
        let g = one.flatten_bipartite(1).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(&*g.right_labels()[0], &[2, 1]);
    }

    #[test]
    fn codegree_examples() {
        let kn = Bipartite::new(3, 5, &(0..3).flat_map(|v| (0..5).map(move |z| (v, z))).collect::<Vec<_>>()).unwrap();
        assert_eq!(kn.codegree(0, 2).unwrap(), 5);
        assert_eq!(kn.codegree(1, 1).unwrap(), 5);
        let matching = Bipartite::new(4, 4, &[(0, 0), (1, 1), (2, 2), (3, 3)]).unwrap();
        assert_eq!(matching.codegree(0, 3).unwrap(), 0);
        // K_{2,3} minus (0, 0): N(0) = {1, 2}, N(1) = {0, 1, 2}.
        let g = Bipartite::new(2, 3, &[(0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]).unwrap();
        assert_eq!(g.codegree(0, 1).unwrap(), 2);
        assert_eq!(g.common_neighbors(0, 1).unwrap(), vec![1, 2]);
        assert!(g.codegree(0, 2).is_err());
    }

    #[test]
    fn prune_examples() {
        let h = k22_minus_one();
        let same = h.prune_low_degree(0, &int(0)).unwrap();
        assert_eq!(same.graph.edge_count(), 3);
        let none = h.prune_low_degree(0, &int(3)).unwrap();
        assert_eq!(none.graph.part_sizes(), &[0, 2]);
        let one = h.prune_low_degree(0, &int(2)).unwrap();
        assert_eq!(one.mapping[0], vec![0]);
        assert_eq!(one.graph.edge_count(), 2);
        // Exact comparison: 3/2 keeps degree 2 and drops degree 1.
        assert_eq!(h.prune_low_degree(0, &rational(3, 2)).unwrap().mapping[0], vec![0]);
    }

    #[test]
    fn induce_examples() {
        let k = PartiteHypergraph::complete(vec![3, 3]).unwrap();
        let all = k.induce(&[vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert_eq!(all.graph.edge_count(), 9);
        let hollow = k.induce(&[vec![], vec![0, 1, 2]]).unwrap();
        assert_eq!(hollow.graph.edge_count(), 0);
        let sub = k.induce(&[vec![2, 0], vec![1, 2]]).unwrap();
        assert_eq!(sub.graph.part_sizes(), &[2, 2]);
        assert_eq!(sub.graph.edge_count(), 4);
        assert_eq!(sub.mapping, vec![vec![0, 2], vec![1, 2]]);
        assert!(k.induce(&[vec![3], vec![0]]).is_err());
    }

    fn random_graph() -> impl Strategy<Value = PartiteHypergraph> {
        (2usize..4)
            .prop_flat_map(|r| proptest::collection::vec(1usize..5, r))
            .prop_flat_map(|sizes| {
                let total: usize = sizes.iter().product();
                (Just(sizes), proptest::collection::vec(any::<bool>(), total))
            })
            .prop_map(|(sizes, keep)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for_each_tuple(&sizes, |t| {
                    if keep[k] {
                        edges.push(t.to_vec());
                    }
                    k += 1;
                });
                PartiteHypergraph::build(sizes, edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn degree_sums_and_flattening(h in random_graph()) {
            for i in 0..h.r() {
                prop_assert_eq!(h.degrees(i).unwrap().iter().sum::<usize>(), h.edge_count());
                let g = h.flatten_bipartite(i).unwrap();
                prop_assert_eq!(g.edge_count(), h.edge_count());
                for v in 0..g.left_size() {
                    for w in 0..g.left_size() {
                        prop_assert_eq!(g.codegree(v, w).unwrap(), g.codegree(w, v).unwrap());
                        prop_assert_eq!(
                            g.codegree(v, w).unwrap(),
                            g.common_neighbors(v, w).unwrap().len()
                        );
                    }
                    prop_assert_eq!(g.codegree(v, v).unwrap(), h.degree(i, v).unwrap());
                }
            }
        }

        #[test]
        fn pruning_never_lowers_density(h in random_graph(), part in 0usize..2, num in 0i64..8, den in 1i64..4) {
            prop_assume!(h.edge_count() > 0);
            let t = rational(num, den);
            let pruned = h.prune_low_degree(part, &t).unwrap();
            if pruned.graph.part_sizes()[part] > 0 {
                prop_assert!(pruned.graph.density().unwrap() >= h.density().unwrap());
            }
            for &v in &pruned.mapping[part] {
                prop_assert!(exact::nat_ge(&BigUint::from(h.degree(part, v).unwrap()), &t));
            }
        }
    }
}
