//! Vertices of Q_n as subsets of [n], layer graphs L_r(n) and explicit
//! subgraphs of Q_n.
//!
//! Bit `i` of a mask stands for element `i + 1` of [n].

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf2::low_mask;

/// Default cap on `n` for anything that enumerates a whole layer or cube.
pub const DEFAULT_CAPACITY: u32 = 24;

/// Largest ground set accepted at all (membership queries only past the
/// enumeration cap).
pub const MAX_N: u32 = 64;

/// The enumeration cap, overridable through `QT_CAPACITY`.
pub fn enumeration_capacity() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("QT_CAPACITY")
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .map(|c| c.min(MAX_N))
            .unwrap_or(DEFAULT_CAPACITY)
    })
}

pub(crate) fn check_capacity(n: u32) -> Result<()> {
    let cap = enumeration_capacity();
    if n > cap {
        return Err(Error::Capacity(format!(
            "n = {n} exceeds the enumeration cap {cap} (set QT_CAPACITY to raise it)"
        )));
    }
    Ok(())
}

/// A vertex of Q_n. The ground-set size lives in the enclosing layer or graph.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetMask(pub u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// Builds a mask from 1-based elements of [n].
    pub fn from_elements(elements: &[u32]) -> Self {
        SubsetMask(elements.iter().fold(0u64, |m, &e| {
            assert!((1..=MAX_N).contains(&e), "element {e} out of range");
            m | 1u64 << (e - 1)
        }))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 1-based membership.
    #[inline]
    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= 64 && self.0 >> (element - 1) & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn fits(self, n: u32) -> bool {
        self.0 & !low_mask(n) == 0
    }

    #[inline]
    pub fn distance(self, other: SubsetMask) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            Some(i + 1)
        })
    }

    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if s.is_empty() || s.starts_with('+') {
            return None;
        }
        u64::from_str_radix(s, 16).ok().map(SubsetMask)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

#[inline]
pub fn are_adjacent(x: SubsetMask, y: SubsetMask) -> bool {
    (x.0 ^ y.0).count_ones() == 1
}

/// The edge layer between sizes `r - 1` and `r` of Q_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LayerId {
    n: u32,
    r: u32,
}

impl LayerId {
    pub fn new(n: u32, r: u32) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::invalid(format!("n = {n} outside 1..={MAX_N}")));
        }
        if r == 0 || r > n {
            return Err(Error::invalid(format!("layer r = {r} outside 1..={n}")));
        }
        Ok(LayerId { n, r })
    }

    #[inline]
    pub fn n(self) -> u32 {
        self.n
    }

    #[inline]
    pub fn r(self) -> u32 {
        self.r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// All `k`-subsets of [n] in increasing mask order (Gosper's hack).
pub fn subsets_of_size(n: u32, k: u32) -> Result<SubsetIter> {
    if n > MAX_N || k > n {
        return Err(Error::invalid(format!("no {k}-subsets of [{n}]")));
    }
    check_capacity(n)?;
    Ok(SubsetIter {
        next: Some(low_mask(k)),
        limit: low_mask(n),
    })
}

pub struct SubsetIter {
    next: Option<u64>,
    limit: u64,
}

impl Iterator for SubsetIter {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.checked_add(c);
            match r {
                Some(r) if r != 0 => {
                    let nxt = (((r ^ cur) >> 2) / c) | r;
                    (nxt & !self.limit == 0).then_some(nxt)
                }
                _ => None,
            }
        };
        Some(SubsetMask(cur))
    }
}

pub fn layer_vertices(layer: LayerId, side: Side) -> Result<SubsetIter> {
    let k = match side {
        Side::Lower => layer.r - 1,
        Side::Upper => layer.r,
    };
    subsets_of_size(layer.n, k)
}

pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `r * C(n, r)`: every r-set has r subsets of size r - 1.
pub fn layer_edge_count(layer: LayerId) -> u128 {
    layer.r as u128 * binomial(layer.n, layer.r)
}

/// `n * 2^(n-1)`.
pub fn cube_edge_count(n: u32) -> u128 {
    assert!((1..=MAX_N).contains(&n));
    (n as u128) << (n - 1)
}

/// A subgraph of Q_n with an explicit edge set. Vertices are kept sorted so
/// that index order is mask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QnGraph {
    n: u32,
    vertices: Vec<SubsetMask>,
    adj: Vec<Vec<u32>>,
}

impl QnGraph {
    /// Builds a graph from edges, which must be Q_n edges in either
    /// orientation. Duplicates are merged.
    pub fn from_edges<I>(n: u32, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, SubsetMask)>,
    {
        if n == 0 || n > MAX_N {
            return Err(Error::invalid(format!("n = {n} outside 1..={MAX_N}")));
        }
        let mut pairs = Vec::new();
        for (x, y) in edges {
            if !x.fits(n) || !y.fits(n) {
                return Err(Error::invalid(format!("edge {x} {y} leaves Q_{n}")));
            }
            if !are_adjacent(x, y) {
                return Err(Error::invalid(format!("{x} and {y} are not adjacent in Q_{n}")));
            }
            pairs.push(if x < y { (x, y) } else { (y, x) });
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut vertices: Vec<SubsetMask> = pairs.iter().flat_map(|&(x, y)| [x, y]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let index: HashMap<SubsetMask, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        for (x, y) in pairs {
            let (i, j) = (index[&x], index[&y]);
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(QnGraph { n, vertices, adj })
    }

    /// The subgraph of Q_n induced on `vertices`.
    pub fn induced<I>(n: u32, vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = SubsetMask>,
    {
        if n == 0 || n > MAX_N {
            return Err(Error::invalid(format!("n = {n} outside 1..={MAX_N}")));
        }
        let mut vs: Vec<SubsetMask> = vertices.into_iter().collect();
        if let Some(bad) = vs.iter().find(|v| !v.fits(n)) {
            return Err(Error::invalid(format!("vertex {bad} outside Q_{n}")));
        }
        vs.sort_unstable();
        vs.dedup();
        let index: HashMap<SubsetMask, u32> =
            vs.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let adj = vs
            .iter()
            .map(|&v| {
                let mut list: Vec<u32> = (0..n)
                    .filter_map(|i| index.get(&SubsetMask(v.0 ^ (1u64 << i))).copied())
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Ok(QnGraph {
            n,
            vertices: vs,
            adj,
        })
    }

    /// The full layer L_r(n).
    pub fn full_layer(layer: LayerId) -> Result<Self> {
        let lower = layer_vertices(layer, Side::Lower)?;
        let upper = layer_vertices(layer, Side::Upper)?;
        Self::induced(layer.n, lower.chain(upper))
    }

    /// All of Q_n.
    pub fn cube(n: u32) -> Result<Self> {
        check_capacity(n)?;
        Self::induced(n, (0..1u64 << n).map(SubsetMask))
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn vertices(&self) -> &[SubsetMask] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, i: u32) -> SubsetMask {
        self.vertices[i as usize]
    }

    #[inline]
    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.adj[i as usize]
    }

    pub fn index_of(&self, v: SubsetMask) -> Option<u32> {
        self.vertices.binary_search(&v).ok().map(|i| i as u32)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, x: SubsetMask, y: SubsetMask) -> bool {
        match (self.index_of(x), self.index_of(y)) {
            (Some(i), Some(j)) => self.adj[i as usize].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Edges as (smaller mask, larger mask), sorted.
    pub fn edges(&self) -> Vec<(SubsetMask, SubsetMask)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, list) in self.adj.iter().enumerate() {
            for &j in list {
                if (i as u32) < j {
                    out.push((self.vertices[i], self.vertices[j as usize]));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(elems: &[u32]) -> SubsetMask {
        SubsetMask::from_elements(elems)
    }

    #[test]
    fn adjacency() {
        assert!(are_adjacent(s(&[1]), s(&[1, 2])));
        assert!(!are_adjacent(s(&[1]), s(&[2])));
        assert!(!are_adjacent(s(&[1]), s(&[1])));
    }

    #[test]
    fn q3_has_twelve_up_pairs() {
        let mut count = 0;
        for x in 0..8u64 {
            for y in 0..8u64 {
                if are_adjacent(SubsetMask(x), SubsetMask(y)) && y.count_ones() > x.count_ones() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 12);
        assert_eq!(cube_edge_count(3), 12);
    }

    #[test]
    fn layer_vertices_small() {
        let layer = LayerId::new(3, 2).unwrap();
        let up: Vec<_> = layer_vertices(layer, Side::Upper).unwrap().collect();
        assert_eq!(up, vec![s(&[1, 2]), s(&[1, 3]), s(&[2, 3])]);
        let low: Vec<_> = layer_vertices(layer, Side::Lower).unwrap().collect();
        assert_eq!(low, vec![s(&[1]), s(&[2]), s(&[3])]);
        let first = LayerId::new(5, 1).unwrap();
        let low: Vec<_> = layer_vertices(first, Side::Lower).unwrap().collect();
        assert_eq!(low, vec![SubsetMask::EMPTY]);
    }

    #[test]
    fn layer_vertices_count_and_order() {
        let layer = LayerId::new(10, 4).unwrap();
        let up: Vec<_> = layer_vertices(layer, Side::Upper).unwrap().collect();
        assert_eq!(up.len(), 210);
        assert!(up.windows(2).all(|w| w[0] < w[1]));
        assert!(up.iter().all(|v| v.len() == 4 && v.fits(10)));
        // The top word must terminate instead of overflowing.
        let full: Vec<_> = SubsetIter {
            next: Some(u64::MAX),
            limit: u64::MAX,
        }
        .collect();
        assert_eq!(full, vec![SubsetMask(u64::MAX)]);
    }

    #[test]
    fn subsets_match_filtering() {
        for n in 0..=10 {
            for k in 0..=n {
                let fast: Vec<_> = subsets_of_size(n, k).unwrap().map(|m| m.0).collect();
                let slow: Vec<_> = (0..1u64 << n).filter(|m| m.count_ones() == k).collect();
                assert_eq!(fast, slow, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn capacity_error_past_cap() {
        if enumeration_capacity() == DEFAULT_CAPACITY {
            let layer = LayerId::new(30, 3).unwrap();
            assert!(matches!(layer_vertices(layer, Side::Upper), Err(Error::Capacity(_))));
        }
    }

    #[test]
    fn invalid_layers() {
        assert!(LayerId::new(3, 0).is_err());
        assert!(LayerId::new(3, 4).is_err());
        assert!(LayerId::new(0, 0).is_err());
    }

    #[test]
    fn layer_edge_counts() {
        assert_eq!(layer_edge_count(LayerId::new(3, 2).unwrap()), 6);
        assert_eq!(layer_edge_count(LayerId::new(1, 1).unwrap()), 1);
        // Direct enumeration of inclusion pairs.
        for n in 1..=9 {
            for r in 1..=n {
                let layer = LayerId::new(n, r).unwrap();
                let mut pairs = 0u128;
                for x in layer_vertices(layer, Side::Lower).unwrap() {
                    for y in layer_vertices(layer, Side::Upper).unwrap() {
                        if x.is_subset_of(y) {
                            pairs += 1;
                        }
                    }
                }
                assert_eq!(layer_edge_count(layer), pairs);
            }
        }
    }

    #[test]
    fn layers_partition_cube_edges() {
        for n in 1..=12 {
            let total: u128 = (1..=n).map(|r| layer_edge_count(LayerId::new(n, r).unwrap())).sum();
            assert_eq!(total, cube_edge_count(n));
        }
        for n in 1..=10u32 {
            let mut per_layer = vec![0u128; n as usize + 1];
            for x in 0..1u64 << n {
                for i in 0..n {
                    let y = x | 1 << i;
                    if y != x {
                        per_layer[y.count_ones() as usize] += 1;
                    }
                }
            }
            for r in 1..=n {
                assert_eq!(per_layer[r as usize], layer_edge_count(LayerId::new(n, r).unwrap()));
            }
        }
    }

    #[test]
    fn odd_layers_hold_half_the_edges() {
        for n in 2..=14 {
            let odd: u128 = (1..=n)
                .step_by(2)
                .map(|r| layer_edge_count(LayerId::new(n, r).unwrap()))
                .sum();
            assert_eq!(2 * odd, cube_edge_count(n));
        }
    }

    #[test]
    fn full_layer_is_bipartite_with_binomial_parts() {
        for n in 1..=8 {
            for r in 1..=n {
                let g = QnGraph::full_layer(LayerId::new(n, r).unwrap()).unwrap();
                let low = g.vertices().iter().filter(|v| v.len() == r - 1).count();
                let up = g.vertices().iter().filter(|v| v.len() == r).count();
                assert_eq!(low as u128, binomial(n, r - 1));
                assert_eq!(up as u128, binomial(n, r));
                assert_eq!(g.edge_count() as u128, layer_edge_count(LayerId::new(n, r).unwrap()));
                for (x, y) in g.edges() {
                    assert_eq!(x.len() + 1, y.len());
                }
            }
        }
    }

    #[test]
    fn graph_from_edges_rejects_non_edges() {
        assert!(QnGraph::from_edges(3, [(s(&[1]), s(&[2]))]).is_err());
        assert!(QnGraph::from_edges(2, [(s(&[3]), s(&[]))]).is_err());
        let g = QnGraph::from_edges(2, [(s(&[1]), s(&[])), (s(&[]), s(&[1]))]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(s(&[]), s(&[1])));
    }

    #[test]
    fn cube_graph_counts() {
        for n in 1..=8 {
            assert_eq!(QnGraph::cube(n).unwrap().edge_count() as u128, cube_edge_count(n));
        }
    }

    proptest! {
        #[test]
        fn hex_round_trip(m in any::<u64>()) {
            let v = SubsetMask(m);
            prop_assert_eq!(SubsetMask::from_hex(&v.to_hex()), Some(v));
        }
    }
}
