//! Freeness checks for subgraphs of Q_n.
//!
//! Three independent routes:
//! - [`find_c6_structured`] scans for the middle layer of a 3-dimensional
//!   subcube, which is the only shape a 6-cycle can take inside one layer;
//! - [`find_cycle_generic`] is an exhaustive backtracking search for a cycle of
//!   any even length in an arbitrary subgraph;
//! - [`find_c6_minus`] looks for 5-edge paths whose endpoints are adjacent in
//!   Q_n, whether or not the closing edge is present.
//!
//! [`explain_c6_impossibility`] replays the quotient-space argument on a
//! concrete assignment and pattern and reports which basis condition breaks.

use std::fmt;

use rayon::prelude::*;

use crate::construction::{LayerSubgraph, VectorAssignment};
use crate::cube::{are_adjacent, subsets_of_size, QnGraph, SubsetMask};
use crate::error::{Error, Result};
use crate::gf2::{self, GF2Vec};

/// A core `I` with `|I| = r - 2` plus three further elements `a < b < c`.
/// The six sets `I+a, I+b, I+c, I+ab, I+ac, I+bc` span a 6-cycle of L_r(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubcubePattern {
    pub core: SubsetMask,
    pub triple: [u32; 3],
}

impl SubcubePattern {
    pub fn new(core: SubsetMask, triple: [u32; 3]) -> Result<Self> {
        let [a, b, c] = triple;
        if !(a >= 1 && a < b && b < c && c <= 64) {
            return Err(Error::invalid(format!("triple {triple:?} is not increasing in [64]")));
        }
        if triple.iter().any(|&e| core.contains(e)) {
            return Err(Error::invalid(format!("triple {triple:?} meets core {core:?}")));
        }
        Ok(SubcubePattern { core, triple })
    }

    fn with(&self, elems: &[u32]) -> SubsetMask {
        SubsetMask(elems.iter().fold(self.core.0, |m, &e| m | 1 << (e - 1)))
    }

    /// `I+a, I+b, I+c`.
    pub fn lower_vertices(&self) -> [SubsetMask; 3] {
        let [a, b, c] = self.triple;
        [self.with(&[a]), self.with(&[b]), self.with(&[c])]
    }

    /// `I+ab, I+ac, I+bc`.
    pub fn upper_vertices(&self) -> [SubsetMask; 3] {
        let [a, b, c] = self.triple;
        [self.with(&[a, b]), self.with(&[a, c]), self.with(&[b, c])]
    }

    /// The six vertices in cyclic order starting at `I+a`.
    pub fn cycle(&self) -> CycleWitness {
        let [a, b, c] = self.triple;
        CycleWitness {
            vertices: vec![
                self.with(&[a]),
                self.with(&[a, b]),
                self.with(&[b]),
                self.with(&[b, c]),
                self.with(&[c]),
                self.with(&[a, c]),
            ],
        }
    }

    /// Whether all six vertices are present on the right sides of `g`.
    pub fn embedded_in(&self, g: &LayerSubgraph) -> bool {
        self.core.len() + 2 == g.layer().r()
            && self.lower_vertices().iter().all(|&v| g.has_lower(v))
            && self.upper_vertices().iter().all(|&v| g.has_upper(v))
    }
}

/// A cycle in Q_n given by its vertices in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleWitness {
    pub vertices: Vec<SubsetMask>,
}

impl CycleWitness {
    pub fn length(&self) -> usize {
        self.vertices.len()
    }

    /// Distinct vertices, cyclically adjacent in Q_n, at least 4 of them.
    pub fn is_valid(&self) -> bool {
        let vs = &self.vertices;
        vs.len() >= 4
            && distinct(vs)
            && (0..vs.len()).all(|i| are_adjacent(vs[i], vs[(i + 1) % vs.len()]))
    }

    /// Valid and every edge present in `g`.
    pub fn is_valid_in(&self, g: &QnGraph) -> bool {
        let vs = &self.vertices;
        self.is_valid() && (0..vs.len()).all(|i| g.has_edge(vs[i], vs[(i + 1) % vs.len()]))
    }

    /// Number of times each coordinate is flipped going once around.
    pub fn direction_counts(&self) -> [u32; 64] {
        let mut counts = [0u32; 64];
        let vs = &self.vertices;
        for i in 0..vs.len() {
            let diff = vs[i].0 ^ vs[(i + 1) % vs.len()].0;
            counts[diff.trailing_zeros() as usize] += 1;
        }
        counts
    }
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.vertices.len())?;
        for v in &self.vertices {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

/// Five consecutive Q_n edges whose endpoints differ in one coordinate: a
/// 6-cycle of Q_n with one edge removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWitness {
    pub vertices: [SubsetMask; 6],
}

impl PathWitness {
    pub fn is_valid(&self) -> bool {
        let vs = &self.vertices;
        distinct(vs) && vs.windows(2).all(|w| are_adjacent(w[0], w[1])) && are_adjacent(vs[0], vs[5])
    }

    pub fn is_valid_in(&self, g: &QnGraph) -> bool {
        self.is_valid() && self.vertices.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

impl fmt::Display for PathWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C6-")?;
        for v in &self.vertices {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

fn distinct(vs: &[SubsetMask]) -> bool {
    let mut sorted = vs.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// A parsed witness line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Cycle(CycleWitness),
    Path(PathWitness),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Cycle(c) => c.fmt(f),
            Witness::Path(p) => p.fmt(f),
        }
    }
}

/// Parses `C<len> <hex>...` or `C6- <hex> x6`.
pub fn parse_witness(line: &str) -> Result<Witness> {
    let mut parts = line.split_whitespace();
    let tag = parts.next().ok_or_else(|| Error::parse(1, "empty witness line"))?;
    let masks = parts
        .map(|h| SubsetMask::from_hex(h).ok_or_else(|| Error::parse(1, format!("bad mask {h:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if tag == "C6-" {
        let vertices: [SubsetMask; 6] = masks
            .try_into()
            .map_err(|_| Error::parse(1, "C6- needs exactly 6 masks"))?;
        return Ok(Witness::Path(PathWitness { vertices }));
    }
    let len: usize = tag
        .strip_prefix('C')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, format!("unknown witness tag {tag:?}")))?;
    if len != masks.len() {
        return Err(Error::parse(1, format!("{tag} lists {} masks", masks.len())));
    }
    Ok(Witness::Cycle(CycleWitness { vertices: masks }))
}

/// First pattern (core by increasing mask, then triples lexicographically)
/// whose six vertices all lie in `g`.
pub fn find_c6_structured(g: &LayerSubgraph) -> Option<SubcubePattern> {
    let layer = g.layer();
    let (n, r) = (layer.n(), layer.r());
    if r < 2 || n < r + 1 {
        return None;
    }
    let cores = subsets_of_size(n, r - 2).expect("graph exists so the layer is enumerable");
    for core in cores {
        // Elements a outside the core with I+a kept; triples must come from these.
        let cand: Vec<u32> = (1..=n)
            .filter(|&e| !core.contains(e) && g.has_lower(SubsetMask(core.0 | 1 << (e - 1))))
            .collect();
        let up = |x: u32, y: u32| g.has_upper(SubsetMask(core.0 | 1 << (x - 1) | 1 << (y - 1)));
        for (i, &a) in cand.iter().enumerate() {
            for (j, &b) in cand.iter().enumerate().skip(i + 1) {
                if !up(a, b) {
                    continue;
                }
                for &c in &cand[j + 1..] {
                    if up(a, c) && up(b, c) {
                        return Some(SubcubePattern { core, triple: [a, b, c] });
                    }
                }
            }
        }
    }
    None
}

/// Lengths the generic search accepts.
pub fn check_cycle_length(length: usize) -> Result<()> {
    if length < 4 || length % 2 == 1 || length > 64 {
        return Err(Error::invalid(format!(
            "cycle length must be even and in 4..=64, got {length}"
        )));
    }
    Ok(())
}

/// Exhaustive search for a cycle of exactly `length` edges.
///
/// Each cycle is found only from its smallest vertex, in the direction whose
/// second vertex is smaller than its last. Branches are cut when the Hamming
/// distance back to the start exceeds the remaining steps, which is exact in
/// Q_n. The lowest start with a cycle wins, so the answer does not depend on
/// the thread count.
pub fn find_cycle_generic(g: &QnGraph, length: usize) -> Result<Option<CycleWitness>> {
    check_cycle_length(length)?;
    let n_vertices = g.vertex_count() as u32;
    Ok((0..n_vertices).into_par_iter().find_map_first(|s| {
        let mut path = Vec::with_capacity(length);
        path.push(s);
        cycle_dfs(g, length, &mut path).then(|| CycleWitness {
            vertices: path.iter().map(|&i| g.vertex(i)).collect(),
        })
    }))
}

/// Same search on the calling thread only.
pub fn find_cycle_sequential(g: &QnGraph, length: usize) -> Result<Option<CycleWitness>> {
    check_cycle_length(length)?;
    for s in 0..g.vertex_count() as u32 {
        let mut path = Vec::with_capacity(length);
        path.push(s);
        if cycle_dfs(g, length, &mut path) {
            return Ok(Some(CycleWitness {
                vertices: path.iter().map(|&i| g.vertex(i)).collect(),
            }));
        }
    }
    Ok(None)
}

fn cycle_dfs(g: &QnGraph, length: usize, path: &mut Vec<u32>) -> bool {
    let start = path[0];
    let start_mask = g.vertex(start);
    let here = *path.last().expect("path starts non-empty");
    let remaining = length - (path.len() - 1);
    if remaining == 1 {
        return path[1] < here && g.neighbors(here).binary_search(&start).is_ok();
    }
    for &w in g.neighbors(here) {
        if w <= start || path.contains(&w) {
            continue;
        }
        if g.vertex(w).distance(start_mask) as usize > remaining - 1 {
            continue;
        }
        path.push(w);
        if cycle_dfs(g, length, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// First 5-edge path (by lowest starting vertex) whose endpoints differ in
/// exactly one coordinate. Each path is reported from its smaller endpoint.
pub fn find_c6_minus(g: &QnGraph) -> Option<PathWitness> {
    let n_vertices = g.vertex_count() as u32;
    (0..n_vertices).into_par_iter().find_map_first(|s| {
        let mut path = Vec::with_capacity(6);
        path.push(s);
        path_dfs(g, &mut path).then(|| PathWitness {
            vertices: std::array::from_fn(|i| g.vertex(path[i])),
        })
    })
}

fn path_dfs(g: &QnGraph, path: &mut Vec<u32>) -> bool {
    let start = path[0];
    let start_mask = g.vertex(start);
    let here = *path.last().expect("path starts non-empty");
    let used = path.len() - 1;
    if used == 5 {
        return here > start && g.vertex(here).distance(start_mask) == 1;
    }
    let left_after = 5 - used - 1;
    for &w in g.neighbors(here) {
        if path.contains(&w) {
            continue;
        }
        // The endpoint must land at distance exactly 1 from the start.
        if g.vertex(w).distance(start_mask) as usize > left_after + 1 {
            continue;
        }
        path.push(w);
        if path_dfs(g, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// One of the seven basis conditions a structured 6-cycle would impose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum C6Condition {
    /// `M(I)` is linearly independent.
    CoreIndependent,
    /// `{v_i, v_j} + M(I)` is a basis (an upper vertex `I+ij` is kept).
    UpperPair(u32, u32),
    /// `{v0, v_i} + M(I)` is a basis (a lower vertex `I+i` is kept).
    LowerSingle(u32),
}

impl fmt::Display for C6Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C6Condition::CoreIndependent => write!(f, "M(I) independent"),
            C6Condition::UpperPair(i, j) => write!(f, "{{v{i}, v{j}}} + M(I) is a basis"),
            C6Condition::LowerSingle(i) => write!(f, "{{v0, v{i}}} + M(I) is a basis"),
        }
    }
}

/// Images of `v0, v_a, v_b, v_c` in `F_2^r / Span(M(I))`, a plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientImages {
    /// Labels are 0 for `v0` and the element index otherwise.
    pub labels: [u32; 4],
    pub images: [GF2Vec; 4],
}

impl QuotientImages {
    /// Labels whose image is zero.
    pub fn zeros(&self) -> Vec<u32> {
        (0..4)
            .filter(|&i| self.images[i].is_zero())
            .map(|i| self.labels[i])
            .collect()
    }

    /// First pair of labels (in `0, a, b, c` order) with equal images.
    pub fn first_collision(&self) -> Option<(u32, u32)> {
        (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .find(|&(i, j)| self.images[i] == self.images[j])
            .map(|(i, j)| (self.labels[i], self.labels[j]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The first condition (in checking order) that fails.
    ConditionFails(C6Condition),
    /// All seven conditions hold, so four distinct nonzero vectors would have
    /// to live in a 3-element set. Never expected.
    PigeonholeViolation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationReport {
    pub pattern: SubcubePattern,
    /// Every failing condition, in checking order: core, then the pairs
    /// `ab, ac, bc`, then the singles `a, b, c`.
    pub failed: Vec<C6Condition>,
    /// Present whenever `M(I)` is independent.
    pub images: Option<QuotientImages>,
    pub verdict: Verdict,
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::ConditionFails(c) => write!(f, "fails: {c}")?,
            Verdict::PigeonholeViolation => {
                write!(f, "four distinct nonzero elements required in a 3-element set")?
            }
        }
        if let Some(q) = &self.images {
            if let Some((i, j)) = q.first_collision() {
                write!(f, "; x{i} = x{j} in the quotient")?;
            }
        }
        Ok(())
    }
}

/// Checks the seven basis conditions the pattern would need under `a`.
pub fn explain_c6_impossibility(a: &VectorAssignment, p: &SubcubePattern) -> Result<ViolationReport> {
    let (n, r) = (a.n(), a.r());
    if r < 2 || p.core.len() != r - 2 {
        return Err(Error::invalid(format!(
            "core {:?} has size {}, need r - 2 = {}",
            p.core,
            p.core.len(),
            r as i64 - 2
        )));
    }
    if !p.core.fits(n) || p.triple.iter().any(|&e| e == 0 || e > n) {
        return Err(Error::invalid(format!("pattern {p:?} leaves [{n}]")));
    }
    let [ea, eb, ec] = p.triple;
    let core = crate::construction::multiset_of(a, p.core);
    let basis_with = |extra: &[GF2Vec]| -> bool {
        let mut vs = core.clone();
        vs.extend_from_slice(extra);
        gf2::is_basis(&vs, r).expect("dimensions match")
    };

    let mut failed = Vec::new();
    let core_ok = gf2::rank(&core, r).expect("dimensions match") as usize == core.len();
    if !core_ok {
        failed.push(C6Condition::CoreIndependent);
    }
    for (i, j) in [(ea, eb), (ea, ec), (eb, ec)] {
        if !basis_with(&[a.vector(i), a.vector(j)]) {
            failed.push(C6Condition::UpperPair(i, j));
        }
    }
    for i in [ea, eb, ec] {
        if !basis_with(&[a.v0(), a.vector(i)]) {
            failed.push(C6Condition::LowerSingle(i));
        }
    }

    let images = if core_ok {
        let img = |v: GF2Vec| gf2::quotient_image(v, &core).expect("core is independent");
        Some(QuotientImages {
            labels: [0, ea, eb, ec],
            images: [img(a.v0()), img(a.vector(ea)), img(a.vector(eb)), img(a.vector(ec))],
        })
    } else {
        None
    };

    let verdict = match failed.first() {
        Some(&c) => Verdict::ConditionFails(c),
        None => Verdict::PigeonholeViolation,
    };
    Ok(ViolationReport {
        pattern: *p,
        failed,
        images,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_layer_graph, sample_assignment};
    use crate::cube::LayerId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(e: &[u32]) -> SubsetMask {
        SubsetMask::from_elements(e)
    }

    fn gv(bits: u64, r: u32) -> GF2Vec {
        GF2Vec::new(bits, r).unwrap()
    }

    // Naive oracle: every simple cycle through every start, no pruning and no
    // symmetry breaking.
    fn naive_has_cycle(g: &QnGraph, length: usize) -> bool {
        fn go(g: &QnGraph, length: usize, path: &mut Vec<u32>) -> bool {
            let here = *path.last().unwrap();
            if path.len() == length {
                return g.neighbors(here).contains(&path[0]);
            }
            for &w in g.neighbors(here) {
                if !path.contains(&w) {
                    path.push(w);
                    if go(g, length, path) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        (0..g.vertex_count() as u32).any(|s| go(g, length, &mut vec![s]))
    }

    fn random_induced(n: u32, keep: f64, rng: &mut ChaCha8Rng) -> QnGraph {
        let vs: Vec<_> = (0..1u64 << n)
            .filter(|_| rng.gen_bool(keep))
            .map(SubsetMask)
            .collect();
        QnGraph::induced(n, vs).unwrap()
    }

    #[test]
    fn full_middle_layer_has_structured_c6() {
        let g = LayerSubgraph::full(LayerId::new(4, 2).unwrap()).unwrap();
        let p = find_c6_structured(&g).unwrap();
        assert_eq!(p, SubcubePattern { core: SubsetMask::EMPTY, triple: [1, 2, 3] });
        assert!(p.embedded_in(&g));
        assert!(p.cycle().is_valid_in(&g.to_graph()));
        assert_eq!(p.cycle().to_string(), "C6 1 3 2 6 4 5");
    }

    #[test]
    fn constructed_layers_have_no_c6() {
        for n in 2..=9 {
            for r in 1..=n {
                for seed in 0..4 {
                    let a = sample_assignment(n, r, seed).unwrap();
                    let g = build_layer_graph(&a).unwrap();
                    assert_eq!(find_c6_structured(&g), None, "n={n} r={r} seed={seed}");
                    assert_eq!(find_cycle_generic(&g.to_graph(), 6).unwrap(), None);
                }
            }
        }
    }

    #[test]
    fn structured_agrees_with_generic_on_random_l37() {
        let layer = LayerId::new(7, 3).unwrap();
        let full = LayerSubgraph::full(layer).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut found = 0;
        for _ in 0..500 {
            let keep = rng.gen_range(0.2..0.9);
            let vs = full.lower().iter().chain(full.upper()).copied().filter(|_| rng.gen_bool(keep));
            let g = LayerSubgraph::induced(layer, vs).unwrap();
            let structured = find_c6_structured(&g);
            let generic = find_cycle_generic(&g.to_graph(), 6).unwrap();
            assert_eq!(structured.is_some(), generic.is_some());
            found += structured.is_some() as u32;
        }
        assert!(found > 0 && found < 500);
    }

    #[test]
    fn square_in_q2() {
        let q2 = QnGraph::cube(2).unwrap();
        let w = find_cycle_generic(&q2, 4).unwrap().unwrap();
        assert!(w.is_valid_in(&q2));
        assert_eq!(w.to_string(), "C4 0 1 3 2");
    }

    #[test]
    fn layers_have_no_c4() {
        for n in 1..=7 {
            for r in 1..=n {
                let g = QnGraph::full_layer(LayerId::new(n, r).unwrap()).unwrap();
                assert_eq!(find_cycle_generic(&g, 4).unwrap(), None);
            }
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        let q2 = QnGraph::cube(2).unwrap();
        assert!(find_cycle_generic(&q2, 5).is_err());
        assert!(find_cycle_generic(&q2, 2).is_err());
    }

    fn planted_ten_cycle() -> Vec<SubsetMask> {
        // Flip directions 1..5 then 1..5 again from the empty set.
        let mut v = 0u64;
        let mut out = Vec::new();
        for i in (0..5).chain(0..5) {
            out.push(SubsetMask(v));
            v ^= 1 << i;
        }
        out
    }

    #[test]
    fn planted_c10_is_found() {
        let cycle = planted_ten_cycle();
        assert!(CycleWitness { vertices: cycle.clone() }.is_valid());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut edges: Vec<_> = (0..10).map(|i| (cycle[i], cycle[(i + 1) % 10])).collect();
            let mut extra = Vec::new();
            while extra.len() < 20 {
                let v = SubsetMask(rng.gen_range(0..32));
                if !cycle.contains(&v) && !extra.contains(&v) {
                    extra.push(v);
                }
            }
            // Extra vertices hang off the cube edges to the cycle and each other.
            let all: Vec<_> = cycle.iter().chain(&extra).copied().collect();
            for &x in &extra {
                for &y in &all {
                    if are_adjacent(x, y) && rng.gen_bool(0.5) {
                        edges.push((x, y));
                    }
                }
            }
            let g = QnGraph::from_edges(5, edges).unwrap();
            let w = find_cycle_generic(&g, 10).unwrap().expect("planted cycle");
            assert!(w.is_valid_in(&g));
            assert_eq!(w.length(), 10);
            assert!(w.direction_counts().iter().all(|c| c % 2 == 0));
        }
    }

    #[test]
    fn generic_matches_naive_on_q4_subgraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..150 {
            let keep = rng.gen_range(0.4..1.0);
            let base = random_induced(4, keep, &mut rng);
            // Drop some edges too, so graphs are not always induced.
            let edges: Vec<_> = base.edges().into_iter().filter(|_| rng.gen_bool(0.85)).collect();
            let g = QnGraph::from_edges(4, edges).unwrap();
            for len in [4, 6, 8, 10] {
                let got = find_cycle_generic(&g, len).unwrap();
                assert_eq!(got.is_some(), naive_has_cycle(&g, len), "len {len}");
                if let Some(w) = got {
                    assert!(w.is_valid_in(&g));
                    assert!(w.direction_counts().iter().all(|c| c % 2 == 0));
                    assert_eq!(Some(w), find_cycle_sequential(&g, len).unwrap());
                }
            }
        }
    }

    #[test]
    fn c6_minus_basic_cases() {
        let q3 = QnGraph::cube(3).unwrap();
        let hexagon = SubcubePattern { core: SubsetMask::EMPTY, triple: [1, 2, 3] }.cycle();
        let vs = &hexagon.vertices;
        let minus = QnGraph::from_edges(3, (0..5).map(|i| (vs[i], vs[i + 1]))).unwrap();
        let w = find_c6_minus(&minus).unwrap();
        assert!(w.is_valid_in(&minus));
        assert!(w.is_valid_in(&q3));

        let mut v = 0u64;
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((SubsetMask(v), SubsetMask(v ^ 1 << i)));
            v ^= 1 << i;
        }
        let straight = QnGraph::from_edges(5, edges).unwrap();
        assert_eq!(find_c6_minus(&straight), None);
    }

    #[test]
    fn c6_minus_iff_c6_within_a_layer() {
        let layer = LayerId::new(7, 3).unwrap();
        let full = LayerSubgraph::full(layer).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let keep = rng.gen_range(0.2..0.9);
            let vs = full.lower().iter().chain(full.upper()).copied().filter(|_| rng.gen_bool(keep));
            let g = LayerSubgraph::induced(layer, vs).unwrap().to_graph();
            let minus = find_c6_minus(&g);
            if let Some(w) = &minus {
                assert!(w.is_valid_in(&g));
            }
            assert_eq!(minus.is_some(), find_cycle_generic(&g, 6).unwrap().is_some());
        }
    }

    #[test]
    fn c6_minus_can_exist_without_c6_across_layers() {
        // The path 0-1-3-7-6-4 climbs three layers; its endpoints are adjacent.
        let path = [0u64, 1, 3, 7, 6, 4].map(SubsetMask);
        let g = QnGraph::from_edges(3, path.windows(2).map(|w| (w[0], w[1]))).unwrap();
        assert!(find_c6_minus(&g).is_some());
        assert_eq!(find_cycle_generic(&g, 6).unwrap(), None);
    }

    #[test]
    fn witness_lines_round_trip() {
        let c = SubcubePattern { core: s(&[5]), triple: [1, 2, 3] }.cycle();
        let line = c.to_string();
        assert_eq!(parse_witness(&line).unwrap(), Witness::Cycle(c));
        let p = PathWitness { vertices: [0u64, 1, 3, 7, 6, 4].map(SubsetMask) };
        assert_eq!(p.to_string(), "C6- 0 1 3 7 6 4");
        assert_eq!(parse_witness(&p.to_string()).unwrap(), Witness::Path(p));
        assert!(parse_witness("C6 1 2").is_err());
        assert!(parse_witness("X 1").is_err());
    }

    #[test]
    fn explain_repeated_pair() {
        let a = VectorAssignment::new(3, 2, gv(1, 2), vec![gv(2, 2), gv(2, 2), gv(3, 2)]).unwrap();
        let p = SubcubePattern::new(SubsetMask::EMPTY, [1, 2, 3]).unwrap();
        let rep = explain_c6_impossibility(&a, &p).unwrap();
        assert_eq!(rep.verdict, Verdict::ConditionFails(C6Condition::UpperPair(1, 2)));
        assert_eq!(rep.images.unwrap().first_collision(), Some((1, 2)));
    }

    #[test]
    fn explain_pigeonhole_collision() {
        // x0 = 01, x1 = 10, x2 = 11, x3 = 10: all three nonzero values, x1 repeated.
        let a = VectorAssignment::new(3, 2, gv(1, 2), vec![gv(2, 2), gv(3, 2), gv(2, 2)]).unwrap();
        let p = SubcubePattern::new(SubsetMask::EMPTY, [1, 2, 3]).unwrap();
        let rep = explain_c6_impossibility(&a, &p).unwrap();
        assert_eq!(rep.failed, vec![C6Condition::UpperPair(1, 3)]);
        assert_eq!(rep.images.unwrap().first_collision(), Some((1, 3)));
        assert!(rep.to_string().contains("x1 = x3"));
    }

    #[test]
    fn explain_checks_core_size() {
        let a = sample_assignment(8, 4, 0).unwrap();
        let p = SubcubePattern::new(s(&[4]), [1, 2, 3]).unwrap();
        assert!(matches!(explain_c6_impossibility(&a, &p), Err(Error::InvalidArgument(_))));
        assert!(SubcubePattern::new(s(&[1]), [1, 2, 3]).is_err());
        assert!(SubcubePattern::new(SubsetMask::EMPTY, [2, 1, 3]).is_err());
    }

    #[test]
    fn explain_never_passes_all_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..10_000 {
            let a = sample_assignment(8, 4, seed).unwrap();
            let mut elems: Vec<u32> = (1..=8).collect();
            for i in 0..5 {
                let j = rng.gen_range(i..8);
                elems.swap(i, j);
            }
            let core = s(&elems[..2]);
            let mut triple = [elems[2], elems[3], elems[4]];
            triple.sort_unstable();
            let p = SubcubePattern::new(core, triple).unwrap();
            let rep = explain_c6_impossibility(&a, &p).unwrap();
            assert_ne!(rep.verdict, Verdict::PigeonholeViolation);
            // Quotient view agrees with the direct basis checks.
            if let Some(q) = rep.images {
                let [x0, xa, xb, xc] = q.images;
                let plane_basis = |x: GF2Vec, y: GF2Vec| !x.is_zero() && !y.is_zero() && x != y;
                let [ea, eb, ec] = triple;
                for (i, j, x, y) in [(ea, eb, xa, xb), (ea, ec, xa, xc), (eb, ec, xb, xc)] {
                    assert_eq!(plane_basis(x, y), !rep.failed.contains(&C6Condition::UpperPair(i, j)));
                }
                for (i, x) in [(ea, xa), (eb, xb), (ec, xc)] {
                    assert_eq!(plane_basis(x0, x), !rep.failed.contains(&C6Condition::LowerSingle(i)));
                }
            }
        }
    }
}
