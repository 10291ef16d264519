//! Random vector assignments and the C6-free layer subgraphs they induce.
//!
//! Each element `i` of [n] gets a uniform nonzero `v_i` in F_2^r. An r-set
//! survives when its vectors form a basis; an (r-1)-set survives when its
//! vectors together with the fixed `v0` form a basis. The surviving sets
//! induce a subgraph of the layer L_r(n) with no 6-cycle.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cube::{
    check_capacity, layer_edge_count, layer_vertices, LayerId, QnGraph, Side, SubsetMask, MAX_N,
};
use crate::error::{Error, Result};
use crate::gf2::{self, EchelonBasis, GF2Vec};

/// Number of factors in the exact partial product used to enclose `c`.
pub const ENCLOSURE_TERMS: u32 = 48;

/// Thresholds derived from `c` are rounded up onto this decimal grid.
pub const THRESHOLD_GRID: u64 = 1_000_000_000_000_000;

/// The vectors `v0, v_1, ..., v_n` in F_2^r.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorAssignment {
    n: u32,
    r: u32,
    v0: GF2Vec,
    v: Vec<GF2Vec>,
}

impl VectorAssignment {
    pub fn new(n: u32, r: u32, v0: GF2Vec, v: Vec<GF2Vec>) -> Result<Self> {
        if n == 0 || n > MAX_N || r == 0 || r > n || r > gf2::MAX_DIM {
            return Err(Error::invalid(format!("need 1 <= r <= n <= {MAX_N}, got n={n} r={r}")));
        }
        if v.len() != n as usize {
            return Err(Error::invalid(format!("expected {n} vectors, got {}", v.len())));
        }
        for (i, x) in std::iter::once(&v0).chain(&v).enumerate() {
            if x.dim() != r {
                return Err(Error::invalid(format!("v{i} has dimension {} not {r}", x.dim())));
            }
            if x.is_zero() {
                return Err(Error::invalid(format!("v{i} is zero")));
            }
        }
        Ok(VectorAssignment { n, r, v0, v })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn v0(&self) -> GF2Vec {
        self.v0
    }

    /// `v_i` for 1-based `i`.
    pub fn vector(&self, i: u32) -> GF2Vec {
        self.v[(i - 1) as usize]
    }

    pub fn vectors(&self) -> &[GF2Vec] {
        &self.v
    }

    pub fn layer(&self) -> LayerId {
        LayerId::new(self.n, self.r).expect("validated at construction")
    }

    /// Echelon form of `{v_i : i in s}` (plus `v0` when `with_v0`), or `None`
    /// as soon as a vector falls in the span of the earlier ones.
    fn independent_basis(&self, s: SubsetMask, with_v0: bool) -> Option<EchelonBasis> {
        let mut basis = EchelonBasis::new(self.r);
        if with_v0 {
            basis.insert_bits(self.v0.bits());
        }
        for i in s.elements() {
            if !basis.insert_bits(self.v[(i - 1) as usize].bits()) {
                return None;
            }
        }
        Some(basis)
    }

    #[inline]
    pub(crate) fn upper_unchecked(&self, s: SubsetMask) -> bool {
        self.independent_basis(s, false).is_some()
    }

    #[inline]
    pub(crate) fn lower_unchecked(&self, s: SubsetMask) -> bool {
        self.independent_basis(s, true).is_some()
    }

    fn check_subset(&self, s: SubsetMask, size: u32) -> Result<()> {
        if !s.fits(self.n) {
            return Err(Error::invalid(format!("{s:?} is not a subset of [{}]", self.n)));
        }
        if s.len() != size {
            return Err(Error::invalid(format!(
                "{s:?} has size {}, expected {size}",
                s.len()
            )));
        }
        Ok(())
    }
}

/// The multiset `{v_i : i in s}`.
pub fn multiset_of(a: &VectorAssignment, s: SubsetMask) -> Vec<GF2Vec> {
    s.elements()
        .filter(|&i| i <= a.n)
        .map(|i| a.vector(i))
        .collect()
}

/// Whether the r-set `s` is kept: its vectors form a basis of F_2^r.
pub fn member_upper(a: &VectorAssignment, s: SubsetMask) -> Result<bool> {
    a.check_subset(s, a.r)?;
    Ok(a.upper_unchecked(s))
}

/// Whether the (r-1)-set `s` is kept: `v0` with its vectors forms a basis.
pub fn member_lower(a: &VectorAssignment, s: SubsetMask) -> Result<bool> {
    a.check_subset(s, a.r - 1)?;
    Ok(a.lower_unchecked(s))
}

/// Samples `v_1..v_n` uniformly from the nonzero vectors, with `v0 = e_1`.
pub fn sample_assignment(n: u32, r: u32, seed: u64) -> Result<VectorAssignment> {
    if n == 0 || n > MAX_N || r == 0 || r > n {
        return Err(Error::invalid(format!("need 1 <= r <= n <= {MAX_N}, got n={n} r={r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..n).map(|_| gf2::sample_nonzero(&mut rng, r)).collect();
    VectorAssignment::new(n, r, GF2Vec::unit(0, r), v)
}

/// Mixes a base seed with a trial index into an independent stream seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    fn splitmix64(x: u64) -> u64 {
        let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix64(seed ^ splitmix64(index))
}

/// An induced subgraph of L_r(n), stored as its two vertex sides. An edge is
/// any inclusion pair between `lower` and `upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSubgraph {
    layer: LayerId,
    lower: Vec<SubsetMask>,
    upper: Vec<SubsetMask>,
}

impl LayerSubgraph {
    pub fn new(layer: LayerId, lower: Vec<SubsetMask>, upper: Vec<SubsetMask>) -> Result<Self> {
        let mut lower = lower;
        let mut upper = upper;
        for (side, size) in [(&lower, layer.r() - 1), (&upper, layer.r())] {
            if let Some(bad) = side.iter().find(|s| s.len() != size || !s.fits(layer.n())) {
                return Err(Error::invalid(format!(
                    "{bad:?} does not belong to side of size {size} in L_{}({})",
                    layer.r(),
                    layer.n()
                )));
            }
        }
        lower.sort_unstable();
        lower.dedup();
        upper.sort_unstable();
        upper.dedup();
        Ok(LayerSubgraph {
            layer,
            lower,
            upper,
        })
    }

    /// The whole layer.
    pub fn full(layer: LayerId) -> Result<Self> {
        Ok(LayerSubgraph {
            layer,
            lower: layer_vertices(layer, Side::Lower)?.collect(),
            upper: layer_vertices(layer, Side::Upper)?.collect(),
        })
    }

    /// Induced subgraph of the layer on an arbitrary vertex set; vertices of
    /// other sizes are ignored.
    pub fn induced<I>(layer: LayerId, vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = SubsetMask>,
    {
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for v in vertices {
            if v.len() + 1 == layer.r() {
                lower.push(v);
            } else if v.len() == layer.r() {
                upper.push(v);
            }
        }
        Self::new(layer, lower, upper)
    }

    pub fn layer(&self) -> LayerId {
        self.layer
    }

    pub fn lower(&self) -> &[SubsetMask] {
        &self.lower
    }

    pub fn upper(&self) -> &[SubsetMask] {
        &self.upper
    }

    pub fn has_lower(&self, s: SubsetMask) -> bool {
        self.lower.binary_search(&s).is_ok()
    }

    pub fn has_upper(&self, s: SubsetMask) -> bool {
        self.upper.binary_search(&s).is_ok()
    }

    pub fn contains(&self, s: SubsetMask) -> bool {
        self.has_lower(s) || self.has_upper(s)
    }

    /// Edges as (lower, upper) pairs, sorted by lower then upper.
    pub fn edges(&self) -> Vec<(SubsetMask, SubsetMask)> {
        let n = self.layer.n();
        let mut out = Vec::new();
        for &x in &self.lower {
            for j in 0..n {
                let y = SubsetMask(x.0 | 1 << j);
                if y != x && self.has_upper(y) {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> u128 {
        edge_count(self)
    }

    pub fn to_graph(&self) -> QnGraph {
        QnGraph::from_edges(self.layer.n(), self.edges()).expect("layer edges are cube edges")
    }
}

/// Number of pairs `(x, j)` with `x` in lower, `j` not in `x` and `x + j` in upper.
pub fn edge_count(g: &LayerSubgraph) -> u128 {
    let n = g.layer.n();
    g.lower
        .iter()
        .map(|&x| {
            (0..n)
                .filter(|&j| x.0 >> j & 1 == 0 && g.has_upper(SubsetMask(x.0 | 1 << j)))
                .count() as u128
        })
        .sum()
}

/// Materializes the surviving sets of both sides of the assignment's layer.
pub fn build_layer_graph(a: &VectorAssignment) -> Result<LayerSubgraph> {
    let layer = a.layer();
    let lower = layer_vertices(layer, Side::Lower)?
        .filter(|&s| a.lower_unchecked(s))
        .collect();
    let upper = layer_vertices(layer, Side::Upper)?
        .filter(|&s| a.upper_unchecked(s))
        .collect();
    Ok(LayerSubgraph {
        layer,
        lower,
        upper,
    })
}

/// Layer subgraphs for odd `r`, pairwise vertex-disjoint by cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionGraph {
    n: u32,
    layers: BTreeMap<u32, LayerSubgraph>,
}

impl UnionGraph {
    pub fn new(n: u32, layers: BTreeMap<u32, LayerSubgraph>) -> Result<Self> {
        for (&r, g) in &layers {
            if r % 2 == 0 || r == 0 || r > n {
                return Err(Error::invalid(format!("layer key {r} is not an odd r <= {n}")));
            }
            if g.layer() != LayerId::new(n, r)? {
                return Err(Error::invalid(format!(
                    "layer keyed {r} is L_{}({})",
                    g.layer().r(),
                    g.layer().n()
                )));
            }
        }
        Ok(UnionGraph { n, layers })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn layers(&self) -> &BTreeMap<u32, LayerSubgraph> {
        &self.layers
    }

    pub fn edge_count(&self) -> u128 {
        self.layers.values().map(edge_count).sum()
    }

    pub fn edges(&self) -> Vec<(SubsetMask, SubsetMask)> {
        let mut out: Vec<_> = self.layers.values().flat_map(|g| g.edges()).collect();
        out.sort_unstable();
        out
    }

    pub fn to_graph(&self) -> QnGraph {
        QnGraph::from_edges(self.n, self.edges()).expect("layer edges are cube edges")
    }
}

/// Builds `G_r` for each odd `r` in the map from its own assignment.
pub fn union_odd_layers(n: u32, assignments: &BTreeMap<u32, VectorAssignment>) -> Result<UnionGraph> {
    let mut layers = BTreeMap::new();
    for (&r, a) in assignments {
        if a.n() != n {
            return Err(Error::invalid(format!(
                "assignment for r={r} has n={}, expected {n}",
                a.n()
            )));
        }
        if a.r() != r {
            return Err(Error::invalid(format!("assignment keyed {r} has dimension {}", a.r())));
        }
        layers.insert(r, build_layer_graph(a)?);
    }
    UnionGraph::new(n, layers)
}

/// Probability that a fixed edge of L_r(n) survives:
/// `prod_{k=1}^{r-1} (2^r - 2^k)/(2^r - 1) * (2^r - 2^{r-1})/(2^r - 1)`.
pub fn edge_probability_closed_form(r: u32) -> BigRational {
    assert!(r >= 1, "r must be positive");
    let full = BigInt::one() << r;
    let denom = &full - 1;
    let mut num = BigInt::one();
    for k in 1..r {
        num *= &full - (BigInt::one() << k);
    }
    num *= &full - (BigInt::one() << (r - 1));
    BigRational::new(num, num_traits::pow(denom, r as usize))
}

/// `prod_{k=1}^{terms} (1 - 2^-k)` exactly.
pub fn c_partial_product(terms: u32) -> BigRational {
    let mut num = BigInt::one();
    for k in 1..=terms {
        num *= (BigInt::one() << k) - 1;
    }
    let den = BigInt::one() << (terms as u64 * (terms as u64 + 1) / 2);
    BigRational::new(num, den)
}

/// Rigorous bounds on `c = prod_{k>=1} (1 - 2^-k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CEnclosure {
    pub lo: BigRational,
    pub hi: BigRational,
    pub terms: u32,
}

/// The tail `prod_{k>K} (1 - 2^-k)` lies in `[1 - 2^-K, 1]`, so the partial
/// product `P_K` satisfies `P_K (1 - 2^-K) <= c <= P_K`.
pub fn c_enclosure(terms: u32) -> CEnclosure {
    let hi = c_partial_product(terms);
    let tail = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << terms);
    CEnclosure {
        lo: &hi * tail,
        hi,
        terms,
    }
}

/// `c / divisor` for `divisor` in {2, 4, 12}, never below the true value.
///
/// `c / 12` is rounded up onto the 10^-15 grid from the upper end of the
/// enclosure and the other two are exact multiples of it, so that beating
/// `c/2` on every odd layer implies beating `c/4` on their union exactly.
pub fn c_threshold(divisor: u32) -> BigRational {
    assert!(
        matches!(divisor, 2 | 4 | 12),
        "thresholds exist for c/2, c/4 and c/12 only"
    );
    let hi = c_enclosure(ENCLOSURE_TERMS).hi;
    let twelfth = (hi * BigInt::from(THRESHOLD_GRID) / BigInt::from(12)).ceil();
    twelfth * BigInt::from(12 / divisor) / BigInt::from(THRESHOLD_GRID)
}

/// Partial product `prod_{k=1}^{terms} (1 - 2^-k)` in floating point.
pub fn c_partial_f64(terms: u32) -> f64 {
    (1..=terms).fold(1.0, |acc, k| acc * (1.0 - (-(k as f64)).exp2()))
}

/// `c` to within `tolerance`: stops at the first `K` with `2^-K < tolerance`.
pub fn constant_c(tolerance: f64) -> f64 {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let mut terms = 1u32;
    while (-(terms as f64)).exp2() >= tolerance && terms < 1000 {
        terms += 1;
    }
    c_partial_f64(terms)
}

/// Largest instance `exact_expected_edges` will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// Average edge count of `G_r` over every one of the `(2^r - 1)^n`
/// assignments (with `v0 = e_1`).
pub fn exact_expected_edges(n: u32, r: u32) -> Result<BigRational> {
    LayerId::new(n, r)?;
    check_capacity(n)?;
    let choices = (1u128 << r) - 1;
    let total = (0..n).try_fold(1u128, |acc, _| {
        acc.checked_mul(choices).filter(|&t| t <= EXHAUSTIVE_LIMIT)
    });
    let total = total.ok_or_else(|| {
        Error::Capacity(format!(
            "(2^{r} - 1)^{n} assignments exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}"
        ))
    })? as u64;
    let layer = LayerId::new(n, r)?;
    let lower: Vec<_> = layer_vertices(layer, Side::Lower)?.collect();
    let upper: Vec<_> = layer_vertices(layer, Side::Upper)?.collect();
    let v0 = GF2Vec::unit(0, r);
    let sum: u128 = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let v: Vec<GF2Vec> = (0..n)
                .map(|_| {
                    let bits = code % choices as u64 + 1;
                    code /= choices as u64;
                    GF2Vec::new(bits, r).expect("in range")
                })
                .collect();
            let a = VectorAssignment { n, r, v0, v };
            let g = LayerSubgraph {
                layer,
                lower: lower.iter().copied().filter(|&s| a.lower_unchecked(s)).collect(),
                upper: upper.iter().copied().filter(|&s| a.upper_unchecked(s)).collect(),
            };
            edge_count(&g)
        })
        .sum();
    Ok(BigRational::new(BigInt::from(sum), BigInt::from(total)))
}

/// A successful resampling run.
#[derive(Clone, Debug)]
pub struct GoodAssignment {
    pub assignment: VectorAssignment,
    pub graph: LayerSubgraph,
    /// 1-based index of the successful trial.
    pub trials: u64,
}

/// The best candidate seen when every trial fell short.
#[derive(Clone, Debug)]
pub struct Exhaustion {
    pub assignment: VectorAssignment,
    pub graph: LayerSubgraph,
    pub trials: u64,
}

/// Whether `edges > threshold * ambient` exactly.
pub fn beats(edges: u128, ambient: u128, threshold: &BigRational) -> bool {
    let lhs = BigRational::from_integer(BigInt::from(edges));
    lhs > threshold * BigInt::from(ambient)
}

/// Resamples assignments (trial `i` uses `derive_seed(seed, i)`) until one
/// gives `e(G_r) > (c/2) e(L_r(n))`. The lowest successful trial index wins
/// regardless of how trials are scheduled across threads.
pub fn find_good_assignment(n: u32, r: u32, seed: u64, max_trials: u64) -> Result<GoodAssignment> {
    if max_trials == 0 {
        return Err(Error::invalid("max_trials must be at least 1"));
    }
    let layer = LayerId::new(n, r)?;
    check_capacity(n)?;
    let threshold = c_threshold(2);
    let ambient = layer_edge_count(layer);
    let batch = (rayon::current_num_threads() as u64).max(1) * 2;

    let mut best: Option<(u128, VectorAssignment, LayerSubgraph)> = None;
    let mut start = 0u64;
    while start < max_trials {
        let end = (start + batch).min(max_trials);
        let results: Vec<(VectorAssignment, LayerSubgraph, u128)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let a = sample_assignment(n, r, derive_seed(seed, i))?;
                let g = build_layer_graph(&a)?;
                let e = edge_count(&g);
                Ok((a, g, e))
            })
            .collect::<Result<_>>()?;
        for (offset, (a, g, e)) in results.into_iter().enumerate() {
            if beats(e, ambient, &threshold) {
                return Ok(GoodAssignment {
                    assignment: a,
                    graph: g,
                    trials: start + offset as u64 + 1,
                });
            }
            if best.as_ref().map_or(true, |(b, _, _)| e > *b) {
                best = Some((e, a, g));
            }
        }
        start = end;
    }
    let (_, assignment, graph) = best.expect("at least one trial ran");
    Err(Error::Exhausted(Box::new(Exhaustion {
        assignment,
        graph,
        trials: max_trials,
    })))
}

/// Monte Carlo estimate of the survival probability of the edge
/// `{1..r-1} -- {1..r}` in L_r(n). Returns the number of trials in which both
/// endpoints were kept.
pub fn edge_survival_hits(n: u32, r: u32, trials: u64, seed: u64) -> Result<u64> {
    LayerId::new(n, r)?;
    let x = SubsetMask(gf2::low_mask(r - 1));
    let y = SubsetMask(gf2::low_mask(r));
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = sample_assignment(n, r, derive_seed(seed, t))?;
            Ok(u64::from(a.lower_unchecked(x) && a.upper_unchecked(y)))
        })
        .sum()
}

pub fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `p/q` in lowest terms.
pub fn format_rational(q: &BigRational) -> String {
    let g = q.numer().gcd(q.denom());
    let (p, d) = if g.is_zero() {
        (q.numer().clone(), q.denom().clone())
    } else {
        (q.numer() / &g, q.denom() / &g)
    };
    format!("{p}/{d}")
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
