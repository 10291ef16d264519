//! Density accounting against c/2, c/4 and c/12, and the step that turns a
//! 6-cycle-minus-free union into a C10-free graph through an edge
//! 3-colouring of Q_n supplied from outside.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::construction::{
    c_threshold, derive_seed, find_good_assignment, format_rational, ratio, GoodAssignment,
    UnionGraph,
};
use crate::cube::{check_capacity, cube_edge_count, layer_edge_count, QnGraph, SubsetMask, MAX_N};
use crate::detector::{find_cycle_generic, CycleWitness};
use crate::error::{Error, Result};

/// Canonical key of a Q_n edge: the endpoint without `coord`, and `coord`
/// (0-based bit index).
pub type EdgeKey = (SubsetMask, u32);

pub fn edge_key(x: SubsetMask, y: SubsetMask) -> EdgeKey {
    let diff = x.0 ^ y.0;
    debug_assert_eq!(diff.count_ones(), 1);
    (SubsetMask(x.0 & y.0), diff.trailing_zeros())
}

/// What is wrong with a colouring certificate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Error)]
pub struct CertificateError {
    pub n: u32,
    pub missing: Vec<EdgeKey>,
    pub duplicates: Vec<EdgeKey>,
    /// Entries that name no edge of Q_n (coordinate out of range, mask outside
    /// [n], or mask already containing the coordinate).
    pub not_edges: Vec<EdgeKey>,
    /// Entries with a colour outside {0, 1, 2}.
    pub bad_colors: Vec<(EdgeKey, u8)>,
}

impl CertificateError {
    fn is_empty(&self) -> bool {
        self.missing.is_empty()
            && self.duplicates.is_empty()
            && self.not_edges.is_empty()
            && self.bad_colors.is_empty()
    }
}

impl fmt::Display for CertificateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOW: usize = 8;
        write!(f, "invalid colouring of Q_{}", self.n)?;
        let list = |f: &mut fmt::Formatter<'_>, what: &str, keys: &[EdgeKey]| -> fmt::Result {
            if keys.is_empty() {
                return Ok(());
            }
            write!(f, "; {} {what}:", keys.len())?;
            for (m, c) in keys.iter().take(SHOW) {
                write!(f, " ({m} {c})")?;
            }
            if keys.len() > SHOW {
                write!(f, " ...")?;
            }
            Ok(())
        };
        list(f, "missing", &self.missing)?;
        list(f, "duplicated", &self.duplicates)?;
        list(f, "not edges", &self.not_edges)?;
        let bad: Vec<_> = self.bad_colors.iter().map(|(k, _)| *k).collect();
        list(f, "with colour outside 0..=2", &bad)
    }
}

/// A colouring of the edges of Q_n with colours 0, 1, 2, as listed in a
/// certificate file. Entries are kept verbatim so that defects can be named.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringCertificate {
    pub n: u32,
    pub entries: Vec<(SubsetMask, u32, u8)>,
}

impl ColoringCertificate {
    pub fn from_fn(n: u32, mut color: impl FnMut(EdgeKey) -> u8) -> Result<Self> {
        check_capacity(n)?;
        let mut entries = Vec::with_capacity(cube_edge_count(n) as usize);
        for m in 0..1u64 << n {
            for coord in 0..n {
                if m >> coord & 1 == 0 {
                    let key = (SubsetMask(m), coord);
                    entries.push((key.0, coord, color(key)));
                }
            }
        }
        Ok(ColoringCertificate { n, entries })
    }

    pub fn monochromatic(n: u32, color: u8) -> Result<Self> {
        Self::from_fn(n, |_| color)
    }

    pub fn random(n: u32, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(n, |_| rng.gen_range(0..3))
    }

    /// Dense colour table indexed by `mask * n + coord`, or every defect found.
    pub fn validate(&self) -> std::result::Result<Vec<u8>, CertificateError> {
        let n = self.n;
        let mut err = CertificateError {
            n,
            ..Default::default()
        };
        if n == 0 || n > crate::cube::enumeration_capacity() {
            err.not_edges = self.entries.iter().map(|&(m, c, _)| (m, c)).collect();
            return Err(err);
        }
        const UNSET: u8 = u8::MAX;
        let mut table = vec![UNSET; (1usize << n) * n as usize];
        for &(m, coord, color) in &self.entries {
            let key = (m, coord);
            if coord >= n || !m.fits(n) || m.0 >> coord & 1 == 1 {
                err.not_edges.push(key);
                continue;
            }
            if color > 2 {
                err.bad_colors.push((key, color));
                continue;
            }
            let slot = &mut table[m.0 as usize * n as usize + coord as usize];
            if *slot != UNSET {
                err.duplicates.push(key);
            } else {
                *slot = color;
            }
        }
        for m in 0..1u64 << n {
            for coord in 0..n {
                if m >> coord & 1 == 0 && table[m as usize * n as usize + coord as usize] == UNSET {
                    err.missing.push((SubsetMask(m), coord));
                }
            }
        }
        if err.is_empty() {
            Ok(table)
        } else {
            Err(err)
        }
    }
}

/// True iff every edge of Q_n is coloured exactly once with a colour in 0..=2.
pub fn verify_coloring(c: &ColoringCertificate) -> bool {
    c.validate().is_ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Layer,
    Union,
    Final,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Layer => "layer",
            Scope::Union => "union",
            Scope::Final => "final",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundName {
    HalfC,
    QuarterC,
    TwelfthC,
}

impl BoundName {
    pub fn divisor(self) -> u32 {
        match self {
            BoundName::HalfC => 2,
            BoundName::QuarterC => 4,
            BoundName::TwelfthC => 12,
        }
    }

    pub fn value(self) -> BigRational {
        c_threshold(self.divisor())
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c/{}", self.divisor())
    }
}

/// One row of a density report. `pass` is the exact comparison
/// `achieved / ambient > bound_value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub n: u32,
    pub r: Option<u32>,
    pub scope: Scope,
    pub achieved: u128,
    pub ambient: u128,
    pub ratio: BigRational,
    pub bound: BoundName,
    pub bound_value: BigRational,
    pub pass: bool,
}

pub const CSV_HEADER: &str = "n,r,scope,achieved,ambient,ratio,bound,bound_value,pass";

impl DensityReport {
    pub fn new(n: u32, r: Option<u32>, scope: Scope, achieved: u128, ambient: u128, bound: BoundName) -> Self {
        assert!(ambient > 0);
        let ratio = ratio(achieved, ambient);
        let bound_value = bound.value();
        let pass = ratio > bound_value;
        DensityReport {
            n,
            r,
            scope,
            achieved,
            ambient,
            ratio,
            bound,
            bound_value,
            pass,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.r.map(|r| r.to_string()).unwrap_or_default(),
            self.scope,
            self.achieved,
            self.ambient,
            format_rational(&self.ratio),
            self.bound,
            format_rational(&self.bound_value),
            self.pass
        )
    }
}

/// The C10 search result for one colour class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassResult {
    pub color: u8,
    pub edges: usize,
    pub witness: Option<CycleWitness>,
}

#[derive(Clone, Debug)]
pub enum PipelineOutcome {
    /// The largest C10-free colour class.
    Success {
        color: u8,
        subgraph: QnGraph,
        report: DensityReport,
        classes: Vec<ClassResult>,
    },
    /// Every class contains a C10; one witness per class.
    Failure { classes: Vec<ClassResult> },
}

impl PipelineOutcome {
    pub fn classes(&self) -> &[ClassResult] {
        match self {
            PipelineOutcome::Success { classes, .. } | PipelineOutcome::Failure { classes } => classes,
        }
    }
}

/// Splits the union graph by colour, searches each class for a 10-cycle,
/// and keeps the largest class that has none.
pub fn c10_pipeline(g: &UnionGraph, c: &ColoringCertificate) -> Result<PipelineOutcome> {
    if g.n() != c.n {
        return Err(Error::invalid(format!(
            "graph on Q_{} but colouring of Q_{}",
            g.n(),
            c.n
        )));
    }
    let n = g.n();
    let table = c.validate()?;
    let mut by_color: [Vec<(SubsetMask, SubsetMask)>; 3] = Default::default();
    for (x, y) in g.edges() {
        let (m, coord) = edge_key(x, y);
        by_color[table[m.0 as usize * n as usize + coord as usize] as usize].push((x, y));
    }
    let mut classes = Vec::with_capacity(3);
    let mut graphs = Vec::with_capacity(3);
    for (color, edges) in by_color.into_iter().enumerate() {
        let h = QnGraph::from_edges(n, edges)?;
        let witness = find_cycle_generic(&h, 10)?;
        classes.push(ClassResult {
            color: color as u8,
            edges: h.edge_count(),
            witness,
        });
        graphs.push(h);
    }
    let best = classes
        .iter()
        .filter(|c| c.witness.is_none())
        .max_by(|a, b| a.edges.cmp(&b.edges).then(b.color.cmp(&a.color)))
        .map(|c| c.color);
    Ok(match best {
        Some(color) => {
            let subgraph = graphs.swap_remove(color as usize);
            let report = DensityReport::new(
                n,
                None,
                Scope::Final,
                subgraph.edge_count() as u128,
                cube_edge_count(n),
                BoundName::TwelfthC,
            );
            PipelineOutcome::Success {
                color,
                subgraph,
                report,
                classes,
            }
        }
        None => PipelineOutcome::Failure { classes },
    })
}

/// Largest `n` for which [`search_coloring_small_n`] enumerates colourings.
pub const EXHAUSTIVE_COLORING_MAX_N: u32 = 3;

/// Looks for a colouring under which every class of `g` is C10-free. Edges of
/// Q_n outside `g` get colour 0.
///
/// For `n <= 3` colourings of `g`'s edges are tried in lexicographic order
/// (first edge varying fastest), at most `budget` of them. Beyond that a
/// seeded local search recolours one edge of a monochromatic C10 per step for
/// at most `budget` steps.
pub fn search_coloring_small_n(g: &UnionGraph, budget: u64, seed: u64) -> Result<Option<ColoringCertificate>> {
    let n = g.n();
    check_capacity(n)?;
    let edges = g.edges();
    let keys: Vec<EdgeKey> = edges.iter().map(|&(x, y)| edge_key(x, y)).collect();
    let build = |colors: &[u8]| {
        let map: HashMap<EdgeKey, u8> = keys.iter().copied().zip(colors.iter().copied()).collect();
        ColoringCertificate::from_fn(n, |k| map.get(&k).copied().unwrap_or(0))
    };
    let first_bad_class = |colors: &[u8]| -> Result<Option<CycleWitness>> {
        for color in 0..3u8 {
            let class = edges
                .iter()
                .zip(colors)
                .filter(|(_, &c)| c == color)
                .map(|(&e, _)| e);
            let h = QnGraph::from_edges(n, class)?;
            if let Some(w) = find_cycle_generic(&h, 10)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    };

    if n <= EXHAUSTIVE_COLORING_MAX_N {
        let mut colors = vec![0u8; edges.len()];
        for _ in 0..budget {
            if first_bad_class(&colors)?.is_none() {
                return build(&colors).map(Some);
            }
            // Next colouring in base-3 order; stop after wrapping around.
            let mut i = 0;
            loop {
                if i == colors.len() {
                    return Ok(None);
                }
                colors[i] = (colors[i] + 1) % 3;
                if colors[i] != 0 {
                    break;
                }
                i += 1;
            }
        }
        return Ok(None);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors: Vec<u8> = (0..edges.len()).map(|_| rng.gen_range(0..3)).collect();
    let index: HashMap<EdgeKey, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    for _ in 0..budget {
        let Some(w) = first_bad_class(&colors)? else {
            return build(&colors).map(Some);
        };
        let vs = &w.vertices;
        let pick = rng.gen_range(0..vs.len());
        let key = edge_key(vs[pick], vs[(pick + 1) % vs.len()]);
        let i = index[&key];
        let others: Vec<u8> = (0..3).filter(|&c| c != colors[i]).collect();
        colors[i] = *others.choose(&mut rng).expect("two other colours");
    }
    if first_bad_class(&colors)?.is_none() {
        return build(&colors).map(Some);
    }
    Ok(None)
}

/// Everything produced by one run of [`density_report_suite`].
#[derive(Clone, Debug)]
pub struct Suite {
    pub n: u32,
    pub reports: Vec<DensityReport>,
    pub layers: BTreeMap<u32, GoodAssignment>,
    pub union: UnionGraph,
    /// Odd layers where no trial beat c/2; they carry the best candidate seen
    /// and a failing report row.
    pub exhausted: Vec<u32>,
    pub pipeline: Option<PipelineOutcome>,
}

impl Suite {
    pub fn all_pass(&self) -> bool {
        self.exhausted.is_empty() && self.reports.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.reports {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Layer `r` of the suite for `seed` uses base seed `derive_seed(seed, r)`.
pub fn layer_seed(seed: u64, r: u32) -> u64 {
    derive_seed(seed, r as u64)
}

/// Builds a good `G_r` for every odd `r <= n`, reports each against c/2 and
/// their union against c/4, and, given a certificate, runs the C10 step and
/// reports the result against c/12.
pub fn density_report_suite(
    n: u32,
    seed: u64,
    max_trials: u64,
    certificate: Option<&ColoringCertificate>,
) -> Result<Suite> {
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!("n = {n} outside 1..={MAX_N}")));
    }
    check_capacity(n)?;
    let mut layers = BTreeMap::new();
    let mut reports = Vec::new();
    let mut exhausted = Vec::new();
    for r in (1..=n).step_by(2) {
        let good = match find_good_assignment(n, r, layer_seed(seed, r), max_trials) {
            Ok(good) => good,
            Err(Error::Exhausted(ex)) => {
                exhausted.push(r);
                GoodAssignment {
                    assignment: ex.assignment,
                    graph: ex.graph,
                    trials: ex.trials,
                }
            }
            Err(e) => return Err(e),
        };
        let layer = good.graph.layer();
        reports.push(DensityReport::new(
            n,
            Some(r),
            Scope::Layer,
            good.graph.edge_count(),
            layer_edge_count(layer),
            BoundName::HalfC,
        ));
        layers.insert(r, good);
    }
    let union = UnionGraph::new(
        n,
        layers.iter().map(|(&r, g)| (r, g.graph.clone())).collect(),
    )?;
    reports.push(DensityReport::new(
        n,
        None,
        Scope::Union,
        union.edge_count(),
        cube_edge_count(n),
        BoundName::QuarterC,
    ));
    let pipeline = match certificate {
        Some(c) => {
            let outcome = c10_pipeline(&union, c)?;
            reports.push(match &outcome {
                PipelineOutcome::Success { report, .. } => report.clone(),
                PipelineOutcome::Failure { .. } => DensityReport::new(
                    n,
                    None,
                    Scope::Final,
                    0,
                    cube_edge_count(n),
                    BoundName::TwelfthC,
                ),
            });
            Some(outcome)
        }
        None => None,
    };
    Ok(Suite {
        n,
        reports,
        layers,
        union,
        exhausted,
        pipeline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{sample_assignment, union_odd_layers};
    use crate::detector::find_cycle_sequential;

    #[test]
    fn single_edge_certificate() {
        let c = ColoringCertificate {
            n: 1,
            entries: vec![(SubsetMask(0), 0, 0)],
        };
        assert!(verify_coloring(&c));
    }

    #[test]
    fn missing_edge_is_named() {
        let mut c = ColoringCertificate::monochromatic(2, 1).unwrap();
        let removed = c.entries.remove(2);
        assert!(!verify_coloring(&c));
        let err = c.validate().unwrap_err();
        assert_eq!(err.missing, vec![(removed.0, removed.1)]);
        assert!(err.to_string().contains("1 missing"));
    }

    #[test]
    fn duplicates_and_junk_are_named() {
        let mut c = ColoringCertificate::monochromatic(2, 0).unwrap();
        c.entries.push(c.entries[0]);
        c.entries.push((SubsetMask(1), 0, 0)); // mask already holds coord 0
        c.entries.push((SubsetMask(0), 5, 0));
        let err = c.validate().unwrap_err();
        assert_eq!(err.duplicates, vec![(c.entries[0].0, c.entries[0].1)]);
        assert_eq!(err.not_edges.len(), 2);
        let mut d = ColoringCertificate::monochromatic(2, 0).unwrap();
        d.entries[0].2 = 3;
        let err = d.validate().unwrap_err();
        assert_eq!(err.bad_colors.len(), 1);
        assert_eq!(err.missing.len(), 1);
    }

    #[test]
    fn random_q4_colouring_is_valid() {
        let c = ColoringCertificate::random(4, 17).unwrap();
        assert_eq!(c.entries.len(), 32);
        assert!(verify_coloring(&c));
    }

    fn union_for(n: u32, seed: u64) -> UnionGraph {
        let m = (1..=n)
            .step_by(2)
            .map(|r| (r, sample_assignment(n, r, derive_seed(seed, r as u64)).unwrap()))
            .collect();
        union_odd_layers(n, &m).unwrap()
    }

    #[test]
    fn monochromatic_pipeline_keeps_everything() {
        for n in 1..=7 {
            let u = union_for(n, 3);
            if find_cycle_generic(&u.to_graph(), 10).unwrap().is_some() {
                continue;
            }
            let c = ColoringCertificate::monochromatic(n, 0).unwrap();
            match c10_pipeline(&u, &c).unwrap() {
                PipelineOutcome::Success { color, subgraph, report, .. } => {
                    assert_eq!(color, 0);
                    assert_eq!(subgraph.edge_count() as u128, u.edge_count());
                    assert_eq!(report.achieved, u.edge_count());
                    assert_eq!(report.scope, Scope::Final);
                }
                PipelineOutcome::Failure { .. } => panic!("C10-free union rejected"),
            }
        }
    }

    #[test]
    fn q4_pipeline_smoke() {
        for seed in 0..10 {
            let u = union_for(4, seed);
            let c = ColoringCertificate::random(4, seed).unwrap();
            let PipelineOutcome::Success { report, classes, .. } = c10_pipeline(&u, &c).unwrap() else {
                panic!("Q_4 subgraphs of half the cube cannot all hold C10");
            };
            assert!(report.ratio <= ratio(1, 2));
            let total: usize = classes.iter().map(|c| c.edges).sum();
            assert_eq!(total as u128, u.edge_count());
            if classes.iter().all(|c| c.witness.is_none()) {
                assert!(3 * report.achieved >= total as u128);
            }
        }
    }

    #[test]
    fn pipeline_rejects_mismatch() {
        let u = union_for(4, 0);
        let c = ColoringCertificate::monochromatic(3, 0).unwrap();
        assert!(matches!(c10_pipeline(&u, &c), Err(Error::InvalidArgument(_))));
        let mut bad = ColoringCertificate::monochromatic(4, 0).unwrap();
        bad.entries.pop();
        assert!(matches!(c10_pipeline(&u, &bad), Err(Error::Certificate(_))));
    }

    #[test]
    fn pipeline_free_classes_reverify() {
        for seed in 0..6 {
            let u = union_for(7, seed);
            let c = ColoringCertificate::random(7, seed).unwrap();
            if let PipelineOutcome::Success { subgraph, .. } = c10_pipeline(&u, &c).unwrap() {
                assert_eq!(find_cycle_sequential(&subgraph, 10).unwrap(), None);
            }
        }
    }

    #[test]
    fn exhaustive_search_small_n() {
        for n in 1..=3 {
            let u = union_for(n, 1);
            let c = search_coloring_small_n(&u, 10, 0).unwrap().unwrap();
            assert_eq!(c, ColoringCertificate::monochromatic(n, 0).unwrap());
        }
    }

    #[test]
    fn local_search_returns_valid_certificates() {
        let u = union_for(5, 2);
        if let Some(c) = search_coloring_small_n(&u, 200, 4).unwrap() {
            assert!(verify_coloring(&c));
            match c10_pipeline(&u, &c).unwrap() {
                PipelineOutcome::Success { classes, .. } => {
                    assert!(classes.iter().all(|k| k.witness.is_none()))
                }
                PipelineOutcome::Failure { .. } => panic!("search returned a bad colouring"),
            }
        }
    }

    #[test]
    fn report_rows() {
        let r = DensityReport::new(1, Some(1), Scope::Layer, 1, 1, BoundName::HalfC);
        assert!(r.pass);
        assert!(r.csv_row().starts_with("1,1,layer,1,1,1/1,c/2,"));
        assert!(r.csv_row().ends_with(",true"));
        let u = DensityReport::new(4, None, Scope::Union, 0, 32, BoundName::QuarterC);
        assert!(!u.pass);
        assert!(u.csv_row().starts_with("4,,union,0,32,0/1,c/4,"));
    }

    #[test]
    fn suite_n1() {
        let s = density_report_suite(1, 0, 512, None).unwrap();
        assert_eq!(s.reports.len(), 2);
        assert_eq!(s.reports[0].ratio, ratio(1, 1));
        assert!(s.all_pass());
    }

    #[test]
    fn suite_n10_passes_everything() {
        let s = density_report_suite(10, 0, 512, None).unwrap();
        assert!(s.exhausted.is_empty());
        let layers: Vec<_> = s.reports.iter().filter(|r| r.scope == Scope::Layer).collect();
        assert_eq!(layers.len(), 5);
        assert!(layers.iter().all(|r| r.pass));
        let union = s.reports.iter().find(|r| r.scope == Scope::Union).unwrap();
        assert!(union.pass);
        assert_eq!(union.achieved, layers.iter().map(|r| r.achieved).sum::<u128>());
        assert_eq!(union.ambient, cube_edge_count(10));
    }

    #[test]
    fn suite_with_certificate_has_final_row() {
        let c = ColoringCertificate::monochromatic(4, 2).unwrap();
        let s = density_report_suite(4, 3, 512, Some(&c)).unwrap();
        let last = s.reports.last().unwrap();
        assert_eq!(last.scope, Scope::Final);
        assert_eq!(last.bound, BoundName::TwelfthC);
    }
}
