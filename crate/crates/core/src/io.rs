//! Text formats: edge lists, vector assignments and colouring certificates.
//!
//! Masks are lowercase hex with bit `i` standing for element `i + 1`.

use std::fmt::Write as _;

use crate::bounds::ColoringCertificate;
use crate::construction::{LayerSubgraph, UnionGraph, VectorAssignment};
use crate::cube::{LayerId, QnGraph, SubsetMask, MAX_N};
use crate::error::{Error, Result};
use crate::gf2::GF2Vec;

/// An edge list of Q_n, optionally followed by the two vertex sides of a layer
/// subgraph.
///
/// ```text
/// # qn n=<n>
/// <x> <y>          one edge per line, x a subset of y with one more element
/// # lower          optional
/// <mask>
/// # upper          optional
/// <mask>
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeListFile {
    pub n: u32,
    pub edges: Vec<(SubsetMask, SubsetMask)>,
    pub lower: Option<Vec<SubsetMask>>,
    pub upper: Option<Vec<SubsetMask>>,
}

fn orient(x: SubsetMask, y: SubsetMask) -> (SubsetMask, SubsetMask) {
    if x.len() < y.len() {
        (x, y)
    } else {
        (y, x)
    }
}

impl EdgeListFile {
    pub fn from_graph(g: &QnGraph) -> Self {
        let mut edges: Vec<_> = g.edges().into_iter().map(|(x, y)| orient(x, y)).collect();
        edges.sort_unstable();
        EdgeListFile {
            n: g.n(),
            edges,
            lower: None,
            upper: None,
        }
    }

    pub fn from_layer(g: &LayerSubgraph) -> Self {
        EdgeListFile {
            n: g.layer().n(),
            edges: g.edges(),
            lower: Some(g.lower().to_vec()),
            upper: Some(g.upper().to_vec()),
        }
    }

    pub fn from_union(g: &UnionGraph) -> Self {
        EdgeListFile {
            n: g.n(),
            edges: g.edges(),
            lower: None,
            upper: None,
        }
    }

    pub fn to_graph(&self) -> Result<QnGraph> {
        QnGraph::from_edges(self.n, self.edges.iter().copied())
    }

    /// The layer subgraph described by the vertex sections, if present.
    pub fn to_layer(&self) -> Result<Option<LayerSubgraph>> {
        let (Some(lower), Some(upper)) = (&self.lower, &self.upper) else {
            return Ok(None);
        };
        let r = match (upper.first(), lower.first()) {
            (Some(u), _) => u.len(),
            (None, Some(l)) => l.len() + 1,
            (None, None) => return Ok(None),
        };
        let g = LayerSubgraph::new(LayerId::new(self.n, r)?, lower.clone(), upper.clone())?;
        if g.edges() != self.edges {
            return Err(Error::invalid(
                "edge section disagrees with the induced edges of the vertex sections",
            ));
        }
        Ok(Some(g))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# qn n={}", self.n).unwrap();
        for (x, y) in &self.edges {
            writeln!(out, "{x} {y}").unwrap();
        }
        for (name, side) in [("lower", &self.lower), ("upper", &self.upper)] {
            if let Some(vs) = side {
                writeln!(out, "# {name}").unwrap();
                for v in vs {
                    writeln!(out, "{v}").unwrap();
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        enum Section {
            Edges,
            Lower,
            Upper,
        }
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let n = match lines.next() {
            Some((_, l)) => parse_header_field(l, "# qn", "n").map_err(|m| Error::parse(1, m))?,
            None => return Err(Error::parse(1, "empty file")),
        };
        if n == 0 || n > MAX_N {
            return Err(Error::parse(1, format!("n = {n} outside 1..={MAX_N}")));
        }
        let mut file = EdgeListFile {
            n,
            edges: Vec::new(),
            lower: None,
            upper: None,
        };
        let mut section = Section::Edges;
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            match line {
                "# lower" => {
                    section = Section::Lower;
                    file.lower.get_or_insert_with(Vec::new);
                    continue;
                }
                "# upper" => {
                    section = Section::Upper;
                    file.upper.get_or_insert_with(Vec::new);
                    continue;
                }
                _ if line.starts_with('#') => {
                    return Err(Error::parse(ln, format!("unknown section {line:?}")))
                }
                _ => {}
            }
            match section {
                Section::Edges => {
                    let mut it = line.split_whitespace();
                    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                        return Err(Error::parse(ln, "expected two masks"));
                    };
                    let x = parse_mask(a, n, ln)?;
                    let y = parse_mask(b, n, ln)?;
                    if !(x.is_subset_of(y) && y.len() == x.len() + 1) {
                        return Err(Error::parse(ln, format!("{a} {b} is not an upward Q_{n} edge")));
                    }
                    file.edges.push((x, y));
                }
                Section::Lower | Section::Upper => {
                    let v = parse_mask(line, n, ln)?;
                    let side = if matches!(section, Section::Lower) {
                        &mut file.lower
                    } else {
                        &mut file.upper
                    };
                    side.as_mut().expect("section opened").push(v);
                }
            }
        }
        Ok(file)
    }
}

fn parse_mask(s: &str, n: u32, line: usize) -> Result<SubsetMask> {
    let m = SubsetMask::from_hex(s).ok_or_else(|| Error::parse(line, format!("bad hex mask {s:?}")))?;
    if !m.fits(n) {
        return Err(Error::parse(line, format!("mask {s} outside [{n}]")));
    }
    Ok(m)
}

/// Reads `key=<u32>` from a header line starting with `prefix`.
fn parse_header_field(line: &str, prefix: &str, key: &str) -> std::result::Result<u32, String> {
    let rest = line
        .strip_prefix(prefix)
        .ok_or_else(|| format!("expected header {prefix:?}"))?;
    rest.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .ok_or_else(|| format!("header lacks {key}="))?
        .parse()
        .map_err(|_| format!("bad value for {key}"))
}

/// ```text
/// # gf2-assignment n=<n> r=<r>
/// v0 <hex>
/// v1 <hex>
/// ...
/// ```
pub fn assignment_to_text(a: &VectorAssignment) -> String {
    let mut out = String::new();
    writeln!(out, "# gf2-assignment n={} r={}", a.n(), a.r()).unwrap();
    writeln!(out, "v0 {}", a.v0()).unwrap();
    for (i, v) in a.vectors().iter().enumerate() {
        writeln!(out, "v{} {v}", i + 1).unwrap();
    }
    out
}

pub fn parse_assignment(text: &str) -> Result<VectorAssignment> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let field = |k| parse_header_field(header, "# gf2-assignment", k).map_err(|m| Error::parse(1, m));
    let (n, r) = (field("n")?, field("r")?);
    if r == 0 || r > 64 {
        return Err(Error::parse(1, format!("r = {r} outside 1..=64")));
    }
    let mut vecs = Vec::new();
    for (expected, (ln, line)) in lines.enumerate() {
        let (label, hex) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(ln, "expected `v<i> <hex>`"))?;
        if label != format!("v{expected}") {
            return Err(Error::parse(ln, format!("expected v{expected}, found {label}")));
        }
        let bits = u64::from_str_radix(hex.trim(), 16)
            .map_err(|_| Error::parse(ln, format!("bad hex {hex:?}")))?;
        vecs.push(GF2Vec::new(bits, r).map_err(|e| Error::parse(ln, e.to_string()))?);
    }
    if vecs.is_empty() {
        return Err(Error::parse(2, "missing v0"));
    }
    let v0 = vecs.remove(0);
    VectorAssignment::new(n, r, v0, vecs)
}

/// ```text
/// # qn-coloring n=<n>
/// <hex-mask> <coord-index> <color>
/// ```
pub fn coloring_to_text(c: &ColoringCertificate) -> String {
    let mut out = String::new();
    writeln!(out, "# qn-coloring n={}", c.n).unwrap();
    for (m, coord, color) in &c.entries {
        writeln!(out, "{m} {coord} {color}").unwrap();
    }
    out
}

/// Parses the certificate verbatim; coverage and colours are checked by
/// [`ColoringCertificate::validate`].
pub fn parse_coloring(text: &str) -> Result<ColoringCertificate> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let n = parse_header_field(header, "# qn-coloring", "n").map_err(|m| Error::parse(1, m))?;
    let mut entries = Vec::new();
    for (ln, line) in lines.filter(|(_, l)| !l.is_empty()) {
        let fields: Vec<_> = line.split_whitespace().collect();
        let [m, coord, color] = fields[..] else {
            return Err(Error::parse(ln, "expected `<mask> <coord> <color>`"));
        };
        let m = SubsetMask::from_hex(m).ok_or_else(|| Error::parse(ln, format!("bad mask {m:?}")))?;
        let coord = coord
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad coordinate {coord:?}")))?;
        let color = color
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad colour {color:?}")))?;
        entries.push((m, coord, color));
    }
    Ok(ColoringCertificate { n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_layer_graph, sample_assignment};
    use proptest::prelude::*;

    #[test]
    fn layer_export_round_trips() {
        let a = sample_assignment(8, 3, 4).unwrap();
        let g = build_layer_graph(&a).unwrap();
        let text = EdgeListFile::from_layer(&g).to_text();
        let parsed = EdgeListFile::parse(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed.to_layer().unwrap().unwrap(), g);
        assert_eq!(parsed.to_graph().unwrap(), g.to_graph());
    }

    #[test]
    fn edge_list_layout() {
        let g = LayerSubgraph::full(LayerId::new(2, 1).unwrap()).unwrap();
        assert_eq!(
            EdgeListFile::from_layer(&g).to_text(),
            "# qn n=2\n0 1\n0 2\n# lower\n0\n# upper\n1\n2\n"
        );
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(EdgeListFile::parse("").is_err());
        assert!(EdgeListFile::parse("# qn\n").is_err());
        assert!(EdgeListFile::parse("# qn n=3\n1 2\n").is_err());
        assert!(EdgeListFile::parse("# qn n=3\n3 1\n").is_err());
        assert!(EdgeListFile::parse("# qn n=2\n0 4\n").is_err());
        assert!(EdgeListFile::parse("# qn n=2\n0 1 3\n").is_err());
        assert!(EdgeListFile::parse("# qn n=2\n# middle\n").is_err());
        let err = EdgeListFile::parse("# qn n=3\n0 1\nzz 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn assignment_round_trip() {
        let a = sample_assignment(11, 5, 8).unwrap();
        let text = assignment_to_text(&a);
        assert!(text.starts_with("# gf2-assignment n=11 r=5\nv0 1\nv1 "));
        let b = parse_assignment(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(assignment_to_text(&b), text);
    }

    #[test]
    fn assignment_rejects_bad_files() {
        assert!(parse_assignment("# gf2-assignment n=2 r=2\nv0 1\nv1 1\n").is_err());
        assert!(parse_assignment("# gf2-assignment n=1 r=1\nv0 1\nv2 1\n").is_err());
        assert!(parse_assignment("# gf2-assignment n=1 r=1\nv0 1\nv1 2\n").is_err());
        assert!(parse_assignment("# gf2-assignment n=1 r=1\nv0 1\nv1 0\n").is_err());
    }

    #[test]
    fn coloring_round_trip_and_validation() {
        let c = ColoringCertificate::random(3, 1).unwrap();
        let text = coloring_to_text(&c);
        let d = parse_coloring(&text).unwrap();
        assert_eq!(c, d);
        assert_eq!(coloring_to_text(&d), text);
        let short: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(!crate::bounds::verify_coloring(&parse_coloring(&short).unwrap()));
        assert!(parse_coloring("# qn-coloring n=2\n0 0\n").is_err());
    }

    proptest! {
        #[test]
        fn random_layer_files_round_trip(seed in any::<u64>(), n in 2u32..9, r_frac in 0.0f64..1.0) {
            let r = 1 + ((n - 1) as f64 * r_frac) as u32;
            let g = build_layer_graph(&sample_assignment(n, r, seed).unwrap()).unwrap();
            let text = EdgeListFile::from_layer(&g).to_text();
            prop_assert_eq!(EdgeListFile::parse(&text).unwrap().to_text(), text);
        }
    }
}
