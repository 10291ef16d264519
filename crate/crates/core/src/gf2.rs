//! Linear algebra over F_2^r with each vector packed into a single `u64`.
//!
//! Dimensions are capped at 64. Every routine here is built on
//! [`EchelonBasis`], a reduced row-echelon form keyed by pivot bit, so rank,
//! span membership and quotient maps are all a handful of XORs per vector.

use std::fmt;
use std::ops::{Add, BitXor};

use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_DIM: u32 = 64;

#[inline]
pub(crate) const fn low_mask(dim: u32) -> u64 {
    if dim >= 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

/// An element of F_2^dim. Bit `i` is coordinate `i`; bits at or above `dim`
/// are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GF2Vec {
    bits: u64,
    dim: u8,
}

impl GF2Vec {
    pub fn new(bits: u64, dim: u32) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::invalid(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        if bits & !low_mask(dim) != 0 {
            return Err(Error::invalid(format!(
                "bits {bits:#x} do not fit in dimension {dim}"
            )));
        }
        Ok(GF2Vec {
            bits,
            dim: dim as u8,
        })
    }

    pub fn zero(dim: u32) -> Self {
        assert!(dim <= MAX_DIM);
        GF2Vec {
            bits: 0,
            dim: dim as u8,
        }
    }

    /// The standard basis vector with a one in coordinate `i` (0-based).
    pub fn unit(i: u32, dim: u32) -> Self {
        assert!(i < dim && dim <= MAX_DIM);
        GF2Vec {
            bits: 1u64 << i,
            dim: dim as u8,
        }
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> u32 {
        self.dim as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Every nonzero vector of F_2^dim in increasing bit order.
    pub fn all_nonzero(dim: u32) -> impl Iterator<Item = GF2Vec> {
        assert!((1..=20).contains(&dim), "enumeration only for small dims");
        (1u64..(1u64 << dim)).map(move |bits| GF2Vec {
            bits,
            dim: dim as u8,
        })
    }
}

impl BitXor for GF2Vec {
    type Output = GF2Vec;

    fn bitxor(self, rhs: GF2Vec) -> GF2Vec {
        debug_assert_eq!(self.dim, rhs.dim);
        GF2Vec {
            bits: self.bits ^ rhs.bits,
            dim: self.dim,
        }
    }
}

impl Add for GF2Vec {
    type Output = GF2Vec;

    fn add(self, rhs: GF2Vec) -> GF2Vec {
        self ^ rhs
    }
}

impl fmt::Debug for GF2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Vec(")?;
        for i in 0..self.dim {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for GF2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.bits)
    }
}

/// Reduced row-echelon form of a subspace of F_2^dim.
///
/// `rows[p]` holds the unique basis row whose highest set bit is `p`; every
/// pivot bit appears in exactly one row.
#[derive(Clone)]
pub struct EchelonBasis {
    dim: u32,
    pivots: u64,
    rows: [u64; 64],
}

impl EchelonBasis {
    pub fn new(dim: u32) -> Self {
        assert!(dim <= MAX_DIM);
        EchelonBasis {
            dim,
            pivots: 0,
            rows: [0; 64],
        }
    }

    #[inline]
    pub fn rank(&self) -> u32 {
        self.pivots.count_ones()
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Bit mask of the pivot coordinates.
    #[inline]
    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Reduces `bits` to the canonical coset representative with every pivot
    /// coordinate cleared.
    #[inline]
    pub fn reduce_bits(&self, mut bits: u64) -> u64 {
        let mut hits = bits & self.pivots;
        while hits != 0 {
            let p = hits.trailing_zeros();
            bits ^= self.rows[p as usize];
            hits &= hits - 1;
        }
        bits
    }

    /// Adds `bits` to the span. Returns `false` (leaving the basis unchanged)
    /// when it was already in the span.
    #[inline]
    pub fn insert_bits(&mut self, bits: u64) -> bool {
        let v = self.reduce_bits(bits);
        if v == 0 {
            return false;
        }
        let p = 63 - v.leading_zeros();
        let bit = 1u64 << p;
        let mut others = self.pivots;
        while others != 0 {
            let q = others.trailing_zeros() as usize;
            if self.rows[q] & bit != 0 {
                self.rows[q] ^= v;
            }
            others &= others - 1;
        }
        self.rows[p as usize] = v;
        self.pivots |= bit;
        true
    }

    #[inline]
    pub fn contains_bits(&self, bits: u64) -> bool {
        self.reduce_bits(bits) == 0
    }

    pub fn insert(&mut self, v: GF2Vec) -> Result<bool> {
        self.check(v)?;
        Ok(self.insert_bits(v.bits))
    }

    pub fn contains(&self, v: GF2Vec) -> Result<bool> {
        self.check(v)?;
        Ok(self.contains_bits(v.bits))
    }

    /// Coordinates of `v + span` in the quotient space, listing the non-pivot
    /// coordinates of the reduced representative in increasing index order.
    pub fn quotient_bits(&self, bits: u64) -> u64 {
        let reduced = self.reduce_bits(bits);
        let mut free = low_mask(self.dim) & !self.pivots;
        let mut out = 0u64;
        let mut k = 0;
        while free != 0 {
            let i = free.trailing_zeros();
            out |= ((reduced >> i) & 1) << k;
            k += 1;
            free &= free - 1;
        }
        out
    }

    fn check(&self, v: GF2Vec) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::invalid(format!(
                "vector of dimension {} used in F_2^{}",
                v.dim(),
                self.dim
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for EchelonBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = (0..64)
            .filter(|p| self.pivots >> p & 1 == 1)
            .map(|p| self.rows[p])
            .collect();
        f.debug_struct("EchelonBasis")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

fn check_dims(vs: &[GF2Vec], r: u32) -> Result<()> {
    if r > MAX_DIM {
        return Err(Error::invalid(format!("dimension {r} exceeds {MAX_DIM}")));
    }
    if let Some(bad) = vs.iter().find(|v| v.dim() != r) {
        return Err(Error::invalid(format!(
            "vector of dimension {} in a rank computation over F_2^{r}",
            bad.dim()
        )));
    }
    Ok(())
}

/// Dimension of the span of `vs` inside F_2^r.
pub fn rank(vs: &[GF2Vec], r: u32) -> Result<u32> {
    check_dims(vs, r)?;
    let mut basis = EchelonBasis::new(r);
    for v in vs {
        basis.insert_bits(v.bits);
    }
    Ok(basis.rank())
}

/// True iff `vs` has exactly `r` elements and they span F_2^r.
pub fn is_basis(vs: &[GF2Vec], r: u32) -> Result<bool> {
    check_dims(vs, r)?;
    if vs.len() != r as usize {
        return Ok(false);
    }
    let mut basis = EchelonBasis::new(r);
    Ok(vs.iter().all(|v| basis.insert_bits(v.bits)))
}

pub fn in_span(v: GF2Vec, vs: &[GF2Vec]) -> Result<bool> {
    check_dims(vs, v.dim())?;
    let mut basis = EchelonBasis::new(v.dim());
    for u in vs {
        basis.insert_bits(u.bits);
    }
    Ok(basis.contains_bits(v.bits))
}

/// Image of `v` in F_2^r / Span(subspace_basis), as a vector of dimension
/// `r - |subspace_basis|`.
pub fn quotient_image(v: GF2Vec, subspace_basis: &[GF2Vec]) -> Result<GF2Vec> {
    let basis = echelon_of_independent(subspace_basis, v.dim())?;
    Ok(GF2Vec {
        bits: basis.quotient_bits(v.bits),
        dim: (v.dim() - basis.rank()) as u8,
    })
}

/// Builds the echelon form of `vs`, failing if they are linearly dependent.
pub fn echelon_of_independent(vs: &[GF2Vec], r: u32) -> Result<EchelonBasis> {
    check_dims(vs, r)?;
    let mut basis = EchelonBasis::new(r);
    for (i, u) in vs.iter().enumerate() {
        if !basis.insert_bits(u.bits) {
            return Err(Error::invalid(format!(
                "subspace basis is linearly dependent at element {i}"
            )));
        }
    }
    Ok(basis)
}

/// Uniform draw from the nonzero vectors of F_2^r by rejection.
pub fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R, r: u32) -> GF2Vec {
    assert!((1..=MAX_DIM).contains(&r), "dimension must be in 1..=64");
    let mask = low_mask(r);
    loop {
        let bits = rng.gen::<u64>() & mask;
        if bits != 0 {
            return GF2Vec { bits, dim: r as u8 };
        }
    }
}
