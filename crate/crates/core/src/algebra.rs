//! The 248-dimensional compact E8 algebra as so(16) ⊕ 128.
//!
//! Basis order: the 120 vector generators `J_ij` (i < j, lexicographic) and
//! then the 128 spinor generators `Q_α`. Brackets:
//!
//! ```text
//! [J_ij, J_kl] = δ_jk J_il − δ_jl J_ik − δ_ik J_jl + δ_il J_jk
//! [J_ij, Q_α]  = Σ_β (Δ_ij)_βα Q_β
//! [Q_α, Q_β]   = Σ_{i<j} (Δ_ij)_βα J_ij
//! ```
//!
//! With `Δ_ij` built from positive-signature gamma blocks these are the
//! relations for which ad is a homomorphism and the Killing form is negative
//! definite. The transposed index order on `Δ` is what separates the compact
//! form from an anti-representation (mixed Jacobi fails) and the split form
//! (indefinite Killing form).

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{pair_from_index, so16_bracket, SpinorGenerators, PAIR_COUNT, SPINOR_DIM};
use crate::error::{Error, Result};
use crate::halfint::{HalfInt, HalfIntMatrix};
use crate::sparse::SparseHalfIntMatrix;

pub const DIM: usize = PAIR_COUNT + SPINOR_DIM;
pub const RANK: usize = 8;

/// A basis generator of E8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisIndex {
    /// `J_ij`, one-based with `1 ≤ i < j ≤ 16`.
    Vector(u8, u8),
    /// `Q_α`, one-based with `1 ≤ α ≤ 128`.
    Spinor(u8),
}

impl BasisIndex {
    pub fn from_flat(flat: usize) -> Self {
        assert!(flat < DIM, "basis index {flat} out of range");
        if flat < PAIR_COUNT {
            let (i, j) = pair_from_index(flat);
            BasisIndex::Vector(i as u8 + 1, j as u8 + 1)
        } else {
            BasisIndex::Spinor((flat - PAIR_COUNT + 1) as u8)
        }
    }

    pub fn flat(self) -> usize {
        match self {
            BasisIndex::Vector(i, j) => crate::clifford::pair_index(i as usize - 1, j as usize - 1),
            BasisIndex::Spinor(a) => PAIR_COUNT + a as usize - 1,
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(self, BasisIndex::Vector(..))
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisIndex::Vector(i, j) => write!(f, "J_{i},{j}"),
            BasisIndex::Spinor(a) => write!(f, "Q_{a}"),
        }
    }
}

pub fn spinor_flat(alpha: usize) -> usize {
    PAIR_COUNT + alpha
}

/// A coefficient vector over the 248 basis generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    coeffs: Vec<HalfInt>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self {
            coeffs: vec![HalfInt::ZERO; DIM],
        }
    }

    pub fn basis(flat: usize) -> Self {
        let mut e = Self::zero();
        e.coeffs[flat] = HalfInt::ONE;
        e
    }

    pub fn from_coeffs(coeffs: Vec<HalfInt>) -> Result<Self> {
        if coeffs.len() != DIM {
            return Err(Error::InvalidInput(format!(
                "algebra element needs {DIM} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { coeffs })
    }

    /// Random integer element with `support` nonzero coefficients in `-3..=3`.
    pub fn random_integer(rng: &mut impl Rng, support: usize) -> Self {
        let mut e = Self::zero();
        for _ in 0..support {
            let slot = rng.random_range(0..DIM);
            e.coeffs[slot] = HalfInt::from_int(rng.random_range(-3..=3));
        }
        e
    }

    pub fn coeffs(&self) -> &[HalfInt] {
        &self.coeffs
    }

    pub fn get(&self, flat: usize) -> HalfInt {
        self.coeffs[flat]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, HalfInt)> + '_ {
        self.coeffs.iter().copied().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

/// Which pair of generator kinds a bracket involves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    VectorVector,
    VectorSpinor,
    SpinorSpinor,
}

pub fn pair_kind(a: usize, b: usize) -> PairKind {
    match (a < PAIR_COUNT, b < PAIR_COUNT) {
        (true, true) => PairKind::VectorVector,
        (false, false) => PairKind::SpinorSpinor,
        _ => PairKind::VectorSpinor,
    }
}

/// A sparse bracket: `[e_A, e_B] = Σ coeff · e_C` as `(C, coeff)` sorted by `C`.
pub type BracketTerms = Vec<(usize, HalfInt)>;

/// Structure constants for `A < B`; the other half follows by antisymmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTensor {
    table: Vec<BracketTerms>,
}

impl StructureTensor {
    fn empty() -> Self {
        Self {
            table: vec![Vec::new(); DIM * DIM],
        }
    }

    /// Stored terms for `A < B`.
    pub fn upper(&self, a: usize, b: usize) -> &BracketTerms {
        debug_assert!(a < b);
        &self.table[a * DIM + b]
    }

    /// `[e_A, e_B]` for any ordered pair, as `(sign, terms)`.
    pub fn bracket_basis(&self, a: usize, b: usize) -> (i64, &BracketTerms) {
        use std::cmp::Ordering::*;
        static EMPTY: BracketTerms = Vec::new();
        match a.cmp(&b) {
            Less => (1, &self.table[a * DIM + b]),
            Greater => (-1, &self.table[b * DIM + a]),
            Equal => (1, &EMPTY),
        }
    }

    /// Replaces the stored bracket `[e_A, e_B]`, `A < B`. Zero coefficients are dropped.
    pub fn set_bracket(&mut self, a: usize, b: usize, mut terms: BracketTerms) {
        assert!(a < b && b < DIM);
        terms.retain(|t| !t.1.is_zero());
        terms.sort_by_key(|t| t.0);
        self.table[a * DIM + b] = terms;
    }

    /// All stored `(A, B, terms)` with nonempty terms, ordered by `(A, B)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BracketTerms)> + '_ {
        (0..DIM).flat_map(move |a| {
            (a + 1..DIM).filter_map(move |b| {
                let t = &self.table[a * DIM + b];
                (!t.is_empty()).then_some((a, b, t))
            })
        })
    }

    pub fn nonzero_brackets(&self) -> usize {
        self.iter().count()
    }
}

pub fn build_structure_tensor(d: &SpinorGenerators) -> Result<StructureTensor> {
    let mut t = StructureTensor::empty();
    for a in 0..PAIR_COUNT {
        for b in a + 1..PAIR_COUNT {
            let terms = so16_bracket(a, b)
                .into_iter()
                .map(|(s, c)| (c, HalfInt::from_int(s)))
                .collect();
            t.set_bracket(a, b, terms);
        }
    }
    for a in 0..PAIR_COUNT {
        let delta = d.get(a);
        for alpha in 0..SPINOR_DIM {
            let terms = (0..SPINOR_DIM)
                .map(|beta| (spinor_flat(beta), delta.get(beta, alpha)))
                .collect();
            t.set_bracket(a, spinor_flat(alpha), terms);
        }
    }
    for alpha in 0..SPINOR_DIM {
        for beta in alpha + 1..SPINOR_DIM {
            let terms = (0..PAIR_COUNT).map(|p| (p, d.get(p).get(beta, alpha))).collect();
            t.set_bracket(spinor_flat(alpha), spinor_flat(beta), terms);
        }
    }
    Ok(t)
}

/// Bilinear extension of the basis brackets; exact, failing if a result
/// coefficient leaves the half-integers.
pub fn abstract_bracket(x: &AlgebraElement, y: &AlgebraElement, t: &StructureTensor) -> Result<AlgebraElement> {
    // Accumulated at eight times the true value: (2x)(2y)(2c).
    let mut acc = vec![0i64; DIM];
    let xs: Vec<_> = x.support().collect();
    let ys: Vec<_> = y.support().collect();
    for &(a, xa) in &xs {
        for &(b, yb) in &ys {
            let (sign, terms) = t.bracket_basis(a, b);
            if terms.is_empty() {
                continue;
            }
            let w = xa
                .doubled()
                .checked_mul(yb.doubled())
                .and_then(|v| v.checked_mul(sign))
                .ok_or(Error::Overflow("abstract_bracket"))?;
            for &(c, coeff) in terms {
                let v = w
                    .checked_mul(coeff.doubled())
                    .ok_or(Error::Overflow("abstract_bracket"))?;
                acc[c] = acc[c].checked_add(v).ok_or(Error::Overflow("abstract_bracket"))?;
            }
        }
    }
    let coeffs = acc
        .into_iter()
        .enumerate()
        .map(|(c, v)| {
            if v % 4 != 0 {
                Err(Error::InexactHalving {
                    row: c,
                    col: 0,
                    value: v,
                })
            } else {
                Ok(HalfInt::from_doubled(v / 4))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraElement::from_coeffs(coeffs)
}

/// The adjoint representation: `matrices[A]` has entry `(C, B)` equal to the
/// coefficient of `e_C` in `[e_A, e_B]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointRep {
    matrices: Vec<SparseHalfIntMatrix>,
}

impl AdjointRep {
    /// Wraps arbitrary 248×248 generator matrices (e.g. a corrupted or
    /// externally transcribed set) for verification.
    pub fn from_matrices(matrices: Vec<SparseHalfIntMatrix>) -> Result<Self> {
        if matrices.len() != DIM || matrices.iter().any(|m| m.shape() != (DIM, DIM)) {
            return Err(Error::InvalidInput(format!(
                "an adjoint representation needs {DIM} matrices of size {DIM}x{DIM}"
            )));
        }
        Ok(Self { matrices })
    }

    pub fn matrix(&self, flat: usize) -> &SparseHalfIntMatrix {
        &self.matrices[flat]
    }

    pub fn matrices(&self) -> &[SparseHalfIntMatrix] {
        &self.matrices
    }

    pub fn dense(&self, flat: usize) -> HalfIntMatrix {
        self.matrices[flat].to_dense()
    }

    pub fn replace(&mut self, flat: usize, m: SparseHalfIntMatrix) {
        assert_eq!(m.shape(), (DIM, DIM));
        self.matrices[flat] = m;
    }

    /// `ad(x) = Σ x_A ad(e_A)` for an element with integer coefficients.
    pub fn of_integer_element(&self, x: &AlgebraElement) -> Result<SparseHalfIntMatrix> {
        let mut terms = Vec::new();
        for (a, c) in x.support() {
            if !c.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "coefficient {c} of {} is not an integer",
                    BasisIndex::from_flat(a)
                )));
            }
            terms.push((c.doubled() / 2, &self.matrices[a]));
        }
        SparseHalfIntMatrix::zeros(DIM, DIM).linear_combination(&terms)
    }
}

pub fn build_adjoint(t: &StructureTensor) -> Result<AdjointRep> {
    let mut triplets: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); DIM];
    for (a, b, terms) in t.iter() {
        for &(c, coeff) in terms {
            triplets[a].push((c, b, coeff.doubled()));
            triplets[b].push((c, a, -coeff.doubled()));
        }
    }
    let matrices = triplets
        .iter()
        .map(|tr| SparseHalfIntMatrix::from_triplets(DIM, DIM, tr))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdjointRep { matrices })
}

/// Literal transcription of the block matrices
///
/// ```text
/// M_ij = [[ C_{ij,kl}^{mn} at (kl, mn),  0                 ],
///         [ 0,                           (Δ_ij)_αβ at (α, β) ]]
/// M_α  = [[ 0,                           4(Δ_kl)_αβ at (kl, β) ],
///         [ −4(Δ_mn)_αγ at (γ, mn),       0                    ]]
/// ```
///
/// kept for comparison against the canonical [`AdjointRep`].
pub fn build_transcribed_blocks(d: &SpinorGenerators) -> Result<Vec<SparseHalfIntMatrix>> {
    let mut out = Vec::with_capacity(DIM);
    for a in 0..PAIR_COUNT {
        let mut tr = Vec::new();
        for kl in 0..PAIR_COUNT {
            for (s, mn) in so16_bracket(a, kl) {
                tr.push((kl, mn, 2 * s));
            }
        }
        let delta = d.get(a);
        for al in 0..SPINOR_DIM {
            for be in 0..SPINOR_DIM {
                let v = delta.get(al, be).doubled();
                if v != 0 {
                    tr.push((spinor_flat(al), spinor_flat(be), v));
                }
            }
        }
        out.push(SparseHalfIntMatrix::from_triplets(DIM, DIM, &tr)?);
    }
    for alpha in 0..SPINOR_DIM {
        let mut tr = Vec::new();
        for p in 0..PAIR_COUNT {
            let delta = d.get(p);
            for other in 0..SPINOR_DIM {
                let v = delta.get(alpha, other).doubled();
                if v != 0 {
                    tr.push((p, spinor_flat(other), 4 * v));
                    tr.push((spinor_flat(other), p, -4 * v));
                }
            }
        }
        out.push(SparseHalfIntMatrix::from_triplets(DIM, DIM, &tr)?);
    }
    Ok(out)
}

/// One of the four nonzero block families of the generator matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockFamily {
    /// Vector generator, vector-vector block.
    VectorOnVectors,
    /// Vector generator, spinor-spinor block.
    VectorOnSpinors,
    /// Spinor generator, vector rows × spinor columns.
    SpinorToVectors,
    /// Spinor generator, spinor rows × vector columns.
    SpinorToSpinors,
}

impl BlockFamily {
    pub const ALL: [BlockFamily; 4] = [
        BlockFamily::VectorOnVectors,
        BlockFamily::VectorOnSpinors,
        BlockFamily::SpinorToVectors,
        BlockFamily::SpinorToSpinors,
    ];

    fn generators(self) -> std::ops::Range<usize> {
        match self {
            BlockFamily::VectorOnVectors | BlockFamily::VectorOnSpinors => 0..PAIR_COUNT,
            _ => PAIR_COUNT..DIM,
        }
    }

    fn contains(self, r: usize, c: usize) -> bool {
        let (rv, cv) = (r < PAIR_COUNT, c < PAIR_COUNT);
        match self {
            BlockFamily::VectorOnVectors => rv && cv,
            BlockFamily::VectorOnSpinors => !rv && !cv,
            BlockFamily::SpinorToVectors => rv && !cv,
            BlockFamily::SpinorToSpinors => !rv && cv,
        }
    }
}

/// Exact rational factor `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// How a transcribed block family relates to the canonical one: a uniform
/// factor `λ` with `other = λ·canonical`, or with `other = λ·canonicalᵀ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRelation {
    pub family: BlockFamily,
    pub direct: Option<Ratio>,
    pub transposed: Option<Ratio>,
}

fn uniform_factor(pairs: impl Iterator<Item = (i64, i64)>) -> Option<Ratio> {
    let mut factor: Option<(i64, i64)> = None;
    for (other, canon) in pairs {
        match (other, canon) {
            (0, 0) => {}
            (_, 0) | (0, _) => return None,
            (o, c) => match factor {
                None => factor = Some((o, c)),
                Some((fo, fc)) => {
                    if o as i128 * fc as i128 != fo as i128 * c as i128 {
                        return None;
                    }
                }
            },
        }
    }
    factor.map(|(o, c)| {
        let g = gcd(o, c);
        let s = if c < 0 { -1 } else { 1 };
        Ratio {
            num: s * o / g,
            den: s * c / g,
        }
    })
}

/// Compares each block family of `other` against the canonical adjoint matrices.
pub fn compare_block_families(other: &[SparseHalfIntMatrix], canonical: &AdjointRep) -> Vec<BlockRelation> {
    BlockFamily::ALL
        .iter()
        .map(|&family| {
            let mut direct = Vec::new();
            let mut transposed = Vec::new();
            for g in family.generators() {
                let (o, c) = (&other[g], canonical.matrix(g));
                let ct = c.transpose();
                let mut positions: Vec<(usize, usize)> = o
                    .iter()
                    .chain(c.iter())
                    .chain(ct.iter())
                    .map(|(r, col, _)| (r, col))
                    .filter(|&(r, col)| family.contains(r, col))
                    .collect();
                positions.sort_unstable();
                positions.dedup();
                for (r, col) in positions {
                    let ov = o.get(r, col).doubled();
                    direct.push((ov, c.get(r, col).doubled()));
                    transposed.push((ov, c.get(col, r).doubled()));
                }
            }
            BlockRelation {
                family,
                direct: uniform_factor(direct.into_iter()),
                transposed: uniform_factor(transposed.into_iter()),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_index_bijection() {
        for flat in 0..DIM {
            assert_eq!(BasisIndex::from_flat(flat).flat(), flat);
        }
        assert_eq!(BasisIndex::from_flat(0), BasisIndex::Vector(1, 2));
        assert_eq!(BasisIndex::from_flat(119), BasisIndex::Vector(15, 16));
        assert_eq!(BasisIndex::from_flat(120), BasisIndex::Spinor(1));
        assert_eq!(BasisIndex::from_flat(247), BasisIndex::Spinor(128));
        assert_eq!(BasisIndex::Vector(2, 3).to_string(), "J_2,3");
    }

    #[test]
    fn uniform_factor_detection() {
        assert_eq!(
            uniform_factor([(4, -1), (0, 0), (-8, 2)].into_iter()),
            Some(Ratio { num: -4, den: 1 })
        );
        assert_eq!(
            uniform_factor([(1, 2), (2, 4)].into_iter()),
            Some(Ratio { num: 1, den: 2 })
        );
        assert_eq!(uniform_factor([(1, 1), (1, 2)].into_iter()), None);
        assert_eq!(uniform_factor([(1, 0)].into_iter()), None);
    }

    #[test]
    fn element_guards() {
        assert!(AlgebraElement::from_coeffs(vec![HalfInt::ZERO; 3]).is_err());
        assert!(AlgebraElement::zero().is_zero());
        assert!(!AlgebraElement::basis(5).is_zero());
    }
}
