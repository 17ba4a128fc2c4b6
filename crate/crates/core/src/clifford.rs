//! Real gamma matrices for Spin(16) in the chiral 128 + 128 splitting.
//!
//! The 256×256 Clifford generators are `γ_i = [[0, Σ_i], [Σ_iᵀ, 0]]`; only the
//! chiral blocks `Σ_i` are stored. Fifteen of them are pairwise anticommuting
//! complex structures on ℝ¹²⁸ (a Hurwitz–Radon family); the sixteenth is the
//! identity. The family is assembled from octonionic left multiplication on
//! ℝ⁸ by two tensor steps:
//!
//! * `u_k = L_k ⊗ σ_z` (k = 1..7) and `u_8 = 1 ⊗ ε` give eight anticommuting
//!   complex structures on ℝ¹⁶, with `Ω = u_1⋯u_8` symmetric, `Ω² = 1` and
//!   anticommuting with every `u_k`;
//! * `L_k ⊗ Ω` (k = 1..7) together with `1 ⊗ u_j` (j = 1..8) give fifteen on
//!   ℝ⁸ ⊗ ℝ¹⁶.
//!
//! All factors are signed permutations, so every `Σ_i` is one too.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::halfint::{mat_mul, HalfInt, HalfIntMatrix};

pub const SPINOR_DIM: usize = 128;
pub const VECTOR_DIM: usize = 16;
/// Number of index pairs `i < j` among 16.
pub const PAIR_COUNT: usize = 120;

/// Fano-plane triples `(a, b, c)` with `e_a e_b = e_c`.
const FANO_TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 4),
    (2, 3, 5),
    (3, 4, 6),
    (4, 5, 7),
    (5, 6, 1),
    (6, 7, 2),
    (7, 1, 3),
];

/// Product of octonion units `e_i e_j` as `(sign, unit)`; unit 0 is the identity.
fn octonion_unit_product(i: usize, j: usize) -> (i64, usize) {
    match (i, j) {
        (0, j) => (1, j),
        (i, 0) => (1, i),
        (i, j) if i == j => (-1, 0),
        _ => {
            for &(a, b, c) in &FANO_TRIPLES {
                for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                    if (i, j) == (x, y) {
                        return (1, z);
                    }
                    if (i, j) == (y, x) {
                        return (-1, z);
                    }
                }
            }
            unreachable!("every pair of distinct imaginary units lies on one Fano line")
        }
    }
}

/// Left multiplication by the imaginary unit `e_k` (k = 1..7) on ℝ⁸.
pub fn octonion_left_multiplication(k: usize) -> HalfIntMatrix {
    assert!((1..=7).contains(&k), "imaginary octonion units are e_1..e_7");
    let mut m = HalfIntMatrix::zeros(8, 8);
    for j in 0..8 {
        let (sign, r) = octonion_unit_product(k, j);
        m.set(r, j, HalfInt::from_int(sign));
    }
    m
}

/// Kronecker product; exact because one factor is always integral here.
pub fn kron(a: &HalfIntMatrix, b: &HalfIntMatrix) -> Result<HalfIntMatrix> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = HalfIntMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    let y = b.get(k, l);
                    if !y.is_zero() {
                        out.set(i * br + k, j * bc + l, x.checked_mul(y)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn int2(vals: [i64; 4]) -> HalfIntMatrix {
    HalfIntMatrix::from_ints(2, 2, &vals).expect("2x2")
}

/// The sixteen chiral blocks `Σ_i` (index 0 ↔ Σ_1).
#[derive(Clone, Debug)]
pub struct GammaSystem {
    sigma: Vec<HalfIntMatrix>,
}

impl GammaSystem {
    pub fn sigma(&self, i: usize) -> &HalfIntMatrix {
        &self.sigma[i]
    }

    pub fn blocks(&self) -> &[HalfIntMatrix] {
        &self.sigma
    }

    /// Wraps externally supplied blocks after checking both invariants.
    pub fn from_blocks(sigma: Vec<HalfIntMatrix>) -> Result<Self> {
        let g = GammaSystem { sigma };
        g.check()?;
        Ok(g)
    }

    /// Verifies the signed-permutation property and both anticommutation
    /// relations over all 136 unordered pairs; reports the first failure.
    pub fn check(&self) -> Result<()> {
        if self.sigma.len() != VECTOR_DIM {
            return Err(Error::Invariant(format!(
                "expected {VECTOR_DIM} gamma blocks, found {}",
                self.sigma.len()
            )));
        }
        for (i, s) in self.sigma.iter().enumerate() {
            if s.shape() != (SPINOR_DIM, SPINOR_DIM) || !s.is_signed_permutation() {
                return Err(Error::Invariant(format!(
                    "Σ_{} is not a 128x128 signed permutation",
                    i + 1
                )));
            }
        }
        let failures: Vec<(usize, usize)> = clifford_pairs()
            .into_par_iter()
            .filter_map(|(i, j)| match self.anticommutators_ok(i, j) {
                Ok(true) => None,
                _ => Some((i, j)),
            })
            .collect();
        match failures.first() {
            None => Ok(()),
            Some(&(i, j)) => Err(Error::Invariant(format!(
                "Σ_{0}Σ_{1}ᵀ + Σ_{1}Σ_{0}ᵀ or Σ_{0}ᵀΣ_{1} + Σ_{1}ᵀΣ_{0} differs from 2δ·I",
                i + 1,
                j + 1
            ))),
        }
    }

    /// Checks `Σ_iΣ_jᵀ + Σ_jΣ_iᵀ = 2δ_ij·I` and `Σ_iᵀΣ_j + Σ_jᵀΣ_i = 2δ_ij·I` exactly.
    pub fn anticommutators_ok(&self, i: usize, j: usize) -> Result<bool> {
        let (a, b) = (&self.sigma[i], &self.sigma[j]);
        let (at, bt) = (a.transpose(), b.transpose());
        let left = mat_mul(a, &bt)?.checked_add(&mat_mul(b, &at)?)?;
        let right = mat_mul(&at, b)?.checked_add(&mat_mul(&bt, a)?)?;
        let target = if i == j {
            HalfIntMatrix::identity(SPINOR_DIM).checked_scale(2)?
        } else {
            HalfIntMatrix::zeros(SPINOR_DIM, SPINOR_DIM)
        };
        Ok(left == target && right == target)
    }
}

/// All 136 unordered pairs `i ≤ j` of gamma indices.
pub fn clifford_pairs() -> Vec<(usize, usize)> {
    (0..VECTOR_DIM)
        .flat_map(|i| (i..VECTOR_DIM).map(move |j| (i, j)))
        .collect()
}

/// Builds the Hurwitz–Radon family and self-checks it.
pub fn build_gamma_system() -> Result<GammaSystem> {
    let octo: Vec<HalfIntMatrix> = (1..=7).map(octonion_left_multiplication).collect();
    let id8 = HalfIntMatrix::identity(8);
    let sigma_z = int2([1, 0, 0, -1]);
    let eps = int2([0, 1, -1, 0]);

    let mut u: Vec<HalfIntMatrix> = octo.iter().map(|l| kron(l, &sigma_z)).collect::<Result<_>>()?;
    u.push(kron(&id8, &eps)?);
    let mut omega = HalfIntMatrix::identity(16);
    for uk in &u {
        omega = mat_mul(&omega, uk)?;
    }

    let mut sigma: Vec<HalfIntMatrix> = octo.iter().map(|l| kron(l, &omega)).collect::<Result<_>>()?;
    for uk in &u {
        sigma.push(kron(&id8, uk)?);
    }
    sigma.push(HalfIntMatrix::identity(SPINOR_DIM));

    GammaSystem::from_blocks(sigma)
}

/// Index pair `(i, j)`, zero-based with `i < j`, from its lexicographic position.
pub fn pair_from_index(k: usize) -> (usize, usize) {
    let mut k = k;
    for i in 0..VECTOR_DIM {
        let row = VECTOR_DIM - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    panic!("pair index out of range")
}

/// Lexicographic position of the zero-based pair `(i, j)`, `i < j`.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < VECTOR_DIM);
    i * (2 * VECTOR_DIM - i - 1) / 2 + (j - i - 1)
}

/// The 120 generators `Δ_ij = ¼(Σ_iΣ_jᵀ − Σ_jΣ_iᵀ)` on the positive-chirality
/// space, indexed lexicographically by `i < j`.
#[derive(Clone, Debug)]
pub struct SpinorGenerators {
    delta: Vec<HalfIntMatrix>,
}

impl SpinorGenerators {
    pub fn get(&self, pair: usize) -> &HalfIntMatrix {
        &self.delta[pair]
    }

    pub fn pair(&self, i: usize, j: usize) -> &HalfIntMatrix {
        &self.delta[pair_index(i, j)]
    }

    pub fn all(&self) -> &[HalfIntMatrix] {
        &self.delta
    }

    pub fn from_matrices(delta: Vec<HalfIntMatrix>) -> Self {
        assert_eq!(delta.len(), PAIR_COUNT);
        SpinorGenerators { delta }
    }
}

/// `¼(a·bᵀ − b·aᵀ)` exactly, or `¼(aᵀ·b − bᵀ·a)` when `transposed_first`.
fn quarter_commutator(a: &HalfIntMatrix, b: &HalfIntMatrix, transposed_first: bool) -> Result<HalfIntMatrix> {
    let diff = if transposed_first {
        mat_mul(&a.transpose(), b)?.checked_sub(&mat_mul(&b.transpose(), a)?)?
    } else {
        mat_mul(a, &b.transpose())?.checked_sub(&mat_mul(b, &a.transpose())?)?
    };
    let mut out = HalfIntMatrix::zeros(diff.rows(), diff.cols());
    for r in 0..diff.rows() {
        for c in 0..diff.cols() {
            let d = diff.get(r, c).doubled();
            if d % 4 != 0 {
                return Err(Error::InexactHalving {
                    row: r,
                    col: c,
                    value: d,
                });
            }
            out.set(r, c, HalfInt::from_doubled(d / 4));
        }
    }
    Ok(out)
}

pub fn spinor_generators(g: &GammaSystem) -> Result<SpinorGenerators> {
    let delta = (0..PAIR_COUNT)
        .into_par_iter()
        .map(|k| {
            let (i, j) = pair_from_index(k);
            quarter_commutator(g.sigma(i), g.sigma(j), false)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpinorGenerators { delta })
}

/// The generators on the negative-chirality space, `¼(Σ_iᵀΣ_j − Σ_jᵀΣ_i)`.
pub fn conjugate_spinor_generators(g: &GammaSystem) -> Result<SpinorGenerators> {
    let delta = (0..PAIR_COUNT)
        .into_par_iter()
        .map(|k| {
            let (i, j) = pair_from_index(k);
            quarter_commutator(g.sigma(i), g.sigma(j), true)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpinorGenerators { delta })
}

/// A term `sign · X_pair` of the right-hand side of the so(16) bracket.
pub type PairTerm = (i64, usize);

/// Right-hand side of `[J_ij, J_kl] = δ_jk J_il − δ_jl J_ik − δ_ik J_jl + δ_il J_jk`
/// in the lexicographic pair basis, with `J_ba = −J_ab` folded in.
pub fn so16_bracket(a: usize, b: usize) -> Vec<PairTerm> {
    let (i, j) = pair_from_index(a);
    let (k, l) = pair_from_index(b);
    let mut terms: Vec<PairTerm> = Vec::new();
    for (delta, sign, p, q) in [
        (j == k, 1, i, l),
        (j == l, -1, i, k),
        (i == k, -1, j, l),
        (i == l, 1, j, k),
    ] {
        if !delta || p == q {
            continue;
        }
        let (s, idx) = if p < q {
            (sign, pair_index(p, q))
        } else {
            (-sign, pair_index(q, p))
        };
        match terms.iter_mut().find(|t| t.1 == idx) {
            Some(t) => t.0 += s,
            None => terms.push((s, idx)),
        }
    }
    terms.retain(|t| t.0 != 0);
    terms.sort_by_key(|t| t.1);
    terms
}
