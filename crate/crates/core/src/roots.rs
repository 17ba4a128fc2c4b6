//! Roots of E8 relative to a spinor Cartan subalgebra.
//!
//! The joint spectrum of the eight commuting antisymmetric matrices `ad(C_a)`
//! is taken from one generic combination `A = Σ t_a ad(C_a)`: each 2-plane
//! eigenspace of `−A²` is a root plane, and the rotation rates of the
//! individual `ad(C_a)` on it are the root coordinates. Rates are snapped to
//! half-integers; everything after the snap is exact and re-certified by
//! brute force (negation, Weyl reflections, root strings, Cartan matrix).

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_rational::Ratio as Q;
use serde::{Deserialize, Serialize};

use crate::algebra::{Ratio, DIM, RANK};
use crate::cartan::CartanSet;
use crate::error::{Error, Result};
use crate::sparse::SparseHalfIntMatrix;

/// Root in doubled coordinates with respect to `C_1, …, C_8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root(pub [i32; RANK]);

impl Root {
    pub fn doubled(&self) -> [i32; RANK] {
        self.0
    }

    pub fn coords(&self) -> [f64; RANK] {
        self.0.map(|d| d as f64 / 2.0)
    }

    /// Euclidean pairing at four times its true value.
    pub fn pairing4(&self, other: &Root) -> i64 {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a as i64 * b as i64).sum()
    }

    pub fn neg(&self) -> Root {
        Root(self.0.map(|d| -d))
    }

    pub fn add(&self, other: &Root) -> Root {
        let mut out = self.0;
        for (o, d) in out.iter_mut().zip(other.0) {
            *o += d;
        }
        Root(out)
    }

    pub fn sub(&self, other: &Root) -> Root {
        self.add(&other.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    /// All coordinates integral, as in `(±1, ±1, 0, …)`.
    pub fn is_integer_type(&self) -> bool {
        self.0.iter().all(|d| d % 2 == 0)
    }

    /// All coordinates in ½ + ℤ, as in `½(±1, …, ±1)`.
    pub fn is_half_integer_type(&self) -> bool {
        self.0.iter().all(|d| d % 2 != 0)
    }

    /// Weyl reflection `s_self(β) = β − 2(self, β)/(self, self)·self`, when integral.
    pub fn reflect(&self, beta: &Root) -> Option<Root> {
        let num = 2 * self.pairing4(beta);
        let den = self.pairing4(self);
        if num % den != 0 {
            return None;
        }
        let k = (num / den) as i32;
        Some(Root(std::array::from_fn(|a| beta.0[a] - k * self.0[a])))
    }

    /// Positivity functional `Σ 8^(7−a) d_a`; injective on roots.
    pub fn functional(&self) -> i64 {
        self.0.iter().fold(0i64, |acc, &d| acc * 8 + d as i64)
    }
}

/// Deterministic generic weights: `t_a = 1/(100 + 7a + 13k)`, `a = 1..8`.
pub fn generic_weights(attempt: usize) -> [f64; RANK] {
    std::array::from_fn(|a| 1.0 / (100.0 + 7.0 * (a as f64 + 1.0) + 13.0 * attempt as f64))
}

/// Admissible normalizations between raw rates and root coordinates, in search order.
pub const SCALE_CANDIDATES: [Ratio; 5] = [
    Ratio { num: 1, den: 1 },
    Ratio { num: 2, den: 1 },
    Ratio { num: 1, den: 2 },
    Ratio { num: 4, den: 1 },
    Ratio { num: 1, den: 4 },
];

/// Attempts at a generic weight vector before giving up.
const MAX_ATTEMPTS: usize = 8;

pub fn to_dense_f64(m: &SparseHalfIntMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.rows(), m.cols());
    for (r, c, v) in m.iter() {
        d[(r, c)] = v as f64 / 2.0;
    }
    d
}

/// A joint invariant 2-plane: `u, v` orthonormal with `ad(C_a)` acting as
/// `[[0, ω_a], [−ω_a, 0]]` in that basis.
#[derive(Clone, Debug)]
pub struct RootPlane {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub rates: [f64; RANK],
    /// Snapped positive root of the plane, oriented so `(u + iv)` has eigenvalue `i·root·scale`.
    pub root: Root,
}

/// Output of the spectral extraction.
#[derive(Clone, Debug)]
pub struct RootExtraction {
    /// The 240 roots, ascending.
    pub roots: Vec<Root>,
    pub scale: Ratio,
    pub max_residual: f64,
    /// Which generic weight vector succeeded (see [`generic_weights`]).
    pub attempt: usize,
    pub kernel_dim: usize,
    pub kernel: Vec<DVector<f64>>,
    pub planes: Vec<RootPlane>,
}

fn snap_half(x: f64) -> (i32, f64) {
    let d = (2.0 * x).round();
    (d as i32, (x - d / 2.0).abs())
}

/// An invariant 2-plane `(u, v)` with its rotation rate under each `C_a`.
type RawPlane = (DVector<f64>, DVector<f64>, [f64; RANK]);

/// Splits the spectrum of `Σ t_a ad(C_a)` into kernel and root planes.
fn joint_spectrum(
    cartan: &[DMatrix<f64>],
    t: &[f64; RANK],
) -> std::result::Result<(Vec<DVector<f64>>, Vec<RawPlane>), String> {
    let mut a = DMatrix::<f64>::zeros(DIM, DIM);
    for (c, &w) in cartan.iter().zip(t) {
        a += c * w;
    }
    let h = -(&a * &a);
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = vals[DIM - 1];
    let kernel_cut = 1e-9 * top;
    let kernel_dim = vals.iter().take_while(|&&v| v <= kernel_cut).count();
    if kernel_dim != RANK {
        return Err(format!("kernel dimension {kernel_dim}"));
    }
    let nonzero = &vals[RANK..];
    for p in 0..nonzero.len() / 2 {
        let split = nonzero[2 * p + 1] - nonzero[2 * p];
        let below = if p == 0 {
            nonzero[0] - vals[RANK - 1]
        } else {
            nonzero[2 * p] - nonzero[2 * p - 1]
        };
        let above = if 2 * p + 2 < nonzero.len() {
            nonzero[2 * p + 2] - nonzero[2 * p + 1]
        } else {
            f64::INFINITY
        };
        if split > 1e-3 * below.min(above) {
            return Err(format!("eigenvalue collision near plane {p}"));
        }
    }
    let col = |k: usize| eig.eigenvectors.column(order[k]).into_owned();
    let kernel = (0..RANK).map(col).collect();
    let planes = (0..(DIM - RANK) / 2)
        .map(|p| {
            let u = col(RANK + 2 * p);
            let v = col(RANK + 2 * p + 1);
            let rates = std::array::from_fn(|i| u.dot(&(&cartan[i] * &v)));
            (u, v, rates)
        })
        .collect();
    Ok((kernel, planes))
}

/// Spectral root extraction with snapping tolerance `tol`.
pub fn compute_roots(c: &CartanSet, tol: f64) -> Result<RootExtraction> {
    compute_roots_from(c, tol, 0)
}

/// As [`compute_roots`], starting the weight sequence at `first_attempt`.
pub fn compute_roots_from(c: &CartanSet, tol: f64, first_attempt: usize) -> Result<RootExtraction> {
    let cartan: Vec<DMatrix<f64>> = c.matrices().iter().map(to_dense_f64).collect();
    let mut last_err = String::new();
    for attempt in first_attempt..first_attempt + MAX_ATTEMPTS {
        let (kernel, raw) = match joint_spectrum(&cartan, &generic_weights(attempt)) {
            Ok(s) => s,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let (scale, max_residual) = choose_scale(&raw, tol)?;
        let s = scale.num as f64 / scale.den as f64;
        let mut planes = Vec::with_capacity(raw.len());
        for (u, v, rates) in raw {
            let snapped = Root(rates.map(|w| snap_half(w / s).0));
            let (u, v, rates, root) = if snapped.functional() < 0 {
                (u, -v, rates.map(|w| -w), snapped.neg())
            } else {
                (u, v, rates, snapped)
            };
            planes.push(RootPlane { u, v, rates, root });
        }
        let mut roots: Vec<Root> = planes.iter().flat_map(|p| [p.root, p.root.neg()]).collect();
        roots.sort();
        let distinct: HashSet<_> = roots.iter().collect();
        if distinct.len() != roots.len() || roots.iter().any(Root::is_zero) {
            return Err(Error::Numerical("snapped roots are not distinct and nonzero".into()));
        }
        return Ok(RootExtraction {
            roots,
            scale,
            max_residual,
            attempt,
            kernel_dim: kernel.len(),
            kernel,
            planes,
        });
    }
    Err(Error::Numerical(format!(
        "no generic weight vector separated the spectrum ({last_err})"
    )))
}

/// First candidate scale for which every rate snaps within `tol` to a value in
/// `{0, ±½, ±1}`; returns the scale and the largest residual.
fn choose_scale(raw: &[(DVector<f64>, DVector<f64>, [f64; RANK])], tol: f64) -> Result<(Ratio, f64)> {
    'candidates: for cand in SCALE_CANDIDATES {
        let s = cand.num as f64 / cand.den as f64;
        let mut worst = 0.0f64;
        for (_, _, rates) in raw {
            for &w in rates {
                let (d, res) = snap_half(w / s);
                if res > tol || d.abs() > 2 {
                    continue 'candidates;
                }
                worst = worst.max(res);
            }
        }
        return Ok((cand, worst));
    }
    Err(Error::Numerical(
        "no admissible scale snaps the root rates to half-integers".into(),
    ))
}

/// Positive roots under [`Root::functional`] and the simple roots among them
/// (positive roots that are not a sum of two positive roots), both ascending
/// by the functional.
pub fn choose_positive_and_simple(roots: &[Root]) -> Result<(Vec<Root>, Vec<Root>)> {
    let mut seen = HashMap::new();
    for r in roots {
        if let Some(prev) = seen.insert(r.functional(), *r) {
            if prev != *r {
                return Err(Error::Invariant(format!(
                    "positivity functional ties on {prev:?} and {r:?}"
                )));
            }
        }
        if r.functional() == 0 {
            return Err(Error::Invariant("positivity functional vanishes on a root".into()));
        }
    }
    let mut positives: Vec<Root> = roots.iter().copied().filter(|r| r.functional() > 0).collect();
    positives.sort_by_key(Root::functional);
    let sums: HashSet<Root> = positives
        .iter()
        .enumerate()
        .flat_map(|(i, a)| positives[i + 1..].iter().map(move |b| a.add(b)))
        .collect();
    let simples = positives.iter().copied().filter(|r| !sums.contains(r)).collect();
    Ok((positives, simples))
}

/// `A_ij = 2(α_i, α_j)/(α_j, α_j)`.
pub fn cartan_matrix(simples: &[Root]) -> Result<Vec<Vec<i64>>> {
    simples
        .iter()
        .map(|ai| {
            simples
                .iter()
                .map(|aj| {
                    let num = 2 * ai.pairing4(aj);
                    let den = aj.pairing4(aj);
                    if num % den != 0 {
                        Err(Error::Invariant(format!("non-integral Cartan entry {num}/{den}")))
                    } else {
                        Ok(num / den)
                    }
                })
                .collect()
        })
        .collect()
}

/// The E8 Cartan matrix with Bourbaki labeling: chain 1–3–4–5–6–7–8 and node 2 on node 4.
pub fn standard_e8_cartan() -> [[i64; RANK]; RANK] {
    let mut m = [[0i64; RANK]; RANK];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)] {
        m[a - 1][b - 1] = -1;
        m[b - 1][a - 1] = -1;
    }
    m
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// A permutation `π` with `cm[π(i)][π(j)] = standard[i][j]`, searched over all 8! orderings.
pub fn bourbaki_labeling(cm: &[Vec<i64>]) -> Option<[usize; RANK]> {
    if cm.len() != RANK || cm.iter().any(|r| r.len() != RANK) {
        return None;
    }
    let std = standard_e8_cartan();
    let mut p: [usize; RANK] = std::array::from_fn(|i| i);
    loop {
        if (0..RANK).all(|i| (0..RANK).all(|j| cm[p[i]][p[j]] == std[i][j])) {
            return Some(p);
        }
        if !next_permutation(&mut p) {
            return None;
        }
    }
}

/// Coefficients of `r` over the simple roots, solved exactly over ℚ.
pub fn simple_coefficients(simples: &[Root; RANK], r: &Root) -> Option<[Q<i64>; RANK]> {
    // Columns are the simples: Σ_i c_i s_i[a] = r[a].
    let mut m: Vec<Vec<Q<i64>>> = (0..RANK)
        .map(|a| {
            let mut row: Vec<Q<i64>> = simples.iter().map(|s| Q::from_integer(s.0[a] as i64)).collect();
            row.push(Q::from_integer(r.0[a] as i64));
            row
        })
        .collect();
    for col in 0..RANK {
        let pivot = (col..RANK).find(|&i| m[i][col] != Q::from_integer(0))?;
        m.swap(col, pivot);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for i in 0..RANK {
            if i != col && m[i][col] != Q::from_integer(0) {
                let f = m[i][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| m[i][RANK]))
}

/// Integer coefficients over the simples, when they exist.
pub fn integer_coefficients(simples: &[Root; RANK], r: &Root) -> Option<[i64; RANK]> {
    let c = simple_coefficients(simples, r)?;
    if c.iter().all(|x| x.is_integer()) {
        Some(c.map(|x| x.to_integer()))
    } else {
        None
    }
}

/// The unique positive root dominating all others in the root order, with its marks.
pub fn highest_root(positives: &[Root], simples: &[Root; RANK]) -> Result<(Root, [i64; RANK])> {
    let coeffs: Vec<(Root, [i64; RANK])> = positives
        .iter()
        .map(|r| {
            integer_coefficients(simples, r)
                .filter(|c| c.iter().all(|&x| x >= 0))
                .map(|c| (*r, c))
                .ok_or_else(|| Error::Invariant(format!("{r:?} is not a nonnegative integer combination of simples")))
        })
        .collect::<Result<_>>()?;
    let maximal: Vec<&(Root, [i64; RANK])> = coeffs
        .iter()
        .filter(|(_, c)| coeffs.iter().all(|(_, d)| (0..RANK).all(|i| c[i] >= d[i])))
        .collect();
    match maximal.as_slice() {
        [(r, c)] => Ok((*r, *c)),
        [] => Err(Error::Invariant("no positive root dominates all others".into())),
        _ => Err(Error::Invariant("highest root is not unique".into())),
    }
}

/// Reference simple roots (doubled coordinates) for the standard E8 alcove,
/// in Bourbaki order.
pub fn reference_simple_roots() -> [Root; RANK] {
    [
        Root([1, -1, -1, -1, -1, -1, -1, 1]),
        Root([2, 2, 0, 0, 0, 0, 0, 0]),
        Root([-2, 2, 0, 0, 0, 0, 0, 0]),
        Root([0, -2, 2, 0, 0, 0, 0, 0]),
        Root([0, 0, -2, 2, 0, 0, 0, 0]),
        Root([0, 0, 0, -2, 2, 0, 0, 0]),
        Root([0, 0, 0, 0, -2, 2, 0, 0]),
        Root([0, 0, 0, 0, 0, -2, 2, 0]),
    ]
}

pub const REFERENCE_HIGHEST_ROOT: Root = Root([0, 0, 0, 0, 0, 0, 2, 2]);

/// The published marks `(n_1, …, n_8)`.
pub const REFERENCE_MARKS: [i64; RANK] = [2, 3, 4, 6, 5, 4, 3, 2];

/// Signed coordinate permutation `P` with `P·ours_i = reference_i` for all
/// simples, if the two simple systems differ only by relabeling the `C_a`.
/// Returned as `(target coordinate, sign)` per source coordinate.
pub fn reference_alignment(ours: &[Root; RANK], reference: &[Root; RANK]) -> Option<[(usize, i32); RANK]> {
    // P = Rᵀ (Sᵀ)⁻¹: apply P to each unit vector via the simple-root expansion.
    let mut out = [(0usize, 0i32); RANK];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut e = [0i32; RANK];
        e[a] = 2;
        let c = simple_coefficients(ours, &Root(e))?;
        let mut image = [Q::from_integer(0i64); RANK];
        for (ci, r) in c.iter().zip(reference) {
            for (b, x) in image.iter_mut().enumerate() {
                *x += *ci * Q::from_integer(r.0[b] as i64);
            }
        }
        let nz: Vec<usize> = (0..RANK).filter(|&b| image[b] != Q::from_integer(0)).collect();
        let [b] = nz.as_slice() else { return None };
        let v = image[*b];
        if v == Q::from_integer(2) {
            *slot = (*b, 1);
        } else if v == Q::from_integer(-2) {
            *slot = (*b, -1);
        } else {
            return None;
        }
    }
    let mut targets: Vec<usize> = out.iter().map(|t| t.0).collect();
    targets.sort_unstable();
    targets.dedup();
    (targets.len() == RANK).then_some(out)
}

/// The assembled root system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    pub scale: Ratio,
    pub roots: Vec<Root>,
    pub positives: Vec<Root>,
    /// Simple roots in Bourbaki order (after [`bourbaki_labeling`]).
    pub simples: [Root; RANK],
    /// Simple roots as first found, ascending by the positivity functional.
    pub simples_found: [Root; RANK],
    /// `simples[i] = simples_found[labeling[i]]`.
    pub labeling: [usize; RANK],
    pub cartan_matrix: Vec<Vec<i64>>,
    pub highest: Root,
    pub marks: [i64; RANK],
}

impl RootSystem {
    pub fn from_roots(roots: Vec<Root>, scale: Ratio) -> Result<Self> {
        if roots.len() != 240 {
            return Err(Error::Invariant(format!("expected 240 roots, found {}", roots.len())));
        }
        let (positives, found) = choose_positive_and_simple(&roots)?;
        let simples_found: [Root; RANK] = found
            .try_into()
            .map_err(|v: Vec<Root>| Error::Invariant(format!("expected 8 simple roots, found {}", v.len())))?;
        let raw_cm = cartan_matrix(&simples_found)?;
        let labeling =
            bourbaki_labeling(&raw_cm).ok_or_else(|| Error::Invariant("Cartan matrix is not of type E8".into()))?;
        let simples = labeling.map(|i| simples_found[i]);
        let cartan_matrix = cartan_matrix(&simples)?;
        let (highest, marks) = highest_root(&positives, &simples)?;
        Ok(RootSystem {
            scale,
            roots,
            positives,
            simples,
            simples_found,
            labeling,
            cartan_matrix,
            highest,
            marks,
        })
    }

    pub fn contains(&self, r: &Root) -> bool {
        self.roots.binary_search(r).is_ok()
    }

    pub fn integer_type_count(&self) -> usize {
        self.roots.iter().filter(|r| r.is_integer_type()).count()
    }

    pub fn half_integer_type_count(&self) -> usize {
        self.roots.iter().filter(|r| r.is_half_integer_type()).count()
    }

    pub fn closed_under_negation(&self) -> bool {
        self.roots.iter().all(|r| self.contains(&r.neg()))
    }

    /// Pairs `(α, β)` whose reflection `s_α(β)` is not a root.
    pub fn weyl_closure_failures(&self) -> usize {
        self.roots
            .iter()
            .flat_map(|a| self.roots.iter().map(move |b| (a, b)))
            .filter(|(a, b)| a.reflect(b).is_none_or(|r| !self.contains(&r)))
            .count()
    }

    /// Pairs `r ≠ ±r'` violating "`r + r'` is a root iff `(r, r') = −1`".
    pub fn string_rule_failures(&self) -> usize {
        let norm4 = self.roots[0].pairing4(&self.roots[0]);
        self.roots
            .iter()
            .flat_map(|a| self.roots.iter().map(move |b| (a, b)))
            .filter(|(a, b)| a != b && **a != b.neg())
            .filter(|(a, b)| self.contains(&a.add(b)) != (2 * a.pairing4(b) == -norm4))
            .count()
    }

    /// All roots have the same squared length (2 in these coordinates).
    pub fn simply_laced(&self) -> bool {
        self.roots.iter().all(|r| r.pairing4(r) == 8)
    }

    /// `highest = Σ marks_a · simples_a`, exactly.
    pub fn highest_is_marked_sum(&self) -> bool {
        let mut acc = [0i64; RANK];
        for (m, s) in self.marks.iter().zip(&self.simples) {
            for (x, d) in acc.iter_mut().zip(s.0) {
                *x += m * d as i64;
            }
        }
        acc.iter().zip(self.highest.0).all(|(&x, d)| x == d as i64)
    }

    pub fn coxeter_number(&self) -> i64 {
        self.marks.iter().sum::<i64>() + 1
    }
}
