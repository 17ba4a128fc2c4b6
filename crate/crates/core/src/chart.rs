//! Group elements in the adjoint representation: the torus exponential,
//! the Spin(16) factor and the composed chart `S(x)·exp(Σ yᵃ C_a)·S(z)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AdjointRep, DIM, RANK};
use crate::cartan::CartanSet;
use crate::clifford::PAIR_COUNT;
use crate::error::{Error, Result};
use crate::region::EulerPoint;
use crate::roots::{to_dense_f64, Root, RootExtraction};
use crate::sparse::SparseHalfIntMatrix;

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// `‖RᵀR − I‖` as the largest entry.
pub fn orthogonality_error(r: &DMatrix<f64>) -> f64 {
    let mut g = r.transpose() * r;
    for i in 0..g.nrows() {
        g[(i, i)] -= 1.0;
    }
    max_abs(&g)
}

/// `exp(a)` for antisymmetric `a` by Taylor series with scaling and squaring.
pub fn expm_antisymmetric(a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::InvalidInput("expm of a non-square matrix".into()));
    }
    let asym = max_abs(&(a + a.transpose()));
    if asym >= 1e-12 {
        return Err(Error::InvalidInput(format!(
            "matrix is not antisymmetric (‖a + aᵀ‖ = {asym:e})"
        )));
    }
    let n = a.nrows();
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a / 2f64.powi(squarings as i32);
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &b / k as f64;
        result += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    let err = orthogonality_error(&result);
    if err >= tol {
        return Err(Error::Numerical(format!("expm lost orthogonality ({err:e})")));
    }
    Ok(result)
}

/// A generator that is a direct sum of planar rotations: `M(r, c) = w`,
/// `M(c, r) = −w` on disjoint index pairs and zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneGenerator {
    pub planes: Vec<(usize, usize, f64)>,
}

impl PlaneGenerator {
    /// Splits a sparse antisymmetric matrix into disjoint planes, if it has that shape.
    pub fn from_sparse(m: &SparseHalfIntMatrix) -> Result<Self> {
        let mut used = vec![false; m.rows()];
        let mut planes = Vec::new();
        for (r, c, v) in m.iter() {
            if r > c {
                continue;
            }
            if r == c || m.get(c, r).doubled() != -v || used[r] || used[c] {
                return Err(Error::InvalidInput("generator is not a disjoint sum of planes".into()));
            }
            used[r] = true;
            used[c] = true;
            planes.push((r, c, v as f64 / 2.0));
        }
        if planes.len() * 2 != m.nnz() {
            return Err(Error::InvalidInput("generator is not antisymmetric".into()));
        }
        Ok(PlaneGenerator { planes })
    }

    /// `A ← A·exp(x M)`.
    pub fn right_multiply(&self, a: &mut DMatrix<f64>, x: f64) {
        for &(r, c, w) in &self.planes {
            let (s, co) = (x * w).sin_cos();
            for i in 0..a.nrows() {
                let ar = a[(i, r)];
                let ac = a[(i, c)];
                a[(i, r)] = co * ar - s * ac;
                a[(i, c)] = s * ar + co * ac;
            }
        }
    }

    /// `A ← exp(x M)·A`.
    pub fn left_multiply(&self, a: &mut DMatrix<f64>, x: f64) {
        for &(r, c, w) in &self.planes {
            let (s, co) = (x * w).sin_cos();
            for j in 0..a.ncols() {
                let ar = a[(r, j)];
                let ac = a[(c, j)];
                a[(r, j)] = co * ar + s * ac;
                a[(c, j)] = -s * ar + co * ac;
            }
        }
    }
}

/// The 120 generators `ad(J_ij)` in lexicographic order.
pub fn spin16_generators(rep: &AdjointRep) -> Result<Vec<PlaneGenerator>> {
    (0..PAIR_COUNT)
        .map(|k| PlaneGenerator::from_sparse(rep.matrix(k)))
        .collect()
}

/// `Π_k exp(x_k ad(J_{i_k j_k}))` in lexicographic order of `(i, j)`.
pub fn subgroup_element(x: &[f64], gens: &[PlaneGenerator]) -> Result<DMatrix<f64>> {
    if x.len() != gens.len() {
        return Err(Error::DimensionMismatch {
            op: "subgroup_element",
            left: (x.len(), 1),
            right: (gens.len(), 1),
        });
    }
    let mut s = DMatrix::<f64>::identity(DIM, DIM);
    for (g, &xk) in gens.iter().zip(x) {
        if xk != 0.0 {
            g.right_multiply(&mut s, xk);
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneRecord {
    pub root: Root,
    /// Columns `(u, v)` of `Q`.
    pub plane: (usize, usize),
}

/// Orthogonal `Q` block-diagonalizing every `ad(C_a)` at once.
#[derive(Clone, Debug)]
pub struct TorusDecomposition {
    pub basis: DMatrix<f64>,
    pub planes: Vec<PlaneRecord>,
    pub fixed: Vec<usize>,
    pub scale: f64,
    pub orthogonality_error: f64,
    pub block_error: f64,
}

/// Largest deviation of `Qᵀ C_a Q` from the predicted block structure, over all `a`.
fn block_error(q: &DMatrix<f64>, c: &[DMatrix<f64>], planes: &[PlaneRecord], scale: f64) -> f64 {
    let mut worst = 0.0f64;
    for (a, ca) in c.iter().enumerate() {
        let mut b = q.transpose() * ca * q;
        for p in planes {
            let w = p.root.coords()[a] * scale;
            let (u, v) = p.plane;
            b[(u, v)] -= w;
            b[(v, u)] += w;
        }
        worst = worst.max(max_abs(&b));
    }
    worst
}

/// Assembles `Q = [kernel | u_1 v_1 | … | u_120 v_120]` and validates it.
pub fn torus_decomposition(c: &CartanSet, ext: &RootExtraction) -> Result<TorusDecomposition> {
    let mut q = DMatrix::<f64>::zeros(DIM, DIM);
    for (k, v) in ext.kernel.iter().enumerate() {
        q.set_column(k, v);
    }
    let mut planes = Vec::with_capacity(ext.planes.len());
    for (p, rp) in ext.planes.iter().enumerate() {
        let (u, v) = (RANK + 2 * p, RANK + 2 * p + 1);
        q.set_column(u, &rp.u);
        q.set_column(v, &rp.v);
        planes.push(PlaneRecord {
            root: rp.root,
            plane: (u, v),
        });
    }
    let scale = ext.scale.num as f64 / ext.scale.den as f64;
    let cd: Vec<DMatrix<f64>> = c.matrices().iter().map(to_dense_f64).collect();
    let td = TorusDecomposition {
        orthogonality_error: orthogonality_error(&q),
        block_error: block_error(&q, &cd, &planes, scale),
        basis: q,
        planes,
        fixed: (0..RANK).collect(),
        scale,
    };
    if td.orthogonality_error > 1e-12 || td.block_error > 1e-10 {
        return Err(Error::Numerical(format!(
            "torus decomposition failed validation (orthogonality {:e}, blocks {:e})",
            td.orthogonality_error, td.block_error
        )));
    }
    Ok(td)
}

impl TorusDecomposition {
    /// Rotation angles `θ_p = Σ_a yᵃ root_p[a]·scale`.
    pub fn angles(&self, y: &[f64; RANK]) -> Vec<f64> {
        self.planes
            .iter()
            .map(|p| p.root.coords().iter().zip(y).map(|(r, ya)| r * ya).sum::<f64>() * self.scale)
            .collect()
    }

    /// `D(y)·A` where `D` is the block rotation in the `Q` basis.
    fn rotate_rows(&self, y: &[f64; RANK], a: &mut DMatrix<f64>) {
        for (p, th) in self.planes.iter().zip(self.angles(y)) {
            let (s, co) = th.sin_cos();
            let (u, v) = p.plane;
            for j in 0..a.ncols() {
                let au = a[(u, j)];
                let av = a[(v, j)];
                a[(u, j)] = co * au + s * av;
                a[(v, j)] = -s * au + co * av;
            }
        }
    }

    /// `exp(Σ yᵃ ad(C_a)) = Q·D(y)·Qᵀ`.
    pub fn torus_element(&self, y: &[f64; RANK]) -> DMatrix<f64> {
        let mut dq = self.basis.transpose();
        self.rotate_rows(y, &mut dq);
        &self.basis * dq
    }
}

/// Everything needed to evaluate the chart, built once.
#[derive(Clone, Debug)]
pub struct Chart {
    pub generators: Vec<PlaneGenerator>,
    pub torus: TorusDecomposition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub step: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub threshold: f64,
    /// Smallest singular value above the threshold over the threshold.
    pub gap: f64,
    pub singular_values: Vec<f64>,
}

impl Chart {
    pub fn new(rep: &AdjointRep, torus: TorusDecomposition) -> Result<Self> {
        Ok(Chart {
            generators: spin16_generators(rep)?,
            torus,
        })
    }

    pub fn subgroup_element(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        subgroup_element(x, &self.generators)
    }

    pub fn torus_element(&self, y: &[f64; RANK]) -> DMatrix<f64> {
        self.torus.torus_element(y)
    }

    /// `S(x)·T(y)·S(z)`.
    pub fn element(&self, p: &EulerPoint) -> Result<DMatrix<f64>> {
        let sx = self.subgroup_element(&p.x)?;
        let sz = self.subgroup_element(&p.z)?;
        Ok(sx * self.torus_element(&p.y) * sz)
    }

    /// Numerical rank of the chart's Jacobian by central differences.
    ///
    /// Columns are independent and computed in parallel; the Gram matrix
    /// `JᵀJ` is then diagonalized, so the singular values resolve down to
    /// about `1e-8·σ_max`.
    pub fn rank(&self, p: &EulerPoint, h: f64) -> Result<RankReport> {
        let sx = self.subgroup_element(&p.x)?;
        let sz = self.subgroup_element(&p.z)?;
        let t = self.torus_element(&p.y);
        let right = &t * &sz;
        let left = &sx * &t;
        let lq = &sx * &self.torus.basis;
        let qr = self.torus.basis.transpose() * &sz;
        let n = PAIR_COUNT;
        let column = |k: usize| -> Result<Vec<f64>> {
            let eval = |sign: f64| -> Result<DMatrix<f64>> {
                if k < n {
                    let mut x = p.x.clone();
                    x[k] += sign * h;
                    Ok(self.subgroup_element(&x)? * &right)
                } else if k < n + RANK {
                    let mut y = p.y;
                    y[k - n] += sign * h;
                    let mut dr = qr.clone();
                    self.torus.rotate_rows(&y, &mut dr);
                    Ok(&lq * dr)
                } else {
                    let mut z = p.z.clone();
                    z[k - n - RANK] += sign * h;
                    Ok(&left * self.subgroup_element(&z)?)
                }
            };
            let d = (eval(1.0)? - eval(-1.0)?) / (2.0 * h);
            Ok(d.as_slice().to_vec())
        };
        let cols: Vec<Vec<f64>> = (0..DIM).into_par_iter().map(column).collect::<Result<_>>()?;
        let jac = DMatrix::from_fn(DIM * DIM, DIM, |r, c| cols[c][r]);
        drop(cols);
        let gram = jac.transpose() * &jac;
        let gram = (&gram + gram.transpose()) * 0.5;
        let mut singular_values: Vec<f64> = SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let sigma_max = singular_values[0];
        let threshold = sigma_max * 1e-6;
        let rank = singular_values.iter().filter(|&&s| s > threshold).count();
        let smallest_kept = singular_values[..rank].last().copied().unwrap_or(0.0);
        Ok(RankReport {
            rank,
            step: h,
            sigma_max,
            sigma_min: *singular_values.last().expect("nonempty"),
            threshold,
            gap: smallest_kept / threshold,
            singular_values,
        })
    }
}

/// `Gᵀ·K·G − K` as the largest entry, for a diagonal Killing form `K`.
pub fn killing_defect(g: &DMatrix<f64>, killing_diagonal: &[f64]) -> f64 {
    let k = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(killing_diagonal));
    max_abs(&(g.transpose() * &k * g - k))
}

pub fn determinant(g: &DMatrix<f64>) -> f64 {
    g.clone().lu().determinant()
}

/// Dense `Σ_B coeffs[B]·ad(e_B)`.
pub fn adjoint_of_real(rep: &AdjointRep, coeffs: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(DIM, DIM);
    for (b, &w) in coeffs.iter().enumerate() {
        if w != 0.0 {
            for (r, c, v) in rep.matrix(b).iter() {
                m[(r, c)] += w * v as f64 / 2.0;
            }
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedCartan {
    /// Numerical rank of the eight images `g·C_a`.
    pub rank: usize,
    /// Largest entry of `[ad(g·C_a), ad(g·C_b)]` over all pairs.
    pub commutator_defect: f64,
    pub singular_values: Vec<f64>,
}

/// Images `g·C_a` of the Cartan generators under a group element acting adjointly.
pub fn conjugated_cartan(g: &DMatrix<f64>, c: &CartanSet, rep: &AdjointRep) -> ConjugatedCartan {
    let images: Vec<Vec<f64>> = c
        .flat_indices()
        .iter()
        .map(|&f| g.column(f).iter().copied().collect())
        .collect();
    let m = DMatrix::from_fn(DIM, RANK, |r, a| images[a][r]);
    let mut singular_values: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let rank = singular_values
        .iter()
        .filter(|&&s| s > singular_values[0] * 1e-9)
        .count();
    let ads: Vec<DMatrix<f64>> = images.iter().map(|v| adjoint_of_real(rep, v)).collect();
    let mut commutator_defect = 0.0f64;
    for i in 0..RANK {
        for j in i + 1..RANK {
            commutator_defect = commutator_defect.max(max_abs(&(&ads[i] * &ads[j] - &ads[j] * &ads[i])));
        }
    }
    ConjugatedCartan {
        rank,
        commutator_defect,
        singular_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_antisymmetric(n: usize, seed: u64, scale: f64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.random_range(-scale..scale);
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        a
    }

    #[test]
    fn expm_zero_and_rotation() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm_antisymmetric(&z, 1e-12).unwrap(), DMatrix::identity(4, 4));
        for &th in &[0.3, 2.0, -5.5, 40.0] {
            let a = DMatrix::from_row_slice(2, 2, &[0.0, th, -th, 0.0]);
            let r = expm_antisymmetric(&a, 1e-10).unwrap();
            let want = DMatrix::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
            assert!(max_abs(&(r - want)) < 1e-12 * th.abs().max(1.0));
        }
    }

    #[test]
    fn expm_inverse_identity_and_series_reference() {
        for seed in 0..5 {
            let a = random_antisymmetric(8, seed, 2.0);
            let e = expm_antisymmetric(&a, 1e-10).unwrap();
            let einv = expm_antisymmetric(&(-&a), 1e-10).unwrap();
            assert!(max_abs(&(&e * einv - DMatrix::identity(8, 8))) < 1e-12);
            // Unscaled series summed to 80 terms as an independent reference.
            let mut reference = DMatrix::<f64>::identity(8, 8);
            let mut term = DMatrix::<f64>::identity(8, 8);
            for k in 1..80 {
                term = &term * &a / k as f64;
                reference += &term;
            }
            assert!(max_abs(&(e - reference)) < 1e-11);
        }
    }

    #[test]
    fn expm_rejects_non_antisymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(expm_antisymmetric(&a, 1e-10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn plane_generator_matches_expm() {
        let m = SparseHalfIntMatrix::from_triplets(5, 5, &[(0, 3, 2), (3, 0, -2), (1, 4, -1), (4, 1, 1)]).unwrap();
        let g = PlaneGenerator::from_sparse(&m).unwrap();
        let dense = to_dense_f64(&m);
        let x = 0.7;
        let want = expm_antisymmetric(&(&dense * x), 1e-12).unwrap();
        let mut right = DMatrix::<f64>::identity(5, 5);
        g.right_multiply(&mut right, x);
        let mut left = DMatrix::<f64>::identity(5, 5);
        g.left_multiply(&mut left, x);
        assert!(max_abs(&(&right - &want)) < 1e-14);
        assert!(max_abs(&(&left - &want)) < 1e-14);
        let overlapping =
            SparseHalfIntMatrix::from_triplets(3, 3, &[(0, 1, 2), (1, 0, -2), (0, 2, 2), (2, 0, -2)]).unwrap();
        assert!(PlaneGenerator::from_sparse(&overlapping).is_err());
    }
}
