//! Fundamental domain for the torus parameters `y`.
//!
//! The region is the alcove `{ y : α^i·y ≥ 0, α^L·y < π }` cut out by the simple
//! roots and the highest root. Since `α^L = Σ n_i α^i` with positive marks it
//! is a simplex with vertices `0` and `π·v_i`, where `α^j·v_i = δ_ij / n_i`.

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::RANK;
use crate::error::{Error, Result};
use crate::roots::{integer_coefficients, reference_simple_roots, Root, RootSystem, REFERENCE_HIGHEST_ROOT};

use std::f64::consts::PI;

/// Consecutive rejections allowed before sampling gives up.
pub const REJECTION_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusRegion {
    pub simple_rows: [Root; RANK],
    pub longest_row: Root,
    /// Marks of `longest_row` over `simple_rows`.
    pub marks: [i64; RANK],
}

fn dot(r: &Root, y: &[f64; RANK]) -> f64 {
    r.coords().iter().zip(y).map(|(a, b)| a * b).sum()
}

impl TorusRegion {
    pub fn new(simple_rows: [Root; RANK], longest_row: Root) -> Result<Self> {
        let marks = integer_coefficients(&simple_rows, &longest_row)
            .filter(|m| m.iter().all(|&n| n > 0))
            .ok_or_else(|| {
                Error::InvalidInput("longest root is not a positive combination of the simple rows".into())
            })?;
        Ok(TorusRegion {
            simple_rows,
            longest_row,
            marks,
        })
    }

    /// The reference alcove: eight simple rows and the highest root.
    pub fn reference() -> Self {
        Self::new(reference_simple_roots(), REFERENCE_HIGHEST_ROOT).expect("reference rows are an E8 base")
    }

    /// Rows from a computed root system, in its Bourbaki labeling.
    pub fn from_root_system(rs: &RootSystem) -> Result<Self> {
        Self::new(rs.simples, rs.highest)
    }

    /// The nine linear forms at `y`: eight simple rows, then the longest row.
    pub fn forms(&self, y: &[f64; RANK]) -> [f64; RANK + 1] {
        std::array::from_fn(|i| {
            if i < RANK {
                dot(&self.simple_rows[i], y)
            } else {
                dot(&self.longest_row, y)
            }
        })
    }

    /// All nine constraints `0 ≤ form < π`.
    pub fn contains(&self, y: &[f64; RANK]) -> bool {
        self.forms(y).iter().all(|&f| (0.0..PI).contains(&f))
    }

    /// Vertices of the simplex: the origin, then `π·v_i`.
    pub fn vertices(&self) -> Result<[[f64; RANK]; RANK + 1]> {
        let s = SMatrix::<f64, RANK, RANK>::from_fn(|i, a| self.simple_rows[i].coords()[a]);
        let inv = s
            .try_inverse()
            .ok_or_else(|| Error::Numerical("simple rows are singular".into()))?;
        let mut out = [[0.0; RANK]; RANK + 1];
        for i in 0..RANK {
            let mut rhs = SVector::<f64, RANK>::zeros();
            rhs[i] = PI / self.marks[i] as f64;
            let v = inv * rhs;
            out[i + 1] = std::array::from_fn(|a| v[a]);
        }
        Ok(out)
    }

    /// Per-coordinate `[min, max]` over the vertices.
    pub fn bounding_box(&self) -> Result<[(f64, f64); RANK]> {
        let v = self.vertices()?;
        Ok(std::array::from_fn(|a| {
            v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[a]), hi.max(p[a]))
            })
        }))
    }

    /// The bounding box widened by `frac` of its width on both sides.
    pub fn padded_box(&self, frac: f64) -> Result<[(f64, f64); RANK]> {
        Ok(self.bounding_box()?.map(|(lo, hi)| {
            let w = hi - lo;
            (lo - frac * w, hi + frac * w)
        }))
    }

    /// Mean of the vertices, which is the mean of the uniform law.
    pub fn centroid(&self) -> Result<[f64; RANK]> {
        let v = self.vertices()?;
        Ok(std::array::from_fn(|a| {
            v.iter().map(|p| p[a]).sum::<f64>() / (RANK + 1) as f64
        }))
    }
}

/// `y` from the root rows of `reg`.
pub fn in_region_roots(y: &[f64; RANK], reg: &TorusRegion) -> bool {
    reg.contains(y)
}

/// The solved chain of bounds, half-open, transcribed term by term.
pub fn in_region_solved(y: &[f64; RANK]) -> bool {
    let [y1, y2, y3, y4, y5, y6, y7, y8] = *y;
    (0.0 <= y1 && y1 < PI / 6.0)
        && (y1 <= y2 && y2 < (PI + y1) / 7.0)
        && (y2 <= y3 && y3 < (PI + y1 - y2) / 6.0)
        && (y3 <= y4 && y4 < (PI + y1 - y2 - y3) / 5.0)
        && (y4 <= y5 && y5 < (PI + y1 - y2 - y3 - y4) / 4.0)
        && (y5 <= y6 && y6 < (PI + y1 - y2 - y3 - y4 - y5) / 3.0)
        && (y6 <= y7 && y7 < (PI + y1 - y2 - y3 - y4 - y5 - y6) / 2.0)
        && (-y1 + y2 + y3 + y4 + y5 + y6 + y7 <= y8 && y8 < PI - y7)
}

/// Uniform sampler on a region: Dirichlet(1, …, 1) barycentric weights over
/// the simplex vertices, with each draw re-checked against the root inequalities.
#[derive(Clone, Debug)]
pub struct RegionSampler {
    region: TorusRegion,
    vertices: [[f64; RANK]; RANK + 1],
    rng: ChaCha8Rng,
}

impl RegionSampler {
    pub fn new(region: TorusRegion, seed: u64) -> Result<Self> {
        let vertices = region.vertices()?;
        Ok(RegionSampler {
            region,
            vertices,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn region(&self) -> &TorusRegion {
        &self.region
    }

    fn draw(&mut self) -> [f64; RANK] {
        let w: [f64; RANK + 1] = std::array::from_fn(|_| -(1.0 - self.rng.random::<f64>()).ln());
        let total: f64 = w.iter().sum();
        std::array::from_fn(|a| self.vertices.iter().zip(&w).map(|(v, wk)| v[a] * wk).sum::<f64>() / total)
    }

    /// Next sample; rejects draws that rounding pushed across a face.
    pub fn sample(&mut self) -> Result<[f64; RANK]> {
        for _ in 0..REJECTION_BUDGET {
            let y = self.draw();
            if self.region.contains(&y) {
                return Ok(y);
            }
        }
        Err(Error::RejectionBudget(REJECTION_BUDGET))
    }
}

/// Seeded uniform points in an axis-aligned box.
pub fn box_points(bounds: &[(f64, f64); RANK], n: usize, seed: u64) -> Vec<[f64; RANK]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| std::array::from_fn(|a| rng.random_range(bounds[a].0..bounds[a].1)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxAcceptance {
    pub bounds: Vec<(f64, f64)>,
    pub draws: usize,
    pub accepted: usize,
    pub fraction: f64,
}

/// Fraction of uniform draws from the padded bounding box that land in the region.
pub fn box_acceptance(reg: &TorusRegion, padding: f64, n: usize, seed: u64) -> Result<BoxAcceptance> {
    let bounds = reg.padded_box(padding)?;
    let accepted = box_points(&bounds, n, seed).iter().filter(|y| reg.contains(y)).count();
    Ok(BoxAcceptance {
        bounds: bounds.to_vec(),
        draws: n,
        accepted,
        fraction: accepted as f64 / n as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub y: [f64; RANK],
    pub roots: bool,
    pub solved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub bounds: Vec<(f64, f64)>,
    pub draws: usize,
    pub agreements: usize,
    pub agreement_fraction: f64,
    pub both_true: usize,
    pub only_roots: usize,
    pub only_solved: usize,
    /// Up to 100 disagreeing points from the box draws.
    pub witnesses: Vec<Witness>,
    /// Uniform region samples (same seed), and how many satisfy the chain.
    pub region_samples: usize,
    pub region_samples_in_chain: usize,
    pub chain_fraction_of_region: f64,
}

pub const MAX_WITNESSES: usize = 100;

/// Compares the root inequalities with the chained form on `n` box draws
/// and on `n` uniform samples of the region.
pub fn region_equivalence_report(n: usize, seed: u64) -> Result<EquivalenceReport> {
    let reg = TorusRegion::reference();
    let bounds = reg.padded_box(0.1)?;
    let mut report = EquivalenceReport {
        seed,
        bounds: bounds.to_vec(),
        draws: n,
        agreements: 0,
        agreement_fraction: 0.0,
        both_true: 0,
        only_roots: 0,
        only_solved: 0,
        witnesses: Vec::new(),
        region_samples: n,
        region_samples_in_chain: 0,
        chain_fraction_of_region: 0.0,
    };
    for y in box_points(&bounds, n, seed) {
        let roots = reg.contains(&y);
        let solved = in_region_solved(&y);
        match (roots, solved) {
            (true, true) => report.both_true += 1,
            (true, false) => report.only_roots += 1,
            (false, true) => report.only_solved += 1,
            (false, false) => {}
        }
        if roots == solved {
            report.agreements += 1;
        } else if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness { y, roots, solved });
        }
    }
    let mut sampler = RegionSampler::new(reg, seed)?;
    for _ in 0..n {
        if in_region_solved(&sampler.sample()?) {
            report.region_samples_in_chain += 1;
        }
    }
    if n > 0 {
        report.agreement_fraction = report.agreements as f64 / n as f64;
        report.chain_fraction_of_region = report.region_samples_in_chain as f64 / n as f64;
    }
    Ok(report)
}

/// Default half-width of the `x, z` draws for generic chart points.
pub const LOCAL_AMPLITUDE: f64 = 0.3;

/// A point of the chart: `x, z` parametrize the two Spin(16) factors, `y` the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerPoint {
    pub x: Vec<f64>,
    pub y: [f64; RANK],
    pub z: Vec<f64>,
}

impl EulerPoint {
    pub fn zero() -> Self {
        EulerPoint {
            x: vec![0.0; crate::clifford::PAIR_COUNT],
            y: [0.0; RANK],
            z: vec![0.0; crate::clifford::PAIR_COUNT],
        }
    }

    /// `x, z` uniform in `[−amplitude, amplitude)`; `y` given.
    ///
    /// The ordered-product chart of Spin(16) degrades quickly away from the
    /// identity (condition numbers near 1e-9 at amplitude π), so generic
    /// points use [`LOCAL_AMPLITUDE`].
    pub fn random_with_y<R: Rng>(rng: &mut R, y: [f64; RANK], amplitude: f64) -> Self {
        let mut angles = || {
            (0..crate::clifford::PAIR_COUNT)
                .map(|_| rng.random_range(-amplitude..amplitude))
                .collect()
        };
        let x = angles();
        let z = angles();
        EulerPoint { x, y, z }
    }

    /// Seeded generic point: `y` from the reference region, `x, z` local.
    pub fn generic(seed: u64) -> Result<Self> {
        let y = RegionSampler::new(TorusRegion::reference(), seed)?.sample()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::random_with_y(&mut rng, y, LOCAL_AMPLITUDE))
    }

    /// Flattened `(x, y, z)`, 248 coordinates.
    pub fn to_vec(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).chain(&self.z).copied().collect()
    }

    pub fn from_slice(p: &[f64]) -> Result<Self> {
        let n = crate::clifford::PAIR_COUNT;
        if p.len() != 2 * n + RANK {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                2 * n + RANK,
                p.len()
            )));
        }
        Ok(EulerPoint {
            x: p[..n].to_vec(),
            y: std::array::from_fn(|a| p[n + a]),
            z: p[n + RANK..].to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INSIDE: [f64; 8] = [0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.11, 0.5];

    #[test]
    fn membership_examples() {
        let reg = TorusRegion::reference();
        assert!(in_region_roots(&[0.0; 8], &reg));
        assert!(in_region_roots(&INSIDE, &reg));
        assert!(!in_region_roots(&[0.2, 0.1, 0.3, 0.4, 0.5, 0.6, 0.7, 2.0], &reg));
        assert!(in_region_solved(&[0.0; 8]));
        assert!(in_region_solved(&INSIDE));
        let mut edge = [0.0; 8];
        edge[0] = PI / 6.0;
        assert!(!in_region_solved(&edge));
        assert!(!in_region_roots(&[10.0; 8], &reg));
        assert!(!in_region_solved(&[10.0; 8]));
    }

    #[test]
    fn reference_marks() {
        assert_eq!(TorusRegion::reference().marks, [2, 3, 4, 6, 5, 4, 3, 2]);
    }

    #[test]
    fn vertices_lie_on_faces() {
        let reg = TorusRegion::reference();
        for (k, v) in reg.vertices().unwrap().iter().enumerate().skip(1) {
            let f = reg.forms(v);
            for (i, fi) in f.iter().take(RANK).enumerate() {
                if i + 1 != k {
                    assert!(fi.abs() < 1e-12);
                }
            }
            assert!((f[RANK] - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_in_region() {
        let reg = TorusRegion::reference();
        let mut a = RegionSampler::new(reg.clone(), 7).unwrap();
        let mut b = RegionSampler::new(reg.clone(), 7).unwrap();
        for _ in 0..1000 {
            let y = a.sample().unwrap();
            assert_eq!(y, b.sample().unwrap());
            assert!(in_region_roots(&y, &reg));
        }
    }

    #[test]
    fn euler_point_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = EulerPoint::random_with_y(&mut rng, INSIDE, PI);
        assert_eq!(EulerPoint::from_slice(&p.to_vec()).unwrap(), p);
        assert!(EulerPoint::from_slice(&[0.0; 3]).is_err());
    }
}
