//! Exhaustive and seeded verification of the algebra, with machine-readable reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    abstract_bracket, spinor_flat, AdjointRep, AlgebraElement, BasisIndex, BracketTerms, StructureTensor, DIM,
};
use crate::clifford::{clifford_pairs, so16_bracket, GammaSystem, SpinorGenerators, PAIR_COUNT, SPINOR_DIM};
use crate::error::{Error, Result};
use crate::halfint::{HalfInt, HalfIntMatrix};
use crate::rank::rank_mod_prime;
use crate::sparse::SparseHalfIntMatrix;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Outcome of one family of checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub checks: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Builds a report from per-item outcomes listed in check order; the
    /// counterexample is the first failing item in that order.
    fn from_outcomes(name: impl Into<String>, outcomes: Vec<Option<String>>) -> Self {
        let checks = outcomes.len() as u64;
        let mut failures = 0;
        let mut first = None;
        for o in outcomes.into_iter().flatten() {
            failures += 1;
            first.get_or_insert(o);
        }
        CheckReport {
            name: name.into(),
            checks,
            failures,
            first_counterexample: first,
        }
    }
}

/// A named suite made of several check families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
    pub parts: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, parts: Vec<CheckReport>) -> Self {
        let checks = parts.iter().map(|p| p.checks).sum();
        let failures = parts.iter().map(|p| p.failures).sum();
        let first_counterexample = parts
            .iter()
            .find_map(|p| p.first_counterexample.as_ref().map(|c| format!("{}: {c}", p.name)));
        SuiteReport {
            suite: suite.into(),
            passed: failures == 0,
            checks,
            failures,
            first_counterexample,
            parts,
        }
    }

    pub fn part(&self, name: &str) -> Option<&CheckReport> {
        self.parts.iter().find(|p| p.name == name)
    }
}

/// All 136 unordered pairs of the gamma contract.
pub fn verify_clifford(g: &GammaSystem) -> CheckReport {
    let outcomes = clifford_pairs()
        .into_par_iter()
        .map(|(i, j)| match g.anticommutators_ok(i, j) {
            Ok(true) => None,
            Ok(false) => Some(format!("pair (Σ_{}, Σ_{})", i + 1, j + 1)),
            Err(e) => Some(format!("pair (Σ_{}, Σ_{}): {e}", i + 1, j + 1)),
        })
        .collect();
    CheckReport::from_outcomes("anticommutation", outcomes)
}

/// Signed-permutation shape of every block.
pub fn verify_signed_permutations(g: &GammaSystem) -> CheckReport {
    let outcomes = g
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, s)| (!s.is_signed_permutation()).then(|| format!("Σ_{}", i + 1)))
        .collect();
    CheckReport::from_outcomes("signed_permutation", outcomes)
}

/// `[X_ij, X_kl]` against the so(16) right-hand side for all 14 400 ordered
/// pairs of the given 120 matrices.
pub fn verify_so16_relations(name: &str, gens: &[SparseHalfIntMatrix]) -> CheckReport {
    assert_eq!(gens.len(), PAIR_COUNT);
    let outcomes = (0..PAIR_COUNT * PAIR_COUNT)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (k / PAIR_COUNT, k % PAIR_COUNT);
            let ok = gens[a].commutator(&gens[b]).and_then(|lhs| {
                let terms: Vec<_> = so16_bracket(a, b).into_iter().map(|(s, c)| (s, &gens[c])).collect();
                let rhs = SparseHalfIntMatrix::zeros(lhs.rows(), lhs.cols()).linear_combination(&terms)?;
                Ok(lhs == rhs)
            });
            match ok {
                Ok(true) => None,
                Ok(false) => Some(format!(
                    "pair ({}, {})",
                    BasisIndex::from_flat(a),
                    BasisIndex::from_flat(b)
                )),
                Err(e) => Some(format!(
                    "pair ({}, {}): {e}",
                    BasisIndex::from_flat(a),
                    BasisIndex::from_flat(b)
                )),
            }
        })
        .collect();
    CheckReport::from_outcomes(name, outcomes)
}

pub fn sparse_generators(d: &SpinorGenerators) -> Vec<SparseHalfIntMatrix> {
    d.all().iter().map(SparseHalfIntMatrix::from_dense).collect()
}

/// Checks `[ρ(e_A), ρ(e_B)] = Σ_C c_C ρ(e_C)` exactly, comparing at four
/// times the true value so half-integer coefficients need no division.
pub fn rep_relation_holds(rep: &AdjointRep, a: usize, b: usize, sign: i64, terms: &BracketTerms) -> Result<bool> {
    let mut tr = rep.matrix(a).commutator_quadrupled_entries(rep.matrix(b))?;
    for &(c, coeff) in terms {
        let f = -sign * coeff.doubled();
        for (r, col, v) in rep.matrix(c).iter() {
            tr.push((r, col, f.checked_mul(v).ok_or(Error::Overflow("rep relation"))?));
        }
    }
    Ok(SparseHalfIntMatrix::from_triplets(DIM, DIM, &tr)?.is_zero())
}

fn rep_pairs_report(name: &str, rep: &AdjointRep, t: &StructureTensor, pairs: Vec<(usize, usize)>) -> CheckReport {
    let outcomes = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let (sign, terms) = t.bracket_basis(a, b);
            match rep_relation_holds(rep, a, b, sign, terms) {
                Ok(true) => None,
                Ok(false) => Some(format!(
                    "pair ({}, {})",
                    BasisIndex::from_flat(a),
                    BasisIndex::from_flat(b)
                )),
                Err(e) => Some(format!(
                    "pair ({}, {}): {e}",
                    BasisIndex::from_flat(a),
                    BasisIndex::from_flat(b)
                )),
            }
        })
        .collect();
    CheckReport::from_outcomes(name, outcomes)
}

/// The three families of defining relations for a representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationsReport {
    /// 14 400 ordered vector pairs.
    pub vector_vector: CheckReport,
    /// 120 × 128 vector–spinor pairs.
    pub vector_spinor: CheckReport,
    /// 8 128 unordered spinor pairs.
    pub spinor_spinor: CheckReport,
}

impl RelationsReport {
    pub fn passed(&self) -> bool {
        self.vector_vector.passed() && self.vector_spinor.passed() && self.spinor_spinor.passed()
    }
}

pub fn verify_defining_relations(rep: &AdjointRep, t: &StructureTensor) -> RelationsReport {
    let vv = (0..PAIR_COUNT)
        .flat_map(|a| (0..PAIR_COUNT).map(move |b| (a, b)))
        .collect();
    let vs = (0..PAIR_COUNT)
        .flat_map(|a| (0..SPINOR_DIM).map(move |al| (a, spinor_flat(al))))
        .collect();
    let ss = (0..SPINOR_DIM)
        .flat_map(|al| (al + 1..SPINOR_DIM).map(move |be| (spinor_flat(al), spinor_flat(be))))
        .collect();
    RelationsReport {
        vector_vector: rep_pairs_report("adjoint_vector_vector", rep, t, vv),
        vector_spinor: rep_pairs_report("adjoint_vector_spinor", rep, t, vs),
        spinor_spinor: rep_pairs_report("adjoint_spinor_spinor", rep, t, ss),
    }
}

/// Basis triples grouped by how many spinor generators they contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobiStratum {
    Jjj,
    Jjq,
    Jqq,
    Qqq,
}

impl JacobiStratum {
    pub const ALL: [JacobiStratum; 4] = [
        JacobiStratum::Jjj,
        JacobiStratum::Jjq,
        JacobiStratum::Jqq,
        JacobiStratum::Qqq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JacobiStratum::Jjj => "JJJ",
            JacobiStratum::Jjq => "JJQ",
            JacobiStratum::Jqq => "JQQ",
            JacobiStratum::Qqq => "QQQ",
        }
    }

    fn spinor_count(self) -> usize {
        self as usize
    }

    /// Number of sorted triples of distinct generators in this stratum.
    pub fn size(self) -> u64 {
        let choose = |n: u64, k: u64| -> u64 { (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)) };
        let (v, s) = (PAIR_COUNT as u64, SPINOR_DIM as u64);
        let q = self.spinor_count() as u64;
        choose(v, 3 - q) * choose(s, q)
    }

    /// The `k`-th sorted triple of this stratum (vector indices first).
    fn triple(self, k: u64) -> [usize; 3] {
        let q = self.spinor_count();
        let n_vec = (PAIR_COUNT as u64, 3 - q);
        let spinor_part_count = JacobiStratum::choose_u64(SPINOR_DIM as u64, q as u64);
        let (vk, sk) = (k / spinor_part_count, k % spinor_part_count);
        let mut out = [0usize; 3];
        let vecs = unrank_combination(n_vec.0 as usize, n_vec.1, vk);
        let spins = unrank_combination(SPINOR_DIM, q, sk);
        for (slot, v) in out
            .iter_mut()
            .zip(vecs.iter().copied().chain(spins.iter().map(|&s| spinor_flat(s))))
        {
            *slot = v;
        }
        out
    }

    fn choose_u64(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn random_triple(self, rng: &mut impl Rng) -> [usize; 3] {
        self.triple(rng.random_range(0..self.size()))
    }
}

/// Lexicographic unranking of `k`-subsets of `0..n`.
fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let choose = JacobiStratum::choose_u64;
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for slot in 0..k {
        let remaining = (k - slot - 1) as u64;
        let mut x = start;
        loop {
            let block = choose((n - x - 1) as u64, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            x += 1;
        }
        out.push(x);
        start = x + 1;
    }
    out
}

/// Coverage of the spinor–spinor–spinor stratum; the other strata are always exhaustive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiMode {
    Full,
    Sampled { samples: u64, seed: u64 },
}

/// Jacobiator `[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y]` of three basis generators,
/// returned as `(generator, 4 × coefficient)` for the nonzero entries.
pub fn jacobiator(t: &StructureTensor, x: usize, y: usize, z: usize) -> Vec<(usize, i64)> {
    let mut acc: Vec<(usize, i64)> = Vec::new();
    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
        let (s1, inner) = t.bracket_basis(a, b);
        for &(m, c1) in inner {
            let (s2, outer) = t.bracket_basis(m, c);
            for &(n, c2) in outer {
                let v = s1 * s2 * c1.doubled() * c2.doubled();
                match acc.iter_mut().find(|e| e.0 == n) {
                    Some(e) => e.1 += v,
                    None => acc.push((n, v)),
                }
            }
        }
    }
    acc.retain(|e| e.1 != 0);
    acc.sort_unstable();
    acc
}

fn jacobi_outcome(t: &StructureTensor, [x, y, z]: [usize; 3]) -> Option<String> {
    let j = jacobiator(t, x, y, z);
    (!j.is_empty()).then(|| {
        format!(
            "triple ({}, {}, {}) leaves {} on {}",
            BasisIndex::from_flat(x),
            BasisIndex::from_flat(y),
            BasisIndex::from_flat(z),
            HalfInt::from_doubled(j[0].1 / 2),
            BasisIndex::from_flat(j[0].0)
        )
    })
}

pub fn verify_jacobi_stratum(t: &StructureTensor, stratum: JacobiStratum, coverage: JacobiMode) -> CheckReport {
    let triples: Vec<[usize; 3]> = match coverage {
        JacobiMode::Full => (0..stratum.size()).map(|k| stratum.triple(k)).collect(),
        JacobiMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (stratum as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            (0..samples).map(|_| stratum.random_triple(&mut rng)).collect()
        }
    };
    let outcomes = triples.into_par_iter().map(|tr| jacobi_outcome(t, tr)).collect();
    CheckReport::from_outcomes(stratum.name(), outcomes)
}

/// JJJ, JJQ and JQQ exhaustively; QQQ according to `mode`.
pub fn verify_jacobi(t: &StructureTensor, mode: JacobiMode) -> Vec<CheckReport> {
    JacobiStratum::ALL
        .iter()
        .map(|&s| {
            let coverage = if s == JacobiStratum::Qqq {
                mode
            } else {
                JacobiMode::Full
            };
            verify_jacobi_stratum(t, s, coverage)
        })
        .collect()
}

/// `[ad X, ad Y] = ad [X, Y]` for integer elements, compared at four times the true value.
pub fn adjoint_homomorphism_holds(
    rep: &AdjointRep,
    t: &StructureTensor,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<bool> {
    let mut tr = rep
        .of_integer_element(x)?
        .commutator_quadrupled_entries(&rep.of_integer_element(y)?)?;
    let bracket = abstract_bracket(x, y, t)?;
    for (c, coeff) in bracket.support() {
        for (r, col, v) in rep.matrix(c).iter() {
            tr.push((r, col, -coeff.doubled() * v));
        }
    }
    Ok(SparseHalfIntMatrix::from_triplets(DIM, DIM, &tr)?.is_zero())
}

/// `K_AB = trace(ad_A · ad_B)`, exact.
pub fn killing_form(rep: &AdjointRep) -> Result<HalfIntMatrix> {
    let rows = (0..DIM)
        .into_par_iter()
        .map(|a| {
            (0..DIM)
                .map(|b| rep.matrix(a).trace_pairing(rep.matrix(b)).map(|v| v.doubled()))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    HalfIntMatrix::from_doubled(DIM, DIM, rows.concat())
}

/// Block constants of a diagonal Killing form: `(vector block, spinor block)`
/// when `K` is `c·I ⊕ c'·I`, otherwise `None`.
pub fn killing_block_constants(k: &HalfIntMatrix) -> Option<(HalfInt, HalfInt)> {
    let cv = k.get(0, 0);
    let cs = k.get(PAIR_COUNT, PAIR_COUNT);
    for a in 0..DIM {
        for b in 0..DIM {
            let expected = match (a == b, a < PAIR_COUNT) {
                (false, _) => HalfInt::ZERO,
                (true, true) => cv,
                (true, false) => cs,
            };
            if k.get(a, b) != expected {
                return None;
            }
        }
    }
    Some((cv, cs))
}

/// Rank of the 248 ad matrices flattened to vectors of length 248²; a value
/// of 248 certifies linear independence over ℚ.
pub fn adjoint_rank(rep: &AdjointRep) -> usize {
    let rows: Vec<Vec<(usize, i64)>> = rep
        .matrices()
        .iter()
        .map(|m| m.iter().map(|(r, c, v)| (r * DIM + c, v)).collect())
        .collect();
    rank_mod_prime(&rows)
}

/// Rank of the 120 spinor generators flattened to length 128².
pub fn spinor_generator_rank(d: &SpinorGenerators) -> usize {
    let rows: Vec<Vec<(usize, i64)>> = d
        .all()
        .iter()
        .map(|m| {
            m.doubled_entries()
                .iter()
                .copied()
                .enumerate()
                .filter(|e| e.1 != 0)
                .collect()
        })
        .collect();
    rank_mod_prime(&rows)
}

/// Options for [`run_suites`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub jacobi: JacobiMode,
}

/// Suites selectable on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Clifford,
    So16,
    Mixed,
    Spinor,
    Jacobi,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Clifford, Suite::So16, Suite::Mixed, Suite::Spinor, Suite::Jacobi];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Clifford => "clifford",
            Suite::So16 => "so16",
            Suite::Mixed => "mixed",
            Suite::Spinor => "spinor",
            Suite::Jacobi => "jacobi",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub format_version: u32,
    pub qqq_coverage: String,
    pub all_passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs the requested suites against a built algebra. Reports are ordered as
/// requested and independent of the thread count.
pub fn run_suites(e8: &crate::E8, suites: &[Suite], opts: VerifyOptions) -> VerificationReport {
    let mut relations: Option<RelationsReport> = None;
    let mut relations_for = |e8: &crate::E8| -> RelationsReport {
        relations
            .get_or_insert_with(|| verify_defining_relations(&e8.adjoint, &e8.tensor))
            .clone()
    };
    let mut out = Vec::new();
    for &s in suites {
        let report = match s {
            Suite::Clifford => SuiteReport::new(
                s.name(),
                vec![verify_signed_permutations(&e8.gammas), verify_clifford(&e8.gammas)],
            ),
            Suite::So16 => {
                let delta = sparse_generators(&e8.spinors);
                let conj = crate::clifford::conjugate_spinor_generators(&e8.gammas).map(|c| sparse_generators(&c));
                let conj_report = match conj {
                    Ok(c) => verify_so16_relations("conjugate_spinor_generators", &c),
                    Err(e) => CheckReport {
                        name: "conjugate_spinor_generators".into(),
                        checks: 1,
                        failures: 1,
                        first_counterexample: Some(e.to_string()),
                    },
                };
                SuiteReport::new(
                    s.name(),
                    vec![
                        verify_so16_relations("spinor_generators", &delta),
                        conj_report,
                        relations_for(e8).vector_vector,
                    ],
                )
            }
            Suite::Mixed => SuiteReport::new(s.name(), vec![relations_for(e8).vector_spinor]),
            Suite::Spinor => SuiteReport::new(s.name(), vec![relations_for(e8).spinor_spinor]),
            Suite::Jacobi => SuiteReport::new(s.name(), verify_jacobi(&e8.tensor, opts.jacobi)),
        };
        out.push(report);
    }
    VerificationReport {
        format_version: REPORT_FORMAT_VERSION,
        qqq_coverage: match opts.jacobi {
            JacobiMode::Full => "exhaustive".into(),
            JacobiMode::Sampled { samples, seed } => format!("sampled:{samples}:seed={seed}"),
        },
        all_passed: out.iter().all(|r| r.passed),
        suites: out,
    }
}
