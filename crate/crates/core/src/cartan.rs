//! Cartan subalgebras spanned by spinor generators.

use serde::{Deserialize, Serialize};

use crate::algebra::{abstract_bracket, spinor_flat, AdjointRep, AlgebraElement, StructureTensor, DIM, RANK};
use crate::clifford::{SpinorGenerators, SPINOR_DIM};
use crate::error::{Error, Result};
use crate::rank::rank_mod_prime;
use crate::sparse::SparseHalfIntMatrix;

/// The spinor indices listed for the reference gamma conventions (one-based).
pub const REFERENCE_CARTAN_INDICES: [usize; RANK] = [1, 8, 26, 31, 43, 46, 52, 53];

/// Eight mutually commuting spinor generators and their adjoint matrices.
#[derive(Clone, Debug)]
pub struct CartanSet {
    /// Zero-based spinor indices α, increasing.
    alphas: [usize; RANK],
    matrices: Vec<SparseHalfIntMatrix>,
}

impl CartanSet {
    pub fn alphas(&self) -> [usize; RANK] {
        self.alphas
    }

    pub fn one_based(&self) -> [usize; RANK] {
        self.alphas.map(|a| a + 1)
    }

    pub fn flat_indices(&self) -> [usize; RANK] {
        self.alphas.map(spinor_flat)
    }

    pub fn matrix(&self, a: usize) -> &SparseHalfIntMatrix {
        &self.matrices[a]
    }

    pub fn matrices(&self) -> &[SparseHalfIntMatrix] {
        &self.matrices
    }

    pub fn from_alphas(alphas: [usize; RANK], rep: &AdjointRep) -> Self {
        let matrices = alphas.iter().map(|&a| rep.matrix(spinor_flat(a)).clone()).collect();
        CartanSet { alphas, matrices }
    }
}

/// `commutes[a][b]`: `[Q_a, Q_b] = 0`, read off the tensor.
pub fn spinor_commutation_table(t: &StructureTensor) -> Vec<Vec<bool>> {
    let mut table = vec![vec![false; SPINOR_DIM]; SPINOR_DIM];
    for a in 0..SPINOR_DIM {
        for b in 0..SPINOR_DIM {
            table[a][b] = a == b || t.bracket_basis(spinor_flat(a), spinor_flat(b)).1.is_empty();
        }
    }
    table
}

/// The same table from the spinor generators directly: `Q_a` and `Q_b`
/// commute iff `(Δ_ij)_ab = 0` for every `i < j`.
pub fn spinor_commutation_table_from_delta(d: &SpinorGenerators) -> Vec<Vec<bool>> {
    let mut table = vec![vec![true; SPINOR_DIM]; SPINOR_DIM];
    for m in d.all() {
        for a in 0..SPINOR_DIM {
            for b in 0..SPINOR_DIM {
                if !m.get(a, b).is_zero() {
                    table[a][b] = false;
                }
            }
        }
    }
    table
}

fn greedy(table: &[Vec<bool>]) -> Vec<usize> {
    let mut chosen = vec![0];
    for a in 1..SPINOR_DIM {
        if chosen.len() == RANK {
            break;
        }
        if chosen.iter().all(|&b| table[b][a]) {
            chosen.push(a);
        }
    }
    chosen
}

/// Lexicographically smallest clique of size `RANK`.
fn backtrack(table: &[Vec<bool>], chosen: &mut Vec<usize>, next: usize) -> bool {
    if chosen.len() == RANK {
        return true;
    }
    for a in next..SPINOR_DIM {
        if chosen.iter().all(|&b| table[b][a]) {
            chosen.push(a);
            if backtrack(table, chosen, a + 1) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Greedy lowest-index search starting at α = 1, falling back to
/// backtracking when the greedy pass stalls below eight.
pub fn find_cartan(rep: &AdjointRep, t: &StructureTensor) -> Result<CartanSet> {
    let table = spinor_commutation_table(t);
    let mut chosen = greedy(&table);
    if chosen.len() < RANK {
        chosen.clear();
        if !backtrack(&table, &mut chosen, 0) {
            return Err(Error::Invariant(
                "no eight mutually commuting spinor generators exist".into(),
            ));
        }
    }
    let alphas: [usize; RANK] = chosen.try_into().expect("exactly RANK indices");
    let set = CartanSet::from_alphas(alphas, rep);
    for (i, &a) in alphas.iter().enumerate() {
        for &b in &alphas[i + 1..] {
            let br = abstract_bracket(
                &AlgebraElement::basis(spinor_flat(a)),
                &AlgebraElement::basis(spinor_flat(b)),
                t,
            )?;
            if !br.is_zero() {
                return Err(Error::Invariant(format!("[Q_{}, Q_{}] ≠ 0", a + 1, b + 1)));
            }
        }
    }
    Ok(set)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanReport {
    pub indices: [usize; RANK],
    pub reference_indices: [usize; RANK],
    pub matches_reference: bool,
    pub pairwise_commuting: bool,
    /// Spinor indices outside the set commuting with all eight (empty when maximal).
    pub extra_commuting_spinors: Vec<usize>,
    /// Rank of `X ↦ ([C_1, X], …, [C_8, X])`.
    pub bracket_map_rank: usize,
    /// `DIM − bracket_map_rank`; exact because the eight `C_a` are known kernel vectors.
    pub centralizer_dim: usize,
    pub independent: bool,
}

/// Maximality of a Cartan set: spinor scan plus exact centralizer dimension.
pub fn cartan_report(c: &CartanSet, t: &StructureTensor) -> Result<CartanReport> {
    let table = spinor_commutation_table(t);
    let alphas = c.alphas();
    let pairwise_commuting = alphas.iter().all(|&a| alphas.iter().all(|&b| table[a][b]));
    let extra_commuting_spinors = (0..SPINOR_DIM)
        .filter(|x| !alphas.contains(x) && alphas.iter().all(|&a| table[a][*x]))
        .map(|x| x + 1)
        .collect();

    // Row B holds column B of every ad(C_a): the image of e_B under the bracket map.
    let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); DIM];
    for (a, m) in c.matrices().iter().enumerate() {
        for (r, col, v) in m.iter() {
            rows[col].push((a * DIM + r, v));
        }
    }
    let bracket_map_rank = rank_mod_prime(&rows);
    for m in c.matrices() {
        for n in c.matrices() {
            if !m.commutator(n)?.is_zero() {
                return Err(Error::Invariant("Cartan matrices do not commute".into()));
            }
        }
    }
    let flat_rows: Vec<Vec<(usize, i64)>> = c
        .matrices()
        .iter()
        .map(|m| m.iter().map(|(r, col, v)| (r * DIM + col, v)).collect())
        .collect();
    let independent = rank_mod_prime(&flat_rows) == RANK;

    Ok(CartanReport {
        indices: c.one_based(),
        reference_indices: REFERENCE_CARTAN_INDICES,
        matches_reference: c.one_based() == REFERENCE_CARTAN_INDICES,
        pairwise_commuting,
        extra_commuting_spinors,
        bracket_map_rank,
        centralizer_dim: DIM - bracket_map_rank,
        independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_from_edges(edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut t = vec![vec![false; SPINOR_DIM]; SPINOR_DIM];
        for a in 0..SPINOR_DIM {
            t[a][a] = true;
        }
        for &(a, b) in edges {
            t[a][b] = true;
            t[b][a] = true;
        }
        t
    }

    #[test]
    fn backtracking_recovers_when_greedy_stalls() {
        // 0 commutes with 1 only; {2..=9} is a clique of eight.
        let mut edges = vec![(0, 1)];
        for a in 2..10 {
            for b in a + 1..10 {
                edges.push((a, b));
            }
        }
        let t = table_from_edges(&edges);
        assert_eq!(greedy(&t), vec![0, 1]);
        let mut chosen = Vec::new();
        assert!(backtrack(&t, &mut chosen, 0));
        assert_eq!(chosen, (2..10).collect::<Vec<_>>());
    }

    #[test]
    fn backtracking_reports_absence() {
        let t = table_from_edges(&[(0, 1), (1, 2)]);
        let mut chosen = Vec::new();
        assert!(!backtrack(&t, &mut chosen, 0));
    }
}
