//! Rank of integer systems by elimination modulo a prime.
//!
//! Reduction modulo `p` cannot increase rank, so the value returned here is a
//! lower bound for the rank over ℚ. Callers turn it into an exact result by
//! pairing it with a matching upper bound (row count, or an explicit set of
//! kernel vectors).

/// 2^61 − 1.
pub const PRIME: u64 = (1 << 61) - 1;

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

#[inline]
fn to_residue(v: i64) -> u64 {
    v.rem_euclid(PRIME as i64) as u64
}

/// Rank modulo [`PRIME`] of the matrix whose rows are given sparsely as
/// `(column, value)` lists. Columns never touched are dropped up front.
pub fn rank_mod_prime(rows: &[Vec<(usize, i64)>]) -> usize {
    let mut cols: Vec<usize> = rows.iter().flatten().map(|e| e.0).collect();
    cols.sort_unstable();
    cols.dedup();
    let width = cols.len();
    let index = |c: usize| cols.binary_search(&c).expect("column collected above");

    // Echelon basis: each stored row has its pivot normalized to 1.
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for row in rows {
        let mut dense = vec![0u64; width];
        for &(c, v) in row {
            let i = index(c);
            dense[i] = (dense[i] + to_residue(v)) % PRIME;
        }
        for (pc, brow) in &basis {
            let f = dense[*pc];
            if f == 0 {
                continue;
            }
            for (d, &b) in dense.iter_mut().zip(brow).skip(*pc) {
                if b != 0 {
                    *d = (*d + PRIME - mul_mod(f, b)) % PRIME;
                }
            }
        }
        if let Some(pc) = dense.iter().position(|&v| v != 0) {
            let inv = pow_mod(dense[pc], PRIME - 2);
            for d in dense.iter_mut().skip(pc) {
                *d = mul_mod(*d, inv);
            }
            basis.push((pc, dense));
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_rows(m: &[&[i64]]) -> Vec<Vec<(usize, i64)>> {
        m.iter()
            .map(|r| r.iter().copied().enumerate().filter(|e| e.1 != 0).collect())
            .collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_mod_prime(&dense_rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_mod_prime(&dense_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), 2);
        assert_eq!(rank_mod_prime(&dense_rows(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_mod_prime(&dense_rows(&[&[-1, 0, 3], &[0, 2, 0], &[5, 0, 1]])), 3);
    }

    #[test]
    fn pivot_order_does_not_matter() {
        // Later rows carrying earlier pivots must still be reduced.
        let rows = dense_rows(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 2]]);
        assert_eq!(rank_mod_prime(&rows), 2);
    }
}
