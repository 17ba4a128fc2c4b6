mod common;

use std::collections::BTreeSet;

use common::fixture;
use e8_core::roots::*;
use e8_core::RANK;

/// Even-coordinate E8 roots with the half-integer part of the given sign parity.
fn textbook_roots(odd_minus: bool) -> BTreeSet<Root> {
    let mut out = BTreeSet::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for si in [-2, 2] {
                for sj in [-2, 2] {
                    let mut r = [0; 8];
                    r[i] = si;
                    r[j] = sj;
                    out.insert(Root(r));
                }
            }
        }
    }
    for mask in 0u32..256 {
        if (mask.count_ones() % 2 == 1) == odd_minus {
            out.insert(Root(std::array::from_fn(|a| if mask >> a & 1 == 1 { -1 } else { 1 })));
        }
    }
    out
}

#[test]
fn extraction_counts_and_residual() {
    let ext = &fixture().extraction;
    assert_eq!(ext.roots.len(), 240);
    assert_eq!(ext.kernel_dim, 8);
    assert_eq!(ext.planes.len(), 120);
    assert!(ext.max_residual < 1e-9, "{}", ext.max_residual);
    let distinct: BTreeSet<_> = ext.roots.iter().collect();
    assert_eq!(distinct.len(), 240);
}

#[test]
fn scale_is_stable_across_weight_vectors() {
    let f = fixture();
    for attempt in 1..3 {
        let other = compute_roots_from(&f.cartan, 1e-9, attempt).unwrap();
        assert_eq!(other.attempt, attempt);
        assert_eq!(other.scale, f.extraction.scale);
        assert_eq!(other.roots, f.extraction.roots);
    }
}

#[test]
fn roots_are_the_textbook_set() {
    let ours: BTreeSet<Root> = fixture().extraction.roots.iter().copied().collect();
    assert!(ours == textbook_roots(false) || ours == textbook_roots(true));
}

#[test]
fn coordinate_types_and_symmetries() {
    let rs = &fixture().roots;
    assert_eq!(rs.integer_type_count(), 112);
    assert_eq!(rs.half_integer_type_count(), 128);
    assert!(rs.closed_under_negation());
    assert!(rs.simply_laced());
    assert_eq!(rs.weyl_closure_failures(), 0);
    assert_eq!(rs.string_rule_failures(), 0);
    for r in &rs.roots {
        assert!(!r.is_zero());
        assert!(r.0.iter().all(|d| d.abs() <= 2));
    }
    // (1, 1, 0, …, 0) up to signed coordinate permutation: any integer-type root.
    assert!(rs.roots.iter().any(|r| {
        let mut a: Vec<i32> = r.0.iter().map(|d| d.abs()).collect();
        a.sort_unstable();
        a == [0, 0, 0, 0, 0, 0, 2, 2]
    }));
    println!(
        "literal (1,1,0,0,0,0,0,0) present: {}",
        rs.contains(&Root([2, 2, 0, 0, 0, 0, 0, 0]))
    );
}

#[test]
fn positive_and_simple_roots() {
    let rs = &fixture().roots;
    assert_eq!(rs.positives.len(), 120);
    assert_eq!(rs.simples.len(), 8);
    for r in &rs.positives {
        let c = integer_coefficients(&rs.simples, r).expect("integral");
        assert!(c.iter().all(|&x| x >= 0), "{r:?}");
    }
    for r in &rs.roots {
        let c = integer_coefficients(&rs.simples, r).unwrap();
        assert!(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0));
    }
}

#[test]
fn cartan_matrix_is_e8() {
    let rs = &fixture().roots;
    let raw = cartan_matrix(&rs.simples_found).unwrap();
    assert!((0..8).all(|i| raw[i][i] == 2));
    let p = bourbaki_labeling(&raw).expect("permutation-equivalent to E8");
    assert_eq!(p, rs.labeling);
    assert_eq!(rs.cartan_matrix, standard_e8_cartan().map(|r| r.to_vec()).to_vec());
}

#[test]
fn highest_root_and_marks() {
    let rs = &fixture().roots;
    let mut marks = rs.marks.to_vec();
    marks.sort_unstable();
    assert_eq!(marks, [2, 2, 3, 3, 4, 4, 5, 6]);
    assert_eq!(rs.marks, REFERENCE_MARKS);
    assert_eq!(rs.coxeter_number(), 30);
    assert!(rs.highest_is_marked_sum());
    let nonzero: Vec<i32> = rs.highest.0.iter().copied().filter(|&d| d != 0).collect();
    assert_eq!(nonzero, [2, 2]);
    println!(
        "highest root {:?}, literal match {}",
        rs.highest,
        rs.highest == REFERENCE_HIGHEST_ROOT
    );
}

#[test]
fn reference_simple_roots_align_by_signed_relabeling() {
    let rs = &fixture().roots;
    let refs = reference_simple_roots();
    let p = reference_alignment(&rs.simples, &refs).expect("signed coordinate permutation");
    for (ours, theirs) in rs.simples.iter().zip(&refs) {
        let mut image = [0i32; RANK];
        for (a, &(b, s)) in p.iter().enumerate() {
            image[b] = s * ours.0[a];
        }
        assert_eq!(image, theirs.0);
    }
    println!("alignment {p:?}, literal match {}", rs.simples == refs);
}

#[test]
fn functional_ties_are_errors() {
    let roots = [Root([0, 64, 0, 0, 0, 0, 0, 0]), Root([8, 0, 0, 0, 0, 0, 0, 0])];
    assert_eq!(roots[0].functional(), roots[1].functional());
    assert!(choose_positive_and_simple(&roots).is_err());
}

#[test]
fn plane_rates_match_snapped_roots() {
    let ext = &fixture().extraction;
    let s = ext.scale.num as f64 / ext.scale.den as f64;
    for p in &ext.planes {
        for a in 0..RANK {
            assert!((p.rates[a] - p.root.coords()[a] * s).abs() < 1e-9);
        }
        assert!(p.root.functional() > 0);
    }
}
