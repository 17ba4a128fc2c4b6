//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every criterion is reported even when
//! an earlier one fails; the process exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;

use e8_core::chart::{
    adjoint_of_real, expm_antisymmetric, killing_defect, orthogonality_error, torus_decomposition, Chart,
};
use e8_core::region::{
    in_region_roots, in_region_solved, region_equivalence_report, EulerPoint, RegionSampler, TorusRegion,
};
use e8_core::roots::{bourbaki_labeling, cartan_matrix, compute_roots, RootExtraction};
use e8_core::verify::{
    killing_block_constants, killing_form, run_suites, verify_jacobi, JacobiMode, Suite, VerifyOptions,
};
use e8_core::{cartan::cartan_report, CartanSet, HalfInt, RootSystem, DIM, E8, RANK};

struct Fixture {
    e8: E8,
    cartan: CartanSet,
    extraction: RootExtraction,
    roots: RootSystem,
    chart: Chart,
}

impl Fixture {
    fn build() -> Self {
        let e8 = E8::build().expect("build");
        let cartan = e8.cartan().expect("cartan");
        let extraction = compute_roots(&cartan, 1e-9).expect("roots");
        let roots = RootSystem::from_roots(extraction.roots.clone(), extraction.scale).expect("root system");
        let td = torus_decomposition(&cartan, &extraction).expect("torus");
        let chart = Chart::new(&e8.adjoint, td).expect("chart");
        Fixture {
            e8,
            cartan,
            extraction,
            roots,
            chart,
        }
    }
}

/// Frozen seed-0 counts of the 10⁶-draw equivalence report.
const FROZEN_AGREEMENTS: usize = 999_997;
const FROZEN_ONLY_ROOTS: usize = 3;
const FROZEN_CHAIN_IN_REGION: usize = 571_341;
const KILLING_CONSTANT: i64 = -60;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, budget: Duration) -> Result<(), String> {
    ensure(t < budget, format!("took {t:.1?}, budget {budget:?}"))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn suite(f: &Fixture, s: Suite) -> e8_core::verify::SuiteReport {
    let opts = VerifyOptions {
        jacobi: JacobiMode::Sampled {
            samples: 100_000,
            seed: 0,
        },
    };
    run_suites(&f.e8, &[s], opts).suites.remove(0)
}

fn clifford(f: &Fixture) -> Outcome {
    let t = Instant::now();
    let r = suite(f, Suite::Clifford);
    let pairs = r.part("anticommutation").map(|p| p.checks).unwrap_or(0);
    ensure(r.passed, format!("{:?}", r.first_counterexample))?;
    ensure(pairs == 136, format!("{pairs} pairs"))?;
    within(t.elapsed(), Duration::from_secs(10))?;
    Ok(format!("136 pairs exact in {:.2?}", t.elapsed()))
}

fn so16(f: &Fixture) -> Outcome {
    let t = Instant::now();
    let r = suite(f, Suite::So16);
    let delta = r.part("spinor_generators").ok_or("missing part")?;
    ensure(r.passed, format!("{:?}", r.first_counterexample))?;
    ensure(delta.checks == 14_400, format!("{} ordered pairs", delta.checks))?;
    within(t.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "14400 ordered pairs exact ({} checks total) in {:.2?}",
        r.checks,
        t.elapsed()
    ))
}

fn mixed_and_spinor(f: &Fixture) -> Outcome {
    let m = suite(f, Suite::Mixed);
    let s = suite(f, Suite::Spinor);
    ensure(
        m.passed && s.passed,
        format!("{:?} {:?}", m.first_counterexample, s.first_counterexample),
    )?;
    ensure(
        m.checks == 15_360 && s.checks == 8_128,
        format!("{} / {}", m.checks, s.checks),
    )?;
    Ok("15360 mixed, 8128 spinor pairs exact".into())
}

fn jacobi(f: &Fixture) -> Outcome {
    let sampled = suite(f, Suite::Jacobi);
    ensure(sampled.passed, format!("{:?}", sampled.first_counterexample))?;
    let qqq = sampled.part("QQQ").ok_or("missing QQQ")?;
    ensure(qqq.checks >= 100_000, format!("{} QQQ samples", qqq.checks))?;
    let t = Instant::now();
    let full = verify_jacobi(&f.e8.tensor, JacobiMode::Full);
    ensure(full.iter().all(|r| r.passed()), "exhaustive QQQ failed")?;
    within(t.elapsed(), Duration::from_secs(3600))?;
    let total: u64 = full.iter().map(|r| r.checks).sum();
    Ok(format!(
        "sampled {} checks; exhaustive {total} triples in {:.1?}",
        sampled.checks,
        t.elapsed()
    ))
}

fn adjoint(f: &Fixture) -> Outcome {
    let rank = e8_core::verify::adjoint_rank(&f.e8.adjoint);
    ensure(rank == DIM, format!("rank {rank}"))?;
    let k = killing_form(&f.e8.adjoint).map_err(|e| e.to_string())?;
    let c = killing_block_constants(&k).ok_or("not block scalar")?;
    let frozen = HalfInt::from_int(KILLING_CONSTANT);
    ensure(c == (frozen, frozen), format!("{c:?}"))?;
    Ok(format!("rank 248; Killing form {}·I on both blocks", KILLING_CONSTANT))
}

fn cartan(f: &Fixture) -> Outcome {
    let r = cartan_report(&f.cartan, &f.e8.tensor).map_err(|e| e.to_string())?;
    ensure(r.indices.len() == RANK && r.pairwise_commuting, "not commuting")?;
    ensure(
        r.extra_commuting_spinors.is_empty(),
        format!("{:?}", r.extra_commuting_spinors),
    )?;
    ensure(r.centralizer_dim == RANK, format!("centralizer {}", r.centralizer_dim))?;
    Ok(format!("spinors {:?}, centralizer 8", r.indices))
}

fn roots(f: &Fixture) -> Outcome {
    let (ext, rs) = (&f.extraction, &f.roots);
    ensure(
        ext.roots.len() == 240 && ext.kernel_dim == RANK,
        format!("{} roots", ext.roots.len()),
    )?;
    ensure(ext.max_residual < 1e-9, format!("residual {}", ext.max_residual))?;
    ensure(
        rs.integer_type_count() == 112 && rs.half_integer_type_count() == 128,
        "coordinate types",
    )?;
    ensure(rs.closed_under_negation() && rs.weyl_closure_failures() == 0, "closure")?;
    let raw = cartan_matrix(&rs.simples_found).map_err(|e| e.to_string())?;
    ensure(bourbaki_labeling(&raw).is_some(), "Cartan matrix is not E8")?;
    let mut marks = rs.marks.to_vec();
    marks.sort_unstable();
    ensure(marks == [2, 2, 3, 3, 4, 4, 5, 6], format!("{:?}", rs.marks))?;
    Ok(format!(
        "240 roots at scale {}, residual {:.1e}, marks {:?}",
        ext.scale, ext.max_residual, rs.marks
    ))
}

fn torus(f: &Fixture) -> Outcome {
    let mut sampler = RegionSampler::new(TorusRegion::reference(), 8).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut worst_hom = 0.0f64;
    let mut prev = [0.0; RANK];
    for _ in 0..100 {
        let y = sampler.sample().map_err(|e| e.to_string())?;
        let mut coeffs = vec![0.0; DIM];
        for (a, &flat) in f.cartan.flat_indices().iter().enumerate() {
            coeffs[flat] = y[a];
        }
        let oracle = expm_antisymmetric(&adjoint_of_real(&f.e8.adjoint, &coeffs), 1e-12).map_err(|e| e.to_string())?;
        let t = f.chart.torus_element(&y);
        worst = worst.max(max_abs(&(&t - oracle)));
        let sum: [f64; RANK] = std::array::from_fn(|a| y[a] + prev[a]);
        worst_hom = worst_hom.max(max_abs(
            &(t * f.chart.torus_element(&prev) - f.chart.torus_element(&sum)),
        ));
        prev = y;
    }
    ensure(worst < 1e-9, format!("oracle error {worst:e}"))?;
    ensure(worst_hom < 1e-9, format!("homomorphism error {worst_hom:e}"))?;
    Ok(format!("100 points: oracle {worst:.1e}, homomorphism {worst_hom:.1e}"))
}

fn region() -> Outcome {
    let reg = TorusRegion::reference();
    let inside = [0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.11, 0.5];
    let witnesses: [([f64; RANK], bool); 3] = [
        ([0.0; RANK], true),
        (inside, true),
        ([0.2, 0.1, 0.3, 0.4, 0.5, 0.6, 0.7, 2.0], false),
    ];
    for (y, expected) in witnesses {
        ensure(in_region_roots(&y, &reg) == expected, format!("root form at {y:?}"))?;
        ensure(in_region_solved(&y) == expected, format!("chain at {y:?}"))?;
    }
    let mut edge = [0.0; RANK];
    edge[0] = std::f64::consts::FRAC_PI_6;
    ensure(!in_region_solved(&edge), "chain accepts y¹ = π/6")?;
    let mut top = [0.0; RANK];
    top[6] = std::f64::consts::FRAC_PI_2;
    top[7] = std::f64::consts::FRAC_PI_2;
    ensure(!in_region_roots(&top, &reg), "root form accepts the highest-root face")?;

    let n = 1_000_000;
    let reports: Vec<_> = (0..3)
        .map(|s| region_equivalence_report(n, s))
        .collect::<e8_core::Result<_>>()
        .map_err(|e| e.to_string())?;
    let r0 = &reports[0];
    ensure(
        r0.agreements == FROZEN_AGREEMENTS
            && r0.only_roots == FROZEN_ONLY_ROOTS
            && r0.only_solved == 0
            && r0.region_samples_in_chain == FROZEN_CHAIN_IN_REGION,
        format!(
            "seed 0 drifted: {} / {} / {} / {}",
            r0.agreements, r0.only_roots, r0.only_solved, r0.region_samples_in_chain
        ),
    )?;
    for a in &reports {
        for b in &reports {
            let p = (a.agreement_fraction + b.agreement_fraction) / 2.0;
            let sigma = (2.0 * p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
            ensure(
                (a.agreement_fraction - b.agreement_fraction).abs() <= 3.0 * sigma,
                format!("agreement unstable between seeds {} and {}", a.seed, b.seed),
            )?;
            let q = (a.chain_fraction_of_region + b.chain_fraction_of_region) / 2.0;
            let sigma = (2.0 * q * (1.0 - q) / n as f64).sqrt();
            ensure(
                (a.chain_fraction_of_region - b.chain_fraction_of_region).abs() <= 3.0 * sigma,
                format!("chain fraction unstable between seeds {} and {}", a.seed, b.seed),
            )?;
        }
    }
    let fr: Vec<String> = reports.iter().map(|r| format!("{:.6}", r.agreement_fraction)).collect();
    Ok(format!(
        "witnesses agree; agreement {} over seeds 0..3; chain covers {:.6} of the region",
        fr.join(" / "),
        r0.chain_fraction_of_region
    ))
}

fn chart(f: &Fixture) -> Outcome {
    let t = Instant::now();
    let id = DMatrix::<f64>::identity(DIM, DIM);
    let g0 = f.chart.element(&EulerPoint::zero()).map_err(|e| e.to_string())?;
    ensure(max_abs(&(g0 - &id)) < 1e-12, "chart(0) is not the identity")?;
    let killing = [KILLING_CONSTANT as f64; DIM];
    for seed in 0..4 {
        let g = f
            .chart
            .element(&EulerPoint::generic(seed).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let (o, k) = (orthogonality_error(&g), killing_defect(&g, &killing));
        ensure(
            o < 1e-8 && k < 1e-8,
            format!("seed {seed}: orthogonality {o:e}, Killing {k:e}"),
        )?;
    }
    let r = f
        .chart
        .rank(&EulerPoint::generic(0).map_err(|e| e.to_string())?, 1e-5)
        .map_err(|e| e.to_string())?;
    ensure(r.rank == DIM, format!("rank {}", r.rank))?;
    ensure(r.gap >= 1e3, format!("gap {}", r.gap))?;
    within(t.elapsed(), Duration::from_secs(600))?;
    Ok(format!("rank 248, gap {:.0}, in {:.1?}", r.gap, t.elapsed()))
}

fn run_cli(dir: &Path, threads: &str, args: &[&str]) -> Result<(), String> {
    let st = Command::new(env!("CARGO_BIN_EXE_e8"))
        .args(args)
        .env("E8_THREADS", threads)
        .env("RUST_LOG", "warn")
        .current_dir(dir)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(st.success(), format!("{args:?} exited with {st}"))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    for (tag, threads) in runs {
        run_cli(d, threads, &["roots", "--out", &format!("roots_{tag}.json")])?;
        run_cli(
            d,
            threads,
            &[
                "verify",
                "--suite",
                "all",
                "--seed",
                "0",
                "--out",
                &format!("verify_{tag}.json"),
            ],
        )?;
    }
    for kind in ["roots", "verify"] {
        let read = |tag: &str| std::fs::read(d.join(format!("{kind}_{tag}.json"))).map_err(|e| e.to_string());
        let a = read("a")?;
        ensure(read("b")? == a, format!("{kind} differs between runs"))?;
        ensure(read("c")? == a, format!("{kind} differs between thread counts"))?;
    }
    Ok("roots and verify byte-identical over 2 runs and 1 vs 4 threads".into())
}

fn main() {
    let fixture = Fixture::build();
    let f = &fixture;
    let criteria: [Criterion; 11] = [
        ("clifford contract", Box::new(|| clifford(f))),
        ("so(16) relations", Box::new(|| so16(f))),
        ("mixed and spinor relations", Box::new(|| mixed_and_spinor(f))),
        ("jacobi identity", Box::new(|| jacobi(f))),
        ("adjoint integrity", Box::new(|| adjoint(f))),
        ("cartan subalgebra", Box::new(|| cartan(f))),
        ("root system", Box::new(|| roots(f))),
        ("torus exponential", Box::new(|| torus(f))),
        ("fundamental region", Box::new(region)),
        ("group chart", Box::new(|| chart(f))),
        ("reproducibility", Box::new(reproducibility)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
