use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use e8_core::algebra::Ratio;
use e8_core::bundle::{write_atomic, write_f64_bundle, write_halfint_bundle, Payload};
use e8_core::cartan::{cartan_report, CartanReport};
use e8_core::chart::{torus_decomposition, Chart, RankReport};
use e8_core::region::{
    in_region_roots, in_region_solved, region_equivalence_report, EulerPoint, RegionSampler, TorusRegion,
    LOCAL_AMPLITUDE,
};
use e8_core::roots::{compute_roots, reference_alignment, reference_simple_roots, Root, REFERENCE_HIGHEST_ROOT};
use e8_core::verify::{run_suites, JacobiMode, Suite, VerifyOptions};
use e8_core::{RootSystem, DIM, E8, FORMAT_VERSION, PAIR_COUNT, RANK};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (format version 1)");

/// Exact E8 from Spin(16): generation, verification, roots and the group chart.
#[derive(Parser, Debug)]
#[command(name = "e8", version = VERSION)]
struct Cli {
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, env = "E8_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the gamma blocks, spinor generators and optionally the adjoint matrices.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write the 248 adjoint matrices.
        #[arg(long)]
        adjoint: bool,
    },
    /// Run verification suites; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Extract the root system and write it as JSON.
    Roots {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Region membership, sampling and the inequality equivalence report.
    Region(RegionArgs),
    /// Evaluate a group element and write it as an f64 bundle.
    Element(ElementArgs),
    /// Numerical rank of the chart Jacobian at a seeded generic point.
    Rank {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Clifford,
    So16,
    Mixed,
    Spinor,
    Jacobi,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Exhaustive spinor-spinor-spinor Jacobi stratum instead of sampling.
    #[arg(long)]
    jacobi_full: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["check", "sample", "report_equivalence"])))]
struct RegionArgs {
    /// Comma-separated y1,…,y8.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    check: Option<[f64; RANK]>,
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long)]
    report_equivalence: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ElementArgs {
    /// Comma-separated y1,…,y8.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: [f64; RANK],
    #[arg(long)]
    x_random: bool,
    #[arg(long)]
    z_random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Half-width of the random `x, z` angles.
    #[arg(long, default_value_t = LOCAL_AMPLITUDE)]
    amplitude: f64,
    /// Header path; the payload goes beside it with a `.bin` extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct RootsArtifact {
    format_version: u32,
    scale: Ratio,
    coordinate_encoding: &'static str,
    max_residual: f64,
    cartan_indices: [usize; RANK],
    cartan: CartanReport,
    roots: Vec<Root>,
    positives: Vec<Root>,
    simples: [Root; RANK],
    cartan_matrix: Vec<Vec<i64>>,
    highest: Root,
    marks: [i64; RANK],
    bourbaki_labeling: [usize; RANK],
    reference_alignment: Option<[(usize, i32); RANK]>,
    matches_reference_simples: bool,
    matches_reference_highest: bool,
    integer_type: usize,
    half_integer_type: usize,
    weyl_closure_failures: usize,
    string_rule_failures: usize,
}

#[derive(Serialize)]
struct Membership {
    y: [f64; RANK],
    forms: [f64; RANK + 1],
    in_region_roots: bool,
    in_region_solved: bool,
}

#[derive(Serialize)]
struct RankArtifact {
    format_version: u32,
    seed: u64,
    amplitude: f64,
    point: EulerPoint,
    report: RankReport,
    passed: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    info!("config: {cli:?}");
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> e8_core::Result<bool> {
    match cmd {
        Command::Generate { out, format, adjoint } => generate(&out, format, adjoint),
        Command::Verify(a) => verify(a),
        Command::Roots { out, tol } => roots(&out, tol),
        Command::Region(a) => region(a),
        Command::Element(a) => element(a),
        Command::Rank { seed, step, out } => rank(seed, step, out.as_deref()),
    }
}

fn parse_point(s: &str) -> Result<[f64; RANK], String> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let n = v.len();
    v.try_into()
        .map_err(|_| format!("expected {RANK} comma-separated values, got {n}"))
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

fn ensure_dir(dir: &Path) -> e8_core::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| e8_core::Error::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> e8_core::Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_atomic(path, bytes)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> e8_core::Result<()> {
    match out {
        Some(p) => write_file(p, bytes),
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn generate(out: &Path, format: Format, adjoint: bool) -> e8_core::Result<bool> {
    ensure_dir(out)?;
    let payload = match format {
        Format::Csv => Payload::Csv,
        Format::Bin => Payload::Bin,
    };
    let e8 = E8::build()?;
    for (i, s) in e8.gammas.blocks().iter().enumerate() {
        write_halfint_bundle(out, &format!("sigma_{:02}", i + 1), s, payload)?;
    }
    for k in 0..PAIR_COUNT {
        let (i, j) = e8_core::clifford::pair_from_index(k);
        write_halfint_bundle(
            out,
            &format!("delta_{:02}_{:02}", i + 1, j + 1),
            e8.spinors.get(k),
            payload,
        )?;
    }
    if adjoint {
        for b in 0..DIM {
            write_halfint_bundle(out, &format!("adjoint_{b:03}"), &e8.adjoint.dense(b), payload)?;
        }
    }
    info!(
        "wrote {} bundles to {}",
        16 + PAIR_COUNT + if adjoint { DIM } else { 0 },
        out.display()
    );
    Ok(true)
}

fn verify(a: VerifyArgs) -> e8_core::Result<bool> {
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Clifford => vec![Suite::Clifford],
        SuiteArg::So16 => vec![Suite::So16],
        SuiteArg::Mixed => vec![Suite::Mixed],
        SuiteArg::Spinor => vec![Suite::Spinor],
        SuiteArg::Jacobi => vec![Suite::Jacobi],
    };
    let jacobi = if a.jacobi_full {
        JacobiMode::Full
    } else {
        JacobiMode::Sampled {
            samples: a.samples,
            seed: a.seed,
        }
    };
    let e8 = E8::build()?;
    let report = run_suites(&e8, &suites, VerifyOptions { jacobi });
    for s in &report.suites {
        info!(
            "{}: {} checks, {} failures{}",
            s.suite,
            s.checks,
            s.failures,
            s.first_counterexample
                .as_deref()
                .map(|c| format!(", first: {c}"))
                .unwrap_or_default()
        );
    }
    emit(a.out.as_deref(), &to_json(&report))?;
    Ok(report.all_passed)
}

fn roots(out: &Path, tol: f64) -> e8_core::Result<bool> {
    let e8 = E8::build()?;
    let cartan = e8.cartan()?;
    let report = cartan_report(&cartan, &e8.tensor)?;
    let ext = compute_roots(&cartan, tol)?;
    let rs = RootSystem::from_roots(ext.roots.clone(), ext.scale)?;
    let refs = reference_simple_roots();
    let artifact = RootsArtifact {
        format_version: FORMAT_VERSION,
        scale: ext.scale,
        coordinate_encoding: "doubled-int",
        max_residual: ext.max_residual,
        cartan_indices: cartan.one_based(),
        cartan: report,
        integer_type: rs.integer_type_count(),
        half_integer_type: rs.half_integer_type_count(),
        weyl_closure_failures: rs.weyl_closure_failures(),
        string_rule_failures: rs.string_rule_failures(),
        reference_alignment: reference_alignment(&rs.simples, &refs),
        matches_reference_simples: rs.simples == refs,
        matches_reference_highest: rs.highest == REFERENCE_HIGHEST_ROOT,
        roots: rs.roots,
        positives: rs.positives,
        simples: rs.simples,
        cartan_matrix: rs.cartan_matrix,
        highest: rs.highest,
        marks: rs.marks,
        bourbaki_labeling: rs.labeling,
    };
    write_file(out, &to_json(&artifact))?;
    info!(
        "{} roots at scale {} written to {}",
        artifact.roots.len(),
        artifact.scale,
        out.display()
    );
    Ok(artifact.roots.len() == 240 && artifact.weyl_closure_failures == 0)
}

fn region(a: RegionArgs) -> e8_core::Result<bool> {
    let reg = TorusRegion::reference();
    if let Some(y) = a.check {
        let m = Membership {
            y,
            forms: reg.forms(&y),
            in_region_roots: in_region_roots(&y, &reg),
            in_region_solved: in_region_solved(&y),
        };
        emit(a.out.as_deref(), &to_json(&m))?;
    } else if let Some(n) = a.sample {
        let mut s = RegionSampler::new(reg, a.seed)?;
        let pts = (0..n).map(|_| s.sample()).collect::<e8_core::Result<Vec<_>>>()?;
        emit(a.out.as_deref(), &to_json(&pts))?;
    } else if let Some(n) = a.report_equivalence {
        let r = region_equivalence_report(n, a.seed)?;
        info!(
            "equivalence: {} / {} agree, chain covers {:.6} of the region",
            r.agreements, r.draws, r.chain_fraction_of_region
        );
        emit(a.out.as_deref(), &to_json(&r))?;
    }
    Ok(true)
}

fn build_chart() -> e8_core::Result<(E8, Chart)> {
    let e8 = E8::build()?;
    let cartan = e8.cartan()?;
    let ext = compute_roots(&cartan, 1e-9)?;
    let chart = Chart::new(&e8.adjoint, torus_decomposition(&cartan, &ext)?)?;
    Ok((e8, chart))
}

fn element(a: ElementArgs) -> e8_core::Result<bool> {
    let y = a.y;
    if !in_region_roots(&y, &TorusRegion::reference()) {
        warn!("y lies outside the fundamental region");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut angles = |on: bool| -> Vec<f64> {
        (0..PAIR_COUNT)
            .map(|_| {
                if on {
                    rng.random_range(-a.amplitude..a.amplitude)
                } else {
                    0.0
                }
            })
            .collect()
    };
    let x = angles(a.x_random);
    let z = angles(a.z_random);
    let (_, chart) = build_chart()?;
    let g = chart.element(&EulerPoint { x, y, z })?;
    let dir = a
        .out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = a
        .out
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| e8_core::Error::InvalidInput(format!("bad output path {}", a.out.display())))?;
    ensure_dir(dir)?;
    let row_major: Vec<f64> = g.transpose().as_slice().to_vec();
    let header = write_f64_bundle(dir, name, DIM, DIM, &row_major)?;
    info!("element written to {}", header.display());
    Ok(true)
}

fn rank(seed: u64, step: f64, out: Option<&Path>) -> e8_core::Result<bool> {
    let (_, chart) = build_chart()?;
    let point = EulerPoint::generic(seed)?;
    let report = chart.rank(&point, step)?;
    let passed = report.rank == DIM && report.gap >= 1e3;
    info!(
        "rank {} (gap {:.1}, sigma_min {:.3e})",
        report.rank, report.gap, report.sigma_min
    );
    let artifact = RankArtifact {
        format_version: FORMAT_VERSION,
        seed,
        amplitude: LOCAL_AMPLITUDE,
        point,
        report,
        passed,
    };
    emit(out, &to_json(&artifact))?;
    Ok(passed)
}
