//! Executes one experiment config: builds the kernel, runs the named
//! computation, writes CSV/JSON artifacts plus a machine-readable manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crossedlab::algebra::Kernel;
use crossedlab::coeff::Coeff;
use crossedlab::duality::{plancherel_l2_check, spectral_duality_probe, trace_duality_check};
use crossedlab::dynsys::{haar_grid, PointX, SpaceSpec};
use crossedlab::presets;
use crossedlab::spectral::{
    bands, energy_grid, ids_bands, ids_shubin, spectral_measure_support_check,
};
use crossedlab::trace::{shubin_sequence, tau_kernel, trace_report, TraceParams};
use crossedlab::LabError;

use crate::config::{Computation, ExperimentConfig, SystemSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub tolerance: f64,
    pub value: f64,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Check {
        Check { name: name.to_string(), pass: value <= tolerance, tolerance, value }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Check {
        Check { name: name.to_string(), pass: value >= bound, tolerance: bound, value }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub computation: String,
    pub config: Vec<(String, String)>,
    pub config_hash: String,
    pub tolerance_scale: f64,
    pub seed: u64,
    pub wall_ms: u128,
    pub versions: Versions,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub cli: &'static str,
    pub core: &'static str,
}

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub tolerance_scale: f64,
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(
    path: &Path,
    config_hash: u64,
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# config-hash: {config_hash:016x}")?;
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

fn build_kernel(cfg: &ExperimentConfig) -> Result<Kernel, String> {
    let system = cfg.system.build();
    match cfg.kernel.preset.as_str() {
        "unit" => Ok(Kernel::unit(system)),
        "laplacian" => Ok(presets::laplacian(system)),
        "almost_mathieu" => match &cfg.system {
            SystemSpec::Torus { theta } if theta.len() == 1 => {
                Ok(presets::almost_mathieu(cfg.kernel.lambda, theta[0]))
            }
            _ => Err("almost_mathieu needs a rank-1 torus system".to_string()),
        },
        "periodic" => Ok(presets::periodic(&cfg.kernel.potential)),
        "literal" => {
            let mut k = Kernel::zero(system.clone());
            for term in &cfg.kernel.terms {
                let c = Complex64::new(term.re, term.im);
                let coeff = match &system.space {
                    SpaceSpec::Point => Coeff::Point(c),
                    SpaceSpec::Torus { .. } => Coeff::torus_mode(vec![term.mode], c),
                    SpaceSpec::FiniteCyclic { .. } => {
                        return Err(
                            "literal terms support point and torus systems only".to_string()
                        )
                    }
                };
                k.add_term(vec![term.t], coeff);
            }
            Ok(k)
        }
        other => Err(format!("unknown preset `{other}`")),
    }
}

fn base_point(a: &Kernel) -> PointX {
    haar_grid(&a.system().space, 1).nodes[0].clone()
}

type CheckResult = Result<Vec<Check>, LabError>;

fn run_trace_check(
    a: &Kernel,
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    hash: u64,
) -> CheckResult {
    let params = TraceParams {
        x_resolution: cfg.numeric.x_grid,
        dual_resolution: cfg.numeric.that_grid,
        mode_cutoff: cfg.numeric.mode_cutoff,
        box_radius: cfg.numeric.box_radius,
        weight_radius: (cfg.numeric.box_radius - a.support_radius()).max(1).min(8),
        shubin_ns: cfg.numeric.shubin_ns.clone(),
    };
    let rep = trace_report(a, &params, opts.tolerance_scale)?;
    write_csv(
        &opts.out_dir.join("trace.csv"),
        hash,
        &["tau_kernel", "lambda_fiber", "mu_dual", "delta_e", "agreement"],
        &[vec![
            fmt17(rep.tau_kernel),
            fmt17(rep.lambda_fiber),
            fmt17(rep.mu_dual),
            fmt17(rep.delta_e),
            fmt17(rep.agreement),
        ]],
    )
    .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let shubin_rows: Vec<Vec<String>> = rep
        .shubin
        .iter()
        .map(|p| vec![p.n.to_string(), p.box_size.to_string(), fmt17(p.value)])
        .collect();
    write_csv(&opts.out_dir.join("shubin.csv"), hash, &["n", "box_size", "value"], &shubin_rows)
        .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    Ok(vec![
        Check::at_most("lambda_fiber_agrees", (rep.tau_kernel - rep.lambda_fiber).abs(), rep.lambda_tol),
        Check::at_most("mu_dual_agrees", (rep.tau_kernel - rep.mu_dual).abs(), rep.mu_tol),
        Check::at_most("delta_e_agrees", (rep.tau_kernel - rep.delta_e).abs(), rep.delta_tol),
    ])
}

fn run_ids(a: &Kernel, cfg: &ExperimentConfig, opts: &RunOptions, hash: u64) -> CheckResult {
    let energies = energy_grid(a, cfg.numeric.energy_grid);
    let x = base_point(a);
    let curve = ids_shubin(a, &x, cfg.numeric.box_radius, &energies)?;
    let rows: Vec<Vec<String>> = energies
        .iter()
        .zip(&curve.values)
        .map(|(e, v)| vec![fmt17(*e), fmt17(*v)])
        .collect();
    write_csv(&opts.out_dir.join("ids.csv"), hash, &["energy", "ids"], &rows)
        .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let monotone = if curve.is_nondecreasing() { 0.0 } else { 1.0 };
    let saturation = (curve.values.last().copied().unwrap_or(0.0) - 1.0).abs()
        + curve.values.first().copied().unwrap_or(1.0).abs();
    let mut checks = vec![
        Check::at_most("ids_nondecreasing", monotone, 0.0),
        Check::at_most("ids_saturates_at_l1_bound", saturation, 1e-12),
    ];
    if matches!(a.system().space, SpaceSpec::FiniteCyclic { .. }) {
        // periodic systems carry an independent Bloch-side computation
        let band_curve = ids_bands(a, cfg.numeric.zone_resolution, &energies)?;
        let band_rows: Vec<Vec<String>> = energies
            .iter()
            .zip(&band_curve.values)
            .map(|(e, v)| vec![fmt17(*e), fmt17(*v)])
            .collect();
        write_csv(&opts.out_dir.join("ids_bands.csv"), hash, &["energy", "ids"], &band_rows)
            .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
        checks.push(Check::at_most(
            "ids_matches_bloch",
            curve.sup_distance(&band_curve),
            0.02 * opts.tolerance_scale,
        ));
    }
    Ok(checks)
}

fn run_bands(a: &Kernel, cfg: &ExperimentConfig, opts: &RunOptions, hash: u64) -> CheckResult {
    let bs = bands(a, cfg.numeric.zone_resolution)?;
    let p = bs.band_count();
    let mut header: Vec<String> = vec!["node".to_string()];
    header.extend((0..p).map(|j| format!("band_{j}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = bs
        .zone_nodes
        .iter()
        .zip(&bs.bands)
        .map(|(node, vals)| {
            let mut row = vec![fmt17(node[0])];
            row.extend(vals.iter().map(|v| fmt17(*v)));
            row
        })
        .collect();
    write_csv(&opts.out_dir.join("bands.csv"), hash, &header_refs, &rows)
        .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let l1 = a.l1_norm();
    let overflow = bs
        .bands
        .iter()
        .flat_map(|vals| vals.iter())
        .map(|v| (v.abs() - l1).max(0.0))
        .fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("bands_within_l1_bound", overflow, 1e-9),
        Check::at_most(
            "band_continuity_modulus",
            bs.max_jump(),
            20.0 * l1 / cfg.numeric.zone_resolution as f64,
        ),
    ])
}

fn run_support_check(
    a: &Kernel,
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    hash: u64,
) -> CheckResult {
    let rep = spectral_measure_support_check(a, cfg.numeric.box_radius, cfg.numeric.zone_resolution)?;
    let rows: Vec<Vec<String>> = rep
        .per_x
        .iter()
        .enumerate()
        .map(|(i, (dist, edges))| vec![i.to_string(), fmt17(*dist), edges.to_string()])
        .collect();
    write_csv(
        &opts.out_dir.join("support.csv"),
        hash,
        &["x_index", "max_gap_distance", "edge_states"],
        &rows,
    )
    .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let union_rows: Vec<Vec<String>> = rep
        .band_union
        .iter()
        .map(|(lo, hi)| vec![fmt17(*lo), fmt17(*hi)])
        .collect();
    write_csv(&opts.out_dir.join("band_union.csv"), hash, &["lower", "upper"], &union_rows)
        .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let worst_edges = rep.per_x.iter().map(|(_, e)| *e).max().unwrap_or(0) as f64;
    Ok(vec![Check::at_most("edge_states_per_x", worst_edges, 4.0)])
}

#[derive(Serialize)]
struct DualityArtifact {
    tau_forward: f64,
    tau_backward: f64,
    roundtrip_dev: f64,
    multiplicativity_dev: f64,
    star_dev: f64,
    random_kernels: usize,
    worst_random_trace_dev: f64,
}

fn run_duality_check(
    a: &Kernel,
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    _hash: u64,
) -> CheckResult {
    let rep = trace_duality_check(a)?;
    let mult = plancherel_l2_check(a, a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst_random = 0.0f64;
    for _ in 0..cfg.numeric.random_kernels {
        let r = presets::random_kernel(&mut rng, presets::GOLDEN, 3, 3);
        let rr = trace_duality_check(&r)?;
        worst_random = worst_random
            .max(rr.deviation)
            .max(rr.star_deviation)
            .max(rr.roundtrip_deviation);
    }
    let artifact = DualityArtifact {
        tau_forward: rep.tau_forward,
        tau_backward: rep.tau_backward,
        roundtrip_dev: rep.roundtrip_deviation,
        multiplicativity_dev: mult.multiplicativity_deviation,
        star_dev: rep.star_deviation,
        random_kernels: cfg.numeric.random_kernels,
        worst_random_trace_dev: worst_random,
    };
    fs::write(
        opts.out_dir.join("duality.json"),
        serde_json::to_string_pretty(&artifact).expect("serializable"),
    )
    .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let s = opts.tolerance_scale;
    Ok(vec![
        Check::at_most("trace_duality", rep.deviation, 1e-12 * s),
        Check::at_most("star_compatibility", rep.star_deviation, 1e-12 * s),
        Check::at_most("roundtrip_reflection", rep.roundtrip_deviation, 1e-12 * s),
        Check::at_most("multiplicativity", mult.multiplicativity_deviation, 1e-10 * s),
        Check::at_most("random_kernel_sweep", worst_random, 1e-12 * s),
    ])
}

fn run_aubry_probe(cfg: &ExperimentConfig, opts: &RunOptions, hash: u64) -> CheckResult {
    let theta = match &cfg.system {
        SystemSpec::Torus { theta } if theta.len() == 1 => theta[0],
        _ => return Err(LabError::InvalidParameter("aubry-probe needs a rank-1 torus".into())),
    };
    let lambda = cfg.kernel.lambda;
    let n = cfg.numeric.box_radius;
    let probe =
        spectral_duality_probe(lambda, theta, n, cfg.numeric.mode_cutoff, cfg.numeric.energy_grid)?;

    // paired IDS curves: forward at coupling lambda, partner at 4/lambda on
    // the Aubry-rescaled energy axis
    let forward = presets::almost_mathieu(lambda, theta);
    let partner = presets::almost_mathieu(4.0 / lambda, theta);
    let x0 = PointX::Torus(vec![0.0]);
    let r = 2.0 + lambda;
    let energies: Vec<f64> = (0..cfg.numeric.energy_grid)
        .map(|i| -r + 2.0 * r * i as f64 / (cfg.numeric.energy_grid - 1) as f64)
        .collect();
    let mapped: Vec<f64> = energies.iter().map(|e| 2.0 * e / lambda).collect();
    let fwd_curve = ids_shubin(&forward, &x0, n, &energies)?;
    let dual_curve = ids_shubin(&partner, &x0, n, &mapped)?;
    let fwd_rows: Vec<Vec<String>> = energies
        .iter()
        .zip(&fwd_curve.values)
        .map(|(e, v)| vec![fmt17(*e), fmt17(*v)])
        .collect();
    let dual_rows: Vec<Vec<String>> = mapped
        .iter()
        .zip(&dual_curve.values)
        .map(|(e, v)| vec![fmt17(*e), fmt17(*v)])
        .collect();
    write_csv(&opts.out_dir.join("aubry_forward.csv"), hash, &["energy", "ids"], &fwd_rows)
        .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    write_csv(&opts.out_dir.join("aubry_dual.csv"), hash, &["energy", "ids"], &dual_rows)
        .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let s = opts.tolerance_scale;
    Ok(vec![
        Check::at_most("aubry_ids_consistency", probe.ids_sup_distance, 0.03 * s),
        Check::at_least("ritz_matching_fraction", probe.ritz_matched_fraction, 0.9),
    ])
}

fn run_shubin(a: &Kernel, cfg: &ExperimentConfig, opts: &RunOptions, hash: u64) -> CheckResult {
    let x = base_point(a);
    let seq = shubin_sequence(a, &x, &cfg.numeric.shubin_ns)?;
    let tau = tau_kernel(a);
    let rows: Vec<Vec<String>> = seq
        .iter()
        .map(|p| {
            vec![p.n.to_string(), p.box_size.to_string(), fmt17(p.value), fmt17((p.value - tau).abs())]
        })
        .collect();
    write_csv(
        &opts.out_dir.join("shubin.csv"),
        hash,
        &["n", "box_size", "value", "abs_error"],
        &rows,
    )
    .map_err(|e| LabError::InvalidParameter(e.to_string()))?;
    let last_err = seq.last().map(|p| (p.value - tau).abs()).unwrap_or(f64::INFINITY);
    let last_n = seq.last().map(|p| p.n).unwrap_or(1) as f64;
    // O(1/n) trend budget, generous constant
    Ok(vec![Check::at_most(
        "shubin_converged",
        last_err,
        opts.tolerance_scale * 30.0 * a.l1_norm() / last_n,
    )])
}

/// Runs the experiment and writes artifacts; returns the process exit code.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> i32 {
    let start = Instant::now();
    let hash = cfg.hash();
    if let Err(e) = fs::create_dir_all(&opts.out_dir) {
        eprintln!("cannot create output directory: {e}");
        return EXIT_CONFIG;
    }

    let kernel = match build_kernel(cfg) {
        Ok(k) => k,
        Err(msg) => {
            eprintln!("config error (kernel): {msg}");
            return EXIT_CONFIG;
        }
    };

    // quick structural screen so impossible combinations fail as config
    // errors rather than numeric ones
    let space = &kernel.system().space;
    let combo_ok = match cfg.computation {
        Computation::Bands | Computation::SupportCheck => {
            matches!(space, SpaceSpec::FiniteCyclic { .. })
        }
        Computation::DualityCheck => !matches!(space, SpaceSpec::FiniteCyclic { .. }),
        Computation::AubryProbe => matches!(space, SpaceSpec::Torus { .. }),
        _ => true,
    };
    if !combo_ok {
        eprintln!(
            "config error: computation `{}` does not apply to this configuration space",
            cfg.computation.name()
        );
        return EXIT_CONFIG;
    }

    let result = match cfg.computation {
        Computation::TraceCheck => run_trace_check(&kernel, cfg, opts, hash),
        Computation::Ids => run_ids(&kernel, cfg, opts, hash),
        Computation::Bands => run_bands(&kernel, cfg, opts, hash),
        Computation::SupportCheck => run_support_check(&kernel, cfg, opts, hash),
        Computation::DualityCheck => run_duality_check(&kernel, cfg, opts, hash),
        Computation::AubryProbe => run_aubry_probe(cfg, opts, hash),
        Computation::Shubin => run_shubin(&kernel, cfg, opts, hash),
    };

    let (checks, error) = match result {
        Ok(checks) => (checks, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let pass = error.is_none() && checks.iter().all(|c| c.pass);
    let manifest = RunManifest {
        computation: cfg.computation.name().to_string(),
        config: cfg.entries.clone(),
        config_hash: format!("{hash:016x}"),
        tolerance_scale: opts.tolerance_scale,
        seed: opts.seed,
        wall_ms: start.elapsed().as_millis(),
        versions: Versions { cli: env!("CARGO_PKG_VERSION"), core: crossedlab::VERSION },
        checks,
        pass,
        error: error.clone(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("serializable");
    if let Err(e) = fs::write(opts.out_dir.join("manifest.json"), manifest_json) {
        eprintln!("cannot write manifest: {e}");
        return EXIT_NUMERIC;
    }

    for check in &manifest.checks {
        println!(
            "{}: {} (value {:.3e}, tolerance {:.3e})",
            check.name,
            if check.pass { "PASS" } else { "FAIL" },
            check.value,
            check.tolerance
        );
    }
    match (&error, pass) {
        (Some(msg), _) => {
            eprintln!("numeric failure: {msg}");
            EXIT_NUMERIC
        }
        (None, true) => EXIT_OK,
        (None, false) => EXIT_CHECK_FAILED,
    }
}
