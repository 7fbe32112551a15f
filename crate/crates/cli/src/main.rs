//! okmlab: reproducible experiments on the spectra of uniform d-regular
//! digraphs. Every subcommand resolves its configuration from an optional
//! TOML file plus flag overrides, writes CSV/JSON artifacts together with a
//! manifest carrying the config hash, and is deterministic per seed.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use config::{parse_complex, write_manifest, ExperimentConfig};
use okm_core::digraph::{sample_simple, Digraph};
use okm_core::girko::{girko_identity_check, EsdReport, RadialBump};
use okm_core::resolvent::{
    green_full, q_parameters_from_green, singular_profile, ward_violation_of_green,
};
use okm_core::selfconsistent::{solve_m_infty, SpectralPoint};
use okm_core::switching::switch_statistics;
use okm_core::treegreen::{
    boundary_sums, build_tree, ext_i, green_dense, path_entry, root_entries_recursive,
    tree_green_elimination, y_ik, y_ok, TreeKind,
};

#[derive(Parser)]
#[command(name = "okmlab", version, about = "Spectral laboratory for d-regular digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    /// TOML config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Master seeds (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Real-part grid: "a" or "a:b:count"
    #[arg(long)]
    z_re: Option<String>,
    /// Imag-part grid: "a" or "a:b:count"
    #[arg(long)]
    z_im: Option<String>,
    /// Spectral shifts, e.g. "1+0i" (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    w: Option<Vec<String>>,
    /// Switching neighborhood radius
    #[arg(long)]
    ell: Option<usize>,
    /// Validity radius for the switching indicators
    #[arg(long)]
    r_chi: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Tree depth K
    #[arg(long, short = 'k')]
    depth: Option<usize>,
    #[arg(long)]
    bump_radius: Option<f64>,
    #[arg(long)]
    bump_center: Option<String>,
    /// Girko grid spacing
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_retries: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Emit a decorative SVG scatter where applicable
    #[arg(long)]
    svg: bool,
    /// Also write compact edge-list CSVs for sampled graphs
    #[arg(long)]
    edge_list: bool,
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            n: self.n,
            d: self.d,
            seeds: self.seeds.clone(),
            z_re: self.z_re.clone(),
            z_im: self.z_im.clone(),
            w: self.w.clone(),
            ell: self.ell,
            r_chi: self.r_chi,
            trials: self.trials,
            depth: self.depth,
            bump_radius: self.bump_radius,
            bump_center: self.bump_center.clone(),
            h: self.h,
            tolerance: self.tolerance,
            max_retries: self.max_retries,
            out_dir: self.out_dir.clone(),
            svg: self.svg.then_some(true),
            edge_list: self.edge_list.then_some(true),
        };
        Ok(base.overlay(flags))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample simple d-regular digraphs to JSON (and optional edge lists)
    Sample(Overrides),
    /// Eigenvalues of sampled adjacency matrices with law comparisons
    Esd(Overrides),
    /// Resolvent trace deviations, Q_I/Q_O, Ward audit, singular profile
    Locallaw(Overrides),
    /// Solve the self-consistent equation over a (z, w) grid
    Mcurve(Overrides),
    /// Singular-value profiles of A - wI
    SvHist(Overrides),
    /// Numerical check of Girko's identity with a Gaussian bump
    GirkoCheck(Overrides),
    /// Switching involution statistics around a center vertex
    SwitchTest(Overrides),
    /// Tree Green's function: dense oracle vs recursion report
    TreeCheck(Overrides),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, overrides) = match &cli.command {
        Command::Sample(o) => ("sample", o),
        Command::Esd(o) => ("esd", o),
        Command::Locallaw(o) => ("locallaw", o),
        Command::Mcurve(o) => ("mcurve", o),
        Command::SvHist(o) => ("sv-hist", o),
        Command::GirkoCheck(o) => ("girko-check", o),
        Command::SwitchTest(o) => ("switch-test", o),
        Command::TreeCheck(o) => ("tree-check", o),
    };
    match run(name, overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// Marker for failures of numerical checks (exit code 3).
#[derive(Debug)]
struct NumericalFailure(String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<NumericalFailure>().is_some() {
            return 3;
        }
        if let Some(core) = cause.downcast_ref::<okm_core::Error>() {
            use okm_core::Error::*;
            return match core {
                BranchAmbiguity { .. } | NonHerglotz { .. } | DegenerateDenominator { .. }
                | SingularMatrix | SingularPivot { .. } | SingularBlock { .. }
                | EigFailure { .. } | GridTooCoarse { .. } | Lapack { .. } => 3,
                _ => 2,
            };
        }
    }
    2
}

fn run(name: &'static str, overrides: &Overrides) -> Result<()> {
    let cfg = overrides.resolve()?;
    let dir = cfg.out_dir().join(format!("{name}-{}", cfg.hash(name)));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    match name {
        "sample" => run_sample(&cfg, &dir)?,
        "esd" => run_esd(&cfg, &dir)?,
        "locallaw" => run_locallaw(&cfg, &dir)?,
        "mcurve" => run_mcurve(&cfg, &dir)?,
        "sv-hist" => run_svhist(&cfg, &dir)?,
        "girko-check" => run_girko(&cfg, &dir)?,
        "switch-test" => run_switchtest(&cfg, &dir)?,
        "tree-check" => run_treecheck(&cfg, &dir)?,
        _ => unreachable!(),
    }
    write_manifest(&dir, name, &cfg)?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn sample_graph(cfg: &ExperimentConfig, seed: u64) -> Result<Digraph> {
    let retries = cfg.max_retries.unwrap_or(100_000);
    Ok(sample_simple(cfg.n(), cfg.d(), seed, retries)?)
}

fn run_sample(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    for seed in cfg.seeds() {
        let g = sample_graph(cfg, seed)?;
        let json = serde_json::to_string(&g)?;
        std::fs::write(dir.join(format!("graph-{seed}.json")), json)?;
        if cfg.edge_list.unwrap_or(false) {
            std::fs::write(dir.join(format!("graph-{seed}.csv")), g.to_edge_list_csv())?;
        }
    }
    Ok(())
}

/// Summary serialized next to the per-seed eigenvalue CSV.
#[derive(serde::Serialize)]
struct EsdSummary {
    n: usize,
    d: usize,
    seed: u64,
    trivial_value: C64,
    nontrivial_radius: f64,
    radial_ks: f64,
    second_moment_nontrivial: f64,
    second_moment_limit: f64,
}

impl From<&EsdReport> for EsdSummary {
    fn from(r: &EsdReport) -> Self {
        EsdSummary {
            n: r.n,
            d: r.d,
            seed: r.seed,
            trivial_value: r.trivial_value,
            nontrivial_radius: r.nontrivial_radius,
            radial_ks: r.radial_ks,
            second_moment_nontrivial: r.second_moment_nontrivial,
            second_moment_limit: r.second_moment_limit,
        }
    }
}

fn run_esd(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    for seed in cfg.seeds() {
        let g = sample_graph(cfg, seed)?;
        let report = okm_core::girko::esd_report(&g, seed)?;
        let mut wtr = csv::Writer::from_path(dir.join(format!("eigenvalues-{seed}.csv")))?;
        wtr.write_record(["eig_re", "eig_im"])?;
        for l in &report.eigenvalues {
            wtr.write_record([format!("{:.17e}", l.re), format!("{:.17e}", l.im)])?;
        }
        wtr.flush()?;
        std::fs::write(
            dir.join(format!("summary-{seed}.json")),
            serde_json::to_string_pretty(&EsdSummary::from(&report))?,
        )?;
        if cfg.svg.unwrap_or(false) {
            std::fs::write(
                dir.join(format!("esd-{seed}.svg")),
                esd_svg(&report.eigenvalues, cfg.d()),
            )?;
        }
    }
    Ok(())
}

/// Best-effort scatter of the spectrum with the sqrt(d) disk overlaid.
fn esd_svg(eigs: &[C64], d: usize) -> String {
    let r = (d as f64).sqrt();
    let scale = 120.0;
    let half = (d as f64 + 1.0).sqrt() * scale;
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.1} {:.1} {:.1} {:.1}\">\n",
        -half,
        -half,
        2.0 * half,
        2.0 * half
    ));
    s.push_str(&format!(
        "<circle cx=\"0\" cy=\"0\" r=\"{:.2}\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n",
        r * scale
    ));
    for l in eigs {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.6\" fill=\"#1f5fa8\" fill-opacity=\"0.6\"/>\n",
            l.re * scale,
            -l.im * scale
        ));
    }
    s.push_str("</svg>\n");
    s
}

const LAW_HEADER: [&str; 15] = [
    "n", "d", "seed", "z_re", "z_im", "w_re", "w_im", "trace_dev", "q_i_re", "q_i_im", "q_o_re",
    "q_o_im", "ward_max", "s1", "log_potential",
];

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn run_locallaw(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let zs = cfg.z_grid()?;
    let ws = cfg.w_list()?;
    let seeds = cfg.seeds();
    let d = cfg.d() as u32;
    let mut wtr = csv::Writer::from_path(dir.join("locallaw.csv"))?;
    wtr.write_record(LAW_HEADER)?;
    for seed in seeds {
        let g = sample_graph(cfg, seed)?;
        for &w in &ws {
            let prof = singular_profile(&g, w)?;
            // each (z, w) evaluation is one independent inversion
            let rows: Vec<(C64, f64, C64, C64, f64)> = zs
                .par_iter()
                .map(|&z| {
                    let sol = solve_m_infty(&SpectralPoint::scaled(z, w, d).unwrap()).unwrap();
                    let green = green_full(&g, z, w, okm_core::selfconsistent::Convention::Scaled)
                        .unwrap();
                    let n = g.n_vertices();
                    let mut diag = C64::new(0.0, 0.0);
                    for i in 0..n {
                        diag += green[[i, i]];
                    }
                    diag /= n as f64;
                    let q = q_parameters_from_green(&g, &green).unwrap();
                    let ward = ward_violation_of_green(&green, z);
                    (z, (diag - sol.mt_d).norm(), q.q_i, q.q_o, ward)
                })
                .collect();
            for (z, dev, qi, qo, ward) in rows {
                wtr.write_record([
                    cfg.n().to_string(),
                    cfg.d().to_string(),
                    seed.to_string(),
                    fmt(z.re),
                    fmt(z.im),
                    fmt(w.re),
                    fmt(w.im),
                    fmt(dev),
                    fmt(qi.re),
                    fmt(qi.im),
                    fmt(qo.re),
                    fmt(qo.im),
                    fmt(ward),
                    fmt(prof.s1),
                    fmt(prof.log_potential),
                ])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

fn run_mcurve(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let zs = cfg.z_grid()?;
    let ws = cfg.w_list()?;
    let d = cfg.d() as u32;
    let mut wtr = csv::Writer::from_path(dir.join("mcurve.csv"))?;
    wtr.write_record([
        "z_re", "z_im", "w_re", "w_im", "d", "m_re", "m_im", "x", "y", "sg1", "sg2", "residual",
    ])?;
    for &w in &ws {
        let rows: Vec<_> = zs
            .par_iter()
            .map(|&z| {
                let sol = solve_m_infty(&SpectralPoint::scaled(z, w, d)?)?;
                Ok::<_, okm_core::Error>((z, sol))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for (z, sol) in rows {
            wtr.write_record([
                fmt(z.re),
                fmt(z.im),
                fmt(w.re),
                fmt(w.im),
                d.to_string(),
                fmt(sol.m_infty.re),
                fmt(sol.m_infty.im),
                fmt(sol.x),
                fmt(sol.y),
                fmt(sol.sg1),
                fmt(sol.sg2),
                fmt(sol.residual),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn run_svhist(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let ws = cfg.w_list()?;
    let mut law = csv::Writer::from_path(dir.join("svprofile.csv"))?;
    law.write_record(LAW_HEADER)?;
    let mut values = csv::Writer::from_path(dir.join("singular-values.csv"))?;
    values.write_record(["n", "d", "seed", "w_re", "w_im", "index", "sigma"])?;
    for seed in cfg.seeds() {
        let g = sample_graph(cfg, seed)?;
        for &w in &ws {
            let prof = singular_profile(&g, w)?;
            law.write_record([
                cfg.n().to_string(),
                cfg.d().to_string(),
                seed.to_string(),
                String::new(),
                String::new(),
                fmt(w.re),
                fmt(w.im),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt(prof.s1),
                fmt(prof.log_potential),
            ])?;
            for (i, s) in prof.singular_values.iter().enumerate() {
                values.write_record([
                    cfg.n().to_string(),
                    cfg.d().to_string(),
                    seed.to_string(),
                    fmt(w.re),
                    fmt(w.im),
                    i.to_string(),
                    fmt(*s),
                ])?;
            }
        }
    }
    law.flush()?;
    values.flush()?;
    Ok(())
}

fn run_girko(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let d = cfg.d();
    let radius = cfg.bump_radius.unwrap_or(1.2 * (d as f64).sqrt());
    let center = match &cfg.bump_center {
        Some(s) => parse_complex(s)?,
        None => C64::new(0.0, 0.0),
    };
    let h = cfg.h.unwrap_or(0.2);
    let bump = RadialBump::gaussian(center, radius);
    let mut out = std::fs::File::create(dir.join("girko.json"))?;
    let mut reports = Vec::new();
    for seed in cfg.seeds() {
        let g = sample_graph(cfg, seed)?;
        let coarse = girko_identity_check(&g, &[bump.clone()], 2.0 * h, cfg.tolerance)?;
        let fine = girko_identity_check(&g, &[bump.clone()], h, cfg.tolerance)?;
        println!(
            "seed {seed}: lhs {:.6} rhs {:.6} rel {:.3e} (h={h}); coarse rel {:.3e} (h={})",
            fine.lhs,
            fine.rhs,
            fine.relative_discrepancy,
            coarse.relative_discrepancy,
            2.0 * h
        );
        reports.push(serde_json::json!({
            "seed": seed,
            "coarse": coarse,
            "fine": fine,
        }));
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
    Ok(())
}

fn run_switchtest(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let ell = cfg.ell.unwrap_or(1);
    let r_chi = cfg.r_chi.unwrap_or(1);
    let trials = cfg.trials.unwrap_or(100);
    let mut reports = Vec::new();
    for seed in cfg.seeds() {
        let g = sample_graph(cfg, seed)?;
        let center = (seed as usize) % cfg.n();
        let stats = switch_statistics(&g, center, ell, r_chi, trials, seed)?;
        println!(
            "seed {seed}: mu {} zero-chi mean {:.1} valid mean {:.1} violations {}",
            stats.mu, stats.zero_chi_mean, stats.valid_mean, stats.simplicity_violations
        );
        reports.push(serde_json::json!({"seed": seed, "center": center, "stats": stats}));
    }
    std::fs::write(dir.join("switch-test.json"), serde_json::to_string_pretty(&reports)?)?;
    Ok(())
}

fn run_treecheck(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
    let d = cfg.d();
    let depth = cfg.depth.unwrap_or(4);
    let z = C64::new(0.4, 0.8);
    let w = cfg.w_list()?[0];
    let sol = solve_m_infty(&SpectralPoint::scaled(z, w, d as u32)?)?;
    let m = sol.m_infty;
    let mut worst_dense = 0.0f64;
    let mut worst_fixed = 0.0f64;
    let mut worst_sums = 0.0f64;
    let mut worst_path = 0.0f64;
    for k in 1..=depth {
        // dense oracle only when affordable
        let t1 = build_tree(TreeKind::T1, k, d)?;
        let dense_ok = 2 * t1.n_vertices() <= 2000;
        let e1 = ext_i(&t1, m, m, z, w)?;
        if dense_ok {
            let g1 = green_dense(&e1)?;
            let n1 = t1.n_vertices();
            let blk = root_entries_recursive(TreeKind::T1, z, w, d as u32)?;
            worst_dense = worst_dense
                .max((g1[[0, 0]] - blk[0][0]).norm())
                .max((g1[[n1, n1]] - blk[1][1]).norm());
            let oracle = tree_green_elimination(&e1, &t1)?;
            for v in 0..n1 {
                for a in 0..2 {
                    for b in 0..2 {
                        worst_dense = worst_dense
                            .max((oracle.row_root[v][a][b] - g1[[a * n1, v + b * n1]]).norm());
                    }
                }
            }
            for v in 0..n1 {
                for o in [0usize, 1] {
                    let p = path_entry(&e1, &t1, n1, v + o * n1)?;
                    worst_path = worst_path.max((p.value - g1[[n1, v + o * n1]]).norm());
                }
            }
        }
        worst_fixed = worst_fixed
            .max((y_ik(m, m, k, d, z, w)? - m).norm())
            .max((y_ok(m, m, k, d, z, w)? - m).norm());
        let sums = boundary_sums(k, d as u32, z, w)?;
        worst_sums = worst_sums
            .max((sums.a1_power - sums.a1_direct).abs())
            .max((sums.a2_power - sums.a2_direct).abs());
    }
    let report = serde_json::json!({
        "d": d,
        "depth": depth,
        "z": z,
        "w": w,
        "max_dense_vs_recursive": worst_dense,
        "max_fixed_point_residual": worst_fixed,
        "max_boundary_sum_gap": worst_sums,
        "max_path_factorization_gap": worst_path,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    std::fs::write(dir.join("tree-check.json"), serde_json::to_string_pretty(&report)?)?;
    let tol = cfg.tolerance.unwrap_or(1e-10);
    if worst_dense > tol || worst_fixed > tol || worst_sums > tol || worst_path > tol {
        return Err(NumericalFailure(format!(
            "tree-check deviations exceed {tol}: dense {worst_dense:.2e}, fixed {worst_fixed:.2e}, sums {worst_sums:.2e}, paths {worst_path:.2e}"
        ))
        .into());
    }
    Ok(())
}
