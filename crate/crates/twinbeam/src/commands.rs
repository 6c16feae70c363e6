//! The four analysis commands behind the command-line tool and the larger
//! examples: closed-form sweeps, correlation measurement, shift scans of the
//! noise-reduction factor, and differential imaging with benchmarks.
//!
//! Every command reads one scenario, writes CSV/PGM results plus a
//! `run_manifest.txt` into its output directory, and is bit-reproducible for
//! a fixed scenario and seed.

use ndarray::Array2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analytic::{
    correlation_fwhm_um, improvement_ratio, sigma_max, snr_classical, snr_differential, snr_sql,
    ObjectParams, TwoModeStats,
};
use crate::config::Scenario;
use crate::error::{Result, TwinError};
use crate::estimate::{
    estimate_gamma12, estimate_sigma, estimate_snr, generate_classical_frames, EstimatorOptions,
    SnrReport,
};
use crate::output::{csv_cell, write_pgm, Manifest};
use crate::pixel::{write_frames_csv, DetectorSpec, PixelFrame};
use crate::runner::{bin_with_detector, rng_for, Purpose, TrajectoryEngine};
use crate::Estimate;

/// Resolved run parameters shared by all commands.
#[derive(Debug, Clone)]
pub struct CommandContext {
    pub scenario: Scenario,
    /// Directory of the scenario file; resolves relative mask paths.
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub trajectories: usize,
    pub paper_scale: bool,
}

impl CommandContext {
    /// Loads a scenario and applies command-line overrides.  `paper_scale`
    /// swaps in the scenario's paper-scale ensemble size before overrides.
    pub fn new(
        scenario_path: &Path,
        out_dir: PathBuf,
        seed_override: Option<u64>,
        trajectory_override: Option<usize>,
        paper_scale: bool,
    ) -> Result<Self> {
        let scenario = Scenario::load(scenario_path)?;
        let base_dir = scenario_path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut trajectories = scenario.ensemble.trajectories;
        if paper_scale {
            trajectories = scenario.ensemble.paper_trajectories.ok_or_else(|| {
                TwinError::Config(
                    "paper scale requested but the scenario sets no ensemble.paper_trajectories"
                        .into(),
                )
            })?;
        }
        if let Some(n) = trajectory_override {
            trajectories = n;
        }
        let seed = seed_override.unwrap_or(scenario.ensemble.seed);
        std::fs::create_dir_all(&out_dir)?;
        Ok(Self { scenario, base_dir, out_dir, seed, trajectories, paper_scale })
    }

    fn engine(&self) -> Result<TrajectoryEngine> {
        let engine = TrajectoryEngine::from_scenario(&self.scenario, &self.base_dir)?;
        if self.paper_scale {
            eprintln!(
                "paper-scale ensemble: {} trajectories, roughly {:.0} s of field generation \
                 on one core",
                self.trajectories,
                engine.estimated_seconds(self.trajectories)
            );
        }
        Ok(engine)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.out_dir.join(name))?))
    }

    fn finish(&self, command: &str, ensemble: usize, started: Instant) -> Result<()> {
        Manifest {
            command: command.into(),
            scenario_hash: self.scenario.hash(),
            seed: self.seed,
            trajectories: ensemble,
            wall_seconds: started.elapsed().as_secs_f64(),
        }
        .write(&self.out_dir)?;
        Ok(())
    }
}

/// Value/stderr cell pair for a bootstrap estimate; `NA,NA` when absent.
fn est_pair(e: Option<Estimate>) -> String {
    match e {
        Some(e) if e.value.is_finite() => {
            format!("{},{}", csv_cell(Some(e.value)), csv_cell(Some(e.stderr)))
        }
        _ => "NA,NA".to_string(),
    }
}

/// Value/stderr cell pair for an exact closed-form number (stderr 0).
fn exact_pair(v: f64) -> String {
    if v.is_finite() {
        format!("{},0", csv_cell(Some(v)))
    } else {
        "NA,NA".to_string()
    }
}

fn default_if_empty(values: &[f64], fallback: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        fallback.to_vec()
    } else {
        values.to_vec()
    }
}

/// Tabulates the closed-form noise and SNR formulas over the scenario's
/// sweep grid (noise reduction x absorption x excess noise).  Purely
/// analytic: no fields are generated, stderr cells are zero.
pub fn cmd_analytic(ctx: &CommandContext) -> Result<()> {
    let started = Instant::now();
    let sweep = &ctx.scenario.sweep;
    let sigmas = default_if_empty(&sweep.sigmas, &[0.02, 0.05, 0.1, 0.2, 0.5, 1.0]);
    let alphas = default_if_empty(&sweep.alphas, &[0.01, 0.02, 0.04, 0.1, 0.2]);
    let excess = default_if_empty(&sweep.excess, &[0.0, 0.5, 2.0, 10.0, 100.0]);
    let mean_n = sweep.mean_photons.unwrap_or(3500.0);

    let mut w = ctx.create("analytic.csv")?;
    writeln!(
        w,
        "sigma,alpha,excess_noise,mean_photons,snr_differential,snr_differential_stderr,\
         snr_classical,snr_classical_stderr,snr_sql,snr_sql_stderr,\
         improvement_ratio,improvement_ratio_stderr,sigma_max,sigma_max_stderr"
    )?;
    for &s in &sigmas {
        for &a in &alphas {
            for &e in &excess {
                let stats = TwoModeStats::new(mean_n, e, s)?;
                let obj = ObjectParams::new(a)?;
                writeln!(
                    w,
                    "{s},{a},{e},{mean_n},{},{},{},{},{}",
                    exact_pair(snr_differential(&stats, &obj)),
                    exact_pair(snr_classical(mean_n, e, &obj)),
                    exact_pair(snr_sql(mean_n, &obj)),
                    exact_pair(improvement_ratio(&stats, &obj)),
                    exact_pair(sigma_max(&obj, e)?),
                )?;
            }
        }
    }
    drop(w);
    ctx.finish("analytic", 0, started)
}

/// Measures the pair-correlation profile along the walk-off axis plus the
/// noise-reduction factor on the configured detector, and compares the
/// correlation width against the low-gain pump-optics prediction.
pub fn cmd_correlation(ctx: &CommandContext) -> Result<()> {
    let started = Instant::now();
    let engine = ctx.engine()?;
    let opts = EstimatorOptions { seed: ctx.seed, ..EstimatorOptions::default() };
    let cells = engine.generate_cell_frames(ctx.trajectories, ctx.seed)?;
    let max_offset = ctx.scenario.sweep.max_offset_cells.unwrap_or(8);
    let gamma = estimate_gamma12(&cells, max_offset, &opts)?;
    let pixels = engine.bin_ensemble(&cells, ctx.seed)?;
    let sigma = estimate_sigma(&pixels, &opts)?;

    let mut w = ctx.create("correlation.csv")?;
    writeln!(w, "offset_um,gamma,gamma_stderr")?;
    for sample in &gamma.gamma12 {
        writeln!(w, "{},{}", sample.offset_um, est_pair(Some(sample.gamma)))?;
    }
    drop(w);

    let predicted = correlation_fwhm_um(
        ctx.scenario.pump.waist_um,
        ctx.scenario.optics.focal_um,
        ctx.scenario.pump.wavelength_um,
    );
    let mut s = ctx.create("summary.txt")?;
    writeln!(s, "trajectories = {}", ctx.trajectories)?;
    writeln!(s, "correlation_fwhm_um = {}", est_pair(gamma.fwhm_um).replace(',', " +- "))?;
    writeln!(s, "low_gain_predicted_fwhm_um = {predicted:.4}")?;
    writeln!(s, "sigma = {}", est_pair(sigma.sigma).replace(',', " +- "))?;
    writeln!(s, "excess_noise = {}", est_pair(sigma.excess_noise).replace(',', " +- "))?;
    writeln!(
        s,
        "mean_counts_per_pixel = {:.4} {:.4}",
        sigma.mean_counts.0, sigma.mean_counts.1
    )?;
    drop(s);
    ctx.finish("correlation", ctx.trajectories, started)
}

/// Scans the noise-reduction factor against a transverse misplacement of the
/// assumed symmetry centre.  Fields are generated once and re-binned per
/// shift, so the scan isolates the purely geometric pairing error.
pub fn cmd_sigma_scan(ctx: &CommandContext) -> Result<()> {
    let started = Instant::now();
    let engine = ctx.engine()?;
    let opts = EstimatorOptions { seed: ctx.seed, ..EstimatorOptions::default() };
    let cells = engine.generate_cell_frames(ctx.trajectories, ctx.seed)?;
    let shifts =
        default_if_empty(&ctx.scenario.sweep.x_shift_um, &[0.0, 5.0, 10.0, 15.0, 20.0, 25.0]);
    let d = &ctx.scenario.detector;

    let mut w = ctx.create("sigma_scan.csv")?;
    writeln!(
        w,
        "x_shift_um,snapped_shift_um,sigma,sigma_stderr,excess_noise,excess_noise_stderr,\
         mean_counts1,mean_counts2"
    )?;
    for &shift in &shifts {
        let det = DetectorSpec::new(
            d.pixel_pitch_um,
            d.binning,
            d.eta1,
            d.eta2,
            shift,
            d.background_var,
        )?;
        let geometry = det.geometry(&cells[0])?;
        let frames = bin_with_detector(&cells, &det, ctx.seed)?;
        let report = estimate_sigma(&frames, &opts)?;
        writeln!(
            w,
            "{shift},{},{},{},{:.6},{:.6}",
            geometry.snapped_shift_um,
            est_pair(report.sigma),
            est_pair(report.excess_noise),
            report.mean_counts.0,
            report.mean_counts.1
        )?;
    }
    drop(w);
    ctx.finish("sigma-scan", ctx.trajectories, started)
}

/// Improvement of the differential SNR over its coherent-light benchmark,
/// as an [`Estimate`]; absent when either aggregate is.
pub fn improvement_vs_sql(report: &SnrReport) -> Option<Estimate> {
    let a = report.aggregate?;
    let sql = report.sql_aggregate?;
    if sql <= 0.0 {
        return None;
    }
    Some(Estimate::new(a.value / sql, a.stderr / sql))
}

/// Runs the differential absorption-imaging experiment: twin-beam ensemble
/// through the configured object, per-pixel and aggregate SNR, a matched
/// split-coherent-beam benchmark, retrieved images, and improvement ratios.
pub fn cmd_image(ctx: &CommandContext) -> Result<()> {
    let started = Instant::now();
    let engine = ctx.engine()?;
    let mask = ctx
        .scenario
        .object_mask(&ctx.base_dir)?
        .ok_or_else(|| TwinError::Config("the image command needs an [object] section".into()))?;
    let opts = EstimatorOptions { seed: ctx.seed, ..EstimatorOptions::default() };

    let cells = engine.generate_cell_frames(ctx.trajectories, ctx.seed)?;
    let pixels = engine.bin_ensemble(&cells, ctx.seed)?;
    let geometry = engine.detector().geometry(&cells[0])?;
    let alpha_px = mask.pixel_average(geometry.cells_y, geometry.cells_x)?;
    let quantum = estimate_snr(&pixels, &alpha_px, &opts)?;

    // Matched classical benchmark: split coherent beams whose no-object flux
    // reproduces the measured per-arm means.  Arm one's measured mean is
    // already attenuated by (1 - alpha), so divide it back out.
    let (mean1, mean2) = per_arm_means(&pixels);
    let mut mean1_unobstructed = mean1.clone();
    for ((j, i), m) in mean1_unobstructed.indexed_iter_mut() {
        let t = 1.0 - alpha_px[[j, i]];
        if t > 0.0 {
            *m /= t;
        }
    }
    let mut classical_rng = rng_for(ctx.seed, 0, 0, Purpose::Classical);
    let classical_frames = generate_classical_frames(
        &mean1_unobstructed,
        &mean2,
        &alpha_px,
        pixels.len(),
        &mut classical_rng,
    )?;
    let classical = estimate_snr(&classical_frames, &alpha_px, &opts)?;

    write_snr_csv(ctx, &alpha_px, &quantum, &classical)?;
    write_image_triplet(ctx, &alpha_px, &pixels[0], &mean2)?;

    let mut s = ctx.create("summary.txt")?;
    writeln!(s, "trajectories = {}", ctx.trajectories)?;
    writeln!(s, "snr_differential = {}", est_pair(quantum.aggregate).replace(',', " +- "))?;
    writeln!(s, "snr_classical = {}", est_pair(classical.aggregate).replace(',', " +- "))?;
    writeln!(s, "snr_sql = {}", csv_cell(quantum.sql_aggregate))?;
    writeln!(
        s,
        "improvement_vs_sql = {}",
        est_pair(improvement_vs_sql(&quantum)).replace(',', " +- ")
    )?;
    writeln!(
        s,
        "improvement_vs_classical = {}",
        est_pair(quantum.improvement_vs(&classical)).replace(',', " +- ")
    )?;
    drop(s);

    if ctx.scenario.output.write_frames {
        let mut w = ctx.create("frames.csv")?;
        write_frames_csv(&pixels, &mut w)?;
    }
    if ctx.scenario.output.dump_first_field {
        let fields = engine.detection_fields(ctx.seed, 0, 0)?;
        let mut w = ctx.create("first_trajectory_fields.bin")?;
        fields.write_binary(&mut w, ctx.seed)?;
    }
    ctx.finish("image", ctx.trajectories, started)
}

fn per_arm_means(pixels: &[PixelFrame]) -> (Array2<f64>, Array2<f64>) {
    let (npy, npx) = pixels[0].shape();
    let mut mean1 = Array2::<f64>::zeros((npy, npx));
    let mut mean2 = Array2::<f64>::zeros((npy, npx));
    for frame in pixels {
        mean1 += frame.counts1();
        mean2 += frame.counts2();
    }
    let inv = 1.0 / pixels.len() as f64;
    mean1.mapv_inplace(|v| v * inv);
    mean2.mapv_inplace(|v| v * inv);
    (mean1, mean2)
}

fn write_snr_csv(
    ctx: &CommandContext,
    alpha_px: &Array2<f64>,
    quantum: &SnrReport,
    classical: &SnrReport,
) -> Result<()> {
    let mut w = ctx.create("snr.csv")?;
    writeln!(
        w,
        "pixel_x,pixel_y,alpha,mean_flux,snr,snr_stderr,snr_classical,snr_classical_stderr"
    )?;
    let (npy, npx) = alpha_px.dim();
    let cell = |v: f64| csv_cell(if v.is_finite() { Some(v) } else { None });
    for j in 0..npy {
        for i in 0..npx {
            writeln!(
                w,
                "{i},{j},{},{:.6},{},{},{},{}",
                alpha_px[[j, i]],
                quantum.mean_flux[[j, i]],
                cell(quantum.per_pixel[[j, i]]),
                cell(quantum.per_pixel_stderr[[j, i]]),
                cell(classical.per_pixel[[j, i]]),
                cell(classical.per_pixel_stderr[[j, i]]),
            )?;
        }
    }
    Ok(())
}

/// One transmission image triplet from a single shot: the ground truth, the
/// direct single-arm retrieval `1 - N1/<N2>`, and the differential retrieval
/// `(N2 - N1)/<N2>`.  All three share one linear gray scale spanning
/// `[0, max truth alpha]`, so their noise textures are directly comparable.
fn write_image_triplet(
    ctx: &CommandContext,
    alpha_px: &Array2<f64>,
    shot: &PixelFrame,
    mean2: &Array2<f64>,
) -> Result<()> {
    let (npy, npx) = alpha_px.dim();
    let mut direct = Array2::<f64>::zeros((npy, npx));
    let mut differential = Array2::<f64>::zeros((npy, npx));
    for j in 0..npy {
        for i in 0..npx {
            let reference = mean2[[j, i]];
            if reference > 0.0 {
                direct[[j, i]] = 1.0 - shot.counts1()[[j, i]] / reference;
                differential[[j, i]] =
                    (shot.counts2()[[j, i]] - shot.counts1()[[j, i]]) / reference;
            }
        }
    }
    let hi = alpha_px.iter().cloned().fold(0.0f64, f64::max).max(1e-12);
    write_pgm(&ctx.out_dir.join("object_truth.pgm"), alpha_px, 0.0, hi)?;
    write_pgm(&ctx.out_dir.join("retrieved_direct.pgm"), &direct, 0.0, hi)?;
    write_pgm(&ctx.out_dir.join("retrieved_differential.pgm"), &differential, 0.0, hi)?;
    Ok(())
}
