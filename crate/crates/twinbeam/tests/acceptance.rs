//! Acceptance suite: measures every advertised figure of merit at its stated
//! tolerance and prints one PASS/FAIL verdict line per criterion.  All
//! criteria run even when earlier ones fail; the process exits non-zero if
//! any failed.
//!
//! Heavy field ensembles are generated once and re-analyzed under several
//! detector layouts, so the whole suite stays within minutes on one core.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use twinbeam::analytic::{
    correlation_fwhm_um, improvement_ratio, ArmEfficiencies, ModeBudget, ObjectParams,
    TwoModeStats,
};
use twinbeam::commands::improvement_vs_sql;
use twinbeam::crystal::CrystalSpec;
use twinbeam::error::TwinError;
use twinbeam::estimate::{
    estimate_gamma12, estimate_sigma, estimate_snr, generate_classical_frames, EstimatorOptions,
};
use twinbeam::field::sample_vacuum;
use twinbeam::grid::GridSpec;
use twinbeam::object::ObjectMask;
use twinbeam::oracle::{predict, two_mode_oracle, OracleConfig};
use twinbeam::pixel::{CellFrame, DetectorSpec};
use twinbeam::propagate::Propagator;
use twinbeam::pump::PumpSpec;
use twinbeam::pwp::pwp_gains;
use twinbeam::runner::{bin_with_detector, merge_groups, TrajectoryEngine};
use twinbeam::{Arm, Estimate};

#[derive(Default)]
struct Suite {
    total: usize,
    failures: Vec<String>,
}

impl Suite {
    fn record(&mut self, name: &str, pass: bool, detail: &str) {
        self.total += 1;
        println!("{}: {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures.push(format!("{name}: {detail}"));
        }
    }

    /// Runs one criterion, trapping panics so the rest of the suite still
    /// reports.
    fn criterion(
        &mut self,
        name: &str,
        body: impl FnOnce() -> twinbeam::Result<(bool, String)>,
    ) {
        match catch_unwind(AssertUnwindSafe(body)) {
            Ok(Ok((pass, detail))) => self.record(name, pass, &detail),
            Ok(Err(e)) => self.record(name, false, &format!("errored: {e}")),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                self.record(name, false, &format!("panicked: {msg}"));
            }
        }
    }
}

/// The canonical hardware: 1.5 mm pump waist, 5 ps pulse, 4 mm BBO, 5 cm
/// far-field lens, 64x64 transverse cells mapping to a 5 um detection
/// raster, one 5 ps temporal window of 8 modes.
fn engine(gain: f64, eta: f64, pitch_um: f64, mask: Option<ObjectMask>) -> TrajectoryEngine {
    let grid = GridSpec::new(64, 64, 8, 110.0, 110.0, 0.625).unwrap();
    let pump = PumpSpec::new(1500.0, 5.0, gain, 0.704).unwrap();
    let crystal = CrystalSpec::bbo_type2_704();
    let det = DetectorSpec::new(pitch_um, 1, eta, eta, 0.0, 0.0).unwrap();
    TrajectoryEngine::new(grid, pump, crystal, det, mask, 50_000.0, 16).unwrap()
}

fn opts() -> EstimatorOptions {
    EstimatorOptions::default()
}

fn missing(what: &str) -> TwinError {
    TwinError::Estimation(format!("{what} was not estimable"))
}

/// Weighted least-squares slope of y on x with 1-sigma y errors.
fn wls_slope(points: &[(f64, f64, f64)]) -> (f64, f64) {
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, se) in points {
        let w = 1.0 / (se * se);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let delta = sw * sxx - sx * sx;
    ((sw * sxy - sx * sy) / delta, (sw / delta).sqrt())
}

fn alpha_map(mask: &ObjectMask, det: &DetectorSpec, cells: &CellFrame) -> twinbeam::Result<Array2<f64>> {
    let geometry = det.geometry(cells)?;
    mask.pixel_average(geometry.cells_y, geometry.cells_x)
}

fn improvement_at(
    pool: &[CellFrame],
    mask: &ObjectMask,
    det: &DetectorSpec,
    seed: u64,
) -> twinbeam::Result<Estimate> {
    let pixels = bin_with_detector(pool, det, seed)?;
    let alpha_px = alpha_map(mask, det, &pool[0])?;
    let report = estimate_snr(&pixels, &alpha_px, &opts())?;
    improvement_vs_sql(&report).ok_or_else(|| missing("the improvement ratio"))
}

fn main() {
    let mut suite = Suite::default();
    let wall = Instant::now();

    // --- closed-form layer ------------------------------------------------

    suite.criterion("closed-form improvement ratio at the reference point", || {
        let t0 = Instant::now();
        let stats = TwoModeStats::new(3500.0, 0.5, 0.1)?;
        let obj = ObjectParams::new(0.04)?;
        let ratio = improvement_ratio(&stats, &obj);
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            (ratio - 2.90).abs() <= 0.01 && secs < 1.0,
            format!("measured {ratio:.4} vs required 2.90 +- 0.01 (in {secs:.4} s, limit 1 s)"),
        ))
    });

    suite.criterion("counting-model oracle vs closed form", || {
        let t0 = Instant::now();
        let config = OracleConfig::new(
            1.45,
            &ModeBudget::new(958.0)?,
            ArmEfficiencies::balanced(0.9)?,
            ObjectParams::new(0.04)?,
            100_000,
        )?;
        let truth = predict(&config);
        let run = two_mode_oracle(&config, 4242);
        let moments = [
            ("<N1>", run.mean_n1, truth.mean_n1),
            ("<N2>", run.mean_n2, truth.mean_n2),
            ("sigma", run.sigma, truth.sigma),
            ("E_n", run.excess_noise, truth.excess_noise),
            ("SNR", run.snr, truth.snr),
            ("R", run.improvement, truth.improvement),
        ];
        let mut worst = (0.0f64, "");
        for (name, est, want) in moments {
            let z = ((est.value - want) / est.stderr).abs();
            if z > worst.0 {
                worst = (z, name);
            }
        }
        let secs = t0.elapsed().as_secs_f64();
        Ok((
            worst.0 <= 3.0 && secs < 60.0,
            format!(
                "<N1> = {:.1}, worst pull {:.2} se ({}) across 6 moments, required within \
                 3 se (in {secs:.1} s, limit 60 s)",
                run.mean_n1.value, worst.0, worst.1
            ),
        ))
    });

    // --- pair-correlation geometry ---------------------------------------

    let t_corr = Instant::now();
    let pool_low = engine(1.0, 1.0, 20.0, None)
        .generate_cell_frames(400, 103)
        .expect("low-gain pool");
    let fwhm_low = estimate_gamma12(&pool_low, 8, &opts())
        .ok()
        .and_then(|r| r.fwhm_um);
    drop(pool_low);

    suite.criterion("pair-correlation width at low gain", || {
        let analytic = correlation_fwhm_um(1500.0, 50_000.0, 0.704);
        let fwhm = fwhm_low.ok_or_else(|| missing("the correlation width"))?;
        let secs = t_corr.elapsed().as_secs_f64();
        let two_digits_ok = (analytic * 10.0).round() / 10.0 == 8.8;
        Ok((
            two_digits_ok && (fwhm.value - 11.0).abs() <= 3.0 && secs < 900.0,
            format!(
                "closed form {analytic:.3} um (required 8.8 to 2 significant figures), \
                 simulated {fwhm} um vs required 11 +- 3 um \
                 (400 trajectories on the 5 um raster in {secs:.0} s, limit 900 s)"
            ),
        ))
    });

    let pool_high = engine(4.5, 1.0, 20.0, None)
        .generate_cell_frames(400, 104)
        .expect("high-gain pool");
    let fwhm_high = estimate_gamma12(&pool_high, 8, &opts())
        .ok()
        .and_then(|r| r.fwhm_um);
    drop(pool_high);

    suite.criterion("gain broadening of the pair correlation", || {
        let low = fwhm_low.ok_or_else(|| missing("the low-gain width"))?;
        let high = fwhm_high.ok_or_else(|| missing("the high-gain width"))?;
        let ratio = high.value / low.value;
        Ok((
            ratio >= 2.0,
            format!(
                "width {high} um at gain 4.5 vs {low} um at gain 1: ratio {ratio:.2}, \
                 required >= 2"
            ),
        ))
    });

    // --- noise floor at the imaging working point -------------------------

    let engine_plain = engine(1.45, 0.9, 40.0, None);
    let pool_plain = engine_plain
        .generate_cell_frames(2000, 105)
        .expect("working-point pool");

    suite.criterion("noise-reduction factor at the 40 um working point", || {
        let pixels = engine_plain.bin_ensemble(&pool_plain, 105)?;
        let sigma = estimate_sigma(&pixels, &opts())?
            .sigma
            .ok_or_else(|| missing("sigma"))?;
        Ok((
            (sigma.value - 0.10).abs() <= 0.03,
            format!(
                "measured {sigma} vs required 0.10 +- 0.03 over 2000 trajectories \
                 (the residual floor is pixel-boundary straddling of the ~9 um pair \
                 separation; see the noise_floor example for the decomposition)"
            ),
        ))
    });
    drop(pool_plain);

    // --- high-gain fragility under misalignment ---------------------------

    let pool_hg = engine(4.15, 0.9, 20.0, None)
        .generate_cell_frames(600, 106)
        .expect("high-gain imaging pool");

    suite.criterion("high-gain fragility under detector misalignment", || {
        let shifts = [0.0, 5.0, 10.0, 20.0, 40.0, 120.0];
        let mut sigmas: Vec<Estimate> = Vec::new();
        let mut excess: Vec<Estimate> = Vec::new();
        for &shift in &shifts {
            let det = DetectorSpec::new(20.0, 1, 0.9, 0.9, shift, 0.0)?;
            let report = estimate_sigma(&bin_with_detector(&pool_hg, &det, 106)?, &opts())?;
            sigmas.push(report.sigma.ok_or_else(|| missing("sigma"))?);
            excess.push(report.excess_noise.ok_or_else(|| missing("excess noise"))?);
        }
        let aligned = sigmas[0];
        let plateau = *sigmas.last().unwrap();
        let e_n = *excess.last().unwrap();
        let beyond_shot_noise = sigmas[1..].iter().all(|s| s.value > 1.0);
        let rising = aligned.value < sigmas[1].value && sigmas[1].value < sigmas[2].value;
        let sat_gap = (plateau.value - (1.0 + e_n.value)).abs();
        let sat_se = plateau.stderr.hypot(e_n.stderr);
        Ok((
            aligned.value < 1.0 && beyond_shot_noise && rising && sat_gap <= 3.0 * sat_se,
            format!(
                "sigma {aligned} aligned (sub-shot-noise), > 1 at every scanned shift \
                 >= 5 um and rising, plateau {plateau} vs uncorrelated prediction \
                 1 + E_n = {:.1} (gap {sat_gap:.1} <= 3 x {sat_se:.1})",
                1.0 + e_n.value
            ),
        ))
    });
    drop(pool_hg);

    // --- differential imaging of a 4% absorber ----------------------------

    let t_sweep = Instant::now();
    let mask = ObjectMask::uniform(64, 64, 0.04).expect("uniform absorber");
    let engine_obj = engine(1.45, 0.9, 40.0, Some(mask.clone()));
    let pool_obj = engine_obj
        .generate_cell_frames(4000, 107)
        .expect("imaging pool");

    suite.criterion("imaging improvement on 40 um pixels", || {
        let det = DetectorSpec::new(40.0, 1, 0.9, 0.9, 0.0, 0.0)?;
        let r = improvement_at(&pool_obj, &mask, &det, 107)?;
        Ok((
            (r.value - 2.9).abs() <= 0.3,
            format!("measured {r} vs required 2.9 +- 0.3 over 4000 trajectories"),
        ))
    });

    suite.criterion("imaging improvement on 20 um pixels", || {
        let det = DetectorSpec::new(20.0, 1, 0.9, 0.9, 0.0, 0.0)?;
        let r = improvement_at(&pool_obj, &mask, &det, 107)?;
        Ok((
            (r.value - 1.9).abs() <= 0.3,
            format!("measured {r} vs required 1.9 +- 0.3 over 4000 trajectories"),
        ))
    });

    suite.criterion("SNR scaling with photon number", || {
        // Merging k consecutive frames emulates a k-fold longer pump pulse,
        // so the ensemble sweeps an 8x photon-number range at fixed optics.
        let det = DetectorSpec::new(20.0, 1, 0.9, 0.9, 0.0, 0.0)?;
        let alpha_px = alpha_map(&mask, &det, &pool_obj[0])?;
        let mut points = Vec::new();
        let mut flux_span = (f64::INFINITY, 0.0f64);
        for group in [1usize, 2, 4, 8] {
            let merged;
            let frames: &[CellFrame] = if group == 1 {
                &pool_obj
            } else {
                merged = merge_groups(&pool_obj, group)?;
                &merged
            };
            let pixels = bin_with_detector(frames, &det, 107)?;
            let report = estimate_snr(&pixels, &alpha_px, &opts())?;
            let snr = report.aggregate.ok_or_else(|| missing("the aggregate SNR"))?;
            let mean_n1: f64 = report.mean_flux.mean().unwrap_or(0.0) / 2.0;
            flux_span = (flux_span.0.min(mean_n1), flux_span.1.max(mean_n1));
            points.push(((group as f64).ln(), snr.value.ln(), snr.stderr / snr.value));
        }
        let (slope, slope_se) = wls_slope(&points);
        let secs = t_sweep.elapsed().as_secs_f64();
        Ok((
            (slope - 0.5).abs() <= 0.05 && secs < 1800.0,
            format!(
                "exponent {slope:.3} +- {slope_se:.3} vs required 0.50 +- 0.05, mean \
                 photons per pixel spanning {:.0} to {:.0} (sweep in {secs:.0} s, \
                 limit 1800 s)",
                flux_span.0, flux_span.1
            ),
        ))
    });

    suite.criterion("improvement-vs-misalignment crossing on 40 um pixels", || {
        let mut curve = Vec::new();
        for shift in [0.0, 5.0, 10.0, 15.0, 20.0, 25.0] {
            let det = DetectorSpec::new(40.0, 1, 0.9, 0.9, shift, 0.0)?;
            let r = improvement_at(&pool_obj, &mask, &det, 107)?;
            curve.push((shift, r.value));
        }
        let crossing = curve.windows(2).find_map(|w| {
            let ((x0, r0), (x1, r1)) = (w[0], w[1]);
            (r0 >= 1.0 && r1 < 1.0).then(|| x0 + (r0 - 1.0) * (x1 - x0) / (r0 - r1))
        });
        let profile: Vec<String> =
            curve.iter().map(|(x, r)| format!("R({x:.0}) = {r:.2}")).collect();
        match crossing {
            Some(x) => Ok((
                (x - 14.0).abs() <= 4.0,
                format!(
                    "crossing at {x:.1} um vs required 14 +- 4 um [{}]",
                    profile.join(", ")
                ),
            )),
            None => Ok((false, format!("no unity crossing in scan [{}]", profile.join(", ")))),
        }
    });
    drop(pool_obj);

    // --- statistical calibration ------------------------------------------

    suite.criterion("calibration: Poisson light has unit noise-reduction factor", || {
        let mean = Array2::from_elem((6, 6), 50.0);
        let clear = Array2::zeros((6, 6));
        let mut rng = ChaCha12Rng::seed_from_u64(909);
        let frames = generate_classical_frames(&mean, &mean, &clear, 3000, &mut rng)?;
        let sigma = estimate_sigma(&frames, &opts())?
            .sigma
            .ok_or_else(|| missing("sigma"))?;
        Ok((
            sigma.consistent_with(1.0, 3.0),
            format!("measured {sigma} vs 1 within 3 se (3000 independent Poisson frames)"),
        ))
    });

    suite.criterion("calibration: zero-gain propagation conserves energy", || {
        let grid = GridSpec::new(32, 32, 8, 110.0, 110.0, 0.625)?;
        let pump = PumpSpec::new(1500.0, 5.0, 1.45, 0.704)?;
        let mut prop = Propagator::new(&grid, &pump, &CrystalSpec::bbo_type2_704(), 16)?;
        let mut rng = ChaCha12Rng::seed_from_u64(910);
        let fields = sample_vacuum(&grid, &mut rng);
        let (b1, b2) = fields.wigner_intensity();
        let fields = prop.run(fields, 0.0)?;
        let (a1, a2) = fields.wigner_intensity();
        let rel = ((a1 + a2) / (b1 + b2) - 1.0).abs();
        Ok((rel <= 1e-12, format!("relative intensity change {rel:.2e}, required <= 1e-12")))
    });

    suite.criterion("calibration: plane-wave gains satisfy |U|^2 - |V|^2 = 1", || {
        let grid = GridSpec::new(32, 32, 8, 110.0, 110.0, 0.625)?;
        let gains = pwp_gains(&grid, 1.45, &CrystalSpec::bbo_type2_704())?;
        let mut worst: f64 = 0.0;
        for (u, v) in gains.u(Arm::One).iter().zip(gains.v(Arm::One).iter()) {
            worst = worst.max((u.norm_sqr() - v.norm_sqr() - 1.0).abs());
        }
        Ok((worst <= 1e-9, format!("worst deviation {worst:.2e}, required <= 1e-9")))
    });

    suite.criterion("calibration: vacuum pipeline counts average to zero", || {
        let eng = engine(0.0, 0.9, 40.0, None);
        let cells = eng.generate_cell_frames(60, 911)?;
        let pixels = eng.bin_ensemble(&cells, 911)?;
        let totals: Vec<f64> =
            pixels.iter().map(|f| f.counts1().sum() + f.counts2().sum()).collect();
        let n = totals.len() as f64;
        let mean = totals.iter().sum::<f64>() / n;
        let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        Ok((
            mean.abs() <= 3.0 * se,
            format!("mean total count {mean:.3} +- {se:.3} over 60 trajectories, required \
                     within 3 se of zero"),
        ))
    });

    suite.criterion("calibration: far-field lens conserves total intensity", || {
        let grid = GridSpec::new(32, 32, 8, 110.0, 110.0, 0.625)?;
        let mut rng = ChaCha12Rng::seed_from_u64(912);
        let fields = sample_vacuum(&grid, &mut rng);
        let (b1, b2) = fields.wigner_intensity();
        let fields = fields.to_far_field(50_000.0, 0.704)?;
        let (a1, a2) = fields.wigner_intensity();
        let rel = ((a1 + a2) / (b1 + b2) - 1.0).abs();
        Ok((rel <= 1e-10, format!("relative intensity change {rel:.2e}, required <= 1e-10")))
    });

    // --- summary ----------------------------------------------------------

    let failed = suite.failures.len();
    println!(
        "\nacceptance: {}/{} criteria passed in {:.0} s",
        suite.total - failed,
        suite.total,
        wall.elapsed().as_secs_f64()
    );
    if failed > 0 {
        println!("failed criteria:");
        for f in &suite.failures {
            println!("  {f}");
        }
        std::process::exit(1);
    }
}
