//! Ensemble estimators for correlation and imaging figures of merit.
//!
//! All estimators consume per-trajectory count frames and report standard
//! errors from bootstrap resampling.  Because Wigner-representation counts
//! carry half a photon of symmetric-ordering noise per elementary mode,
//! variances are corrected before use: a pixel collapsing `m` modes has
//! `Var_W(N) = Var(N) + m/4`, a two-pixel difference `Var_W(d) = Var(d) +
//! m/2`, while cross-covariances between distinct cells need no correction.
//! Count ensembles without Wigner residue (e.g. Poisson baselines) carry a
//! mode budget of zero and pass through uncorrected.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Result, TwinError};
use crate::pixel::{CellFrame, PixelFrame};
use crate::Estimate;

/// Common estimator knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    /// Bright-region threshold: pixels (or cells) participate when their
    /// mean flux reaches this fraction of the brightest one.  Spatial
    /// averaging assumes statistically equivalent pairs, which only holds
    /// where the beams actually shine.
    pub roi_fraction: f64,
    /// Bootstrap resample count for standard errors.
    pub resamples: usize,
    /// Seed of the bootstrap resampling stream.
    pub seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self { roi_fraction: 0.25, resamples: 200, seed: 7 }
    }
}

/// One sample of the normalized intensity-fluctuation cross-correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSample {
    /// Offset from the mirror point along the walk-off axis, um.
    pub offset_um: f64,
    pub gamma: Estimate,
}

/// Results of the correlation estimators; fields are filled by whichever
/// estimator produced the report and left empty otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// Noise-reduction factor `sigma = Var(N2 - N1) / <N1 + N2>`.
    pub sigma: Option<Estimate>,
    /// Excess noise `E_n = (Var(N1) - <N1>) / <N1>`, zero for Poisson light.
    pub excess_noise: Option<Estimate>,
    /// Cross-correlation samples along the walk-off axis.
    pub gamma12: Vec<GammaSample>,
    /// Full width at half maximum of the correlation peak, um.
    pub fwhm_um: Option<Estimate>,
    /// Mean counts per pixel (or cell) of the two arms over the bright
    /// region.
    pub mean_counts: (f64, f64),
    /// Number of pixel pairs (or cells) that entered the estimate.
    pub pairs_used: usize,
}

impl CorrelationReport {
    fn empty() -> Self {
        Self {
            sigma: None,
            excess_noise: None,
            gamma12: Vec::new(),
            fwhm_um: None,
            mean_counts: (0.0, 0.0),
            pairs_used: 0,
        }
    }
}

fn check_frames(frames: &[PixelFrame]) -> Result<(usize, usize, f64)> {
    if frames.len() < 2 {
        return Err(TwinError::Estimation("need at least two trajectories".into()));
    }
    let shape = frames[0].shape();
    let modes = frames[0].modes_per_pixel();
    for f in frames {
        if f.shape() != shape || f.modes_per_pixel() != modes {
            return Err(TwinError::ShapeMismatch(
                "pixel frames in an ensemble must share shape and mode budget".into(),
            ));
        }
    }
    Ok((shape.0, shape.1, modes))
}

fn mean_and_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Estimates the noise-reduction factor from an ensemble of paired pixel
/// frames.
///
/// Each symmetric pixel pair contributes its difference variance and its
/// summed mean flux; the quoted `sigma` is the ratio of their bright-region
/// totals, i.e. a flux-weighted average of per-pair `sigma` values, which
/// keeps dim pairs from dominating the uncertainty.  The report also carries
/// the excess noise of arm one measured on the same pixels.  Standard errors
/// come from a joint pair-and-trajectory bootstrap.
pub fn estimate_sigma(frames: &[PixelFrame], opts: &EstimatorOptions) -> Result<CorrelationReport> {
    let (npy, npx, modes) = check_frames(frames)?;
    let n_pairs = npy * npx;
    let n_traj = frames.len();
    // Column layout: one vector of per-trajectory values per pixel pair.
    let mut d = vec![vec![0.0f64; n_traj]; n_pairs];
    let mut n1 = vec![vec![0.0f64; n_traj]; n_pairs];
    for (t, frame) in frames.iter().enumerate() {
        for p in 0..n_pairs {
            let (j, i) = (p / npx, p % npx);
            let a = frame.counts1()[[j, i]];
            let b = frame.counts2()[[j, i]];
            d[p][t] = b - a;
            n1[p][t] = a;
        }
    }
    let mut flux = vec![0.0; n_pairs];
    let mut m1 = vec![0.0; n_pairs];
    let mut m2 = vec![0.0; n_pairs];
    for p in 0..n_pairs {
        let (mean1, _) = mean_and_var(&n1[p]);
        let (mean_d, _) = mean_and_var(&d[p]);
        m1[p] = mean1;
        m2[p] = mean1 + mean_d;
        flux[p] = m1[p] + m2[p];
    }
    let max_flux = flux.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max_flux > 0.0) {
        return Ok(CorrelationReport::empty());
    }
    let roi: Vec<usize> =
        (0..n_pairs).filter(|&p| flux[p] >= opts.roi_fraction * max_flux).collect();

    let sigma_excess = |traj: &[usize], pairs: &[usize]| -> (f64, f64) {
        let (mut var_d_sum, mut flux_sum) = (0.0, 0.0);
        let (mut var1_sum, mut mean1_sum) = (0.0, 0.0);
        let nt = traj.len() as f64;
        for &p in pairs {
            let (mut s_d, mut s_dd) = (0.0, 0.0);
            let (mut s_1, mut s_11) = (0.0, 0.0);
            for &t in traj {
                let x = d[p][t];
                s_d += x;
                s_dd += x * x;
                let y = n1[p][t];
                s_1 += y;
                s_11 += y * y;
            }
            let mean_d = s_d / nt;
            let mean_1 = s_1 / nt;
            var_d_sum += (s_dd - nt * mean_d * mean_d) / (nt - 1.0) - modes / 2.0;
            var1_sum += (s_11 - nt * mean_1 * mean_1) / (nt - 1.0) - modes / 4.0;
            flux_sum += 2.0 * mean_1 + mean_d;
            mean1_sum += mean_1;
        }
        let sigma = if flux_sum > 0.0 { var_d_sum / flux_sum } else { f64::NAN };
        let excess =
            if mean1_sum > 0.0 { (var1_sum - mean1_sum) / mean1_sum } else { f64::NAN };
        (sigma, excess)
    };

    let all_traj: Vec<usize> = (0..n_traj).collect();
    let (sigma_hat, excess_hat) = sigma_excess(&all_traj, &roi);
    if !sigma_hat.is_finite() {
        return Ok(CorrelationReport::empty());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
    let mut sig_bs = Vec::with_capacity(opts.resamples);
    let mut exc_bs = Vec::with_capacity(opts.resamples);
    for _ in 0..opts.resamples {
        let traj: Vec<usize> = (0..n_traj).map(|_| rng.random_range(0..n_traj)).collect();
        let pairs: Vec<usize> =
            (0..roi.len()).map(|_| roi[rng.random_range(0..roi.len())]).collect();
        let (s, e) = sigma_excess(&traj, &pairs);
        if s.is_finite() {
            sig_bs.push(s);
        }
        if e.is_finite() {
            exc_bs.push(e);
        }
    }
    let spread = |v: &[f64]| {
        if v.len() < 2 {
            f64::NAN
        } else {
            mean_and_var(v).1.sqrt()
        }
    };
    let mean1_roi = roi.iter().map(|&p| m1[p]).sum::<f64>() / roi.len() as f64;
    let mean2_roi = roi.iter().map(|&p| m2[p]).sum::<f64>() / roi.len() as f64;
    Ok(CorrelationReport {
        sigma: Some(Estimate::new(sigma_hat, spread(&sig_bs))),
        excess_noise: if excess_hat.is_finite() {
            Some(Estimate::new(excess_hat, spread(&exc_bs)))
        } else {
            None
        },
        gamma12: Vec::new(),
        fwhm_um: None,
        mean_counts: (mean1_roi, mean2_roi),
        pairs_used: roi.len(),
    })
}

/// Full width at half maximum of a sampled peak by linear interpolation
/// between the samples bracketing the half-height on each flank.
fn fwhm_linear(offsets: &[f64], values: &[f64]) -> Option<f64> {
    let peak_idx = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?
        .0;
    let half = values[peak_idx] / 2.0;
    if !(half > 0.0) {
        return None;
    }
    let mut right = None;
    for i in peak_idx..values.len() - 1 {
        if values[i] >= half && values[i + 1] < half {
            let f = (values[i] - half) / (values[i] - values[i + 1]);
            right = Some(offsets[i] + f * (offsets[i + 1] - offsets[i]));
            break;
        }
    }
    let mut left = None;
    for i in (1..=peak_idx).rev() {
        if values[i] >= half && values[i - 1] < half {
            let f = (values[i] - half) / (values[i] - values[i - 1]);
            left = Some(offsets[i] + f * (offsets[i - 1] - offsets[i]));
            break;
        }
    }
    Some(right? - left?)
}

/// Estimates the normalized intensity-fluctuation cross-correlation
/// `Gamma_12(x, -x + o)` between arm-one cells and arm-two cells offset by
/// `o` from the mirror point along the walk-off axis.
///
/// Covariances and variances are pooled over the bright region before the
/// ratio is taken, and cell variances are corrected for the Wigner vacuum
/// residue.  Fluctuations are measured about the full-ensemble mean; the
/// trajectory bootstrap then resamples per-trajectory pooled products, which
/// captures the fluctuation statistics that dominate the uncertainty at the
/// ensemble sizes used here.
pub fn estimate_gamma12(
    frames: &[CellFrame],
    max_offset_cells: usize,
    opts: &EstimatorOptions,
) -> Result<CorrelationReport> {
    if frames.len() < 2 {
        return Err(TwinError::Estimation("need at least two trajectories".into()));
    }
    let (ny, nx) = frames[0].counts1().dim();
    let modes = frames[0].modes_per_cell();
    let (pitch_x, _) = frames[0].pitch_um();
    for f in frames {
        if f.counts1().dim() != (ny, nx) || f.modes_per_cell() != modes {
            return Err(TwinError::ShapeMismatch("cell frames do not align".into()));
        }
    }
    if max_offset_cells == 0 || 2 * max_offset_cells + 1 > nx {
        return Err(invalid("offset scan must fit inside the grid"));
    }
    let n_traj = frames.len();
    let inv_f = 1.0 / n_traj as f64;
    let mut mean1 = Array2::<f64>::zeros((ny, nx));
    let mut mean2 = Array2::<f64>::zeros((ny, nx));
    for f in frames {
        mean1.scaled_add(inv_f, f.counts1());
        mean2.scaled_add(inv_f, f.counts2());
    }
    let peak = mean1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Ok(CorrelationReport::empty());
    }
    let roi: Vec<(usize, usize)> = mean1
        .indexed_iter()
        .filter(|(_, &m)| m >= opts.roi_fraction * peak)
        .map(|((j, i), _)| (j, i))
        .collect();
    let offsets: Vec<i64> = (-(max_offset_cells as i64)..=max_offset_cells as i64).collect();
    let n_off = offsets.len();
    // Per-trajectory pooled products over the bright region.
    let mut cross = vec![vec![0.0f64; n_off]; n_traj];
    let mut var2 = vec![vec![0.0f64; n_off]; n_traj];
    let mut var1 = vec![0.0f64; n_traj];
    for (t, f) in frames.iter().enumerate() {
        for &(j, i) in &roi {
            let d1 = f.counts1()[[j, i]] - mean1[[j, i]];
            var1[t] += d1 * d1;
            let jm = (ny - j) % ny;
            for (oi, &o) in offsets.iter().enumerate() {
                let im = (nx as i64 - i as i64 + o).rem_euclid(nx as i64) as usize;
                let d2 = f.counts2()[[jm, im]] - mean2[[jm, im]];
                cross[t][oi] += d1 * d2;
                var2[t][oi] += d2 * d2;
            }
        }
    }
    let correction = roi.len() as f64 * modes / 4.0;
    let gamma_of = |traj: &[usize]| -> (Vec<f64>, Option<f64>) {
        let norm = 1.0 / (traj.len() as f64 - 1.0);
        let v1: f64 = traj.iter().map(|&t| var1[t]).sum::<f64>() * norm - correction;
        let mut gammas = Vec::with_capacity(n_off);
        for oi in 0..n_off {
            let c: f64 = traj.iter().map(|&t| cross[t][oi]).sum::<f64>() * norm;
            let v2: f64 = traj.iter().map(|&t| var2[t][oi]).sum::<f64>() * norm - correction;
            let denom = v1 * v2;
            gammas.push(if denom > 0.0 { c / denom.sqrt() } else { f64::NAN });
        }
        let offs_um: Vec<f64> = offsets.iter().map(|&o| o as f64 * pitch_x).collect();
        let fwhm = fwhm_linear(&offs_um, &gammas);
        (gammas, fwhm)
    };
    let all: Vec<usize> = (0..n_traj).collect();
    let (gamma_hat, fwhm_hat) = gamma_of(&all);
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
    let mut gamma_bs = vec![Vec::with_capacity(opts.resamples); n_off];
    let mut fwhm_bs = Vec::with_capacity(opts.resamples);
    for _ in 0..opts.resamples {
        let traj: Vec<usize> = (0..n_traj).map(|_| rng.random_range(0..n_traj)).collect();
        let (g, fw) = gamma_of(&traj);
        for (oi, v) in g.into_iter().enumerate() {
            if v.is_finite() {
                gamma_bs[oi].push(v);
            }
        }
        if let Some(fw) = fw {
            fwhm_bs.push(fw);
        }
    }
    let spread = |v: &[f64]| {
        if v.len() < 2 {
            f64::NAN
        } else {
            mean_and_var(v).1.sqrt()
        }
    };
    let gamma12 = offsets
        .iter()
        .enumerate()
        .map(|(oi, &o)| GammaSample {
            offset_um: o as f64 * pitch_x,
            gamma: Estimate::new(gamma_hat[oi], spread(&gamma_bs[oi])),
        })
        .collect();
    let mean1_roi = roi.iter().map(|&(j, i)| mean1[[j, i]]).sum::<f64>() / roi.len() as f64;
    let mean2_roi = roi.iter().map(|&(j, i)| mean2[[j, i]]).sum::<f64>() / roi.len() as f64;
    Ok(CorrelationReport {
        sigma: None,
        excess_noise: None,
        gamma12,
        fwhm_um: fwhm_hat.map(|f| Estimate::new(f, spread(&fwhm_bs))),
        mean_counts: (mean1_roi, mean2_roi),
        pairs_used: roi.len(),
    })
}

/// Imaging figures of merit for one count ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrReport {
    /// Per-pixel signal-to-noise ratio of the differential signal; NaN where
    /// the estimate is undefined (no support or non-positive corrected
    /// variance).
    pub per_pixel: Array2<f64>,
    /// Bootstrap standard error of each per-pixel ratio; NaN where the ratio
    /// itself is absent or no bootstrap was run.
    pub per_pixel_stderr: Array2<f64>,
    /// Aggregate SNR over the object support: flux-weighted pooled mean
    /// difference divided by the square root of the flux-weighted pooled
    /// corrected variance.
    pub aggregate: Option<Estimate>,
    /// Ensemble-mean differential image `<N2 - N1>`: the retrieved object.
    pub retrieved: Array2<f64>,
    /// Mean flux `<N1 + N2>` per pixel, used as the aggregation weight.
    pub mean_flux: Array2<f64>,
    /// Benchmark ratio for an ideal differential measurement with split
    /// coherent beams of the same flux, aggregated with the same weights.
    pub sql_aggregate: Option<f64>,
}

impl SnrReport {
    /// Ratio of this report's aggregate SNR to a baseline's, with the
    /// standard errors combined in quadrature.
    pub fn improvement_vs(&self, baseline: &SnrReport) -> Option<Estimate> {
        let a = self.aggregate?;
        let b = baseline.aggregate?;
        if b.value == 0.0 {
            return None;
        }
        let r = a.value / b.value;
        let rel = (a.stderr / a.value).hypot(b.stderr / b.value);
        Some(Estimate::new(r, (r * rel).abs()))
    }
}

/// Estimates per-pixel and aggregate differential SNR over an object's
/// support.
///
/// Per pixel, `SNR = <N2 - N1> / std(N2 - N1)` over the ensemble, with the
/// Wigner mode correction removed from the variance.  The aggregate pools
/// means and corrected variances (flux-weighted) across pixels where the
/// mask absorbs before taking their ratio; its standard error comes from a
/// trajectory bootstrap.
pub fn estimate_snr(
    frames: &[PixelFrame],
    alpha_pixels: &Array2<f64>,
    opts: &EstimatorOptions,
) -> Result<SnrReport> {
    let (npy, npx, modes) = check_frames(frames)?;
    if alpha_pixels.dim() != (npy, npx) {
        return Err(TwinError::ShapeMismatch(format!(
            "mask pixels {:?} do not match frames {:?}",
            alpha_pixels.dim(),
            (npy, npx)
        )));
    }
    let n_traj = frames.len();
    let n_pix = npy * npx;
    let mut d = vec![vec![0.0f64; n_traj]; n_pix];
    let mut flux = vec![vec![0.0f64; n_traj]; n_pix];
    for (t, frame) in frames.iter().enumerate() {
        for p in 0..n_pix {
            let (j, i) = (p / npx, p % npx);
            let a = frame.counts1()[[j, i]];
            let b = frame.counts2()[[j, i]];
            d[p][t] = b - a;
            flux[p][t] = a + b;
        }
    }
    // The aggregate pools the corrected difference variances over the object
    // support (flux-weighted) *before* taking mean/sqrt(var).  Averaging
    // per-pixel SNRs instead would inherit the 1/sqrt bias of each noisy
    // variance estimate, which matters once the subtracted Wigner floor
    // dwarfs the physical variance (heavily merged frames).
    let snr_map = |traj: &[usize]| -> (Array2<f64>, Array2<f64>, Array2<f64>, Option<f64>) {
        let nt = traj.len() as f64;
        let mut per_pixel = Array2::from_elem((npy, npx), f64::NAN);
        let mut retrieved = Array2::zeros((npy, npx));
        let mut mean_flux = Array2::zeros((npy, npx));
        let (mut pooled_d, mut pooled_var, mut weight) = (0.0, 0.0, 0.0);
        for p in 0..n_pix {
            let (j, i) = (p / npx, p % npx);
            let (mut s, mut ss, mut fsum) = (0.0, 0.0, 0.0);
            for &t in traj {
                s += d[p][t];
                ss += d[p][t] * d[p][t];
                fsum += flux[p][t];
            }
            let mean = s / nt;
            let var = (ss - nt * mean * mean) / (nt - 1.0) - modes / 2.0;
            retrieved[[j, i]] = mean;
            mean_flux[[j, i]] = fsum / nt;
            if var > 0.0 {
                per_pixel[[j, i]] = mean / var.sqrt();
            }
            if alpha_pixels[[j, i]] > 0.0 {
                let w = (fsum / nt).max(0.0);
                pooled_d += w * mean;
                pooled_var += w * var;
                weight += w;
            }
        }
        let aggregate = (weight > 0.0 && pooled_var > 0.0)
            .then(|| (pooled_d / weight) / (pooled_var / weight).sqrt());
        (per_pixel, retrieved, mean_flux, aggregate)
    };
    let all: Vec<usize> = (0..n_traj).collect();
    let (per_pixel, retrieved, mean_flux, agg_hat) = snr_map(&all);
    let mut per_pixel_stderr = Array2::from_elem((npy, npx), f64::NAN);
    let aggregate = agg_hat.map(|value| {
        let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
        let mut samples = Vec::with_capacity(opts.resamples);
        let mut maps = Vec::with_capacity(opts.resamples);
        for _ in 0..opts.resamples {
            let traj: Vec<usize> = (0..n_traj).map(|_| rng.random_range(0..n_traj)).collect();
            let (pp, _, _, agg) = snr_map(&traj);
            if let Some(a) = agg {
                samples.push(a);
            }
            maps.push(pp);
        }
        for p in 0..n_pix {
            let (j, i) = (p / npx, p % npx);
            let vals: Vec<f64> =
                maps.iter().map(|m| m[[j, i]]).filter(|v| v.is_finite()).collect();
            if vals.len() >= 2 {
                per_pixel_stderr[[j, i]] = mean_and_var(&vals).1.sqrt();
            }
        }
        let stderr = if samples.len() < 2 { f64::NAN } else { mean_and_var(&samples).1.sqrt() };
        Estimate::new(value, stderr)
    });
    // Ideal coherent-differential benchmark at the same flux: per pixel
    // alpha sqrt(N) / sqrt(2 - alpha), with N the unobstructed arm flux.
    let sql_aggregate = {
        let (mut num, mut den) = (0.0, 0.0);
        for ((j, i), &alpha) in alpha_pixels.indexed_iter() {
            if alpha > 0.0 && alpha < 1.0 {
                let w = mean_flux[[j, i]].max(0.0);
                let n_ref = (mean_flux[[j, i]] / (2.0 - alpha)).max(0.0);
                num += w * alpha * n_ref.sqrt() / (2.0 - alpha).sqrt();
                den += w;
            }
        }
        (den > 0.0).then(|| num / den)
    };
    Ok(SnrReport { per_pixel, per_pixel_stderr, aggregate, retrieved, mean_flux, sql_aggregate })
}

/// Draws the classical benchmark ensemble: two independent Poisson frames
/// per trial with the given per-pixel means (split coherent beams), the
/// object thinning arm one to `(1 - alpha)` of its mean.  The frames carry
/// no Wigner residue, so their mode budget is zero.
pub fn generate_classical_frames(
    mean1: &Array2<f64>,
    mean2: &Array2<f64>,
    alpha_pixels: &Array2<f64>,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<Vec<PixelFrame>> {
    if mean1.dim() != mean2.dim() || mean1.dim() != alpha_pixels.dim() {
        return Err(TwinError::ShapeMismatch("mean maps and mask must align".into()));
    }
    if trials < 2 {
        return Err(TwinError::Estimation("need at least two trials".into()));
    }
    let dim = mean1.dim();
    let draw = |mean: f64, rng: &mut dyn rand::RngCore| -> Result<f64> {
        if mean <= 0.0 {
            return Ok(0.0);
        }
        let poisson =
            Poisson::new(mean).map_err(|e| invalid(format!("poisson mean {mean}: {e}")))?;
        Ok(poisson.sample(rng))
    };
    let mut frames = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut counts1 = Array2::zeros(dim);
        let mut counts2 = Array2::zeros(dim);
        for ((j, i), c) in counts1.indexed_iter_mut() {
            *c = draw(mean1[[j, i]] * (1.0 - alpha_pixels[[j, i]]), rng)?;
        }
        for ((j, i), c) in counts2.indexed_iter_mut() {
            *c = draw(mean2[[j, i]], rng)?;
        }
        frames.push(PixelFrame::new(counts1, counts2, 0.0)?);
    }
    Ok(frames)
}

/// Runs the classical split-coherent-beam benchmark end to end: generates
/// Poisson frames with the supplied no-object mean maps, applies the object
/// to arm one, and pushes the ensemble through the same SNR estimator as the
/// quantum data.
pub fn classical_baseline(
    mean1: &Array2<f64>,
    mean2: &Array2<f64>,
    alpha_pixels: &Array2<f64>,
    trials: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<SnrReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let frames = generate_classical_frames(mean1, mean2, alpha_pixels, trials, &mut rng)?;
    estimate_snr(&frames, alpha_pixels, opts)
}
