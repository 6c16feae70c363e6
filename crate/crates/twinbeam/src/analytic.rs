//! Closed-form two-mode model of differential absorption measurement.
//!
//! The measurement compares photon counts on a pair of symmetric detector
//! pixels fed by the two arms of a twin beam. An object of absorption
//! `alpha` sits in arm 1; the observable is the count difference
//! N'_- = N2 - N'_1. Three numbers characterise the source and detection
//! chain:
//!
//! * `mean_n`   — mean photon count per pixel and frame, ⟨N1⟩ = ⟨N2⟩,
//! * `excess_noise` — Mandel excess E_n = (⟨δN1²⟩ - ⟨N1⟩)/⟨N1⟩ of a single
//!   arm (0 for Poisson light, ⟨N⟩/M for M-mode thermal light),
//! * `sigma`    — noise reduction factor σ = ⟨δN_-²⟩/(⟨N1⟩+⟨N2⟩) of the
//!   *unobstructed* difference (1 at the shot-noise level, 1-η for an ideal
//!   twin beam seen by detectors of quantum efficiency η).
//!
//! Everything in this module is an algebraic consequence of beam-splitter
//! input-output relations applied to those three moments; the Monte Carlo
//! cross-check lives in [`crate::oracle`].

use crate::error::{invalid, Result};

/// Second-moment description of the balanced twin-beam state at the pixel pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeStats {
    mean_n: f64,
    excess_noise: f64,
    sigma: f64,
}

impl TwoModeStats {
    /// Validates `mean_n >= 0`, `excess_noise >= -1`, `sigma >= 0`.
    ///
    /// `excess_noise` may be negative (sub-Poissonian single-arm light) but
    /// never below -1, where the single-arm variance would turn negative.
    pub fn new(mean_n: f64, excess_noise: f64, sigma: f64) -> Result<Self> {
        if !mean_n.is_finite() || mean_n < 0.0 {
            return Err(invalid(format!("mean_n must be finite and >= 0, got {mean_n}")));
        }
        if !excess_noise.is_finite() || excess_noise < -1.0 {
            return Err(invalid(format!(
                "excess_noise must be finite and >= -1, got {excess_noise}"
            )));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(invalid(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { mean_n, excess_noise, sigma })
    }

    pub fn mean_n(&self) -> f64 {
        self.mean_n
    }
    pub fn excess_noise(&self) -> f64 {
        self.excess_noise
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Object absorption, `alpha` in [0, 1]. The object transmits amplitude
/// sqrt(1 - alpha) and admixes vacuum through the lost port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectParams {
    alpha: f64,
}

impl ObjectParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
            return Err(invalid(format!("alpha must be in [0,1], got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Amplitude transmission sqrt(1 - alpha).
    pub fn transmission(&self) -> f64 {
        (1.0 - self.alpha).sqrt()
    }
}

/// Number of spatiotemporal modes collected per detector pixel.
///
/// Real-valued: an effective mode count obtained from coherence areas or
/// bandwidth ratios is rarely an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBudget {
    mode_count: f64,
}

impl ModeBudget {
    pub fn new(mode_count: f64) -> Result<Self> {
        if !mode_count.is_finite() || mode_count <= 0.0 {
            return Err(invalid(format!("mode_count must be finite and > 0, got {mode_count}")));
        }
        Ok(Self { mode_count })
    }

    pub fn mode_count(&self) -> f64 {
        self.mode_count
    }
}

/// Per-arm detector quantum efficiencies, each in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmEfficiencies {
    eta1: f64,
    eta2: f64,
}

impl ArmEfficiencies {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        for (name, eta) in [("eta1", eta1), ("eta2", eta2)] {
            if !eta.is_finite() || !(eta > 0.0 && eta <= 1.0) {
                return Err(invalid(format!("{name} must be in (0,1], got {eta}")));
            }
        }
        Ok(Self { eta1, eta2 })
    }

    pub fn balanced(eta: f64) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }
    pub fn eta2(&self) -> f64 {
        self.eta2
    }
    pub fn mean(&self) -> f64 {
        0.5 * (self.eta1 + self.eta2)
    }
}

/// Variance of the count difference N'_- = N2 - N'_1 after the object.
///
/// ⟨δN'_-²⟩ = α²⟨δN1²⟩ + (1-α)⟨δN_-²⟩ + α(1-α)⟨N1⟩, with
/// ⟨δN1²⟩ = (E_n+1)⟨N1⟩ and ⟨δN_-²⟩ = 2σ⟨N1⟩. The three terms are the
/// surviving single-arm excess, the residual twin-beam difference noise and
/// the binomial partition noise of absorption.
pub fn variance_after_object(stats: &TwoModeStats, obj: &ObjectParams) -> f64 {
    let a = obj.alpha;
    let n = stats.mean_n;
    let var1 = (stats.excess_noise + 1.0) * n;
    let var_diff = 2.0 * stats.sigma * n;
    a * a * var1 + (1.0 - a) * var_diff + a * (1.0 - a) * n
}

/// Signal-to-noise ratio of the differential measurement,
/// SNR = α⟨N1⟩ / sqrt(⟨δN'_-²⟩) = α sqrt(⟨N1⟩) / sqrt(α²E_n + 2σ(1-α) + α).
pub fn snr_differential(stats: &TwoModeStats, obj: &ObjectParams) -> f64 {
    let a = obj.alpha;
    let denom = a * a * stats.excess_noise + 2.0 * stats.sigma * (1.0 - a) + a;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    a * stats.mean_n.sqrt() / denom.sqrt()
}

/// Differential SNR for two *independent* classical beams of the same
/// single-arm statistics (σ = 1 but correlated partition noise absent):
/// SNR = α sqrt(⟨N⟩) / sqrt(α²E_n + 2 - α).
pub fn snr_classical(mean_n: f64, excess_noise: f64, obj: &ObjectParams) -> f64 {
    let a = obj.alpha;
    let denom = a * a * excess_noise + 2.0 - a;
    a * mean_n.sqrt() / denom.sqrt()
}

/// Standard quantum limit of the differential scheme: two independent
/// coherent (Poissonian) beams, SNR = α sqrt(⟨N⟩) / sqrt(2 - α).
pub fn snr_sql(mean_n: f64, obj: &ObjectParams) -> f64 {
    a_over_sqrt(mean_n, obj.alpha, 2.0 - obj.alpha)
}

/// Single-beam direct-detection limit SNR = α sqrt(⟨N⟩). Not the reference
/// used by [`improvement_ratio`]; provided for completeness.
pub fn snr_sql_direct(mean_n: f64, obj: &ObjectParams) -> f64 {
    obj.alpha * mean_n.sqrt()
}

fn a_over_sqrt(mean_n: f64, alpha: f64, denom: f64) -> f64 {
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    alpha * mean_n.sqrt() / denom.sqrt()
}

/// Quantum improvement factor R = SNR_differential / SNR_SQL
/// = sqrt((2-α) / (α²E_n + 2σ(1-α) + α)).
///
/// Independent of ⟨N1⟩; approaches 1/sqrt(σ) for a weak object
/// (α → 0 with α²E_n ≪ 2σ).
pub fn improvement_ratio(stats: &TwoModeStats, obj: &ObjectParams) -> f64 {
    let a = obj.alpha;
    let denom = a * a * stats.excess_noise + 2.0 * stats.sigma * (1.0 - a) + a;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    ((2.0 - a) / denom).sqrt()
}

/// Largest noise reduction factor that still yields R > 1:
/// σ_MAX = 1 - α²E_n / (2(1-α)).
///
/// May be negative (then no σ gives a quantum advantage for this object and
/// excess noise); the raw value is returned, see [`advantage_possible`].
/// Requires `alpha < 1`.
pub fn sigma_max(obj: &ObjectParams, excess_noise: f64) -> Result<f64> {
    let a = obj.alpha;
    if a >= 1.0 {
        return Err(invalid("sigma_max undefined for alpha = 1 (opaque object)"));
    }
    Ok(1.0 - a * a * excess_noise / (2.0 * (1.0 - a)))
}

/// Whether a quantum advantage is possible at all, i.e. `sigma_max > 0`.
pub fn advantage_possible(sigma_max_value: f64) -> bool {
    sigma_max_value > 0.0
}

/// Noise reduction factor of a twin beam seen by unbalanced detectors:
/// σ = 1 - η̄ + (η1-η2)²/(2η̄) · (E_n + 1/2), η̄ = (η1+η2)/2.
///
/// `excess_noise` here is the per-mode photon number of the source
/// (sinh²g for parametric gain g); with that reading the formula is exact
/// for thermally correlated arms under binomial detection thinning.
pub fn sigma_unbalanced(eff: &ArmEfficiencies, excess_noise: f64) -> f64 {
    let mean = eff.mean();
    let d = eff.eta1 - eff.eta2;
    1.0 - mean + d * d / (2.0 * mean) * (excess_noise + 0.5)
}

/// Mandel excess of M-mode thermal light, E_n = ⟨N⟩ / M.
pub fn excess_noise_thermal(mean_n: f64, modes: &ModeBudget) -> Result<f64> {
    if !mean_n.is_finite() || mean_n < 0.0 {
        return Err(invalid(format!("mean_n must be finite and >= 0, got {mean_n}")));
    }
    Ok(mean_n / modes.mode_count())
}

/// Largest tolerable misplacement of the symmetry center, as a fraction of
/// the transverse coherence length: x_shift/x_coh < 1/(1 + E_n/η) keeps
/// σ below 1 (linear interpolation between σ(0) = 1-η and σ(x_coh) = 1+E_n).
pub fn shift_tolerance(eta: f64, excess_noise: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid(format!("eta must be in (0,1], got {eta}")));
    }
    if excess_noise < -1.0 {
        return Err(invalid("excess_noise must be >= -1"));
    }
    Ok(1.0 / (1.0 + excess_noise / eta))
}

/// Transverse FWHM of the far-field pair correlation for a Gaussian pump of
/// waist w_p behind a lens of focal length f:
/// x_FWHM = sqrt(2 ln 2) λ f / (π w_p).
///
/// Photon pairs exit with anticorrelated transverse wavevectors smeared by
/// the pump's angular spectrum, so in the lens focal plane the correlation
/// depends on the coordinate sum only,
/// Γ12(x1 + x2) ∝ exp(-(2π(x1+x2)/(λf))² w_p²/2), whose full width at half
/// maximum is the value returned here.  Valid at low gain; gain-induced
/// spectral narrowing broadens the real width beyond it.
pub fn correlation_fwhm_um(waist_um: f64, focal_um: f64, lambda_um: f64) -> f64 {
    (2.0 * std::f64::consts::LN_2).sqrt() * lambda_um * focal_um
        / (std::f64::consts::PI * waist_um)
}

/// Peak of the normalized cross-correlation between symmetric pixels,
/// Γ_max = 1 - σ/(E_n + 1). Clamped to [-1, 1]; `clamped` reports whether
/// the inputs were inconsistent with a true correlation coefficient.
pub fn gamma_peak(sigma: f64, excess_noise: f64) -> (f64, bool) {
    let raw = 1.0 - sigma / (excess_noise + 1.0);
    if (-1.0..=1.0).contains(&raw) {
        (raw, false)
    } else {
        (raw.clamp(-1.0, 1.0), true)
    }
}
