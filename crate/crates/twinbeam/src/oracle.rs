//! Monte Carlo oracle for the discrete-mode counting model.
//!
//! An independent, field-free check of the closed forms in [`crate::analytic`]:
//! each pulse carries M identical pair modes; mode k holds n_k photon pairs
//! with n_k thermally distributed (Bose-Einstein, mean sinh²g). Both arms
//! share the same n_k (perfect pairwise correlation); detection is binomial
//! thinning at η₁, η₂, and the object a further binomial thinning of arm 1
//! by 1−α. Every pixel-pair moment follows from these three thinnings, so
//! agreement between the empirical estimates and the analytic formulas
//! validates both sides against each other.
//!
//! The same trial supplies the unobstructed counts (N₁, N₂), used for the
//! noise reduction factor σ and the excess noise E_n, and the with-object
//! count N'₁ obtained by thinning N₁ once more, used for the differential
//! SNR. Thinning after detection commutes in law with thinning before it,
//! so this shortcut does not bias any of the reported statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

use crate::analytic::{snr_sql, ArmEfficiencies, ModeBudget, ObjectParams, TwoModeStats};
use crate::error::{invalid, Result};
use crate::Estimate;

/// Mean pair number per mode at parametric gain g, n̄ = sinh²g.
pub fn thermal_mean_from_gain(g: f64) -> f64 {
    let s = g.sinh();
    s * s
}

/// Inputs of one oracle run.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    gain: f64,
    modes: u64,
    eff: ArmEfficiencies,
    obj: ObjectParams,
    trials: u64,
}

impl OracleConfig {
    /// The mode budget is rounded to the nearest integer (at least 1), since
    /// the sampler draws whole modes; [`OracleConfig::modes`] reports the
    /// value actually used.
    pub fn new(
        gain: f64,
        modes: &ModeBudget,
        eff: ArmEfficiencies,
        obj: ObjectParams,
        trials: u64,
    ) -> Result<Self> {
        if !gain.is_finite() {
            return Err(invalid(format!("gain must be finite, got {gain}")));
        }
        if trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        let m = modes.mode_count().round().max(1.0) as u64;
        // Guard the total mode-draw count so loop arithmetic cannot wrap.
        trials
            .checked_mul(m)
            .filter(|&total| total <= 1 << 40)
            .ok_or_else(|| invalid("trials * modes too large"))?;
        Ok(Self { gain, modes: m, eff, obj, trials })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
    /// Integer mode count per pulse actually sampled.
    pub fn modes(&self) -> u64 {
        self.modes
    }
    pub fn efficiencies(&self) -> ArmEfficiencies {
        self.eff
    }
    pub fn object(&self) -> ObjectParams {
        self.obj
    }
    pub fn trials(&self) -> u64 {
        self.trials
    }
}

/// Exact moments of the counting model, for comparison with a run.
///
/// `snr` is mean(N₂−N'₁)/std(N₂−N'₁); for balanced arms this equals the
/// differential object SNR and the whole struct reduces to the analytic
/// formulas with detected excess noise E_n = η·sinh²g.
#[derive(Debug, Clone, Copy)]
pub struct OraclePrediction {
    pub mean_n1: f64,
    pub mean_n2: f64,
    pub sigma: f64,
    pub excess_noise: f64,
    pub snr: f64,
    /// snr divided by the two-coherent-beam SNR at the same ⟨N₁⟩;
    /// NaN when α = 0 (no object, no reference scale).
    pub improvement: f64,
}

/// Closed-form prediction for [`two_mode_oracle`] with the same inputs.
pub fn predict(config: &OracleConfig) -> OraclePrediction {
    let m = config.modes as f64;
    let nbar = thermal_mean_from_gain(config.gain);
    let (e1, e2) = (config.eff.eta1(), config.eff.eta2());
    let alpha = config.obj.alpha();
    let mean_n1 = m * e1 * nbar;
    let mean_n2 = m * e2 * nbar;

    // Var(N2 - N1) per mode, from the law of total variance over n:
    // n̄[η1(1-η1) + η2(1-η2)] + (η2-η1)² n̄(1+n̄).
    let var_diff =
        m * (nbar * (e1 * (1.0 - e1) + e2 * (1.0 - e2)) + (e2 - e1).powi(2) * nbar * (1.0 + nbar));
    let sigma = if mean_n1 + mean_n2 > 0.0 { var_diff / (mean_n1 + mean_n2) } else { f64::NAN };

    // Thinned thermal light stays thermal: per-mode detected mean η1·n̄.
    let excess_noise = e1 * nbar;

    let e1p = (1.0 - alpha) * e1;
    let signal = m * nbar * (e2 - e1p);
    let var_dp =
        m * (nbar * (e1p * (1.0 - e1p) + e2 * (1.0 - e2)) + (e2 - e1p).powi(2) * nbar * (1.0 + nbar));
    let snr = if var_dp > 0.0 {
        signal / var_dp.sqrt()
    } else if signal == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    let improvement =
        if alpha > 0.0 && mean_n1 > 0.0 { snr / snr_sql(mean_n1, &config.obj) } else { f64::NAN };

    OraclePrediction { mean_n1, mean_n2, sigma, excess_noise, snr, improvement }
}

/// Empirical result of an oracle run. All estimates carry batch-means
/// standard errors (statistics computed per batch of trials; stderr is the
/// spread of batch values over sqrt(batches)).
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub mean_n1: Estimate,
    pub mean_n2: Estimate,
    pub sigma: Estimate,
    pub excess_noise: Estimate,
    pub snr: Estimate,
    pub improvement: Estimate,
    pub trials: u64,
    pub modes: u64,
}

impl OracleRun {
    /// Central values packaged for the analytic formulas. σ is clamped at 0
    /// in case sampling noise drove the estimate marginally negative.
    pub fn stats(&self) -> Result<TwoModeStats> {
        TwoModeStats::new(
            self.mean_n1.value,
            self.excess_noise.value.max(-1.0),
            self.sigma.value.max(0.0),
        )
    }
}

/// Raw per-batch count moments. d = N2 - N1 (no object), p = N2 - N'1.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    m: f64,
    s1: f64,
    s1q: f64,
    s2: f64,
    sd: f64,
    sdq: f64,
    sp: f64,
    spq: f64,
}

impl Moments {
    fn push(&mut self, n1: f64, n2: f64, n1p: f64) {
        let d = n2 - n1;
        let p = n2 - n1p;
        self.m += 1.0;
        self.s1 += n1;
        self.s1q += n1 * n1;
        self.s2 += n2;
        self.sd += d;
        self.sdq += d * d;
        self.sp += p;
        self.spq += p * p;
    }

    fn merge(&mut self, other: &Moments) {
        self.m += other.m;
        self.s1 += other.s1;
        self.s1q += other.s1q;
        self.s2 += other.s2;
        self.sd += other.sd;
        self.sdq += other.sdq;
        self.sp += other.sp;
        self.spq += other.spq;
    }

    fn var(sum: f64, sumsq: f64, m: f64) -> f64 {
        if m < 2.0 {
            return f64::NAN;
        }
        ((sumsq - sum * sum / m) / (m - 1.0)).max(0.0)
    }

    fn statistics(&self, obj: &ObjectParams) -> [f64; 6] {
        let m = self.m;
        let mean1 = self.s1 / m;
        let mean2 = self.s2 / m;
        let var_d = Self::var(self.sd, self.sdq, m);
        let sigma = if mean1 + mean2 > 0.0 { var_d / (mean1 + mean2) } else { f64::NAN };
        let excess =
            if mean1 > 0.0 { (Self::var(self.s1, self.s1q, m) - mean1) / mean1 } else { f64::NAN };
        let var_p = Self::var(self.sp, self.spq, m);
        let snr = if var_p > 0.0 {
            (self.sp / m) / var_p.sqrt()
        } else if self.sp == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let improvement = if obj.alpha() > 0.0 && mean1 > 0.0 {
            snr / snr_sql(mean1, obj)
        } else {
            f64::NAN
        };
        [mean1, mean2, sigma, excess, snr, improvement]
    }
}

/// Thermal (Bose-Einstein) photon number by inversion sampling:
/// n = floor(ln u / ln s) with s = n̄/(1+n̄) and u uniform on (0, 1].
fn thermal_count(rng: &mut ChaCha12Rng, ln_s: f64) -> u64 {
    if ln_s == f64::NEG_INFINITY {
        return 0;
    }
    let u = 1.0 - rng.random::<f64>();
    (u.ln() / ln_s) as u64
}

fn thin(rng: &mut ChaCha12Rng, n: u64, p: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p validated in (0,1]").sample(rng)
}

/// Runs the counting-model Monte Carlo and returns empirical two-mode
/// statistics with standard errors. Deterministic in `seed`.
pub fn two_mode_oracle(config: &OracleConfig, seed: u64) -> OracleRun {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let nbar = thermal_mean_from_gain(config.gain);
    let ln_s = if nbar > 0.0 { (nbar / (1.0 + nbar)).ln() } else { f64::NEG_INFINITY };
    let (e1, e2) = (config.eff.eta1(), config.eff.eta2());
    let transmit = 1.0 - config.obj.alpha();

    // Batches of near-equal size; each statistic is evaluated per batch for
    // its standard error and on the pooled moments for its central value.
    let n_batches = (config.trials / 2).clamp(1, 50) as usize;
    let base = config.trials / n_batches as u64;
    let extra = (config.trials % n_batches as u64) as usize;

    let mut batches = Vec::with_capacity(n_batches);
    for b in 0..n_batches {
        let size = base + u64::from(b < extra);
        let mut mom = Moments::default();
        for _ in 0..size {
            let (mut n1, mut n2, mut n1p) = (0u64, 0u64, 0u64);
            for _ in 0..config.modes {
                let n = thermal_count(&mut rng, ln_s);
                if n == 0 {
                    continue;
                }
                let c2 = thin(&mut rng, n, e2);
                let c1 = thin(&mut rng, n, e1);
                let c1p = thin(&mut rng, c1, transmit);
                n1 += c1;
                n2 += c2;
                n1p += c1p;
            }
            mom.push(n1 as f64, n2 as f64, n1p as f64);
        }
        batches.push(mom);
    }

    let mut pooled = Moments::default();
    for b in &batches {
        pooled.merge(b);
    }
    let central = pooled.statistics(&config.obj);

    // Spread of the per-batch statistics around their mean, over sqrt(B).
    let stderr = |idx: usize| -> f64 {
        if batches.len() < 2 {
            return f64::NAN;
        }
        let vals: Vec<f64> = batches.iter().map(|b| b.statistics(&config.obj)[idx]).collect();
        let k = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / k;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    };

    let est = |idx: usize| Estimate::new(central[idx], stderr(idx));
    OracleRun {
        mean_n1: est(0),
        mean_n2: est(1),
        sigma: est(2),
        excess_noise: est(3),
        snr: est(4),
        improvement: est(5),
        trials: config.trials,
        modes: config.modes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{improvement_ratio, snr_differential};
    use approx::assert_relative_eq;

    fn cfg(g: f64, m: f64, eta: f64, alpha: f64, trials: u64) -> OracleConfig {
        OracleConfig::new(
            g,
            &ModeBudget::new(m).unwrap(),
            ArmEfficiencies::balanced(eta).unwrap(),
            ObjectParams::new(alpha).unwrap(),
            trials,
        )
        .unwrap()
    }

    #[test]
    fn prediction_matches_analytic_formulas_for_balanced_arms() {
        let c = cfg(1.45, 958.0, 0.9, 0.04, 10);
        let p = predict(&c);
        let nbar = thermal_mean_from_gain(1.45);
        assert_relative_eq!(nbar, 4.0573, max_relative = 1e-4);
        let stats = TwoModeStats::new(958.0 * 0.9 * nbar, 0.9 * nbar, 0.1).unwrap();
        let obj = ObjectParams::new(0.04).unwrap();
        assert_relative_eq!(p.mean_n1, stats.mean_n(), max_relative = 1e-12);
        assert_relative_eq!(p.sigma, 0.1, max_relative = 1e-12);
        assert_relative_eq!(p.excess_noise, 0.9 * nbar, max_relative = 1e-12);
        assert_relative_eq!(p.snr, snr_differential(&stats, &obj), max_relative = 1e-12);
        assert_relative_eq!(p.improvement, improvement_ratio(&stats, &obj), max_relative = 1e-12);
    }

    #[test]
    fn run_is_deterministic_in_seed() {
        let c = cfg(1.0, 16.0, 0.8, 0.1, 400);
        let a = two_mode_oracle(&c, 7);
        let b = two_mode_oracle(&c, 7);
        assert_eq!(a.sigma.value.to_bits(), b.sigma.value.to_bits());
        assert_eq!(a.snr.value.to_bits(), b.snr.value.to_bits());
        let c2 = two_mode_oracle(&c, 8);
        assert_ne!(a.sigma.value.to_bits(), c2.sigma.value.to_bits());
    }

    #[test]
    fn perfect_detection_gives_zero_difference_noise() {
        let c = cfg(0.8, 32.0, 1.0, 0.0, 300);
        let run = two_mode_oracle(&c, 3);
        // η = 1 means both arms count the same pairs exactly.
        assert_eq!(run.sigma.value, 0.0);
        assert_eq!(run.snr.value, 0.0);
        assert!(run.improvement.value.is_nan());
    }

    #[test]
    fn small_run_statistics_match_prediction() {
        let c = cfg(1.0, 64.0, 0.8, 0.05, 6000);
        let p = predict(&c);
        let run = two_mode_oracle(&c, 11);
        // 4 standard errors: loose enough to be stable, tight enough to catch
        // a wrong formula (which shifts these by tens of stderr).
        assert!(run.mean_n1.consistent_with(p.mean_n1, 4.0), "{:?} vs {}", run.mean_n1, p.mean_n1);
        assert!(run.sigma.consistent_with(p.sigma, 4.0), "{:?} vs {}", run.sigma, p.sigma);
        assert!(
            run.excess_noise.consistent_with(p.excess_noise, 4.0),
            "{:?} vs {}",
            run.excess_noise,
            p.excess_noise
        );
        assert!(run.snr.consistent_with(p.snr, 4.0), "{:?} vs {}", run.snr, p.snr);
    }

    #[test]
    fn thermal_sampler_has_thermal_variance() {
        // Single mode, no thinning: variance must be n̄(1+n̄), i.e. the
        // empirical excess noise equals the per-mode mean.
        let c = cfg(1.2, 1.0, 1.0, 0.0, 20000);
        let run = two_mode_oracle(&c, 5);
        let nbar = thermal_mean_from_gain(1.2);
        assert!(
            run.excess_noise.consistent_with(nbar, 4.0),
            "{:?} vs {}",
            run.excess_noise,
            nbar
        );
        assert!(run.mean_n1.consistent_with(nbar, 4.0));
    }

    #[test]
    fn config_rejects_bad_inputs() {
        let m = ModeBudget::new(10.0).unwrap();
        let eff = ArmEfficiencies::balanced(0.9).unwrap();
        let obj = ObjectParams::new(0.1).unwrap();
        assert!(OracleConfig::new(f64::NAN, &m, eff, obj, 10).is_err());
        assert!(OracleConfig::new(1.0, &m, eff, obj, 0).is_err());
        let huge = ModeBudget::new(1e12).unwrap();
        assert!(OracleConfig::new(1.0, &huge, eff, obj, u64::MAX).is_err());
    }

    #[test]
    fn mode_budget_rounding() {
        let c = cfg(1.0, 957.6, 0.9, 0.0, 1);
        assert_eq!(c.modes(), 958);
        let c2 = cfg(1.0, 0.3, 0.9, 0.0, 1);
        assert_eq!(c2.modes(), 1);
    }
}
