//! Pump pulse model.
//!
//! The pump is an undepleted classical Gaussian beam,
//! `A_p(x, y, t) = exp(-(x^2 + y^2) / w_p^2) exp(-t^2 / tau_p^2)`,
//! normalized to unit peak so that the quoted parametric gain `g` is the peak
//! gain.  Pulses much longer than the downconverted coherence time are
//! simulated as a train of quasi-monochromatic slices whose gains follow the
//! temporal envelope.

use crate::error::{invalid, Result};

/// Pump beam parameters: waist, pulse duration, peak parametric gain, and
/// wavelength of the downconverted light (twice the pump wavelength).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    waist_um: f64,
    duration_ps: f64,
    gain: f64,
    wavelength_um: f64,
}

impl PumpSpec {
    pub fn new(waist_um: f64, duration_ps: f64, gain: f64, wavelength_um: f64) -> Result<Self> {
        if !waist_um.is_finite() || waist_um <= 0.0 {
            return Err(invalid(format!("pump waist must be > 0, got {waist_um}")));
        }
        if !duration_ps.is_finite() || duration_ps <= 0.0 {
            return Err(invalid(format!("pump duration must be > 0, got {duration_ps}")));
        }
        if !gain.is_finite() || gain < 0.0 {
            return Err(invalid(format!("parametric gain must be >= 0, got {gain}")));
        }
        if !wavelength_um.is_finite() || wavelength_um <= 0.0 {
            return Err(invalid(format!("wavelength must be > 0, got {wavelength_um}")));
        }
        Ok(Self { waist_um, duration_ps, gain, wavelength_um })
    }

    pub fn waist_um(&self) -> f64 {
        self.waist_um
    }

    pub fn duration_ps(&self) -> f64 {
        self.duration_ps
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn wavelength_um(&self) -> f64 {
        self.wavelength_um
    }

    /// Copy of this pump with the peak gain replaced, e.g. by a slice gain.
    pub fn with_gain(&self, gain: f64) -> Result<Self> {
        Self::new(self.waist_um, self.duration_ps, gain, self.wavelength_um)
    }

    /// Transverse envelope `exp(-(x^2 + y^2) / w_p^2)` at unit peak.
    pub fn amplitude(&self, x_um: f64, y_um: f64) -> f64 {
        (-(x_um * x_um + y_um * y_um) / (self.waist_um * self.waist_um)).exp()
    }

    /// Transverse bandwidth of the pump spectrum, `2 / w_p`, rad/um.  Pair
    /// correlations in the far field spread over wavevectors within this
    /// range of perfect anticorrelation.
    pub fn bandwidth_q(&self) -> f64 {
        2.0 / self.waist_um
    }

    /// Spectral bandwidth of the pulse, `2 / tau_p`, rad/ps.
    pub fn bandwidth_omega(&self) -> f64 {
        2.0 / self.duration_ps
    }
}

/// One quasi-monochromatic slice of a long pump pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSlice {
    /// Peak gain during this slice, `g exp(-t_k^2 / tau_p^2)`.
    pub gain: f64,
    /// Temporal extent of the slice, ps.
    pub duration_ps: f64,
    /// Slice centre relative to the pulse centre, ps.
    pub center_ps: f64,
}

/// Splits a pulse of duration `tau_p` into `max(1, round(tau_p / slice_len))`
/// equal slices covering `[-tau_p / 2, tau_p / 2]`, each carrying the envelope
/// gain at its centre.  Slices are statistically independent emitters, so
/// ensemble counts from a long pulse are sums over the returned plan.
pub fn time_slice_plan(pump: &PumpSpec, slice_len_ps: f64) -> Result<Vec<PumpSlice>> {
    if !slice_len_ps.is_finite() || slice_len_ps <= 0.0 {
        return Err(invalid(format!("slice length must be > 0, got {slice_len_ps}")));
    }
    let tau = pump.duration_ps();
    let n = (tau / slice_len_ps).round().max(1.0) as usize;
    let duration = tau / n as f64;
    let plan = (0..n)
        .map(|k| {
            let center = -tau / 2.0 + (k as f64 + 0.5) * duration;
            let envelope = (-(center * center) / (tau * tau)).exp();
            PumpSlice { gain: pump.gain() * envelope, duration_ps: duration, center_ps: center }
        })
        .collect();
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pump(tau: f64) -> PumpSpec {
        PumpSpec::new(1500.0, tau, 1.45, 0.704).unwrap()
    }

    #[test]
    fn short_pulse_is_a_single_full_gain_slice() {
        let plan = time_slice_plan(&pump(5.0), 5.0).unwrap();
        assert_eq!(plan.len(), 1);
        assert_relative_eq!(plan[0].duration_ps, 5.0);
        assert_relative_eq!(plan[0].center_ps, 0.0);
        assert_relative_eq!(plan[0].gain, 1.45);
    }

    #[test]
    fn long_pulse_splits_into_enveloped_slices() {
        let plan = time_slice_plan(&pump(1000.0), 5.0).unwrap();
        assert_eq!(plan.len(), 200);
        assert_relative_eq!(plan[0].center_ps, -497.5);
        assert_relative_eq!(plan[199].center_ps, 497.5);
        // Envelope is symmetric and peaks at the centre.
        assert_relative_eq!(plan[0].gain, plan[199].gain, epsilon = 1e-12);
        assert!(plan[100].gain > plan[0].gain);
        assert_relative_eq!(plan[0].gain, 1.45 * (-(497.5_f64 / 1000.0).powi(2)).exp());
    }

    #[test]
    fn low_gain_yield_scales_linearly_with_duration() {
        // At low gain the pair yield per slice goes as gain^2, so the summed
        // yield must scale with pulse duration for a fixed envelope shape.
        let weak = |tau: f64| {
            let p = PumpSpec::new(1500.0, tau, 0.01, 0.704).unwrap();
            time_slice_plan(&p, 5.0)
                .unwrap()
                .iter()
                .map(|s| s.gain.sinh().powi(2))
                .sum::<f64>()
        };
        let ratio = weak(1000.0) / weak(250.0);
        assert_relative_eq!(ratio, 4.0, epsilon = 1e-3);
    }

    #[test]
    fn envelope_and_bandwidths() {
        let p = pump(5.0);
        assert_relative_eq!(p.amplitude(0.0, 0.0), 1.0);
        assert_relative_eq!(p.amplitude(1500.0, 0.0), (-1.0_f64).exp());
        assert_relative_eq!(p.bandwidth_q(), 2.0 / 1500.0);
        assert_relative_eq!(p.bandwidth_omega(), 0.4);
        assert!(PumpSpec::new(1500.0, 5.0, -0.1, 0.704).is_err());
    }
}
