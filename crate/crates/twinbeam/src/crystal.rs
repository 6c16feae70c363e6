//! Crystal dispersion and phase matching.
//!
//! Each downconverted field accumulates axial phase at the rate
//! `D_j(q, Omega) = sqrt(k_j(Omega)^2 - q^2) - k_j - rho_j q_x`,
//! where `k_j(Omega) = k_j + k'_j Omega + (1/2) k''_j Omega^2` expands the
//! frequency dependence to second order (group delay and group-velocity
//! dispersion), the square root is exact in `|q|` (diffraction), and `rho_j`
//! tilts the Poynting vector of extraordinary waves along x (spatial
//! walk-off).  The carrier contribution `k_j` is removed because the
//! envelopes are defined relative to it.

use crate::error::{invalid, Result};
use crate::grid::GridSpec;
use crate::Arm;

/// Dispersion data for a nonlinear crystal cut for type II downconversion.
///
/// Lengths are quoted in millimetres and dispersion coefficients per
/// millimetre, matching how crystal data sheets tabulate them; conversions to
/// the micrometre/picosecond units used on the grid happen internally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalSpec {
    /// Crystal length, mm.
    pub length_mm: f64,
    /// Residual collinear phase mismatch `Delta_0`, 1/mm.
    pub delta0_per_mm: f64,
    /// Carrier wavenumber of arm one inside the crystal, 1/um.
    pub k1_per_um: f64,
    /// Carrier wavenumber of arm two inside the crystal, 1/um.
    pub k2_per_um: f64,
    /// Inverse group velocity of arm one, ps/mm.
    pub group_delay1_ps_per_mm: f64,
    /// Inverse group velocity of arm two, ps/mm.
    pub group_delay2_ps_per_mm: f64,
    /// Group-velocity dispersion of arm one, ps^2/mm.
    pub gvd1_ps2_per_mm: f64,
    /// Group-velocity dispersion of arm two, ps^2/mm.
    pub gvd2_ps2_per_mm: f64,
    /// Walk-off angle of arm one along x, rad.
    pub walkoff1_rad: f64,
    /// Walk-off angle of arm two along x, rad.
    pub walkoff2_rad: f64,
    /// Walk-off angle of the pump along x, rad.
    pub walkoff_pump_rad: f64,
    /// Degenerate carrier wavelength of the downconverted light in air, um.
    pub wavelength_um: f64,
}

impl CrystalSpec {
    /// A 4 mm beta-barium borate crystal cut for collinear degenerate type II
    /// downconversion of a 352 nm pump.
    ///
    /// Coefficient values derive from the BBO Sellmeier equations at 704 nm:
    /// the ordinary arm sees n_o = 1.665 (k = 14.86 1/um) with group index
    /// 1.685 (5.62 ps/mm) and GVD 75 fs^2/mm; the extraordinary arm at the
    /// type II phase-matching angle sees n_e = 1.571 (k = 14.02 1/um), group
    /// index 1.631 (5.44 ps/mm), GVD 50 fs^2/mm, and walks off by 70 mrad
    /// together with the extraordinary pump.  Exact collinear phase matching
    /// is assumed (`Delta_0 = 0`).
    pub fn bbo_type2_704() -> Self {
        Self {
            length_mm: 4.0,
            delta0_per_mm: 0.0,
            k1_per_um: 14.86,
            k2_per_um: 14.02,
            group_delay1_ps_per_mm: 5.62,
            group_delay2_ps_per_mm: 5.44,
            gvd1_ps2_per_mm: 7.5e-5,
            gvd2_ps2_per_mm: 5.0e-5,
            walkoff1_rad: 0.0,
            walkoff2_rad: 0.07,
            walkoff_pump_rad: 0.07,
            wavelength_um: 0.704,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.length_mm.is_finite() || self.length_mm <= 0.0 {
            return Err(invalid(format!("crystal length must be > 0, got {}", self.length_mm)));
        }
        if !self.k1_per_um.is_finite() || self.k1_per_um <= 0.0 {
            return Err(invalid(format!("k1 must be > 0, got {}", self.k1_per_um)));
        }
        if !self.k2_per_um.is_finite() || self.k2_per_um <= 0.0 {
            return Err(invalid(format!("k2 must be > 0, got {}", self.k2_per_um)));
        }
        if !self.wavelength_um.is_finite() || self.wavelength_um <= 0.0 {
            return Err(invalid(format!("wavelength must be > 0, got {}", self.wavelength_um)));
        }
        for v in [
            self.delta0_per_mm,
            self.group_delay1_ps_per_mm,
            self.group_delay2_ps_per_mm,
            self.gvd1_ps2_per_mm,
            self.gvd2_ps2_per_mm,
            self.walkoff1_rad,
            self.walkoff2_rad,
            self.walkoff_pump_rad,
        ] {
            if !v.is_finite() {
                return Err(invalid("crystal coefficients must be finite"));
            }
        }
        Ok(())
    }

    pub fn length_um(&self) -> f64 {
        self.length_mm * 1000.0
    }

    /// Residual collinear mismatch in 1/um.
    pub fn delta0_per_um(&self) -> f64 {
        self.delta0_per_mm / 1000.0
    }

    fn carrier(&self, arm: Arm) -> f64 {
        match arm {
            Arm::One => self.k1_per_um,
            Arm::Two => self.k2_per_um,
        }
    }

    fn walkoff(&self, arm: Arm) -> f64 {
        match arm {
            Arm::One => self.walkoff1_rad,
            Arm::Two => self.walkoff2_rad,
        }
    }

    /// Frequency-dependent wavenumber `k_j(Omega)` of one arm, 1/um, with
    /// `Omega` the offset from the degenerate carrier in rad/ps.
    pub fn wavenumber(&self, arm: Arm, omega: f64) -> f64 {
        let (beta, gamma) = match arm {
            Arm::One => (self.group_delay1_ps_per_mm, self.gvd1_ps2_per_mm),
            Arm::Two => (self.group_delay2_ps_per_mm, self.gvd2_ps2_per_mm),
        };
        self.carrier(arm) + (beta * omega + 0.5 * gamma * omega * omega) / 1000.0
    }

    /// Axial phase rate `D_j(q, Omega)` relative to the carrier, 1/um.
    /// Callers must keep `(q, Omega)` inside the propagating region (checked
    /// grid-wide by [`CrystalSpec::validate_against_grid`]); the square root
    /// would otherwise go evanescent.
    pub fn axial_phase_rate(&self, arm: Arm, qx: f64, qy: f64, omega: f64) -> f64 {
        let k_om = self.wavenumber(arm, omega);
        let kz2 = k_om * k_om - qx * qx - qy * qy;
        kz2.max(0.0).sqrt() - self.carrier(arm) - self.walkoff(arm) * qx
    }

    /// Checks that every `(q, Omega)` cell of `grid` remains propagating
    /// (real axial wavenumber) for both arms, with a small safety margin.
    pub fn validate_against_grid(&self, grid: &GridSpec) -> Result<()> {
        self.validate()?;
        let q2_max = {
            let qx = grid.nx() as f64 / 2.0 * grid.dqx();
            let qy = grid.ny() as f64 / 2.0 * grid.dqy();
            qx * qx + qy * qy
        };
        let om_max = grid.nt() as f64 / 2.0 * grid.domega();
        for arm in [Arm::One, Arm::Two] {
            // The quadratic k_j(Omega) attains its window minimum at an edge
            // or at its vertex if that falls inside the window.
            let (beta, gamma) = match arm {
                Arm::One => (self.group_delay1_ps_per_mm, self.gvd1_ps2_per_mm),
                Arm::Two => (self.group_delay2_ps_per_mm, self.gvd2_ps2_per_mm),
            };
            let mut candidates = vec![-om_max, om_max];
            if gamma != 0.0 {
                let vertex = -beta / gamma;
                if vertex.abs() < om_max {
                    candidates.push(vertex);
                }
            }
            let k_min = candidates
                .into_iter()
                .map(|om| self.wavenumber(arm, om))
                .fold(f64::INFINITY, f64::min);
            if k_min * k_min <= q2_max * 1.0001 {
                return Err(invalid(format!(
                    "grid wavevector window reaches the evanescent region: \
                     min k = {k_min:.4} 1/um vs max |q| = {:.4} 1/um",
                    q2_max.sqrt()
                )));
            }
        }
        Ok(())
    }
}
