//! Analytic two-mode squeezing in the plane-wave-pump limit.
//!
//! When the pump waist is much wider than any structure of interest, the
//! interaction couples only phase-conjugate mode pairs `(q, Omega)` of arm
//! one with `(-q, -Omega)` of arm two, and the crystal acts as a bank of
//! independent two-mode squeezers.  With the accumulated mismatch
//! `Delta(q, Omega) = D_1(q, Omega) + D_2(-q, -Omega) + Delta_0` and
//! `h = Delta l_c / 2`, the transfer functions over a crystal of length
//! `l_c` at peak gain `g` are
//!
//! ```text
//! Gamma = sqrt(g^2 - h^2)            (oscillatory branch when negative)
//! U_1   = exp(i (D_1 l_c - h)) [cosh Gamma + i h sinh(Gamma) / Gamma]
//! V_1   = exp(i (D_1 l_c - h))  g  sinh(Gamma) / Gamma
//! ```
//!
//! and the arm-two pair with the roles of the dispersion relations swapped.
//! These phases make the map exactly symplectic, `|U|^2 - |V|^2 = 1`, and
//! give `U_1(q) V_1^*(q) = U_2(-q) V_2^*(-q)`, which is why the photon-number
//! difference between conjugate cells is conserved realization by
//! realization.

use ndarray::Array3;
use num_complex::Complex64;

use crate::crystal::CrystalSpec;
use crate::error::{invalid, Result};
use crate::fft::Fft2;
use crate::field::{FieldPair, Plane};
use crate::grid::GridSpec;
use crate::Arm;

/// Precomputed per-cell transfer functions of the plane-wave-pump squeezer.
#[derive(Debug, Clone)]
pub struct PwpGain {
    u1: Array3<Complex64>,
    v1: Array3<Complex64>,
    u2: Array3<Complex64>,
    v2: Array3<Complex64>,
    grid: GridSpec,
    length_um: f64,
}

/// `cosh Gamma` and `sinh(Gamma)/Gamma` for `Gamma^2 = s`, valid on both the
/// hyperbolic (`s > 0`) and oscillatory (`s < 0`) branches, with a series
/// expansion bridging `s -> 0`.
fn hyperbolic_pair(s: f64) -> (f64, f64) {
    if s > 1e-8 {
        let gamma = s.sqrt();
        (gamma.cosh(), gamma.sinh() / gamma)
    } else if s < -1e-8 {
        let gamma = (-s).sqrt();
        (gamma.cos(), gamma.sin() / gamma)
    } else {
        // cosh(x) = 1 + s/2 + s^2/24 + ..., sinh(x)/x = 1 + s/6 + s^2/120
        // with s = x^2; accurate to ~1e-25 at |s| <= 1e-8.
        (1.0 + s / 2.0 + s * s / 24.0, 1.0 + s / 6.0 + s * s / 120.0)
    }
}

/// Evaluates the transfer functions on every grid cell for peak gain `gain`.
pub fn pwp_gains(grid: &GridSpec, gain: f64, crystal: &CrystalSpec) -> Result<PwpGain> {
    if !gain.is_finite() || gain < 0.0 {
        return Err(invalid(format!("parametric gain must be >= 0, got {gain}")));
    }
    crystal.validate_against_grid(grid)?;
    let l = crystal.length_um();
    let shape = (grid.nt(), grid.ny(), grid.nx());
    let mut u1 = Array3::zeros(shape);
    let mut v1 = Array3::zeros(shape);
    let mut u2 = Array3::zeros(shape);
    let mut v2 = Array3::zeros(shape);
    for k in 0..grid.nt() {
        let om = grid.omega(k);
        let omc = grid.omega(conjugate_index(k, grid.nt()));
        for j in 0..grid.ny() {
            let qy = grid.qy(j);
            let qyc = grid.qy(conjugate_index(j, grid.ny()));
            for i in 0..grid.nx() {
                let qx = grid.qx(i);
                // The partner dispersion is evaluated at the partner cell's
                // own grid frequency.  That is exactly -q except on the
                // self-paired Nyquist planes, where the aliased frequency
                // keeps the discrete pairing (and hence the conservation
                // identities) self-consistent with the split-step integrator.
                let qxc = grid.qx(conjugate_index(i, grid.nx()));
                let d_self = [
                    crystal.axial_phase_rate(Arm::One, qx, qy, om),
                    crystal.axial_phase_rate(Arm::Two, qx, qy, om),
                ];
                let d_partner = [
                    crystal.axial_phase_rate(Arm::Two, qxc, qyc, omc),
                    crystal.axial_phase_rate(Arm::One, qxc, qyc, omc),
                ];
                for (arm, (u, v)) in [(&mut u1, &mut v1), (&mut u2, &mut v2)]
                    .into_iter()
                    .enumerate()
                {
                    let delta = d_self[arm] + d_partner[arm] + crystal.delta0_per_um();
                    let h = delta * l / 2.0;
                    let (cosh_g, sinhc_g) = hyperbolic_pair(gain * gain - h * h);
                    let phase = Complex64::from_polar(1.0, d_self[arm] * l - h);
                    u[[k, j, i]] = phase * Complex64::new(cosh_g, h * sinhc_g);
                    v[[k, j, i]] = phase * (gain * sinhc_g);
                }
            }
        }
    }
    Ok(PwpGain { u1, v1, u2, v2, grid: *grid, length_um: l })
}

impl PwpGain {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Self-gain `U` of one arm.
    pub fn u(&self, arm: Arm) -> &Array3<Complex64> {
        match arm {
            Arm::One => &self.u1,
            Arm::Two => &self.u2,
        }
    }

    /// Cross-gain `V` of one arm.
    pub fn v(&self, arm: Arm) -> &Array3<Complex64> {
        match arm {
            Arm::One => &self.v1,
            Arm::Two => &self.v2,
        }
    }

    /// Expected photons per cell `|V|^2` summed over the whole grid for one
    /// arm: the mean Wigner intensity above vacuum after applying the gain.
    pub fn total_mean_photons(&self, arm: Arm) -> f64 {
        self.v(arm).iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Index of the phase-conjugate partner cell on an axis in natural FFT order.
pub(crate) fn conjugate_index(i: usize, n: usize) -> usize {
    (n - i) % n
}

/// Applies the plane-wave-pump squeezing transformation to a source-plane
/// pair: in the spectral domain each cell mixes with the conjugate cell of
/// the other arm, `c_1'(q, Omega) = U_1 c_1(q, Omega) + V_1 c_2^*(-q,
/// -Omega)` and correspondingly for arm two.  Returns the pair at the crystal
/// exit face, back in the mixed representation.
pub fn apply_pwp(fields: FieldPair, gains: &PwpGain) -> Result<FieldPair> {
    if fields.grid() != gains.grid() {
        return Err(crate::TwinError::ShapeMismatch(format!(
            "field grid {:?} does not match gain grid {:?}",
            fields.grid(),
            gains.grid()
        )));
    }
    if !matches!(fields.plane(), Plane::Source) {
        return Err(invalid("apply_pwp requires a source-plane field"));
    }
    let grid = *fields.grid();
    let (nt, ny, nx) = (grid.nt(), grid.ny(), grid.nx());
    let mut fields = fields;
    let mut fft = Fft2::new(nx, ny);
    for field in [&mut fields.c1, &mut fields.c2] {
        for mut plane in field.outer_iter_mut() {
            fft.forward(plane.as_slice_mut().expect("contiguous plane"));
        }
    }
    let in1 = fields.c1.clone();
    let in2 = fields.c2.clone();
    for k in 0..nt {
        let kc = conjugate_index(k, nt);
        for j in 0..ny {
            let jc = conjugate_index(j, ny);
            for i in 0..nx {
                let ic = conjugate_index(i, nx);
                let a1 = in1[[k, j, i]];
                let a2 = in2[[k, j, i]];
                let b1 = in1[[kc, jc, ic]].conj();
                let b2 = in2[[kc, jc, ic]].conj();
                fields.c1[[k, j, i]] = gains.u1[[k, j, i]] * a1 + gains.v1[[k, j, i]] * b2;
                fields.c2[[k, j, i]] = gains.u2[[k, j, i]] * a2 + gains.v2[[k, j, i]] * b1;
            }
        }
    }
    for field in [&mut fields.c1, &mut fields.c2] {
        for mut plane in field.outer_iter_mut() {
            fft.inverse(plane.as_slice_mut().expect("contiguous plane"));
        }
    }
    fields.z_um = gains.length_um;
    fields.assert_finite("apply_pwp")?;
    Ok(fields)
}
