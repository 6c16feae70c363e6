//! Split-step integration of the twin-beam propagation equations.
//!
//! Inside the crystal each envelope obeys
//! `dc_1/dz = i D_1 c_1 + (g / l_c) A_p(x, y, z) e^{-i Delta_0 z} c_2^*`
//! (and the arm-two equation with subscripts exchanged), where `D_j` is the
//! linear axial phase rate of [`CrystalSpec`] and `A_p` the normalized pump
//! envelope drifting along x at the pump walk-off angle.  The integrator
//! uses symmetric Strang splitting: linear half-steps applied as diagonal
//! phase factors in `(q, Omega)` space, and nonlinear full-steps applied in
//! direct transverse space, where the frozen-coefficient two-mode coupling
//! has the exact hyperbolic solution
//!
//! ```text
//! c_1' = cosh(theta) c_1 + e^{-i phi} sinh(theta) c_2^*,   theta = g A_p dz / l_c
//! ```
//!
//! pairing temporal frequency `Omega` of one arm with `-Omega` of the other.
//! Both substeps conserve the photon-number difference between the arms
//! exactly, realization by realization.

use ndarray::{Array2, Array3};
use num_complex::Complex64;

use crate::crystal::CrystalSpec;
use crate::error::{invalid, Result};
use crate::fft::Fft2;
use crate::field::{FieldPair, Plane};
use crate::grid::GridSpec;
use crate::pump::PumpSpec;
use crate::Arm;

/// Reusable split-step integrator: precomputes the linear phase factors and
/// the per-step pump profiles once, then runs any number of trajectories
/// (optionally at per-slice gains) on the same geometry.
pub struct Propagator {
    grid: GridSpec,
    n_steps: usize,
    length_um: f64,
    half1: Array3<Complex64>,
    half2: Array3<Complex64>,
    full1: Array3<Complex64>,
    full2: Array3<Complex64>,
    /// Unit-gain coupling angle per step: `(dz / l_c) A_p(x - rho_p z, y)`.
    theta_base: Vec<Array2<f64>>,
    /// Pump phase `e^{-i Delta_0 z}` frozen at each step midpoint.
    pump_phase: Vec<Complex64>,
    fft: Fft2,
    cosh_plane: Vec<f64>,
    mix_plane: Vec<Complex64>,
}

impl Propagator {
    pub fn new(
        grid: &GridSpec,
        pump: &PumpSpec,
        crystal: &CrystalSpec,
        n_steps: usize,
    ) -> Result<Self> {
        if n_steps < 4 {
            return Err(invalid(format!("split-step needs n_steps >= 4, got {n_steps}")));
        }
        crystal.validate_against_grid(grid)?;
        let length_um = crystal.length_um();
        let dz = length_um / n_steps as f64;
        let shape = (grid.nt(), grid.ny(), grid.nx());
        let mut half1 = Array3::zeros(shape);
        let mut half2 = Array3::zeros(shape);
        let mut full1 = Array3::zeros(shape);
        let mut full2 = Array3::zeros(shape);
        for k in 0..grid.nt() {
            let om = grid.omega(k);
            for j in 0..grid.ny() {
                let qy = grid.qy(j);
                for i in 0..grid.nx() {
                    let qx = grid.qx(i);
                    let d1 = crystal.axial_phase_rate(Arm::One, qx, qy, om);
                    let d2 = crystal.axial_phase_rate(Arm::Two, qx, qy, om);
                    half1[[k, j, i]] = Complex64::from_polar(1.0, d1 * dz / 2.0);
                    half2[[k, j, i]] = Complex64::from_polar(1.0, d2 * dz / 2.0);
                    full1[[k, j, i]] = Complex64::from_polar(1.0, d1 * dz);
                    full2[[k, j, i]] = Complex64::from_polar(1.0, d2 * dz);
                }
            }
        }
        let mut theta_base = Vec::with_capacity(n_steps);
        let mut pump_phase = Vec::with_capacity(n_steps);
        for s in 0..n_steps {
            let z_mid = (s as f64 + 0.5) * dz;
            let x_pump = crystal.walkoff_pump_rad * z_mid;
            let mut theta = Array2::zeros((grid.ny(), grid.nx()));
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let envelope = pump.amplitude(grid.x_um(i) - x_pump, grid.y_um(j));
                    theta[[j, i]] = dz / length_um * envelope;
                }
            }
            theta_base.push(theta);
            pump_phase.push(Complex64::from_polar(1.0, -crystal.delta0_per_um() * z_mid));
        }
        Ok(Self {
            grid: *grid,
            n_steps,
            length_um,
            half1,
            half2,
            full1,
            full2,
            theta_base,
            pump_phase,
            fft: Fft2::new(grid.nx(), grid.ny()),
            cosh_plane: vec![0.0; grid.transverse_cells()],
            mix_plane: vec![Complex64::ZERO; grid.transverse_cells()],
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn length_um(&self) -> f64 {
        self.length_um
    }

    /// Integrates one pair from the crystal entrance to its exit face at the
    /// given peak gain (e.g. the gain of one pump slice).
    pub fn run(&mut self, fields: FieldPair, gain: f64) -> Result<FieldPair> {
        if fields.grid() != &self.grid {
            return Err(crate::TwinError::ShapeMismatch(
                "field grid does not match propagator grid".into(),
            ));
        }
        if !matches!(fields.plane(), Plane::Source) || fields.z_um() != 0.0 {
            return Err(invalid("propagation starts from a source-plane field at z = 0"));
        }
        if !gain.is_finite() || gain < 0.0 {
            return Err(invalid(format!("parametric gain must be >= 0, got {gain}")));
        }
        let mut fields = fields;
        self.apply_linear(&mut fields, true);
        for s in 0..self.n_steps {
            self.apply_nonlinear(&mut fields, s, gain);
            self.apply_linear(&mut fields, s + 1 == self.n_steps);
            fields.assert_finite("split-step propagation")?;
        }
        fields.z_um = self.length_um;
        Ok(fields)
    }

    fn apply_linear(&mut self, fields: &mut FieldPair, half: bool) {
        let (p1, p2) = if half {
            (&self.half1, &self.half2)
        } else {
            (&self.full1, &self.full2)
        };
        let fft = &mut self.fft;
        for (field, phase) in [(&mut fields.c1, p1), (&mut fields.c2, p2)] {
            for (mut plane, phase_plane) in field.outer_iter_mut().zip(phase.outer_iter()) {
                let cells = plane.as_slice_mut().expect("contiguous plane");
                fft.forward(cells);
                for (c, p) in cells.iter_mut().zip(phase_plane.as_slice().unwrap()) {
                    *c *= *p;
                }
                fft.inverse(cells);
            }
        }
    }

    fn apply_nonlinear(&mut self, fields: &mut FieldPair, step: usize, gain: f64) {
        let (nt, ny, nx) = (self.grid.nt(), self.grid.ny(), self.grid.nx());
        let theta = &self.theta_base[step];
        let phase = self.pump_phase[step];
        // theta is Omega-independent: evaluate the hyperbolic factors once
        // per transverse cell and reuse them across all frequency pairs.
        for (idx, t) in theta.iter().enumerate() {
            let th = gain * t;
            self.cosh_plane[idx] = th.cosh();
            self.mix_plane[idx] = phase * th.sinh();
        }
        for k in 0..=nt / 2 {
            let kc = (nt - k) % nt;
            for j in 0..ny {
                for i in 0..nx {
                    let ch = self.cosh_plane[j * nx + i];
                    let f = self.mix_plane[j * nx + i];
                    if k == kc {
                        let a = fields.c1[[k, j, i]];
                        let b = fields.c2[[k, j, i]];
                        fields.c1[[k, j, i]] = ch * a + f * b.conj();
                        fields.c2[[k, j, i]] = ch * b + f * a.conj();
                    } else {
                        let a = fields.c1[[k, j, i]];
                        let b = fields.c2[[kc, j, i]];
                        fields.c1[[k, j, i]] = ch * a + f * b.conj();
                        fields.c2[[kc, j, i]] = ch * b + f * a.conj();
                        let c = fields.c1[[kc, j, i]];
                        let d = fields.c2[[k, j, i]];
                        fields.c1[[kc, j, i]] = ch * c + f * d.conj();
                        fields.c2[[k, j, i]] = ch * d + f * c.conj();
                    }
                }
            }
        }
    }
}

/// One-shot convenience wrapper around [`Propagator`] running at the pump's
/// peak gain.
pub fn propagate_split_step(
    fields: FieldPair,
    pump: &PumpSpec,
    crystal: &CrystalSpec,
    n_steps: usize,
) -> Result<FieldPair> {
    Propagator::new(fields.grid(), pump, crystal, n_steps)?.run(fields, pump.gain())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_vacuum, spectral_probe};
    use crate::pwp::pwp_gains;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn grid() -> GridSpec {
        GridSpec::new(32, 32, 8, 220.0, 220.0, 0.625).unwrap()
    }

    fn spectra(fp: &FieldPair) -> (Array3<Complex64>, Array3<Complex64>) {
        let g = fp.grid();
        let mut s1 = fp.c1().clone();
        let mut s2 = fp.c2().clone();
        let mut fft = Fft2::new(g.nx(), g.ny());
        for field in [&mut s1, &mut s2] {
            for mut plane in field.outer_iter_mut() {
                fft.forward(plane.as_slice_mut().unwrap());
            }
        }
        (s1, s2)
    }

    #[test]
    fn zero_gain_preserves_every_spectral_occupation() {
        let g = grid();
        let pump = PumpSpec::new(1500.0, 5.0, 0.0, 0.704).unwrap();
        let crystal = CrystalSpec::bbo_type2_704();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let f = sample_vacuum(&g, &mut rng);
        let (in1, _) = spectra(&f);
        let out = propagate_split_step(f, &pump, &crystal, 8).unwrap();
        let (out1, _) = spectra(&out);
        for (a, b) in in1.iter().zip(out1.iter()) {
            assert_relative_eq!(a.norm_sqr(), b.norm_sqr(), epsilon = 1e-12);
        }
        assert_relative_eq!(out.z_um(), 4000.0);
    }

    #[test]
    fn photon_number_difference_is_conserved_at_high_gain() {
        let g = grid();
        let pump = PumpSpec::new(1500.0, 5.0, 1.45, 0.704).unwrap();
        let crystal = CrystalSpec::bbo_type2_704();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let f = sample_vacuum(&g, &mut rng);
        let (i1, i2) = f.wigner_intensity();
        let out = propagate_split_step(f, &pump, &crystal, 16).unwrap();
        let (o1, o2) = out.wigner_intensity();
        // The vacuum floor is 0.5 per cell; the pump spot adds real photons
        // on top of it.
        assert!(o1 - i1 > 300.0, "expected substantial gain, got {i1} -> {o1}");
        assert_relative_eq!(o1 - o2, i1 - i2, epsilon = 1e-9 * o1);
    }

    #[test]
    fn halving_the_step_barely_moves_far_field_moments() {
        let g = grid();
        let crystal = CrystalSpec::bbo_type2_704();
        let pump = PumpSpec::new(1500.0, 5.0, 2.0, 0.704).unwrap();
        let second_moment = |n_steps: usize| {
            let out = propagate_split_step(spectral_probe(&g, Arm::One), &pump, &crystal, n_steps)
                .unwrap()
                .to_far_field(5.0e4, 0.704)
                .unwrap();
            let (mut num, mut den) = (0.0, 0.0);
            for k in 0..g.nt() {
                for j in 0..g.ny() {
                    for i in 0..g.nx() {
                        let w = out.c2()[[k, j, i]].norm_sqr();
                        let x = (i as f64 - (g.nx() / 2) as f64).powi(2)
                            + (j as f64 - (g.ny() / 2) as f64).powi(2);
                        num += w * x;
                        den += w;
                    }
                }
            }
            num / den
        };
        let coarse = second_moment(16);
        let fine = second_moment(32);
        assert!(
            (coarse - fine).abs() / fine < 5e-3,
            "second moment moved {coarse} -> {fine} on step halving"
        );
    }

    #[test]
    fn wide_pump_limit_matches_the_analytic_squeezer() {
        let g = grid();
        let crystal = CrystalSpec::bbo_type2_704();
        let pump = PumpSpec::new(1.0e6, 5.0, 1.45, 0.704).unwrap();
        let out =
            propagate_split_step(spectral_probe(&g, Arm::One), &pump, &crystal, 32).unwrap();
        let (s1, s2) = spectra(&out);
        let gains = pwp_gains(&g, 1.45, &crystal).unwrap();
        let rel_l2 = |got: &Array3<Complex64>, want: &Array3<Complex64>| {
            let (mut err, mut norm) = (0.0, 0.0);
            for (a, b) in got.iter().zip(want.iter()) {
                err += (a.norm_sqr() - b.norm_sqr()).powi(2);
                norm += b.norm_sqr().powi(2);
            }
            (err / norm).sqrt()
        };
        let u_err = rel_l2(&s1, gains.u(Arm::One));
        let v_err = rel_l2(&s2, gains.v(Arm::Two));
        assert!(u_err < 0.02, "self-gain spectrum off by {u_err} in relative L2");
        assert!(v_err < 0.02, "cross-gain spectrum off by {v_err} in relative L2");
    }

    #[test]
    fn arms_gain_equal_photon_numbers_on_average() {
        let g = grid();
        let crystal = CrystalSpec::bbo_type2_704();
        let pump = PumpSpec::new(1500.0, 5.0, 1.45, 0.704).unwrap();
        let mut prop = Propagator::new(&g, &pump, &crystal, 8).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let (mut n1, mut n2, mut sq) = (0.0, 0.0, 0.0);
        let draws = 24;
        for _ in 0..draws {
            let out = prop.run(sample_vacuum(&g, &mut rng), pump.gain()).unwrap();
            let (a, b) = out.mean_photons_per_mode();
            n1 += a / draws as f64;
            n2 += b / draws as f64;
            sq += a * a / draws as f64;
        }
        let se = ((sq - n1 * n1).max(0.0) / draws as f64).sqrt();
        assert!(
            (n1 - n2).abs() < 5.0 * se.max(1e-4),
            "arm means diverge: {n1} vs {n2} (se {se})"
        );
        assert!(n1 > 0.01, "expected measurable gain, got {n1}");
    }

    #[test]
    fn runaway_amplitudes_trip_the_guard() {
        let g = GridSpec::new(8, 8, 2, 880.0, 880.0, 2.5).unwrap();
        let crystal = CrystalSpec::bbo_type2_704();
        let pump = PumpSpec::new(1500.0, 5.0, 1.0e6, 0.704).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let err = propagate_split_step(sample_vacuum(&g, &mut rng), &pump, &crystal, 4);
        assert!(matches!(err, Err(crate::TwinError::Numeric(_))));
    }

    #[test]
    fn rejects_bad_preconditions() {
        let g = grid();
        let crystal = CrystalSpec::bbo_type2_704();
        let pump = PumpSpec::new(1500.0, 5.0, 1.0, 0.704).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let f = sample_vacuum(&g, &mut rng);
        assert!(propagate_split_step(f.clone(), &pump, &crystal, 3).is_err());
        let shifted = f.to_far_field(5.0e4, 0.704).unwrap();
        assert!(propagate_split_step(shifted, &pump, &crystal, 8).is_err());
    }
}
