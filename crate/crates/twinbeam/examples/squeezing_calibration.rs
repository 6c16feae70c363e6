//! Calibration of the split-step integrator against the plane-wave-pump
//! input-output relations.
//!
//! For an infinitely wide pump every (q, Omega) mode couples only to its
//! energy-matched partner (-q, -Omega) through a two-mode squeeze,
//! a(q) -> U a(q) + V a*(partner), with |U|^2 - |V|^2 = 1.  The split-step
//! integrator must reproduce exactly those gains when handed a very wide
//! pump, and a vacuum ensemble average of |a|^2 - 1/2 per mode must land on
//! |V|^2, the mean photon number of squeezed vacuum.
//!
//!     cargo run --release --example squeezing_calibration

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use twinbeam::crystal::CrystalSpec;
use twinbeam::field::sample_vacuum;
use twinbeam::grid::GridSpec;
use twinbeam::propagate::Propagator;
use twinbeam::pump::PumpSpec;
use twinbeam::pwp::pwp_gains;
use twinbeam::Arm;

fn main() -> twinbeam::Result<()> {
    let gain = 1.45;
    let grid = GridSpec::new(32, 32, 8, 110.0, 110.0, 0.625)?;
    // 1 m waist: flat over the 3.5 mm transverse window to ~1e-5.
    let wide_pump = PumpSpec::new(1.0e6, 5.0, gain, 0.704)?;
    let crystal = CrystalSpec::bbo_type2_704();

    let gains = pwp_gains(&grid, gain, &crystal)?;
    let mut worst_symplectic: f64 = 0.0;
    for k in 0..grid.nt() {
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let u = gains.u(Arm::One)[[k, j, i]].norm_sqr();
                let v = gains.v(Arm::One)[[k, j, i]].norm_sqr();
                worst_symplectic = worst_symplectic.max((u - v - 1.0).abs());
            }
        }
    }
    println!("plane-wave input-output relations on a {}x{}x{} grid:", grid.nx(), grid.ny(), grid.nt());
    println!("  worst ||U|^2 - |V|^2 - 1| over all modes = {worst_symplectic:.2e}");
    println!("  predicted photons per pulse, arm 1: {:.2}", gains.total_mean_photons(Arm::One));

    // Vacuum ensemble through the split-step integrator with the wide pump.
    let trials = 400;
    let mut prop = Propagator::new(&grid, &wide_pump, &crystal, 16)?;
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let (mut sum1, mut sum2) = (0.0, 0.0);
    for _ in 0..trials {
        let fields = sample_vacuum(&grid, &mut rng);
        let fields = prop.run(fields, gain)?;
        let (n1, n2) = fields.mean_photons_per_mode();
        sum1 += n1;
        sum2 += n2;
    }
    let measured = (sum1 / trials as f64, sum2 / trials as f64);
    let modes = (grid.nx() * grid.ny() * grid.nt()) as f64;
    let predicted = gains.total_mean_photons(Arm::One) / modes;

    println!("\nsplit-step vacuum ensemble, {trials} trials, wide pump:");
    println!("  measured photons per mode, arm 1: {:.5}", measured.0);
    println!("  measured photons per mode, arm 2: {:.5}", measured.1);
    println!("  plane-wave prediction:            {predicted:.5}");
    let rel = (measured.0 / predicted - 1.0).abs().max((measured.1 / predicted - 1.0).abs());
    println!("  worst relative deviation:         {:.2}%", rel * 100.0);
    // Ensemble noise with 400 trials over ~8k modes is well under a percent.
    assert!(rel < 0.02, "split-step disagrees with the plane-wave limit");
    Ok(())
}
