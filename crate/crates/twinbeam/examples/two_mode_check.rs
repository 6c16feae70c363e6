//! Monte Carlo check of the counting model against its closed form.
//!
//! Draws correlated thermal photon pairs mode by mode (the exact photon
//! statistics of two-mode squeezing), thins each arm binomially for
//! detection losses and the object, and compares every measured moment with
//! its prediction.  This oracle has no field discretization, so it pins the
//! statistical layer independently of the wave simulation.
//!
//!     cargo run --release --example two_mode_check

use twinbeam::analytic::{ArmEfficiencies, ModeBudget, ObjectParams};
use twinbeam::oracle::{predict, two_mode_oracle, OracleConfig};

fn main() -> twinbeam::Result<()> {
    // ~3500 detected photons per pulse from 1000 modes at gain 1.45.
    let config = OracleConfig::new(
        1.45,
        &ModeBudget::new(1000.0)?,
        ArmEfficiencies::balanced(0.9)?,
        ObjectParams::new(0.04)?,
        100_000,
    )?;
    let truth = predict(&config);
    let run = two_mode_oracle(&config, 42);

    println!(
        "{} trials x {} modes, gain {}, eta 0.9, alpha 0.04\n",
        run.trials,
        run.modes,
        config.gain()
    );
    let rows = [
        ("<N1>", run.mean_n1, truth.mean_n1),
        ("<N2>", run.mean_n2, truth.mean_n2),
        ("sigma", run.sigma, truth.sigma),
        ("E_n", run.excess_noise, truth.excess_noise),
        ("SNR", run.snr, truth.snr),
        ("R vs SQL", run.improvement, truth.improvement),
    ];
    println!("{:<10} {:>24} {:>12} {:>8}", "moment", "measured", "predicted", "pull");
    let mut worst: f64 = 0.0;
    for (name, est, want) in rows {
        let pull = (est.value - want) / est.stderr;
        worst = worst.max(pull.abs());
        println!("{name:<10} {est:>24} {want:>12.4} {pull:>+8.2}");
    }
    println!("\nworst pull: {worst:.2} standard errors");
    assert!(worst < 4.0, "counting model drifted from its closed form");
    Ok(())
}
