// Marginal of the excluded-volume initial datum and the ratio F^N/Z_N.

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::hierarchy_mc::{initial_marginal_excluded_volume, ExcludedVolumeOptions, OneParticleDensity};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f0 = OneParticleDensity::gaussian(1.0, 1.0)?;
    let eps = 1.0 / 16.0;
    let z = [PhasePoint::new(Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0)), PhasePoint::new(Vec3::new(0.5, 0.0, 0.0), Vec3::zeros())];
    let e = initial_marginal_excluded_volume(&f0, 256, eps, &z, 200, 1, &ExcludedVolumeOptions::default())?;
    println!("ratio {:.5} +- {:.5}, bounds [{:.5}, {:.5}]", e.ratio, e.ratio_std_error, e.ratio_bounds.0, e.ratio_bounds.1);
    println!("marginal {:.6e} +- {:.1e}, acceptance {:.3}", e.marginal.value, e.marginal.std_error, e.acceptance);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
