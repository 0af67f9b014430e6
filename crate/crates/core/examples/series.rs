// Truncated Boltzmann series for the one-particle marginal, with the
// per-order breakdown and a geometric tail bound.

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::hierarchy_mc::{assemble_series, InitialData, OneParticleDensity, SeriesConfig, SeriesMode};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::{TwoBody, TwoBodyOptions};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::with_options(RadialPotential::smooth_junction(0.1, 20.0)?, TwoBodyOptions::fast());
    let init = InitialData::product(OneParticleDensity::Bimodal { x_sigma: 0.6, offset: 0.8, beta: 1.0 });
    let z = [PhasePoint::new(Vec3::new(0.2, -0.1, 0.1), Vec3::new(0.4, 0.3, -0.2))];
    let config = SeriesConfig { n_bar: 2, ..Default::default() };
    let s = assemble_series(1, &z, 0.3, &config, SeriesMode::Boltzmann, &tb, &init, 4000, 3)?;
    for o in &s.orders {
        println!("n = {}: {:.6e} +- {:.1e}", o.n, o.value, o.std_error);
    }
    println!("f_1 = {:.6e} +- {:.1e}, tail bound {:?}", s.estimate.value, s.estimate.std_error, s.tail_bound);
    for w in &s.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
