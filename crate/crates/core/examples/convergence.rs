// Boltzmann against interacting series at shrinking ε, on matched
// random streams.

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::hierarchy_mc::{convergence_experiment, InitialData, OneParticleDensity, SeriesConfig};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::{TwoBody, TwoBodyOptions};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::with_options(RadialPotential::smooth_junction(0.1, 20.0)?, TwoBodyOptions::fast());
    let init = InitialData::product(OneParticleDensity::Bimodal { x_sigma: 0.6, offset: 0.8, beta: 1.0 });
    let z = [PhasePoint::new(Vec3::new(0.2, -0.1, 0.1), Vec3::new(0.4, 0.3, -0.2))];
    let config = SeriesConfig { n_bar: 1, ..Default::default() };
    let table = convergence_experiment(1, &z, 0.3, &[1e-2, 1e-3], &config, &tb, &init, 2000, 13)?;
    println!("f_1 = {:.6e}", table.boltzmann.value);
    for r in &table.rows {
        println!("eps {:.0e}  N {:>8}  gap {:+.2e} +- {:.1e}  overlap {:.3}", r.epsilon, r.n_particles, r.gap, r.paired_err, r.overlap_fraction);
    }
    println!("slope {:?} (reference {})", table.slope, table.gamma_reference);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
