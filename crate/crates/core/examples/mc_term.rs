// Monte Carlo estimate of single hierarchy terms along the Boltzmann
// backward flow.

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::hierarchy_mc::{sample_term_bbf, InitialData, OneParticleDensity, SamplerOptions};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::trees_flows::TreeGraph;
use kinetic_limit::two_body::{TwoBody, TwoBodyOptions};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::with_options(RadialPotential::smooth_junction(0.1, 20.0)?, TwoBodyOptions::fast());
    let init = InitialData::product(OneParticleDensity::Bimodal { x_sigma: 0.6, offset: 0.8, beta: 1.0 });
    let z = [PhasePoint::new(Vec3::new(0.2, -0.1, 0.1), Vec3::new(0.4, 0.3, -0.2))];
    let tree = TreeGraph::new(1, vec![1])?;
    for sigma in ["+", "-"] {
        let est = sample_term_bbf(&tree, &sigma.parse()?, &z, 0.3, &init, &tb, 4000, 7, &SamplerOptions::default())?;
        let e = &est.estimate;
        println!("sigma {sigma}: {:.6e} +- {:.1e} ({} samples, rejected {:.3})", e.value, e.std_error, e.n_samples, e.rejected_fraction);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
