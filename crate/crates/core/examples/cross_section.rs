// Differential cross-section σ(Θ), summed over branches.

use std::f64::consts::FRAC_PI_2;

use kinetic_limit::cross_section::{branch_decompose, sigma_at};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::TwoBody;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::new(RadialPotential::arctan_wall(0.1)?);
    let dec = branch_decompose(&tb, 6f64.sqrt(), 100)?;
    for i in 1..8 {
        let theta = FRAC_PI_2 * i as f64 / 8.0;
        match sigma_at(&tb, &dec, theta) {
            Ok(s) => println!("theta {theta:.4}  sigma {:.6e}  branches {}  edge {}", s.sigma, s.branch_count, s.branch_edge_singular),
            Err(e) => println!("theta {theta:.4}  {e}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
