// Monotonicity branches of Θ(ρ) for a potential whose map folds back.

use kinetic_limit::cross_section::branch_decompose;
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::TwoBody;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::new(RadialPotential::arctan_wall(0.1)?);
    let speed = (2.0f64 * 3.0).sqrt();
    let dec = branch_decompose(&tb, speed, 100)?;
    for b in &dec.branches {
        println!("rho in [{:.4}, {:.4}]  theta {:.4} -> {:.4}  {:?}", b.rho_interval.0, b.rho_interval.1, b.theta_ends.0, b.theta_ends.1, b.direction);
    }
    assert!(dec.branches.len() >= 2);
    let finer = branch_decompose(&tb, speed, 200)?;
    assert_eq!(finer.branches.len(), dec.branches.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
