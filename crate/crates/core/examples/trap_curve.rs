// Circular-orbit curve of a Lennard-Jones type potential and the slow
// scatterings next to it.

use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::{trap_curve, TwoBody};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pot = RadialPotential::cutoff_lennard_jones();
    let grid: Vec<f64> = (1..=400).map(|i| i as f64 / 401.0).collect();
    let curve = trap_curve(&pot, &grid);
    println!("physical runs {:?}, arc length {:.4}", curve.physical_runs, curve.arc_length());
    let p = curve.physical_points().nth(5).expect("nonempty physical curve");
    println!("circular orbit at y = {:.4}: L^2 = {:.5}, V^2 = {:.5}", p.y, p.x, p.yv);

    // An incoming pair just above the curve spends a long time inside.
    let tb = TwoBody::new(pot);
    let speed = (p.yv * (1.0 + 1e-4)).sqrt();
    let rho = p.x.sqrt() / speed;
    let near = tb.scattering_time(rho, speed);
    let far = tb.scattering_time(0.2, 3.0)?;
    println!("tau* near the curve {near:?}, away from it {far:.4}");
    let nu = Vec3::new(-(1.0f64 - 0.04).sqrt(), 0.2, 0.0);
    println!("bad set at (0.2, 3.0): {}", tb.bad_set_membership(&nu, &Vec3::new(3.0, 0.0, 0.0), 1e-3, 10.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
