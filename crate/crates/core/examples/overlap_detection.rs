// Virtual trajectories of a Boltzmann backward flow and the δ-overlap test.

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::trees_flows::{build_bbf, overlap_detect, CollisionParams, TreeGraph};
use kinetic_limit::two_body::TwoBody;
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::new(RadialPotential::zero());
    let tree = TreeGraph::new(2, vec![1])?;
    let z = [PhasePoint::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)), PhasePoint::new(Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 1.0, 0.0))];
    let params = CollisionParams { times: vec![0.5], nus: vec![Vec3::new(0.0, -1.0, 0.0)], velocities: vec![Vec3::new(0.0, 2.5, 0.0)] };
    let bbf = build_bbf(&tree, &"-".parse()?, &z, &params, 1.0, &tb)?;
    for delta in [0.05, 0.2, 1.0] {
        let r = overlap_detect(&bbf, delta)?;
        println!("delta {delta}: in N(delta) = {}", r.in_n_delta);
        for p in &r.pairs {
            println!("  paths {} {}: window [0, {}], min distance {:.4} at {:.4}", p.i, p.h, p.t1, p.min_distance, p.argmin);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
