// Boltzmann and interacting backward flows for one tree, and their gap.

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::trees_flows::{build_bbf, compare_flows, CollisionParams, CompareOptions, TreeGraph};
use kinetic_limit::two_body::TwoBody;
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::new(RadialPotential::smooth_junction(0.1, 20.0)?);
    let tree = TreeGraph::new(1, vec![1, 2])?;
    let signs = "+-".parse()?;
    let z = [PhasePoint::new(Vec3::zeros(), Vec3::new(0.5, 0.0, 0.0))];
    let params = CollisionParams {
        times: vec![0.6, 0.2],
        nus: vec![Vec3::new(-1.0, 0.0, 0.0), Vec3::new(0.0, 0.6, 0.8)],
        velocities: vec![Vec3::new(-0.5, 0.3, 0.0), Vec3::new(0.2, 0.4, -0.3)],
    };
    let bbf = build_bbf(&tree, &signs, &z, &params, 1.0, &tb)?;
    for c in &bbf.creations {
        println!("node {} at t = {}: particle {} from {}, kernel {:.4}", c.r, c.time, c.child, c.parent, c.kernel);
    }
    for p in bbf.final_state() {
        println!("at 0: x = {:?}, v = {:?}", p.x, p.v);
    }
    for eps in [1e-2, 1e-3] {
        let cmp = compare_flows(&tree, &signs, &z, &params, 1.0, eps, &tb, &CompareOptions::default())?;
        println!("eps {eps}: position gap {:.3e}, velocity gap {:.1e}, recollided {}", cmp.max_position_gap, cmp.velocity_gap_at_zero, cmp.ibf_recollided);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
