// Two particles at range ε = 0.01 pass through each other's interaction
// sphere; the outgoing velocities match the two-body collision rule.

use kinetic_limit::dynamics::{newton_flow_report, FlowOptions, PhasePoint, SystemState};
use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::{apply_collision_rule, TwoBody};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.01;
    let pot = RadialPotential::smooth_junction(0.1, 20.0)?;
    let a = PhasePoint::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0));
    let b = PhasePoint::new(Vec3::new(2.0 * eps, 0.3 * eps, 0.0), Vec3::new(-1.0, 0.0, 0.0));
    let state = SystemState::new(vec![a, b], eps)?;
    let report = newton_flow_report(&state, &pot, 0.03, &FlowOptions::default())?;
    let out = &report.state.particles;

    // Entry point on the unit sphere in relative coordinates.
    let nu = Vec3::new((1.0f64 - 0.09).sqrt(), 0.3, 0.0);
    let omega = TwoBody::new(pot).scattering_vector(&nu, &(b.v - a.v))?;
    let (vb, va) = apply_collision_rule(&b.v, &a.v, &omega);
    println!("flow   {:?} {:?}", out[0].v, out[1].v);
    println!("rule   {va:?} {vb:?}");
    println!("steps {}, contacts {}, energy drift {:.2e}", report.steps, report.contacts.len(), report.energy_drift);
    assert!((out[0].v - va).norm() < 1e-6 && (out[1].v - vb).norm() < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
