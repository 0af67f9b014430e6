// Integrating the reduced motion directly and comparing with the
// quadrature formulas for Θ, τ* and ω.

use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::{oracle_integrate_central, OracleOptions, TwoBody};
use kinetic_limit::Vec3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pot = RadialPotential::inverse_power(4.0)?;
    let tb = TwoBody::new(pot.clone());
    let (rho, speed) = (0.5, 2f64.sqrt());
    let nu = Vec3::new(-(1.0f64 - rho * rho).sqrt(), rho, 0.0);
    let v = Vec3::new(speed, 0.0, 0.0);
    let o = oracle_integrate_central(&pot, &nu, &v, &OracleOptions::default())?;
    let theta = tb.theta(rho, speed)?;
    let tau = tb.scattering_time(rho, speed)?;
    let omega = tb.scattering_vector(&nu, &v)?;
    println!("theta  oracle {:.10}  quadrature {theta:.10}", o.theta);
    println!("tau*   oracle {:.10}  quadrature {tau:.10}", o.tau_star);
    println!("omega gap {:.2e}  energy drift {:.2e}", (o.omega - omega).norm(), o.energy_drift);
    assert!((o.theta - theta).abs() < 1e-6 && (o.tau_star - tau).abs() < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
