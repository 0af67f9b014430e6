// Deflection map Θ(ρ), its slope and the scattering time for a smooth
// junction potential at E₀ = V²/2 = 9.

use kinetic_limit::potentials::RadialPotential;
use kinetic_limit::two_body::TwoBody;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tb = TwoBody::new(RadialPotential::smooth_junction(0.1, 20.0)?);
    let speed = (2.0f64 * 9.0).sqrt();
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "rho", "theta", "dtheta", "tau*", "r*");
    let mut last = 0.0;
    for i in 0..10 {
        let rho = (i as f64 + 0.5) / 10.0;
        let s = tb.scatter(rho, speed)?;
        let d = tb.dtheta_drho(rho, speed)?;
        println!("{rho:6.3} {:10.6} {d:10.5} {:10.6} {:8.5}", s.theta, s.tau_star, s.r_star);
        assert!(s.theta > last);
        last = s.theta;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
