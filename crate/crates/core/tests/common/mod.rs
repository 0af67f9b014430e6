//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use kinetic_limit::dynamics::PhasePoint;
use kinetic_limit::hierarchy_mc::OneParticleDensity;
use kinetic_limit::numerics::quad::gauss_legendre;
use kinetic_limit::trees_flows::Sign;
use kinetic_limit::two_body::TwoBody;
use kinetic_limit::Vec3;

fn nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter().zip(&w).map(|(xi, wi)| (0.5 * (a + b) + 0.5 * (b - a) * xi, 0.5 * (b - a) * wi)).collect()
}

fn panels(cuts: &[f64], n: usize) -> Vec<(f64, f64)> {
    cuts.windows(2).flat_map(|c| nodes(c[0], c[1], n)).collect()
}

fn frame(a: &Vec3) -> (Vec3, Vec3) {
    let h = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = a.cross(&h).normalize();
    (e1, a.cross(&e1))
}

/// Tensor-product quadrature of the one-node term with `j = 1`:
///
/// `∫₀ᵗ dt₁ ∫ dv ∫ dν |ν·V| 𝟙{σν·V ≥ 0} f₀(z₁(0)) f₀(z₂(0))`, `V = v − v₁`,
///
/// in the coordinates `V` (spherical around the origin), `ρ = |ν ∧ V̂|` and
/// the azimuth of `ν` about `V̂`, in which `dν |ν·V| = |V| ρ dρ dφ`. At a `+`
/// node the pre-collision pair is built from `Θ(ρ, |V|)` directly.
pub fn one_node_quadrature(tb: &TwoBody, f0: &OneParticleDensity, z: &PhasePoint, t: f64, sigma: Sign) -> f64 {
    let tq = nodes(0.0, t, 8);
    let vq = panels(&[0.0, 1.0, 2.0, 3.0, 4.5, 7.0], 8);
    let cq = nodes(-1.0, 1.0, 16);
    let n_az = 16;
    let rq = panels(&[0.0, 0.5, 0.8, 0.95, 0.99, 0.999, 1.0], 6);
    let n_phi = 12;
    let mut total = 0.0;
    for &(s, vs) in &vq {
        let thetas: Vec<f64> = if sigma == Sign::Plus { rq.iter().map(|&(rho, _)| tb.theta(rho, s).unwrap()).collect() } else { Vec::new() };
        for &(c, wc) in &cq {
            let sn = (1.0 - c * c).sqrt();
            for ia in 0..n_az {
                let a = 2.0 * PI * ia as f64 / n_az as f64;
                let vhat = Vec3::new(sn * a.cos(), sn * a.sin(), c);
                let rel = vhat * s;
                let v = z.v + rel;
                let w_v = vs * wc * (2.0 * PI / n_az as f64) * s * s * s;
                for &(t1, wt) in &tq {
                    let x1 = z.x - z.v * (t - t1);
                    let inner = match sigma {
                        Sign::Minus => {
                            let a0 = PhasePoint::new(x1 - z.v * t1, z.v);
                            let b0 = PhasePoint::new(x1 - v * t1, v);
                            PI * f0.eval(&a0) * f0.eval(&b0)
                        }
                        Sign::Plus => {
                            let (e1, e2) = frame(&vhat);
                            let mut acc = 0.0;
                            for (ir, &(rho, wr)) in rq.iter().enumerate() {
                                let th = thetas[ir];
                                for ip in 0..n_phi {
                                    let p = 2.0 * PI * ip as f64 / n_phi as f64;
                                    let e = e1 * p.cos() + e2 * p.sin();
                                    // Outgoing ν = cos α V̂ + ρ e; the time-reversed pair
                                    // (ν, −V) is incoming and ω = cos Θ V̂ + sin Θ e.
                                    let omega = vhat * th.cos() + e * th.sin();
                                    let dv = omega * omega.dot(&rel);
                                    let (vp, etap) = (v - dv, z.v + dv);
                                    let a0 = PhasePoint::new(x1 - etap * t1, etap);
                                    let b0 = PhasePoint::new(x1 - vp * t1, vp);
                                    acc += wr * rho * (2.0 * PI / n_phi as f64) * f0.eval(&a0) * f0.eval(&b0);
                                }
                            }
                            acc
                        }
                    };
                    total += w_v * wt * inner;
                }
            }
        }
    }
    total
}

/// The five configurations used for the one-node comparison.
pub fn one_node_configs() -> Vec<(PhasePoint, f64)> {
    vec![
        (PhasePoint::new(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.5, 0.0, 0.0)), 0.5),
        (PhasePoint::new(Vec3::new(0.4, -0.3, 0.2), Vec3::new(-0.2, 0.7, 0.1)), 0.8),
        (PhasePoint::new(Vec3::new(-0.8, 0.1, 0.5), Vec3::new(0.0, -0.3, 1.1)), 0.3),
        (PhasePoint::new(Vec3::new(1.0, 1.0, -0.5), Vec3::new(1.2, 0.4, -0.6)), 1.0),
        (PhasePoint::new(Vec3::new(0.2, 0.6, 0.0), Vec3::new(-0.9, -0.9, 0.2)), 0.6),
    ]
}
