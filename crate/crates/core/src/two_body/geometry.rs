use super::TwoBody;
use crate::error::{Error, Result};
use crate::Vec3;

/// Post-collision velocities for scattering vector `omega`:
/// `v′ = v − ω[ω·(v − v₁)]`, `v₁′ = v₁ + ω[ω·(v − v₁)]`.
pub fn apply_collision_rule(v: &Vec3, v1: &Vec3, omega: &Vec3) -> (Vec3, Vec3) {
    let s = omega.dot(&(v - v1));
    (v - omega * s, v1 + omega * s)
}

/// Rotation by π about the `omega` line: `x ↦ 2ω(ω·x) − x`.
pub fn reflect_through(omega: &Vec3, x: &Vec3) -> Vec3 {
    omega * (2.0 * omega.dot(x)) - x
}

fn any_perpendicular(a: &Vec3) -> Vec3 {
    let trial = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let p = trial - a * a.dot(&trial);
    p / p.norm()
}

impl TwoBody {
    /// Scattering vector ω(ν, V).
    ///
    /// For incoming pairs (`V·ν ≤ 0`) ω is the unit vector from the centre to
    /// the turning point. Outgoing pairs use time reversal,
    /// `ω(ν, V) = ω(ν, −V)`, so an outgoing pair and the incoming pair it came
    /// from share the same ω.
    pub fn scattering_vector(&self, nu: &Vec3, v: &Vec3) -> Result<Vec3> {
        let speed = v.norm();
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(Error::InvalidArgument("relative velocity must be nonzero and finite".into()));
        }
        let nn = nu.norm();
        if (nn - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("nu must be a unit vector, |nu| = {nn}")));
        }
        if nu.dot(v) > 0.0 {
            return self.scattering_vector(nu, &-v);
        }
        let vhat = v / speed;
        let perp = nu - vhat * nu.dot(&vhat);
        let rho = perp.norm().min(1.0);
        let theta = match self.theta(rho, speed) {
            Ok(t) => t,
            Err(Error::TrappedOrSingular(_)) if !self.potential().flags().repulsive_monotone => {
                let o = super::oracle_integrate_central(self.potential(), nu, v, &super::OracleOptions::default())?;
                if o.status != super::OracleStatus::Exited {
                    return Err(Error::TrappedOrSingular(format!("orbit did not exit within the time bound (rho = {rho})")));
                }
                return Ok(o.omega);
            }
            Err(e) => return Err(e),
        };
        let e = if rho > 0.0 { perp / perp.norm() } else { any_perpendicular(&vhat) };
        let (s, c) = theta.sin_cos();
        let w = -vhat * c + e * s;
        Ok(w / w.norm())
    }

    /// Maps an incoming pair `(ν, V)` to the outgoing pair `(ν′, V′)`.
    pub fn scattering_operator(&self, nu: &Vec3, v: &Vec3) -> Result<(Vec3, Vec3)> {
        if nu.dot(v) > 1e-14 * v.norm() {
            return Err(Error::Precondition("scattering_operator needs an incoming pair (V·ν ≤ 0)".into()));
        }
        let w = self.scattering_vector(nu, v)?;
        Ok((reflect_through(&w, nu), -reflect_through(&w, v)))
    }

    /// Maps an outgoing pair `(ν′, V′)` back to the incoming pair `(ν, V)`.
    pub fn inverse_scattering_operator(&self, nu_out: &Vec3, v_out: &Vec3) -> Result<(Vec3, Vec3)> {
        if nu_out.dot(v_out) < -1e-14 * v_out.norm() {
            return Err(Error::Precondition("inverse_scattering_operator needs an outgoing pair (V·ν ≥ 0)".into()));
        }
        let w = self.scattering_vector(nu_out, v_out)?;
        Ok((reflect_through(&w, nu_out), -reflect_through(&w, v_out)))
    }
}

/// `|det DF|` of a map `F: S² × ℝ³ → S² × ℝ³` at `(ν, V)`, with the sphere
/// factors written in orthographic charts around `ν` and `F(ν, V)`.
/// Fourth-order central differences with step `h`.
pub fn measure_jacobian<F>(map: F, nu: &Vec3, v: &Vec3, h: f64) -> Result<f64>
where
    F: Fn(&Vec3, &Vec3) -> Result<(Vec3, Vec3)>,
{
    let e1 = any_perpendicular(nu);
    let e2 = nu.cross(&e1);
    let (n0, _) = map(nu, v)?;
    let f1 = any_perpendicular(&n0);
    let f2 = n0.cross(&f1);
    let eval = |c: &[f64; 5]| -> Result<[f64; 5]> {
        let z = (1.0 - c[0] * c[0] - c[1] * c[1]).sqrt();
        let n = e1 * c[0] + e2 * c[1] + nu * z;
        let (m, w) = map(&n, &Vec3::new(c[2], c[3], c[4]))?;
        Ok([m.dot(&f1), m.dot(&f2), w.x, w.y, w.z])
    };
    let base = [0.0, 0.0, v.x, v.y, v.z];
    let mut jac = nalgebra::SMatrix::<f64, 5, 5>::zeros();
    for col in 0..5 {
        let at = |k: f64| {
            let mut c = base;
            c[col] += k * h;
            eval(&c)
        };
        let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
        for row in 0..5 {
            jac[(row, col)] = (-p2[row] + 8.0 * p1[row] - 8.0 * m1[row] + m2[row]) / (12.0 * h);
        }
    }
    Ok(jac.determinant().abs())
}
