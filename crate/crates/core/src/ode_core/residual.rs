use serde::{Deserialize, Serialize};

use super::{Jet, RationalOde};
use crate::error::{Error, Result};

/// Pointwise residuals of a candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub points: Vec<f64>,
    /// `p2 y'' + p1 y' + p0 y`.
    pub raw: Vec<f64>,
    /// Raw residual over the largest term magnitude, with each coefficient
    /// polynomial bounded by its absolute-coefficient version so that a root
    /// of `p_i` does not shrink the scale.
    pub relative: Vec<f64>,
}

impl ResidualReport {
    pub fn max_relative(&self) -> f64 {
        self.relative.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn max_raw(&self) -> f64 {
        self.raw.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

/// Substitutes `y` (value plus analytic derivatives) into the equation.
///
/// A point where all three terms vanish has relative residual zero.
pub fn ode_residual<F>(ode: &RationalOde, y: F, points: &[f64]) -> Result<ResidualReport>
where
    F: Fn(f64) -> Result<Jet>,
{
    if points.is_empty() {
        return Err(Error::Domain("empty list of residual points".into()));
    }
    let mut raw = Vec::with_capacity(points.len());
    let mut relative = Vec::with_capacity(points.len());
    for &x in points {
        let j = y(x)?;
        let t2 = ode.p2().eval(x) * j.d2;
        let t1 = ode.p1().eval(x) * j.d1;
        let t0 = ode.p0().eval(x) * j.value;
        let r = t2 + t1 + t0;
        let bound = |p: &super::Polynomial| {
            p.coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x.abs() + c.abs())
        };
        let scale = (bound(ode.p2()) * j.d2.abs())
            .max(bound(ode.p1()) * j.d1.abs())
            .max(bound(ode.p0()) * j.value.abs());
        raw.push(r);
        relative.push(if scale == 0.0 { 0.0 } else { r / scale });
    }
    Ok(ResidualReport {
        points: points.to_vec(),
        raw,
        relative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode_core::Polynomial;

    fn biconfluent(q: f64, alpha: f64) -> RationalOde {
        RationalOde::new(
            Polynomial::new(vec![0.0, 1.0]),
            Polynomial::new(vec![2.0, -1.0, -2.0]),
            Polynomial::new(vec![-q, alpha]),
        )
        .unwrap()
    }

    #[test]
    fn constant_solves_homogeneous_case() {
        let rep = ode_residual(
            &biconfluent(0.0, 0.0),
            |_| Ok(Jet::constant(1.0)),
            &[0.1, 0.5, 2.0],
        )
        .unwrap();
        assert_eq!(rep.max_raw(), 0.0);
        assert_eq!(rep.max_relative(), 0.0);
    }

    #[test]
    fn only_zeroth_order_term_survives() {
        let rep = ode_residual(
            &biconfluent(1.0, 0.0),
            |_| Ok(Jet::constant(1.0)),
            &[0.1, 0.5, 2.0],
        )
        .unwrap();
        assert!(rep.raw.iter().all(|&r| r == -1.0));
        assert!(rep.relative.iter().all(|&r| r == -1.0));
    }

    #[test]
    fn exact_polynomial_solution() {
        // r f'' + (g + d r + e r^2) f' + (a r - q) f with a = -e (degree 1) and
        // q chosen so that f = 1 + (q/g) r terminates: c_2 = 0 requires
        // (q - d) q / g = a. Take g = 2, d = -1, e = -2, a = 2: q^2 + q - 4 = 0.
        let q = (-1.0 + 17.0_f64.sqrt()) / 2.0;
        let ode = RationalOde::new(
            Polynomial::new(vec![0.0, 1.0]),
            Polynomial::new(vec![2.0, -1.0, -2.0]),
            Polynomial::new(vec![-q, 2.0]),
        )
        .unwrap();
        let c1 = q / 2.0;
        let rep = ode_residual(
            &ode,
            |r| Ok(Jet::new(1.0 + c1 * r, c1, 0.0)),
            &[0.1, 0.7, 1.5, 4.0],
        )
        .unwrap();
        assert!(rep.max_relative() < 1e-12, "{}", rep.max_relative());
    }

    #[test]
    fn empty_points_rejected() {
        assert!(matches!(
            ode_residual(&biconfluent(0.0, 0.0), |_| Ok(Jet::constant(1.0)), &[]),
            Err(Error::Domain(_))
        ));
    }
}
