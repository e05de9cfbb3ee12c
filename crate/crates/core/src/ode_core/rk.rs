use serde::{Deserialize, Serialize};

use super::{RationalOde, ROOT_TOL};
use crate::error::{Error, Result};

/// Accepted steps of an adaptive integration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RkTable {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl RkTable {
    /// `(x, y, y')` at the final mesh point.
    pub fn last(&self) -> (f64, f64, f64) {
        let n = self.xs.len() - 1;
        (self.xs[n], self.values[n], self.derivs[n])
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

fn rhs(ode: &RationalOde, x: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], ode.second_derivative(x, y[0], y[1])]
}

fn check_interval(ode: &RationalOde, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let tol = ROOT_TOL * (1.0 + lo.abs().max(hi.abs()));
    if let Some(&s) = ode
        .singular_points()
        .iter()
        .find(|&&s| s >= lo - tol && s <= hi + tol)
    {
        return Err(Error::SingularInterval {
            point: s,
            from: a,
            to: b,
        });
    }
    Ok(())
}

/// Adaptive Dormand-Prince integration of the equation from `x_start` to
/// `x_end` (either direction).
///
/// The local error estimate of every accepted step satisfies
/// `|err_i| <= tol * max(1, |y_i|)` for both the value and the derivative.
pub fn rk_continue(
    ode: &RationalOde,
    x_start: f64,
    y_start: (f64, f64),
    x_end: f64,
    tol: f64,
) -> Result<RkTable> {
    let mut table = RkTable::default();
    integrate(ode, x_start, y_start, x_end, tol, None, &mut table)?;
    Ok(table)
}

/// Integrates through a monotone sequence of output points, returning
/// `(y, y')` at each of them. The step size carries over between points.
pub fn rk_continue_through(
    ode: &RationalOde,
    x_start: f64,
    y_start: (f64, f64),
    outputs: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(outputs.len());
    let mut x = x_start;
    let mut y = y_start;
    let mut h = None;
    let mut scratch = RkTable::default();
    for &target in outputs {
        if target != x {
            scratch.xs.clear();
            scratch.values.clear();
            scratch.derivs.clear();
            h = Some(integrate(ode, x, y, target, tol, h, &mut scratch)?);
            let (_, v, d) = scratch.last();
            y = (v, d);
            x = target;
        }
        out.push(y);
    }
    Ok(out)
}

fn integrate(
    ode: &RationalOde,
    x_start: f64,
    y_start: (f64, f64),
    x_end: f64,
    tol: f64,
    h_hint: Option<f64>,
    table: &mut RkTable,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be positive"
        )));
    }
    check_interval(ode, x_start, x_end)?;
    let mut x = x_start;
    let mut y = [y_start.0, y_start.1];
    table.xs.push(x);
    table.values.push(y[0]);
    table.derivs.push(y[1]);
    let span = x_end - x_start;
    if span == 0.0 {
        return Ok(h_hint.unwrap_or(0.0));
    }
    let dir = span.signum();
    let mut h = h_hint
        .map(f64::abs)
        .filter(|h| *h > 0.0)
        .unwrap_or(1e-3 * span.abs())
        .min(span.abs())
        * dir;
    let mut last_ok = h.abs();
    let mut k = [[0.0_f64; 2]; 7];
    k[0] = rhs(ode, x, y);
    for _ in 0..MAX_STEPS {
        let remaining = x_end - x;
        if remaining * dir <= 0.0 {
            return Ok(last_ok);
        }
        let mut final_step = false;
        if (h.abs()) >= remaining.abs() {
            h = remaining;
            final_step = true;
        }
        if h.abs() < 1e-14 * (1.0 + x.abs()) {
            return Err(Error::Stiffness { x, h });
        }
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(ode, x + C[s] * h, ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for i in 0..2 {
            let mut inc5 = 0.0;
            let mut inc4 = 0.0;
            for s in 0..7 {
                inc5 += B5[s] * k[s][i];
                inc4 += B4[s] * k[s][i];
            }
            y5[i] += h * inc5;
            let e = h * (inc5 - inc4);
            let sc = tol * y[i].abs().max(y5[i].abs()).max(1.0);
            err = err.max(e.abs() / sc);
        }
        if !err.is_finite() || !y5[0].is_finite() || !y5[1].is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            x = if final_step { x_end } else { x + h };
            y = y5;
            // FSAL: the last stage is the derivative at the new point.
            k[0] = k[6];
            table.xs.push(x);
            table.values.push(y[0]);
            table.derivs.push(y[1]);
            last_ok = h.abs();
            if final_step {
                return Ok(last_ok);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Err(Error::Stiffness { x, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode_core::Polynomial;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn free_particle_constant() {
        let ode = RationalOde::new(
            Polynomial::constant(1.0),
            Polynomial::zero(),
            Polynomial::zero(),
        )
        .unwrap();
        for &x_end in &[0.5, 3.0, -7.0] {
            let t = rk_continue(&ode, 0.0, (1.0, 0.0), x_end, 1e-10).unwrap();
            assert_eq!(t.last().1, 1.0);
        }
    }

    #[test]
    fn sine_to_quarter_period() {
        let ode = RationalOde::new(
            Polynomial::constant(1.0),
            Polynomial::zero(),
            Polynomial::constant(1.0),
        )
        .unwrap();
        let tol = 1e-10;
        let t = rk_continue(&ode, 0.0, (0.0, 1.0), FRAC_PI_2, tol).unwrap();
        let (x, y, dy) = t.last();
        assert_eq!(x, FRAC_PI_2);
        assert!((y - 1.0).abs() < tol, "{y}");
        assert!(dy.abs() < 1e-9);
    }

    #[test]
    fn singular_point_inside_interval() {
        let ode = RationalOde::new(
            Polynomial::new(vec![0.0, 1.0]),
            Polynomial::constant(1.0),
            Polynomial::zero(),
        )
        .unwrap();
        assert!(matches!(
            rk_continue(&ode, -1.0, (1.0, 0.0), 1.0, 1e-8),
            Err(Error::SingularInterval { .. })
        ));
        assert!(rk_continue(&ode, 0.5, (1.0, 0.0), 2.0, 1e-8).is_ok());
    }

    #[test]
    fn outputs_through_points() {
        let ode = RationalOde::new(
            Polynomial::constant(1.0),
            Polynomial::zero(),
            Polynomial::constant(1.0),
        )
        .unwrap();
        let pts = [0.0, 0.3, 1.0, 2.5];
        let ys = rk_continue_through(&ode, 0.0, (0.0, 1.0), &pts, 1e-12).unwrap();
        for (x, (y, dy)) in pts.iter().zip(ys) {
            assert!((y - x.sin()).abs() < 1e-10);
            assert!((dy - x.cos()).abs() < 1e-10);
        }
    }
}
