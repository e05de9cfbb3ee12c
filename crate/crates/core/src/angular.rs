//! Jacobi polynomials and the angular pair
//! `T1 = sin^(l+2) t cos(t/2) P_n^(l+1/2, l-1/2)(-cos t)`,
//! `T2 = sin^(l+2) t sin(t/2) P_n^(l-1/2, l+1/2)(-cos t)`
//! of the first-order system
//! `(d + l/sin - 2 cot) T2 = lambda T1`, `(d - l/sin - 2 cot) T1 = -lambda T2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lightcone_model::separation_lambda;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiSpec {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl JacobiSpec {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi indices must exceed -1, got ({a}, {b})"
            )));
        }
        Ok(Self { n, a, b })
    }

    pub fn eval(&self, x: f64) -> f64 {
        jacobi_raw(self.n, self.a, self.b, x)
    }

    /// `d/dx P_n^(a,b) = (n + a + b + 1)/2 P_{n-1}^(a+1,b+1)`.
    pub fn derivative(&self, x: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let n = self.n as f64;
        0.5 * (n + self.a + self.b + 1.0) * jacobi_raw(self.n - 1, self.a + 1.0, self.b + 1.0, x)
    }
}

fn jacobi_raw(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    if n == 0 {
        return 1.0;
    }
    if n == 1 {
        return p1;
    }
    let (mut pm2, mut pm1) = (1.0, p1);
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c0 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let p = (c1 * pm1 - c2 * pm2) / c0;
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

/// `P_n^(a,b)(x)` by the three-term recurrence.
pub fn jacobi_eval(spec: &JacobiSpec, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!(
            "Jacobi argument {x} outside [-1, 1]"
        )));
    }
    Ok(spec.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    T1,
    T2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSolution {
    pub n: usize,
    pub ell: usize,
    pub component: Component,
    jacobi: JacobiSpec,
}

impl AngularSolution {
    fn new(n: usize, ell: usize, component: Component) -> Self {
        let l = ell as f64;
        let (a, b) = match component {
            Component::T1 => (l + 0.5, l - 0.5),
            Component::T2 => (l - 0.5, l + 0.5),
        };
        Self {
            n,
            ell,
            component,
            jacobi: JacobiSpec { n, a, b },
        }
    }

    pub fn jacobi(&self) -> JacobiSpec {
        self.jacobi
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_with_derivative(theta).0
    }

    /// Value and analytic `d/dtheta`.
    pub fn eval_with_derivative(&self, theta: f64) -> (f64, f64) {
        let (s, c) = theta.sin_cos();
        let (sh, ch) = (0.5 * theta).sin_cos();
        let p = self.ell as f64 + 2.0;
        let pow = s.powf(p);
        let dpow = p * s.powf(p - 1.0) * c;
        let (half, dhalf) = match self.component {
            Component::T1 => (ch, -0.5 * sh),
            Component::T2 => (sh, 0.5 * ch),
        };
        let x = -c;
        let jac = self.jacobi.eval(x);
        // d/dtheta P(-cos theta) = P'(x) sin theta
        let djac = self.jacobi.derivative(x) * s;
        let value = pow * half * jac;
        let deriv = dpow * half * jac + pow * dhalf * jac + pow * half * djac;
        (value, deriv)
    }
}

pub fn angular_pair(n: usize, ell: usize) -> (AngularSolution, AngularSolution) {
    (
        AngularSolution::new(n, ell, Component::T1),
        AngularSolution::new(n, ell, Component::T2),
    )
}

/// Chebyshev points of the first kind mapped into `(0, pi)`.
pub fn chebyshev_thetas(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 0.5 * PI * (1.0 - ((2 * k + 1) as f64 * PI / (2 * count) as f64).cos()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularResidualReport {
    pub n: usize,
    pub ell: usize,
    pub lambda: f64,
    pub samples: usize,
    /// `max |R1|` over the sample, relative to `max(|T1|, |T2|)`.
    pub max_r1: f64,
    pub max_r2: f64,
    /// Least-squares ratio `N'/N` that best satisfies the system.
    pub best_fit_ratio: f64,
}

impl AngularResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.max_r1.max(self.max_r2)
    }
}

/// Pointwise `(theta, T1, T2, R1, R2)` with `N = N' = 1`.
pub fn angular_table(
    n: usize,
    ell: usize,
    thetas: &[f64],
    lambda: Option<f64>,
) -> Result<Vec<[f64; 5]>> {
    if thetas.is_empty() {
        return Err(Error::Domain("empty theta sample".into()));
    }
    if let Some(&t) = thetas.iter().find(|t| !(**t > 0.0 && **t < PI)) {
        return Err(Error::Domain(format!("theta = {t} outside (0, pi)")));
    }
    let lam = lambda.unwrap_or_else(|| separation_lambda(n, ell));
    let l = ell as f64;
    let (t1, t2) = angular_pair(n, ell);
    Ok(thetas
        .iter()
        .map(|&th| {
            let (v1, d1) = t1.eval_with_derivative(th);
            let (v2, d2) = t2.eval_with_derivative(th);
            let (s, c) = th.sin_cos();
            let cot = c / s;
            let r1 = d2 + (l / s - 2.0 * cot) * v2 - lam * v1;
            let r2 = d1 + (-l / s - 2.0 * cot) * v1 + lam * v2;
            [th, v1, v2, r1, r2]
        })
        .collect())
}

pub fn angular_residual(
    n: usize,
    ell: usize,
    thetas: &[f64],
    lambda: Option<f64>,
) -> Result<AngularResidualReport> {
    let lam = lambda.unwrap_or_else(|| separation_lambda(n, ell));
    let rows = angular_table(n, ell, thetas, Some(lam))?;
    let scale = rows
        .iter()
        .fold(0.0_f64, |m, r| m.max(r[1].abs()).max(r[2].abs()));
    let max_r1 = rows.iter().fold(0.0_f64, |m, r| m.max(r[3].abs())) / scale;
    let max_r2 = rows.iter().fold(0.0_f64, |m, r| m.max(r[4].abs())) / scale;

    // With T2 scaled by rho: R = rho u + v.
    let l = ell as f64;
    let (t1, t2) = angular_pair(n, ell);
    let (mut uu, mut uv) = (0.0, 0.0);
    for &th in thetas {
        let (v1, d1) = t1.eval_with_derivative(th);
        let (v2, d2) = t2.eval_with_derivative(th);
        let (s, c) = th.sin_cos();
        let cot = c / s;
        let u = [d2 + (l / s - 2.0 * cot) * v2, lam * v2];
        let v = [-lam * v1, d1 + (-l / s - 2.0 * cot) * v1];
        uu += u[0] * u[0] + u[1] * u[1];
        uv += u[0] * v[0] + u[1] * v[1];
    }
    Ok(AngularResidualReport {
        n,
        ell,
        lambda: lam,
        samples: thetas.len(),
        max_r1,
        max_r2,
        best_fit_ratio: -uv / uu,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let n = count as f64;
    let mut xs = vec![0.0; count];
    let mut ws = vec![0.0; count];
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[count - 1 - i] = x;
        ws[i] = w;
        ws[count - 1 - i] = w;
    }
    (xs, ws)
}

/// `int_{-1}^{1} P_n P_k (1-x)^a (1+x)^b dx`, computed in the angle
/// `x = -cos theta` where the weight becomes a smooth trigonometric product
/// for half-integer indices.
pub fn jacobi_inner_product(n: usize, k: usize, a: f64, b: f64, nodes: usize) -> f64 {
    let (gx, gw) = gauss_legendre(nodes);
    let pn = JacobiSpec { n, a, b };
    let pk = JacobiSpec { n: k, a, b };
    gx.iter()
        .zip(&gw)
        .map(|(&t, &w)| {
            let theta = 0.5 * PI * (t + 1.0);
            let (sh, ch) = (0.5 * theta).sin_cos();
            let x = -theta.cos();
            // (1-x)^a (1+x)^b dx = 2^(a+b+1) cos^(2a+1)(t/2) sin^(2b+1)(t/2) dtheta
            let weight = 2f64.powf(a + b + 1.0) * ch.powf(2.0 * a + 1.0) * sh.powf(2.0 * b + 1.0);
            0.5 * PI * w * weight * pn.eval(x) * pk.eval(x)
        })
        .sum()
}
