//! Second-order linear ODEs with polynomial coefficients.
//!
//! An equation is stored as `p2(x) y'' + p1(x) y' + p0(x) y = 0` with all
//! denominators cleared. On top of that representation this module provides
//! indicial analysis, Frobenius and Taylor series, analytic residuals and an
//! adaptive Dormand-Prince continuation.

mod jet;
mod polynomial;
mod residual;
mod rk;
mod series;

pub use jet::Jet;
pub use polynomial::Polynomial;
pub use residual::{ode_residual, ResidualReport};
pub use rk::{rk_continue, rk_continue_through, RkTable};
pub use series::{
    frobenius_series, series_eval, taylor_series, SeriesPoint, SeriesSolution, DEFAULT_TERMS,
    TAIL_RATIO_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for deciding that a polynomial coefficient vanishes.
pub(crate) const ROOT_TOL: f64 = 1e-12;

/// `p2(x) y'' + p1(x) y' + p0(x) y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalOde {
    p2: Polynomial,
    p1: Polynomial,
    p0: Polynomial,
    singular_points: Vec<f64>,
    irregular_at_infinity: bool,
}

/// Classification of a point of an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Ordinary,
    RegularSingular,
    IrregularSingular,
}

impl RationalOde {
    pub fn new(p2: Polynomial, p1: Polynomial, p0: Polynomial) -> Result<Self> {
        if p2.is_zero() {
            return Err(Error::InvalidParameter(
                "leading coefficient p2 is identically zero".into(),
            ));
        }
        let singular_points = p2.real_roots().into_iter().map(|(x, _)| x).collect();
        let d2 = p2.degree().unwrap_or(0) as isize;
        let d1 = p1.degree().map_or(isize::MIN, |d| d as isize);
        let d0 = p0.degree().map_or(isize::MIN, |d| d as isize);
        // At infinity, x p1/p2 and x^2 p0/p2 must stay bounded for regularity.
        let irregular_at_infinity = d1 > d2 - 1 || d0 > d2 - 2;
        Ok(Self {
            p2,
            p1,
            p0,
            singular_points,
            irregular_at_infinity,
        })
    }

    pub fn p2(&self) -> &Polynomial {
        &self.p2
    }

    pub fn p1(&self) -> &Polynomial {
        &self.p1
    }

    pub fn p0(&self) -> &Polynomial {
        &self.p0
    }

    /// Real finite singular points (distinct roots of `p2`), ascending.
    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn irregular_at_infinity(&self) -> bool {
        self.irregular_at_infinity
    }

    /// `y'' = -(p1 y' + p0 y) / p2`.
    pub fn second_derivative(&self, x: f64, y: f64, dy: f64) -> f64 {
        -(self.p1.eval(x) * dy + self.p0.eval(x) * y) / self.p2.eval(x)
    }

    /// Distance from `x0` to the nearest singular point other than `x0` itself.
    pub fn radius_hint(&self, x0: f64) -> f64 {
        self.singular_points
            .iter()
            .map(|s| (s - x0).abs())
            .filter(|d| *d > ROOT_TOL * (1.0 + x0.abs()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_singular_point(&self, x0: f64) -> bool {
        self.p2.order_at(x0, ROOT_TOL) > 0
    }

    pub fn classify(&self, x0: f64) -> PointKind {
        let nu = self.p2.order_at(x0, ROOT_TOL);
        if nu == 0 {
            return PointKind::Ordinary;
        }
        let o1 = self.p1.order_at(x0, ROOT_TOL);
        let o0 = self.p0.order_at(x0, ROOT_TOL);
        if nu.saturating_sub(o1) <= 1 && nu.saturating_sub(o0) <= 2 {
            PointKind::RegularSingular
        } else {
            PointKind::IrregularSingular
        }
    }

    /// Taylor coefficients of (p2, p1, p0) at `x0` together with the order
    /// `nu` of the zero of `p2`. Coefficients below the regular-singular
    /// orders are set to exactly zero.
    pub(crate) fn local_coefficients(&self, x0: f64) -> Result<LocalCoefficients> {
        let nu = self.p2.order_at(x0, ROOT_TOL);
        if nu == usize::MAX {
            return Err(Error::InvalidParameter("p2 vanishes identically".into()));
        }
        if self.classify(x0) == PointKind::IrregularSingular {
            return Err(Error::Unsupported(format!(
                "x0 = {x0} is an irregular singular point; no Frobenius expansion exists there"
            )));
        }
        let mut a = self.p2.taylor_shift(x0).coeffs().to_vec();
        let mut b = self.p1.taylor_shift(x0).coeffs().to_vec();
        let mut d = self.p0.taylor_shift(x0).coeffs().to_vec();
        zero_below(&mut a, nu);
        zero_below(&mut b, nu.saturating_sub(1));
        zero_below(&mut d, nu.saturating_sub(2));
        Ok(LocalCoefficients { nu, a, b, d })
    }
}

fn zero_below(v: &mut [f64], order: usize) {
    for c in v.iter_mut().take(order) {
        *c = 0.0;
    }
}

pub(crate) struct LocalCoefficients {
    pub nu: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
}

impl LocalCoefficients {
    fn get(v: &[f64], i: isize) -> f64 {
        if i < 0 {
            0.0
        } else {
            v.get(i as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn a(&self, i: isize) -> f64 {
        Self::get(&self.a, i)
    }

    pub fn b(&self, i: isize) -> f64 {
        Self::get(&self.b, i)
    }

    pub fn d(&self, i: isize) -> f64 {
        Self::get(&self.d, i)
    }

    /// Indicial polynomial `a_nu s(s-1) + b_{nu-1} s + d_{nu-2}`.
    pub fn indicial(&self, s: f64) -> f64 {
        let nu = self.nu as isize;
        self.a(nu) * s * (s - 1.0) + self.b(nu - 1) * s + self.d(nu - 2)
    }

    /// Magnitude scale of the indicial polynomial terms at `s`, for pivot tests.
    pub fn indicial_scale(&self, s: f64) -> f64 {
        let nu = self.nu as isize;
        (self.a(nu) * s * (s - 1.0)).abs()
            + (self.a(nu) * s).abs()
            + (self.b(nu - 1) * s).abs()
            + self.d(nu - 2).abs()
    }

    /// Length of the recurrence band.
    pub fn band(&self) -> usize {
        let la = self.a.len().saturating_sub(self.nu);
        let lb = (self.b.len() + 1).saturating_sub(self.nu);
        let ld = (self.d.len() + 2).saturating_sub(self.nu);
        la.max(lb).max(ld)
    }
}

/// Both roots of the indicial equation at a regular singular point `x0`,
/// sorted descending.
pub fn indicial_exponents(ode: &RationalOde, x0: f64) -> Result<(f64, f64)> {
    if !ode.is_singular_point(x0) {
        return Err(Error::Domain(format!("x0 = {x0} is not a singular point")));
    }
    let local = ode.local_coefficients(x0)?;
    let nu = local.nu as isize;
    let a = local.a(nu);
    let b = local.b(nu - 1);
    let c = local.d(nu - 2);
    // a s^2 + (b - a) s + c = 0
    let bb = b - a;
    let disc = bb * bb - 4.0 * a * c;
    let scale = (bb * bb).max((4.0 * a * c).abs());
    if disc < 0.0 && disc.abs() > 1e-14 * scale {
        return Err(Error::ComplexExponent(format!(
            "indicial discriminant {disc} is negative at x0 = {x0}"
        )));
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (bb + if bb >= 0.0 { sq } else { -sq });
    let (s1, s2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Ok(if s1 >= s2 { (s1, s2) } else { (s2, s1) })
}
