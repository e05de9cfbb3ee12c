use serde::{Deserialize, Serialize};

use super::{Jet, RationalOde};
use crate::error::{Error, Result};

/// Default truncation order for Frobenius and Taylor series.
pub const DEFAULT_TERMS: usize = 120;

/// A series is considered converged at a point when the last retained terms
/// are below this fraction of the running sum.
pub const TAIL_RATIO_TOL: f64 = 1e-14;

/// `scale * (x - x0)^exponent * sum_k coeffs[k] (x - x0)^k` with `coeffs[0] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSolution {
    pub x0: f64,
    pub exponent: f64,
    pub coeffs: Vec<f64>,
    pub n_terms: usize,
    /// Distance from the anchor to the nearest other finite singular point.
    pub radius_hint: f64,
    pub scale: f64,
}

/// Value and analytic derivatives of a series at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub jet: Jet,
    /// `false` when the point lies outside the convergence radius hint.
    pub reliable: bool,
    /// Ratio of the last retained terms to the running sum.
    pub tail_ratio: f64,
}

impl SeriesPoint {
    pub fn value(&self) -> f64 {
        self.jet.value
    }

    pub fn converged(&self) -> bool {
        self.tail_ratio < TAIL_RATIO_TOL
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn is_integer(s: f64) -> Option<i32> {
    let r = s.round();
    ((s - r).abs() < 1e-12 && r.abs() < i32::MAX as f64).then_some(r as i32)
}

impl SeriesSolution {
    /// Evaluates the series with analytic first and second derivatives.
    pub fn eval(&self, x: f64) -> Result<SeriesPoint> {
        let t = x - self.x0;
        let s = self.exponent;
        if t == 0.0 && s < 0.0 {
            return Err(Error::Pole { x, exponent: s });
        }
        if t < 0.0 && is_integer(s).is_none() {
            return Err(Error::Domain(format!(
                "non-integer exponent {s} evaluated left of the anchor (x = {x})"
            )));
        }
        let reliable = t.abs() < self.radius_hint;

        // Sums of c_k t^k, (k+s) c_k t^k and (k+s)(k+s-1) c_k t^k; the jet is
        // then t^s (A, B/t, C/t^2). At t = 0 only the low powers survive.
        if t == 0.0 {
            let mut jet = Jet::default();
            for (k, &c) in self.coeffs.iter().enumerate() {
                let p = k as f64 + s;
                match is_integer(p) {
                    Some(0) => jet.value += c,
                    Some(1) => jet.d1 += c,
                    Some(2) => jet.d2 += 2.0 * c,
                    _ => {}
                }
            }
            return Ok(SeriesPoint {
                jet: jet.scale(self.scale),
                reliable,
                tail_ratio: 0.0,
            });
        }

        let (mut sa, mut sb, mut sc) = (
            CompensatedSum::default(),
            CompensatedSum::default(),
            CompensatedSum::default(),
        );
        let mut tk = 1.0;
        let mut last_terms = [0.0_f64; 2];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let p = k as f64 + s;
            let term = c * tk;
            sa.add(term);
            sb.add(p * term);
            sc.add(p * (p - 1.0) * term);
            last_terms = [last_terms[1], term.abs()];
            tk *= t;
        }
        let (a, b, c) = (sa.total(), sb.total(), sc.total());
        let ts = match is_integer(s) {
            Some(i) => t.powi(i),
            None => t.powf(s),
        };
        let jet = Jet::new(ts * a, ts * b / t, ts * c / (t * t));
        let tail = last_terms[0].max(last_terms[1]);
        let tail_ratio = if a == 0.0 {
            f64::INFINITY
        } else {
            tail / a.abs()
        };
        Ok(SeriesPoint {
            jet: jet.scale(self.scale),
            reliable,
            tail_ratio,
        })
    }

    /// Plain value at `x`.
    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.jet.value)
    }
}

/// Evaluates a series solution at `x`.
pub fn series_eval(sol: &SeriesSolution, x: f64) -> Result<SeriesPoint> {
    sol.eval(x)
}

/// Frobenius series `(x - x0)^s sum c_k (x - x0)^k` with `c_0 = 1` at a regular
/// singular (or ordinary) point `x0`.
///
/// The coefficients follow from substituting the series into the equation and
/// matching powers. A vanishing pivot (the exponent collides with the other
/// indicial root) is reported as [`Error::DegenerateExponent`].
pub fn frobenius_series(
    ode: &RationalOde,
    x0: f64,
    exponent: f64,
    n_terms: usize,
) -> Result<SeriesSolution> {
    if n_terms == 0 {
        return Err(Error::InvalidParameter("n_terms must be positive".into()));
    }
    let local = ode.local_coefficients(x0)?;
    let s = exponent;
    let i0 = local.indicial(s);
    if i0.abs() > 1e-9 * local.indicial_scale(s).max(1e-300) {
        return Err(Error::Domain(format!(
            "exponent {s} is not an indicial root at x0 = {x0} (indicial value {i0})"
        )));
    }
    let coeffs = run_recurrence(&local, s, vec![1.0], n_terms)?;
    Ok(SeriesSolution {
        x0,
        exponent: s,
        coeffs,
        n_terms,
        radius_hint: ode.radius_hint(x0),
        scale: 1.0,
    })
}

/// Taylor series at an ordinary point with initial data `(y0, dy0)`.
///
/// When `y0 != 0` the series is stored with exponent 0, `c_1 = dy0 / y0` and
/// `scale = y0`; when `y0 == 0` it is the exponent-1 solution scaled by `dy0`.
pub fn taylor_series(
    ode: &RationalOde,
    x0: f64,
    y0: f64,
    dy0: f64,
    n_terms: usize,
) -> Result<SeriesSolution> {
    if ode.is_singular_point(x0) {
        return Err(Error::Domain(format!(
            "x0 = {x0} is a singular point; Taylor data cannot be imposed there"
        )));
    }
    if n_terms < 2 {
        return Err(Error::InvalidParameter("n_terms must be at least 2".into()));
    }
    let local = ode.local_coefficients(x0)?;
    let (exponent, seed, scale) = if y0 != 0.0 {
        (0.0, vec![1.0, dy0 / y0], y0)
    } else {
        (1.0, vec![1.0], dy0)
    };
    let coeffs = run_recurrence(&local, exponent, seed, n_terms)?;
    Ok(SeriesSolution {
        x0,
        exponent,
        coeffs,
        n_terms,
        radius_hint: ode.radius_hint(x0),
        scale,
    })
}

fn run_recurrence(
    local: &super::LocalCoefficients,
    s: f64,
    mut coeffs: Vec<f64>,
    n_terms: usize,
) -> Result<Vec<f64>> {
    let nu = local.nu as isize;
    let band = local.band().max(1);
    coeffs.reserve(n_terms.saturating_sub(coeffs.len()));
    for n in coeffs.len()..n_terms {
        let ns = n as f64 + s;
        let pivot = local.indicial(ns);
        if pivot.abs() <= 1e-12 * local.indicial_scale(ns) {
            return Err(Error::DegenerateExponent {
                order: n,
                exponent: s,
            });
        }
        let mut acc = CompensatedSum::default();
        let j_lo = n.saturating_sub(band);
        for (j, &cj) in coeffs.iter().enumerate().take(n).skip(j_lo) {
            if cj == 0.0 {
                continue;
            }
            let js = j as f64 + s;
            let lag = (n - j) as isize;
            let w = local.a(lag + nu) * js * (js - 1.0)
                + local.b(lag + nu - 1) * js
                + local.d(lag + nu - 2);
            acc.add(cj * w);
        }
        coeffs.push(-acc.total() / pivot);
    }
    coeffs.truncate(n_terms);
    Ok(coeffs)
}
