//! The three Heun-type families produced by the radial reductions.
//!
//! * bi-confluent: `f'' + (g/r + d + e r) f' + (a r - q)/r f = 0`
//! * double-confluent: `g'' + (g/r^2 + d/r + e) g' + (a r - q)/r^2 g = 0`
//! * confluent: `h'' + (g/x + d/(x-1) + e) h' + (a x - q)/(x(x-1)) h = 0`
//!
//! Each is converted to a [`RationalOde`] with cleared denominators. The
//! regular-at-origin branch is normalized so that its leading series
//! coefficient is one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode_core::{
    frobenius_series, indicial_exponents, rk_continue_through, taylor_series, Jet, Polynomial,
    RationalOde, SeriesSolution, DEFAULT_TERMS, TAIL_RATIO_TOL,
};

/// Relative threshold for both termination conditions.
pub const TERMINATION_TOL: f64 = 1e-10;

/// Integrator tolerance used when continuing series solutions.
pub const CONTINUATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(rename = "bi-confluent")]
    Biconfluent,
    DoubleConfluent,
    Confluent,
}

/// `f'' + (gamma/r + delta + epsilon r) f' + (alpha r - q)/r f = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiconfluentParams {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub q: f64,
}

/// `g'' + (gamma/r^2 + delta/r + epsilon) g' + (alpha r - q)/r^2 g = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleConfluentParams {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub q: f64,
}

/// `h'' + (gamma/x + delta/(x-1) + epsilon) h' + (alpha x - q)/(x(x-1)) h = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfluentParams {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum HeunParams {
    #[serde(rename = "bi-confluent")]
    Biconfluent(BiconfluentParams),
    DoubleConfluent(DoubleConfluentParams),
    Confluent(ConfluentParams),
}

impl From<BiconfluentParams> for HeunParams {
    fn from(p: BiconfluentParams) -> Self {
        HeunParams::Biconfluent(p)
    }
}

impl From<DoubleConfluentParams> for HeunParams {
    fn from(p: DoubleConfluentParams) -> Self {
        HeunParams::DoubleConfluent(p)
    }
}

impl From<ConfluentParams> for HeunParams {
    fn from(p: ConfluentParams) -> Self {
        HeunParams::Confluent(p)
    }
}

impl HeunParams {
    pub fn family(&self) -> Family {
        match self {
            HeunParams::Biconfluent(_) => Family::Biconfluent,
            HeunParams::DoubleConfluent(_) => Family::DoubleConfluent,
            HeunParams::Confluent(_) => Family::Confluent,
        }
    }

    /// `(gamma, delta, epsilon, alpha, q)`.
    pub fn as_tuple(&self) -> (f64, f64, f64, f64, f64) {
        match *self {
            HeunParams::Biconfluent(p) => (p.gamma, p.delta, p.epsilon, p.alpha, p.q),
            HeunParams::DoubleConfluent(p) => (p.gamma, p.delta, p.epsilon, p.alpha, p.q),
            HeunParams::Confluent(p) => (p.gamma, p.delta, p.epsilon, p.alpha, p.q),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.as_tuple().3
    }

    pub fn epsilon(&self) -> f64 {
        self.as_tuple().2
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut out = *self;
        match &mut out {
            HeunParams::Biconfluent(p) => p.alpha = alpha,
            HeunParams::DoubleConfluent(p) => p.alpha = alpha,
            HeunParams::Confluent(p) => p.alpha = alpha,
        }
        out
    }

    pub fn to_ode(&self) -> RationalOde {
        to_ode(self)
    }
}

/// Clears denominators and returns the polynomial-coefficient equation.
pub fn to_ode(params: &HeunParams) -> RationalOde {
    let (g, d, e, a, q) = params.as_tuple();
    let (p2, p1, p0) = match params {
        // r f'' + (g + d r + e r^2) f' + (a r - q) f = 0
        HeunParams::Biconfluent(_) => (vec![0.0, 1.0], vec![g, d, e], vec![-q, a]),
        // r^2 g'' + (g + d r + e r^2) g' + (a r - q) g = 0
        HeunParams::DoubleConfluent(_) => (vec![0.0, 0.0, 1.0], vec![g, d, e], vec![-q, a]),
        // x(x-1) h'' + (g (x-1) + d x + e x (x-1)) h' + (a x - q) h = 0
        HeunParams::Confluent(_) => (vec![0.0, -1.0, 1.0], vec![-g, g + d - e, e], vec![-q, a]),
    };
    RationalOde::new(
        Polynomial::new(p2),
        Polynomial::new(p1),
        Polynomial::new(p0),
    )
    .expect("Heun leading coefficients are nonzero polynomials")
}

/// Degree `n` with `alpha + n epsilon = 0`, if any.
///
/// This is the necessary condition for a polynomial solution: the highest
/// power produced by a degree-`n` polynomial must cancel.
pub fn alpha_termination_degree(params: &HeunParams) -> Option<usize> {
    let (a, e) = (params.alpha(), params.epsilon());
    if e == 0.0 {
        return None;
    }
    let n = -a / e;
    let k = n.round();
    if k < 0.0 {
        return None;
    }
    let residual = a + k * e;
    let scale = a.abs().max(e.abs()).max((k * e).abs());
    (residual.abs() <= TERMINATION_TOL * scale).then_some(k as usize)
}

/// Series coefficients of the polynomial branch (exponent 0) about the origin.
///
/// Bi-confluent and confluent use the Frobenius recurrence at the regular
/// singular point; the double-confluent origin is irregular and uses the
/// formal-series recurrence
/// `gamma (k+1) c_{k+1} = -(k(k-1) + delta k - q) c_k - (alpha + epsilon (k-1)) c_{k-1}`.
pub fn origin_coefficients(params: &HeunParams, n_terms: usize) -> Result<Vec<f64>> {
    match params {
        HeunParams::DoubleConfluent(p) if p.gamma != 0.0 => {
            Ok(double_confluent_formal_series(p, n_terms))
        }
        _ => Ok(frobenius_series(&to_ode(params), 0.0, 0.0, n_terms)?.coeffs),
    }
}

fn double_confluent_formal_series(p: &DoubleConfluentParams, n_terms: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n_terms);
    c.push(1.0);
    for k in 0..n_terms.saturating_sub(1) {
        let kf = k as f64;
        let prev = if k == 0 { 0.0 } else { c[k - 1] };
        let next = (-(kf * (kf - 1.0) + p.delta * kf - p.q) * c[k]
            - (p.alpha + p.epsilon * (kf - 1.0)) * prev)
            / (p.gamma * (kf + 1.0));
        c.push(next);
    }
    c
}

/// Coefficient `c_{n+1}` of the origin series once `alpha = -n epsilon` is
/// imposed. Zero means the Heun function degenerates to a degree-`n` polynomial.
pub fn accessory_residual(params: &HeunParams, n: usize) -> Result<f64> {
    let imposed = params.with_alpha(-(n as f64) * params.epsilon());
    let c = origin_coefficients(&imposed, n + 2)?;
    Ok(c[n + 1])
}

/// The degree-`n` polynomial obtained by truncating the origin series of the
/// `alpha`-imposed equation after `c_n`.
pub fn terminated_polynomial(params: &HeunParams, n: usize) -> Result<Polynomial> {
    let imposed = params.with_alpha(-(n as f64) * params.epsilon());
    let mut c = origin_coefficients(&imposed, n + 1)?;
    c.truncate(n + 1);
    Ok(Polynomial::new(c))
}

/// Both termination conditions for a candidate degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminationReport {
    pub family: Family,
    pub degree: usize,
    /// `alpha + n epsilon` for the parameters as given.
    pub alpha_condition_residual: f64,
    /// `alpha_condition_residual` over `max(|alpha|, |n epsilon|, |epsilon|)`.
    pub alpha_condition_relative: f64,
    /// `c_{n+1}` with the alpha condition imposed.
    pub accessory_residual: f64,
    /// `c_{n+1}` over `max_{k <= n} |c_k|`.
    pub accessory_relative: f64,
    pub is_true_polynomial: bool,
}

pub fn termination_report(params: &HeunParams, n: usize) -> Result<TerminationReport> {
    let (a, e) = (params.alpha(), params.epsilon());
    let nf = n as f64;
    let alpha_res = a + nf * e;
    let scale = a.abs().max((nf * e).abs()).max(e.abs());
    let alpha_rel = if scale == 0.0 { 0.0 } else { alpha_res / scale };
    let imposed = params.with_alpha(-nf * e);
    let c = origin_coefficients(&imposed, n + 2)?;
    let acc = c[n + 1];
    let cmax = c[..=n].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let acc_rel = acc / cmax;
    Ok(TerminationReport {
        family: params.family(),
        degree: n,
        alpha_condition_residual: alpha_res,
        alpha_condition_relative: alpha_rel,
        accessory_residual: acc,
        accessory_relative: acc_rel,
        is_true_polynomial: alpha_rel.abs() < TERMINATION_TOL && acc_rel.abs() < TERMINATION_TOL,
    })
}

/// Evaluation strategy for the regular-at-origin branch.
#[derive(Debug, Clone)]
enum Strategy {
    /// Frobenius series at a regular singular origin, valid for `|x| <= switch`,
    /// continued numerically beyond.
    Origin { series: SeriesSolution, switch: f64 },
    /// Irregular origin (double-confluent with `gamma > 0`): optimally truncated
    /// formal series below `launch`, forward integration from `launch` up to
    /// `anchor - half`, a Taylor series anchored at `anchor` on
    /// `|x - anchor| <= half`, and forward integration beyond.
    Irregular {
        formal: Vec<f64>,
        launch: f64,
        anchor: SeriesSolution,
        half: f64,
    },
}

/// Evaluator of the regular branch, normalized to one at the leading series
/// coefficient. Construction does all the series work once; evaluation at many
/// points reuses it.
#[derive(Debug, Clone)]
pub struct HeunEvaluator {
    params: HeunParams,
    ode: RationalOde,
    strategy: Strategy,
    upper_limit: f64,
}

/// Anchor of the ordinary-point Taylor series for the double-confluent family.
pub const DOUBLE_CONFLUENT_ANCHOR: f64 = 1.0;

impl HeunEvaluator {
    pub fn new(params: &HeunParams) -> Result<Self> {
        let ode = to_ode(params);
        let upper_limit = match params {
            HeunParams::Confluent(_) => 1.0,
            _ => f64::INFINITY,
        };
        let strategy = match params {
            HeunParams::DoubleConfluent(p) if p.gamma > 0.0 => Self::irregular_strategy(p, &ode)?,
            HeunParams::DoubleConfluent(p) if p.gamma < 0.0 => {
                return Err(Error::Unsupported(format!(
                    "double-confluent gamma = {} < 0: the regular branch is not recessive at the origin",
                    p.gamma
                )))
            }
            _ => Self::origin_strategy(&ode)?,
        };
        Ok(Self {
            params: *params,
            ode,
            strategy,
            upper_limit,
        })
    }

    fn origin_strategy(ode: &RationalOde) -> Result<Strategy> {
        let (s_hi, _) = indicial_exponents(ode, 0.0)?;
        let radius = ode.radius_hint(0.0);
        let mut switch = (0.5 * radius).min(1.0);
        let mut n_terms = DEFAULT_TERMS;
        let mut series = frobenius_series(ode, 0.0, s_hi, n_terms)?;
        // Shrink the series region until the tail test passes at its edge.
        for _ in 0..60 {
            let ok = [switch, -switch]
                .iter()
                .filter_map(|&x| series.eval(x).ok())
                .all(|p| p.tail_ratio < TAIL_RATIO_TOL);
            if ok {
                break;
            }
            if n_terms < 4 * DEFAULT_TERMS {
                n_terms *= 2;
                series = frobenius_series(ode, 0.0, s_hi, n_terms)?;
            } else {
                switch *= 0.5;
            }
        }
        Ok(Strategy::Origin { series, switch })
    }

    fn irregular_strategy(p: &DoubleConfluentParams, ode: &RationalOde) -> Result<Strategy> {
        // The second solution behaves like exp(gamma / r) near the origin, so
        // the regular branch is recessive there and forward integration is
        // stable. Launch where the optimally truncated formal series has
        // error ~ exp(-40).
        let launch = (p.gamma / 40.0).min(0.05);
        let formal = double_confluent_formal_series(p, 400);
        let start = eval_formal(&formal, launch);
        let anchor_x = DOUBLE_CONFLUENT_ANCHOR;
        let half = 0.5 * anchor_x;
        let ys = rk_continue_through(
            ode,
            launch,
            (start.value, start.d1),
            &[anchor_x],
            CONTINUATION_TOL * 0.1,
        )?;
        let (g1, dg1) = ys[0];
        let anchor = taylor_series(ode, anchor_x, g1, dg1, DEFAULT_TERMS)?;
        Ok(Strategy::Irregular {
            formal,
            launch,
            anchor,
            half,
        })
    }

    pub fn params(&self) -> &HeunParams {
        &self.params
    }

    pub fn ode(&self) -> &RationalOde {
        &self.ode
    }

    /// The origin (or anchor) series used near the expansion point.
    pub fn series(&self) -> &SeriesSolution {
        match &self.strategy {
            Strategy::Origin { series, .. } => series,
            Strategy::Irregular { anchor, .. } => anchor,
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {x}")));
        }
        if x >= self.upper_limit {
            return Err(Error::Domain(format!(
                "x = {x} lies at or beyond the x = 1 singular point of the confluent equation"
            )));
        }
        if matches!(self.strategy, Strategy::Irregular { .. }) && x <= 0.0 {
            return Err(Error::Domain(format!(
                "x = {x}: the double-confluent branch is defined for x > 0"
            )));
        }
        Ok(())
    }

    fn jet_from_state(&self, x: f64, y: f64, dy: f64) -> Jet {
        Jet::new(y, dy, self.ode.second_derivative(x, y, dy))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_jet(x)?.value)
    }

    pub fn eval_jet(&self, x: f64) -> Result<Jet> {
        Ok(self.eval_many(&[x])?[0])
    }

    /// Values with analytic first and second derivatives at every point.
    /// Points may be given in any order.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<Jet>> {
        for &x in xs {
            self.check_domain(x)?;
        }
        let mut out = vec![Jet::default(); xs.len()];
        match &self.strategy {
            Strategy::Origin { series, switch } => {
                let mut right = Vec::new();
                let mut left = Vec::new();
                for (i, &x) in xs.iter().enumerate() {
                    if x.abs() <= *switch {
                        out[i] = series.eval(x)?.jet;
                    } else if x > 0.0 {
                        right.push(i);
                    } else {
                        left.push(i);
                    }
                }
                self.continue_from_series(series, *switch, xs, &mut right, &mut out)?;
                self.continue_from_series(series, -*switch, xs, &mut left, &mut out)?;
            }
            Strategy::Irregular {
                formal,
                launch,
                anchor,
                half,
            } => {
                let a = anchor.x0;
                let mut inner = Vec::new();
                let mut outer = Vec::new();
                for (i, &x) in xs.iter().enumerate() {
                    if x < *launch {
                        out[i] = eval_formal(formal, x);
                    } else if x < a - half {
                        inner.push(i);
                    } else if x <= a + half {
                        out[i] = anchor.eval(x)?.jet;
                    } else {
                        outer.push(i);
                    }
                }
                if !inner.is_empty() {
                    let start = eval_formal(formal, *launch);
                    self.continue_points(*launch, start, xs, &mut inner, &mut out)?;
                }
                self.continue_from_series(anchor, a + half, xs, &mut outer, &mut out)?;
            }
        }
        Ok(out)
    }

    fn continue_from_series(
        &self,
        series: &SeriesSolution,
        from: f64,
        xs: &[f64],
        idx: &mut [usize],
        out: &mut [Jet],
    ) -> Result<()> {
        if idx.is_empty() {
            return Ok(());
        }
        let start = series.eval(from)?.jet;
        self.continue_points(from, start, xs, idx, out)
    }

    fn continue_points(
        &self,
        from: f64,
        start: Jet,
        xs: &[f64],
        idx: &mut [usize],
        out: &mut [Jet],
    ) -> Result<()> {
        let dir = if idx.iter().any(|&i| xs[i] > from) {
            1.0
        } else {
            -1.0
        };
        idx.sort_by(|&i, &j| (dir * xs[i]).total_cmp(&(dir * xs[j])));
        let targets: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
        let states = rk_continue_through(
            &self.ode,
            from,
            (start.value, start.d1),
            &targets,
            CONTINUATION_TOL,
        )?;
        for (&i, (y, dy)) in idx.iter().zip(states) {
            out[i] = self.jet_from_state(xs[i], y, dy);
        }
        Ok(())
    }
}

/// Optimally truncated asymptotic sum of a formal series: stops once terms
/// start growing or fall below machine precision.
fn eval_formal(c: &[f64], x: f64) -> Jet {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut xk = 1.0;
    for (k, &ck) in c.iter().enumerate() {
        let term = ck * xk;
        let mag = term.abs();
        if k > 1 && mag > prev_mag {
            break;
        }
        let kf = k as f64;
        v += term;
        if k >= 1 {
            d1 += kf * ck * xk / x;
        }
        if k >= 2 {
            d2 += kf * (kf - 1.0) * ck * xk / (x * x);
        }
        if k > 1 && mag < 1e-18 * v.abs() {
            break;
        }
        prev_mag = mag;
        xk *= x;
    }
    Jet::new(v, d1, d2)
}

/// Regular-branch value of the Heun function at `x`.
pub fn heun_eval(params: &HeunParams, x: f64) -> Result<f64> {
    HeunEvaluator::new(params)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode_core::{ode_residual, rk_continue};

    fn bi(gamma: f64, delta: f64, epsilon: f64, alpha: f64, q: f64) -> HeunParams {
        BiconfluentParams {
            gamma,
            delta,
            epsilon,
            alpha,
            q,
        }
        .into()
    }

    #[test]
    fn biconfluent_cleared_form() {
        let ode = to_ode(&bi(3.0, -2.0, -2.0, 0.7, 1.3));
        assert_eq!(ode.p2().coeffs(), &[0.0, 1.0]);
        assert_eq!(ode.p1().coeffs(), &[3.0, -2.0, -2.0]);
        assert_eq!(ode.p0().coeffs(), &[-1.3, 0.7]);
    }

    #[test]
    fn double_confluent_cleared_form() {
        let p: HeunParams = DoubleConfluentParams {
            gamma: 2.0,
            delta: -1.0,
            epsilon: 0.5,
            alpha: 0.25,
            q: 3.0,
        }
        .into();
        let ode = to_ode(&p);
        assert_eq!(ode.p2().coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(ode.p1().coeffs(), &[2.0, -1.0, 0.5]);
        assert_eq!(ode.p0().coeffs(), &[-3.0, 0.25]);
    }

    #[test]
    fn confluent_zero_parameters_is_free_equation() {
        let p: HeunParams = ConfluentParams {
            gamma: 0.0,
            delta: 0.0,
            epsilon: 0.0,
            alpha: 0.0,
            q: 0.0,
        }
        .into();
        let ode = to_ode(&p);
        assert_eq!(ode.p2().coeffs(), &[0.0, -1.0, 1.0]);
        assert!(ode.p1().is_zero() && ode.p0().is_zero());
        assert_eq!(ode.singular_points(), &[0.0, 1.0]);
    }

    #[test]
    fn termination_degree() {
        assert_eq!(
            alpha_termination_degree(&bi(3.0, -2.0, -2.0, 4.0, 1.0)),
            Some(2)
        );
        assert_eq!(
            alpha_termination_degree(&bi(3.0, -2.0, -2.0, 3.0, 1.0)),
            None
        );
        assert_eq!(
            alpha_termination_degree(&bi(3.0, -2.0, -2.0, -4.0, 1.0)),
            None
        );
        assert_eq!(
            alpha_termination_degree(&bi(3.0, -2.0, 0.0, 0.0, 1.0)),
            None
        );
    }

    #[test]
    fn accessory_first_step() {
        assert_eq!(
            accessory_residual(&bi(3.0, -2.0, -2.0, 9.0, 0.0), 0).unwrap(),
            0.0
        );
        let c1 = accessory_residual(&bi(3.0, -2.0, -2.0, 9.0, -3.0), 0).unwrap();
        assert!((c1 + 1.0).abs() < 1e-15);
        let rep = termination_report(&bi(3.0, -2.0, -2.0, 0.0, -3.0), 0).unwrap();
        assert!(!rep.is_true_polynomial);
        assert_eq!(rep.alpha_condition_residual, 0.0);
    }

    #[test]
    fn accessory_root_by_bisection() {
        // Oracle: bisection over q of c_2(q) at n = 1.
        let (g, d, e) = (2.5, -1.0, -2.0);
        let c2 = |q: f64| accessory_residual(&bi(g, d, e, 0.0, q), 1).unwrap();
        let (mut lo, mut hi) = (0.0, 5.0);
        assert!(c2(lo) * c2(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c2(lo) * c2(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        assert!(c2(q).abs() < 1e-12);
        let p = bi(g, d, e, -e, q);
        let rep = termination_report(&p, 1).unwrap();
        assert!(rep.is_true_polynomial, "{rep:?}");
        let poly = terminated_polynomial(&p, 1).unwrap();
        let ev = HeunEvaluator::new(&p).unwrap();
        for &r in &[0.1, 0.4, 0.9] {
            let v = ev.eval(r).unwrap();
            assert!((v - poly.eval(r)).abs() < 1e-12, "{v} vs {}", poly.eval(r));
        }
        // Coefficients beyond the degree vanish.
        let c = origin_coefficients(&p, 10).unwrap();
        assert!(c[2..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn heun_eval_at_origin_is_one() {
        assert_eq!(
            heun_eval(&bi(3.0, -2.0, -2.0, 2.0, -3.0), 0.0).unwrap(),
            1.0
        );
        let conf: HeunParams = ConfluentParams {
            gamma: 1.5,
            delta: 1.0,
            epsilon: -0.3,
            alpha: 0.2,
            q: 0.1,
        }
        .into();
        assert_eq!(heun_eval(&conf, 0.0).unwrap(), 1.0);
        assert!(matches!(heun_eval(&conf, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn residual_of_evaluated_branch() {
        let p = bi(3.0, -2.0, -2.0, 2.0, -3.0);
        let ev = HeunEvaluator::new(&p).unwrap();
        let pts: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
        let jets = ev.eval_many(&pts).unwrap();
        let rep = ode_residual(
            ev.ode(),
            |x| {
                let i = pts.iter().position(|&p| p == x).unwrap();
                Ok(jets[i])
            },
            &pts,
        )
        .unwrap();
        assert!(rep.max_relative() < 1e-8, "{}", rep.max_relative());
    }

    #[test]
    fn double_confluent_dual_path() {
        // Kratzer-like parameters: C = 1, D = 0.5, m = 1, lambda = 1/2, eps = 0.8.
        let kappa = (1.0_f64 - 0.64).sqrt();
        let p = DoubleConfluentParams {
            gamma: 2.0,
            delta: 1.0,
            epsilon: 2.0 * kappa,
            alpha: kappa + 1.0,
            q: 0.75 - 2.0 * (kappa - 1.0) + 0.5,
        };
        let hp: HeunParams = p.into();
        let ev = HeunEvaluator::new(&hp).unwrap();
        // Independent path: launch from a different small radius.
        let formal = double_confluent_formal_series(&p, 400);
        let r0 = 0.02;
        let s = eval_formal(&formal, r0);
        let t = rk_continue(&to_ode(&hp), r0, (s.value, s.d1), 1.0, 1e-13).unwrap();
        let direct = t.last().1;
        let via = ev.eval(1.0).unwrap();
        assert!(
            (direct - via).abs() < 1e-8 * direct.abs(),
            "{direct} vs {via}"
        );
    }

    #[test]
    fn negative_double_confluent_gamma_unsupported() {
        let p: HeunParams = DoubleConfluentParams {
            gamma: -1.0,
            delta: 1.0,
            epsilon: 1.0,
            alpha: 0.0,
            q: 0.0,
        }
        .into();
        assert!(matches!(HeunEvaluator::new(&p), Err(Error::Unsupported(_))));
    }
}
