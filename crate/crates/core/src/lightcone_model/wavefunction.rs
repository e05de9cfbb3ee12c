use serde::{Deserialize, Serialize};

use super::maps::RadialMap;
use crate::error::{Error, Result};
use crate::heun_family::{
    terminated_polynomial, termination_report, HeunEvaluator, CONTINUATION_TOL,
};
use crate::ode_core::{Jet, Polynomial, DEFAULT_TERMS};

/// The Heun part of a wavefunction.
#[derive(Debug, Clone)]
pub enum HeunFactor {
    /// Exact terminated polynomial.
    Polynomial { poly: Polynomial, degree: usize },
    /// Regular branch by series and continuation.
    Numeric(Box<HeunEvaluator>),
}

impl HeunFactor {
    /// Uses the polynomial when level `n` terminates completely, the numeric
    /// branch otherwise.
    pub fn for_map(map: &RadialMap, n: Option<usize>) -> Result<Self> {
        let params = map.heun_params();
        if let Some(n) = n {
            if termination_report(&params, n)?.is_true_polynomial {
                return Self::polynomial(map, n);
            }
        }
        Ok(HeunFactor::Numeric(Box::new(HeunEvaluator::new(&params)?)))
    }

    /// The degree-`n` polynomial with `alpha + n epsilon = 0` imposed, whether
    /// or not the accessory condition holds.
    pub fn polynomial(map: &RadialMap, n: usize) -> Result<Self> {
        Ok(HeunFactor::Polynomial {
            poly: terminated_polynomial(&map.heun_params(), n)?,
            degree: n,
        })
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<Jet>> {
        match self {
            HeunFactor::Polynomial { poly, .. } => {
                Ok(xs.iter().map(|&x| poly.eval_jet(x)).collect())
            }
            HeunFactor::Numeric(ev) => ev.eval_many(xs),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            HeunFactor::Polynomial { .. } => "polynomial",
            HeunFactor::Numeric(_) => "numeric",
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            HeunFactor::Polynomial { degree, .. } => Some(*degree),
            HeunFactor::Numeric(_) => None,
        }
    }
}

/// `prefactor(r) * H(x(r))` with derivatives in `r`.
pub fn gamma_jets(map: &RadialMap, factor: &HeunFactor, rs: &[f64]) -> Result<Vec<Jet>> {
    let s = map.dx_dr();
    let xs: Vec<f64> = rs.iter().map(|r| r * s).collect();
    let hs = factor.eval_many(&xs)?;
    Ok(rs
        .iter()
        .zip(hs)
        .map(|(&r, h)| map.prefactor(r) * h.rescale_variable(s))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionTable {
    pub r: Vec<f64>,
    pub gamma1: Vec<f64>,
    /// Factor applied to the raw `prefactor * Heun` values.
    pub normalization: f64,
    pub heun_source: String,
    pub polynomial_degree: Option<usize>,
    pub series_terms: usize,
    pub continuation_tol: f64,
    pub nodes: usize,
    /// Fitted `d ln|G| / dr` over the last 5% of the grid.
    pub tail_growth: f64,
    /// False when the tail grows while still above `1e-4` of the peak.
    pub decaying: bool,
}

pub fn trapezoid(r: &[f64], f: &[f64]) -> f64 {
    r.windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Sign changes, ignoring values below `1e-8` of the peak.
pub fn count_nodes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-8 * peak;
    let mut last = 0.0;
    let mut count = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Fraction of the grid used to judge the tail.
const TAIL_FRACTION: f64 = 0.05;

/// Growth rate `d ln|G| / dr` fitted over the last points of the grid.
fn tail_growth(r: &[f64], g: &[f64]) -> f64 {
    let n = r.len();
    let k = ((n as f64 * TAIL_FRACTION).ceil() as usize).clamp(2, n);
    let pts: Vec<(f64, f64)> = (n - k..n)
        .filter(|&i| g[i] != 0.0)
        .map(|i| (r[i], g[i].abs().ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Evaluates the wavefunction on `grid` and normalizes it to unit trapezoid
/// L2 norm. A growing tail is a [`Error::Divergence`].
pub fn assemble_wavefunction(
    map: &RadialMap,
    factor: &HeunFactor,
    grid: &[f64],
) -> Result<WavefunctionTable> {
    assemble_wavefunction_with(map, factor, grid, true)
}

/// As [`assemble_wavefunction`]; with `require_decay = false` a growing but
/// finite profile is normalized on the box and reported through `decaying`.
pub fn assemble_wavefunction_with(
    map: &RadialMap,
    factor: &HeunFactor,
    grid: &[f64],
    require_decay: bool,
) -> Result<WavefunctionTable> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "grid needs at least two points".into(),
        ));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "grid must be positive and strictly increasing".into(),
        ));
    }
    let limit = map.r_limit();
    if grid[grid.len() - 1] >= limit {
        return Err(Error::Domain(format!(
            "grid reaches r = {}, beyond the admissible limit {limit}",
            grid[grid.len() - 1]
        )));
    }
    let raw: Vec<f64> = gamma_jets(map, factor, grid)?
        .into_iter()
        .map(|j| j.value)
        .collect();
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            growth_exponent: f64::INFINITY,
        });
    }
    let peak = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::Domain(
            "wavefunction vanishes on the whole grid".into(),
        ));
    }
    let growth = tail_growth(grid, &raw);
    let end = raw[raw.len() - 1].abs();
    let decaying = !(growth > 0.0 && end > 1e-4 * peak);
    if require_decay && !decaying {
        return Err(Error::Divergence {
            growth_exponent: growth,
        });
    }
    let sq: Vec<f64> = raw.iter().map(|v| v * v).collect();
    let norm2 = trapezoid(grid, &sq);
    if !(norm2.is_finite() && norm2 > 0.0) {
        return Err(Error::Divergence {
            growth_exponent: growth,
        });
    }
    let normalization = 1.0 / norm2.sqrt();
    let gamma1: Vec<f64> = raw.iter().map(|v| v * normalization).collect();
    let nodes = count_nodes(&gamma1);
    Ok(WavefunctionTable {
        r: grid.to_vec(),
        gamma1,
        normalization,
        heun_source: factor.label().to_string(),
        polynomial_degree: factor.degree(),
        series_terms: DEFAULT_TERMS,
        continuation_tol: CONTINUATION_TOL,
        nodes,
        tail_growth: growth,
        decaying,
    })
}

pub fn uniform_grid(r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(r_min < r_max) || !r_min.is_finite() || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "grid [{r_min}, {r_max}] with {points} points is invalid"
        )));
    }
    let h = (r_max - r_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                r_max
            } else {
                r_min + i as f64 * h
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightcone_model::maps::{cornell_heun_map, MapForm};
    use crate::lightcone_model::potentials::cornell_epsilon;

    #[test]
    fn unit_heun_factor_prefactor() {
        // A = 0, B = 1, m = 1, lambda = 1/2, n = 0: H = 1 at r = 1.
        let eps = cornell_epsilon(0.0, 1.0, 0, 0.5).unwrap();
        let map = RadialMap::Cornell(cornell_heun_map(
            0.0,
            1.0,
            1.0,
            0.5,
            eps,
            MapForm::Corrected,
        ));
        let f = HeunFactor::polynomial(&map, 0).unwrap();
        let g = gamma_jets(&map, &f, &[1.0]).unwrap()[0];
        assert!((g.value - (-0.5_f64 - 1.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn normalized_ground_state() {
        let eps = cornell_epsilon(0.0, 1.0, 0, 0.5).unwrap();
        let map = RadialMap::Cornell(cornell_heun_map(
            0.0,
            1.0,
            0.0,
            0.5,
            eps,
            MapForm::Corrected,
        ));
        let f = HeunFactor::for_map(&map, Some(0)).unwrap();
        assert_eq!(f.label(), "polynomial");
        let grid = uniform_grid(1e-3, 10.0, 2000).unwrap();
        let t = assemble_wavefunction(&map, &f, &grid).unwrap();
        let sq: Vec<f64> = t.gamma1.iter().map(|v| v * v).collect();
        assert!((trapezoid(&t.r, &sq) - 1.0).abs() < 1e-12);
        assert_eq!(t.nodes, 0);
        assert!(t.gamma1[t.gamma1.len() - 1].abs() < 1e-10);
    }

    #[test]
    fn non_terminating_level_diverges() {
        // m = 0 with odd n never terminates: the regular branch grows like exp(B r^2 / 2).
        let eps = cornell_epsilon(0.0, 1.0, 1, 0.5).unwrap();
        let map = RadialMap::Cornell(cornell_heun_map(
            0.0,
            1.0,
            0.0,
            0.5,
            eps,
            MapForm::Corrected,
        ));
        let f = HeunFactor::for_map(&map, Some(1)).unwrap();
        assert_eq!(f.label(), "numeric");
        let grid = uniform_grid(1e-3, 8.0, 800).unwrap();
        match assemble_wavefunction(&map, &f, &grid) {
            Err(Error::Divergence { growth_exponent }) => assert!(growth_exponent > 0.0),
            other => panic!("expected divergence, got {other:?}"),
        }
        let t = assemble_wavefunction_with(&map, &f, &grid, false).unwrap();
        assert!(!t.decaying && t.tail_growth > 0.0);
    }

    #[test]
    fn rejects_bad_grid() {
        let map = RadialMap::Cornell(cornell_heun_map(
            0.0,
            1.0,
            0.0,
            0.5,
            2.0,
            MapForm::Corrected,
        ));
        let f = HeunFactor::polynomial(&map, 0).unwrap();
        assert!(assemble_wavefunction(&map, &f, &[0.0, 1.0]).is_err());
        assert!(assemble_wavefunction(&map, &f, &[1.0, 0.5]).is_err());
    }
}
