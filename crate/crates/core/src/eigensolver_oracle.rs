//! Independent bound-state solvers for `u'' + 2 (E - V(r)) u = 0` with
//! Dirichlet ends: a finite-difference matrix spectrum and a Numerov shooter.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Potential = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 64;
/// Required WKB decay exponent between the outer turning point and `r_max`.
pub const DECAY_EXPONENT: f64 = 25.0;

#[derive(Clone)]
pub struct RadialProblem {
    potential: Potential,
    pub r_min: f64,
    pub r_max: f64,
    pub n_grid: usize,
}

impl fmt::Debug for RadialProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProblem")
            .field("r_min", &self.r_min)
            .field("r_max", &self.r_max)
            .field("n_grid", &self.n_grid)
            .finish()
    }
}

impl RadialProblem {
    pub fn new(potential: Potential, r_min: f64, r_max: f64, n_grid: usize) -> Result<Self> {
        if n_grid < MIN_GRID {
            return Err(Error::InvalidParameter(format!(
                "n_grid = {n_grid} is below the minimum of {MIN_GRID}"
            )));
        }
        Self::build(potential, r_min, r_max, n_grid)
    }

    // Derived grids (coarse Richardson partner) may fall below MIN_GRID.
    fn build(potential: Potential, r_min: f64, r_max: f64, n_grid: usize) -> Result<Self> {
        if n_grid < 8 {
            return Err(Error::InvalidParameter(format!(
                "n_grid = {n_grid} is too small"
            )));
        }
        if !(r_min >= 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        let p = Self {
            potential,
            r_min,
            r_max,
            n_grid,
        };
        for (i, r) in p.grid().into_iter().enumerate() {
            if i == 0 || i + 1 == n_grid {
                continue;
            }
            if !p.potential(r).is_finite() {
                return Err(Error::Domain(format!(
                    "potential is not finite at grid node r = {r}"
                )));
            }
        }
        Ok(p)
    }

    /// Chooses `r_max` so that the wave at energy `e_max` decays by
    /// `exp(-DECAY_EXPONENT)` beyond its outer turning point, and sets
    /// `r_min = 1e-4 r_max`.
    pub fn with_auto_range(potential: Potential, e_max: f64, n_grid: usize) -> Result<Self> {
        let r_max = auto_r_max(&*potential, e_max)?;
        Self::new(potential, 1e-4 * r_max, r_max, n_grid)
    }

    pub fn potential(&self, r: f64) -> f64 {
        (self.potential)(r)
    }

    pub fn potential_fn(&self) -> &Potential {
        &self.potential
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_grid - 1) as f64
    }

    /// All nodes, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_grid)
            .map(|i| {
                if i + 1 == self.n_grid {
                    self.r_max
                } else {
                    self.r_min + i as f64 * h
                }
            })
            .collect()
    }

    pub fn with_grid(&self, n_grid: usize) -> Result<Self> {
        Self::build(self.potential.clone(), self.r_min, self.r_max, n_grid)
    }

    pub fn with_range(&self, r_min: f64, r_max: f64, n_grid: usize) -> Result<Self> {
        Self::build(self.potential.clone(), r_min, r_max, n_grid)
    }
}

fn auto_r_max(v: &dyn Fn(f64) -> f64, e: f64) -> Result<f64> {
    let mut r: f64 = 1e-3;
    let mut integral = 0.0;
    let mut seen_allowed = false;
    while r < 1e6 {
        let dr = 0.01 * r.max(0.1);
        let mid = r + 0.5 * dr;
        let gap = v(mid) - e;
        if gap <= 0.0 {
            seen_allowed = true;
            integral = 0.0;
        } else if seen_allowed {
            integral += (2.0 * gap).sqrt() * dr;
            if integral >= DECAY_EXPONENT {
                return Ok(r + dr);
            }
        }
        r += dr;
    }
    Err(Error::NoBoundState(format!(
        "no confining region found for energy {e}: the wave never decays by exp(-{DECAY_EXPONENT})"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub r_min: f64,
    pub r_max: f64,
    pub n_grid: usize,
    pub spacing: f64,
    pub coarse_n_grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    /// Lowest eigenvalues of the fine-grid matrix, ascending.
    pub energies: Vec<f64>,
    pub coarse_energies: Vec<f64>,
    /// Richardson-extrapolated eigenvalues.
    pub extrapolated: Vec<f64>,
    /// Richardson estimate of the discretization error of `energies`.
    pub error_estimates: Vec<f64>,
    pub node_counts: Vec<usize>,
    /// Shift of each level when `r_max` is doubled at fixed spacing.
    pub boundary_shifts: Vec<f64>,
    pub grid: GridInfo,
    /// More levels were requested than `n_grid / 4`.
    pub truncated: bool,
    /// Some boundary shift exceeds its error estimate.
    pub boundary_sensitive: bool,
    /// Unit-norm eigenvectors (trapezoid L2 on the full grid, ends zero).
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

impl OracleSpectrum {
    /// Index of the level closest to `e`.
    pub fn nearest_level(&self, e: f64) -> Option<usize> {
        (0..self.energies.len()).min_by(|&i, &j| {
            (self.extrapolated[i] - e)
                .abs()
                .total_cmp(&(self.extrapolated[j] - e).abs())
        })
    }
}

/// Symmetric tridiagonal matrix of `-u''/2 + V u` on the interior nodes.
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    fn from_problem(p: &RadialProblem) -> Self {
        let h = p.spacing();
        let grid = p.grid();
        let diag = grid[1..p.n_grid - 1]
            .iter()
            .map(|&r| 1.0 / (h * h) + p.potential(r))
            .collect();
        Self {
            diag,
            off: -0.5 / (h * h),
        }
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence via LDL^T).
    fn count_below(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = a - x - if i == 0 { 0.0 } else { off2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + x.abs() + self.off.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &a| m.min(a)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a)) + r;
        (lo, hi)
    }

    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inverse iteration with a partially pivoted tridiagonal solve.
    fn eigenvector(&self, e: f64) -> Vec<f64> {
        let n = self.dim();
        let shift = e + 1e-12 * (1.0 + e.abs());
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..3 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        // Gaussian elimination with partial pivoting on a tridiagonal matrix
        // produces at most two superdiagonals.
        let n = self.dim();
        let mut a: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut b = vec![self.off; n]; // superdiagonal
        let mut c = vec![0.0; n]; // second superdiagonal
        let sub = vec![self.off; n]; // subdiagonal entry below row i
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            // Row i holds (a, b) at columns (i, i+1); row i+1 holds
            // (sub, a, b) at columns (i, i+1, i+2).
            let (ai, bi, yi) = (a[i], b[i], y[i]);
            let (si, a1, b1, y1) = (
                sub[i],
                a[i + 1],
                if i + 2 < n { b[i + 1] } else { 0.0 },
                y[i + 1],
            );
            if si.abs() > ai.abs() {
                let f = ai / si;
                a[i] = si;
                b[i] = a1;
                c[i] = b1;
                y[i] = y1;
                a[i + 1] = bi - f * a1;
                b[i + 1] = -f * b1;
                y[i + 1] = yi - f * y1;
            } else {
                let piv = if ai == 0.0 { f64::EPSILON } else { ai };
                a[i] = piv;
                let f = si / piv;
                a[i + 1] = a1 - f * bi;
                y[i + 1] = y1 - f * yi;
            }
        }
        if a[n - 1] == 0.0 {
            a[n - 1] = f64::EPSILON;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= b[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= c[i] * x[i + 2];
            }
            x[i] = s / a[i];
        }
        x
    }
}

fn sign_changes(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = 1e-9 * max;
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}

fn levels(p: &RadialProblem, k: usize) -> Vec<f64> {
    let t = Tridiagonal::from_problem(p);
    (0..k).map(|i| t.eigenvalue(i)).collect()
}

/// Lowest `k` eigenvalues of the three-point discretization, with a
/// Richardson error estimate from a half-resolution grid and a boundary
/// sensitivity probe at doubled `r_max`.
pub fn fd_spectrum(problem: &RadialProblem, k: usize) -> Result<OracleSpectrum> {
    if k == 0 {
        return Err(Error::InvalidParameter("requested zero levels".into()));
    }
    let limit = problem.n_grid / 4;
    let truncated = k > limit;
    let k = k.min(limit);

    let t = Tridiagonal::from_problem(problem);
    let energies: Vec<f64> = (0..k).map(|i| t.eigenvalue(i)).collect();
    let h = problem.spacing();
    let mut eigenvectors = Vec::with_capacity(k);
    let mut node_counts = Vec::with_capacity(k);
    for &e in &energies {
        let inner = t.eigenvector(e);
        let mut full = Vec::with_capacity(problem.n_grid);
        full.push(0.0);
        full.extend_from_slice(&inner);
        full.push(0.0);
        let first = full.iter().copied().find(|x| x.abs() > 1e-6).unwrap_or(1.0);
        let norm = (full.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
        let s = first.signum() / norm;
        full.iter_mut().for_each(|x| *x *= s);
        node_counts.push(sign_changes(&full));
        eigenvectors.push(full);
    }

    let coarse_n = problem.n_grid.div_ceil(2);
    let coarse = problem.with_grid(coarse_n)?;
    let coarse_energies = levels(&coarse, k);
    let ratio = coarse.spacing() / h;
    let denom = ratio * ratio - 1.0;
    let mut extrapolated = Vec::with_capacity(k);
    let mut error_estimates = Vec::with_capacity(k);
    for (e, ec) in energies.iter().zip(&coarse_energies) {
        let corr = (e - ec) / denom;
        extrapolated.push(e + corr);
        error_estimates.push(corr.abs());
    }

    // Same spacing, twice the outer radius.
    let n_wide = ((2.0 * problem.r_max - problem.r_min) / h).round() as usize + 1;
    let wide = problem.with_range(problem.r_min, 2.0 * problem.r_max - problem.r_min, n_wide)?;
    let wide_levels = levels(&wide, k);
    let boundary_shifts: Vec<f64> = wide_levels
        .iter()
        .zip(&energies)
        .map(|(w, e)| (w - e).abs())
        .collect();
    let boundary_sensitive = boundary_shifts
        .iter()
        .zip(&error_estimates)
        .any(|(s, est)| s > est);

    Ok(OracleSpectrum {
        energies,
        coarse_energies,
        extrapolated,
        error_estimates,
        node_counts,
        boundary_shifts,
        grid: GridInfo {
            r_min: problem.r_min,
            r_max: problem.r_max,
            n_grid: problem.n_grid,
            spacing: h,
            coarse_n_grid: coarse_n,
        },
        truncated,
        boundary_sensitive,
        eigenvectors,
    })
}

/// Number of discrete levels strictly below `e` (Sturm count).
pub fn levels_below(problem: &RadialProblem, e: f64) -> usize {
    Tridiagonal::from_problem(problem).count_below(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    pub energy: f64,
    /// `|E_h - E_2h| / (2^p - 1)` with the order `p` observed on a third grid.
    pub error_estimate: f64,
    pub nodes: usize,
}

struct Numerov<'a> {
    grid: Vec<f64>,
    v: Vec<f64>,
    h: f64,
    _p: &'a RadialProblem,
}

impl<'a> Numerov<'a> {
    fn new(p: &'a RadialProblem) -> Self {
        let grid = p.grid();
        let n = grid.len();
        let v = grid
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if i == 0 || i + 1 == n {
                    // End nodes carry u = 0; use the neighbor to stay finite.
                    let j = if i == 0 { 1 } else { n - 2 };
                    p.potential(grid[j])
                } else {
                    p.potential(r)
                }
            })
            .collect();
        Self {
            grid,
            v,
            h: p.spacing(),
            _p: p,
        }
    }

    fn n(&self) -> usize {
        self.grid.len()
    }

    fn k(&self, i: usize, e: f64) -> f64 {
        2.0 * (e - self.v[i])
    }

    /// First node from which Numerov is started. Below it the wave is
    /// exponentially small and `h^2 |k|` is too large for the scheme.
    fn start(&self, e: f64) -> usize {
        let h2 = self.h * self.h;
        let mut i0 = 0;
        for i in 1..self.n() - 1 {
            if h2 * self.k(i, e).abs() > 1.0 {
                i0 = i;
            } else if self.v[i] < e {
                break;
            }
        }
        i0.min(self.n() - 4)
    }

    fn step(&self, u_prev: f64, u: f64, i_prev: usize, i: usize, i_next: usize, e: f64) -> f64 {
        let c = self.h * self.h / 12.0;
        let w = |j: usize| 1.0 + c * self.k(j, e);
        (2.0 * (1.0 - 5.0 * c * self.k(i, e)) * u - w(i_prev) * u_prev) / w(i_next)
    }

    fn outward(&self, e: f64, upto: usize) -> Vec<f64> {
        let i0 = self.start(e);
        let mut u = vec![0.0; upto + 1];
        if upto <= i0 {
            return u;
        }
        u[i0 + 1] = self.h;
        for i in i0 + 1..upto {
            u[i + 1] = self.step(u[i - 1], u[i], i - 1, i, i + 1, e);
            if u[i + 1].abs() > 1e100 {
                u.iter_mut().for_each(|x| *x *= 1e-100);
            }
        }
        u
    }

    fn inward(&self, e: f64, downto: usize) -> Vec<f64> {
        let n = self.n();
        let mut u = vec![0.0; n];
        u[n - 2] = self.h;
        for i in (downto + 1..n - 1).rev() {
            u[i - 1] = self.step(u[i + 1], u[i], i + 1, i, i - 1, e);
            if u[i - 1].abs() > 1e100 {
                u.iter_mut().for_each(|x| *x *= 1e-100);
            }
        }
        u
    }

    fn count_nodes(&self, e: f64) -> usize {
        let u = self.outward(e, self.n() - 1);
        let mut count = 0;
        for i in 0..u.len() - 1 {
            if u[i] != 0.0 && (u[i] * u[i + 1] < 0.0 || (u[i + 1] == 0.0 && i + 1 == u.len() - 1)) {
                count += 1;
            }
        }
        count
    }

    fn matching_index(&self, e: f64) -> usize {
        let n = self.n();
        let turning = (1..n - 1).rev().find(|&i| self.v[i] < e).unwrap_or(n / 2);
        turning.clamp(self.start(e) + 2, n - 3)
    }

    /// Normalized discrete Wronskian of the outward and inward solutions.
    fn mismatch(&self, e: f64) -> f64 {
        let m = self.matching_index(e);
        let uo = self.outward(e, m + 1);
        let ui = self.inward(e, m);
        let no = uo[m].hypot(uo[m + 1]);
        let ni = ui[m].hypot(ui[m + 1]);
        (uo[m + 1] * ui[m] - ui[m + 1] * uo[m]) / (no * ni)
    }

    fn solve(&self, target: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
        let n_lo = self.count_nodes(lo);
        let n_hi = self.count_nodes(hi);
        if n_lo > target || n_hi <= target {
            return Err(Error::Bracket {
                lo,
                hi,
                nodes_lo: n_lo,
                nodes_hi: n_hi,
                target,
            });
        }
        // Narrow until only the target level is inside.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_nodes(mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-6 * (1.0 + lo.abs()) {
                break;
            }
        }
        let (mut flo, mut fhi) = (self.mismatch(lo), self.mismatch(hi));
        if flo * fhi > 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_nodes(mid) > target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        // Illinois false position on the Wronskian.
        let mut side = 0;
        for _ in 0..100 {
            let x = (lo * fhi - hi * flo) / (fhi - flo);
            let fx = self.mismatch(x);
            if fx == 0.0 || (hi - lo) < 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                return Ok(x);
            }
            if fx * fhi > 0.0 {
                hi = x;
                fhi = fx;
                if side == 1 {
                    flo *= 0.5;
                }
                side = 1;
            } else {
                lo = x;
                flo = fx;
                if side == -1 {
                    fhi *= 0.5;
                }
                side = -1;
            }
            if (hi - lo) < 1e-14 * (1.0 + x.abs()) {
                return Ok(0.5 * (lo + hi));
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Energy of the level with `node_target` nodes by node-count bisection and a
/// false-position refinement on the outward/inward mismatch.
pub fn shoot_eigenvalue(
    problem: &RadialProblem,
    node_target: usize,
    bracket: (f64, f64),
) -> Result<ShootResult> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "empty bracket ({lo}, {hi})"
        )));
    }
    let fine = Numerov::new(problem);
    let e = fine.solve(node_target, lo, hi)?;
    let coarse_problem = problem.with_grid(problem.n_grid.div_ceil(2))?;
    let coarse = Numerov::new(&coarse_problem);
    let ec = coarse.solve(node_target, lo, hi)?;
    // Numerov is fourth order on smooth potentials but drops to second order
    // next to a 1/r singularity, so the order is read off a third grid.
    let order = coarse_problem
        .with_grid(coarse_problem.n_grid.div_ceil(2))
        .and_then(|p| Numerov::new(&p).solve(node_target, lo, hi))
        .ok()
        .map(|ecc| {
            let ratio = (ec - ecc).abs() / (e - ec).abs().max(f64::MIN_POSITIVE);
            ratio.log2().clamp(1.0, 4.0)
        })
        .unwrap_or(4.0);
    Ok(ShootResult {
        energy: e,
        error_estimate: (e - ec).abs() / (2f64.powf(order) - 1.0),
        nodes: node_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator(lambda: f64) -> Potential {
        Arc::new(move |r: f64| lambda * (lambda + 1.0) / (2.0 * r * r) + 0.5 * r * r)
    }

    #[test]
    fn radial_oscillator_levels() {
        let p = RadialProblem::with_auto_range(oscillator(1.0), 9.5, DEFAULT_GRID).unwrap();
        let s = fd_spectrum(&p, 4).unwrap();
        for (k, e) in s.energies.iter().enumerate() {
            let exact = 2.0 * k as f64 + 2.5;
            assert!(((e - exact) / exact).abs() < 1e-3, "{k}: {e}");
            assert!(
                (s.extrapolated[k] - exact).abs() < 1e-6,
                "{}",
                s.extrapolated[k]
            );
        }
        assert_eq!(s.node_counts, vec![0, 1, 2, 3]);
        assert!(!s.truncated && !s.boundary_sensitive);
    }

    #[test]
    fn hydrogen_ground_state() {
        let v: Potential = Arc::new(|r: f64| -1.0 / r);
        let auto = RadialProblem::with_auto_range(v, -0.5, DEFAULT_GRID).unwrap();
        let p = auto.with_range(1e-4, auto.r_max, DEFAULT_GRID).unwrap();
        let s = fd_spectrum(&p, 1).unwrap();
        assert!(
            ((s.energies[0] + 0.5) / 0.5).abs() < 1e-3,
            "{}",
            s.energies[0]
        );
    }

    #[test]
    fn particle_in_a_box() {
        let l = 2.0;
        let p = RadialProblem::new(Arc::new(|_| 0.0), 0.0, l, 1025).unwrap();
        let s = fd_spectrum(&p, 3).unwrap();
        for k in 0..3 {
            let exact = ((k + 1) as f64 * PI / l).powi(2) / 2.0;
            assert!((s.extrapolated[k] - exact).abs() < 1e-7 * exact);
        }
    }

    #[test]
    fn truncation_flag() {
        let p = RadialProblem::new(Arc::new(|_| 0.0), 0.0, 1.0, 64).unwrap();
        let s = fd_spectrum(&p, 20).unwrap();
        assert!(s.truncated);
        assert_eq!(s.energies.len(), 16);
    }

    #[test]
    fn shooting_oscillator_and_box() {
        let p = RadialProblem::with_auto_range(oscillator(1.0), 9.5, DEFAULT_GRID).unwrap();
        let r = shoot_eigenvalue(&p, 0, (1.0, 3.5)).unwrap();
        assert!((r.energy - 2.5).abs() < 1e-6, "{}", r.energy);
        let b = RadialProblem::new(Arc::new(|_| 0.0), 0.0, PI, DEFAULT_GRID).unwrap();
        let r = shoot_eigenvalue(&b, 1, (1.0, 3.0)).unwrap();
        assert!((r.energy - 2.0).abs() < 1e-6, "{}", r.energy);
    }

    #[test]
    fn bad_bracket() {
        let b = RadialProblem::new(Arc::new(|_| 0.0), 0.0, PI, 512).unwrap();
        assert!(matches!(
            shoot_eigenvalue(&b, 1, (2.5, 3.0)),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn second_order_convergence() {
        let base = RadialProblem::new(oscillator(1.0), 1e-3, 10.0, 257).unwrap();
        let err = |n: usize| (levels(&base.with_grid(n).unwrap(), 1)[0] - 2.5).abs();
        let (e1, e2) = (err(257), err(513));
        assert!(e1 / e2 >= 3.5, "{e1} {e2}");
    }

    #[test]
    fn rejects_small_grid() {
        assert!(RadialProblem::new(Arc::new(|_| 0.0), 0.0, 1.0, 10).is_err());
    }
}
