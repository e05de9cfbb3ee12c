use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jet::Jet;

/// Dense real polynomial; `coeffs[k]` multiplies `x^k`.
///
/// Trailing zero coefficients are stripped on construction, so the highest
/// stored coefficient is nonzero unless the polynomial is identically zero
/// (in which case `coeffs` is empty).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value, first and second derivative at `x` by a three-lane Horner scheme.
    pub fn eval_jet(&self, x: f64) -> Jet {
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * x + 2.0 * dp;
            dp = dp * x + p;
            p = p * x + c;
        }
        Jet::new(p, dp, ddp)
    }

    /// Composition with a jet argument: `p(u(x))` with chain-rule derivatives.
    pub fn compose_jet(&self, u: Jet) -> Jet {
        let outer = self.eval_jet(u.value);
        Jet::new(
            outer.value,
            outer.d1 * u.d1,
            outer.d2 * u.d1 * u.d1 + outer.d1 * u.d2,
        )
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Coefficients of `p(x0 + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, x0: f64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += x0 * c[j + 1];
            }
        }
        Self::new(c)
    }

    /// Largest absolute coefficient; zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Order of vanishing at `x0`: the index of the first shifted coefficient
    /// exceeding `rel_tol` times the shifted coefficient scale. Returns `usize::MAX`
    /// for the zero polynomial.
    pub fn order_at(&self, x0: f64, rel_tol: f64) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let shifted = self.taylor_shift(x0);
        let scale = shifted.max_abs_coeff().max(self.max_abs_coeff());
        shifted
            .coeffs
            .iter()
            .position(|c| c.abs() > rel_tol * scale)
            .unwrap_or(usize::MAX)
    }

    /// Real roots with multiplicities, sorted ascending.
    ///
    /// Degrees one and two are solved in closed form; higher degrees use
    /// Durand-Kerner iteration followed by clustering of nearby real roots.
    pub fn real_roots(&self) -> Vec<(f64, usize)> {
        match self.degree() {
            None | Some(0) => Vec::new(),
            Some(1) => vec![(-self.coeffs[0] / self.coeffs[1], 1)],
            Some(2) => quadratic_real_roots(self.coeffs[2], self.coeffs[1], self.coeffs[0]),
            Some(_) => self.real_roots_iterative(),
        }
    }

    fn real_roots_iterative(&self) -> Vec<(f64, usize)> {
        let n = self.degree().unwrap_or(0);
        let lead = self.coeffs[n];
        let monic: Vec<f64> = self.coeffs.iter().map(|c| c / lead).collect();
        let bound = 1.0 + monic[..n].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
        let eval = |x: Complex64| {
            monic
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
        };
        for _ in 0..500 {
            let mut delta = 0.0_f64;
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        denom *= z[i] - z[j];
                    }
                }
                let step = eval(z[i]) / denom;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-15 * bound {
                break;
            }
        }
        let mut reals: Vec<f64> = z
            .iter()
            .filter(|r| r.im.abs() <= 1e-7 * bound.max(1.0))
            .map(|r| r.re)
            .collect();
        reals.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, usize)> = Vec::new();
        for r in reals {
            match out.last_mut() {
                Some((prev, mult)) if (r - *prev).abs() <= 1e-6 * bound.max(1.0) => {
                    *prev = (*prev * *mult as f64 + r) / (*mult as f64 + 1.0);
                    *mult += 1;
                }
                _ => out.push((r, 1)),
            }
        }
        out
    }
}

fn quadratic_real_roots(a: f64, b: f64, c: f64) -> Vec<(f64, usize)> {
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs());
    if disc.abs() <= 1e-14 * scale || (disc == 0.0) {
        return vec![(-b / (2.0 * a), 2)];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    // Cancellation-free form of the two roots.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    vec![(lo, 1), (hi, 1)]
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_zeros_are_stripped() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.coeffs(), &[1.0, 2.0]);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn jet_matches_derivative_polynomials() {
        let p = Polynomial::new(vec![1.0, -3.0, 0.5, 2.0]);
        let x = 0.7;
        let j = p.eval_jet(x);
        assert!((j.value - p.eval(x)).abs() < 1e-15);
        assert!((j.d1 - p.derivative().eval(x)).abs() < 1e-14);
        assert!((j.d2 - p.derivative().derivative().eval(x)).abs() < 1e-14);
    }

    #[test]
    fn taylor_shift_reexpands() {
        // (x - 1)^2 = x^2 - 2x + 1 shifted to x0 = 1 is t^2.
        let p = Polynomial::new(vec![1.0, -2.0, 1.0]);
        assert_eq!(p.taylor_shift(1.0).coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(p.order_at(1.0, 1e-12), 2);
        assert_eq!(p.order_at(0.0, 1e-12), 0);
    }

    #[test]
    fn roots_of_low_and_high_degree() {
        let p = Polynomial::new(vec![0.0, -1.0, 1.0]); // x(x-1)
        assert_eq!(p.real_roots(), vec![(0.0, 1), (1.0, 1)]);
        let sq = Polynomial::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(sq.real_roots(), vec![(0.0, 2)]);
        // (x+2)(x-0.5)(x^2+1)
        let a = Polynomial::new(vec![-1.0, 1.5, 1.0]);
        let b = Polynomial::new(vec![1.0, 0.0, 1.0]);
        let roots = (&a * &b).real_roots();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].0 + 2.0).abs() < 1e-10);
        assert!((roots[1].0 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::new(vec![1.0, 1.0]);
        let b = Polynomial::new(vec![-1.0, 1.0]);
        assert_eq!((&a * &b).coeffs(), &[-1.0, 0.0, 1.0]);
        assert_eq!((&a - &a).degree(), None);
        assert_eq!((&a + &b).coeffs(), &[0.0, 2.0]);
    }
}
