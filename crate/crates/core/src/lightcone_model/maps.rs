//! Reductions of the radial equations to Heun form.
//!
//! Every map carries enough of its inputs to rebuild the original radial
//! equation, so the reduction can be checked by substituting
//! `prefactor * Heun` back into it.

use serde::{Deserialize, Serialize};

use super::potentials::cornell_lambda;
use crate::error::{Error, Result};
use crate::heun_family::{
    BiconfluentParams, ConfluentParams, DoubleConfluentParams, HeunEvaluator, HeunParams,
};
use crate::ode_core::{ode_residual, Jet, Polynomial, RationalOde};

/// Which version of a parameter map to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapForm {
    /// Exactly as printed.
    Printed,
    /// Re-derived by coefficient matching.
    #[default]
    Corrected,
}

/// Sign of the exponential coefficient in the Kratzer prefactor
/// `exp(kappa r) r^(1-D) exp(-C/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KratzerBranch {
    /// `kappa = +sqrt(m^2 - eps^2)`, as printed.
    Growing,
    /// `kappa = -sqrt(m^2 - eps^2)`.
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornellMapResult {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    /// Value entering `l(l+1)`.
    pub lambda: f64,
    pub epsilon: f64,
    pub big_lambda: f64,
    pub params: BiconfluentParams,
    /// Prefactor `exp(quadratic r^2 + linear r) r^log`.
    pub quadratic: f64,
    pub linear: f64,
    pub log: f64,
    pub form: MapForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KratzerMapResult {
    pub c: f64,
    pub d: f64,
    pub m: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub params: DoubleConfluentParams,
    pub branch: KratzerBranch,
    /// Prefactor `exp(kappa r) r^log exp(inverse / r)`.
    pub kappa: f64,
    pub log: f64,
    pub inverse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombMapResult {
    pub z: f64,
    pub m: f64,
    pub lambda: f64,
    pub epsilon: f64,
    /// `S = x^(-w) exp(-tau x) h(x)`.
    pub w: f64,
    pub tau: f64,
    pub eta: f64,
    pub params: ConfluentParams,
    pub form: MapForm,
}

impl CoulombMapResult {
    /// `x = r / eta`.
    pub fn x_of_r(&self, r: f64) -> f64 {
        r / self.eta
    }
}

pub fn cornell_heun_map(
    a: f64,
    b: f64,
    m: f64,
    lambda: f64,
    epsilon: f64,
    form: MapForm,
) -> CornellMapResult {
    let big = cornell_lambda(a, lambda);
    let q = match form {
        MapForm::Printed => 2.0 * m * (a - big),
        MapForm::Corrected => 2.0 * m * (big - a),
    };
    CornellMapResult {
        a,
        b,
        m,
        lambda,
        epsilon,
        big_lambda: big,
        params: BiconfluentParams {
            gamma: 2.0 * big,
            delta: -2.0 * m,
            epsilon: -2.0 * b,
            alpha: epsilon * epsilon + b * (2.0 * a - 2.0 * big - 1.0),
            q,
        },
        quadratic: -0.5 * b,
        linear: -m,
        log: big,
        form,
    }
}

pub fn kratzer_heun_map(
    c: f64,
    d: f64,
    m: f64,
    lambda: f64,
    epsilon: f64,
    branch: KratzerBranch,
) -> Result<KratzerMapResult> {
    let k2 = m * m - epsilon * epsilon;
    if k2 < 0.0 {
        return Err(Error::NoBoundState(format!(
            "m^2 - eps^2 = {k2} < 0: no decaying Kratzer solution"
        )));
    }
    let kappa = match branch {
        KratzerBranch::Growing => k2.sqrt(),
        KratzerBranch::Decaying => -k2.sqrt(),
    };
    Ok(kratzer_map_with_kappa(
        c, d, m, lambda, epsilon, kappa, branch,
    ))
}

fn kratzer_map_with_kappa(
    c: f64,
    d: f64,
    m: f64,
    lambda: f64,
    epsilon: f64,
    kappa: f64,
    branch: KratzerBranch,
) -> KratzerMapResult {
    KratzerMapResult {
        c,
        d,
        m,
        lambda,
        epsilon,
        params: DoubleConfluentParams {
            gamma: 2.0 * c,
            delta: 2.0 * (1.0 - d),
            epsilon: 2.0 * kappa,
            alpha: 2.0 * (1.0 - d) * kappa + 2.0 * d * m,
            q: lambda * (lambda + 1.0) - 2.0 * c * (kappa - m) + d,
        },
        branch,
        kappa,
        log: 1.0 - d,
        inverse: -c,
    }
}

/// Branch on which `alpha' + n eps' = 0` holds for the level `n`:
/// `kappa (n + 1 - D) = -D m`.
pub fn kratzer_branch_for_level(d: f64, m: f64, n: usize) -> KratzerBranch {
    let kappa = -d * m / (n as f64 + 1.0 - d);
    if kappa > 0.0 {
        KratzerBranch::Growing
    } else {
        KratzerBranch::Decaying
    }
}

pub fn coulomb_heun_map(
    z: f64,
    m: f64,
    epsilon: f64,
    lambda: f64,
    form: MapForm,
) -> Result<CoulombMapResult> {
    if m + epsilon == 0.0 {
        return Err(Error::InvalidParameter(
            "m + eps = 0: the variable map x = (m+eps) r / z is undefined".into(),
        ));
    }
    let eta = z / (m + epsilon);
    let t2 = z * eta * (m - epsilon);
    if t2 < 0.0 {
        return Err(Error::ComplexExponent(format!(
            "tau^2 = z eta (m - eps) = {t2} < 0"
        )));
    }
    let tau = t2.sqrt();
    let (w, params) = match form {
        MapForm::Printed => {
            let rad = 1.0 - 4.0 * lambda + 4.0 * lambda * lambda
                - 4.0 * z * z
                - 8.0 * eta
                - 4.0 * eta * lambda;
            if rad < 0.0 {
                return Err(Error::ComplexExponent(format!("w radicand {rad} < 0")));
            }
            let w = 0.5 * (-1.0 + rad.sqrt());
            let e2 = 2.0 * epsilon * z;
            let p = ConfluentParams {
                gamma: -2.0 * w,
                delta: -eta,
                epsilon: 2.0 * tau,
                alpha: -eta * (e2 + tau) - 2.0 * tau * w,
                q: -eta * (e2 + w + lambda) - 2.0 * tau * w,
            };
            (w, p)
        }
        MapForm::Corrected => {
            // Larger indicial exponent of the radial equation at r = 0.
            let rad = (lambda - 1.0) * (lambda - 1.0) - z * z;
            if rad < 0.0 {
                return Err(Error::ComplexExponent(format!(
                    "(lambda - 1)^2 - z^2 = {rad} < 0: oscillating behaviour at the origin"
                )));
            }
            let sigma = 1.0 + rad.sqrt();
            let ez = 2.0 * epsilon * z * eta;
            let p = ConfluentParams {
                gamma: 2.0 * sigma - 1.0,
                delta: 1.0,
                epsilon: -2.0 * tau,
                alpha: -2.0 * sigma * tau - ez,
                q: -2.0 * sigma * tau + tau - sigma + lambda - ez,
            };
            (-sigma, p)
        }
    };
    Ok(CoulombMapResult {
        z,
        m,
        lambda,
        epsilon,
        w,
        tau,
        eta,
        params,
        form,
    })
}

/// Any of the three reductions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum RadialMap {
    Cornell(CornellMapResult),
    Kratzer(KratzerMapResult),
    Coulomb(CoulombMapResult),
}

impl RadialMap {
    pub fn heun_params(&self) -> HeunParams {
        match self {
            RadialMap::Cornell(c) => c.params.into(),
            RadialMap::Kratzer(k) => k.params.into(),
            RadialMap::Coulomb(c) => c.params.into(),
        }
    }

    /// `dx/dr` of the Heun variable.
    pub fn dx_dr(&self) -> f64 {
        match self {
            RadialMap::Coulomb(c) => 1.0 / c.eta,
            _ => 1.0,
        }
    }

    /// Largest admissible radius (exclusive).
    pub fn r_limit(&self) -> f64 {
        match self {
            RadialMap::Coulomb(c) if c.eta > 0.0 => c.eta,
            RadialMap::Coulomb(_) => 0.0,
            _ => f64::INFINITY,
        }
    }

    pub fn prefactor(&self, r: f64) -> Jet {
        let u = Jet::variable(r);
        let exponent = match self {
            RadialMap::Cornell(c) => {
                (u * u).scale(c.quadratic) + u.scale(c.linear) + u.ln().scale(c.log)
            }
            RadialMap::Kratzer(k) => {
                u.scale(k.kappa) + u.ln().scale(k.log) + u.recip().scale(k.inverse)
            }
            RadialMap::Coulomb(c) => {
                let x = u.scale(1.0 / c.eta);
                x.ln().scale(-c.w) + x.scale(-c.tau)
            }
        };
        exponent.exp()
    }

    /// The radial equation the map claims to solve, with denominators cleared.
    pub fn radial_ode(&self) -> RationalOde {
        let (p2, p1, p0) = match *self {
            RadialMap::Cornell(c) => {
                // r^2 G'' + [eps^2 r^2 - (m r - A + B r^2)^2 - l(l+1)] G = 0
                let inner = Polynomial::new(vec![-c.a, c.m, c.b]);
                let base = Polynomial::new(vec![
                    -c.lambda * (c.lambda + 1.0),
                    0.0,
                    c.epsilon * c.epsilon,
                ]);
                let p0 = &base - &(&inner * &inner);
                (Polynomial::new(vec![0.0, 0.0, 1.0]), Polynomial::zero(), p0)
            }
            RadialMap::Kratzer(k) => {
                // r^4 G'' + [eps^2 r^4 - (m r^2 - D r + C)^2 - l(l+1) r^2] G = 0
                let inner = Polynomial::new(vec![k.c, -k.d, k.m]);
                let base = Polynomial::new(vec![
                    0.0,
                    0.0,
                    -k.lambda * (k.lambda + 1.0),
                    0.0,
                    k.epsilon * k.epsilon,
                ]);
                let p0 = &base - &(&inner * &inner);
                (
                    Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]),
                    Polynomial::zero(),
                    p0,
                )
            }
            RadialMap::Coulomb(c) => {
                // Multiply S'' + xi'/(r g)(r S' - l S) + ((eps + xi)^2 - m^2 - l(l-1)/r^2) S = 0
                // by r^2 ((eps + m) r - z), with xi = -z/r and g = eps + xi + m.
                let (z, m, e, l) = (c.z, c.m, c.epsilon, c.lambda);
                let g = Polynomial::new(vec![-z, e + m]);
                let p2 = &Polynomial::new(vec![0.0, 0.0, 1.0]) * &g;
                let p1 = Polynomial::new(vec![0.0, z]);
                let bracket =
                    Polynomial::new(vec![z * z - l * (l - 1.0), -2.0 * e * z, e * e - m * m]);
                let p0 = &Polynomial::constant(-z * l) + &(&g * &bracket);
                (p2, p1, p0)
            }
        };
        RationalOde::new(p2, p1, p0).expect("radial leading coefficient is nonzero")
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            RadialMap::Cornell(_) => "bi-confluent",
            RadialMap::Kratzer(_) => "double-confluent",
            RadialMap::Coulomb(_) => "confluent",
        }
    }
}

/// Outcome of substituting `prefactor * Heun` into the radial equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCheck {
    pub radii: Vec<f64>,
    pub max_relative_residual: f64,
    pub passes: bool,
}

pub const MAP_CHECK_TOL: f64 = 1e-8;
pub const MAP_CHECK_POINTS: usize = 20;

/// Default sample radii for the coefficient-matching check.
pub fn map_check_radii(map: &RadialMap) -> Vec<f64> {
    let n = MAP_CHECK_POINTS;
    match map {
        RadialMap::Coulomb(c) => (0..n)
            .map(|i| c.eta * (0.05 + 0.85 * i as f64 / (n - 1) as f64))
            .collect(),
        _ => (0..n)
            .map(|i| 0.1 + 1.9 * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Checks a map with the numerically evaluated regular Heun branch, which
/// satisfies the Heun equation whether or not it terminates. A correct map
/// therefore leaves only integration error in the radial residual.
pub fn verify_map(map: &RadialMap) -> Result<MapCheck> {
    let radii = map_check_radii(map);
    let ev = HeunEvaluator::new(&map.heun_params())?;
    let s = map.dx_dr();
    let xs: Vec<f64> = radii.iter().map(|r| r * s).collect();
    let hs = ev.eval_many(&xs)?;
    let ode = map.radial_ode();
    let rep = ode_residual(
        &ode,
        |r| {
            let i = radii.iter().position(|&p| p == r).expect("sample radius");
            Ok(map.prefactor(r) * hs[i].rescale_variable(s))
        },
        &radii,
    )?;
    let max = rep.max_relative();
    Ok(MapCheck {
        radii,
        max_relative_residual: max,
        passes: max < MAP_CHECK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cornell_map_values() {
        let c = cornell_heun_map(0.0, 1.0, 1.0, 0.5, 2.0, MapForm::Corrected);
        assert!((c.big_lambda - 1.5).abs() < 1e-15);
        let p = c.params;
        assert_eq!((p.gamma, p.delta, p.epsilon), (3.0, -2.0, -2.0));
        assert!(p.alpha.abs() < 1e-15);
        assert!((p.q - 3.0).abs() < 1e-15);
        let printed = cornell_heun_map(0.0, 1.0, 1.0, 0.5, 2.0, MapForm::Printed);
        assert!((printed.params.q + 3.0).abs() < 1e-15);
        let massless = cornell_heun_map(0.7, 1.0, 0.0, 0.5, 2.0, MapForm::Printed);
        assert_eq!(massless.params.delta, 0.0);
        assert_eq!(massless.params.q, 0.0);
    }

    #[test]
    fn cornell_big_lambda_closed_form() {
        for &(a, l) in &[(0.0, 0.5), (0.5, 1.5), (-0.5, 2.5), (1.0, 0.0)] {
            let c = cornell_heun_map(a, 1.0, 0.0, l, 1.0, MapForm::Corrected);
            let expect = 1.0 + (1.0 + 4.0 * a * a + 4.0 * l * l + 4.0 * l).sqrt();
            assert!((2.0 * c.big_lambda - expect).abs() < 1e-12);
            assert!(c.big_lambda > 0.0);
        }
    }

    #[test]
    fn kratzer_map_values() {
        let k = kratzer_heun_map(0.0, 0.0, 1.0, 0.5, 0.0, KratzerBranch::Growing).unwrap();
        let p = k.params;
        assert_eq!((p.gamma, p.delta, p.epsilon, p.alpha), (0.0, 2.0, 2.0, 2.0));
        assert!((p.q - 0.75).abs() < 1e-15);
        let k = kratzer_heun_map(1.0, 2.0, 1.0, 0.5, 0.0, KratzerBranch::Growing).unwrap();
        let p = k.params;
        assert_eq!(
            (p.gamma, p.delta, p.epsilon, p.alpha),
            (2.0, -2.0, 2.0, 2.0)
        );
        assert!((p.q - 2.75).abs() < 1e-15);
        let edge = kratzer_heun_map(1.0, 0.3, 1.0, 0.5, 1.0, KratzerBranch::Growing).unwrap();
        assert_eq!(edge.params.epsilon, 0.0);
        assert!((edge.params.alpha - 0.6).abs() < 1e-15);
        assert!(matches!(
            kratzer_heun_map(1.0, 0.3, 1.0, 0.5, 1.5, KratzerBranch::Growing),
            Err(Error::NoBoundState(_))
        ));
    }

    #[test]
    fn coulomb_printed_definitions() {
        // eta and tau are shared by both forms; the printed w is complex here.
        let c = coulomb_heun_map(0.1, 1.0, 0.5, 0.5, MapForm::Corrected).unwrap();
        assert!((c.eta - 0.1 / 1.5).abs() < 1e-15);
        assert!((c.tau - 0.057_735_026_918_962_58).abs() < 1e-12);
        assert!(matches!(
            coulomb_heun_map(0.1, 1.0, 0.5, 0.5, MapForm::Printed),
            Err(Error::ComplexExponent(_))
        ));
        let p = coulomb_heun_map(0.1, 1.0, 0.5, 2.5, MapForm::Printed).unwrap();
        assert_eq!(p.params.delta, -p.eta);
        let tiny = coulomb_heun_map(1e-12, 1.0, 0.5, 2.5, MapForm::Printed).unwrap();
        assert!((tiny.w - 0.5 * (-1.0 + 4.0)).abs() < 1e-9);
        assert!(matches!(
            coulomb_heun_map(0.1, 1.0, 1.5, 0.5, MapForm::Printed),
            Err(Error::ComplexExponent(_))
        ));
    }

    #[test]
    fn cornell_corrected_passes_printed_fails() {
        let l = 0.5;
        let eps = crate::lightcone_model::cornell_epsilon(0.5, 1.0, 1, l).unwrap();
        let good = RadialMap::Cornell(cornell_heun_map(0.5, 1.0, 1.0, l, eps, MapForm::Corrected));
        let bad = RadialMap::Cornell(cornell_heun_map(0.5, 1.0, 1.0, l, eps, MapForm::Printed));
        let g = verify_map(&good).unwrap();
        assert!(g.passes, "{}", g.max_relative_residual);
        let b = verify_map(&bad).unwrap();
        assert!(
            b.max_relative_residual > 1e-3,
            "{}",
            b.max_relative_residual
        );
    }

    #[test]
    fn kratzer_both_branches_match_coefficients() {
        for branch in [KratzerBranch::Growing, KratzerBranch::Decaying] {
            let k = kratzer_heun_map(1.0, 0.4, 1.0, 0.5, 0.8, branch).unwrap();
            let chk = verify_map(&RadialMap::Kratzer(k)).unwrap();
            assert!(chk.passes, "{branch:?}: {}", chk.max_relative_residual);
        }
    }

    #[test]
    fn coulomb_corrected_passes_printed_fails() {
        let (z, m, e, l) = (0.3, 1.0, 0.5, 2.5);
        let good = coulomb_heun_map(z, m, e, l, MapForm::Corrected).unwrap();
        let chk = verify_map(&RadialMap::Coulomb(good)).unwrap();
        assert!(chk.passes, "{}", chk.max_relative_residual);
        let bad = coulomb_heun_map(z, m, e, l, MapForm::Printed).unwrap();
        let chk = verify_map(&RadialMap::Coulomb(bad)).unwrap();
        assert!(!chk.passes, "{}", chk.max_relative_residual);
    }
}
