use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eigensolver_oracle::Potential;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleParams {
    pub m: f64,
}

impl ParticleParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be finite and >= 0, got {m}"
            )));
        }
        Ok(Self { m })
    }
}

/// Selects the `lambda(lambda+1)` equation for Gamma_1 or the
/// `lambda(lambda-1)` equation for Gamma_2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    #[default]
    Plus,
    Minus,
}

impl Channel {
    /// The value entering `l(l+1)` for this channel.
    pub fn effective_lambda(self, lambda: f64) -> f64 {
        match self {
            Channel::Plus => lambda,
            Channel::Minus => lambda - 1.0,
        }
    }
}

/// `n` is the radial termination index. The separation constant is built
/// from the angular degree `n_ang` and `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: usize,
    pub ell: usize,
    #[serde(default)]
    pub n_ang: usize,
    #[serde(default)]
    pub channel: Channel,
}

impl QuantumNumbers {
    pub fn new(n: usize, ell: usize) -> Self {
        Self {
            n,
            ell,
            n_ang: 0,
            channel: Channel::Plus,
        }
    }

    pub fn lambda(&self) -> f64 {
        separation_lambda(self.n_ang, self.ell)
    }

    pub fn effective_lambda(&self) -> f64 {
        self.channel.effective_lambda(self.lambda())
    }
}

pub fn separation_lambda(n: usize, ell: usize) -> f64 {
    n as f64 + ell as f64 + 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// `V_s = -A/r + B r`.
    Cornell { a: f64, b: f64 },
    /// `V_s = C/r^2 - D/r`.
    Kratzer { c: f64, d: f64 },
    /// Vector potential `xi = -z/r`.
    CoulombVector { z: f64 },
}

impl PotentialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Cornell { .. } => "cornell",
            PotentialSpec::Kratzer { .. } => "kratzer",
            PotentialSpec::CoulombVector { .. } => "coulomb",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            PotentialSpec::Cornell { a, b } => a.is_finite() && b.is_finite(),
            PotentialSpec::Kratzer { c, d } => c.is_finite() && d.is_finite(),
            PotentialSpec::CoulombVector { z } => z.is_finite(),
        };
        if !finite {
            return Err(Error::InvalidParameter(format!(
                "non-finite constant in {self:?}"
            )));
        }
        Ok(())
    }
}

/// `V_eff(r)` of `Gamma'' + 2 (E - V_eff) Gamma = 0`.
pub fn effective_potential(
    pot: &PotentialSpec,
    m: f64,
    lambda: f64,
    channel: Channel,
) -> Result<Potential> {
    pot.validate()?;
    let l = channel.effective_lambda(lambda);
    let cent = l * (l + 1.0);
    match *pot {
        PotentialSpec::Cornell { a, b } => Ok(Arc::new(move |r: f64| {
            (cent + a * a) / (2.0 * r * r) - m * a / r + 0.5 * b * b * r * r + m * b * r
        })),
        PotentialSpec::Kratzer { c, d } => Ok(Arc::new(move |r: f64| {
            let r2 = r * r;
            c * c / (2.0 * r2 * r2) - c * d / (r2 * r) + (cent + 2.0 * m * c + d * d) / (2.0 * r2)
                - m * d / r
        })),
        PotentialSpec::CoulombVector { .. } => Err(Error::Unsupported(
            "the Coulomb vector field has no reduced Schrodinger form; use the confluent map"
                .into(),
        )),
    }
}

/// Shift between `(eps^2 - m^2)/2` and the Schrodinger energy.
fn energy_offset(pot: &PotentialSpec) -> Result<f64> {
    match *pot {
        PotentialSpec::Cornell { a, b } => Ok(a * b),
        PotentialSpec::Kratzer { .. } => Ok(0.0),
        PotentialSpec::CoulombVector { .. } => Err(Error::Unsupported(
            "no Schrodinger energy is defined for the Coulomb vector field".into(),
        )),
    }
}

pub fn energy_of_epsilon(pot: &PotentialSpec, m: f64, eps: f64) -> Result<f64> {
    Ok(0.5 * (eps * eps - m * m) + energy_offset(pot)?)
}

/// Inverse of [`energy_of_epsilon`] on the branch `eps >= 0`.
pub fn epsilon_of_energy(pot: &PotentialSpec, m: f64, e: f64) -> Result<f64> {
    let eps2 = 2.0 * (e - energy_offset(pot)?) + m * m;
    if eps2 < 0.0 {
        return Err(Error::NoBoundState(format!(
            "energy {e} gives eps^2 = {eps2} < 0"
        )));
    }
    Ok(eps2.sqrt())
}

/// Ansatz exponent `Lambda` with `Lambda (Lambda - 1) = l(l+1) + A^2`.
pub fn cornell_lambda(a: f64, l: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * a * a + 4.0 * l * l + 4.0 * l).sqrt())
}

pub fn cornell_epsilon(a: f64, b: f64, n: usize, l: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::NoBoundState(format!(
            "Cornell slope B = {b} must be positive"
        )));
    }
    let big = cornell_lambda(a, l);
    let rad = b * (2.0 * n as f64 + 2.0 * big - 2.0 * a + 1.0);
    if rad < 0.0 {
        return Err(Error::NoBoundState(format!(
            "negative radicand {rad} in the Cornell spectrum"
        )));
    }
    Ok(rad.sqrt())
}

pub fn kratzer_epsilon(d: f64, m: f64, n: usize) -> Result<f64> {
    let k = n as f64 + 1.0 - d;
    if k == 0.0 {
        return Err(Error::SingularQuantumNumber(format!(
            "n + 1 - D = 0 at n = {n}, D = {d}"
        )));
    }
    let bracket = 1.0 - d * d / (k * k);
    if bracket < 0.0 {
        return Err(Error::NoBoundState(format!(
            "1 - D^2/(n+1-D)^2 = {bracket} < 0 at n = {n}, D = {d}"
        )));
    }
    Ok(m * bracket.sqrt())
}

/// `(n+1-D)^2 (m^2 - eps^2) - D^2 m^2`, relative to `D^2 m^2` (or to the
/// largest term when that vanishes).
pub fn kratzer_identity_residual(d: f64, m: f64, n: usize, eps: f64) -> f64 {
    let k = n as f64 + 1.0 - d;
    let lhs = k * k * (m * m - eps * eps);
    let rhs = d * d * m * m;
    let scale = rhs.max(lhs.abs()).max(k * k * eps * eps);
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separation_constant() {
        assert_eq!(separation_lambda(0, 0), 0.5);
        assert_eq!(separation_lambda(1, 2), 3.5);
        assert_eq!(separation_lambda(3, 0), 3.5);
    }

    #[test]
    fn cornell_effective_potential() {
        let v = effective_potential(
            &PotentialSpec::Cornell { a: 1.0, b: 1.0 },
            1.0,
            0.5,
            Channel::Plus,
        )
        .unwrap();
        assert!((v(1.0) - 1.375).abs() < 1e-15);
        let free = effective_potential(
            &PotentialSpec::Cornell { a: 0.0, b: 0.0 },
            1.0,
            0.5,
            Channel::Plus,
        )
        .unwrap();
        for r in [0.3, 1.0, 4.0] {
            assert!((free(r) - 0.75 / (2.0 * r * r)).abs() < 1e-15);
        }
    }

    #[test]
    fn kratzer_effective_potential() {
        let v = effective_potential(
            &PotentialSpec::Kratzer { c: 1.0, d: 2.0 },
            1.0,
            0.5,
            Channel::Plus,
        )
        .unwrap();
        assert!((v(1.0) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn coulomb_has_no_schrodinger_form() {
        assert!(matches!(
            effective_potential(
                &PotentialSpec::CoulombVector { z: 0.1 },
                1.0,
                0.5,
                Channel::Plus
            ),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn cornell_levels() {
        assert!((cornell_lambda(0.0, 0.5) - 1.5).abs() < 1e-15);
        assert_eq!(cornell_lambda(0.0, 0.0), 1.0);
        assert!((cornell_epsilon(0.0, 1.0, 0, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((cornell_epsilon(0.0, 1.0, 1, 0.5).unwrap() - 6.0_f64.sqrt()).abs() < 1e-15);
        assert!(cornell_epsilon(0.0, 1e-300, 1, 0.5).unwrap() < 1e-140);
    }

    #[test]
    fn kratzer_levels() {
        let e = kratzer_epsilon(0.5, 1.0, 1).unwrap();
        assert!((e - (8.0_f64 / 9.0).sqrt()).abs() < 1e-15);
        assert_eq!(kratzer_epsilon(0.5, 1.0, 0).unwrap(), 0.0);
        assert_eq!(kratzer_epsilon(0.0, 1.7, 3).unwrap(), 1.7);
        assert!(matches!(
            kratzer_epsilon(2.0, 1.0, 1),
            Err(Error::SingularQuantumNumber(_))
        ));
        assert!(matches!(
            kratzer_epsilon(3.0, 1.0, 0),
            Err(Error::NoBoundState(_))
        ));
    }
}
