use serde::{Deserialize, Serialize};

use super::maps::{
    cornell_heun_map, kratzer_branch_for_level, kratzer_heun_map, MapForm, RadialMap,
};
use super::potentials::{
    cornell_epsilon, effective_potential, energy_of_epsilon, kratzer_epsilon,
    kratzer_identity_residual, PotentialSpec, QuantumNumbers,
};
use super::wavefunction::{gamma_jets, HeunFactor};
use crate::eigensolver_oracle::{fd_spectrum, RadialProblem, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::heun_family::{accessory_residual, termination_report, HeunParams, TerminationReport};
use crate::ode_core::ode_residual;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub potential: PotentialSpec,
    pub m: f64,
    pub qn: QuantumNumbers,
    pub lambda: f64,
    pub epsilon: f64,
    pub e_schrodinger: f64,
    pub termination: TerminationReport,
    pub map: RadialMap,
    /// Kratzer only: relative residual of `(n+1-D)^2 (m^2 - eps^2) = D^2 m^2`.
    pub identity_residual: Option<f64>,
    pub residual_max: Option<f64>,
    pub oracle_energy: Option<f64>,
    pub oracle_error: Option<f64>,
    pub oracle_level: Option<usize>,
    pub oracle_delta: Option<f64>,
    /// Why an oracle comparison is missing, when it is.
    pub oracle_note: Option<String>,
}

/// Builds the map used for level `qn.n` at energy `eps`.
pub fn spectrum_map(
    pot: &PotentialSpec,
    m: f64,
    qn: &QuantumNumbers,
    eps: f64,
) -> Result<RadialMap> {
    let l = qn.effective_lambda();
    match *pot {
        PotentialSpec::Cornell { a, b } => Ok(RadialMap::Cornell(cornell_heun_map(
            a,
            b,
            m,
            l,
            eps,
            MapForm::Corrected,
        ))),
        PotentialSpec::Kratzer { c, d } => {
            let branch = kratzer_branch_for_level(d, m, qn.n);
            Ok(RadialMap::Kratzer(kratzer_heun_map(
                c, d, m, l, eps, branch,
            )?))
        }
        PotentialSpec::CoulombVector { .. } => Err(Error::Unsupported(
            "no closed-form spectrum exists for the Coulomb vector field".into(),
        )),
    }
}

fn base_result(
    pot: &PotentialSpec,
    m: f64,
    qn: &QuantumNumbers,
    eps: f64,
) -> Result<SpectrumResult> {
    let map = spectrum_map(pot, m, qn, eps)?;
    let termination = termination_report(&map.heun_params(), qn.n)?;
    let identity_residual = match *pot {
        PotentialSpec::Kratzer { d, .. } => Some(kratzer_identity_residual(d, m, qn.n, eps)),
        _ => None,
    };
    Ok(SpectrumResult {
        potential: *pot,
        m,
        qn: *qn,
        lambda: qn.lambda(),
        epsilon: eps,
        e_schrodinger: energy_of_epsilon(pot, m, eps)?,
        termination,
        map,
        identity_residual,
        residual_max: None,
        oracle_energy: None,
        oracle_error: None,
        oracle_level: None,
        oracle_delta: None,
        oracle_note: None,
    })
}

pub fn cornell_spectrum(a: f64, b: f64, m: f64, qn: &QuantumNumbers) -> Result<SpectrumResult> {
    let eps = cornell_epsilon(a, b, qn.n, qn.effective_lambda())?;
    base_result(&PotentialSpec::Cornell { a, b }, m, qn, eps)
}

pub fn kratzer_spectrum(c: f64, d: f64, m: f64, qn: &QuantumNumbers) -> Result<SpectrumResult> {
    let eps = kratzer_epsilon(d, m, qn.n)?;
    base_result(&PotentialSpec::Kratzer { c, d }, m, qn, eps)
}

pub fn closed_form_spectrum(
    pot: &PotentialSpec,
    m: f64,
    qn: &QuantumNumbers,
) -> Result<SpectrumResult> {
    match *pot {
        PotentialSpec::Cornell { a, b } => cornell_spectrum(a, b, m, qn),
        PotentialSpec::Kratzer { c, d } => kratzer_spectrum(c, d, m, qn),
        PotentialSpec::CoulombVector { .. } => Err(Error::Unsupported(
            "no closed-form spectrum exists for the Coulomb vector field".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub n_grid: usize,
    pub residual_points: usize,
    pub run_oracle: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_grid: DEFAULT_GRID,
            residual_points: 50,
            run_oracle: true,
        }
    }
}

/// Energy whose decay length fixes the oracle box.
fn range_energy(pot: &PotentialSpec, e: f64) -> Result<f64> {
    match pot {
        PotentialSpec::Kratzer { .. } => {
            if e < 0.0 {
                Ok(0.5 * e)
            } else {
                Err(Error::NoBoundState(format!(
                    "Kratzer energy {e} >= 0 lies in the continuum"
                )))
            }
        }
        _ => Ok(e + (0.5 * e.abs()).max(1.0)),
    }
}

pub fn oracle_problem(
    pot: &PotentialSpec,
    m: f64,
    qn: &QuantumNumbers,
    e: f64,
    n_grid: usize,
) -> Result<RadialProblem> {
    let v = effective_potential(pot, m, qn.lambda(), qn.channel)?;
    RadialProblem::with_auto_range(v, range_energy(pot, e)?, n_grid)
}

/// End-to-end audit at a given `eps`: Schrodinger-form residual of the
/// assembled degree-`n` wavefunction and the nearest oracle level.
pub fn verify_solution(
    pot: &PotentialSpec,
    m: f64,
    qn: &QuantumNumbers,
    eps: f64,
    opts: &VerifyOptions,
) -> Result<SpectrumResult> {
    let mut out = base_result(pot, m, qn, eps)?;
    let e = out.e_schrodinger;
    let problem = oracle_problem(pot, m, qn, e, opts.n_grid);

    let r_hi = match &problem {
        Ok(p) => 0.6 * p.r_max,
        Err(_) => 10.0,
    };
    let r_lo = 0.05 * r_hi;
    let np = opts.residual_points.max(2);
    let radii: Vec<f64> = (0..np)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / (np - 1) as f64)
        .collect();
    let factor = HeunFactor::polynomial(&out.map, qn.n)?;
    let jets = gamma_jets(&out.map, &factor, &radii)?;
    let ode = out.map.radial_ode();
    let rep = ode_residual(
        &ode,
        |r| Ok(jets[radii.iter().position(|&p| p == r).expect("residual radius")]),
        &radii,
    )?;
    out.residual_max = Some(rep.max_relative());

    if opts.run_oracle {
        match problem.and_then(|p| fd_spectrum(&p, qn.n + 4)) {
            Ok(s) => {
                let j = s.nearest_level(e).expect("non-empty spectrum");
                out.oracle_level = Some(j);
                out.oracle_energy = Some(s.extrapolated[j]);
                out.oracle_error = Some(s.error_estimates[j]);
                out.oracle_delta = Some(e - s.extrapolated[j]);
            }
            Err(err) => out.oracle_note = Some(format!("{}: {err}", err.code())),
        }
    }
    Ok(out)
}

/// Masses for which the `n = 1` Cornell level terminates completely:
/// `m^2 = B Lambda / ((Lambda - A)(Lambda - A + 1))`.
pub fn cornell_n1_mass(a: f64, b: f64, lambda: f64) -> Option<f64> {
    let big = super::potentials::cornell_lambda(a, lambda);
    let den = (big - a) * (big - a + 1.0);
    let m2 = b * big / den;
    (den > 0.0 && m2 >= 0.0).then(|| m2.sqrt())
}

/// Values of `C` in `(c_lo, c_hi)` for which Kratzer level `n` terminates
/// completely, by sign scan and bisection of the accessory coefficient.
pub fn kratzer_tuned_c(
    d: f64,
    m: f64,
    qn: &QuantumNumbers,
    c_lo: f64,
    c_hi: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    if !(c_lo > 0.0 && c_lo < c_hi) {
        return Err(Error::InvalidParameter(format!(
            "bad C range ({c_lo}, {c_hi})"
        )));
    }
    let eps = kratzer_epsilon(d, m, qn.n)?;
    let n = qn.n;
    // c_{n+1} carries 1/(2C)^(n+1); clearing it keeps the scan free of poles.
    let f = |c: f64| -> Result<f64> {
        let map = spectrum_map(&PotentialSpec::Kratzer { c, d }, m, qn, eps)?;
        let p: HeunParams = map.heun_params();
        Ok(accessory_residual(&p, n)? * (2.0 * c).powi(n as i32 + 1))
    };
    let mut roots = Vec::new();
    let step = (c_hi - c_lo) / samples as f64;
    let mut a = c_lo;
    let mut fa = f(a)?;
    for i in 1..=samples {
        let b = c_lo + step * i as f64;
        let fb = f(b)?;
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid)?;
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    Ok(roots)
}
