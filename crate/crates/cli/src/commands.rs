use serde::Serialize;
use serde_json::{json, Value};

use lightcone_heun::angular::{angular_residual, angular_table, chebyshev_thetas};
use lightcone_heun::conformance::{run_suite, Status, SuiteOptions, SUITE_SEED};
use lightcone_heun::eigensolver_oracle::DEFAULT_GRID;
use lightcone_heun::lightcone_model::{
    assemble_wavefunction_with, closed_form_spectrum, coulomb_heun_map, oracle_problem,
    uniform_grid, verify_solution, HeunFactor, MapForm, PotentialSpec, RadialMap, VerifyOptions,
};
use lightcone_heun::Error;

use crate::config::{ConfigError, Options};

pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_POINTS: usize = 2000;
pub const DEFAULT_R_MIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
}

/// What a command produced, before rendering.
pub struct Output {
    pub results: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<f64>>,
    /// Non-numeric CSV columns (verify), used instead of `csv_rows` when set.
    pub csv_text_rows: Option<Vec<Vec<String>>>,
    pub warnings: Vec<Warning>,
    /// Set when the command ran but its checks failed; exits 3 after writing.
    pub failure: Option<String>,
}

impl Output {
    fn numeric(results: Value, header: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        Self {
            results,
            csv_header: header,
            csv_rows: rows,
            csv_text_rows: None,
            warnings: Vec::new(),
            failure: None,
        }
    }
}

pub enum Failure {
    Config(ConfigError),
    Numeric(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        // Bad inputs surface from the library as these variants.
        if e.is_input_error() || matches!(e, Error::SingularQuantumNumber(_)) {
            Failure::Config(ConfigError(format!("{}: {e}", e.code())))
        } else {
            Failure::Numeric(e)
        }
    }
}

type CmdResult = Result<Output, Failure>;

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

pub fn spectrum(o: &Options) -> CmdResult {
    let pot = o.potential_spec()?;
    let m = o.mass()?;
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for n in o.levels() {
        let qn = o.quantum_numbers(n);
        let s = closed_form_spectrum(&pot, m, &qn)?;
        let t = &s.termination;
        results.push(json!({
            "n": n,
            "ell": qn.ell,
            "lambda": s.lambda,
            "epsilon": s.epsilon,
            "energy": s.e_schrodinger,
            "alpha_residual": t.alpha_condition_relative,
            "accessory_residual": t.accessory_relative,
            "true_polynomial": t.is_true_polynomial,
            "identity_residual": s.identity_residual,
            "heun_params": s.map.heun_params(),
        }));
        rows.push(vec![
            n as f64,
            qn.ell as f64,
            s.lambda,
            s.epsilon,
            s.e_schrodinger,
            t.alpha_condition_relative,
            t.accessory_relative,
        ]);
    }
    Ok(Output::numeric(
        Value::Array(results),
        vec![
            "n",
            "ell",
            "lambda",
            "epsilon",
            "energy",
            "alpha_residual",
            "accessory_residual",
        ],
        rows,
    ))
}

pub fn wavefunction(o: &Options) -> CmdResult {
    let pot = o.potential_spec()?;
    let m = o.mass()?;
    let n = o.n.unwrap_or(0);
    let qn = o.quantum_numbers(n);
    let points = o.points.unwrap_or(DEFAULT_POINTS);
    let r_min = o.r_min.unwrap_or(DEFAULT_R_MIN);

    let (map, eps, energy, level) = match pot {
        PotentialSpec::CoulombVector { z } => {
            let eps = o
                .epsilon
                .ok_or_else(|| ConfigError("--epsilon is required for the coulomb field".into()))?;
            let map = RadialMap::Coulomb(coulomb_heun_map(
                z,
                m,
                eps,
                qn.effective_lambda(),
                MapForm::Corrected,
            )?);
            (map, eps, None, None)
        }
        _ => {
            let s = closed_form_spectrum(&pot, m, &qn)?;
            (s.map, s.epsilon, Some(s.e_schrodinger), Some(n))
        }
    };
    let r_max = match o.r_max {
        Some(r) => r,
        None => match (&map, energy) {
            (RadialMap::Coulomb(c), _) => 0.9 * c.eta,
            (_, Some(e)) => oracle_problem(&pot, m, &qn, e, DEFAULT_GRID)?.r_max,
            _ => unreachable!("closed-form potentials carry an energy"),
        },
    };
    if r_min >= r_max {
        return Err(ConfigError(format!("need r-min < r-max, got [{r_min}, {r_max}]")).into());
    }
    let grid = uniform_grid(r_min, r_max, points)?;
    let factor = HeunFactor::for_map(&map, level)?;
    let t = assemble_wavefunction_with(&map, &factor, &grid, false)?;

    let mut out = Output::numeric(
        json!({
            "potential": pot,
            "m": m,
            "n": n,
            "ell": qn.ell,
            "lambda": qn.lambda(),
            "epsilon": eps,
            "energy": energy,
            "family": map.family_name(),
            "heun_params": map.heun_params(),
            "heun_source": t.heun_source,
            "polynomial_degree": t.polynomial_degree,
            "series_terms": t.series_terms,
            "continuation_tol": t.continuation_tol,
            "normalization": t.normalization,
            "nodes": t.nodes,
            "tail_growth": t.tail_growth,
            "decaying": t.decaying,
            "r": t.r,
            "gamma1": t.gamma1,
        }),
        vec!["r", "gamma1"],
        t.r.iter()
            .zip(&t.gamma1)
            .map(|(&r, &g)| vec![r, g])
            .collect(),
    );
    if !t.decaying {
        out.warnings.push(Warning {
            code: "non-decaying-tail".into(),
            message: format!(
                "profile grows at the box edge (d ln|G|/dr = {:.6}); normalized on [{r_min}, {r_max}] only",
                t.tail_growth
            ),
        });
    }
    if factor.degree().is_none() && level.is_some() {
        out.warnings.push(Warning {
            code: "accessory-nonzero".into(),
            message: format!(
                "level {n} does not terminate; the Heun factor is the numeric regular branch"
            ),
        });
    }
    Ok(out)
}

pub fn angular(o: &Options) -> CmdResult {
    let n = o.n.unwrap_or(0);
    let ell = o.ell.unwrap_or(0);
    let samples = o.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(ConfigError("--samples must be positive".into()).into());
    }
    let thetas = chebyshev_thetas(samples);
    let rep = angular_residual(n, ell, &thetas, o.lambda)?;
    let table = angular_table(n, ell, &thetas, Some(rep.lambda))?;
    Ok(Output::numeric(
        json!({
            "n": n,
            "ell": ell,
            "lambda": rep.lambda,
            "samples": rep.samples,
            "max_r1": rep.max_r1,
            "max_r2": rep.max_r2,
            "max_residual": rep.max_residual(),
            "best_fit_ratio": rep.best_fit_ratio,
            "table": table,
        }),
        vec!["theta", "t1", "t2", "r1", "r2"],
        table.iter().map(|r| r.to_vec()).collect(),
    ))
}

pub fn verify(o: &Options) -> CmdResult {
    let opts = SuiteOptions {
        tol: o.tol,
        inject_q_sign_flip: o.inject_q_sign_flip.unwrap_or(false),
        seed: o.seed.unwrap_or(SUITE_SEED),
    };
    let report = run_suite(&opts);
    let failed: Vec<String> = report
        .criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.id.to_string())
        .collect();
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    let rows = report
        .cases
        .iter()
        .map(|c| {
            vec![
                c.criterion.to_string(),
                c.id.clone(),
                match c.status {
                    Status::Pass => "pass",
                    Status::Flag => "flag",
                    Status::Fail => "fail",
                }
                .to_string(),
                c.reason
                    .and_then(|r| serde_json::to_value(r).ok())
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                fmt(c.residual_max),
                fmt(c.delta),
            ]
        })
        .collect();
    let mut out = Output {
        results: serde_json::to_value(&report).expect("report serializes"),
        csv_header: vec![
            "criterion",
            "case",
            "status",
            "reason",
            "residual_max",
            "delta",
        ],
        csv_rows: Vec::new(),
        csv_text_rows: Some(rows),
        warnings: Vec::new(),
        failure: None,
    };
    for c in report.criteria.iter().filter(|c| c.elapsed_s > c.budget_s) {
        out.warnings.push(Warning {
            code: "over-budget".into(),
            message: format!(
                "criterion {} took {:.2} s (budget {} s)",
                c.id, c.elapsed_s, c.budget_s
            ),
        });
    }
    if !failed.is_empty() {
        out.failure = Some(format!("acceptance criteria failed: {}", failed.join(", ")));
    }
    Ok(out)
}

pub fn oracle_compare(o: &Options) -> CmdResult {
    let pot = o.potential_spec()?;
    let m = o.mass()?;
    let vopts = VerifyOptions {
        n_grid: o.n_grid.unwrap_or(DEFAULT_GRID),
        ..VerifyOptions::default()
    };
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for n in o.levels() {
        let qn = o.quantum_numbers(n);
        let eps = closed_form_spectrum(&pot, m, &qn)?.epsilon;
        let s = verify_solution(&pot, m, &qn, eps, &vopts)?;
        let within = match (s.oracle_delta, s.oracle_error) {
            (Some(d), Some(e)) => Some(d.abs() <= e),
            _ => None,
        };
        results.push(json!({
            "n": n,
            "ell": qn.ell,
            "epsilon": s.epsilon,
            "energy": s.e_schrodinger,
            "true_polynomial": s.termination.is_true_polynomial,
            "accessory_residual": s.termination.accessory_relative,
            "residual_max": s.residual_max,
            "oracle_level": s.oracle_level,
            "oracle_energy": s.oracle_energy,
            "oracle_error": s.oracle_error,
            "oracle_delta": s.oracle_delta,
            "within_error": within,
            "oracle_note": s.oracle_note,
        }));
        rows.push(vec![
            n as f64,
            s.e_schrodinger,
            opt(s.oracle_energy),
            opt(s.oracle_error),
            opt(s.oracle_delta),
            opt(s.residual_max),
            s.termination.accessory_relative,
        ]);
    }
    Ok(Output::numeric(
        Value::Array(results),
        vec![
            "n",
            "energy",
            "oracle_energy",
            "oracle_error",
            "oracle_delta",
            "residual_max",
            "accessory_residual",
        ],
        rows,
    ))
}
