//! The verification suite: one check per acceptance criterion plus a
//! per-case record of every formula it exercised.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::angular::{angular_residual, chebyshev_thetas};
use crate::eigensolver_oracle::{
    fd_spectrum, shoot_eigenvalue, Potential, RadialProblem, DEFAULT_GRID,
};
use crate::error::{Error, Result};
use crate::heun_family::{
    to_ode, BiconfluentParams, ConfluentParams, DoubleConfluentParams, HeunParams, TERMINATION_TOL,
};
use crate::lightcone_model::{
    assemble_wavefunction, cornell_heun_map, cornell_n1_mass, cornell_spectrum, coulomb_heun_map,
    kratzer_heun_map, kratzer_spectrum, kratzer_tuned_c, map_check_radii, oracle_problem,
    separation_lambda, trapezoid, uniform_grid, verify_map, HeunFactor, KratzerBranch, MapForm,
    PotentialSpec, QuantumNumbers, RadialMap, MAP_CHECK_TOL,
};
use crate::ode_core::{
    frobenius_series, indicial_exponents, ode_residual, rk_continue_through, taylor_series,
    DEFAULT_TERMS,
};

/// Relative tolerance of the spectrum identities.
pub const IDENTITY_TOL: f64 = 1e-10;
pub const CALIBRATION_TOL: f64 = 1e-3;
pub const ANGULAR_TOL: f64 = 1e-10;
pub const CONSISTENCY_TOL: f64 = 1e-8;
pub const SUITE_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Replaces every residual and identity threshold when set.
    pub tol: Option<f64>,
    /// Flips the sign of the bi-confluent accessory parameter in the maps the
    /// library itself uses.
    pub inject_q_sign_flip: bool,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            tol: None,
            inject_q_sign_flip: false,
            seed: SUITE_SEED,
        }
    }
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Flag,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReasonCode {
    /// Printed Cornell accessory parameter has the wrong sign.
    PrintedQSign,
    /// Printed Coulomb parameters fail and were re-derived.
    PrintedCoulombRederived,
    /// Printed Coulomb exponent is complex for these inputs.
    PrintedComplexExponent,
    /// Printed Kratzer square root sign cannot terminate this level.
    KratzerDecayingBranch,
    /// Level terminates only on the growing Kratzer branch.
    KratzerNonNormalizable,
    /// Alpha condition holds but `c_{n+1} != 0`.
    AccessoryNonzero,
    MapVerificationFailed,
    IdentityViolated,
    ResidualExceeded,
    OracleMismatch,
    PeakMismatch,
    NodeCountMismatch,
    NotDecaying,
    SeriesIntegratorMismatch,
    NumericalError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub criterion: u8,
    pub id: String,
    pub inputs: Value,
    pub formula_value: Option<f64>,
    pub alpha_residual: Option<f64>,
    pub accessory_residual: Option<f64>,
    pub residual_max: Option<f64>,
    pub oracle_energy: Option<f64>,
    pub delta: Option<f64>,
    pub status: Status,
    pub reason: Option<ReasonCode>,
}

impl CaseRecord {
    fn new(criterion: u8, id: impl Into<String>, inputs: Value) -> Self {
        Self {
            criterion,
            id: id.into(),
            inputs,
            formula_value: None,
            alpha_residual: None,
            accessory_residual: None,
            residual_max: None,
            oracle_energy: None,
            delta: None,
            status: Status::Pass,
            reason: None,
        }
    }

    fn flag(&mut self, reason: ReasonCode) {
        if self.status == Status::Pass {
            self.status = Status::Flag;
        }
        self.reason.get_or_insert(reason);
    }

    fn fail(&mut self, reason: ReasonCode) {
        self.status = Status::Fail;
        self.reason = Some(reason);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub budget_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub artifact_version: String,
    /// Unix seconds; the only non-deterministic field.
    pub timestamp: u64,
    pub options: SuiteOptions,
    pub criteria: Vec<CriterionOutcome>,
    pub cases: Vec<CaseRecord>,
}

impl ConformanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn flagged(&self) -> Vec<&CaseRecord> {
        self.cases
            .iter()
            .filter(|c| c.status == Status::Flag)
            .collect()
    }
}

type Check = fn(&SuiteOptions, &mut Vec<CaseRecord>) -> (bool, String);

/// `(id, name, runtime budget in seconds, check)`.
pub const CRITERIA: [(u8, &str, f64, Check); 8] = [
    (
        1,
        "cornell spectrum identity",
        1.0,
        criterion_cornell_identity,
    ),
    (
        2,
        "kratzer spectrum identity",
        1.0,
        criterion_kratzer_identity,
    ),
    (
        3,
        "parameter-map conformance",
        10.0,
        criterion_map_conformance,
    ),
    (4, "oracle calibration", 30.0, criterion_oracle_calibration),
    (
        5,
        "end-to-end dual-method check",
        60.0,
        criterion_dual_method,
    ),
    (6, "angular identity", 1.0, criterion_angular),
    (
        7,
        "series/integrator consistency",
        30.0,
        criterion_series_consistency,
    ),
    (8, "figure reproduction", 60.0, criterion_figures),
];

pub fn run_criterion(
    id: u8,
    opts: &SuiteOptions,
    cases: &mut Vec<CaseRecord>,
) -> Result<CriterionOutcome> {
    let (id, name, budget, check) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    let start = Instant::now();
    let (passed, detail) = check(opts, cases);
    Ok(CriterionOutcome {
        id,
        name: name.to_string(),
        passed,
        detail,
        elapsed_s: start.elapsed().as_secs_f64(),
        budget_s: budget,
    })
}

pub fn run_suite(opts: &SuiteOptions) -> ConformanceReport {
    let mut cases = Vec::new();
    let criteria = CRITERIA
        .iter()
        .map(|c| run_criterion(c.0, opts, &mut cases).expect("known criterion"))
        .collect();
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    ConformanceReport {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp,
        options: *opts,
        criteria,
        cases,
    }
}

fn summarize(cases: &[CaseRecord], criterion: u8) -> (bool, String) {
    let mine: Vec<&CaseRecord> = cases.iter().filter(|c| c.criterion == criterion).collect();
    let fails = mine.iter().filter(|c| c.status == Status::Fail).count();
    let flags = mine.iter().filter(|c| c.status == Status::Flag).count();
    let first = mine
        .iter()
        .find(|c| c.status == Status::Fail)
        .map(|c| format!("; first failure {} ({:?})", c.id, c.reason))
        .unwrap_or_default();
    (
        fails == 0 && !mine.is_empty(),
        format!(
            "{} cases, {} failed, {} flagged{}",
            mine.len(),
            fails,
            flags,
            first
        ),
    )
}

const CORNELL_A: [f64; 4] = [0.0, 0.5, -0.5, 1.0];
const CORNELL_B: [f64; 3] = [0.25, 1.0, 2.0];

fn criterion_cornell_identity(opts: &SuiteOptions, cases: &mut Vec<CaseRecord>) -> (bool, String) {
    let tol = opts.tol(IDENTITY_TOL);
    for n in 0..=5 {
        for &a in &CORNELL_A {
            for &b in &CORNELL_B {
                for ell in 0..=2 {
                    let qn = QuantumNumbers::new(n, ell);
                    let mut rec = CaseRecord::new(
                        1,
                        format!("cornell-identity n={n} A={a} B={b} l={ell}"),
                        json!({"n": n, "A": a, "B": b, "ell": ell, "m": 1.0}),
                    );
                    match cornell_spectrum(a, b, 1.0, &qn) {
                        Ok(s) => {
                            rec.formula_value = Some(s.epsilon);
                            rec.alpha_residual = Some(s.termination.alpha_condition_relative);
                            rec.accessory_residual = Some(s.termination.accessory_relative);
                            if s.termination.alpha_condition_relative.abs() >= tol {
                                rec.fail(ReasonCode::IdentityViolated);
                            } else if s.termination.accessory_relative.abs() >= TERMINATION_TOL {
                                rec.flag(ReasonCode::AccessoryNonzero);
                            }
                        }
                        Err(_) => rec.fail(ReasonCode::NumericalError),
                    }
                    cases.push(rec);
                }
            }
        }
    }
    summarize(cases, 1)
}

fn criterion_kratzer_identity(opts: &SuiteOptions, cases: &mut Vec<CaseRecord>) -> (bool, String) {
    let tol = opts.tol(IDENTITY_TOL);
    for n in 0..=5 {
        for &d in &[-1.0, -0.5, 0.5] {
            for &m in &[0.5, 1.0, 2.0] {
                if n as f64 + 1.0 - d == 0.0 {
                    continue;
                }
                let qn = QuantumNumbers::new(n, 0);
                let mut rec = CaseRecord::new(
                    2,
                    format!("kratzer-identity n={n} D={d} m={m}"),
                    json!({"n": n, "D": d, "m": m, "C": 1.0, "ell": 0}),
                );
                match kratzer_spectrum(1.0, d, m, &qn) {
                    Ok(s) => {
                        rec.formula_value = Some(s.epsilon);
                        rec.residual_max = s.identity_residual;
                        rec.alpha_residual = Some(s.termination.alpha_condition_relative);
                        rec.accessory_residual = Some(s.termination.accessory_relative);
                        if s.identity_residual.unwrap_or(f64::INFINITY).abs() >= tol
                            || s.termination.alpha_condition_relative.abs() >= tol
                        {
                            rec.fail(ReasonCode::IdentityViolated);
                        } else if s.termination.accessory_relative.abs() >= TERMINATION_TOL {
                            rec.flag(ReasonCode::AccessoryNonzero);
                        }
                    }
                    Err(_) => rec.fail(ReasonCode::NumericalError),
                }
                cases.push(rec);
            }
        }
    }
    summarize(cases, 2)
}

/// The Cornell map as the library uses it, optionally with a sabotaged `q`.
fn artifact_cornell_map(
    a: f64,
    b: f64,
    m: f64,
    l: f64,
    eps: f64,
    opts: &SuiteOptions,
) -> RadialMap {
    let mut c = cornell_heun_map(a, b, m, l, eps, MapForm::Corrected);
    if opts.inject_q_sign_flip {
        c.params.q = -c.params.q;
    }
    RadialMap::Cornell(c)
}

fn check_map(rec: &mut CaseRecord, map: Result<RadialMap>, tol: f64) -> Option<bool> {
    match map.and_then(|m| verify_map(&m)) {
        Ok(chk) => {
            rec.residual_max = Some(chk.max_relative_residual);
            Some(chk.max_relative_residual < tol)
        }
        Err(Error::ComplexExponent(_)) => None,
        Err(_) => Some(false),
    }
}

fn criterion_map_conformance(opts: &SuiteOptions, cases: &mut Vec<CaseRecord>) -> (bool, String) {
    let tol = opts.tol(MAP_CHECK_TOL);

    // Cornell with m != 0, where the sign of q matters.
    for &a in &[0.0, 0.5, -0.5] {
        for &b in &[0.5, 1.0] {
            for &m in &[0.5, 1.0] {
                for ell in 0..=1 {
                    let qn = QuantumNumbers::new(1, ell);
                    let l = qn.effective_lambda();
                    let eps = match cornell_spectrum(a, b, m, &qn) {
                        Ok(s) => s.epsilon,
                        Err(_) => continue,
                    };
                    let inputs =
                        json!({"A": a, "B": b, "m": m, "ell": ell, "n": 1, "epsilon": eps});
                    let mut art = CaseRecord::new(
                        3,
                        format!("cornell-map A={a} B={b} m={m} l={ell}"),
                        inputs.clone(),
                    );
                    let art_ok = check_map(
                        &mut art,
                        Ok(artifact_cornell_map(a, b, m, l, eps, opts)),
                        tol,
                    ) == Some(true);
                    if !art_ok {
                        art.flag(ReasonCode::MapVerificationFailed);
                    }
                    let mut printed = CaseRecord::new(
                        3,
                        format!("cornell-map-printed A={a} B={b} m={m} l={ell}"),
                        inputs,
                    );
                    let pr = check_map(
                        &mut printed,
                        Ok(RadialMap::Cornell(cornell_heun_map(
                            a,
                            b,
                            m,
                            l,
                            eps,
                            MapForm::Printed,
                        ))),
                        tol,
                    );
                    if pr != Some(true) {
                        if art_ok && !opts.inject_q_sign_flip {
                            printed.flag(ReasonCode::PrintedQSign);
                        } else {
                            printed.fail(ReasonCode::MapVerificationFailed);
                        }
                    }
                    cases.push(art);
                    if !opts.inject_q_sign_flip {
                        cases.push(printed);
                    }
                }
            }
        }
    }

    // Kratzer: both square-root signs are coefficient-consistent; record which
    // one each level needs.
    for &c in &[0.5, 1.0] {
        for &d in &[0.3, -0.5] {
            for ell in 0..=1 {
                let qn = QuantumNumbers::new(1, ell);
                let s = match kratzer_spectrum(c, d, 1.0, &qn) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let l = qn.effective_lambda();
                let inputs =
                    json!({"C": c, "D": d, "m": 1.0, "ell": ell, "n": 1, "epsilon": s.epsilon});
                let mut art = CaseRecord::new(
                    3,
                    format!("kratzer-map C={c} D={d} l={ell}"),
                    inputs.clone(),
                );
                if check_map(&mut art, Ok(s.map), tol) != Some(true) {
                    art.flag(ReasonCode::MapVerificationFailed);
                }
                let mut printed = CaseRecord::new(
                    3,
                    format!("kratzer-map-printed C={c} D={d} l={ell}"),
                    inputs,
                );
                let growing = kratzer_heun_map(c, d, 1.0, l, s.epsilon, KratzerBranch::Growing)
                    .map(RadialMap::Kratzer);
                match check_map(&mut printed, growing, tol) {
                    Some(true) => {
                        if let RadialMap::Kratzer(k) = s.map {
                            printed.flag(match k.branch {
                                KratzerBranch::Decaying => ReasonCode::KratzerDecayingBranch,
                                KratzerBranch::Growing => ReasonCode::KratzerNonNormalizable,
                            });
                        }
                    }
                    _ => printed.fail(ReasonCode::MapVerificationFailed),
                }
                cases.push(art);
                cases.push(printed);
            }
        }
    }

    // Coulomb confluent reduction.
    for &z in &[0.1, 0.3] {
        for &eps in &[0.5, 0.8] {
            for &l in &[0.5, 1.5, 2.5] {
                let inputs = json!({"z": z, "m": 1.0, "epsilon": eps, "lambda": l});
                let mut art = CaseRecord::new(
                    3,
                    format!("coulomb-map z={z} eps={eps} lambda={l}"),
                    inputs.clone(),
                );
                let ok = check_map(
                    &mut art,
                    coulomb_heun_map(z, 1.0, eps, l, MapForm::Corrected).map(RadialMap::Coulomb),
                    tol,
                ) == Some(true);
                if !ok {
                    art.flag(ReasonCode::MapVerificationFailed);
                }
                let mut printed = CaseRecord::new(
                    3,
                    format!("coulomb-map-printed z={z} eps={eps} lambda={l}"),
                    inputs,
                );
                match check_map(
                    &mut printed,
                    coulomb_heun_map(z, 1.0, eps, l, MapForm::Printed).map(RadialMap::Coulomb),
                    tol,
                ) {
                    Some(true) => {}
                    None => printed.flag(ReasonCode::PrintedComplexExponent),
                    Some(false) if ok => printed.flag(ReasonCode::PrintedCoulombRederived),
                    Some(false) => printed.fail(ReasonCode::MapVerificationFailed),
                }
                cases.push(art);
                cases.push(printed);
            }
        }
    }

    // Fully terminated Cornell states: exact polynomial substitution.
    let exact = [
        (0.0, 1.0, 0.0, 0usize, 2usize),
        (
            0.5,
            1.0,
            cornell_n1_mass(0.5, 1.0, 0.5).unwrap_or(0.0),
            0,
            1,
        ),
    ];
    for &(a, b, m, ell, n) in &exact {
        let qn = QuantumNumbers::new(n, ell);
        let mut rec = CaseRecord::new(
            3,
            format!("cornell-exact A={a} B={b} m={m:.6} n={n}"),
            json!({"A": a, "B": b, "m": m, "ell": ell, "n": n}),
        );
        let res = cornell_spectrum(a, b, m, &qn).and_then(|s| {
            let map = artifact_cornell_map(a, b, m, qn.effective_lambda(), s.epsilon, opts);
            let f = HeunFactor::polynomial(&map, n)?;
            let radii = map_check_radii(&map);
            let jets = crate::lightcone_model::gamma_jets(&map, &f, &radii)?;
            let rep = ode_residual(
                &map.radial_ode(),
                |r| Ok(jets[radii.iter().position(|&p| p == r).expect("radius")]),
                &radii,
            )?;
            Ok((s, rep.max_relative()))
        });
        match res {
            Ok((s, r)) => {
                rec.formula_value = Some(s.epsilon);
                rec.accessory_residual = Some(s.termination.accessory_relative);
                rec.residual_max = Some(r);
                if !(r < tol) {
                    rec.fail(ReasonCode::ResidualExceeded);
                }
            }
            Err(_) => rec.fail(ReasonCode::NumericalError),
        }
        cases.push(rec);
    }

    let mine: Vec<&CaseRecord> = cases.iter().filter(|c| c.criterion == 3).collect();
    let artifact_failures = mine
        .iter()
        .filter(|c| c.reason == Some(ReasonCode::MapVerificationFailed) || c.status == Status::Fail)
        .count();
    let (_, detail) = summarize(cases, 3);
    (artifact_failures == 0, detail)
}

fn criterion_oracle_calibration(
    opts: &SuiteOptions,
    cases: &mut Vec<CaseRecord>,
) -> (bool, String) {
    let tol = opts.tol(CALIBRATION_TOL);
    let osc: Potential = std::sync::Arc::new(|r: f64| 1.0 / (r * r) + 0.5 * r * r);
    let hyd: Potential = std::sync::Arc::new(|r: f64| -1.0 / r);
    let problems = [
        (
            "oscillator",
            RadialProblem::with_auto_range(osc, 11.5, DEFAULT_GRID),
            vec![2.5, 4.5, 6.5, 8.5],
        ),
        (
            "hydrogen",
            RadialProblem::with_auto_range(hyd, -0.5, DEFAULT_GRID)
                .and_then(|p| p.with_range(1e-4, p.r_max, DEFAULT_GRID)),
            vec![-0.5],
        ),
    ];
    for (name, problem, exact) in problems {
        let problem = match problem {
            Ok(p) => p,
            Err(_) => {
                let mut rec = CaseRecord::new(4, name, json!({}));
                rec.fail(ReasonCode::NumericalError);
                cases.push(rec);
                continue;
            }
        };
        let spec = match fd_spectrum(&problem, exact.len() + 1) {
            Ok(s) => s,
            Err(_) => {
                let mut rec = CaseRecord::new(4, name, json!({}));
                rec.fail(ReasonCode::NumericalError);
                cases.push(rec);
                continue;
            }
        };
        for (k, &e) in exact.iter().enumerate() {
            let mut rec = CaseRecord::new(
                4,
                format!("{name} k={k}"),
                json!({"r_min": problem.r_min, "r_max": problem.r_max, "n_grid": problem.n_grid, "level": k}),
            );
            rec.formula_value = Some(e);
            rec.oracle_energy = Some(spec.energies[k]);
            rec.delta = Some(spec.energies[k] - e);
            if ((spec.energies[k] - e) / e).abs() >= tol {
                rec.fail(ReasonCode::OracleMismatch);
            }
            let lo = if k == 0 {
                spec.energies[0] - (spec.energies[1] - spec.energies[0])
            } else {
                0.5 * (spec.energies[k - 1] + spec.energies[k])
            };
            let hi = 0.5 * (spec.energies[k] + spec.energies[k + 1]);
            match shoot_eigenvalue(&problem, k, (lo, hi)) {
                Ok(sh) => {
                    let gap = (sh.energy - spec.extrapolated[k]).abs();
                    rec.residual_max = Some(gap);
                    if gap > spec.error_estimates[k] + sh.error_estimate {
                        rec.fail(ReasonCode::OracleMismatch);
                    }
                }
                Err(_) => rec.fail(ReasonCode::NumericalError),
            }
            cases.push(rec);
        }
    }
    summarize(cases, 4)
}

fn argmax_abs(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

fn criterion_dual_method(opts: &SuiteOptions, cases: &mut Vec<CaseRecord>) -> (bool, String) {
    let mut configs = Vec::new();
    for &a in &CORNELL_A {
        for &b in &CORNELL_B {
            for ell in 0..=2 {
                for n in 0..=5 {
                    configs.push((a, b, 0.0, ell, n));
                }
                if let Some(m) = cornell_n1_mass(a, b, separation_lambda(0, ell)) {
                    configs.push((a, b, m, ell, 1));
                }
            }
        }
    }
    for (a, b, m, ell, n) in configs {
        let qn = QuantumNumbers::new(n, ell);
        let s = match cornell_spectrum(a, b, m, &qn) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if s.termination.accessory_relative.abs() >= TERMINATION_TOL {
            continue;
        }
        let pot = PotentialSpec::Cornell { a, b };
        let mut rec = CaseRecord::new(
            5,
            format!("cornell-dual A={a} B={b} m={m:.6} l={ell} n={n}"),
            json!({"A": a, "B": b, "m": m, "ell": ell, "n": n}),
        );
        rec.formula_value = Some(s.e_schrodinger);
        rec.accessory_residual = Some(s.termination.accessory_relative);
        let mut run = || -> Result<()> {
            let problem = oracle_problem(&pot, m, &qn, s.e_schrodinger, DEFAULT_GRID)?;
            let spec = fd_spectrum(&problem, n + 3)?;
            let j = spec.nearest_level(s.e_schrodinger).expect("levels");
            rec.oracle_energy = Some(spec.extrapolated[j]);
            rec.delta = Some(s.e_schrodinger - spec.extrapolated[j]);
            let tol = opts.tol.unwrap_or(0.0).max(spec.error_estimates[j]);
            if (s.e_schrodinger - spec.extrapolated[j]).abs() > tol {
                rec.fail(ReasonCode::OracleMismatch);
                return Ok(());
            }
            let grid = problem.grid();
            let inner = &grid[1..grid.len() - 1];
            let map = artifact_cornell_map(a, b, m, qn.effective_lambda(), s.epsilon, opts);
            let f = HeunFactor::for_map(&map, Some(n))?;
            let table = assemble_wavefunction(&map, &f, inner)?;
            let peak = argmax_abs(&table.gamma1) as i64 + 1;
            let oracle_peak = argmax_abs(&spec.eigenvectors[j]) as i64;
            rec.residual_max = Some((peak - oracle_peak).abs() as f64);
            if (peak - oracle_peak).abs() > 2 {
                rec.fail(ReasonCode::PeakMismatch);
            }
            Ok(())
        };
        if run().is_err() {
            rec.fail(ReasonCode::NumericalError);
        }
        cases.push(rec);
    }
    summarize(cases, 5)
}

fn criterion_angular(opts: &SuiteOptions, cases: &mut Vec<CaseRecord>) -> (bool, String) {
    let tol = opts.tol(ANGULAR_TOL);
    let thetas = chebyshev_thetas(64);
    for n in 0..=3 {
        for ell in 0..=3 {
            let mut rec = CaseRecord::new(
                6,
                format!("angular n={n} l={ell}"),
                json!({"n": n, "ell": ell, "samples": 64}),
            );
            let lam = separation_lambda(n, ell);
            match (
                angular_residual(n, ell, &thetas, None),
                angular_residual(n, ell, &thetas, Some(lam + 0.1)),
            ) {
                (Ok(base), Ok(pert)) => {
                    rec.formula_value = Some(lam);
                    rec.residual_max = Some(base.max_residual());
                    rec.delta = Some(base.best_fit_ratio - 1.0);
                    let insensitive =
                        pert.max_residual() < 1e3 * base.max_residual().max(f64::EPSILON);
                    if base.max_residual() >= tol || insensitive {
                        rec.fail(ReasonCode::ResidualExceeded);
                    } else if (base.best_fit_ratio - 1.0).abs() > 1e-8 {
                        rec.flag(ReasonCode::ResidualExceeded);
                    }
                }
                _ => rec.fail(ReasonCode::NumericalError),
            }
            cases.push(rec);
        }
    }
    summarize(cases, 6)
}

/// Randomized parameter ranges for the series/integrator comparison.
pub const BICONFLUENT_RANGES: [(f64, f64); 5] = [
    (0.5, 4.0),
    (-2.0, 2.0),
    (-2.0, 0.5),
    (-3.0, 3.0),
    (-3.0, 3.0),
];
pub const DOUBLE_CONFLUENT_RANGES: [(f64, f64); 5] = [
    (0.2, 4.0),
    (-2.0, 2.0),
    (-2.0, 2.0),
    (-3.0, 3.0),
    (-3.0, 3.0),
];
pub const CONFLUENT_RANGES: [(f64, f64); 5] = [
    (0.5, 3.0),
    (-2.0, 2.0),
    (-2.0, 2.0),
    (-2.0, 2.0),
    (-2.0, 2.0),
];

fn draw(rng: &mut StdRng, ranges: &[(f64, f64); 5]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (o, &(lo, hi)) in out.iter_mut().zip(ranges) {
        *o = rng.random_range(lo..hi);
    }
    out
}

/// Largest series-vs-integrator discrepancy for one parameter set, relative
/// to the largest solution value at the test points.
pub fn series_integrator_gap(params: &HeunParams) -> Result<f64> {
    let ode = to_ode(params);
    let (series, start, points): (_, f64, Vec<f64>) = match params {
        HeunParams::DoubleConfluent(_) => {
            // Irregular origin: compare around the ordinary anchor r = 1.
            let s = taylor_series(&ode, 1.0, 1.0, 0.3, DEFAULT_TERMS)?;
            (s, 1.0, vec![1.1, 1.2, 1.3, 1.4, 1.45])
        }
        HeunParams::Confluent(_) => {
            let (hi, _) = indicial_exponents(&ode, 0.0)?;
            let s = frobenius_series(&ode, 0.0, hi, DEFAULT_TERMS)?;
            (s, 0.05, vec![0.1, 0.2, 0.3, 0.4, 0.45])
        }
        HeunParams::Biconfluent(_) => {
            let (hi, _) = indicial_exponents(&ode, 0.0)?;
            let s = frobenius_series(&ode, 0.0, hi, DEFAULT_TERMS)?;
            (s, 0.05, vec![0.2, 0.4, 0.6, 0.8, 1.0])
        }
    };
    let y0 = series.eval(start)?.jet;
    let ys = rk_continue_through(&ode, start, (y0.value, y0.d1), &points, 1e-12)?;
    let direct: Vec<f64> = points
        .iter()
        .map(|&x| series.eval(x).map(|p| p.jet.value))
        .collect::<Result<_>>()?;
    let scale = direct.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(ys
        .iter()
        .zip(&direct)
        .map(|((y, _), d)| (y - d).abs() / scale)
        .fold(0.0, f64::max))
}

fn criterion_series_consistency(
    opts: &SuiteOptions,
    cases: &mut Vec<CaseRecord>,
) -> (bool, String) {
    let tol = opts.tol(CONSISTENCY_TOL);
    let mut rng = StdRng::seed_from_u64(opts.seed);
    for family in ["bi-confluent", "double-confluent", "confluent"] {
        for i in 0..50 {
            let params: HeunParams = match family {
                "bi-confluent" => {
                    let [gamma, delta, epsilon, alpha, q] = draw(&mut rng, &BICONFLUENT_RANGES);
                    BiconfluentParams {
                        gamma,
                        delta,
                        epsilon,
                        alpha,
                        q,
                    }
                    .into()
                }
                "double-confluent" => {
                    let [gamma, delta, epsilon, alpha, q] =
                        draw(&mut rng, &DOUBLE_CONFLUENT_RANGES);
                    DoubleConfluentParams {
                        gamma,
                        delta,
                        epsilon,
                        alpha,
                        q,
                    }
                    .into()
                }
                _ => {
                    let [gamma, delta, epsilon, alpha, q] = draw(&mut rng, &CONFLUENT_RANGES);
                    ConfluentParams {
                        gamma,
                        delta,
                        epsilon,
                        alpha,
                        q,
                    }
                    .into()
                }
            };
            let mut rec = CaseRecord::new(
                7,
                format!("{family} #{i}"),
                serde_json::to_value(params).unwrap_or(Value::Null),
            );
            match series_integrator_gap(&params) {
                Ok(gap) => {
                    rec.residual_max = Some(gap);
                    if !(gap < tol) {
                        rec.fail(ReasonCode::SeriesIntegratorMismatch);
                    }
                }
                Err(_) => rec.fail(ReasonCode::NumericalError),
            }
            cases.push(rec);
        }
    }
    summarize(cases, 7)
}

/// One low-lying state for the figure check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureState {
    pub potential: PotentialSpec,
    pub m: f64,
    pub qn: QuantumNumbers,
}

/// Two Cornell and two Kratzer states whose Heun factor terminates exactly.
pub fn figure_states() -> Result<Vec<FigureState>> {
    let mut out = Vec::new();
    for n in [0, 2] {
        out.push(FigureState {
            potential: PotentialSpec::Cornell { a: 0.0, b: 1.0 },
            m: 0.0,
            qn: QuantumNumbers::new(n, 0),
        });
    }
    for n in [1, 2] {
        let qn = QuantumNumbers::new(n, 0);
        let c = kratzer_tuned_c(0.3, 1.0, &qn, 0.01, 5.0, 500)?
            .first()
            .copied()
            .ok_or_else(|| {
                Error::NoBoundState(format!("no terminating Kratzer state at n = {n}"))
            })?;
        out.push(FigureState {
            potential: PotentialSpec::Kratzer { c, d: 0.3 },
            m: 1.0,
            qn,
        });
    }
    Ok(out)
}

/// Assembled, normalized wavefunction of a figure state on its oracle box,
/// together with the oracle index of the level it lands on.
pub fn figure_wavefunction(
    state: &FigureState,
    points: usize,
) -> Result<(crate::lightcone_model::WavefunctionTable, usize)> {
    let s = crate::lightcone_model::closed_form_spectrum(&state.potential, state.m, &state.qn)?;
    let problem = oracle_problem(
        &state.potential,
        state.m,
        &state.qn,
        s.e_schrodinger,
        DEFAULT_GRID,
    )?;
    let fine = problem.with_range(1e-3, problem.r_max, 4 * DEFAULT_GRID)?;
    // The state is an exact eigenvalue, so counting levels strictly below it
    // depends on discretization error; take the nearest level's index instead.
    let spec = fd_spectrum(&fine, state.qn.n + 3)?;
    let expected = spec
        .nearest_level(s.e_schrodinger)
        .ok_or_else(|| Error::NoBoundState("oracle found no levels".into()))?;
    let factor = HeunFactor::for_map(&s.map, Some(state.qn.n))?;
    let grid = uniform_grid(1e-3, problem.r_max, points)?;
    Ok((assemble_wavefunction(&s.map, &factor, &grid)?, expected))
}

fn criterion_figures(_opts: &SuiteOptions, cases: &mut Vec<CaseRecord>) -> (bool, String) {
    let states = match figure_states() {
        Ok(s) => s,
        Err(_) => {
            let mut rec = CaseRecord::new(8, "figure-states", json!({}));
            rec.fail(ReasonCode::NumericalError);
            cases.push(rec);
            return summarize(cases, 8);
        }
    };
    for st in states {
        let mut rec = CaseRecord::new(
            8,
            format!("figure {} n={}", st.potential.name(), st.qn.n),
            json!({"potential": st.potential, "m": st.m, "n": st.qn.n, "ell": st.qn.ell}),
        );
        match figure_wavefunction(&st, 2000) {
            Ok((t, expected)) => {
                let sq: Vec<f64> = t.gamma1.iter().map(|v| v * v).collect();
                let norm = trapezoid(&t.r, &sq);
                let peak = t.gamma1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let tail = t.gamma1[t.gamma1.len() - 1].abs();
                rec.residual_max = Some(tail / peak);
                rec.delta = Some(t.nodes as f64 - expected as f64);
                if (norm - 1.0).abs() > 1e-8 {
                    rec.fail(ReasonCode::ResidualExceeded);
                } else if t.nodes != expected {
                    rec.fail(ReasonCode::NodeCountMismatch);
                } else if tail > 1e-6 * peak {
                    rec.fail(ReasonCode::NotDecaying);
                }
            }
            Err(_) => rec.fail(ReasonCode::NumericalError),
        }
        cases.push(rec);
    }
    summarize(cases, 8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_sign_injection_is_caught() {
        let opts = SuiteOptions {
            inject_q_sign_flip: true,
            ..SuiteOptions::default()
        };
        let mut cases = Vec::new();
        let out = run_criterion(3, &opts, &mut cases).unwrap();
        assert!(!out.passed);
        let flagged: Vec<_> = cases
            .iter()
            .filter(|c| c.reason == Some(ReasonCode::MapVerificationFailed))
            .collect();
        assert!(!flagged.is_empty());
        assert!(flagged.iter().all(|c| c.id.starts_with("cornell-map ")));
    }

    #[test]
    fn printed_forms_are_flagged_not_failed() {
        let mut cases = Vec::new();
        assert!(
            run_criterion(3, &SuiteOptions::default(), &mut cases)
                .unwrap()
                .passed
        );
        let reasons: Vec<_> = cases.iter().filter_map(|c| c.reason).collect();
        assert!(reasons.contains(&ReasonCode::PrintedQSign));
        assert!(reasons.contains(&ReasonCode::PrintedComplexExponent));
    }

    #[test]
    fn randomized_sets_are_seeded() {
        let opts = SuiteOptions::default();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        run_criterion(7, &opts, &mut a).unwrap();
        run_criterion(7, &opts, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(9, &SuiteOptions::default(), &mut Vec::new()).is_err());
    }
}
