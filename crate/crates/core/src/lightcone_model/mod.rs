//! Potentials, effective potentials, closed-form spectra, Heun parameter
//! maps and wavefunction assembly for the light-cone radial equations.

mod maps;
mod potentials;
mod verify;
mod wavefunction;

pub use maps::{
    cornell_heun_map, coulomb_heun_map, kratzer_branch_for_level, kratzer_heun_map,
    map_check_radii, verify_map, CornellMapResult, CoulombMapResult, KratzerBranch,
    KratzerMapResult, MapCheck, MapForm, RadialMap, MAP_CHECK_POINTS, MAP_CHECK_TOL,
};
pub use potentials::{
    cornell_epsilon, cornell_lambda, effective_potential, energy_of_epsilon, epsilon_of_energy,
    kratzer_epsilon, kratzer_identity_residual, separation_lambda, Channel, ParticleParams,
    PotentialSpec, QuantumNumbers,
};
pub use verify::{
    closed_form_spectrum, cornell_n1_mass, cornell_spectrum, kratzer_spectrum, kratzer_tuned_c,
    oracle_problem, spectrum_map, verify_solution, SpectrumResult, VerifyOptions,
};
pub use wavefunction::{
    assemble_wavefunction, assemble_wavefunction_with, count_nodes, gamma_jets, trapezoid,
    uniform_grid, HeunFactor, WavefunctionTable,
};
