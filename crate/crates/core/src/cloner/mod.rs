//! Clone fidelities, field/time optimization, closed-form oracles, and the
//! universal, qudit and tetrahedron variants.

mod closed_form;
mod optimize;
mod qudit;
mod series;
mod tetrahedron;
mod universal;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::Spectrum;
use crate::hilbert::{compose, fidelity, partial_trace, BlochInput, QuantumState};
use crate::network::{add_fields, assemble_hamiltonian, build_topology, HamiltonianSpec, Role, SpinGraph, Topology};
use crate::{Error, Result};

pub use closed_form::{
    closed_form_fidelity, fidelity_from_coefficients, optimal_parameters, optimal_pcc_bound, Model,
};
pub use optimize::{earliest_threshold_time, optimize, time_to_threshold, CloneReport, ScanGrid};
pub use qudit::{qudit_clone_fidelity, qudit_effective_fidelity, qudit_full_fidelity, qudit_optimal_parameters, qudit_optimum_formula,
    QuditMode,
};
pub use series::FidelitySeries;
pub use tetrahedron::{tetrahedron_fidelity, tetrahedron_search, TetrahedronParams, TetrahedronSearch};
pub use universal::{haar_inputs, spiral_inputs, universal_clone, universal_fidelity, universal_time_optimum, UniversalReport};

/// How blank (and ancilla) sites are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlankPolicy {
    /// `|0>` for inputs in the northern hemisphere (including the equator),
    /// `|1>` otherwise.
    #[default]
    Hemisphere,
    /// Always `|0>`.
    Zero,
}

/// A cloning experiment on a network: every source holds the input qubit,
/// blanks and ancillae start in a fiducial state, and fidelities are read on
/// the blanks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneTask {
    pub topology: Topology,
    pub lambda: f64,
    pub input: BlochInput,
    #[serde(default)]
    pub blank_policy: BlankPolicy,
    /// Edge couplings overriding the topology's unit couplings.
    #[serde(default)]
    pub couplings: Option<Vec<f64>>,
    /// Per-site fields added on top of the uniform scan field.
    #[serde(default)]
    pub base_fields: Option<Vec<f64>>,
}

impl CloneTask {
    pub fn new(topology: Topology, lambda: f64, input: BlochInput) -> Self {
        Self { topology, lambda, input, blank_policy: BlankPolicy::default(), couplings: None, base_fields: None }
    }

    /// Equatorial input with `phi = 0`.
    pub fn equatorial(topology: Topology, lambda: f64) -> Self {
        Self::new(topology, lambda, BlochInput::equatorial(0.0))
    }

    pub fn with_blank_policy(mut self, policy: BlankPolicy) -> Self {
        self.blank_policy = policy;
        self
    }

    pub fn with_couplings(mut self, couplings: Vec<f64>) -> Self {
        self.couplings = Some(couplings);
        self
    }

    pub fn with_base_fields(mut self, fields: Vec<f64>) -> Self {
        self.base_fields = Some(fields);
        self
    }

    pub fn with_input(mut self, input: BlochInput) -> Self {
        self.input = input;
        self
    }

    /// Graph with coupling and base-field overrides applied, fields unset
    /// otherwise.
    pub fn graph(&self) -> Result<SpinGraph> {
        let mut g = build_topology(&self.topology)?;
        if let Some(c) = &self.couplings {
            g = g.with_couplings(c)?;
        }
        if let Some(f) = &self.base_fields {
            g = g.with_fields(f.clone())?;
        }
        Ok(g)
    }

    pub fn sources(&self) -> Result<Vec<usize>> {
        Ok(self.graph()?.sources())
    }

    pub fn blanks(&self) -> Result<Vec<usize>> {
        Ok(self.graph()?.blanks())
    }

    fn fiducial_bit(&self) -> usize {
        match self.blank_policy {
            BlankPolicy::Zero => 0,
            BlankPolicy::Hemisphere => usize::from(self.input.theta > std::f64::consts::FRAC_PI_2),
        }
    }

    /// The single-qubit state being cloned.
    pub fn target(&self) -> QuantumState {
        QuantumState::qubit(self.input)
    }

    pub fn initial_state(&self) -> Result<QuantumState> {
        let g = self.graph()?;
        let (n, m) = (g.sources().len(), g.blanks().len());
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("a cloning task needs at least one source and one blank".into()));
        }
        let fiducial = QuantumState::basis(1, self.fiducial_bit())?;
        let parts: Vec<QuantumState> = g
            .roles()
            .iter()
            .map(|r| if *r == Role::Source { self.target() } else { fiducial.clone() })
            .collect();
        compose(&parts)
    }

    /// Hamiltonian with the uniform field `b` added to any base fields.
    pub fn hamiltonian(&self, b: f64) -> Result<DMatrix<f64>> {
        let g = self.graph()?;
        let n = g.n_sites();
        let mut h = assemble_hamiltonian(&HamiltonianSpec::new(g, self.lambda));
        add_fields(&mut h, n, &vec![b; n]);
        Ok(h)
    }
}

/// Per-blank fidelities and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloneFidelities {
    pub per_site: Vec<f64>,
    pub mean: f64,
}

impl CloneFidelities {
    pub fn from_sites(per_site: Vec<f64>) -> Self {
        let mean = per_site.iter().sum::<f64>() / per_site.len() as f64;
        Self { per_site, mean }
    }
}

/// Fidelity of every blank after evolving for `t` in uniform field `b`,
/// computed by explicit state evolution and partial traces.
pub fn clone_fidelity(task: &CloneTask, b: f64, t: f64) -> Result<CloneFidelities> {
    let psi0 = task.initial_state()?;
    let h = task.hamiltonian(b)?;
    let spec = Spectrum::for_state(&h, &psi0)?;
    let out = spec.evolve(&psi0, t, 0.0)?;
    site_fidelities(&out, &task.blanks()?, &task.target())
}

pub(crate) fn site_fidelities(state: &QuantumState, sites: &[usize], target: &QuantumState) -> Result<CloneFidelities> {
    let per_site = sites
        .iter()
        .map(|&s| fidelity(&partial_trace(state, &[s])?, target))
        .collect::<Result<Vec<_>>>()?;
    Ok(CloneFidelities::from_sites(per_site))
}
