//! Gate-model phase-covariant cloners, compiled to iSWAP plus single-qubit
//! rotations, and run either ideally or with every iSWAP segment evolved
//! under the Redfield master equation.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::cloner::{optimal_parameters, site_fidelities, CloneTask, Model};
use crate::hilbert::{compose, embed_one, embed_two, Axis, BlochInput, QuantumState};
use crate::network::{add_xxz, Topology};
use crate::redfield::{evolve_master, BathSpec, RedfieldOptions, RedfieldTensor};
use crate::{Error, Result, C64};

/// Duration of one iSWAP segment.
pub const ISWAP_TIME: f64 = FRAC_PI_4;

/// Rotations are `exp(-i angle sigma / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    Rx { angle: f64, site: usize },
    Ry { angle: f64, site: usize },
    Rz { angle: f64, site: usize },
    #[serde(rename = "iswap")]
    ISwap { a: usize, b: usize },
    Cnot { control: usize, target: usize },
    Cry { angle: f64, control: usize, target: usize },
}

fn rotation(axis: Axis, angle: f64) -> Matrix2<C64> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Matrix2::identity() * C64::new(c, 0.0) - axis.matrix() * C64::new(0.0, s)
}

/// The iSWAP matrix in the basis `|00>, |01>, |10>, |11>`.
pub fn iswap_unitary() -> Matrix4<C64> {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    Matrix4::new(o, z, z, z, z, z, i, z, z, i, z, z, z, z, z, o)
}

/// `-(X_a X_b + Y_a Y_b)` on an `n`-qubit register; its evolution for
/// [`ISWAP_TIME`] is the iSWAP.
pub fn iswap_hamiltonian(a: usize, b: usize, n: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(1 << n, 1 << n);
    add_xxz(&mut h, n, a, b, -1.0, 0.0);
    h
}

impl Gate {
    fn sites(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { site, .. } | Gate::Ry { site, .. } | Gate::Rz { site, .. } => vec![site],
            Gate::ISwap { a, b } => vec![a, b],
            Gate::Cnot { control, target } | Gate::Cry { control, target, .. } => vec![control, target],
        }
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } | Gate::Cry { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// Number of iSWAP segments after compilation.
    pub fn iswap_count(&self) -> usize {
        match self {
            Gate::ISwap { .. } => 1,
            Gate::Cnot { .. } => 2,
            Gate::Cry { .. } => 4,
            _ => 0,
        }
    }

    /// Time under the two-qubit interaction; single-qubit gates are
    /// instantaneous.
    pub fn duration(&self) -> f64 {
        self.iswap_count() as f64 * ISWAP_TIME
    }

    /// Dense unitary on an `n`-qubit register.
    pub fn unitary(&self, n: usize) -> DMatrix<C64> {
        match *self {
            Gate::Rx { angle, site } => embed_one(&rotation(Axis::X, angle), site, n),
            Gate::Ry { angle, site } => embed_one(&rotation(Axis::Y, angle), site, n),
            Gate::Rz { angle, site } => embed_one(&rotation(Axis::Z, angle), site, n),
            Gate::ISwap { a, b } => embed_two(&iswap_unitary(), a, b, n),
            Gate::Cnot { control, target } => {
                let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
                let u = Matrix4::new(o, z, z, z, z, o, z, z, z, z, z, o, z, z, o, z);
                embed_two(&u, control, target, n)
            }
            Gate::Cry { angle, control, target } => {
                let r = rotation(Axis::Y, angle);
                let mut u = Matrix4::identity();
                for i in 0..2 {
                    for j in 0..2 {
                        u[(2 + i, 2 + j)] = r[(i, j)];
                    }
                }
                embed_two(&u, control, target, n)
            }
        }
    }

    /// Equivalent sequence of rotations and iSWAPs (up to global phase).
    pub fn compile(&self) -> Vec<Gate> {
        match *self {
            Gate::Cnot { control: c, target: t } => vec![
                Gate::Rx { angle: FRAC_PI_2, site: t },
                Gate::Rz { angle: -FRAC_PI_2, site: c },
                Gate::Rz { angle: FRAC_PI_2, site: t },
                Gate::ISwap { a: c, b: t },
                Gate::Rx { angle: FRAC_PI_2, site: c },
                Gate::ISwap { a: c, b: t },
                Gate::Rz { angle: FRAC_PI_2, site: t },
            ],
            Gate::Cry { angle, control, target } => {
                let mut out = vec![Gate::Ry { angle: angle / 2.0, site: target }];
                out.extend(Gate::Cnot { control, target }.compile());
                out.push(Gate::Ry { angle: -angle / 2.0, site: target });
                out.extend(Gate::Cnot { control, target }.compile());
                out
            }
            g => vec![g],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            let s = g.sites();
            if let Some(&bad) = s.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::SiteOutOfRange { site: bad, n_sites: n_qubits });
            }
            if s.len() == 2 && s[0] == s[1] {
                return Err(Error::InvalidParameter(format!("two-qubit gate on a single site: {g:?}")));
            }
            if g.angle().is_some_and(|a| !a.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite angle in {g:?}")));
            }
        }
        Ok(Self { n_qubits, gates })
    }

    /// Product of the gate unitaries, first gate applied first.
    pub fn unitary(&self) -> DMatrix<C64> {
        let d = 1 << self.n_qubits;
        self.gates.iter().fold(DMatrix::identity(d, d), |u, g| g.unitary(self.n_qubits) * u)
    }

    /// Rewrite in terms of rotations and iSWAPs.
    pub fn compile(&self) -> Circuit {
        Circuit { n_qubits: self.n_qubits, gates: self.gates.iter().flat_map(Gate::compile).collect() }
    }

    pub fn iswap_count(&self) -> usize {
        self.gates.iter().map(Gate::iswap_count).sum()
    }

    /// Total time spent in two-qubit segments.
    pub fn duration(&self) -> f64 {
        self.iswap_count() as f64 * ISWAP_TIME
    }

    pub fn is_native(&self) -> bool {
        self.gates.iter().all(|g| !matches!(g, Gate::Cnot { .. } | Gate::Cry { .. }))
    }
}

/// `min_phi max |A - e^{i phi} B|`, aligning phases on the largest entry of `B`.
pub fn phase_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let (idx, _) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())).expect("non-empty");
    let ph = a.as_slice()[idx] / b.as_slice()[idx];
    let ph = ph / ph.norm();
    a.iter().zip(b.iter()).map(|(x, y)| (x - ph * y).norm()).fold(0.0, f64::max)
}

/// Phase-covariant cloning circuit for `M = 2` or `M = 3`, input on qubit 0,
/// remaining qubits starting in `|0>`.
pub fn pcc_circuit(m: usize) -> Result<Circuit> {
    match m {
        2 => Circuit::new(
            2,
            vec![
                Gate::Cnot { control: 0, target: 1 },
                Gate::Cry { angle: -FRAC_PI_2, control: 1, target: 0 },
                Gate::Cnot { control: 0, target: 1 },
            ],
        ),
        3 => {
            // Ancilla preparation, then fan-out and fan-in of the input. The
            // outer x rotations move the equator onto the frame in which the
            // fan-out acts as a phase-covariant cloner.
            let t1 = std::f64::consts::PI / 8.0;
            let t2 = (0.5 - 2f64.sqrt() / 3.0).sqrt().asin();
            let t3 = t1;
            let mut g = vec![
                Gate::Rx { angle: FRAC_PI_2, site: 0 },
                Gate::Ry { angle: 2.0 * t1, site: 1 },
                Gate::Cnot { control: 1, target: 2 },
                Gate::Ry { angle: 2.0 * t2, site: 2 },
                Gate::Cnot { control: 2, target: 1 },
                Gate::Ry { angle: 2.0 * t3, site: 1 },
                Gate::Cnot { control: 0, target: 1 },
                Gate::Cnot { control: 0, target: 2 },
                Gate::Cnot { control: 1, target: 0 },
                Gate::Cnot { control: 2, target: 0 },
            ];
            g.extend((0..3).map(|q| Gate::Rx { angle: -FRAC_PI_2, site: q }));
            Circuit::new(3, g)
        }
        _ => Err(Error::InvalidParameter(format!("cloning circuit only available for M = 2 or 3, got {m}"))),
    }
}

/// Input qubit on site 0, `|0>` elsewhere.
fn circuit_input(circuit: &Circuit, input: BlochInput) -> Result<QuantumState> {
    let mut parts = vec![QuantumState::qubit(input)];
    parts.extend(std::iter::repeat_n(QuantumState::basis(1, 0)?, circuit.n_qubits - 1));
    compose(&parts)
}

/// Ideal output state for `input`.
pub fn run_noiseless(circuit: &Circuit, input: BlochInput) -> Result<QuantumState> {
    let psi = circuit_input(circuit, input)?;
    let out = circuit.unitary() * psi.amplitudes().expect("pure input");
    Ok(QuantumState::pure_unchecked(out))
}

/// Output of the compiled circuit with every iSWAP segment evolved under
/// `-(XX + YY)` and a `sigma_z` bath on every qubit (spectators included).
/// Single-qubit rotations are instantaneous and noiseless.
pub fn run_noisy(circuit: &Circuit, rho0: &QuantumState, bath: &BathSpec, options: RedfieldOptions, tol: f64) -> Result<QuantumState> {
    let n = circuit.n_qubits;
    if rho0.n_sites() != n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: rho0.dim() });
    }
    let compiled = circuit.compile();
    let baths = vec![*bath; n];
    let mut tensors: HashMap<(usize, usize), RedfieldTensor> = HashMap::new();
    let mut rho = rho0.density_matrix();
    for g in &compiled.gates {
        match *g {
            Gate::ISwap { a, b } => {
                let key = (a.min(b), a.max(b));
                if !tensors.contains_key(&key) {
                    let t = RedfieldTensor::sigma_z(&iswap_hamiltonian(a, b, n), &baths, options)?;
                    tensors.insert(key, t);
                }
                let state = QuantumState::mixed_unchecked(rho);
                rho = evolve_master(&state, &tensors[&key], ISWAP_TIME, tol)?.state.density_matrix();
            }
            _ => {
                let u = g.unitary(n);
                rho = &u * rho * u.adjoint();
            }
        }
    }
    Ok(QuantumState::mixed_unchecked(rho))
}

/// Qubits holding clones at the end of [`pcc_circuit`].
pub fn clone_sites(m: usize) -> Vec<usize> {
    (0..m).collect()
}

/// Mean clone fidelity of the `M`-clone circuit, ideal when `bath` is `None`.
pub fn circuit_fidelity(m: usize, input: BlochInput, bath: Option<&BathSpec>, options: RedfieldOptions, tol: f64) -> Result<f64> {
    let c = pcc_circuit(m)?;
    let out = match bath {
        None => run_noiseless(&c, input)?,
        Some(b) => run_noisy(&c, &circuit_input(&c, input)?, b, options, tol)?,
    };
    Ok(site_fidelities(&out, &clone_sites(m), &QuantumState::qubit(input))?.mean)
}

/// Mean blank fidelity of the `1 -> M` XY star at its ideal optimum, with a
/// `sigma_z` bath on every site.
pub fn network_fidelity(m: usize, input: BlochInput, bath: &BathSpec, options: RedfieldOptions, tol: f64) -> Result<f64> {
    let task = CloneTask::new(Topology::Star { m }, 0.0, input);
    let (b, t) = optimal_parameters(Model::Xy, m);
    let h = task.hamiltonian(b)?;
    let tensor = RedfieldTensor::sigma_z(&h, &vec![*bath; m + 1], options)?;
    let out = evolve_master(&task.initial_state()?, &tensor, t, tol)?;
    Ok(site_fidelities(&out.state, &task.blanks()?, &task.target())?.mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub alpha: f64,
    pub f_network: f64,
    pub f_gates: f64,
    /// Network evolution time.
    pub t_network: f64,
    /// Total two-qubit segment time of the circuit.
    pub t_gates: f64,
}

/// Network and circuit fidelities for each bath strength in `alphas`
/// (equatorial input, default temperature and cutoff from `template`).
pub fn compare(m: usize, alphas: &[f64], template: &BathSpec, options: RedfieldOptions, tol: f64) -> Result<Vec<ComparisonRow>> {
    let input = BlochInput::equatorial(0.0);
    let t_network = optimal_parameters(Model::Xy, m).1;
    let t_gates = pcc_circuit(m)?.duration();
    crate::par::map(alphas, |&alpha| {
        let bath = BathSpec::new(alpha, template.inv_temperature, template.cutoff)?;
        Ok(ComparisonRow {
            alpha,
            f_network: network_fidelity(m, input, &bath, options, tol)?,
            f_gates: circuit_fidelity(m, input, Some(&bath), options, tol)?,
            t_network,
            t_gates,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// Bisection estimate of the bath strength where the curves cross.
    pub alpha_star: f64,
    /// Smallest grid strength with the network at or above the circuit.
    pub alpha_grid: f64,
    /// Grid points on either side of the crossing.
    pub bracket: (f64, f64),
    pub rows: Vec<ComparisonRow>,
}

/// First change from circuit-better to network-better along the ascending
/// grid `alphas`, refined by bisection on the fidelity difference.
pub fn crossover(m: usize, alphas: &[f64], template: &BathSpec, options: RedfieldOptions, tol: f64) -> Result<Crossover> {
    if alphas.is_empty() {
        return Err(Error::EmptyGrid("bath strength"));
    }
    let mut grid = alphas.to_vec();
    grid.sort_by(f64::total_cmp);
    let rows = compare(m, &grid, template, options, tol)?;
    // Differences below this count as ties.
    let tie = 1e-12;
    let diff = |r: &ComparisonRow| r.f_network - r.f_gates;
    let i = (1..rows.len())
        .find(|&i| diff(&rows[i - 1]) < -tie && diff(&rows[i]) >= -tie)
        .ok_or(Error::NoCrossover)?;
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    let input = BlochInput::equatorial(0.0);
    let d_at = |alpha: f64| -> Result<f64> {
        let bath = BathSpec::new(alpha, template.inv_temperature, template.cutoff)?;
        Ok(network_fidelity(m, input, &bath, options, tol)? - circuit_fidelity(m, input, Some(&bath), options, tol)?)
    };
    for _ in 0..40 {
        if hi - lo <= 1e-6 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if d_at(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossover { alpha_star: 0.5 * (lo + hi), alpha_grid: grid[i], bracket: (grid[i - 1], grid[i]), rows })
}
