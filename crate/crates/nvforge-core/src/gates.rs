// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Analytic gate compiler: universal gates assembled from single-qubit
//! rotations, ZZ phase evolution, and dipolar flip-flop blocks, each
//! verified against its ideal unitary by brute-force matrix comparison.
//!
//! A [`GateSequence`] lists primitives in matrix-product order: the
//! rightmost primitive acts on the state first, so the list reads like the
//! operator product in standard notation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matrix::{
    self, kron, matexp, pauli_on, pauli_x, pauli_y, pauli_z, ComplexMatrix, PauliAxis,
};
use crate::{NvError, Result};

/// Secular dipolar coupling of a parallel NV pair at the reference
/// separation, kHz.
pub const DIPOLAR_PARALLEL_KHZ: f64 = 101.0;
/// Measured coupling of a non-parallel pair at the reference separation, kHz.
pub const DIPOLAR_NONPARALLEL_KHZ: f64 = 42.7;
/// Separation at which the reference couplings apply, nm.
pub const DIPOLAR_REFERENCE_NM: f64 = 8.0;

/// Secular ZZ dipolar coupling strength in kHz at separation `r_nm`,
/// scaling as 1/r^3 from the reference couplings.
pub fn dipolar_strength(r_nm: f64, parallel: bool) -> Result<f64> {
    if !(r_nm > 0.0) {
        return Err(NvError::invalid("separation must be positive"));
    }
    let anchor = if parallel {
        DIPOLAR_PARALLEL_KHZ
    } else {
        DIPOLAR_NONPARALLEL_KHZ
    };
    Ok(anchor * (DIPOLAR_REFERENCE_NM / r_nm).powi(3))
}

/// Dipolar coupling between one NV pair.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DipolarCoupling {
    pub strength_khz: f64,
    pub separation_nm: f64,
    pub parallel: bool,
}

impl DipolarCoupling {
    pub fn from_separation(r_nm: f64, parallel: bool) -> Result<Self> {
        Ok(DipolarCoupling {
            strength_khz: dipolar_strength(r_nm, parallel)?,
            separation_nm: r_nm,
            parallel,
        })
    }
}

/// One hardware-level gate building block. Angles are in radians; the
/// flip-flop block is parameterized by the dimensionless tau = duration x
/// dipolar coupling, so sequences stay valid for any pair spacing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GatePrimitive {
    /// exp(-i axis angle/2) on one qubit.
    Rotation {
        qubit: usize,
        axis: PauliAxis,
        angle_rad: f64,
    },
    /// exp(+i angle Z_a Z_b) on a pair.
    ZzEvolution {
        pair: (usize, usize),
        angle_rad: f64,
    },
    /// Dipolar exchange for tau = t nu_dip; tau=2 is the full flip,
    /// tau=1 the half flip.
    FlipflopEvolution { pair: (usize, usize), tau: f64 },
    /// exp(+i angle) on the whole register.
    GlobalPhase { angle_rad: f64 },
}

fn check_pair(pair: (usize, usize), n_qubits: usize) -> Result<()> {
    for q in [pair.0, pair.1] {
        if q >= n_qubits {
            return Err(NvError::QubitOutOfRange {
                index: q,
                n_qubits,
            });
        }
    }
    if pair.0 == pair.1 {
        return Err(NvError::invalid("pair must name two distinct qubits"));
    }
    Ok(())
}

/// Hopping operator (X_a X_b + Y_a Y_b)/2: the Pauli X of the odd-parity
/// two-level subspace, zero on the even-parity states.
fn flipflop_generator(n_qubits: usize, pair: (usize, usize)) -> Result<ComplexMatrix> {
    let xx = pauli_on(n_qubits, pair.0, PauliAxis::X)?
        .matmul(&pauli_on(n_qubits, pair.1, PauliAxis::X)?)?;
    let yy = pauli_on(n_qubits, pair.0, PauliAxis::Y)?
        .matmul(&pauli_on(n_qubits, pair.1, PauliAxis::Y)?)?;
    Ok(xx.add(&yy)?.scale(Complex64::new(0.5, 0.0)))
}

impl GatePrimitive {
    /// Unitary of this primitive on the full register.
    pub fn matrix(&self, n_qubits: usize) -> Result<ComplexMatrix> {
        let dim = 1usize << n_qubits;
        match *self {
            GatePrimitive::Rotation {
                qubit,
                axis,
                angle_rad,
            } => {
                let p = pauli_on(n_qubits, qubit, axis)?;
                let c = Complex64::new((angle_rad / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(angle_rad / 2.0).sin());
                ComplexMatrix::identity(dim).scale(c).add(&p.scale(s))
            }
            GatePrimitive::ZzEvolution { pair, angle_rad } => {
                check_pair(pair, n_qubits)?;
                let zz = pauli_on(n_qubits, pair.0, PauliAxis::Z)?
                    .matmul(&pauli_on(n_qubits, pair.1, PauliAxis::Z)?)?;
                let c = Complex64::new(angle_rad.cos(), 0.0);
                let s = Complex64::new(0.0, angle_rad.sin());
                ComplexMatrix::identity(dim).scale(c).add(&zz.scale(s))
            }
            GatePrimitive::FlipflopEvolution { pair, tau } => {
                check_pair(pair, n_qubits)?;
                let g = flipflop_generator(n_qubits, pair)?;
                let g2 = g.matmul(&g)?;
                let theta = PI * tau / 4.0;
                ComplexMatrix::identity(dim)
                    .add(&g2.scale(Complex64::new(theta.cos() - 1.0, 0.0)))?
                    .add(&g.scale(Complex64::new(0.0, -theta.sin())))
            }
            GatePrimitive::GlobalPhase { angle_rad } => Ok(ComplexMatrix::identity(dim)
                .scale(Complex64::new(angle_rad.cos(), angle_rad.sin()))),
        }
    }

    /// Wall-clock duration in us given the dipolar coupling and Rabi rate.
    pub fn duration_us(&self, nu_dip_khz: f64, rabi_mhz: f64) -> f64 {
        let nu_mhz = nu_dip_khz * 1e-3;
        match *self {
            GatePrimitive::Rotation { angle_rad, .. } => angle_rad.abs() / (2.0 * PI * rabi_mhz),
            GatePrimitive::ZzEvolution { angle_rad, .. } => {
                angle_rad.abs() / (2.0 * PI * nu_mhz / 4.0)
            }
            GatePrimitive::FlipflopEvolution { tau, .. } => tau.abs() / nu_mhz,
            GatePrimitive::GlobalPhase { .. } => 0.0,
        }
    }
}

/// Ordered gate program on a fixed-size register. `primitives[0]` is the
/// leftmost factor of the operator product (the last one applied).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateSequence {
    pub n_qubits: usize,
    pub primitives: Vec<GatePrimitive>,
}

impl GateSequence {
    pub fn new(n_qubits: usize, primitives: Vec<GatePrimitive>) -> Self {
        GateSequence {
            n_qubits,
            primitives,
        }
    }

    pub fn rotation_count(&self) -> usize {
        self.primitives
            .iter()
            .filter(|p| matches!(p, GatePrimitive::Rotation { .. }))
            .count()
    }

    pub fn flipflop_count(&self) -> usize {
        self.primitives
            .iter()
            .filter(|p| matches!(p, GatePrimitive::FlipflopEvolution { .. }))
            .count()
    }
}

/// Product of the primitive unitaries in list order; the rightmost
/// primitive acts on the state first.
pub fn compile(seq: &GateSequence) -> Result<ComplexMatrix> {
    if seq.n_qubits == 0 {
        return Err(NvError::invalid("sequence needs at least one qubit"));
    }
    let mut u = ComplexMatrix::identity(1 << seq.n_qubits);
    for p in &seq.primitives {
        u = u.matmul(&p.matrix(seq.n_qubits)?)?;
    }
    Ok(u)
}

/// Total duration of a sequence in us. Rotations run at the Rabi rate, ZZ
/// phase accumulates at a quarter of the dipolar coupling, flip-flop
/// blocks last tau/nu_dip; the global phase is free.
pub fn total_gate_time(seq: &GateSequence, nu_dip_khz: f64, rabi_mhz: f64) -> Result<f64> {
    if !(nu_dip_khz > 0.0) || !(rabi_mhz > 0.0) {
        return Err(NvError::invalid("rates must be positive"));
    }
    Ok(seq
        .primitives
        .iter()
        .map(|p| p.duration_us(nu_dip_khz, rabi_mhz))
        .sum())
}

fn rot(qubit: usize, axis: PauliAxis, angle_rad: f64) -> GatePrimitive {
    GatePrimitive::Rotation {
        qubit,
        axis,
        angle_rad,
    }
}

/// Hadamard from three pi/2 rotations, Rz Rx Rz, with the phase primitive
/// that makes the compiled matrix exactly H.
pub fn hadamard_sequence(n_qubits: usize, qubit: usize) -> Result<GateSequence> {
    if qubit >= n_qubits {
        return Err(NvError::QubitOutOfRange {
            index: qubit,
            n_qubits,
        });
    }
    Ok(GateSequence::new(
        n_qubits,
        vec![
            rot(qubit, PauliAxis::Z, PI / 2.0),
            rot(qubit, PauliAxis::X, PI / 2.0),
            rot(qubit, PauliAxis::Z, PI / 2.0),
            GatePrimitive::GlobalPhase {
                angle_rad: PI / 2.0,
            },
        ],
    ))
}

/// Controlled-Z as e^{i pi/4} e^{i Z_a Z_b pi/4} e^{-i Z_a pi/4}
/// e^{-i Z_b pi/4}; all factors are diagonal and the product is exactly
/// diag(1, 1, 1, -1).
pub fn cz_sequence(n_qubits: usize, pair: (usize, usize)) -> Result<GateSequence> {
    check_pair(pair, n_qubits)?;
    Ok(GateSequence::new(
        n_qubits,
        vec![
            GatePrimitive::GlobalPhase {
                angle_rad: PI / 4.0,
            },
            GatePrimitive::ZzEvolution {
                pair,
                angle_rad: PI / 4.0,
            },
            rot(pair.0, PauliAxis::Z, PI / 2.0),
            rot(pair.1, PauliAxis::Z, PI / 2.0),
        ],
    ))
}

fn concat(n_qubits: usize, parts: Vec<GateSequence>) -> GateSequence {
    let mut primitives = Vec::new();
    for part in parts {
        primitives.extend(part.primitives);
    }
    GateSequence::new(n_qubits, primitives)
}

/// CNOT as H_target CZ H_target; compiles exactly to the CNOT permutation.
pub fn cnot_from_cz(n_qubits: usize, control: usize, target: usize) -> Result<GateSequence> {
    check_pair((control, target), n_qubits)?;
    Ok(concat(
        n_qubits,
        vec![
            hadamard_sequence(n_qubits, target)?,
            cz_sequence(n_qubits, (control, target))?,
            hadamard_sequence(n_qubits, target)?,
        ],
    ))
}

/// CNOT from two half-exchange flip-flop blocks and seven rotations:
///
///   CNOT = e^{-i pi/4} Ry_c(pi/2) Rz_c(pi) V Rx_c(pi) V
///          Rx_c(pi) Ry_c(pi/2) Rz_c(pi/2) Rx_t(-pi/2),  V = flip-flop(tau=1)
///
/// derived from the echo identity V Rx_c(pi) V Rx_c(pi) = -e^{-i pi/4 XX}.
pub fn cnot_from_sqrtswap(n_qubits: usize, control: usize, target: usize) -> Result<GateSequence> {
    check_pair((control, target), n_qubits)?;
    let pair = (control, target);
    let v = GatePrimitive::FlipflopEvolution { pair, tau: 1.0 };
    Ok(GateSequence::new(
        n_qubits,
        vec![
            rot(control, PauliAxis::Y, PI / 2.0),
            rot(control, PauliAxis::Z, PI),
            v,
            rot(control, PauliAxis::X, PI),
            v,
            rot(control, PauliAxis::X, PI),
            rot(control, PauliAxis::Y, PI / 2.0),
            rot(control, PauliAxis::Z, PI / 2.0),
            rot(target, PauliAxis::X, -PI / 2.0),
            GatePrimitive::GlobalPhase {
                angle_rad: -PI / 4.0,
            },
        ],
    ))
}

/// Circuit-level gate in a named construction, before expansion into
/// hardware primitives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogicalGate {
    Hadamard { qubit: usize },
    Cnot { control: usize, target: usize },
    ZRotation { qubit: usize, angle_rad: f64 },
}

/// Counts of circuit-level gates: CNOT-class two-qubit blocks and
/// single-qubit gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCensus {
    pub cnot: usize,
    pub single: usize,
}

pub fn census(gates: &[LogicalGate]) -> GateCensus {
    let mut c = GateCensus::default();
    for g in gates {
        match g {
            LogicalGate::Cnot { .. } => c.cnot += 1,
            _ => c.single += 1,
        }
    }
    c
}

/// Expand a circuit-level gate list (in matrix-product order) into
/// hardware primitives, with an overall phase primitive appended so the
/// compiled unitary matches the ideal construction exactly.
pub fn expand_logical(
    n_qubits: usize,
    gates: &[LogicalGate],
    phase_rad: f64,
) -> Result<GateSequence> {
    let mut parts = Vec::new();
    for g in gates {
        match *g {
            LogicalGate::Hadamard { qubit } => parts.push(hadamard_sequence(n_qubits, qubit)?),
            LogicalGate::Cnot { control, target } => {
                parts.push(cnot_from_cz(n_qubits, control, target)?)
            }
            LogicalGate::ZRotation { qubit, angle_rad } => parts.push(GateSequence::new(
                n_qubits,
                vec![rot(qubit, PauliAxis::Z, angle_rad)],
            )),
        }
    }
    if phase_rad != 0.0 {
        parts.push(GateSequence::new(
            n_qubits,
            vec![GatePrimitive::GlobalPhase {
                angle_rad: phase_rad,
            }],
        ));
    }
    Ok(concat(n_qubits, parts))
}

/// Toffoli circuit in matrix-product order: 6 CNOTs and 10 single-qubit
/// gates (2 Hadamards, 8 Z rotations).
pub fn toffoli_logical() -> Vec<LogicalGate> {
    let h = |qubit| LogicalGate::Hadamard { qubit };
    let c = |control, target| LogicalGate::Cnot { control, target };
    let rz = |qubit, angle_rad| LogicalGate::ZRotation { qubit, angle_rad };
    let q = PI / 4.0;
    vec![
        rz(0, q),
        rz(1, 2.0 * q),
        c(0, 1),
        rz(1, -q),
        c(0, 1),
        h(2),
        rz(1, -q),
        rz(2, q),
        c(0, 2),
        rz(2, -q),
        c(1, 2),
        rz(2, q),
        c(0, 2),
        rz(2, -q),
        c(1, 2),
        h(2),
    ]
}

/// Three-qubit Toffoli expanded into primitives; compiles exactly to the
/// |110> <-> |111> permutation.
pub fn toffoli_sequence() -> Result<GateSequence> {
    expand_logical(3, &toffoli_logical(), PI / 8.0)
}

pub fn hadamard_matrix() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]).expect("static")
}

pub fn cz_matrix() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ])
}

/// CNOT permutation on `n_qubits`, qubit 0 most significant.
pub fn cnot_matrix(n_qubits: usize, control: usize, target: usize) -> Result<ComplexMatrix> {
    check_pair((control, target), n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut m = ComplexMatrix::zeros(dim);
    for b in 0..dim {
        let cbit = (b >> (n_qubits - 1 - control)) & 1;
        let out = if cbit == 1 {
            b ^ (1 << (n_qubits - 1 - target))
        } else {
            b
        };
        m.set(out, b, Complex64::new(1.0, 0.0));
    }
    Ok(m)
}

pub fn swap_matrix() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .expect("static")
}

pub fn toffoli_matrix() -> ComplexMatrix {
    let dim = 8;
    let mut m = ComplexMatrix::zeros(dim);
    for b in 0..dim {
        let out = if b == 6 { 7 } else if b == 7 { 6 } else { b };
        m.set(out, b, Complex64::new(1.0, 0.0));
    }
    m
}

/// Exact two-spin flip-flop propagator e^{-i H t} with
/// H = (pi nu/4) (XX+YY)/2 + pi O1 Z1 + pi O2 Z2 in rad/us. The hopping
/// normalization puts the full exchange at t = 2/nu and the half exchange
/// at t = 1/nu.
pub fn flipflop_evolution(
    nu_dip_khz: f64,
    duration_us: f64,
    omega1_khz: f64,
    omega2_khz: f64,
) -> Result<ComplexMatrix> {
    if !(duration_us >= 0.0) {
        return Err(NvError::invalid("duration must be non-negative"));
    }
    let nu_mhz = nu_dip_khz * 1e-3;
    let xx = kron(&pauli_x(), &pauli_x());
    let yy = kron(&pauli_y(), &pauli_y());
    let z1 = kron(&pauli_z(), &matrix::pauli_i());
    let z2 = kron(&matrix::pauli_i(), &pauli_z());
    let h = xx
        .add(&yy)?
        .scale(Complex64::new(PI * nu_mhz / 8.0, 0.0))
        .add(&z1.scale(Complex64::new(PI * omega1_khz * 1e-3, 0.0)))?
        .add(&z2.scale(Complex64::new(PI * omega2_khz * 1e-3, 0.0)))?;
    matexp(&h, duration_us)
}

/// A verified construction bundled with its ideal unitary and circuit
/// census, ready for reporting.
pub struct NamedConstruction {
    pub name: &'static str,
    pub sequence: GateSequence,
    pub ideal: ComplexMatrix,
    pub census: GateCensus,
}

/// All analytic constructions the workbench verifies and reports on.
pub fn named_constructions() -> Result<Vec<NamedConstruction>> {
    Ok(vec![
        NamedConstruction {
            name: "hadamard",
            sequence: hadamard_sequence(1, 0)?,
            ideal: hadamard_matrix(),
            census: GateCensus { cnot: 0, single: 1 },
        },
        NamedConstruction {
            name: "cz",
            sequence: cz_sequence(2, (0, 1))?,
            ideal: cz_matrix(),
            census: GateCensus { cnot: 1, single: 0 },
        },
        NamedConstruction {
            name: "cnot_from_cz",
            sequence: cnot_from_cz(2, 0, 1)?,
            ideal: cnot_matrix(2, 0, 1)?,
            census: GateCensus { cnot: 1, single: 0 },
        },
        NamedConstruction {
            name: "cnot_from_sqrtswap",
            sequence: cnot_from_sqrtswap(2, 0, 1)?,
            ideal: cnot_matrix(2, 0, 1)?,
            census: GateCensus { cnot: 1, single: 0 },
        },
        NamedConstruction {
            name: "toffoli",
            sequence: toffoli_sequence()?,
            ideal: toffoli_matrix(),
            census: census(&toffoli_logical()),
        },
    ])
}
