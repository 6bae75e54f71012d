// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense square complex matrices plus the small set of linear-algebra
//! operations the rest of the crate needs: Kronecker products, a Hermitian
//! eigensolver, unitary propagators `exp(-i H t)`, and phase-insensitive
//! comparison of unitaries.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{NvError, Result};

/// Unitarity acceptance threshold on `max |U U^dag - I|`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Hermiticity acceptance threshold on `max |H - H^dag|` (relative to scale).
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense square matrix of complex amplitudes (or angular frequencies,
/// depending on context).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            data: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix {
            data: Array2::eye(dim),
        }
    }

    pub fn from_array(data: Array2<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(NvError::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        Ok(ComplexMatrix { data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(NvError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                data[(i, j)] = *v;
            }
        }
        Ok(ComplexMatrix { data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Diagonal matrix from the given complex entries.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.data[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[(i, j)] = v;
    }

    pub fn array(&self) -> &Array2<Complex64> {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim();
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[(j, i)] = self.data[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.data[(i, i)]).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            data: self.data.mapv(|v| v * c),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dim(rhs)?;
        Ok(ComplexMatrix {
            data: &self.data + &rhs.data,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dim(rhs)?;
        Ok(ComplexMatrix {
            data: &self.data - &rhs.data,
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dim(rhs)?;
        Ok(ComplexMatrix {
            data: self.data.dot(&rhs.data),
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if state.len() != n {
            return Err(NvError::DimensionMismatch {
                left: n,
                right: state.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                out[i] += self.data[(i, j)] * state[j];
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        self.check_same_dim(rhs)?;
        let mut m = 0.0f64;
        for (a, b) in self.data.iter().zip(rhs.data.iter()) {
            m = m.max((a - b).norm());
        }
        Ok(m)
    }

    /// `max |H - H^dag|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `max |U U^dag - I|` over all entries.
    pub fn unitary_deviation(&self) -> f64 {
        let n = self.dim();
        let prod = self.data.dot(&self.dagger().data);
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                dev = dev.max((prod[(i, j)] - expect).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }

    fn check_same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim() != rhs.dim() {
            return Err(NvError::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Returns eigenvalues in ascending order and the unitary
    /// whose columns are the matching eigenvectors.
    ///
    /// Each 2x2 pivot is phased to a real symmetric block and annihilated
    /// with the standard symmetric Schur rotation; for the register sizes
    /// used here (dim <= 9) this converges in a handful of sweeps.
    pub fn eigh(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let n = self.dim();
        let scale = self.max_abs().max(1.0);
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL * scale {
            return Err(NvError::NotHermitian { deviation: dev });
        }

        // Work on an exactly Hermitian copy so rotations stay stable.
        let mut a = self.data.clone();
        for i in 0..n {
            a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let m = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = m;
                a[(j, i)] = m.conj();
            }
        }
        let mut v: Array2<Complex64> = Array2::eye(n);

        let mut converged = false;
        for _sweep in 0..MAX_JACOBI_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= scale * 1e-15 {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= scale * 1e-300 {
                        continue;
                    }
                    let w = apq / mag; // phase factor e^{i arg(apq)}
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Rotation columns: col_p <- c*col_p - s*conj(w)*col_q,
                    // col_q <- s*col_p + c*conj(w)*col_q, applied as A <- G^dag A G.
                    let swc = s * w.conj();
                    let cwc = c * w.conj();
                    for i in 0..n {
                        if i == p || i == q {
                            continue;
                        }
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        let new_p = aip * c - aiq * swc;
                        let new_q = aip * s + aiq * cwc;
                        a[(i, p)] = new_p;
                        a[(i, q)] = new_q;
                        a[(p, i)] = new_p.conj();
                        a[(q, i)] = new_q.conj();
                    }
                    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
                    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * c - viq * swc;
                        v[(i, q)] = vip * s + viq * cwc;
                    }
                }
            }
        }
        if !converged {
            // One last check: the sweep loop may have finished the job on
            // its final pass without re-testing the off-diagonal norm.
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off > scale * 1e-15 {
                return Err(NvError::EigNoConvergence {
                    sweeps: MAX_JACOBI_SWEEPS,
                });
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vectors = Array2::zeros((n, n));
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors[(row, col)] = v[(row, src)];
            }
        }
        Ok((eigenvalues, ComplexMatrix { data: vectors }))
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a.get(i, j);
            for k in 0..nb {
                for l in 0..nb {
                    out.set(i * nb + k, j * nb + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Unitary propagator `exp(-i h t)` for Hermitian `h` in angular MHz
/// (rad/us) and `t` in us, via eigendecomposition.
pub fn matexp(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (eigenvalues, vectors) = h.eigh()?;
    let phases: Vec<Complex64> = eigenvalues
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    let d = ComplexMatrix::from_diagonal(&phases);
    vectors.matmul(&d)?.matmul(&vectors.dagger())
}

/// Global phase `e^{i phi}` aligning `v` to `u`, estimated from the largest
/// diagonal entry of `v^dag u`. Returns `None` when every diagonal entry is
/// negligible (the two unitaries are not phase-related).
pub fn relative_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Option<Complex64>> {
    if u.dim() != v.dim() {
        return Err(NvError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let m = v.dagger().matmul(u)?;
    let mut best = Complex64::new(0.0, 0.0);
    for i in 0..m.dim() {
        if m.get(i, i).norm() > best.norm() {
            best = m.get(i, i);
        }
    }
    if best.norm() < 1e-12 {
        return Ok(None);
    }
    Ok(Some(best / best.norm()))
}

/// True when `u = e^{i phi} v` for some phase, entrywise within `tol`.
pub fn equal_up_to_global_phase(u: &ComplexMatrix, v: &ComplexMatrix, tol: f64) -> Result<bool> {
    let phase = match relative_global_phase(u, v)? {
        Some(p) => p,
        None => return Ok(false),
    };
    let aligned = v.scale(phase);
    Ok(u.max_abs_diff(&aligned)? <= tol)
}

/// Pauli axes for qubit operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliAxis::X => pauli_x(),
            PauliAxis::Y => pauli_y(),
            PauliAxis::Z => pauli_z(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        }
    }
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ])
    .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap()
}

/// Single-qubit operator embedded in an `n`-qubit register; qubit 0 is the
/// most significant bit of the basis index.
pub fn embed_single(n_qubits: usize, qubit: usize, op: &ComplexMatrix) -> Result<ComplexMatrix> {
    if qubit >= n_qubits {
        return Err(NvError::QubitOutOfRange {
            index: qubit,
            n_qubits,
        });
    }
    let mut out = ComplexMatrix::identity(1);
    for q in 0..n_qubits {
        let factor = if q == qubit {
            op.clone()
        } else {
            ComplexMatrix::identity(2)
        };
        out = kron(&out, &factor);
    }
    Ok(out)
}

/// Embedded Pauli operator on one qubit of an `n`-qubit register.
pub fn pauli_on(n_qubits: usize, qubit: usize, axis: PauliAxis) -> Result<ComplexMatrix> {
    embed_single(n_qubits, qubit, &axis.matrix())
}

/// Computational basis vector `|k>` of the given dimension.
pub fn basis_state(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// Spin-1 operators in the {|+1>, |0>, |-1>} basis.
pub fn spin1_sx() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[vec![0.0, r, 0.0], vec![r, 0.0, r], vec![0.0, r, 0.0]]).unwrap()
}

pub fn spin1_sy() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_rows(&[
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -r),
            Complex64::new(0.0, 0.0),
        ],
        vec![
            Complex64::new(0.0, r),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -r),
        ],
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, r),
            Complex64::new(0.0, 0.0),
        ],
    ])
    .unwrap()
}

pub fn spin1_sz() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0],
        vec![0.0, 0.0, -1.0],
    ])
    .unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    SpinOne,
    QubitPauli,
}

/// Ordered operator basis: spin-1 {Sx, Sy, Sz} or qubit {I, X, Y, Z}.
pub struct OperatorBasis {
    pub kind: BasisKind,
    pub operators: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    pub fn spin_one() -> Self {
        OperatorBasis {
            kind: BasisKind::SpinOne,
            operators: vec![spin1_sx(), spin1_sy(), spin1_sz()],
        }
    }

    pub fn qubit_pauli() -> Self {
        OperatorBasis {
            kind: BasisKind::QubitPauli,
            operators: vec![pauli_i(), pauli_x(), pauli_y(), pauli_z()],
        }
    }
}
