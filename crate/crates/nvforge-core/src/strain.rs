// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Strain encoding of NV positions: Euler-Bernoulli bending strain of the
//! diamond cantilever, rotation of the strain tensor into each NV frame,
//! and the strain-shifted optical transition doublet Ex/Ey.
//!
//! Cantilever axes: x across the width, y through the thickness, z along
//! the beam; the beam's long axis is the [-1-1-1] lattice direction, so the
//! cantilever frame coincides with the [-1-1-1] NV frame.

use serde::{Deserialize, Serialize};

use crate::orientation::NvOrientation;
use crate::{NvError, Result};

/// Poisson ratio of diamond.
pub const POISSON_RATIO_DIAMOND: f64 = 0.11;
/// Young's modulus of diamond, GPa.
pub const YOUNGS_MODULUS_DIAMOND_GPA: f64 = 1100.0;
/// Optical transition linewidth used for channel counting, MHz.
pub const OPTICAL_LINEWIDTH_MHZ: f64 = 13.0;

/// Orbital strain-coupling constants and intrinsic offsets of the excited
/// state. The lambda values are PHz per unit strain; shifts evaluate in GHz.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StrainCouplings {
    pub lambda_a1_phz: f64,
    pub lambda_a1p_phz: f64,
    pub lambda_e_phz: f64,
    pub lambda_ep_phz: f64,
    pub df_e1_ghz: f64,
    pub df_e2_ghz: f64,
    pub f_zpl_thz: f64,
}

impl Default for StrainCouplings {
    fn default() -> Self {
        StrainCouplings {
            lambda_a1_phz: -1.95,
            lambda_a1p_phz: 2.16,
            lambda_e_phz: -0.85,
            lambda_ep_phz: 0.02,
            df_e1_ghz: 6.3,
            df_e2_ghz: 0.15,
            f_zpl_thz: 470.6,
        }
    }
}

/// Clamped-free beam loaded at the tip. Lengths in um, force in N, modulus
/// in GPa.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CantileverGeometry {
    pub length_um: f64,
    pub width_um: f64,
    pub height_um: f64,
    pub force_n: f64,
    pub youngs_modulus_gpa: f64,
    pub poisson: f64,
}

impl Default for CantileverGeometry {
    fn default() -> Self {
        CantileverGeometry {
            length_um: 5.0,
            width_um: 0.5,
            height_um: 0.25,
            force_n: 0.0,
            youngs_modulus_gpa: YOUNGS_MODULUS_DIAMOND_GPA,
            poisson: POISSON_RATIO_DIAMOND,
        }
    }
}

impl CantileverGeometry {
    fn validate(&self) -> Result<()> {
        if !(self.length_um > 0.0)
            || !(self.width_um > 0.0)
            || !(self.height_um > 0.0)
            || !(self.youngs_modulus_gpa > 0.0)
            || !(self.poisson > 0.0)
        {
            return Err(NvError::invalid("cantilever dimensions must be positive"));
        }
        Ok(())
    }

    /// Second moment of area w h^3 / 12, um^4.
    pub fn second_moment_um4(&self) -> f64 {
        self.width_um * self.height_um.powi(3) / 12.0
    }

    /// Axial strain at distance `z_um` from the clamp and `x_um` from the
    /// neutral surface: eps = 1e3 F (L - z) x / (E I). The 1e3 converts
    /// N/um^2 of bending stress into GPa.
    pub fn axial_strain(&self, z_um: f64, x_um: f64) -> Result<f64> {
        self.validate()?;
        if z_um < 0.0 || z_um > self.length_um {
            return Err(NvError::invalid(format!(
                "z = {z_um} um lies outside the beam (length {} um)",
                self.length_um
            )));
        }
        if x_um.abs() > self.height_um / 2.0 {
            return Err(NvError::invalid(format!(
                "x = {x_um} um lies outside the beam (height {} um)",
                self.height_um
            )));
        }
        Ok(1e3 * self.force_n * (self.length_um - z_um) * x_um
            / (self.youngs_modulus_gpa * self.second_moment_um4()))
    }

    /// Largest axial strain, reached at the clamp on the tensile surface.
    pub fn max_strain(&self) -> f64 {
        1e3 * self.force_n * self.length_um * (self.height_um / 2.0)
            / (self.youngs_modulus_gpa * self.second_moment_um4())
    }

    /// Tip force in N producing the requested maximum strain.
    pub fn force_for_max_strain(&self, strain: f64) -> Result<f64> {
        self.validate()?;
        Ok(strain * self.youngs_modulus_gpa * self.second_moment_um4()
            / (1e3 * self.length_um * (self.height_um / 2.0)))
    }
}

/// Coordinate frame a strain tensor is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Cantilever,
    Nv(NvOrientation),
}

/// 3x3 symmetric strain tensor tagged with its frame.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StrainTensor {
    pub frame: Frame,
    components: [[f64; 3]; 3],
}

impl StrainTensor {
    pub fn new(frame: Frame, components: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if (components[i][j] - components[j][i]).abs() > 1e-15 {
                    return Err(NvError::invalid("strain tensor must be symmetric"));
                }
            }
        }
        Ok(StrainTensor { frame, components })
    }

    pub fn zero(frame: Frame) -> Self {
        StrainTensor {
            frame,
            components: [[0.0; 3]; 3],
        }
    }

    /// Uniaxial tension eps along z with Poisson contraction in x and y.
    pub fn uniaxial_z(frame: Frame, eps: f64, poisson: f64) -> Self {
        let mut c = [[0.0; 3]; 3];
        c[0][0] = -poisson * eps;
        c[1][1] = -poisson * eps;
        c[2][2] = eps;
        StrainTensor {
            frame,
            components: c,
        }
    }

    pub fn component(&self, i: usize, j: usize) -> f64 {
        self.components[i][j]
    }

    pub fn components(&self) -> [[f64; 3]; 3] {
        self.components
    }

    pub fn trace(&self) -> f64 {
        self.components[0][0] + self.components[1][1] + self.components[2][2]
    }

    pub fn max_abs_diff(&self, other: &StrainTensor) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.components[i][j] - other.components[i][j]).abs());
            }
        }
        m
    }
}

/// Bending strain tensor at a point in the beam, in the cantilever frame:
/// diagonal (-nu eps, -nu eps, eps) under the uniaxial-stress assumption.
pub fn cantilever_strain(geom: &CantileverGeometry, z_um: f64, x_um: f64) -> Result<StrainTensor> {
    let eps = geom.axial_strain(z_um, x_um)?;
    Ok(StrainTensor::uniaxial_z(
        Frame::Cantilever,
        eps,
        geom.poisson,
    ))
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Carbon-bond direction whose perpendicular projection fixes the x' axis
/// of each NV frame. The aligned axis borrows [-111]; the tilted axes cycle
/// among themselves, which keeps the construction equivariant under the
/// lattice's three-fold rotation about the field axis and is what makes the
/// three tilted orientations spectrally degenerate.
fn bond_partner(orientation: NvOrientation) -> NvOrientation {
    match orientation {
        NvOrientation::NegNegNeg => NvOrientation::NegPosPos,
        NvOrientation::NegPosPos => NvOrientation::PosNegPos,
        NvOrientation::PosNegPos => NvOrientation::PosPosNeg,
        NvOrientation::PosPosNeg => NvOrientation::NegPosPos,
    }
}

/// Right-handed orthonormal triad (x', y', z') of the NV frame, expressed
/// in cantilever coordinates. z' is the NV axis; x' is the projection of
/// the partner carbon bond perpendicular to z'.
pub fn nv_frame_axes(orientation: NvOrientation) -> [[f64; 3]; 3] {
    let z = normalize(orientation.axis());
    let bond = bond_partner(orientation).axis();
    let dot = bond[0] * z[0] + bond[1] * z[1] + bond[2] * z[2];
    let x = normalize([
        bond[0] - dot * z[0],
        bond[1] - dot * z[1],
        bond[2] - dot * z[2],
    ]);
    let y = cross(z, x);
    [x, y, z]
}

/// Rotation matrix R with rows x', y', z' of the target NV frame; tensor
/// components transform as R e R^T. The cantilever frame is the [-1-1-1]
/// NV frame, so that orientation gets the identity.
pub fn nv_frame_rotation(orientation: NvOrientation) -> [[f64; 3]; 3] {
    let target = nv_frame_axes(orientation);
    let source = nv_frame_axes(NvOrientation::NegNegNeg);
    // R[i][j] = target_axis_i . source_axis_j
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| target[i][k] * source[j][k]).sum();
        }
    }
    r
}

/// Re-express a cantilever-frame strain tensor in the frame of the given
/// NV orientation.
pub fn transform_to_nv_frame(e: &StrainTensor, orientation: NvOrientation) -> Result<StrainTensor> {
    if e.frame != Frame::Cantilever {
        return Err(NvError::invalid(
            "transform_to_nv_frame expects a cantilever-frame tensor",
        ));
    }
    let r = nv_frame_rotation(orientation);
    let c = e.components;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut sum = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    sum += r[i][k] * c[k][l] * r[j][l];
                }
            }
            out[i][j] = sum;
        }
    }
    // Symmetrize away rounding in the congruence product.
    for i in 0..3 {
        for j in (i + 1)..3 {
            let m = 0.5 * (out[i][j] + out[j][i]);
            out[i][j] = m;
            out[j][i] = m;
        }
    }
    StrainTensor::new(Frame::Nv(orientation), out)
}

/// Frequency shifts of the excited-state orbitals grouped by symmetry, GHz.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CouplingShifts {
    pub g_a1_ghz: f64,
    pub g_e1_ghz: f64,
    pub g_e2_ghz: f64,
}

/// Linear strain couplings of the excited state evaluated on an NV-frame
/// tensor. PHz constants times dimensionless strain give shifts in units of
/// 1e6 GHz.
pub fn coupling_shifts(e: &StrainTensor, c: &StrainCouplings) -> Result<CouplingShifts> {
    if !matches!(e.frame, Frame::Nv(_)) {
        return Err(NvError::invalid(
            "coupling_shifts expects an NV-frame tensor",
        ));
    }
    let phz_to_ghz = 1e6;
    let m = &e.components;
    let g_a1 = c.lambda_a1_phz * m[2][2] + c.lambda_a1p_phz * (m[0][0] + m[1][1]);
    let g_e1 = c.lambda_e_phz * (m[1][1] - m[0][0]) + c.lambda_ep_phz * (m[0][2] + m[2][0]);
    let g_e2 = c.lambda_e_phz * (m[0][1] + m[1][0]) + c.lambda_ep_phz * (m[1][2] + m[2][1]);
    Ok(CouplingShifts {
        g_a1_ghz: g_a1 * phz_to_ghz,
        g_e1_ghz: g_e1 * phz_to_ghz,
        g_e2_ghz: g_e2 * phz_to_ghz,
    })
}

/// Detunings of the two optical transitions from the zero-phonon line, GHz.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OpticalDetunings {
    pub ex_ghz: f64,
    pub ey_ghz: f64,
}

/// Ex/Ey detunings: the A1 shift moves both lines together, the E shifts
/// combine with the intrinsic offsets to split them.
pub fn optical_transitions(g: &CouplingShifts, c: &StrainCouplings) -> OpticalDetunings {
    let split = ((g.g_e1_ghz + c.df_e1_ghz).powi(2) + (g.g_e2_ghz + c.df_e2_ghz).powi(2)).sqrt();
    OpticalDetunings {
        ex_ghz: g.g_a1_ghz + split,
        ey_ghz: g.g_a1_ghz - split,
    }
}

/// Absolute transition frequency in THz from a detuning in GHz.
pub fn absolute_frequency_thz(detuning_ghz: f64, c: &StrainCouplings) -> f64 {
    c.f_zpl_thz + detuning_ghz * 1e-3
}

/// Ex detuning for a uniaxial cantilever strain seen by the given
/// orientation.
pub fn ex_detuning_at_strain(
    strain: f64,
    orientation: NvOrientation,
    c: &StrainCouplings,
    poisson: f64,
) -> Result<OpticalDetunings> {
    let e = StrainTensor::uniaxial_z(Frame::Cantilever, strain, poisson);
    let nv = transform_to_nv_frame(&e, orientation)?;
    let g = coupling_shifts(&nv, c)?;
    Ok(optical_transitions(&g, c))
}

/// Number of linewidth-spaced optical channels between zero strain and
/// `strain_max`, counted on the Ex branch.
pub fn strain_addressable_count(
    strain_max: f64,
    linewidth_mhz: f64,
    orientation: NvOrientation,
    c: &StrainCouplings,
    poisson: f64,
) -> Result<u64> {
    if !(strain_max >= 0.0) {
        return Err(NvError::invalid("strain must be non-negative"));
    }
    if !(linewidth_mhz > 0.0) {
        return Err(NvError::invalid("linewidth must be positive"));
    }
    let at_strain = ex_detuning_at_strain(strain_max, orientation, c, poisson)?;
    let at_zero = ex_detuning_at_strain(0.0, orientation, c, poisson)?;
    let span_mhz = (at_strain.ex_ghz - at_zero.ex_ghz).abs() * 1e3;
    Ok((span_mhz / linewidth_mhz).floor() as u64)
}

/// One row of the strain-scan output: detuning of one branch for one
/// orientation at one strain value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrainScanRow {
    pub strain: f64,
    pub orientation: String,
    pub branch: String,
    pub detuning_ghz: f64,
}

/// Ex/Ey curves for all four orientations over a uniform strain grid.
pub fn scan_rows(
    strain_max: f64,
    n_points: usize,
    c: &StrainCouplings,
    poisson: f64,
) -> Result<Vec<StrainScanRow>> {
    if strain_max < 0.0 {
        return Err(NvError::invalid("strain range must be non-negative"));
    }
    if n_points == 0 {
        return Err(NvError::invalid("need at least one scan point"));
    }
    let mut rows = Vec::new();
    for i in 0..n_points {
        let strain = if n_points == 1 {
            strain_max
        } else {
            strain_max * i as f64 / (n_points - 1) as f64
        };
        for orientation in NvOrientation::ALL {
            let d = ex_detuning_at_strain(strain, orientation, c, poisson)?;
            for (branch, value) in [("Ex", d.ex_ghz), ("Ey", d.ey_ghz)] {
                rows.push(StrainScanRow {
                    strain,
                    orientation: orientation.label().to_string(),
                    branch: branch.to_string(),
                    detuning_ghz: value,
                });
            }
        }
    }
    Ok(rows)
}
