// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Ground-state spin Hamiltonian of a single NV center in a magnetic field,
//! ODMR transition frequencies for all four orientations plus the
//! substitutional-nitrogen impurity line, and detection of field windows
//! free of cross relaxation.
//!
//! Field direction is the cantilever long axis; frequencies are plain MHz
//! (not angular), fields in gauss.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matrix::ComplexMatrix;
use crate::orientation::NvOrientation;
use crate::{NvError, Result};

/// Zero-field splitting between m_s=0 and m_s=+-1, MHz.
pub const DEFAULT_D_MHZ: f64 = 2880.0;
/// Magnitude of the electron gyromagnetic ratio, MHz per gauss.
pub const DEFAULT_GYROMAGNETIC_MHZ_PER_G: f64 = 2.8;
/// Narrowed ODMR linewidth used for channel counting, MHz.
pub const DEFAULT_ODMR_LINEWIDTH_MHZ: f64 = 0.2;

/// Field-interval boundaries are refined by bisection to this resolution.
pub const WINDOW_REFINE_GAUSS: f64 = 0.01;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ZeemanParameters {
    pub d_mhz: f64,
    pub gyromagnetic_mhz_per_g: f64,
}

impl Default for ZeemanParameters {
    fn default() -> Self {
        ZeemanParameters {
            d_mhz: DEFAULT_D_MHZ,
            gyromagnetic_mhz_per_g: DEFAULT_GYROMAGNETIC_MHZ_PER_G,
        }
    }
}

impl ZeemanParameters {
    fn validate(&self) -> Result<()> {
        if !(self.d_mhz > 0.0) || !(self.gyromagnetic_mhz_per_g > 0.0) {
            return Err(NvError::invalid(
                "Zeeman parameters must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// One NV center: orientation (fixing the polar angle to the field),
/// azimuthal angle, and position along the cantilever.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NvConfiguration {
    pub orientation: NvOrientation,
    pub phi_deg: f64,
    pub position_um: f64,
}

impl NvConfiguration {
    pub fn new(orientation: NvOrientation) -> Self {
        NvConfiguration {
            orientation,
            phi_deg: 0.0,
            position_um: 0.0,
        }
    }

    pub fn theta_deg(&self) -> f64 {
        self.orientation.theta_deg()
    }
}

/// 3x3 ground-state Hamiltonian in the {|+1>, |0>, |-1>} basis, MHz.
///
/// Diagonal: D + delta cos(theta), 0, D - delta cos(theta). The magnetic
/// field couples |0> to |+-1> through -delta sin(theta) e^{-+i phi}/sqrt(2)
/// when the NV axis is tilted away from the field.
pub fn nv_hamiltonian(
    b_gauss: f64,
    cfg: &NvConfiguration,
    p: &ZeemanParameters,
) -> Result<ComplexMatrix> {
    if b_gauss < 0.0 {
        return Err(NvError::invalid("magnetic field must be non-negative"));
    }
    p.validate()?;
    let delta = p.gyromagnetic_mhz_per_g * b_gauss;
    let theta = cfg.orientation.theta_rad();
    let phi = cfg.phi_deg.to_radians();
    let diag_shift = delta * theta.cos();
    let coupling = -delta * theta.sin() / std::f64::consts::SQRT_2;
    let off = Complex64::from_polar(1.0, -phi) * coupling;

    let mut h = ComplexMatrix::zeros(3);
    h.set(0, 0, Complex64::new(p.d_mhz + diag_shift, 0.0));
    h.set(2, 2, Complex64::new(p.d_mhz - diag_shift, 0.0));
    h.set(0, 1, off);
    h.set(1, 0, off.conj());
    h.set(1, 2, off);
    h.set(2, 1, off.conj());
    Ok(h)
}

/// Transition frequencies labeled by the zero-field ancestry of the
/// eigenstates, MHz.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TransitionFrequencies {
    pub zero_to_plus_mhz: f64,
    pub zero_to_minus_mhz: f64,
    pub plus_to_minus_mhz: f64,
}

/// Eigenvalue differences of the Hamiltonian, with eigenstates matched to
/// |+1>, |0>, |-1> by the permutation maximizing total squared overlap with
/// the zero-field basis. The per-field assignment has dominant overlaps of
/// at least 0.7 for fields up to 1000 G, so no continuity tracking is
/// needed.
pub fn transition_frequencies(
    b_gauss: f64,
    cfg: &NvConfiguration,
    p: &ZeemanParameters,
) -> Result<TransitionFrequencies> {
    let h = nv_hamiltonian(b_gauss, cfg, p)?;
    let (vals, vecs) = h.eigh()?;

    // Basis rows: 0 -> |+1>, 1 -> |0>, 2 -> |-1>. perm[slot] = eigencolumn.
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best = PERMS[0];
    let mut best_score = -1.0f64;
    for perm in PERMS {
        let mut score = 0.0;
        for (slot, &col) in perm.iter().enumerate() {
            score += vecs.get(slot, col).norm_sqr();
        }
        if score > best_score {
            best_score = score;
            best = perm;
        }
    }
    let e_plus = vals[best[0]];
    let e_zero = vals[best[1]];
    let e_minus = vals[best[2]];
    Ok(TransitionFrequencies {
        zero_to_plus_mhz: (e_plus - e_zero).abs(),
        zero_to_minus_mhz: (e_minus - e_zero).abs(),
        plus_to_minus_mhz: (e_plus - e_minus).abs(),
    })
}

/// Zeeman line of the substitutional-nitrogen (P1) impurity, a bare
/// spin-1/2 transition at gyromagnetic * B.
pub fn p1_transition(b_gauss: f64, p: &ZeemanParameters) -> Result<f64> {
    if b_gauss < 0.0 {
        return Err(NvError::invalid("magnetic field must be non-negative"));
    }
    p.validate()?;
    Ok(p.gyromagnetic_mhz_per_g * b_gauss)
}

/// A cross-relaxation-free interval of applied field, reported with the
/// ODMR frequency span the |0> -> |-1> aligned transition sweeps across it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FieldWindow {
    pub b_min: f64,
    pub b_max: f64,
    pub span_mhz: f64,
}

/// The five spectrally active curves used for window detection: the ODMR
/// pair of the aligned orientation, the ODMR pair of the tilted
/// orientations (all three are degenerate), and the P1 impurity line.
/// Double-quantum |+1> <-> |-1> transitions are not microwave-addressable
/// at these fields and are excluded.
fn window_curves(b: f64, p: &ZeemanParameters) -> Result<[f64; 5]> {
    let aligned = NvConfiguration::new(NvOrientation::NegNegNeg);
    let tilted = NvConfiguration::new(NvOrientation::NegPosPos);
    let a = transition_frequencies(b, &aligned, p)?;
    let t = transition_frequencies(b, &tilted, p)?;
    Ok([
        a.zero_to_plus_mhz,
        a.zero_to_minus_mhz,
        t.zero_to_plus_mhz,
        t.zero_to_minus_mhz,
        p1_transition(b, p)?,
    ])
}

/// Smallest pairwise distance between the tracked curves minus the guard.
fn separation_margin(b: f64, guard_mhz: f64, p: &ZeemanParameters) -> Result<f64> {
    let c = window_curves(b, p)?;
    let mut min_sep = f64::INFINITY;
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            min_sep = min_sep.min((c[i] - c[j]).abs());
        }
    }
    Ok(min_sep - guard_mhz)
}

/// Maximal sub-intervals of `[b_min, b_max]` where every pair of tracked
/// transition curves stays more than `guard_mhz` apart and the addressing
/// curves (the aligned ODMR pair and the P1 line) are monotonic in the
/// field. Boundaries against excluded regions are bisection-refined to
/// 0.01 G; returns an empty list when no field qualifies.
pub fn cross_relaxation_windows(
    b_min: f64,
    b_max: f64,
    step_gauss: f64,
    guard_mhz: f64,
    p: &ZeemanParameters,
) -> Result<Vec<FieldWindow>> {
    if b_min < 0.0 || b_max <= b_min {
        return Err(NvError::invalid(format!(
            "invalid field range [{b_min}, {b_max}]"
        )));
    }
    if !(step_gauss > 0.0) || !(guard_mhz > 0.0) {
        return Err(NvError::invalid("step and guard must be positive"));
    }

    let mut grid = Vec::new();
    let mut b = b_min;
    while b < b_max {
        grid.push(b);
        b += step_gauss;
    }
    grid.push(b_max);

    let margins: Vec<f64> = grid
        .iter()
        .map(|&b| separation_margin(b, guard_mhz, p))
        .collect::<Result<_>>()?;
    let good: Vec<bool> = margins.iter().map(|&m| m > 0.0).collect();

    // Monotonicity of the addressing curves between neighboring grid
    // points: |0> -> |+1> and P1 rise, |0> -> |-1> falls.
    let aligned = NvConfiguration::new(NvOrientation::NegNegNeg);
    let mono_link = |i: usize| -> Result<bool> {
        let lo = transition_frequencies(grid[i], &aligned, p)?;
        let hi = transition_frequencies(grid[i + 1], &aligned, p)?;
        let p1_lo = p1_transition(grid[i], p)?;
        let p1_hi = p1_transition(grid[i + 1], p)?;
        Ok(hi.zero_to_plus_mhz >= lo.zero_to_plus_mhz
            && hi.zero_to_minus_mhz <= lo.zero_to_minus_mhz
            && p1_hi >= p1_lo)
    };

    let refine = |mut lo: f64, mut hi: f64| -> Result<f64> {
        // lo fails the margin test, hi passes; shrink towards the boundary.
        while hi - lo > WINDOW_REFINE_GAUSS {
            let mid = 0.5 * (lo + hi);
            if separation_margin(mid, guard_mhz, p)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    };
    let refine_down = |mut lo: f64, mut hi: f64| -> Result<f64> {
        // lo passes, hi fails.
        while hi - lo > WINDOW_REFINE_GAUSS {
            let mid = 0.5 * (lo + hi);
            if separation_margin(mid, guard_mhz, p)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    };

    let mut windows = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if !good[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < grid.len() && good[i + 1] && mono_link(i)? {
            i += 1;
        }
        let end = i;
        let left = if start == 0 {
            grid[0]
        } else {
            refine(grid[start - 1], grid[start])?
        };
        let right = if end + 1 == grid.len() || !good[end + 1] {
            if end + 1 == grid.len() {
                grid[end]
            } else {
                refine_down(grid[end], grid[end + 1])?
            }
        } else {
            // Run ended on a monotonicity break between two clear points;
            // the boundary is reported at grid resolution.
            grid[end]
        };
        let f_left = transition_frequencies(left, &aligned, p)?.zero_to_minus_mhz;
        let f_right = transition_frequencies(right, &aligned, p)?.zero_to_minus_mhz;
        windows.push(FieldWindow {
            b_min: left,
            b_max: right,
            span_mhz: (f_right - f_left).abs(),
        });
        i += 1;
    }
    Ok(windows)
}

/// Number of linewidth-spaced control channels fitting in a frequency span.
pub fn addressable_count(frequency_span_mhz: f64, linewidth_mhz: f64) -> Result<u64> {
    if !(linewidth_mhz > 0.0) {
        return Err(NvError::invalid("linewidth must be positive"));
    }
    if frequency_span_mhz < 0.0 {
        return Err(NvError::invalid("frequency span must be non-negative"));
    }
    Ok((frequency_span_mhz / linewidth_mhz).floor() as u64)
}

/// One row of the transition-curve scan emitted by the command-line tool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub b_gauss: f64,
    pub orientation: String,
    pub transition_label: String,
    pub frequency_mhz: f64,
}

/// Transition curves for all four NV orientations plus the P1 line on a
/// uniform field grid, in a deterministic row order.
pub fn scan_rows(
    b_min: f64,
    b_max: f64,
    step_gauss: f64,
    p: &ZeemanParameters,
) -> Result<Vec<ScanRow>> {
    if b_min < 0.0 || b_max < b_min || !(step_gauss > 0.0) {
        return Err(NvError::invalid("invalid scan range"));
    }
    let mut rows = Vec::new();
    let mut b = b_min;
    loop {
        for orientation in NvOrientation::ALL {
            let cfg = NvConfiguration::new(orientation);
            let f = transition_frequencies(b, &cfg, p)?;
            for (label, value) in [
                ("0_to_plus1", f.zero_to_plus_mhz),
                ("0_to_minus1", f.zero_to_minus_mhz),
                ("plus1_to_minus1", f.plus_to_minus_mhz),
            ] {
                rows.push(ScanRow {
                    b_gauss: b,
                    orientation: orientation.label().to_string(),
                    transition_label: label.to_string(),
                    frequency_mhz: value,
                });
            }
        }
        rows.push(ScanRow {
            b_gauss: b,
            orientation: "P1".to_string(),
            transition_label: "minus_half_to_plus_half".to_string(),
            frequency_mhz: p1_transition(b, p)?,
        });
        if b >= b_max {
            break;
        }
        b = (b + step_gauss).min(b_max);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ZeemanParameters {
        ZeemanParameters::default()
    }

    fn aligned() -> NvConfiguration {
        NvConfiguration::new(NvOrientation::NegNegNeg)
    }

    fn tilted() -> NvConfiguration {
        NvConfiguration::new(NvOrientation::NegPosPos)
    }

    #[test]
    fn hamiltonian_zero_field() {
        let h = nv_hamiltonian(0.0, &aligned(), &params()).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            vec![2880.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 2880.0],
        ])
        .unwrap();
        assert_eq!(h.max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn hamiltonian_aligned_is_diagonal() {
        let h = nv_hamiltonian(100.0, &aligned(), &params()).unwrap();
        assert_eq!(h.get(0, 0), Complex64::new(3160.0, 0.0));
        assert_eq!(h.get(1, 1), Complex64::new(0.0, 0.0));
        assert_eq!(h.get(2, 2), Complex64::new(2600.0, 0.0));
        assert_eq!(h.get(0, 1).norm(), 0.0);
        assert_eq!(h.get(1, 2).norm(), 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian_for_tilted_axes() {
        for phi in [0.0, 60.0, 123.0] {
            let mut cfg = tilted();
            cfg.phi_deg = phi;
            let h = nv_hamiltonian(250.0, &cfg, &params()).unwrap();
            assert!(h.hermitian_deviation() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_independent_of_phi() {
        let mut reference: Option<Vec<f64>> = None;
        for phi in [0.0, 60.0, 123.0] {
            let mut cfg = tilted();
            cfg.phi_deg = phi;
            let h = nv_hamiltonian(300.0, &cfg, &params()).unwrap();
            let (vals, _) = h.eigh().unwrap();
            if let Some(ref r) = reference {
                for (a, b) in vals.iter().zip(r.iter()) {
                    assert!((a - b).abs() < 1e-10);
                }
            } else {
                reference = Some(vals);
            }
        }
    }

    #[test]
    fn aligned_transitions_are_linear() {
        // D +- gyromagnetic*B, exactly, over the full field range
        let p = params();
        let mut b = 0.0;
        while b <= 1000.0 {
            let f = transition_frequencies(b, &aligned(), &p).unwrap();
            let delta = 2.8 * b;
            assert!((f.zero_to_plus_mhz - (2880.0 + delta)).abs() <= 1e-9 * (2880.0 + delta));
            assert!(
                (f.zero_to_minus_mhz - (2880.0 - delta).abs()).abs()
                    <= 1e-9 * (2880.0 + delta).max(1.0)
            );
            b += 12.5;
        }
    }

    #[test]
    fn transition_examples() {
        let p = params();
        let f = transition_frequencies(0.0, &aligned(), &p).unwrap();
        assert_eq!(f.zero_to_plus_mhz, 2880.0);
        assert_eq!(f.zero_to_minus_mhz, 2880.0);
        assert_eq!(f.plus_to_minus_mhz, 0.0);

        let f = transition_frequencies(200.0, &aligned(), &p).unwrap();
        assert!((f.zero_to_plus_mhz - 3440.0).abs() < 1e-9);
        assert!((f.zero_to_minus_mhz - 2320.0).abs() < 1e-9);
        assert!((f.plus_to_minus_mhz - 1120.0).abs() < 1e-9);
    }

    #[test]
    fn tilted_transitions_deviate_from_linearity() {
        let p = params();
        let f = transition_frequencies(200.0, &tilted(), &p).unwrap();
        // state mixing pushes the curves off D +- delta*cos(theta)
        let delta = 2.8 * 200.0;
        let linear_plus = 2880.0 + delta * (-1.0f64 / 3.0);
        assert!((f.zero_to_plus_mhz - linear_plus).abs() > 1.0);
        // frozen eigen-oracle values for b=200 G, theta=arccos(-1/3)
        assert!((f.zero_to_plus_mhz - 2831.5279839457085).abs() < 1e-6);
        assert!((f.zero_to_minus_mhz - 3210.7673226380834).abs() < 1e-6);
        assert!((f.plus_to_minus_mhz - 379.239338692375).abs() < 1e-6);
    }

    #[test]
    fn p1_line_is_linear() {
        let p = params();
        assert_eq!(p1_transition(0.0, &p).unwrap(), 0.0);
        assert_eq!(p1_transition(100.0, &p).unwrap(), 280.0);
        assert_eq!(p1_transition(1000.0, &p).unwrap(), 2800.0);
        assert!(p1_transition(-1.0, &p).is_err());
    }

    #[test]
    fn single_window_covers_100_to_400_gauss() {
        let p = params();
        let windows = cross_relaxation_windows(100.0, 400.0, 0.25, 10.0, &p).unwrap();
        assert_eq!(windows.len(), 1);
        let w = &windows[0];
        assert!((w.b_min - 100.0).abs() < 0.05);
        assert!((w.b_max - 400.0).abs() < 0.05);
        // 2.8 MHz/G * 300 G = 840 MHz of ODMR tuning
        assert!((w.span_mhz - 840.0).abs() / 840.0 < 0.05);
    }

    #[test]
    fn three_windows_over_full_field_range() {
        // frozen scan-oracle boundaries for [0, 1000] G at 10 MHz guard
        let p = params();
        let windows = cross_relaxation_windows(0.0, 1000.0, 0.25, 10.0, &p).unwrap();
        assert_eq!(windows.len(), 3);
        assert!((windows[0].b_min - 5.422).abs() < 0.05);
        assert!((windows[0].b_max - 512.492).abs() < 0.05);
        assert!((windows[1].b_min - 516.078).abs() < 0.05);
        assert!((windows[1].b_max - 586.469).abs() < 0.05);
        assert!((windows[2].b_min - 601.109).abs() < 0.05);
        assert!((windows[2].b_max - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn near_zero_field_has_single_window() {
        let p = params();
        let windows = cross_relaxation_windows(0.0, 5.0, 0.1, 1.0, &p).unwrap();
        assert_eq!(windows.len(), 1);
        assert!((windows[0].b_min - 0.5375).abs() < 0.05);
        assert!((windows[0].b_max - 5.0).abs() < 1e-9);
    }

    #[test]
    fn absurd_guard_leaves_no_window() {
        let p = params();
        let windows = cross_relaxation_windows(0.0, 1000.0, 1.0, 1e6, &p).unwrap();
        assert!(windows.is_empty());
    }

    #[test]
    fn windows_exclude_curve_crossings() {
        let p = params();
        // Bisect the crossing of the falling aligned 0->-1 line with the
        // rising P1 line; analytically at d / (2 gamma).
        let aligned_cfg = aligned();
        let diff = |b: f64| -> f64 {
            let a = transition_frequencies(b, &aligned_cfg, &p).unwrap();
            a.zero_to_minus_mhz - p1_transition(b, &p).unwrap()
        };
        let (mut lo, mut hi) = (500.0, 530.0);
        assert!(diff(lo) * diff(hi) < 0.0);
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if diff(lo) * diff(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let crossing = 0.5 * (lo + hi);
        assert!((crossing - p.d_mhz / (2.0 * p.gyromagnetic_mhz_per_g)).abs() < 1e-3);
        let windows =
            cross_relaxation_windows(crossing - 20.0, crossing + 20.0, 0.25, 10.0, &p).unwrap();
        assert!(!windows.is_empty());
        for w in windows {
            assert!(crossing < w.b_min || crossing > w.b_max);
        }
    }

    #[test]
    fn window_validation_errors() {
        let p = params();
        assert!(cross_relaxation_windows(400.0, 100.0, 0.25, 10.0, &p).is_err());
        assert!(cross_relaxation_windows(0.0, 100.0, -1.0, 10.0, &p).is_err());
        assert!(cross_relaxation_windows(0.0, 100.0, 0.25, 0.0, &p).is_err());
    }

    #[test]
    fn addressable_count_examples() {
        assert_eq!(addressable_count(800.0, 0.2).unwrap(), 4000);
        assert_eq!(addressable_count(0.0, 0.2).unwrap(), 0);
        assert_eq!(addressable_count(10.0, 0.1).unwrap(), 100);
        assert!(addressable_count(10.0, 0.0).is_err());
        assert!(addressable_count(-1.0, 0.2).is_err());
    }

    #[test]
    fn scan_rows_shape_and_order() {
        let p = params();
        let rows = scan_rows(0.0, 10.0, 5.0, &p).unwrap();
        // 3 field points x (4 orientations x 3 transitions + 1 P1 row)
        assert_eq!(rows.len(), 3 * 13);
        assert_eq!(rows[0].orientation, "[-1-1-1]");
        assert_eq!(rows[0].transition_label, "0_to_plus1");
        assert_eq!(rows[12].orientation, "P1");
        let last = rows.last().unwrap();
        assert_eq!(last.b_gauss, 10.0);
    }
}
