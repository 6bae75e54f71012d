// Copyright 2026 nvforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! The four NV symmetry axes of the diamond lattice and their geometry
//! relative to the cantilever frame (x across the width, y through the
//! thickness, z along the beam; the static field points along [-1-1-1]).

use serde::{Deserialize, Serialize};

/// NV quantization axis, one of the four <111> bond directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NvOrientation {
    #[serde(rename = "[-1-1-1]")]
    NegNegNeg,
    #[serde(rename = "[-111]")]
    NegPosPos,
    #[serde(rename = "[1-11]")]
    PosNegPos,
    #[serde(rename = "[11-1]")]
    PosPosNeg,
}

impl NvOrientation {
    pub const ALL: [NvOrientation; 4] = [
        NvOrientation::NegNegNeg,
        NvOrientation::NegPosPos,
        NvOrientation::PosNegPos,
        NvOrientation::PosPosNeg,
    ];

    /// Unnormalized lattice direction.
    pub fn axis(self) -> [f64; 3] {
        match self {
            NvOrientation::NegNegNeg => [-1.0, -1.0, -1.0],
            NvOrientation::NegPosPos => [-1.0, 1.0, 1.0],
            NvOrientation::PosNegPos => [1.0, -1.0, 1.0],
            NvOrientation::PosPosNeg => [1.0, 1.0, -1.0],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NvOrientation::NegNegNeg => "[-1-1-1]",
            NvOrientation::NegPosPos => "[-111]",
            NvOrientation::PosNegPos => "[1-11]",
            NvOrientation::PosPosNeg => "[11-1]",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        NvOrientation::ALL.into_iter().find(|o| o.label() == label)
    }

    /// True for the axis parallel to the applied field.
    pub fn is_field_aligned(self) -> bool {
        matches!(self, NvOrientation::NegNegNeg)
    }

    /// Polar angle in degrees between this axis and the [-1-1-1] field
    /// direction: 0 for the aligned axis, arccos(-1/3) = 109.47 otherwise.
    pub fn theta_deg(self) -> f64 {
        if self.is_field_aligned() {
            0.0
        } else {
            tilt_angle_deg()
        }
    }

    pub fn theta_rad(self) -> f64 {
        if self.is_field_aligned() {
            0.0
        } else {
            tilt_angle_rad()
        }
    }
}

/// Angle between distinct <111> axes: arccos(-1/3).
pub fn tilt_angle_rad() -> f64 {
    (-1.0f64 / 3.0).acos()
}

pub fn tilt_angle_deg() -> f64 {
    tilt_angle_rad().to_degrees()
}
