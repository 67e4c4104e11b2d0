//! Single-qubit projector labels used for measurement settings and tomography.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{c, ComplexMatrix};
use crate::error::{Error, Result};

/// Polarization-style projector label. `L = (|0⟩+i|1⟩)/√2`, `R = (|0⟩−i|1⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Zero,
    One,
    Plus,
    Minus,
    L,
    R,
}

impl Label {
    /// Lexicographic order used for overcomplete setting lists.
    pub const ALL: [Label; 6] = [
        Label::Zero,
        Label::One,
        Label::Plus,
        Label::Minus,
        Label::L,
        Label::R,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Zero => "0",
            Label::One => "1",
            Label::Plus => "+",
            Label::Minus => "-",
            Label::L => "L",
            Label::R => "R",
        }
    }

    pub fn ket(&self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Label::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            Label::One => [c(0.0, 0.0), c(1.0, 0.0)],
            Label::Plus => [c(h, 0.0), c(h, 0.0)],
            Label::Minus => [c(h, 0.0), c(-h, 0.0)],
            Label::L => [c(h, 0.0), c(0.0, h)],
            Label::R => [c(h, 0.0), c(0.0, -h)],
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        let k = self.ket();
        ComplexMatrix::outer(&k, &k)
    }

    /// The orthogonal partner within the same basis.
    pub fn partner(&self) -> Label {
        match self {
            Label::Zero => Label::One,
            Label::One => Label::Zero,
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
            Label::L => Label::R,
            Label::R => Label::L,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Label::Zero),
            "1" => Ok(Label::One),
            "+" => Ok(Label::Plus),
            "-" | "−" => Ok(Label::Minus),
            "L" => Ok(Label::L),
            "R" => Ok(Label::R),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rank-1 projector onto the named single-qubit state.
pub fn projector_for_label(label: &str) -> Result<ComplexMatrix> {
    Ok(label.parse::<Label>()?.projector())
}
