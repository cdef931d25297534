//! File formats: the QPSF binary grid, CSV exports, and figure data
//! (PGM heatmaps and iso-level contours).

mod figure;
mod qpsf;
mod tables;

pub use figure::*;
pub use qpsf::*;
pub use tables::*;

use std::str::FromStr;

use crate::error::Error;
use crate::C64;

/// Scalar view of a complex field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
    Abs,
}

impl Part {
    pub fn of(&self, v: C64) -> f64 {
        match self {
            Part::Re => v.re,
            Part::Im => v.im,
            Part::Abs => v.norm(),
        }
    }
}

impl FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "re" => Ok(Part::Re),
            "im" => Ok(Part::Im),
            "abs" => Ok(Part::Abs),
            _ => Err(Error::Config(format!("unknown part {s:?}, expected re, im or abs"))),
        }
    }
}

impl std::fmt::Display for Part {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Part::Re => "re",
            Part::Im => "im",
            Part::Abs => "abs",
        })
    }
}
