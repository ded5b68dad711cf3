//! Run configuration shared by every CLI command: the tracked window,
//! truncation depths, arithmetic mode, seed and output format.

use crate::error::{Error, Result};
use crate::qseries::Region;
use crate::tensorsim::QMode;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Hard bound on the spectral window the CLI accepts.
pub const WINDOW_BOUND: i64 = 64;
/// Hard bound on the degree cap the CLI accepts.
pub const DEGCAP_BOUND: u32 = 32;
/// Hard bound on the flip depth the CLI accepts.
pub const DEPTH_BOUND: u32 = 16;
/// Symbolic eigen-analysis is the default up to this dimension.
pub const SYMBOLIC_DIM_BOUND: usize = 256;

/// Output format of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// One command's worth of shared configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Tracked spectral window `[rmin, rmax]` for A-variable exponents.
    pub window: (i64, i64),
    /// Total-degree cap of tracked series.
    pub degcap: u32,
    /// Flip depth of asymptotic-module truncations.
    pub depth: u32,
    /// Arithmetic mode for eigen-analysis.
    pub qmode: QMode,
    /// Seed for every randomized property check.
    pub seed: u64,
    /// Output format.
    pub format: Format,
}

impl RunConfig {
    /// Validate the mutual constraints.
    pub fn validate(&self) -> Result<()> {
        let (rmin, rmax) = self.window;
        if rmin > rmax {
            return Err(Error::Config(format!(
                "window minimum {rmin} exceeds maximum {rmax}"
            )));
        }
        if rmin.abs() > WINDOW_BOUND || rmax.abs() > WINDOW_BOUND {
            return Err(Error::Config(format!(
                "window [{rmin}, {rmax}] exceeds the bound {WINDOW_BOUND}"
            )));
        }
        if self.degcap > DEGCAP_BOUND {
            return Err(Error::Config(format!(
                "degree cap {} exceeds the bound {DEGCAP_BOUND}",
                self.degcap
            )));
        }
        if self.depth > DEPTH_BOUND {
            return Err(Error::Config(format!(
                "flip depth {} exceeds the bound {DEPTH_BOUND}",
                self.depth
            )));
        }
        if let QMode::DualRational(a, b) = &self.qmode {
            for q0 in [a, b] {
                if q0.is_zero() || q0.is_one() || (-q0.clone()).is_one() {
                    return Err(Error::Config(format!(
                        "specialization point {q0} must avoid 0 and ±1"
                    )));
                }
            }
            if a == b {
                return Err(Error::Config(format!(
                    "specialization points must be distinct, got {a} twice"
                )));
            }
        }
        Ok(())
    }

    /// The tracked region described by the window and degree cap.
    pub fn region(&self) -> Result<Region> {
        Region::new(self.window.0, self.window.1, self.degcap)
    }

    /// Parameter block for reports.
    pub fn params(&self) -> serde_json::Value {
        serde_json::json!({
            "window": format!("{}:{}", self.window.0, self.window.1),
            "degcap": self.degcap,
            "depth": self.depth,
            "q": describe_qmode(&self.qmode),
            "seed": self.seed,
        })
    }
}

/// Parse a `rmin:rmax` window description.
pub fn parse_window(s: &str) -> Result<(i64, i64)> {
    let Some((lo, hi)) = s.split_once(':') else {
        return Err(Error::Parse(format!(
            "window must look like 'rmin:rmax', got '{s}'"
        )));
    };
    let rmin: i64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("window minimum '{lo}' is not an integer")))?;
    let rmax: i64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("window maximum '{hi}' is not an integer")))?;
    Ok((rmin, rmax))
}

/// Parse an arithmetic-mode description: `symbolic`, or two exact
/// rationals `q0a:q0b` (such as `3/2:5/7`) for the dual-specialization
/// mode.
pub fn parse_qmode(s: &str) -> Result<QMode> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("symbolic") {
        return Ok(QMode::Exact);
    }
    let Some((a, b)) = t.split_once(':') else {
        return Err(Error::Parse(format!(
            "arithmetic mode must be 'symbolic' or 'q0a:q0b', got '{s}'"
        )));
    };
    Ok(QMode::DualRational(parse_rational(a)?, parse_rational(b)?))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let parse_int = |u: &str| -> Result<BigInt> {
        u.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("'{u}' is not an integer")))
    };
    match t.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(parse_int(num)?, d))
        }
        None => Ok(BigRational::from(parse_int(t)?)),
    }
}

fn describe_qmode(m: &QMode) -> String {
    match m {
        QMode::Exact => "symbolic".into(),
        QMode::DualRational(a, b) => format!("{a}:{b}"),
    }
}
