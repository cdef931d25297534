//! `k=v,...` argument parsing for states and grids.

use std::collections::BTreeMap;
use std::fmt;

use clap::ValueEnum;
use quasidist::fock::{self, AlphaGrid, Ket};
use quasidist::states::{self, CoherentParams, PlaneWavePairParams, SqueezeParams};
use quasidist::{PhaseGrid, PositionGrid, WaveField, C64};

/// Process exit status plus a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

impl From<quasidist::Error> for Failure {
    fn from(e: quasidist::Error) -> Self {
        use quasidist::Error::*;
        let code = match e {
            Config(_) | Domain(_) | Validation(_) => EXIT_USAGE,
            Truncation(_) => EXIT_TRUNCATION,
            Io(_) | Format(_) => 1,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Parses `k=v,k=v` into numbers, rejecting keys outside `allowed`.
pub fn parse_kv(s: &str, allowed: &[&str]) -> CliResult<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("expected key=value, got {part:?}")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(Failure::usage(format!(
                "unknown key {k:?}; expected one of {}",
                allowed.join(", ")
            )));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("value of {k} is not a number: {v:?}")))?;
        if out.insert(k.to_string(), v).is_some() {
            return Err(Failure::usage(format!("key {k} given twice")));
        }
    }
    Ok(out)
}

fn count(v: f64, key: &str) -> CliResult<usize> {
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(Failure::usage(format!("{key} must be a non-negative integer, got {v}")));
    }
    Ok(v as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Coherent,
    Fock,
    Cat,
    PlanePair,
    Squeezed,
    SqueezedCat,
}

impl StateKind {
    fn keys(&self) -> &'static [&'static str] {
        match self {
            StateKind::Coherent | StateKind::Cat => &["alpha0", "alpha0_im", "theta"],
            StateKind::Fock => &["n"],
            StateKind::PlanePair => &["p1", "p2", "L"],
            StateKind::Squeezed => &["xi", "phi", "alpha0", "alpha0_im", "theta"],
            StateKind::SqueezedCat => &["xi", "phi"],
        }
    }
}

/// A state kind together with its numeric arguments.
#[derive(Debug, Clone)]
pub struct StateSpec {
    pub kind: StateKind,
    args: BTreeMap<String, f64>,
}

impl StateSpec {
    pub fn new(kind: StateKind, args: &str) -> CliResult<Self> {
        Ok(Self {
            kind,
            args: parse_kv(args, kind.keys())?,
        })
    }

    /// `kind[:k=v,...]`, e.g. `coherent:alpha0=1`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let kind = StateKind::from_str(name.trim(), false).map_err(Failure::usage)?;
        Self::new(kind, args)
    }

    fn get(&self, k: &str, default: f64) -> f64 {
        self.args.get(k).copied().unwrap_or(default)
    }

    fn require(&self, k: &str) -> CliResult<f64> {
        self.args
            .get(k)
            .copied()
            .ok_or_else(|| Failure::usage(format!("state {:?} needs {k}=...", self.kind)))
    }

    /// `alpha0` and `alpha0_im` are Cartesian; with `theta`, `alpha0` is the modulus.
    fn coherent(&self) -> CliResult<CoherentParams> {
        let a = self.get("alpha0", 0.0);
        match (self.args.get("theta"), self.args.get("alpha0_im")) {
            (Some(_), Some(_)) => Err(Failure::usage("give either theta or alpha0_im, not both")),
            (Some(&t), None) => Ok(CoherentParams::polar(a, t)),
            (None, im) => Ok(CoherentParams::new(C64::new(a, im.copied().unwrap_or(0.0)))?),
        }
    }

    fn squeeze(&self) -> CliResult<SqueezeParams> {
        Ok(SqueezeParams::new(self.require("xi")?, self.get("phi", 0.0))?)
    }

    pub fn wave(&self, grid: &PositionGrid) -> CliResult<WaveField> {
        Ok(match self.kind {
            StateKind::Coherent => states::coherent_wave(self.coherent()?, grid)?,
            StateKind::Fock => states::fock_wave(count(self.get("n", 0.0), "n")?, grid)?,
            StateKind::Cat => states::cat_wave(self.coherent()?, grid)?,
            StateKind::PlanePair => {
                let p = PlaneWavePairParams::new(self.require("p1")?, self.require("p2")?, self.get("L", 20.0))?;
                states::plane_wave_pair(p, grid)?
            }
            StateKind::Squeezed => states::squeezed_coherent_wave(self.coherent()?, self.squeeze()?, grid)?,
            StateKind::SqueezedCat => states::squeezed_cat_wave(self.squeeze()?, grid)?,
        })
    }

    pub fn ket(&self, dim: usize) -> CliResult<Ket> {
        Ok(match self.kind {
            StateKind::Coherent => fock::coherent_ket(self.coherent()?, dim)?,
            StateKind::Fock => fock::fock_ket(count(self.get("n", 0.0), "n")?, dim)?,
            StateKind::Cat => fock::cat_ket(self.coherent()?, dim)?,
            StateKind::Squeezed => fock::squeezed_coherent_ket(self.coherent()?, self.squeeze()?, dim)?,
            StateKind::SqueezedCat => fock::squeezed_cat_ket(self.squeeze()?, dim)?,
            StateKind::PlanePair => {
                return Err(Failure::usage("plane-pair has no number-basis form; use --engine wave"))
            }
        })
    }
}

const GRID_KEYS: &[&str] = &["n", "m", "qmin", "qmax", "pmin", "pmax"];

/// Position grid `[qmin, qmax)` with `n` samples (default `n=512`, `[-12, 12)`)
/// and its conjugate lattice, windowed when `pmin`/`pmax` are given.
pub fn wave_grid(spec: &str, hbar: f64) -> CliResult<(PositionGrid, PhaseGrid)> {
    let kv = parse_kv(spec, GRID_KEYS)?;
    if kv.contains_key("m") {
        return Err(Failure::usage("m= applies to --engine fock; the momentum axis follows from n"));
    }
    let n = count(kv.get("n").copied().unwrap_or(512.0), "n")?;
    let (lo, hi) = (kv.get("qmin").copied().unwrap_or(-12.0), kv.get("qmax").copied().unwrap_or(12.0));
    if hi <= lo {
        return Err(Failure::usage(format!("empty position range [{lo}, {hi})")));
    }
    let pos = PositionGrid::new(lo, (hi - lo) / n as f64, n, hbar)?;
    let phase = match (kv.get("pmin"), kv.get("pmax")) {
        (None, None) => PhaseGrid::conjugate(&pos),
        (a, b) => PhaseGrid::windowed(
            &pos,
            a.copied().unwrap_or(pos.p(0)),
            b.copied().unwrap_or(pos.p(n - 1)),
        )?,
    };
    Ok((pos, phase))
}

/// Inclusive alpha lattice: `qmin..qmax` along `Re alpha` with `n` points,
/// `pmin..pmax` along `Im alpha` with `m` points (defaults `[-4, 4]`, 81).
pub fn alpha_grid(spec: &str) -> CliResult<AlphaGrid> {
    let kv = parse_kv(spec, GRID_KEYS)?;
    let n = count(kv.get("n").copied().unwrap_or(81.0), "n")?;
    let m = count(kv.get("m").copied().unwrap_or(n as f64), "m")?;
    let g = |k: &str, d: f64| kv.get(k).copied().unwrap_or(d);
    Ok(fock::alpha_grid(
        (g("qmin", -4.0), g("qmax", 4.0), n),
        (g("pmin", -4.0), g("pmax", 4.0), m),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_parsing() {
        let kv = parse_kv("alpha0=3, theta=0.5", &["alpha0", "theta"]).unwrap();
        assert_eq!(kv["alpha0"], 3.0);
        assert!(parse_kv("beta=1", &["alpha0"]).is_err());
        assert!(parse_kv("alpha0", &["alpha0"]).is_err());
        assert!(parse_kv("alpha0=x", &["alpha0"]).is_err());
        assert!(parse_kv("alpha0=1,alpha0=2", &["alpha0"]).is_err());
        assert!(parse_kv("", &[]).unwrap().is_empty());
    }

    #[test]
    fn state_specs() {
        let s = StateSpec::parse("coherent:alpha0=3,theta=0.7853981633974483").unwrap();
        let a = s.coherent().unwrap().alpha0;
        assert!((a - C64::from_polar(3.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-15);
        assert!(StateSpec::parse("coherent:alpha0=1,theta=1,alpha0_im=1").unwrap().coherent().is_err());
        assert!(StateSpec::parse("nonsense").is_err());
        assert!(StateSpec::parse("fock:n=1.5").unwrap().ket(8).is_err());
        assert!(StateSpec::parse("plane-pair:p1=-2,p2=2").unwrap().ket(8).is_err());
    }

    #[test]
    fn grids() {
        let (pos, phase) = wave_grid("n=64,qmin=-8,qmax=8", 1.0).unwrap();
        assert_eq!(pos.len(), 64);
        assert!(phase.is_full_conjugate(&pos));
        let (_, w) = wave_grid("n=64,pmin=-1,pmax=1", 1.0).unwrap();
        assert!(w.m() < 64);
        assert!(wave_grid("n=63", 1.0).is_err());
        assert!(wave_grid("m=3", 1.0).is_err());
        let a = alpha_grid("n=11,m=5,qmin=-1,qmax=1,pmin=0,pmax=2").unwrap();
        assert_eq!((a.n(), a.m()), (11, 5));
    }
}
