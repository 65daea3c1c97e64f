//! Experiment identifiers, the raw on-disk config format, and the resolved
//! per-experiment settings with their defaults and domain checks.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use shadowlab_core::numeric::{parse_rational, rat, rat_i64, Rational};
use shadowlab_core::pseudo::NumericMode;

/// Elements a single run may materialize (ball entries, constraint rows)
/// before giving up. Overridable per config or via SHADOWLAB_CAP.
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
}

impl ExperimentId {
    pub fn all() -> [ExperimentId; 7] {
        use ExperimentId::*;
        [E1, E2, E3, E4, E5, E6, E7]
    }

    /// Experiments whose verdict is a per-radius sweep.
    pub fn sweepable(self) -> bool {
        matches!(self, ExperimentId::E1 | ExperimentId::E3 | ExperimentId::E4)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentId::E1 => "E1",
            ExperimentId::E2 => "E2",
            ExperimentId::E3 => "E3",
            ExperimentId::E4 => "E4",
            ExperimentId::E5 => "E5",
            ExperimentId::E6 => "E6",
            ExperimentId::E7 => "E7",
        };
        f.write_str(s)
    }
}

impl FromStr for ExperimentId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "E1" => Ok(ExperimentId::E1),
            "E2" => Ok(ExperimentId::E2),
            "E3" => Ok(ExperimentId::E3),
            "E4" => Ok(ExperimentId::E4),
            "E5" => Ok(ExperimentId::E5),
            "E6" => Ok(ExperimentId::E6),
            "E7" => Ok(ExperimentId::E7),
            other => bail!("unknown experiment `{other}` (expected E1..E7)"),
        }
    }
}

/// On-disk config: every field optional, unknown keys rejected. Rationals are
/// written as strings like "1/10" or "2".
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Baumslag-Solitar parameter for E1/E2.
    pub n: Option<u32>,
    /// Expansion rate: counterexample profile (E1) or action rate (E2).
    pub lambda: Option<String>,
    pub d: Option<String>,
    pub d1: Option<String>,
    pub epsilon: Option<String>,
    pub radius: Option<u32>,
    pub radius_min: Option<u32>,
    pub radius_max: Option<u32>,
    pub seeds: Option<u32>,
    pub seed0: Option<u64>,
    /// Fiber window length K where applicable (E2, E5).
    pub window: Option<u32>,
    /// "exact" or "float:<bits>".
    pub mode: Option<String>,
    /// Designated element (E3: expansive direction; E4: lifted direction;
    /// E7: the extra generator of P).
    pub g: Option<String>,
    /// Branch letter for E3.
    pub q: Option<String>,
    pub pairs: Option<u32>,
    pub cap: Option<usize>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    fn rational(field: &Option<String>, name: &str, default: Rational) -> Result<Rational> {
        match field {
            None => Ok(default),
            Some(s) => parse_rational(s).with_context(|| format!("config field `{name}`")),
        }
    }

    fn mode(&self) -> Result<NumericMode> {
        match self.mode.as_deref() {
            None | Some("exact") => Ok(NumericMode::Exact),
            Some(s) => {
                if let Some(bits) = s.strip_prefix("float:") {
                    Ok(NumericMode::Interval {
                        precision_bits: bits.parse().context("config field `mode`")?,
                    })
                } else {
                    bail!("mode must be `exact` or `float:<bits>`, got `{s}`")
                }
            }
        }
    }

    /// The resource cap: SHADOWLAB_CAP wins over the config, which wins over
    /// the default.
    pub fn cap(&self) -> Result<usize> {
        if let Ok(v) = std::env::var("SHADOWLAB_CAP") {
            return v
                .parse()
                .with_context(|| format!("SHADOWLAB_CAP must be an integer, got `{v}`"));
        }
        Ok(self.cap.unwrap_or(DEFAULT_CAP))
    }
}

fn rational_string(r: &Rational) -> String {
    shadowlab_core::numeric::format_rational(r)
}

mod rational_serde {
    use serde::Serializer;
    use shadowlab_core::numeric::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::rational_string(r))
    }
}

/// E1: the non-shadowable trajectory on BS(1,n), swept over ball radii.
#[derive(Debug, Clone, Serialize)]
pub struct E1Config {
    pub n: u32,
    #[serde(with = "rational_serde")]
    pub lambda: Rational,
    #[serde(with = "rational_serde")]
    pub d: Rational,
    #[serde(with = "rational_serde")]
    pub epsilon: Rational,
    pub radius_min: u32,
    pub radius_max: u32,
    pub cap: usize,
}

impl E1Config {
    pub fn resolve(raw: &RawConfig) -> Result<E1Config> {
        let n = raw.n.unwrap_or(2);
        if n < 2 {
            bail!("E1 needs n >= 2");
        }
        let lambda = RawConfig::rational(&raw.lambda, "lambda", rat_i64(i64::from(n)))?;
        if lambda <= rat_i64(1) || lambda > rat_i64(i64::from(n)) {
            bail!("E1 needs lambda in (1, n]");
        }
        if !matches!(raw.mode()?, NumericMode::Exact) {
            bail!("E1 runs in exact mode (the solver needs exact points); use `verify` for float-mode defect studies");
        }
        if lambda != rat_i64(i64::from(n)) {
            bail!("exact mode needs lambda = n; fractional rates take float mode");
        }
        let cfg = E1Config {
            n,
            lambda,
            d: RawConfig::rational(&raw.d, "d", rat(1, 10))?,
            epsilon: RawConfig::rational(&raw.epsilon, "epsilon", rat_i64(1))?,
            radius_min: raw.radius_min.unwrap_or(4),
            radius_max: raw.radius_max.unwrap_or(14),
            cap: raw.cap()?,
        };
        if !cfg.d.is_positive() || !cfg.epsilon.is_positive() {
            bail!("E1 needs positive d and epsilon");
        }
        if cfg.radius_min > cfg.radius_max || cfg.radius_min == 0 {
            bail!("E1 radius range must be 1 <= min <= max");
        }
        Ok(cfg)
    }
}

/// E2: perturbed orbits on BS(1,n) with an expanding action, all shadowed.
#[derive(Debug, Clone, Serialize)]
pub struct E2Config {
    pub n: u32,
    #[serde(with = "rational_serde")]
    pub lambda: Rational,
    #[serde(with = "rational_serde")]
    pub d: Rational,
    pub radius: u32,
    pub seeds: u32,
    pub seed0: u64,
    pub window: u32,
    pub cap: usize,
}

impl E2Config {
    pub fn resolve(raw: &RawConfig) -> Result<E2Config> {
        let n = raw.n.unwrap_or(2);
        if n < 2 {
            bail!("E2 needs n >= 2");
        }
        let lambda = RawConfig::rational(&raw.lambda, "lambda", rat_i64(3))?;
        if lambda <= rat_i64(i64::from(n)) {
            bail!("E2 needs lambda > n (the expanding regime)");
        }
        let cfg = E2Config {
            n,
            lambda,
            d: RawConfig::rational(&raw.d, "d", rat(1, 100))?,
            radius: raw.radius.unwrap_or(6),
            seeds: raw.seeds.unwrap_or(50),
            seed0: raw.seed0.unwrap_or(1),
            window: raw.window.unwrap_or(6),
            cap: raw.cap()?,
        };
        if !cfg.d.is_positive() {
            bail!("E2 needs positive d");
        }
        if cfg.window > cfg.radius {
            bail!("E2 window cannot exceed the ball radius");
        }
        if cfg.radius == 0 || cfg.seeds == 0 {
            bail!("E2 needs a positive radius and at least one seed");
        }
        Ok(cfg)
    }
}

/// E3: two-branch pseudotrajectory on F(2) against an expansive direction.
#[derive(Debug, Clone, Serialize)]
pub struct E3Config {
    pub g: String,
    pub q: String,
    #[serde(with = "rational_serde")]
    pub d1: Rational,
    #[serde(with = "rational_serde")]
    pub epsilon: Rational,
    pub radius_min: u32,
    pub radius_max: u32,
    pub cap: usize,
}

impl E3Config {
    pub fn resolve(raw: &RawConfig) -> Result<E3Config> {
        let cfg = E3Config {
            g: raw.g.clone().unwrap_or_else(|| "a".to_string()),
            q: raw.q.clone().unwrap_or_else(|| "b".to_string()),
            d1: RawConfig::rational(&raw.d1, "d1", rat(1, 10))?,
            epsilon: RawConfig::rational(&raw.epsilon, "epsilon", rat_i64(1))?,
            radius_min: raw.radius_min.unwrap_or(2),
            radius_max: raw.radius_max.unwrap_or(10),
            cap: raw.cap()?,
        };
        if !cfg.d1.is_positive() || !cfg.epsilon.is_positive() {
            bail!("E3 needs positive d1 and epsilon");
        }
        if cfg.radius_min > cfg.radius_max || cfg.radius_min == 0 {
            bail!("E3 radius range must be 1 <= min <= max");
        }
        Ok(cfg)
    }
}

/// E4: a drifting window of a parabolic map, lifted to F(2).
#[derive(Debug, Clone, Serialize)]
pub struct E4Config {
    pub g: String,
    #[serde(with = "rational_serde")]
    pub d1: Rational,
    #[serde(with = "rational_serde")]
    pub epsilon: Rational,
    pub radius_min: u32,
    pub radius_max: u32,
    pub cap: usize,
}

impl E4Config {
    pub fn resolve(raw: &RawConfig) -> Result<E4Config> {
        let cfg = E4Config {
            g: raw.g.clone().unwrap_or_else(|| "a".to_string()),
            d1: RawConfig::rational(&raw.d1, "d1", rat(1, 5))?,
            epsilon: RawConfig::rational(&raw.epsilon, "epsilon", rat(1, 4))?,
            radius_min: raw.radius_min.unwrap_or(1),
            radius_max: raw.radius_max.unwrap_or(8),
            cap: raw.cap()?,
        };
        if !cfg.d1.is_positive() || !cfg.epsilon.is_positive() {
            bail!("E4 needs positive d1 and epsilon");
        }
        if cfg.radius_min > cfg.radius_max || cfg.radius_min == 0 {
            bail!("E4 radius range must be 1 <= min <= max");
        }
        Ok(cfg)
    }
}

/// E5: commuting saddles on Z^2; per-fiber boxes assemble coherently.
#[derive(Debug, Clone, Serialize)]
pub struct E5Config {
    #[serde(with = "rational_serde")]
    pub d: Rational,
    pub radius: u32,
    pub seeds: u32,
    pub seed0: u64,
    /// Shorter fiber window; the run also uses its double.
    pub window: u32,
    pub cap: usize,
}

impl E5Config {
    pub fn resolve(raw: &RawConfig) -> Result<E5Config> {
        let window = raw.window.unwrap_or(4);
        let cfg = E5Config {
            d: RawConfig::rational(&raw.d, "d", rat(1, 100))?,
            radius: raw.radius.unwrap_or(2 * window + 1),
            seeds: raw.seeds.unwrap_or(50),
            seed0: raw.seed0.unwrap_or(1),
            window,
            cap: raw.cap()?,
        };
        if !cfg.d.is_positive() {
            bail!("E5 needs positive d");
        }
        if cfg.window == 0 {
            bail!("E5 needs a positive fiber window");
        }
        if cfg.radius < 2 * cfg.window + 1 {
            bail!(
                "E5 radius must cover the doubled window plus one coset step (need >= {})",
                2 * cfg.window + 1
            );
        }
        if cfg.seeds == 0 {
            bail!("E5 needs at least one seed");
        }
        Ok(cfg)
    }
}

/// E6: change of generating set on F(2); defect bound transfers.
#[derive(Debug, Clone, Serialize)]
pub struct E6Config {
    #[serde(with = "rational_serde")]
    pub d1: Rational,
    /// Radius of the exhaustive norm comparison.
    pub radius: u32,
    /// Radius of the enlarged-set ball carrying the trajectories.
    pub trajectory_radius: u32,
    pub seeds: u32,
    pub seed0: u64,
    pub cap: usize,
}

impl E6Config {
    pub fn resolve(raw: &RawConfig) -> Result<E6Config> {
        let cfg = E6Config {
            d1: RawConfig::rational(&raw.d1, "d1", rat(1, 50))?,
            radius: raw.radius.unwrap_or(8),
            trajectory_radius: raw.radius_max.unwrap_or(5),
            seeds: raw.seeds.unwrap_or(20),
            seed0: raw.seed0.unwrap_or(1),
            cap: raw.cap()?,
        };
        if !cfg.d1.is_positive() {
            bail!("E6 needs positive d1");
        }
        if cfg.radius == 0 || cfg.trajectory_radius == 0 || cfg.seeds == 0 {
            bail!("E6 needs positive radii and at least one seed");
        }
        Ok(cfg)
    }
}

/// E7: commutators of the distinguished subgroup land in the center.
#[derive(Debug, Clone, Serialize)]
pub struct E7Config {
    pub g: String,
    pub radius: u32,
    pub pairs: u32,
    pub seed0: u64,
    pub cap: usize,
}

impl E7Config {
    pub fn resolve(raw: &RawConfig) -> Result<E7Config> {
        let cfg = E7Config {
            g: raw.g.clone().unwrap_or_else(|| "a".to_string()),
            radius: raw.radius.unwrap_or(4),
            pairs: raw.pairs.unwrap_or(200),
            seed0: raw.seed0.unwrap_or(1),
            cap: raw.cap()?,
        };
        if cfg.radius == 0 || cfg.pairs == 0 {
            bail!("E7 needs a positive radius and at least one pair");
        }
        Ok(cfg)
    }
}

/// Errors out when a run would materialize more than `cap` items.
pub fn check_cap(what: &str, count: usize, cap: usize) -> Result<()> {
    if count > cap {
        bail!("{what} needs {count} elements, above the cap {cap}; raise SHADOWLAB_CAP to allow it");
    }
    Ok(())
}

/// d (L^r - 1) / (L - 1): how far a d-pseudotrajectory can stray from the
/// orbit of its base point over words of length r, for L > 1.
pub fn accumulated_tolerance(d: &Rational, lipschitz: &Rational, radius: u32) -> Rational {
    let mut pow = rat_i64(1);
    for _ in 0..radius {
        pow *= lipschitz;
    }
    d * (pow - rat_i64(1)) / (lipschitz - rat_i64(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let raw = RawConfig::default();
        assert_eq!(E1Config::resolve(&raw).unwrap().radius_max, 14);
        assert_eq!(E2Config::resolve(&raw).unwrap().seeds, 50);
        assert_eq!(E3Config::resolve(&raw).unwrap().q, "b");
        assert_eq!(E4Config::resolve(&raw).unwrap().radius_max, 8);
        assert_eq!(E5Config::resolve(&raw).unwrap().radius, 9);
        assert_eq!(E6Config::resolve(&raw).unwrap().seeds, 20);
        assert_eq!(E7Config::resolve(&raw).unwrap().pairs, 200);
    }

    #[test]
    fn domains_are_enforced() {
        let mut raw = RawConfig::default();
        raw.lambda = Some("3".to_string());
        assert!(E1Config::resolve(&raw).is_err(), "E1 rejects lambda > n");
        raw.lambda = Some("2".to_string());
        assert!(E2Config::resolve(&raw).is_err(), "E2 rejects lambda <= n");
        raw.lambda = None;
        raw.window = Some(9);
        assert!(E2Config::resolve(&raw).is_err(), "window beyond radius");
        let mut raw = RawConfig::default();
        raw.radius = Some(4);
        assert!(E5Config::resolve(&raw).is_err(), "radius below 2K+1");
    }

    #[test]
    fn geometric_accumulation() {
        // 1/100 * (6^2 - 1) / 5 = 7/100.
        assert_eq!(
            accumulated_tolerance(&rat(1, 100), &rat_i64(6), 2),
            rat(7, 100)
        );
    }

    #[test]
    fn experiment_ids_round_trip() {
        for id in ExperimentId::all() {
            assert_eq!(id.to_string().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("E9".parse::<ExperimentId>().is_err());
    }
}
