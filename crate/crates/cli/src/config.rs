//! Scenario files: one TOML document per run.
//!
//! ```toml
//! suites = ["verify-testobject", "moderate"]
//!
//! [grid]
//! half_width = 32.0
//! points = 4096
//!
//! [epsilon]        # eps = 2^-first .. 2^-last
//! first = 2
//! last = 9
//! kernel_valid = 4
//!
//! [expressions]
//! moderate = ["iota(delta)"]
//! associated = [["iota(heaviside) * iota(heaviside)", "iota(heaviside)"]]
//! ```
//!
//! Every table and key is optional; missing ones take the defaults below.

use std::path::Path;

use colombeau::fourier::FtProperty;
use colombeau::grid::{make_grid, GridSpec, MAX_SEMINORM_ORDER};
use colombeau::mollifier::cutoff::TransitionProfile;
use colombeau::quotient::{Caps, EpsilonGrid, SeminormBank};
use colombeau::Workbench;
use serde::{Deserialize, Serialize};

use crate::parse::parse_expression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    VerifyTestobject,
    Moderate,
    Negligible,
    Associated,
    FtProperties,
    Inclusion,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::VerifyTestobject,
        Suite::Moderate,
        Suite::Negligible,
        Suite::Associated,
        Suite::FtProperties,
        Suite::Inclusion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::VerifyTestobject => "verify-testobject",
            Suite::Moderate => "moderate",
            Suite::Negligible => "negligible",
            Suite::Associated => "associated",
            Suite::FtProperties => "ft-properties",
            Suite::Inclusion => "inclusion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 32.0,
            points: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsilonConfig {
    pub first: i32,
    pub last: i32,
    pub kernel_valid: usize,
}

impl Default for EpsilonConfig {
    fn default() -> Self {
        Self {
            first: 2,
            last: 9,
            kernel_valid: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapsConfig {
    pub m_cap: u32,
    pub n_cap: u32,
    pub l_cap: usize,
    pub alpha_max: u32,
    pub beta_max: u32,
    pub compact_radii: Vec<f64>,
    pub slack: f64,
    pub max_residual: f64,
}

impl Default for CapsConfig {
    fn default() -> Self {
        let c = Caps::default();
        Self {
            m_cap: c.m_cap,
            n_cap: c.n_cap,
            l_cap: c.l_cap,
            alpha_max: 3,
            beta_max: 2,
            compact_radii: vec![1.0, 2.0, 4.0],
            slack: c.slack,
            max_residual: c.max_residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Standard,
    Steep,
}

impl From<Profile> for TransitionProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Standard => TransitionProfile::Standard,
            Profile::Steep => TransitionProfile::Steep,
        }
    }
}

/// Cutoff transition profiles of the two nets `psi1`, `psi2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetsConfig {
    pub cutoffs: [Profile; 2],
}

impl Default for NetsConfig {
    fn default() -> Self {
        Self {
            cutoffs: [Profile::Standard, Profile::Steep],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Expressions {
    /// Expected `Moderate`.
    pub moderate: Vec<String>,
    /// Expected `Negligible`.
    pub negligible: Vec<String>,
    /// Expected not negligible.
    pub not_negligible: Vec<String>,
    pub associated: Vec<[String; 2]>,
    pub not_associated: Vec<[String; 2]>,
    /// Smoke set for the inclusion and Fourier suites; empty means the
    /// built-in smoke set.
    pub smoke: Vec<String>,
}

/// Fourier property ids `i`..`v` to check; empty means all.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierConfig {
    pub properties: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub suites: Vec<Suite>,
    pub grid: GridConfig,
    pub epsilon: EpsilonConfig,
    pub caps: CapsConfig,
    pub nets: NetsConfig,
    pub expressions: Expressions,
    pub fourier: FourierConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            suites: Vec::new(),
            grid: GridConfig::default(),
            epsilon: EpsilonConfig::default(),
            caps: CapsConfig::default(),
            nets: NetsConfig::default(),
            expressions: Expressions::default(),
            fourier: FourierConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err(e: impl std::fmt::Display) -> ConfigError {
    ConfigError(e.to_string())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: Self = toml::from_str(text).map_err(cfg_err)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The full default scenario: every suite on the standard expressions.
    pub fn default_scenario() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let pair = |a: &str, b: &str| [a.to_string(), b.to_string()];
        Self {
            suites: Suite::ALL.to_vec(),
            expressions: Expressions {
                moderate: s(&["iota(delta)", "iota(delta) * iota(delta)"]),
                negligible: s(&["iota(gauss) - sigma(gauss)"]),
                not_negligible: s(&["iota(delta)", "iota(one) - sigma(one)"]),
                associated: vec![
                    pair("sigma(gauss) * iota(delta)", "iota(delta)"),
                    pair("iota(heaviside) * iota(heaviside)", "iota(heaviside)"),
                    pair("iota(one)", "sigma(one)"),
                ],
                not_associated: vec![pair("iota(delta) * iota(delta)", "iota(delta)")],
                smoke: Vec::new(),
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid_spec()?;
        self.epsilon_grid()?;
        let c = &self.caps;
        if c.alpha_max > MAX_SEMINORM_ORDER || c.beta_max > MAX_SEMINORM_ORDER {
            return Err(ConfigError(format!(
                "alpha_max and beta_max must be at most {MAX_SEMINORM_ORDER}"
            )));
        }
        if c.l_cap > colombeau::expr::MAX_DIFFERENTIAL {
            return Err(ConfigError(format!(
                "l_cap must be at most {}",
                colombeau::expr::MAX_DIFFERENTIAL
            )));
        }
        if c.m_cap == 0 || c.m_cap > 8 || c.n_cap == 0 {
            return Err(ConfigError("m_cap must be in 1..=8 and n_cap positive".into()));
        }
        for &r in &c.compact_radii {
            if !(r > 0.0 && r <= self.grid.half_width / 2.0) {
                return Err(ConfigError(format!(
                    "compact radius {r} outside (0, half_width / 2]"
                )));
            }
        }
        if !(c.slack >= 0.0 && c.max_residual > 0.0) {
            return Err(ConfigError("slack and max_residual must be positive".into()));
        }
        if self.nets.cutoffs[0] == self.nets.cutoffs[1] {
            return Err(ConfigError("the two nets need distinct cutoffs".into()));
        }
        for p in &self.fourier.properties {
            if !FtProperty::ALL.iter().any(|q| q.id() == p) {
                return Err(ConfigError(format!("unknown Fourier property `{p}`")));
            }
        }
        let e = &self.expressions;
        let singles = e
            .moderate
            .iter()
            .chain(&e.negligible)
            .chain(&e.not_negligible)
            .chain(&e.smoke);
        let pairs = e.associated.iter().chain(&e.not_associated).flatten();
        for text in singles.chain(pairs) {
            parse_expression(text).map_err(|err| ConfigError(format!("`{text}`: {err}")))?;
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        make_grid(self.grid.half_width, self.grid.points).map_err(cfg_err)
    }

    pub fn epsilon_grid(&self) -> Result<EpsilonGrid, ConfigError> {
        let e = &self.epsilon;
        if e.first < 0 || e.last < e.first || e.last > 30 {
            return Err(ConfigError(format!(
                "epsilon exponents must satisfy 0 <= first <= last <= 30, got {}..{}",
                e.first, e.last
            )));
        }
        EpsilonGrid::dyadic(e.first, e.last, e.kernel_valid).map_err(cfg_err)
    }

    pub fn core_caps(&self) -> Caps {
        Caps {
            m_cap: self.caps.m_cap,
            n_cap: self.caps.n_cap,
            l_cap: self.caps.l_cap,
            max_residual: self.caps.max_residual,
            slack: self.caps.slack,
            ..Caps::default()
        }
    }

    pub fn seminorm_bank(&self) -> SeminormBank {
        let mut b = SeminormBank::schwartz(self.caps.alpha_max, self.caps.beta_max);
        b.queries
            .extend(SeminormBank::compact(&self.caps.compact_radii, self.caps.beta_max).queries);
        b
    }

    pub fn workbench(&self) -> Result<Workbench, ConfigError> {
        Workbench::with_profiles(
            self.grid_spec()?,
            self.epsilon_grid()?,
            self.core_caps(),
            [self.nets.cutoffs[0].into(), self.nets.cutoffs[1].into()],
        )
        .map_err(cfg_err)
    }

    /// `half_width:points`, e.g. `32:4096`.
    pub fn apply_grid_flag(&mut self, flag: &str) -> Result<(), ConfigError> {
        let (l, n) = flag
            .split_once(':')
            .ok_or_else(|| ConfigError(format!("--grid expects half_width:points, got `{flag}`")))?;
        self.grid.half_width = l.trim().parse().map_err(cfg_err)?;
        self.grid.points = n.trim().parse().map_err(cfg_err)?;
        self.validate()
    }

    /// `first:last[:kernel_valid]` as dyadic exponents, e.g. `2:9:4`.
    pub fn apply_eps_flag(&mut self, flag: &str) -> Result<(), ConfigError> {
        let parts: Vec<&str> = flag.split(':').map(str::trim).collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(ConfigError(format!(
                "--eps-grid expects first:last[:kernel_valid], got `{flag}`"
            )));
        }
        self.epsilon.first = parts[0].parse().map_err(cfg_err)?;
        self.epsilon.last = parts[1].parse().map_err(cfg_err)?;
        let len = (self.epsilon.last - self.epsilon.first + 1).max(0) as usize;
        self.epsilon.kernel_valid = match parts.get(2) {
            Some(k) => k.parse().map_err(cfg_err)?,
            None => len.min(4),
        };
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(ScenarioConfig::from_toml("").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn default_scenario_round_trips() {
        let c = ScenarioConfig::default_scenario();
        assert_eq!(ScenarioConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "suites = [\"nope\"]",
            "[grid]\npoints = 1000",
            "[caps]\nbeta_max = 5",
            "[caps]\nl_cap = 3",
            "[caps]\ncompact_radii = [20.0]",
            "[nets]\ncutoffs = [\"steep\", \"steep\"]",
            "[expressions]\nmoderate = [\"iota(delta\"]",
            "[expressions]\nsmoke = [\"F(iota(heaviside))\"]",
            "[epsilon]\nfirst = 5\nlast = 3",
            "[epsilon]\nkernel_valid = 9",
            "[grid]\nunknown = 1",
            "[fourier]\nproperties = [\"vi\"]",
        ] {
            assert!(ScenarioConfig::from_toml(text).is_err(), "{text}");
        }
    }

    #[test]
    fn flags_override() {
        let mut c = ScenarioConfig::default();
        c.apply_grid_flag("16:2048").unwrap();
        assert_eq!(c.grid, GridConfig { half_width: 16.0, points: 2048 });
        c.apply_eps_flag("3:6").unwrap();
        assert_eq!(c.epsilon_grid().unwrap().values(), &[0.125, 0.0625, 0.03125, 0.015625]);
        assert!(c.apply_eps_flag("3").is_err());
        assert!(c.apply_grid_flag("16").is_err());
    }

    proptest! {
        #[test]
        fn epsilon_grid_is_dyadic_and_decreasing(first in 0i32..6, len in 1i32..8) {
            let mut c = ScenarioConfig::default();
            c.epsilon = EpsilonConfig { first, last: first + len - 1, kernel_valid: 0 };
            let g = c.epsilon_grid().unwrap();
            prop_assert_eq!(g.values().len(), len as usize);
            for w in g.values().windows(2) {
                prop_assert_eq!(w[1], w[0] / 2.0);
            }
        }
    }
}
