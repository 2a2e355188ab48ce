//! Run configuration: a flat TOML file with sections `grid`, `physics`,
//! `init`, `time`, `monitors`, `output`. Unknown keys are rejected with the
//! parser's line/key-precise message.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::PhysParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub init: InitSection,
    pub time: TimeSection,
    pub monitors: MonitorsSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub gamma: f64,
    /// Background field in symmetrized units; defaults to scalar 1 in 2D and
    /// (0, 0, 1) in 3D.
    #[serde(default)]
    pub b_bar: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub amplitude: f64,
    pub seed: u64,
    /// Dyadic band `(q_lo, q_hi)`: initial spectral support `2^q_lo <= |k| <= 2^q_hi`.
    pub band: [i32; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// Horizon in the symmetrized clock.
    pub t_end: f64,
    pub cfl: f64,
    /// Snapshot cadence in steps.
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MonitorsSection {
    pub blowup_threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Diagnostic norm columns for the CSV series; see [`norm_names`].
    #[serde(default)]
    pub norms: Option<Vec<String>>,
}

/// Supported per-step diagnostic norm columns:
/// `w_sc` = `B^{s_c}_{2,1}` of the concatenated state,
/// `e_scm1` = `B^{s_c-1}_{2,1}` of `Ẽ`,
/// `b_scm2` = `B^{s_c-2}_{2,1}` of `B̃`.
pub const NORM_NAMES: [&str; 3] = ["w_sc", "e_scm1", "b_scm2"];

impl RunConfig {
    pub fn load<P: AsRef<Path>>(path: P) -> Result<RunConfig> {
        let text = std::fs::read_to_string(&path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        GridSpec::new(self.grid.dim, self.grid.n)?;
        PhysParams::new(
            self.physics.gamma,
            self.effective_b_bar(),
            self.grid.dim,
        )?;
        if !(self.time.t_end > 0.0) {
            return Err(Error::Config(format!(
                "time.t_end must be > 0, got {}",
                self.time.t_end
            )));
        }
        if !(self.time.cfl > 0.0 && self.time.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "time.cfl must be in (0, 1], got {}",
                self.time.cfl
            )));
        }
        if self.time.snapshot_every == 0 {
            return Err(Error::Config("time.snapshot_every must be >= 1".into()));
        }
        if !(self.init.amplitude >= 0.0) {
            return Err(Error::Config(format!(
                "init.amplitude must be >= 0, got {}",
                self.init.amplitude
            )));
        }
        if !(self.monitors.blowup_threshold > 0.0) {
            return Err(Error::Config(format!(
                "monitors.blowup_threshold must be > 0, got {}",
                self.monitors.blowup_threshold
            )));
        }
        for name in self.norm_columns() {
            if !NORM_NAMES.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "output.norms entry {name:?} unknown; supported: {NORM_NAMES:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid.dim, self.grid.n).expect("validated")
    }

    pub fn effective_b_bar(&self) -> Vec<f64> {
        self.physics
            .b_bar
            .clone()
            .unwrap_or_else(|| PhysParams::default_b_bar(self.grid.dim))
    }

    pub fn params(&self) -> PhysParams {
        PhysParams::new(self.physics.gamma, self.effective_b_bar(), self.grid.dim)
            .expect("validated")
    }

    pub fn norm_columns(&self) -> Vec<String> {
        self.output
            .norms
            .clone()
            .unwrap_or_else(|| vec!["w_sc".to_string()])
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
[grid]
dim = 2
n = 32

[physics]
gamma = 2.0

[init]
amplitude = 1e-3
seed = 7
band = [1, 2]

[time]
t_end = 20.0
cfl = 0.45
snapshot_every = 2

[monitors]
blowup_threshold = 100.0

[output]
dir = "runs/small"
"#;

    #[test]
    fn parses_and_validates() {
        let cfg = RunConfig::parse(GOOD).unwrap();
        assert_eq!(cfg.grid.n, 32);
        assert_eq!(cfg.effective_b_bar(), vec![1.0]);
        assert_eq!(cfg.norm_columns(), vec!["w_sc".to_string()]);
        // round trip through the echo
        let echo = cfg.to_toml();
        assert_eq!(RunConfig::parse(&echo).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_named_in_error() {
        let bad = GOOD.replace("cfl = 0.45", "cfl = 0.45\nwhatever = 1");
        let err = RunConfig::parse(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("whatever"), "message was: {msg}");
    }

    #[test]
    fn bad_values_are_rejected() {
        for (from, to) in [
            ("gamma = 2.0", "gamma = 1.0"),
            ("n = 32", "n = 17"),
            ("cfl = 0.45", "cfl = 1.5"),
            ("t_end = 20.0", "t_end = -1.0"),
            ("snapshot_every = 2", "snapshot_every = 0"),
        ] {
            let bad = GOOD.replace(from, to);
            assert!(RunConfig::parse(&bad).is_err(), "accepted {to}");
        }
        let bad_norm = GOOD.replace("dir = \"runs/small\"", "dir = \"x\"\nnorms = [\"nope\"]");
        assert!(RunConfig::parse(&bad_norm).is_err());
    }
}
