//! Stage constants of the construction, as named presets plus a flat
//! `key=value` override format.

use std::fmt;
use std::fmt::Write as _;

use crate::prob::{ResamplePolicy, ResampleScope};

use super::PipelineError;

/// Resampling policy of one sampling stage. `max` of `None` means the
/// default cap: 100 redraws globally, `10·n` events locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StagePolicy {
    pub scope: ResampleScope,
    pub max: Option<usize>,
}

impl StagePolicy {
    pub const GLOBAL: StagePolicy = StagePolicy {
        scope: ResampleScope::GlobalRestart,
        max: None,
    };
    pub const LOCAL: StagePolicy = StagePolicy {
        scope: ResampleScope::LocalResample,
        max: None,
    };

    pub fn resolve(&self, n: usize) -> ResamplePolicy {
        match self.scope {
            ResampleScope::GlobalRestart => ResamplePolicy::global(self.max.unwrap_or(100)),
            ResampleScope::LocalResample => {
                ResamplePolicy::local(self.max.unwrap_or(10 * n.max(1)))
            }
        }
    }
}

impl fmt::Display for StagePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = match self.scope {
            ResampleScope::GlobalRestart => "global",
            ResampleScope::LocalResample => "local",
        };
        match self.max {
            Some(m) => write!(f, "{scope}:{m}"),
            None => f.write_str(scope),
        }
    }
}

fn parse_policy(s: &str) -> Option<StagePolicy> {
    let (scope, max) = match s.split_once(':') {
        Some((a, b)) => (a, Some(b.parse().ok()?)),
        None => (s, None),
    };
    let scope = match scope {
        "global" => ResampleScope::GlobalRestart,
        "local" => ResampleScope::LocalResample,
        _ => return None,
    };
    Some(StagePolicy { scope, max })
}

/// Numeric constants of every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    /// `V_S = {d ≤ Δ·small_frac}`.
    pub small_frac: f64,
    /// `V_L = {d ≥ Δ·large_frac}`.
    pub large_frac: f64,
    /// `V_M` starts at degree `Δ^medium_exp + 1`.
    pub medium_exp: f64,
    /// Base subgraph edges are kept with probability `sampling_coef/√Δ`.
    pub sampling_coef: f64,
    pub b_coef1: f64,
    pub b_coef2: f64,
    /// Slack exponent of the auxiliary-graph degree bound.
    pub aux_slack_exp: f64,
    /// Slack exponent of the base-subgraph concentration window and of the
    /// second term of `B`.
    pub base_slack_exp: f64,
    pub min_delta: usize,
    pub aux_policy: StagePolicy,
    pub base_policy: StagePolicy,
}

impl Profile {
    /// The constants as stated for the asymptotic regime.
    pub fn paper() -> Self {
        Profile {
            name: "paper".into(),
            small_frac: 0.25,
            large_frac: 1.0 / 32.0,
            medium_exp: 0.5,
            sampling_coef: 6.0,
            b_coef1: 23.0,
            b_coef2: 3.0,
            aux_slack_exp: 1.0 / 3.0,
            base_slack_exp: 1.0 / 3.0,
            min_delta: 64,
            aux_policy: StagePolicy::GLOBAL,
            base_policy: StagePolicy::GLOBAL,
        }
    }

    /// Constants that keep every stage feasible for `64 ≤ Δ ≤ 512`: a `√Δ`
    /// concentration window for the base subgraph, `V_L` starting at `Δ/4`,
    /// and a smaller `B` so the palette stays under `Δ + 95√Δ`.
    pub fn desk() -> Self {
        Profile {
            name: "desk".into(),
            small_frac: 0.25,
            large_frac: 0.25,
            medium_exp: 0.5,
            sampling_coef: 6.0,
            b_coef1: 17.0,
            b_coef2: 3.0,
            aux_slack_exp: 1.0 / 3.0,
            base_slack_exp: 0.5,
            min_delta: 64,
            aux_policy: StagePolicy::LOCAL,
            base_policy: StagePolicy::LOCAL,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper" => Some(Self::paper()),
            "desk" => Some(Self::desk()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |reason: String| Err(PipelineError::InvalidProfile(reason));
        if !(self.large_frac > 0.0 && self.large_frac <= self.small_frac && self.small_frac < 1.0) {
            return bad(format!(
                "need 0 < large_frac ≤ small_frac < 1, got {} and {}",
                self.large_frac, self.small_frac
            ));
        }
        if self.sampling_coef.is_nan() || self.sampling_coef <= 0.0 {
            return bad(format!(
                "sampling_coef must be positive, got {}",
                self.sampling_coef
            ));
        }
        if !(self.b_coef1 > 0.0 && self.b_coef2 > 0.0) {
            return bad(format!(
                "B coefficients must be positive, got {} and {}",
                self.b_coef1, self.b_coef2
            ));
        }
        for (key, e) in [
            ("medium_exp", self.medium_exp),
            ("aux_slack_exp", self.aux_slack_exp),
            ("base_slack_exp", self.base_slack_exp),
        ] {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("{key} must lie in [0, 1], got {e}"));
            }
        }
        Ok(())
    }

    /// Applies `key=value` lines (blank lines and `#` comments ignored). A
    /// `base=<preset>` line restarts from that preset.
    pub fn apply_overrides(&mut self, text: &str) -> Result<(), PipelineError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| {
                PipelineError::InvalidProfile(format!("line {}: {msg}: {line:?}", i + 1))
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<f64>().map_err(|_| err("not a number"));
            match key {
                "base" => {
                    let name = self.name.clone();
                    *self = Profile::preset(value).ok_or_else(|| err("unknown preset"))?;
                    self.name = name;
                }
                "name" => self.name = value.to_string(),
                "small_frac" => self.small_frac = num()?,
                "large_frac" => self.large_frac = num()?,
                "medium_exp" => self.medium_exp = num()?,
                "sampling_coef" => self.sampling_coef = num()?,
                "b_coef1" => self.b_coef1 = num()?,
                "b_coef2" => self.b_coef2 = num()?,
                "aux_slack_exp" => self.aux_slack_exp = num()?,
                "base_slack_exp" => self.base_slack_exp = num()?,
                "min_delta" => self.min_delta = value.parse().map_err(|_| err("not an integer"))?,
                "aux_policy" => {
                    self.aux_policy = parse_policy(value).ok_or_else(|| err("bad policy"))?
                }
                "base_policy" => {
                    self.base_policy = parse_policy(value).ok_or_else(|| err("bad policy"))?
                }
                _ => return Err(err("unknown key")),
            }
        }
        self.validate()
    }

    /// Preset named `name`, or the desk preset overridden by the file
    /// contents when `name` is not a preset.
    pub fn from_key_values(name: &str, text: &str) -> Result<Self, PipelineError> {
        let mut p = Profile::desk();
        p.name = name.to_string();
        p.apply_overrides(text)?;
        Ok(p)
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name={}", self.name);
        let _ = writeln!(out, "small_frac={}", self.small_frac);
        let _ = writeln!(out, "large_frac={}", self.large_frac);
        let _ = writeln!(out, "medium_exp={}", self.medium_exp);
        let _ = writeln!(out, "sampling_coef={}", self.sampling_coef);
        let _ = writeln!(out, "b_coef1={}", self.b_coef1);
        let _ = writeln!(out, "b_coef2={}", self.b_coef2);
        let _ = writeln!(out, "aux_slack_exp={}", self.aux_slack_exp);
        let _ = writeln!(out, "base_slack_exp={}", self.base_slack_exp);
        let _ = writeln!(out, "min_delta={}", self.min_delta);
        let _ = writeln!(out, "aux_policy={}", self.aux_policy);
        let _ = writeln!(out, "base_policy={}", self.base_policy);
        out
    }
}

impl Default for Profile {
    fn default() -> Self {
        Profile::paper()
    }
}

/// `Δ^exp`, using the exact square and cube roots for those exponents.
pub fn power(delta: f64, exp: f64) -> f64 {
    if exp == 0.5 {
        delta.sqrt()
    } else if (exp - 1.0 / 3.0).abs() < 1e-15 {
        delta.cbrt()
    } else {
        delta.powf(exp)
    }
}
