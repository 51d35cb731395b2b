use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::bisim::BisimKind;
use crate::encode::MAX_NODES;
use crate::error::{Error, Result};
use crate::solve::Backend;

/// The concept language searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fragment {
    Alc,
    Alci,
    Alcq,
    Alcqf,
    Alcqi,
    Alcqif,
}

impl Fragment {
    pub const ALL: [Fragment; 6] = [
        Fragment::Alc,
        Fragment::Alci,
        Fragment::Alcq,
        Fragment::Alcqf,
        Fragment::Alcqi,
        Fragment::Alcqif,
    ];

    pub fn inverse(self) -> bool {
        matches!(self, Fragment::Alci | Fragment::Alcqi | Fragment::Alcqif)
    }

    pub fn qualified(self) -> bool {
        !matches!(self, Fragment::Alc | Fragment::Alci)
    }

    pub fn features(self) -> bool {
        matches!(self, Fragment::Alcqf | Fragment::Alcqif)
    }

    /// The bisimulation matching the fragment's expressive power.
    pub fn bisim_kind(self) -> BisimKind {
        if self.qualified() {
            BisimKind::Alcq
        } else {
            BisimKind::Alc
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Alc => "alc",
            Fragment::Alci => "alci",
            Fragment::Alcq => "alcq",
            Fragment::Alcqf => "alcqf",
            Fragment::Alcqi => "alcqi",
            Fragment::Alcqif => "alcqif",
        })
    }
}

impl FromStr for Fragment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fragment::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown fragment `{s}`")))
    }
}

/// Bound on the numbers in restrictions at stage `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GMode {
    /// `ceil(c * k)`.
    Linear(f64),
    /// The same bound at every stage.
    Cap(u32),
}

impl GMode {
    pub fn g(&self, k: usize) -> u32 {
        match *self {
            GMode::Linear(c) => (c * k as f64).ceil().max(0.0) as u32,
            GMode::Cap(n) => n,
        }
    }
}

/// Number of thresholds per feature at stage `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NfMode {
    /// `m * k`.
    PerStage(u32),
    Fixed(u32),
}

impl NfMode {
    pub fn n_f(&self, k: usize) -> usize {
        match *self {
            NfMode::PerStage(m) => m as usize * k,
            NfMode::Fixed(n) => n as usize,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub fragment: Fragment,
    pub max_stage: usize,
    pub g_mode: GMode,
    pub nf_mode: NfMode,
    pub threads: usize,
    pub stage_timeout: Option<Duration>,
    pub timeout: Option<Duration>,
    /// Fall back to the best approximation when no concept fits.
    pub approx: bool,
    pub quotient: bool,
    pub seed: u64,
    pub backend: Backend,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            fragment: Fragment::Alcqif,
            max_stage: 12,
            g_mode: GMode::Linear(1.0),
            nf_mode: NfMode::PerStage(1),
            threads: 1,
            stage_timeout: None,
            timeout: None,
            approx: false,
            quotient: true,
            seed: 0,
            backend: Backend::Builtin,
        }
    }
}

impl SearchConfig {
    pub fn with_fragment(fragment: Fragment) -> Self {
        SearchConfig {
            fragment,
            ..Self::default()
        }
    }

    /// Checks the configuration and returns warnings for settings that
    /// give up completeness.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.max_stage == 0 || self.max_stage > MAX_NODES {
            return Err(Error::Config(format!(
                "max stage {} outside 1..={MAX_NODES}",
                self.max_stage
            )));
        }
        if self.threads == 0 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        match self.g_mode {
            GMode::Linear(c) if !(c.is_finite() && c > 0.0) => {
                return Err(Error::Config(format!("linear factor {c} must be positive")));
            }
            GMode::Linear(c) if c < 1.0 => warnings.push(format!(
                "linear factor {c} below 1: numbers up to the stage size are not all available"
            )),
            GMode::Cap(n) => warnings.push(format!(
                "constant number bound {n}: fitting concepts needing larger numbers are missed"
            )),
            GMode::Linear(_) => {}
        }
        match self.nf_mode {
            NfMode::PerStage(0) | NfMode::Fixed(0) if self.fragment.features() => {
                warnings.push("no feature thresholds: features are ignored".into());
            }
            _ => {}
        }
        Ok(warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments_parse_case_insensitively() {
        assert_eq!("ALCQIf".parse::<Fragment>().unwrap(), Fragment::Alcqif);
        assert!("el".parse::<Fragment>().is_err());
        assert!(Fragment::Alci.inverse() && !Fragment::Alci.qualified());
    }

    #[test]
    fn schedules() {
        assert_eq!(GMode::Linear(1.0).g(3), 3);
        assert_eq!(GMode::Linear(1.5).g(3), 5);
        assert_eq!(GMode::Cap(3).g(10), 3);
        assert_eq!(NfMode::PerStage(2).n_f(3), 6);
        assert_eq!(NfMode::Fixed(4).n_f(9), 4);
    }

    #[test]
    fn validation() {
        let mut c = SearchConfig::default();
        assert!(c.validate().unwrap().is_empty());
        c.g_mode = GMode::Cap(3);
        assert_eq!(c.validate().unwrap().len(), 1);
        c.g_mode = GMode::Linear(0.0);
        assert!(c.validate().is_err());
        c.g_mode = GMode::Linear(1.0);
        c.threads = 0;
        assert!(c.validate().is_err());
    }
}
