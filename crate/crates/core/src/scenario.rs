//! Scenarios: which models, bases, truncation, seed and suites to run. Read from TOML,
//! echoed into the structured report so a run can be replayed.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::laws::{default_bases, Setup};
use crate::ll::{run_ll_suite, Mutation, TruncCfg, LL_SUITES};
use crate::pcr::run_pcm_suite;
use crate::report::{Case, LawReport, SuiteReport};
use crate::spaces::{run_spaces_suite, BaseData, ModelId, SpaceError, ALL_MODELS, SPACES_SUITES};
use crate::summability::{run_summability_suite, SUM_SUITES};
use crate::taylor::{run_taylor_suite, TAYLOR_SUITES};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("unknown suite `{0}` (try --list-suites)")]
    UnknownSuite(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

pub const PCM_SUITE: &str = "pcm.axioms";

/// Every suite id, in run order.
pub fn all_suites() -> Vec<&'static str> {
    let mut v = vec![PCM_SUITE];
    v.extend(SPACES_SUITES);
    v.extend(LL_SUITES);
    v.extend(SUM_SUITES);
    v.extend(TAYLOR_SUITES);
    v
}

/// Expand `all`, group prefixes such as `ll` or `sum`, and exact ids; order follows [`all_suites`].
pub fn expand_suites(ids: &[String]) -> Result<Vec<&'static str>, ScenarioError> {
    let known = all_suites();
    let mut chosen = std::collections::BTreeSet::new();
    for id in ids {
        let hits: Vec<usize> = known
            .iter()
            .enumerate()
            .filter(|(_, k)| id == "all" || *k == id || k.split('.').next() == Some(id.as_str()))
            .map(|(i, _)| i)
            .collect();
        if hits.is_empty() {
            return Err(ScenarioError::UnknownSuite(id.clone()));
        }
        chosen.extend(hits);
    }
    Ok(chosen.into_iter().map(|i| known[i]).collect())
}

fn default_samples() -> usize {
    40
}

fn default_suites() -> Vec<String> {
    vec!["all".into()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// A model tag, or `all`.
    pub model: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub trunc: TruncCfg,
    /// Base spaces X, Y, Z; missing ones take the model defaults.
    #[serde(default)]
    pub spaces: Vec<BaseData>,
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    /// Corrupt one structural matrix before running.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
    /// Where to write the structured report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            model: "all".into(),
            seed: 0,
            samples: default_samples(),
            trunc: TruncCfg::default(),
            spaces: Vec::new(),
            suites: default_suites(),
            mutation: None,
            report: None,
        }
    }
}

/// A finished run: the scenario that produced it and the per-suite results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    #[serde(flatten)]
    pub report: LawReport,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn without_timing(&self) -> RunReport {
        RunReport { scenario: self.scenario.clone(), report: self.report.without_timing() }
    }
}

impl Scenario {
    pub fn parse(text: &str, path: &str) -> Result<Scenario, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse { path: path.into(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read { path: p.clone(), source })?;
        Scenario::parse(&text, &p)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        toml::to_string_pretty(self).map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    pub fn models(&self) -> Result<Vec<ModelId>, ScenarioError> {
        if self.model == "all" {
            return Ok(ALL_MODELS.to_vec());
        }
        self.model
            .split(',')
            .map(|m| ModelId::from_tag(m.trim()).map_err(|_| ScenarioError::UnknownModel(m.trim().into())))
            .collect()
    }

    /// Check model and suite names without running anything.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.models()?;
        // TOML integers are signed 64-bit; keep every scenario writable.
        if i64::try_from(self.seed).is_err() {
            return Err(ScenarioError::Invalid(format!("seed {} exceeds {}", self.seed, i64::MAX)));
        }
        if self.trunc.s_bound == 0 {
            return Err(ScenarioError::Invalid("s_bound must be at least 1".into()));
        }
        expand_suites(&self.suites)?;
        Ok(())
    }

    pub fn setup(&self, model: ModelId) -> Result<Setup, ScenarioError> {
        let bases = if self.spaces.is_empty() { default_bases(model) } else { self.spaces.clone() };
        let mut st = Setup::new(model, &bases, self.trunc, self.samples, self.seed)?;
        st.mutation = self.mutation;
        Ok(st)
    }

    pub fn run(&self) -> Result<RunReport, ScenarioError> {
        let suites = expand_suites(&self.suites)?;
        let mut report = LawReport::default();
        for model in self.models()? {
            let st = self.setup(model)?;
            for id in &suites {
                report.extend(run_suite(id, &st));
            }
        }
        Ok(RunReport { scenario: self.clone(), report })
    }
}

/// Run one suite id against a setup. The axiom battery runs on the model's rig and on its
/// signed counterpart where there is one.
pub fn run_suite(id: &str, st: &Setup) -> LawReport {
    let mut r = LawReport::default();
    let one = if id == PCM_SUITE {
        let pcr = st.model.pcr();
        r.push(run_pcm_suite(&pcr, st.samples, st.seed));
        if let Some(signed) = st.model.signed() {
            r.push(run_pcm_suite(&crate::pcr::PcrInstance::new(signed), st.samples, st.seed));
        }
        return r;
    } else if SPACES_SUITES.contains(&id) {
        run_spaces_suite(id, st)
    } else if LL_SUITES.contains(&id) {
        run_ll_suite(id, st)
    } else if SUM_SUITES.contains(&id) {
        run_summability_suite(id, st)
    } else if TAYLOR_SUITES.contains(&id) {
        run_taylor_suite(id, st)
    } else {
        let mut s = SuiteReport::new(id, st.model.tag());
        let mut c = Case::new("setup");
        c.fail(format!("unknown suite `{id}`"));
        s.push(c.finish());
        s
    };
    r.push(one);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_expand_in_order() {
        let v = expand_suites(&["sum".into(), "pcm.axioms".into()]).unwrap();
        assert_eq!(v[0], PCM_SUITE);
        assert_eq!(&v[1..], &SUM_SUITES);
        assert!(matches!(expand_suites(&["nope".into()]), Err(ScenarioError::UnknownSuite(_))));
    }

    #[test]
    fn parse_errors_carry_location() {
        let e = Scenario::parse("model = \"pcoh\"\nseed = [\n", "s.toml").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("s.toml") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(Scenario::parse("model = \"rel\"\ncolour = 3\n", "x").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let s = Scenario {
            model: "pcoh".into(),
            seed: 9,
            spaces: vec![BaseData::web(2)],
            mutation: Some(Mutation::Dig),
            ..Scenario::default()
        };
        assert_eq!(Scenario::parse(&s.to_toml().unwrap(), "-").unwrap(), s);
    }

    #[test]
    fn oversized_seed_is_rejected() {
        let s = Scenario { seed: u64::MAX, ..Scenario::default() };
        assert!(matches!(s.validate(), Err(ScenarioError::Invalid(_))));
    }
}
