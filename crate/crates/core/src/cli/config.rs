//! The TOML run configuration. Paths are relative to the configuration
//! file's directory.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub program: String,
    #[serde(default)]
    pub specs: Vec<String>,
    /// Level mappings by name.
    #[serde(default)]
    pub mappings: BTreeMap<String, String>,
    /// Call-success specifications by name.
    #[serde(default)]
    pub callsucc: BTreeMap<String, String>,
    /// Extra constants or terms for the signature.
    #[serde(default)]
    pub signature: Vec<String>,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub splits: Vec<SplitConfig>,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
    pub diagnose: Option<DiagnoseConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_delta")]
    pub delta: usize,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Constants outside the program signature, so that non-membership
    /// witnesses exist.
    #[serde(default = "default_fresh")]
    pub fresh_consts: usize,
    #[serde(default = "default_cap")]
    pub witness_cap: usize,
}

fn default_depth() -> usize {
    3
}
fn default_delta() -> usize {
    2
}
fn default_budget() -> usize {
    10_000
}
fn default_fresh() -> usize {
    1
}
fn default_cap() -> usize {
    crate::diagnose::DEFAULT_WITNESS_CAP
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            depth: default_depth(),
            delta: default_delta(),
            budget: default_budget(),
            fresh_consts: default_fresh(),
            witness_cap: default_cap(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub name: String,
    /// S; the union of the part specifications when absent.
    pub spec: Option<String>,
    pub parts: Vec<PartConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PartConfig {
    pub name: String,
    /// 1-based clause numbers; taken from a `part/2` directive of the
    /// program with the same name when absent.
    pub clauses: Option<Vec<usize>>,
    pub spec: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    /// Specification for completeness (atoms that must be computed).
    pub compl: Option<String>,
    /// Specification for correctness (atoms that may be computed).
    pub corr: Option<String>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Correctness,
    Covered,
    SemiCompleteness,
    RecurrentlyCovered,
    Recurrent,
    Acceptable,
    Completeness,
    LeastModel,
    SpecInclusion,
    Suitable,
    CssldCompleteness,
    AdjustablyCovered,
    CsRuntime,
    CutCompleteness,
    TreeComplete,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    FiniteTrees,
    FiniteTree,
    Recurrent,
    Acceptable,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Verified,
    Refuted,
    Inconclusive,
}

/// One check. Which fields apply depends on `kind`.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub kind: CheckKind,
    pub name: Option<String>,
    pub spec: Option<String>,
    /// Larger specification the program is complete for (completeness), or
    /// the right-hand side of an inclusion.
    pub support: Option<String>,
    pub evidence: Option<EvidenceKind>,
    pub mapping: Option<String>,
    /// S′ of an acceptability argument.
    pub prefix_spec: Option<String>,
    /// Restricts the program to these 1-based clauses.
    pub clauses: Option<Vec<usize>>,
    #[serde(default)]
    pub queries: Vec<String>,
    pub split: Option<String>,
    pub rule: Option<String>,
    /// `[pattern, part]` pairs for the table rule; part 0 selects the empty
    /// program.
    #[serde(default)]
    pub table: Vec<(String, usize)>,
    pub engine: Option<String>,
    /// 1-based part of a split.
    pub part: Option<usize>,
    pub atom: Option<String>,
    pub callsucc: Option<String>,
    pub depth: Option<usize>,
    /// Verdict the check is expected to reach; reported, never enforced.
    pub expect: Option<Expectation>,
}
