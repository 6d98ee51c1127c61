//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use snep_core::{
    CournotInstance64, FactorResolution, FactorRole, FirmParams64, GridSpec, RandomFactor64,
    RepresentativeRule, SolverConfig64,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub factors: FactorsConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub solver: SolverBlock,
    pub run: RunBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub firms: Vec<FirmConfig>,
    pub a: f64,
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmConfig {
    pub c: f64,
    pub k: f64,
    pub b: f64,
    pub q_bar: Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    TruncatedNormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
}

impl Distribution {
    fn build(&self, name: &str) -> anyhow::Result<RandomFactor64> {
        let factor = match *self {
            Self::Constant { value } => RandomFactor64::constant(value),
            Self::Uniform { lo, hi } => RandomFactor64::uniform(lo, hi),
            Self::TruncatedNormal { mu, sigma, lo, hi } => {
                RandomFactor64::truncated_normal(mu, sigma, lo, hi)
            }
        };
        factor.with_context(|| format!("factor `{name}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorsConfig {
    pub r: Distribution,
    pub s: Distribution,
    /// One per firm; defaults to the constant 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Distribution>>,
    /// Defaults to the constant 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Distribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    LowerEndpoint,
    ConditionalMean,
    Midpoint,
}

impl From<Rule> for RepresentativeRule {
    fn from(rule: Rule) -> Self {
        match rule {
            Rule::LowerEndpoint => Self::LowerEndpoint,
            Rule::ConditionalMean => Self::ConditionalMean,
            Rule::Midpoint => Self::Midpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorGrid {
    pub cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Rule>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    /// Per-factor cells keyed by factor name (`r`, `s`, `alpha`, `beta_1`,
    /// `q_bar_1`, ...); unlisted factors get one cell.
    #[serde(default)]
    pub factors: BTreeMap<String, FactorGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_cap: Option<u64>,
    /// Refinement levels for ladder mode, each overriding cell counts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<BTreeMap<String, usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub step_shrink: f64,
    pub gamma: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverConfig64::default();
        Self {
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            initial_step: d.initial_step,
            step_shrink: d.step_shrink,
            gamma: d.gamma,
        }
    }
}

impl From<SolverBlock> for SolverConfig64 {
    fn from(b: SolverBlock) -> Self {
        Self {
            tolerance: b.tolerance,
            max_iterations: b.max_iterations,
            initial_step: b.initial_step,
            step_shrink: b.step_shrink,
            gamma: b.gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Deterministic,
    Discretize,
    Oracle,
    Ladder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub mode: Mode,
    #[serde(default = "one")]
    pub threads: usize,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    /// Also write `cells.csv` in discretize mode.
    #[serde(default)]
    pub write_cells: bool,
    #[serde(default)]
    pub max_flagged_fraction: f64,
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_samples() -> usize {
    10_000
}

impl RunConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.instance()?;
        let names = self.factor_names();
        for (name, grid) in &self.discretization.factors {
            if !names.contains(name) {
                bail!("discretization refers to unknown factor `{name}` (known: {})", names.join(", "));
            }
            if grid.cells < 1 {
                bail!("factor `{name}`: cells must be >= 1");
            }
        }
        for (level, cells) in self.discretization.ladder.iter().enumerate() {
            for (name, &n) in cells {
                if !names.contains(name) {
                    bail!("ladder level {level} refers to unknown factor `{name}`");
                }
                if n < 1 {
                    bail!("ladder level {level}, factor `{name}`: cells must be >= 1");
                }
            }
        }
        if self.run.mode == Mode::Ladder && self.discretization.ladder.len() < 2 {
            bail!("ladder mode needs at least two levels in discretization.ladder");
        }
        if self.run.threads < 1 {
            bail!("run.threads must be >= 1");
        }
        if self.run.n_samples < 1 {
            bail!("run.n_samples must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.run.max_flagged_fraction) {
            bail!("run.max_flagged_fraction must lie in [0, 1]");
        }
        SolverConfig64::from(self.solver).validate()?;
        Ok(())
    }

    /// Factor names in grid order.
    pub fn factor_names(&self) -> Vec<String> {
        let m = self.model.firms.len();
        let mut roles = vec![FactorRole::CostShift, FactorRole::PriceShift];
        roles.extend((0..m).map(FactorRole::CostScale));
        roles.extend((0..m).map(FactorRole::Capacity));
        roles.push(FactorRole::PriceScale);
        roles.iter().map(FactorRole::name).collect()
    }

    pub fn instance(&self) -> anyhow::Result<CournotInstance64> {
        let firms = self
            .model
            .firms
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let q_bar = f.q_bar.build(&format!("q_bar_{}", i + 1))?;
                FirmParams64::new(f.c, f.k, f.b, q_bar).with_context(|| format!("firm {}", i + 1))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let m = firms.len();
        if m == 0 {
            bail!("model.firms must list at least one firm");
        }
        let mut instance = CournotInstance64::new(
            firms,
            self.model.a,
            self.model.e,
            self.factors.r.build("r")?,
            self.factors.s.build("s")?,
        )?;
        if let Some(beta) = &self.factors.beta {
            if beta.len() != m {
                bail!("factors.beta lists {} factors for {m} firms", beta.len());
            }
            let beta = beta
                .iter()
                .enumerate()
                .map(|(i, d)| d.build(&format!("beta_{}", i + 1)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            instance = instance.with_beta_factors(beta)?;
        }
        if let Some(alpha) = &self.factors.alpha {
            instance = instance.with_alpha_factor(alpha.build("alpha")?)?;
        }
        Ok(instance)
    }

    /// Grid for the configured cell counts, with `overrides` on top.
    pub fn grid_spec(&self, overrides: &BTreeMap<String, usize>) -> GridSpec {
        let m = self.model.firms.len();
        let mut spec = GridSpec::new(m, 1, 1);
        if let Some(cap) = self.discretization.cell_cap {
            spec.cell_cap = cap as u128;
        }
        let apply = |name: &str, slot: &mut FactorResolution| {
            if let Some(g) = self.discretization.factors.get(name) {
                slot.cells = g.cells;
                if let Some(rule) = g.rule {
                    slot.rule = rule.into();
                }
            }
            if let Some(&n) = overrides.get(name) {
                slot.cells = n;
            }
        };
        apply("r", &mut spec.r);
        apply("s", &mut spec.s);
        apply("alpha", &mut spec.alpha);
        for i in 0..m {
            apply(&format!("beta_{}", i + 1), &mut spec.beta[i]);
            apply(&format!("q_bar_{}", i + 1), &mut spec.capacity[i]);
        }
        spec
    }
}
