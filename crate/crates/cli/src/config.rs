//! Configuration files and argument parsers.
//!
//! Relative dataset paths inside a configuration file resolve against the
//! file's directory; output paths resolve against the working directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use imict_core::embedding::WalkConfig;
use imict_core::evolution::AlgoConfig;
use imict_core::experiment::{ExperimentSpec, NetworkSource, NetworkSpec};
use imict_core::{CostModel, EvalConfig, ProbabilityModel};

/// Input of `imict solve`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub network: NetworkSpec,
    #[serde(default)]
    pub algorithm: AlgoConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub walk: WalkConfig,
    /// Precomputed embedding file; trained from `walk` when absent.
    #[serde(default)]
    pub embedding: Option<PathBuf>,
}

/// Input of `imict embed train`.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct WalkFile {
    #[serde(default)]
    pub walk: WalkConfig,
}

fn read_toml(path: &Path) -> Result<toml::Table> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid TOML in {}", path.display()))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

pub fn resolve_network(base: &Path, net: &mut NetworkSpec) {
    match &mut net.source {
        NetworkSource::EdgeList { path, .. } | NetworkSource::GraphJson { path } => {
            resolve(base, path)
        }
        _ => {}
    }
    if let CostModel::File { path } = &mut net.cost_model {
        resolve(base, path);
    }
}

pub fn load_solve(path: &Path) -> Result<SolveConfig> {
    let table = read_toml(path)?;
    let mut cfg: SolveConfig = toml::Value::Table(table)
        .try_into()
        .with_context(|| format!("invalid solve configuration in {}", path.display()))?;
    let base = base_dir(path);
    resolve_network(&base, &mut cfg.network);
    if let Some(e) = &mut cfg.embedding {
        resolve(&base, e);
    }
    Ok(cfg)
}

/// `output` overrides the file's `output_dir`; one of the two is required.
pub fn load_experiment(path: &Path, output: Option<&Path>) -> Result<ExperimentSpec> {
    let mut table = read_toml(path)?;
    if let Some(out) = output {
        table.insert(
            "output_dir".into(),
            toml::Value::String(out.to_string_lossy().into_owned()),
        );
    } else if !table.contains_key("output_dir") {
        bail!(
            "no output directory: set output_dir in {} or pass --output",
            path.display()
        );
    }
    let mut spec: ExperimentSpec = toml::Value::Table(table)
        .try_into()
        .with_context(|| format!("invalid experiment configuration in {}", path.display()))?;
    let base = base_dir(path);
    for net in &mut spec.networks {
        resolve_network(&base, net);
    }
    Ok(spec)
}

pub fn load_walk(path: Option<&Path>) -> Result<WalkConfig> {
    match path {
        None => Ok(WalkConfig::default()),
        Some(p) => {
            let file: WalkFile = toml::Value::Table(read_toml(p)?)
                .try_into()
                .with_context(|| format!("invalid walk configuration in {}", p.display()))?;
            Ok(file.walk)
        }
    }
}

pub fn parse_prob(s: &str) -> Result<ProbabilityModel, String> {
    match s {
        "weighted-cascade" | "wc" => Ok(ProbabilityModel::WeightedCascade),
        _ => match s.strip_prefix("constant=") {
            Some(p) => {
                let p: f64 = p
                    .parse()
                    .map_err(|_| format!("invalid probability {p:?}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} is outside [0, 1]"));
                }
                Ok(ProbabilityModel::Constant { p })
            }
            None => Err("expected `weighted-cascade` or `constant=<p>`".into()),
        },
    }
}

pub fn parse_cost(s: &str) -> Result<CostModel, String> {
    match s {
        "degree" => Ok(CostModel::Degree),
        "unit" => Ok(CostModel::Unit),
        _ => match s.strip_prefix("file=") {
            Some(p) if !p.is_empty() => Ok(CostModel::File { path: p.into() }),
            _ => Err("expected `degree`, `unit` or `file=<path>`".into()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_parsers() {
        assert_eq!(parse_prob("wc").unwrap(), ProbabilityModel::WeightedCascade);
        assert_eq!(
            parse_prob("constant=0.1").unwrap(),
            ProbabilityModel::Constant { p: 0.1 }
        );
        assert!(parse_prob("constant=2").is_err());
        assert!(parse_prob("x").is_err());
        assert_eq!(parse_cost("unit").unwrap(), CostModel::Unit);
        assert!(matches!(
            parse_cost("file=c.txt").unwrap(),
            CostModel::File { .. }
        ));
        assert!(parse_cost("file=").is_err());
    }

    #[test]
    fn relative_dataset_paths_follow_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("solve.toml");
        fs::write(
            &path,
            "[network]\nname = \"n\"\nsource = { kind = \"edge_list\", path = \"data/g.txt\" }\n",
        )
        .unwrap();
        let cfg = load_solve(&path).unwrap();
        match cfg.network.source {
            NetworkSource::EdgeList { path, directed } => {
                assert_eq!(path, dir.path().join("data/g.txt"));
                assert!(!directed);
            }
            other => panic!("unexpected source {other:?}"),
        }
    }

    #[test]
    fn experiment_needs_an_output_directory() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.toml");
        fs::write(
            &path,
            "[[networks]]\nname = \"f\"\nsource = { kind = \"supermarket\", p = 1.0 }\n",
        )
        .unwrap();
        assert!(load_experiment(&path, None).is_err());
        let spec = load_experiment(&path, Some(Path::new("out"))).unwrap();
        assert_eq!(spec.output_dir, PathBuf::from("out"));
        assert_eq!(spec.repetitions, 10);
        assert_eq!(spec.algorithms.len(), 4);
    }
}
