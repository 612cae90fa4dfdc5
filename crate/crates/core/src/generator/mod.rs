//! Reproducible instance generation.
//!
//! Generation runs in two phases: [`layout`] fixes the grid, highways,
//! picking stations and robots; [`populate`] adds shelves, products, units
//! and orders. Every random choice draws from a stream derived from the seed
//! and the stage name.

mod batch;
mod config;
mod layout;
mod populate;
pub mod rng;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use batch::{load_batch, run_batch, BatchConfig, ManifestEntry};
pub use config::GenConfig;
pub use layout::{cluster_origins, layout};
pub use populate::{chunk_sizes, populate, PopulateStats};

use crate::facts_io::{build_instance, parse_facts, serialize_instance};
use crate::model::Instance;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot place {requested} {kind} objects, capacity is {capacity}")]
    CapacityExceeded { kind: &'static str, requested: u32, capacity: u32 },
    #[error("invalid template: {0}")]
    TemplateInvalid(String),
    #[error("{stage} stage infeasible: {detail}")]
    Infeasible { stage: &'static str, detail: String },
    #[error("{path}: {detail}")]
    Io { path: PathBuf, detail: String },
    #[error("batch file: {0}")]
    Batch(String),
    #[error("variant {name}: {source}")]
    Variant { name: String, source: Box<GenError> },
}

/// One generated instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub name: String,
    pub seed: u64,
    pub instance: Instance,
    pub header: Vec<String>,
    pub text: String,
}

/// `x{x}_y{y}_n{nodes}_r{r}_s{s}_ps{p}_pr{P}_u{u}_o{o}_N{index:03}.lp`
pub fn instance_name(cfg: &GenConfig, nodes: usize, index: u32) -> String {
    format!(
        "x{}_y{}_n{}_r{}_s{}_ps{}_pr{}_u{}_o{}_N{:03}.lp",
        cfg.x, cfg.y, nodes, cfg.robots, cfg.shelves, cfg.stations, cfg.products, cfg.units, cfg.orders, index
    )
}

/// Reproducibility header: tool version, invocation and seed.
pub fn header(cfg: &GenConfig, seed: u64) -> Vec<String> {
    vec![crate::version_string(), format!("invocation: {}", cfg.invocation(seed)), format!("seed: {seed}")]
}

pub fn load_template(path: &Path) -> Result<Instance, GenError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| GenError::Io { path: path.to_path_buf(), detail: e.to_string() })?;
    let facts = parse_facts(&text).map_err(|e| GenError::TemplateInvalid(e.to_string()))?;
    build_instance(&facts).map_err(|e| GenError::TemplateInvalid(e.to_string()))
}

/// Generates one instance with `seed`, ignoring `cfg.seed` and `cfg.count`.
pub fn generate_with_seed(
    cfg: &GenConfig,
    template: Option<&Instance>,
    seed: u64,
) -> Result<(Instance, PopulateStats), GenError> {
    let cfg = GenConfig { seed, ..cfg.clone() };
    cfg.validate()?;
    populate(layout(&cfg, template)?, &cfg)
}

/// Generates the `cfg.count` instances of a run. With a single instance the
/// file seed is `cfg.seed`; otherwise each file derives its own seed.
pub fn generate(cfg: &GenConfig) -> Result<Vec<Generated>, GenError> {
    cfg.validate()?;
    let template = cfg.template.as_deref().map(load_template).transpose()?;
    (1..=cfg.count)
        .map(|i| {
            let seed = if cfg.count == 1 { cfg.seed } else { rng::file_seed(cfg.seed, i) };
            let (instance, _) = generate_with_seed(cfg, template.as_ref(), seed)?;
            let header = header(cfg, seed);
            let text = serialize_instance(&instance, &header);
            Ok(Generated { name: instance_name(cfg, instance.nodes.len(), i), seed, instance, header, text })
        })
        .collect()
}
