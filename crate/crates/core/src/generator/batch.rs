use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_yaml::{Mapping, Value};

use super::{generate, GenConfig, GenError};

/// A batch file: a partial configuration shared by all variants, named
/// overrides, and the output directory.
///
/// ```yaml
/// preset: {x: 11, y: 6, X: 4, Y: 2, p: 1, s: 16, P: 16, u: 16, H: true, prs: 1, N: 30}
/// variants:
///   - r2: {r: 2, o: 2}
///   - r5: {r: 5, o: 5}
/// output_dir: small
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct BatchConfig {
    pub preset: Mapping,
    pub variants: Vec<(String, Mapping)>,
    pub output_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBatch {
    #[serde(default)]
    preset: Mapping,
    #[serde(default)]
    variants: Vec<Mapping>,
    output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub variant: String,
    pub path: PathBuf,
    pub seed: u64,
}

impl BatchConfig {
    pub fn from_yaml(text: &str) -> Result<Self, GenError> {
        let raw: RawBatch = serde_yaml::from_str(text).map_err(|e| GenError::Batch(e.to_string()))?;
        let mut variants = Vec::new();
        for v in raw.variants {
            if v.len() != 1 {
                return Err(GenError::Batch("each variant must be a single `name: {overrides}` entry".into()));
            }
            let (name, overrides) = v.into_iter().next().unwrap();
            let name = match name {
                Value::String(s) => s,
                other => serde_yaml::to_string(&other).map_err(|e| GenError::Batch(e.to_string()))?.trim().to_string(),
            };
            let overrides = match overrides {
                Value::Mapping(m) => m,
                Value::Null => Mapping::new(),
                _ => return Err(GenError::Batch(format!("variant {name}: overrides must be a mapping"))),
            };
            variants.push((name, overrides));
        }
        Ok(BatchConfig { preset: raw.preset, variants, output_dir: raw.output_dir })
    }

    /// The preset with the overrides of variant `index` applied.
    pub fn config(&self, index: usize) -> Result<GenConfig, GenError> {
        let (name, overrides) = &self.variants[index];
        let mut merged = self.preset.clone();
        for (k, v) in overrides {
            merged.insert(k.clone(), v.clone());
        }
        let wrap = |source: GenError| GenError::Variant { name: name.clone(), source: Box::new(source) };
        let cfg: GenConfig =
            serde_yaml::from_value(Value::Mapping(merged)).map_err(|e| wrap(GenError::InvalidConfig(e.to_string())))?;
        cfg.validate().map_err(wrap)?;
        Ok(cfg)
    }
}

pub fn load_batch(path: &Path) -> Result<BatchConfig, GenError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| GenError::Io { path: path.to_path_buf(), detail: e.to_string() })?;
    BatchConfig::from_yaml(&text)
}

/// Writes every instance of every variant to `output_dir/<variant>/` and
/// returns the manifest in generation order.
pub fn run_batch(batch: &BatchConfig) -> Result<Vec<ManifestEntry>, GenError> {
    let mut manifest = Vec::new();
    for (i, (name, _)) in batch.variants.iter().enumerate() {
        let cfg = batch.config(i)?;
        let wrap = |source: GenError| GenError::Variant { name: name.clone(), source: Box::new(source) };
        let dir = batch.output_dir.join(name);
        std::fs::create_dir_all(&dir).map_err(|e| wrap(GenError::Io { path: dir.clone(), detail: e.to_string() }))?;
        for g in generate(&cfg).map_err(wrap)? {
            let path = dir.join(&g.name);
            std::fs::write(&path, &g.text)
                .map_err(|e| wrap(GenError::Io { path: path.clone(), detail: e.to_string() }))?;
            manifest.push(ManifestEntry { variant: name.clone(), path, seed: g.seed });
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_merge() {
        let batch = BatchConfig::from_yaml(
            "preset: {x: 11, y: 6, X: 4, Y: 2, p: 1, s: 16, P: 16, u: 16, H: true, prs: 1}\n\
             variants:\n  - r2: {r: 2, o: 2}\n  - r5: {r: 5, o: 5}\noutput_dir: out\n",
        )
        .unwrap();
        assert_eq!(batch.variants.len(), 2);
        let cfg = batch.config(1).unwrap();
        assert_eq!((cfg.robots, cfg.orders, cfg.shelves), (5, 5, 16));
    }

    #[test]
    fn bad_override_names_the_variant() {
        let batch =
            BatchConfig::from_yaml("preset: {x: 3, y: 3}\nvariants:\n  - broken: {q: 1}\noutput_dir: out\n").unwrap();
        let err = batch.config(0).unwrap_err();
        assert!(err.to_string().starts_with("variant broken:"), "{err}");
    }

    #[test]
    fn empty_batch_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!("preset: {{x: 3, y: 3}}\nvariants: []\noutput_dir: {}\n", dir.path().display());
        let manifest = run_batch(&BatchConfig::from_yaml(&text).unwrap()).unwrap();
        assert!(manifest.is_empty());
    }
}
