use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::GenError;

/// Generator parameters. Field names in serialized form follow the command
/// line flags (`x`, `X`, `prs`, ...).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenConfig {
    pub x: u32,
    pub y: u32,
    /// Storage-cluster width.
    #[serde(rename = "X")]
    pub cluster_x: u32,
    /// Storage-cluster height.
    #[serde(rename = "Y")]
    pub cluster_y: u32,
    #[serde(rename = "p")]
    pub stations: u32,
    #[serde(rename = "s")]
    pub shelves: u32,
    #[serde(rename = "r")]
    pub robots: u32,
    #[serde(rename = "P")]
    pub products: u32,
    #[serde(rename = "u")]
    pub units: u32,
    #[serde(rename = "o")]
    pub orders: u32,
    /// Maximum number of distinct products on one shelf; unbounded if absent.
    pub prs: Option<u32>,
    #[serde(rename = "H")]
    pub structured: bool,
    pub reach: bool,
    #[serde(rename = "N")]
    pub count: u32,
    #[serde(rename = "I")]
    pub incremental: bool,
    pub threshold: u32,
    pub seed: u64,
    pub template: Option<PathBuf>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            x: 1,
            y: 1,
            cluster_x: 2,
            cluster_y: 1,
            stations: 0,
            shelves: 0,
            robots: 0,
            products: 0,
            units: 0,
            orders: 0,
            prs: None,
            structured: false,
            reach: false,
            count: 1,
            incremental: false,
            threshold: 20,
            seed: 0,
            template: None,
        }
    }
}

impl GenConfig {
    /// Checks count relations that do not depend on the layout.
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.template.is_none() && (self.x == 0 || self.y == 0) {
            return bad("grid dimensions must be positive".into());
        }
        if self.structured && (self.cluster_x == 0 || self.cluster_y == 0) {
            return bad("cluster dimensions must be positive".into());
        }
        if self.units < self.products {
            return bad(format!("{} units cannot stock {} products", self.units, self.products));
        }
        if self.products > 0 && self.shelves == 0 {
            return bad("products need at least one shelf".into());
        }
        if let Some(prs) = self.prs {
            if (self.products as u64) > self.shelves as u64 * prs as u64 {
                return bad(format!(
                    "{} products do not fit on {} shelves with at most {} products each",
                    self.products, self.shelves, prs
                ));
            }
        }
        if self.orders > 0 && self.products == 0 {
            return bad("orders need at least one product".into());
        }
        if self.orders > 0 && self.stations == 0 && self.template.is_none() {
            return bad("orders need at least one picking station".into());
        }
        if self.count == 0 {
            return bad("N must be at least 1".into());
        }
        if self.incremental && self.threshold == 0 {
            return bad("threshold must be positive".into());
        }
        Ok(())
    }

    /// Chunk size for placements: the threshold when splitting, otherwise
    /// everything at once.
    pub fn chunk(&self) -> usize {
        if self.incremental {
            self.threshold as usize
        } else {
            usize::MAX
        }
    }

    /// Command line reproducing one file generated with `seed`.
    pub fn invocation(&self, seed: u64) -> String {
        let mut parts = vec!["gen".to_string()];
        let mut flag = |name: &str, v: String| {
            parts.push(name.to_string());
            parts.push(v);
        };
        flag("-x", self.x.to_string());
        flag("-y", self.y.to_string());
        if self.structured {
            flag("-X", self.cluster_x.to_string());
            flag("-Y", self.cluster_y.to_string());
        }
        flag("-p", self.stations.to_string());
        flag("-s", self.shelves.to_string());
        flag("-r", self.robots.to_string());
        flag("-P", self.products.to_string());
        flag("-u", self.units.to_string());
        flag("-o", self.orders.to_string());
        if let Some(prs) = self.prs {
            flag("--prs", prs.to_string());
        }
        if self.incremental {
            flag("--threshold", self.threshold.to_string());
        }
        if let Some(t) = &self.template {
            flag("--template", t.display().to_string());
        }
        flag("--seed", seed.to_string());
        if self.structured {
            parts.push("-H".into());
        }
        if self.incremental {
            parts.push("-I".into());
        }
        if self.reach {
            parts.push("--reach".into());
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_names_in_serialized_form() {
        let cfg: GenConfig = serde_json::from_str(r#"{"x":11,"y":6,"X":4,"Y":2,"p":1,"H":true,"prs":1}"#).unwrap();
        assert_eq!((cfg.x, cfg.cluster_x, cfg.cluster_y, cfg.stations), (11, 4, 2, 1));
        assert!(cfg.structured);
        assert_eq!(cfg.prs, Some(1));
        assert!(serde_json::from_str::<GenConfig>(r#"{"z":1}"#).is_err());
    }

    #[test]
    fn invalid_counts() {
        let cfg = GenConfig { products: 5, units: 4, shelves: 5, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = GenConfig { products: 5, units: 5, shelves: 2, prs: Some(2), ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(GenConfig::default().validate().is_ok());
    }

    #[test]
    fn invocation_lists_flags() {
        let cfg = GenConfig {
            x: 11,
            y: 6,
            cluster_x: 4,
            cluster_y: 2,
            stations: 1,
            shelves: 16,
            robots: 2,
            products: 16,
            units: 16,
            orders: 2,
            prs: Some(1),
            structured: true,
            ..Default::default()
        };
        assert_eq!(cfg.invocation(9), "gen -x 11 -y 6 -X 4 -Y 2 -p 1 -s 16 -r 2 -P 16 -u 16 -o 2 --prs 1 --seed 9 -H");
    }
}
