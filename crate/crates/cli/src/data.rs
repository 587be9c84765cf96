//! Slice ingestion: CSV (one file per hyperplane) or a JSON bundle, both
//! row-major over the periodic grid.

use serde::Deserialize;

use crate::config::DataSource;
use polyspline::transfinite::{HyperplaneData, PolyConfig, Provenance};

#[derive(Debug, Deserialize)]
struct Bundle {
    slices: Vec<Vec<f64>>,
}

/// Parse one CSV slice: any comma/whitespace separated stream of floats,
/// read in row-major order.
fn parse_slice_csv(text: &str, path: &str) -> anyhow::Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for field in line.split([',', ';', ' ', '\t']) {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().map_err(|e| {
                anyhow::anyhow!("{path}:{}: bad value {field:?}: {e}", lineno + 1)
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

pub fn load_data(source: &DataSource, config: &PolyConfig) -> anyhow::Result<HyperplaneData> {
    let slices: Vec<Vec<f64>> = match source {
        DataSource::Slices(paths) => {
            let mut slices = Vec::with_capacity(paths.len());
            for path in paths {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| anyhow::anyhow!("cannot read slice {path}: {e}"))?;
                slices.push(parse_slice_csv(&text, path)?);
            }
            slices
        }
        DataSource::Bundle(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("cannot read bundle {path}: {e}"))?;
            let bundle: Bundle = serde_json::from_str(&text)
                .map_err(|e| anyhow::anyhow!("bundle {path} is not valid: {e}"))?;
            bundle.slices
        }
    };
    Ok(HyperplaneData::new(slices, config, Provenance::Sampled)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_accepts_mixed_separators() {
        let got = parse_slice_csv("1.0, 2.0\n3 4\n# comment\n5.5\n", "x").unwrap();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 4.0, 5.5]);
    }
}
