//! Grid specifications for `eval`: `t=lo:hi:count` (inclusive linspace) or
//! `t=v1,v2,...` (explicit points), one `;`-separated clause per axis,
//! `t` first, then one `y` clause per periodic variable.

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub t: Vec<f64>,
    pub y_axes: Vec<Vec<f64>>,
}

fn parse_axis(spec: &str) -> anyhow::Result<Vec<f64>> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            anyhow::bail!("axis {spec:?}: want lo:hi:count");
        }
        let lo: f64 = parts[0].trim().parse()?;
        let hi: f64 = parts[1].trim().parse()?;
        let count: usize = parts[2].trim().parse()?;
        if count == 0 {
            anyhow::bail!("axis {spec:?}: count must be positive");
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect())
    } else {
        spec.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| anyhow::anyhow!("axis value {v:?}: {e}"))
            })
            .collect()
    }
}

pub fn parse_grid(spec: &str, n: usize) -> anyhow::Result<GridSpec> {
    let mut t = None;
    let mut y_axes: Vec<Vec<f64>> = Vec::new();
    for clause in spec.split(';') {
        let clause = clause.trim();
        let Some((axis, values)) = clause.split_once('=') else {
            anyhow::bail!("grid clause {clause:?}: want axis=values");
        };
        match axis.trim() {
            "t" => {
                if t.is_some() {
                    anyhow::bail!("duplicate t axis");
                }
                t = Some(parse_axis(values)?);
            }
            "y" => y_axes.push(parse_axis(values)?),
            other => anyhow::bail!("unknown axis {other:?} (use t or y)"),
        }
    }
    let t = t.ok_or_else(|| anyhow::anyhow!("grid needs a t axis"))?;
    if y_axes.len() != n {
        anyhow::bail!(
            "grid has {} y axes but the model has n = {n} periodic variables",
            y_axes.len()
        );
    }
    Ok(GridSpec { t, y_axes })
}

/// Derivative request `m,b1[,b2,...]`.
pub fn parse_deriv(spec: &str, n: usize) -> anyhow::Result<(usize, Vec<usize>)> {
    let parts: Vec<usize> = spec
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| anyhow::anyhow!("derivative component {v:?}: {e}"))
        })
        .collect::<anyhow::Result<Vec<usize>>>()?;
    if parts.len() != n + 1 {
        anyhow::bail!("derivative spec needs m and {n} beta components");
    }
    Ok((parts[0], parts[1..].to_vec()))
}
