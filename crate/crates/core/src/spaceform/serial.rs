//! CSV / JSON serialization of samples and point clouds.
//!
//! Samples write one point per row under a `x0..x{D-1}[,label]` header with
//! 17 significant digits; the geometry goes to a JSON sidecar with keys
//! `{d, kappa, inj, vol, domain_radius, seed}`.

use super::{ManifoldSample, SpaceFormGeometry};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use std::io::Write;
use std::path::Path;

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ManifoldSample {
    /// Writes the sample as CSV. Ambient coordinates are preferred; the
    /// intrinsic model coordinates are written when no embedding exists.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        let pts = match self.ambient_points() {
            Some(a) => a.to_owned(),
            None => self.intrinsic_points().to_owned(),
        };
        let cols = pts.ncols();
        let header: Vec<String> = (0..cols).map(|i| format!("x{i}")).collect();
        if self.labels().is_some() {
            writeln!(w, "{},label", header.join(","))?;
        } else {
            writeln!(w, "{}", header.join(","))?;
        }
        for i in 0..pts.nrows() {
            let mut row: Vec<String> = (0..cols).map(|j| format_f64(pts[[i, j]])).collect();
            if let Some(labels) = self.labels() {
                row.push(format_f64(labels[i]));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Writes the geometry sidecar JSON next to the CSV.
    pub fn write_geometry_json(&self, path: &Path) -> Result<()> {
        let g = &self.geometry;
        let v = serde_json::json!({
            "d": g.d,
            "kappa": g.kappa,
            "inj": g.inj,
            "vol": g.vol,
            "domain_radius": g.domain_radius,
            "seed": self.seed,
        });
        std::fs::write(path, serde_json::to_string_pretty(&v)?)?;
        Ok(())
    }
}

/// Reads a geometry sidecar produced by [`ManifoldSample::write_geometry_json`].
pub fn read_geometry_json(path: &Path) -> Result<(SpaceFormGeometry, u64)> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let get = |k: &str| -> Result<f64> {
        v.get(k)
            .and_then(|x| x.as_f64())
            .ok_or_else(|| Error::Parse(format!("missing numeric field '{k}' in {}", path.display())))
    };
    let geometry = SpaceFormGeometry::new(
        get("d")? as usize,
        get("kappa")?,
        get("inj")?,
        get("vol")?,
        get("domain_radius")?,
    )?;
    let seed = get("seed")? as u64;
    Ok((geometry, seed))
}

/// Loads a numeric point cloud from CSV. A header row is optional; a column
/// named `label` (any case) is split out, every other column must be numeric.
/// Lines starting with `#` are ignored.
pub fn load_point_cloud(path: &Path) -> Result<(Array2<f64>, Option<Array1<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(false)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut label_col: Option<usize> = None;
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        if first {
            first = false;
            let parsed: Vec<Option<f64>> = record.iter().map(|f| f.trim().parse().ok()).collect();
            if parsed.iter().any(|p| p.is_none()) {
                // Header row: locate the label column and move on.
                label_col = record
                    .iter()
                    .position(|f| f.trim().eq_ignore_ascii_case("label"));
                continue;
            }
            rows.push(parsed.into_iter().map(|p| p.unwrap()).collect());
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (j, field) in record.iter().enumerate() {
            let field = field.trim();
            if field.is_empty() && Some(j) == label_col {
                row.push(f64::NAN);
                continue;
            }
            row.push(
                field
                    .parse()
                    .map_err(|_| Error::Parse(format!("non-numeric field '{field}' in {}", path.display())))?,
            );
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::DegenerateInput(format!("{} contains no data rows", path.display())));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Parse(format!("ragged rows in {}", path.display())));
    }
    let mut labels = None;
    let point_cols: Vec<usize> = (0..width).filter(|j| Some(*j) != label_col).collect();
    let mut pts = Array2::zeros((rows.len(), point_cols.len()));
    for (i, row) in rows.iter().enumerate() {
        for (jj, &j) in point_cols.iter().enumerate() {
            pts[[i, jj]] = row[j];
        }
    }
    if let Some(lc) = label_col {
        let mut l = Array1::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            l[i] = row[lc];
        }
        labels = Some(l);
    }
    Ok((pts, labels))
}

/// Convenience wrapper matching the sample writer.
pub fn read_sample_csv(path: &Path) -> Result<(Array2<f64>, Option<Array1<f64>>)> {
    load_point_cloud(path)
}
