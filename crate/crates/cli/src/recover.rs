//! The `recover` command: displacement recovery from a strain JSON along a
//! path JSON, written as CSV.

use crate::{EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use nullhom::pathintegral::{
    cesaro_volterra, compatibility_residual, path_independence, PathSpec, QuadSpec, StrainSource,
};
use nullhom::tensorfields::{FieldJson, TensorField};
use std::path::Path;

#[derive(Clone, Debug)]
pub struct RecoverConfig {
    pub strain_path: std::path::PathBuf,
    pub path_path: std::path::PathBuf,
    pub quad_order: usize,
    pub check_independence: Option<f64>,
    pub samples: usize,
}

/// Load, validate, integrate; returns (exit code, CSV text, log lines).
pub fn cmd_recover(cfg: &RecoverConfig) -> (i32, String, Vec<String>) {
    match run(cfg) {
        Ok((code, csv, log)) => (code, csv, log),
        Err(e) => (EXIT_USAGE, String::new(), vec![format!("error: {e}")]),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let body = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&body).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cfg: &RecoverConfig) -> Result<(i32, String, Vec<String>), String> {
    let field_json: FieldJson = read_json(&cfg.strain_path)?;
    let field = TensorField::from_json(&field_json).map_err(|e| e.to_string())?;
    // symmetry is a hard input contract here, declared or not
    let strain = StrainSource::polynomial(field.clone()).map_err(|e| match e {
        nullhom::pathintegral::PathError::AsymmetricStrain { .. } => name_asymmetric_entry(&field),
        other => other.to_string(),
    })?;

    let raw_path: PathSpec = read_json(&cfg.path_path)?;
    let path = PathSpec::new(raw_path.vertices).map_err(|e| e.to_string())?;
    if path.dim() != field.dim() {
        return Err(format!(
            "strain dimension {} does not match path dimension {}",
            field.dim(),
            path.dim()
        ));
    }

    let quad = QuadSpec {
        gauss_order: cfg.quad_order,
        subdivisions: 1,
    };
    quad.validate().map_err(|e| e.to_string())?;

    let mut log = Vec::new();
    let residual = compatibility_residual(&field).map_err(|e| e.to_string())?;
    log.push(format!("compatibility residual max|inc E| = {residual:e}"));

    let mut exit = EXIT_OK;
    if let Some(tol) = cfg.check_independence {
        // compare the supplied path against the straight chord
        let chord = PathSpec::new(vec![path.start().to_vec(), path.end().to_vec()])
            .map_err(|e| e.to_string())?;
        let dev =
            path_independence(&strain, &[path.clone(), chord], &quad).map_err(|e| e.to_string())?;
        log.push(format!(
            "path-independence deviation = {dev:e} (tol {tol:e})"
        ));
        if dev > tol {
            exit = EXIT_FAIL;
        }
    }

    let mut csv = String::new();
    let n = path.dim();
    let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let comps: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    csv.push_str(&format!(
        "{},{},err_est,inc_residual\n",
        coords.join(","),
        comps.join(",")
    ));

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for k in 1..=cfg.samples {
        if let Some(prefix) = truncate_path(&path, k as f64 / (cfg.samples + 1) as f64) {
            rows.push(prefix);
        }
    }
    rows.push(path.end().to_vec());

    for point in rows {
        let sub = match sub_path(&path, &point) {
            Ok(s) => s,
            // sample landed on a degenerate prefix (e.g. the start vertex);
            // skip the row rather than fail the recovery
            Err(_) => continue,
        };
        let r = cesaro_volterra(&strain, &sub, &quad).map_err(|e| e.to_string())?;
        let finer = cesaro_volterra(
            &strain,
            &sub,
            &QuadSpec {
                gauss_order: cfg.quad_order + 2,
                subdivisions: 1,
            },
        )
        .map_err(|e| e.to_string())?;
        let err_est = r
            .displacement
            .iter()
            .zip(&finer.displacement)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let mut cells: Vec<String> = point.iter().map(|v| format!("{v}")).collect();
        cells.extend(r.displacement.iter().map(|v| format!("{v}")));
        cells.push(format!("{err_est}"));
        cells.push(format!("{residual}"));
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }

    Ok((exit, csv, log))
}

fn name_asymmetric_entry(field: &TensorField) -> String {
    let n = field.dim();
    for i in 0..n {
        for j in 0..n {
            if field.entry(i, j) != field.entry(j, i) {
                return format!(
                    "strain is not symmetric: entry ({},{}) = {} but ({},{}) = {}",
                    i + 1,
                    j + 1,
                    field.entry(i, j),
                    j + 1,
                    i + 1,
                    field.entry(j, i)
                );
            }
        }
    }
    "strain is not symmetric".to_string()
}

/// The point at arc-length fraction `f` along the polyline.
fn truncate_path(path: &PathSpec, f: f64) -> Option<Vec<f64>> {
    let n = path.dim();
    let seg_len =
        |a: &[f64], b: &[f64]| -> f64 { (0..n).map(|k| (b[k] - a[k]).powi(2)).sum::<f64>().sqrt() };
    let total: f64 = path
        .vertices
        .windows(2)
        .map(|w| seg_len(&w[0], &w[1]))
        .sum();
    let mut want = f * total;
    for w in path.vertices.windows(2) {
        let l = seg_len(&w[0], &w[1]);
        if want <= l {
            let s = want / l;
            return Some((0..n).map(|k| w[0][k] + s * (w[1][k] - w[0][k])).collect());
        }
        want -= l;
    }
    None
}

/// The sub-polyline of `path` ending at `point` (which must lie on it).
fn sub_path(path: &PathSpec, point: &[f64]) -> Result<PathSpec, String> {
    let n = path.dim();
    let mut verts: Vec<Vec<f64>> = vec![path.vertices[0].clone()];
    for w in path.vertices.windows(2) {
        // is `point` on segment w within tolerance?
        let l2: f64 = (0..n).map(|k| (w[1][k] - w[0][k]).powi(2)).sum();
        let t = (0..n)
            .map(|k| (point[k] - w[0][k]) * (w[1][k] - w[0][k]))
            .sum::<f64>()
            / l2;
        let on = (-1e-12..=1.0 + 1e-12).contains(&t) && {
            let d2: f64 = (0..n)
                .map(|k| (w[0][k] + t * (w[1][k] - w[0][k]) - point[k]).powi(2))
                .sum();
            d2.sqrt() <= 1e-9
        };
        if on {
            if t > 1e-12 {
                verts.push(point.to_vec());
            }
            if verts.len() < 2 {
                // degenerate prefix: nudge to the point itself
                verts.push(point.to_vec());
            }
            return PathSpec::new(verts).map_err(|e| e.to_string());
        }
        verts.push(w[1].clone());
    }
    // endpoint row: the full path
    Ok(path.clone())
}
