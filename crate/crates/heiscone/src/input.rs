//! Surface files: `eta,tau,phi` grids and `x,y,z` clouds, as CSV or as a
//! JSON array of records with the same field names.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use heiscone_core::{Point, PointCloud, SurfaceGrid};
use serde_json::Value;

use crate::error::CliError;

/// A loaded surface file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSurface {
    Grid(SurfaceGrid),
    Cloud(PointCloud),
}

const GRID_FIELDS: [&str; 3] = ["eta", "tau", "phi"];
const CLOUD_FIELDS: [&str; 3] = ["x", "y", "z"];

/// Rows of three numbers with the line each came from.
type Rows = Vec<([f64; 3], u64)>;

/// Reads a surface file. Files ending in `.json` are parsed as JSON,
/// everything else as CSV.
pub fn load_surface(path: &Path) -> Result<LoadedSurface, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.display().to_string();
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        parse_json(&text, &name)
    } else {
        parse_csv(&text, &name)
    }
}

pub fn parse_csv(text: &str, name: &str) -> Result<LoadedSurface, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(name, Some(1), e.to_string()))?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    let fields = classify(&header.iter().map(String::as_str).collect::<Vec<_>>())
        .ok_or_else(|| CliError::input(name, Some(1), "header must be `eta,tau,phi` or `x,y,z`"))?;
    let mut rows = Rows::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line());
            CliError::input(name, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(CliError::input(
                name,
                Some(line),
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let mut row = [0.0; 3];
        for (k, cell) in record.iter().enumerate() {
            row[k] = cell.parse().map_err(|_| {
                CliError::input(name, Some(line), format!("`{cell}` is not a number"))
            })?;
        }
        rows.push((row, line));
    }
    build(fields, rows, name)
}

pub fn parse_json(text: &str, name: &str) -> Result<LoadedSurface, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::input(name, Some(e.line() as u64), e.to_string()))?;
    let items = value
        .as_array()
        .ok_or_else(|| CliError::input(name, None, "expected a JSON array of records"))?;
    let first = items
        .first()
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::input(name, None, "expected at least one record"))?;
    let keys: Vec<&str> = first.keys().map(String::as_str).collect();
    let fields = classify(&keys).ok_or_else(|| {
        CliError::input(
            name,
            None,
            "records must have the fields `eta,tau,phi` or `x,y,z`",
        )
    })?;
    let names = if fields == Fields::Grid {
        GRID_FIELDS
    } else {
        CLOUD_FIELDS
    };
    let mut rows = Rows::new();
    for (i, item) in items.iter().enumerate() {
        let record = i as u64 + 1;
        let obj = item.as_object().ok_or_else(|| {
            CliError::input(name, None, format!("record {record} is not an object"))
        })?;
        if obj.len() != 3 {
            return Err(CliError::input(
                name,
                None,
                format!("record {record} must have exactly 3 fields"),
            ));
        }
        let mut row = [0.0; 3];
        for (k, key) in names.iter().enumerate() {
            row[k] = obj.get(*key).and_then(Value::as_f64).ok_or_else(|| {
                CliError::input(
                    name,
                    None,
                    format!("record {record}: field `{key}` missing or not a number"),
                )
            })?;
        }
        rows.push((row, record));
    }
    build(fields, rows, name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fields {
    Grid,
    Cloud,
}

fn classify(keys: &[&str]) -> Option<Fields> {
    let mut sorted: Vec<&str> = keys.to_vec();
    sorted.sort_unstable();
    let matches = |want: [&str; 3]| {
        let mut w = want.to_vec();
        w.sort_unstable();
        sorted == w
    };
    if keys == GRID_FIELDS || (keys.len() == 3 && matches(GRID_FIELDS)) {
        Some(Fields::Grid)
    } else if keys == CLOUD_FIELDS || (keys.len() == 3 && matches(CLOUD_FIELDS)) {
        Some(Fields::Cloud)
    } else {
        None
    }
}

fn build(fields: Fields, rows: Rows, name: &str) -> Result<LoadedSurface, CliError> {
    if let Some((_, line)) = rows.iter().find(|(r, _)| !r.iter().all(|v| v.is_finite())) {
        return Err(CliError::input(name, Some(*line), "values must be finite"));
    }
    match fields {
        Fields::Cloud => {
            let pts = rows
                .iter()
                .map(|(r, _)| Point::new(r[0], r[1], r[2]))
                .collect::<Result<Vec<_>, _>>()?;
            if pts.is_empty() {
                return Err(CliError::input(name, None, "no points"));
            }
            Ok(LoadedSurface::Cloud(PointCloud::new(pts)))
        }
        Fields::Grid => grid_from_rows(rows, name).map(LoadedSurface::Grid),
    }
}

/// Accepts the rows in any order but requires every `(eta, tau)` pair of
/// the product lattice exactly once.
fn grid_from_rows(rows: Rows, name: &str) -> Result<SurfaceGrid, CliError> {
    let mut cells: BTreeMap<(u64, u64), (f64, u64)> = BTreeMap::new();
    let key = |v: f64| {
        // order-preserving map of finite floats onto integers
        let b = (v + 0.0).to_bits();
        if b >> 63 == 1 {
            !b
        } else {
            b | (1 << 63)
        }
    };
    let mut etas = BTreeMap::new();
    let mut taus = BTreeMap::new();
    for (r, line) in &rows {
        etas.insert(key(r[0]), r[0]);
        taus.insert(key(r[1]), r[1]);
        if cells
            .insert((key(r[0]), key(r[1])), (r[2], *line))
            .is_some()
        {
            return Err(CliError::input(
                name,
                Some(*line),
                format!("duplicate grid node ({}, {})", r[0], r[1]),
            ));
        }
    }
    if cells.len() != etas.len() * taus.len() {
        return Err(CliError::input(
            name,
            None,
            format!(
                "ragged grid: {} nodes do not fill the {} x {} lattice",
                cells.len(),
                etas.len(),
                taus.len()
            ),
        ));
    }
    let phi = cells.values().map(|(v, _)| *v).collect();
    SurfaceGrid::new(
        etas.into_values().collect(),
        taus.into_values().collect(),
        phi,
    )
    .map_err(|e| CliError::input(name, None, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_csv_in_any_order() {
        let text = "eta,tau,phi\n1,0,0.4\n0,0,0.1\n0,1,0.2\n1,1,0.3\n";
        let LoadedSurface::Grid(g) = parse_csv(text, "g.csv").unwrap() else {
            panic!("expected a grid");
        };
        assert_eq!(g.eta_values(), &[0.0, 1.0]);
        assert_eq!(g.tau_values(), &[0.0, 1.0]);
        assert_eq!(g.phi_values(), &[0.1, 0.2, 0.4, 0.3]);
    }

    #[test]
    fn cloud_csv() {
        let text = "x,y,z\n0,0,0\n0.5,0,0.125\n1,0,1\n";
        let LoadedSurface::Cloud(c) = parse_csv(text, "c.csv").unwrap() else {
            panic!("expected a cloud");
        };
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn ragged_grid_is_input_error() {
        let text = "eta,tau,phi\n0,0,0\n0,1,0\n1,0,0\n";
        let e = parse_csv(text, "r.csv").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("ragged"));
    }

    #[test]
    fn bad_cell_reports_line() {
        let e = parse_csv("x,y,z\n0,0,0\n1,a,0\n", "b.csv").unwrap_err();
        assert!(e.to_string().starts_with("b.csv:3:"), "{e}");
        assert!(parse_csv("a,b,c\n1,2,3\n", "h.csv").is_err());
        assert!(parse_csv("x,y,z\n1,2\n", "s.csv").is_err());
    }

    #[test]
    fn json_mirror() {
        let text = r#"[{"x":0,"y":0,"z":0},{"x":1,"y":0,"z":1}]"#;
        assert!(
            matches!(parse_json(text, "c.json").unwrap(), LoadedSurface::Cloud(c) if c.len() == 2)
        );
        let text = r#"[{"eta":0,"tau":0,"phi":1},{"eta":0,"tau":1,"phi":1},{"eta":1,"tau":0,"phi":1},{"eta":1,"tau":1,"phi":1}]"#;
        assert!(matches!(
            parse_json(text, "g.json").unwrap(),
            LoadedSurface::Grid(_)
        ));
        assert!(parse_json(r#"{"x":1}"#, "o.json").is_err());
        assert!(parse_json(r#"[{"x":1,"y":2}]"#, "o.json").is_err());
    }
}
