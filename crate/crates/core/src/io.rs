//! File formats: domain JSON, field and scan CSV, grid-sample loads.
//! Every writer goes through a temporary file in the target directory and
//! a rename, so readers never observe partial output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, DomainFile};
use crate::plate::{ActiveGrid, LoadSpec};
use crate::positivity::ScanEntry;

/// Writes `bytes` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Parses a domain document, rejecting anything that violates an invariant.
pub fn parse_domain(text: &str) -> Result<ConvexDomain> {
    let raw: DomainFile = serde_json::from_str(text)?;
    ConvexDomain::try_from(raw)
}

pub fn read_domain(path: &Path) -> Result<ConvexDomain> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot read domain file {}: {e}", path.display()),
        ))
    })?;
    parse_domain(&text)
}

pub fn write_domain(path: &Path, d: &ConvexDomain) -> Result<()> {
    write_json(path, d)
}

/// CSV `i,j,x,y,u` for a field on the active nodes.
pub fn field_csv(grid: &ActiveGrid, u: &[f64]) -> String {
    let mut out = String::from("i,j,x,y,u\n");
    for ((&(i, j), p), v) in grid.coords().iter().zip(grid.positions()).zip(u) {
        out.push_str(&format!("{i},{j},{:e},{:e},{:e}\n", p.x, p.y, v));
    }
    out
}

/// CSV `gamma,min_u,min_u_interior,positive`.
pub fn scan_csv(scan: &[ScanEntry]) -> String {
    let mut out = String::from("gamma,min_u,min_u_interior,positive\n");
    for e in scan {
        out.push_str(&format!(
            "{:e},{:e},{:e},{}\n",
            e.gamma, e.min_u, e.min_u_interior, e.positive
        ));
    }
    out
}

/// Reads a grid-sample load from CSV with header `i,j,f`.
pub fn read_grid_load(path: &Path) -> Result<LoadSpec> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["i", "j", "f"] {
        return Err(Error::InvalidLoad(format!(
            "grid load {} must have header i,j,f",
            path.display()
        )));
    }
    let mut samples = Vec::new();
    for rec in rdr.deserialize() {
        let (i, j, f): (i64, i64, f64) = rec?;
        samples.push((i, j, f));
    }
    let load = LoadSpec::GridSamples { samples };
    load.validate()?;
    Ok(load)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    #[test]
    fn domain_file_roundtrip_and_diagnostics() {
        let d = ConvexDomain::regular(7, 0.8, Point2::new(0.1, 0.0), 1.0).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert!(text.contains("\"R\":1.0"));
        assert_eq!(parse_domain(&text).unwrap(), d);

        let cw = r#"{"R": 2, "vertices": [[0,0],[0,1],[1,0]]}"#;
        let e = parse_domain(cw).unwrap_err().to_string();
        assert!(e.contains("counter-clockwise"), "{e}");
        let unknown = r#"{"R": 2, "vertices": [[0,0],[1,0],[0,1]], "extra": 1}"#;
        assert!(parse_domain(unknown).is_err());
        let outside = r#"{"R": 0.5, "vertices": [[0,0],[1,0],[0,1]]}"#;
        assert!(parse_domain(outside).unwrap_err().to_string().contains("ambient ball"));
    }

    #[test]
    fn atomic_write_and_grid_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("load.csv");
        write_atomic(&p, b"i,j,f\n0,0,1.5\n1,0,0.5\n").unwrap();
        match read_grid_load(&p).unwrap() {
            LoadSpec::GridSamples { samples } => assert_eq!(samples, vec![(0, 0, 1.5), (1, 0, 0.5)]),
            other => panic!("{other:?}"),
        }
        write_atomic(&p, b"i,j,f\n0,0,-1\n").unwrap();
        assert!(matches!(read_grid_load(&p), Err(Error::InvalidLoad(_))));
        assert!(read_domain(&dir.path().join("missing.json")).is_err());
    }
}
