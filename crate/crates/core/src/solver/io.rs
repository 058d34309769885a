//! Snapshot files and trajectory directories.
//!
//! A snapshot file is one JSON header line
//! `{"t":…,"dim":…,"N":…,"L":…,"p":…}` followed by one line per component
//! block holding `N^dim` comma-separated values in row-major order. Scalar
//! fields have a single block; tensor fields add `"components"` to the header.
//! Values are written in shortest round-trip decimal form.
//!
//! A trajectory directory holds the snapshot files plus `index.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Grid, ScalarField, Status, Trajectory};
use crate::error::{Error, Result};

pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub t: f64,
    pub dim: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
}

impl SnapshotHeader {
    pub fn new(grid: &Grid, t: f64, p: f64) -> Self {
        Self {
            t,
            dim: grid.dim,
            points: grid.points,
            length: grid.length,
            p,
            components: None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.points, self.length)
    }
}

/// Header plus component blocks, the on-disk unit for both field kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub blocks: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_scalar(field: &ScalarField, p: f64) -> Self {
        Self {
            header: SnapshotHeader::new(&field.grid, field.time, p),
            blocks: vec![field.values.clone()],
        }
    }

    pub fn to_scalar(&self) -> Result<ScalarField> {
        let grid = self.header.grid()?;
        let [values] = self.blocks.as_slice() else {
            return Err(Error::InvalidInput(format!(
                "scalar snapshot needs one block, found {}",
                self.blocks.len()
            )));
        };
        ScalarField::new(grid, values.clone(), self.header.t)
    }

    pub fn render(&self) -> Result<String> {
        let mut out = serde_json::to_string(&self.header)?;
        out.push('\n');
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(f64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |detail: String| Error::Format { path: path.to_path_buf(), detail };
        let mut lines = text.lines();
        let header_line = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let header: SnapshotHeader =
            serde_json::from_str(header_line).map_err(|e| bad(format!("header: {e}")))?;
        let grid = header.grid().map_err(|e| bad(e.to_string()))?;
        let expected_blocks = header.components.as_ref().map_or(1, Vec::len);

        let mut blocks = Vec::with_capacity(expected_blocks);
        for (i, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let values = line
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| bad(format!("block {i}: {e}")))?;
            if values.len() != grid.len() {
                return Err(bad(format!(
                    "block {i}: expected {} values, found {}",
                    grid.len(),
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(bad(format!("block {i}: non-finite value")));
            }
            blocks.push(values);
        }
        if blocks.len() != expected_blocks {
            return Err(bad(format!(
                "expected {expected_blocks} blocks, found {}",
                blocks.len()
            )));
        }
        Ok(Self { header, blocks })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub file: String,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub p: f64,
    pub dt: f64,
    pub reaction: bool,
    pub blowup_cap: f64,
    pub status: Status,
    pub grid: Grid,
    pub snapshots: Vec<IndexEntry>,
}

fn snapshot_name(i: usize) -> String {
    format!("snapshot_{i:05}.txt")
}

/// Write every snapshot and the index into `dir`, creating it if needed.
pub fn write_trajectory(traj: &Trajectory, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(traj.snapshots.len());
    for (i, field) in traj.snapshots.iter().enumerate() {
        let file = snapshot_name(i);
        Snapshot::from_scalar(field, traj.p).write(&dir.join(&file))?;
        entries.push(IndexEntry { file, t: field.time });
    }
    let index = TrajectoryIndex {
        p: traj.p,
        dt: traj.dt,
        reaction: traj.reaction,
        blowup_cap: traj.blowup_cap,
        status: traj.status,
        grid: *traj.grid(),
        snapshots: entries,
    };
    let path = dir.join(INDEX_FILE);
    fs::write(&path, serde_json::to_string_pretty(&index)? + "\n")?;
    Ok(path)
}

/// Read a trajectory directory, cross-checking every file against the index.
pub fn read_trajectory(dir: &Path) -> Result<Trajectory> {
    let index_path = dir.join(INDEX_FILE);
    let index: TrajectoryIndex = serde_json::from_str(&fs::read_to_string(&index_path)?)
        .map_err(|e| Error::Format { path: index_path.clone(), detail: e.to_string() })?;
    let mut snapshots = Vec::with_capacity(index.snapshots.len());
    for entry in &index.snapshots {
        let path = dir.join(&entry.file);
        let snap = Snapshot::read(&path)?;
        let mismatch = |what: &str| Error::Format {
            path: path.clone(),
            detail: format!("{what} disagrees with {INDEX_FILE}"),
        };
        if snap.header.t != entry.t {
            return Err(mismatch("time"));
        }
        if snap.header.p != index.p {
            return Err(mismatch("exponent"));
        }
        let field = snap.to_scalar().map_err(|e| Error::Format {
            path: path.clone(),
            detail: e.to_string(),
        })?;
        if field.grid != index.grid {
            return Err(mismatch("grid"));
        }
        snapshots.push(field);
    }
    let traj = Trajectory {
        p: index.p,
        dt: index.dt,
        reaction: index.reaction,
        blowup_cap: index.blowup_cap,
        status: index.status,
        snapshots,
    };
    traj.validate().map_err(|e| Error::Format { path: index_path, detail: e.to_string() })?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_with, SolveOptions};

    fn small_run() -> Trajectory {
        let g = Grid::unit(1, 16).unwrap();
        let u0 = ScalarField::from_fn(g, 0.0, |x| 1.0 + 0.3 * (6.0 * x[0]).cos()).unwrap();
        let options = SolveOptions { stride: 5, ..Default::default() };
        solve_with(&u0, 0.02, 1e-3, 1.3, &options).unwrap()
    }

    #[test]
    fn header_key_order() {
        let g = Grid::unit(2, 16).unwrap();
        let text = serde_json::to_string(&SnapshotHeader::new(&g, 0.5, 1.2)).unwrap();
        assert_eq!(text, r#"{"t":0.5,"dim":2,"N":16,"L":1.0,"p":1.2}"#);
    }

    #[test]
    fn trajectory_round_trip_is_bit_exact() {
        let traj = small_run();
        let dir = tempfile::tempdir().unwrap();
        write_trajectory(&traj, dir.path()).unwrap();
        let back = read_trajectory(dir.path()).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let traj = small_run();
        let dir = tempfile::tempdir().unwrap();
        write_trajectory(&traj, dir.path()).unwrap();
        let victim = dir.path().join(snapshot_name(1));
        let text = fs::read_to_string(&victim).unwrap();
        fs::write(&victim, text.replacen(',', ",oops,", 1)).unwrap();
        assert!(matches!(read_trajectory(dir.path()), Err(Error::Format { .. })));

        fs::write(&victim, text.lines().next().unwrap()).unwrap();
        assert!(matches!(read_trajectory(dir.path()), Err(Error::Format { .. })));

        let negative = text.replacen("\n1", "\n-1", 1);
        fs::write(&victim, negative).unwrap();
        assert!(read_trajectory(dir.path()).is_err());
    }
}
