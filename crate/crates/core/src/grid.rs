//! Uniform tensor grids over an axis-aligned box, vector-valued grid fields,
//! and the binary snapshot format (one JSON header line followed by row-major
//! little-endian f64 payload, components innermost).

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("snapshot I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot header: {0}")]
    Header(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// nodes per axis, boundary included
    pub counts: Vec<usize>,
    /// uniform spacing, equal across axes
    pub h: f64,
}

impl Grid {
    /// Builds a grid with `cells` cells per axis (so cells+1 nodes). The
    /// spacing must agree across axes to 1e-12 relative and every axis needs
    /// at least 16 nodes.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> Result<Self, GridError> {
        let dim = lo.len();
        if dim == 0 || hi.len() != dim || cells.len() != dim {
            return Err(GridError::InvalidGrid("dimension mismatch".into()));
        }
        let mut h = 0.0;
        let mut counts = Vec::with_capacity(dim);
        for a in 0..dim {
            if !(hi[a] > lo[a]) {
                return Err(GridError::InvalidGrid(format!("empty extent on axis {a}")));
            }
            if cells[a] + 1 < 16 {
                return Err(GridError::InvalidGrid(format!(
                    "axis {a} has {} nodes; need >= 16",
                    cells[a] + 1
                )));
            }
            let ha = (hi[a] - lo[a]) / cells[a] as f64;
            if a == 0 {
                h = ha;
            } else if (ha - h).abs() > 1e-12 * h {
                return Err(GridError::InvalidGrid(format!(
                    "non-uniform spacing: axis {a} has h = {ha}, axis 0 has h = {h}"
                )));
            }
            counts.push(cells[a] + 1);
        }
        Ok(Self { lo, hi, counts, h })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.counts.iter().product()
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let dim = self.dim();
        let mut s = vec![1usize; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.counts[a + 1];
        }
        s
    }

    #[inline]
    pub fn coord(&self, axis: usize, index: usize) -> f64 {
        self.lo[axis] + index as f64 * self.h
    }

    /// Writes the coordinates of flat node `idx` into `out`.
    pub fn node_coords(&self, mut idx: usize, out: &mut [f64]) {
        let dim = self.dim();
        for a in (0..dim).rev() {
            let i = idx % self.counts[a];
            out[a] = self.coord(a, i);
            idx /= self.counts[a];
        }
    }

    /// Multi-index of flat node `idx`.
    pub fn node_multi(&self, mut idx: usize, out: &mut [usize]) {
        let dim = self.dim();
        for a in (0..dim).rev() {
            out[a] = idx % self.counts[a];
            idx /= self.counts[a];
        }
    }

    pub fn is_boundary_multi(&self, multi: &[usize]) -> bool {
        multi
            .iter()
            .zip(&self.counts)
            .any(|(&i, &n)| i == 0 || i == n - 1)
    }

    /// Trapezoid quadrature weight of a node (product of 1/2 per boundary
    /// axis) times h^d.
    pub fn quad_weight(&self, multi: &[usize]) -> f64 {
        let mut w = self.h.powi(self.dim() as i32);
        for (&i, &n) in multi.iter().zip(&self.counts) {
            if i == 0 || i == n - 1 {
                w *= 0.5;
            }
        }
        w
    }
}

/// Vector-valued grid function; storage is node-major with components
/// innermost, matching the snapshot payload order.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid,
    pub ncomp: usize,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        let n = grid.num_nodes() * ncomp;
        Self {
            grid,
            ncomp,
            values: vec![0.0; n],
            time: 0.0,
        }
    }

    #[inline]
    pub fn node(&self, idx: usize) -> &[f64] {
        &self.values[idx * self.ncomp..(idx + 1) * self.ncomp]
    }

    #[inline]
    pub fn node_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.values[idx * self.ncomp..(idx + 1) * self.ncomp]
    }

    /// sup over nodes of the Euclidean norm of the value.
    pub fn max_norm(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.grid.num_nodes() {
            let mut s = 0.0;
            for c in 0..self.ncomp {
                let v = self.values[idx * self.ncomp + c];
                s += v * v;
            }
            worst = worst.max(s);
        }
        worst.sqrt()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotHeader {
    dims: usize,
    counts: Vec<usize>,
    h: f64,
    n: usize,
    eps: f64,
    t: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

/// Writes the snapshot: one JSON header line, then row-major little-endian
/// f64 values with components innermost.
pub fn write_snapshot<W: Write>(w: &mut W, field: &Field, eps: f64) -> Result<(), GridError> {
    let header = SnapshotHeader {
        dims: field.grid.dim(),
        counts: field.grid.counts.clone(),
        h: field.grid.h,
        n: field.ncomp,
        eps,
        t: field.time,
        lo: field.grid.lo.clone(),
        hi: field.grid.hi.clone(),
    };
    let line = serde_json::to_string(&header).map_err(|e| GridError::Header(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(field.values.len() * 8);
    for v in &field.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a snapshot written by `write_snapshot`; returns the field and eps.
pub fn read_snapshot<R: BufRead>(r: &mut R) -> Result<(Field, f64), GridError> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: SnapshotHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| GridError::Header(e.to_string()))?;
    let cells: Vec<usize> = header.counts.iter().map(|c| c - 1).collect();
    let grid = Grid::new(header.lo.clone(), header.hi.clone(), cells)?;
    if grid.counts != header.counts {
        return Err(GridError::Header("inconsistent counts".into()));
    }
    let n_values = grid.num_nodes() * header.n;
    let mut buf = vec![0u8; n_values * 8];
    r.read_exact(&mut buf)?;
    let mut values = Vec::with_capacity(n_values);
    for chunk in buf.chunks_exact(8) {
        values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    Ok((
        Field {
            grid,
            ncomp: header.n,
            values,
            time: header.t,
        },
        header.eps,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction_and_indexing() {
        let g = Grid::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![32, 32]).unwrap();
        assert_eq!(g.h, 2.0 / 32.0);
        assert_eq!(g.counts, vec![33, 33]);
        assert_eq!(g.num_nodes(), 33 * 33);
        let s = g.strides();
        assert_eq!(s, vec![33, 1]);
        let mut x = [0.0; 2];
        g.node_coords(0, &mut x);
        assert_eq!(x, [-1.0, -1.0]);
        g.node_coords(33 * 33 - 1, &mut x);
        assert_eq!(x, [1.0, 1.0]);
    }

    #[test]
    fn rejects_nonuniform_and_tiny_grids() {
        assert!(Grid::new(vec![0.0, 0.0], vec![1.0, 2.0], vec![32, 32]).is_err());
        assert!(Grid::new(vec![0.0], vec![1.0], vec![8]).is_err());
    }

    #[test]
    fn trapezoid_weights_sum_to_volume() {
        let g = Grid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![20, 20]).unwrap();
        let mut multi = [0usize; 2];
        let mut total = 0.0;
        for idx in 0..g.num_nodes() {
            g.node_multi(idx, &mut multi);
            total += g.quad_weight(&multi);
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snapshot_roundtrip() {
        let g = Grid::new(vec![0.0], vec![1.0], vec![16]).unwrap();
        let mut f = Field::zeros(g, 2);
        for (i, v) in f.values.iter_mut().enumerate() {
            *v = i as f64 * 0.25 - 3.0;
        }
        f.time = 0.125;
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &f, 0.04).unwrap();
        let (g2, eps) = read_snapshot(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(eps, 0.04);
        assert_eq!(g2.time, 0.125);
        assert_eq!(g2.values, f.values);
        assert_eq!(g2.grid.counts, f.grid.counts);
    }
}
