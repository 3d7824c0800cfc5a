use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::WeightedGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    MovingZ,
    LabX,
}

/// A real function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub grid: WeightedGrid,
    pub values: Vec<f64>,
    pub frame: Frame,
}

impl Profile {
    pub fn new(grid: WeightedGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidParams(format!(
                "profile has {} values on a grid of {} nodes",
                values.len(),
                grid.n
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values, frame: Frame::MovingZ })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: WeightedGrid, f: F) -> Self {
        let values = (0..grid.n).map(|i| f(grid.z(i))).collect();
        Self { grid, values, frame: Frame::MovingZ }
    }

    pub fn zeros(grid: WeightedGrid) -> Self {
        Self { grid, values: vec![0.0; grid.n], frame: Frame::MovingZ }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Linear interpolation, constant extension outside the window.
    pub fn interpolate(&self, z: f64) -> f64 {
        let g = &self.grid;
        if z <= g.z_left {
            return self.values[0];
        }
        if z >= g.z(g.n - 1) {
            return self.values[g.n - 1];
        }
        let s = (z - g.z_left) / g.h;
        let k = (s.floor() as usize).min(g.n - 2);
        let t = s - k as f64;
        self.values[k] * (1.0 - t) + self.values[k + 1] * t
    }

    /// Resample onto another grid by linear interpolation.
    pub fn resample(&self, grid: WeightedGrid) -> Self {
        Self { grid, values: (0..grid.n).map(|i| self.interpolate(grid.z(i))).collect(), frame: self.frame }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["z", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            wr.write_record([fmt(self.grid.z(i)), fmt(*v)])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let (z, cols) = read_columns(r, &["value"])?;
        let grid = grid_from_nodes(&z)?;
        Profile::new(grid, cols.into_iter().next().unwrap())
    }
}

/// Shortest round-trip decimal representation.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `z,u,v`.
pub fn write_pair_csv<W: Write>(u: &Profile, v: &Profile, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["z", "u", "v"])?;
    for i in 0..u.len() {
        wr.write_record([fmt(u.grid.z(i)), fmt(u.values[i]), fmt(v.values[i])])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads `z,u,v`.
pub fn read_pair_csv<R: Read>(r: R) -> Result<(Profile, Profile)> {
    let (z, mut cols) = read_columns(r, &["u", "v"])?;
    let grid = grid_from_nodes(&z)?;
    let v = cols.pop().unwrap();
    let u = cols.pop().unwrap();
    Ok((Profile::new(grid, u)?, Profile::new(grid, v)?))
}

fn read_columns<R: Read>(r: R, names: &[&str]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    let idx = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name}")))
    };
    let iz = idx("z")?;
    let ic: Vec<usize> = names.iter().map(|n| idx(n)).collect::<Result<_>>()?;
    let mut z = Vec::new();
    let mut cols = vec![Vec::new(); names.len()];
    for rec in rd.records() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Parse("short record".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(e.to_string()))
        };
        z.push(parse(iz)?);
        for (c, &k) in cols.iter_mut().zip(&ic) {
            c.push(parse(k)?);
        }
    }
    Ok((z, cols))
}

/// Recovers a uniform grid from node coordinates.
pub fn grid_from_nodes(z: &[f64]) -> Result<WeightedGrid> {
    if z.len() < 3 {
        return Err(Error::Parse("fewer than 3 nodes".into()));
    }
    let n = z.len();
    let mut g = WeightedGrid::new(z[0], z[n - 1], n)?;
    let h = z[1] - z[0];
    if z.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
        return Err(Error::Parse("nodes are not uniformly spaced".into()));
    }
    // keep the stored spacing so node coordinates round-trip bit for bit
    g.h = h;
    if (0..n).any(|i| g.z(i) != z[i]) {
        g.h = (z[n - 1] - z[0]) / (n - 1) as f64;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let g = WeightedGrid::new(-3.0, 2.0, 101).unwrap();
        let p = Profile::from_fn(g, |z| (z * 1.7).sin() / 3.0 + 1e-17 * z);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = Profile::read_csv(buf.as_slice()).unwrap();
        assert_eq!(p.values, q.values);
        for i in 0..g.n {
            assert!((p.grid.z(i) - q.grid.z(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn pair_roundtrip() {
        let g = WeightedGrid::default_window();
        let u = Profile::from_fn(g, |z| 0.5 - 0.5 * z.tanh());
        let v = Profile::from_fn(g, |z| (-z * z).exp() * 0.01);
        let mut buf = Vec::new();
        write_pair_csv(&u, &v, &mut buf).unwrap();
        let (u2, v2) = read_pair_csv(buf.as_slice()).unwrap();
        assert_eq!(u.values, u2.values);
        assert_eq!(v.values, v2.values);
    }

    #[test]
    fn rejects_nonfinite() {
        let g = WeightedGrid::new(-1.0, 1.0, 3).unwrap();
        assert!(Profile::new(g, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(Profile::new(g, vec![0.0, 1.0]).is_err());
    }
}
