use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{CylinderSpec, Mat3, ProfileSpec, SingularExponents, Vec3};

/// Cell-centred samples on [-λR, λR]³ × [-μR², 0].
///
/// Node (it, i, j, k) sits at x = -λR + (i + ½)h, t = -μR² + (it + ½)Δt,
/// so neither x = 0 (for even N) nor t = 0 is ever sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub cylinder: CylinderSpec,
    pub n: usize,
    pub nt: usize,
    velocity: Vec<Vec3>,
    pressure: Vec<f64>,
    pub divergence_residual: f64,
    pub singularity: Option<SingularExponents>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    cylinder: CylinderSpec,
    n: usize,
    nt: usize,
    #[serde(default)]
    singularity: Option<SingularExponents>,
    #[serde(default)]
    divergence_residual: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    x1: f64,
    x2: f64,
    x3: f64,
    t: f64,
    u1: f64,
    u2: f64,
    u3: f64,
    p: f64,
}

impl GridField {
    /// Validates and wraps raw samples in (it, i, j, k) row-major order.
    pub fn from_samples(
        cylinder: CylinderSpec,
        n: usize,
        nt: usize,
        velocity: Vec<Vec3>,
        pressure: Vec<f64>,
        singularity: Option<SingularExponents>,
    ) -> Result<Self> {
        if n < 2 || nt < 2 {
            return Err(Error::Resolution(format!("need N, Nt >= 2, got N={n}, Nt={nt}")));
        }
        let count = nt * n * n * n;
        if velocity.len() != count || pressure.len() != count {
            return Err(Error::Resolution(format!(
                "expected {count} nodes, got {} velocity and {} pressure samples",
                velocity.len(),
                pressure.len()
            )));
        }
        if let Some(idx) = velocity
            .iter()
            .zip(&pressure)
            .position(|(v, p)| !(v.iter().all(|c| c.is_finite()) && p.is_finite()))
        {
            return Err(Error::NonFinite(format!("non-finite sample at node {idx}")));
        }
        let mut g = Self {
            cylinder,
            n,
            nt,
            velocity,
            pressure,
            divergence_residual: 0.0,
            singularity,
        };
        g.divergence_residual = divergence_residual(&g);
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.velocity.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.cylinder.spatial_radius() / self.n as f64
    }

    pub fn time_spacing(&self) -> f64 {
        self.cylinder.time_depth() / self.nt as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.cylinder.spatial_radius() + (i as f64 + 0.5) * self.spacing()
    }

    pub fn time(&self, it: usize) -> f64 {
        -self.cylinder.time_depth() + (it as f64 + 0.5) * self.time_spacing()
    }

    fn index(&self, it: usize, i: usize, j: usize, k: usize) -> usize {
        ((it * self.n + i) * self.n + j) * self.n + k
    }

    pub fn velocity_at(&self, it: usize, i: usize, j: usize, k: usize) -> Vec3 {
        self.velocity[self.index(it, i, j, k)]
    }

    pub fn pressure_at(&self, it: usize, i: usize, j: usize, k: usize) -> f64 {
        self.pressure[self.index(it, i, j, k)]
    }

    pub fn velocities(&self) -> &[Vec3] {
        &self.velocity
    }

    pub fn node_position(&self, idx: usize) -> (Vec3, f64) {
        let n = self.n;
        let k = idx % n;
        let j = (idx / n) % n;
        let i = (idx / (n * n)) % n;
        let it = idx / (n * n * n);
        ([self.coordinate(i), self.coordinate(j), self.coordinate(k)], self.time(it))
    }

    /// Lower cell index and fractional offset (may fall outside [0, 1] near the boundary).
    fn locate(u: f64, cells: usize) -> (usize, f64) {
        let i0 = (u.floor().max(0.0) as usize).min(cells - 2);
        (i0, u - i0 as f64)
    }

    fn stencil(&self, x: &Vec3, t: f64) -> Result<([(usize, f64); 3], (usize, f64))> {
        if !(x.iter().all(|c| c.is_finite()) && t.is_finite()) {
            return Err(Error::NonFinite("non-finite evaluation point".into()));
        }
        let l = self.cylinder.spatial_radius();
        let h = self.spacing();
        let mut s = [(0, 0.0); 3];
        for (d, out) in s.iter_mut().enumerate() {
            *out = Self::locate((x[d] + l) / h - 0.5, self.n);
        }
        let ut = (t + self.cylinder.time_depth()) / self.time_spacing() - 0.5;
        Ok((s, Self::locate(ut, self.nt)))
    }

    /// Multilinear combination of a per-node quantity, optionally differentiated in one axis.
    /// Derivatives difference neighbouring nodes first so that uniform data gives exactly 0.
    fn combine<F, V>(&self, x: &Vec3, t: f64, deriv: Option<usize>, f: F) -> Result<V>
    where
        F: Fn(usize) -> V,
        V: Default + std::ops::AddAssign + std::ops::Sub<Output = V> + std::ops::Mul<f64, Output = V>,
    {
        let (s, (it0, ft)) = self.stencil(x, t)?;
        let h = self.spacing();
        let mut acc = V::default();
        for dt in 0..2 {
            let wt = if dt == 0 { 1.0 - ft } else { ft };
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        let offs = [a, b, c];
                        if deriv.is_some_and(|d| offs[d] == 1) {
                            continue;
                        }
                        let mut w = wt;
                        for d in 0..3 {
                            let frac = s[d].1;
                            w *= match (deriv == Some(d), offs[d]) {
                                (true, _) => 1.0 / h,
                                (false, 0) => 1.0 - frac,
                                (false, _) => frac,
                            };
                        }
                        let idx = self.index(it0 + dt, s[0].0 + a, s[1].0 + b, s[2].0 + c);
                        let v = match deriv {
                            None => f(idx),
                            Some(d) => {
                                let mut up = offs;
                                up[d] = 1;
                                f(self.index(it0 + dt, s[0].0 + up[0], s[1].0 + up[1], s[2].0 + up[2])) - f(idx)
                            }
                        };
                        acc += v * w;
                    }
                }
            }
        }
        Ok(acc)
    }

    pub fn interpolate_velocity(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        let v: V3 = self.combine(x, t, None, |i| V3(self.velocity[i]))?;
        Ok(v.0)
    }

    pub fn interpolate_pressure(&self, x: &Vec3, t: f64) -> Result<f64> {
        self.combine(x, t, None, |i| self.pressure[i])
    }

    /// Gradient of the multilinear interpolant.
    pub fn interpolate_gradient(&self, x: &Vec3, t: f64) -> Result<Mat3> {
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            let col: V3 = self.combine(x, t, Some(j), |i| V3(self.velocity[i]))?;
            for i in 0..3 {
                m[i][j] = col.0[i];
            }
        }
        Ok(m)
    }

    /// Writes `<stem>.csv` (one row per node) and `<stem>.json` (geometry sidecar).
    pub fn export(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join(format!("{stem}.csv")))?;
        for idx in 0..self.node_count() {
            let (x, t) = self.node_position(idx);
            let u = self.velocity[idx];
            w.serialize(Row {
                x1: x[0],
                x2: x[1],
                x3: x[2],
                t,
                u1: u[0],
                u2: u[1],
                u3: u[2],
                p: self.pressure[idx],
            })?;
        }
        w.flush()?;
        let side = Sidecar {
            cylinder: self.cylinder,
            n: self.n,
            nt: self.nt,
            singularity: self.singularity,
            divergence_residual: Some(self.divergence_residual),
        };
        let mut f = BufWriter::new(File::create(dir.join(format!("{stem}.json")))?);
        serde_json::to_writer_pretty(&mut f, &side)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    /// Reads a grid written by [`GridField::export`]; rows must be in canonical node order.
    pub fn import(dir: &Path, stem: &str) -> Result<Self> {
        let side: Sidecar =
            serde_json::from_reader(BufReader::new(File::open(dir.join(format!("{stem}.json")))?))?;
        let mut r = csv::Reader::from_path(dir.join(format!("{stem}.csv")))?;
        let mut velocity = Vec::new();
        let mut pressure = Vec::new();
        for row in r.deserialize() {
            let row: Row = row?;
            velocity.push([row.u1, row.u2, row.u3]);
            pressure.push(row.p);
        }
        let g = Self::from_samples(side.cylinder, side.n, side.nt, velocity, pressure, side.singularity)?;
        // spot-check node order
        let scale = g.cylinder.spatial_radius().max(g.cylinder.time_depth());
        let mut r = csv::Reader::from_path(dir.join(format!("{stem}.csv")))?;
        for (idx, row) in r.deserialize().enumerate() {
            let row: Row = row?;
            let (x, t) = g.node_position(idx);
            let off = (row.x1 - x[0]).abs() + (row.x2 - x[1]).abs() + (row.x3 - x[2]).abs() + (row.t - t).abs();
            if off > 1e-9 * scale {
                return Err(Error::Format(format!("row {idx} is not at node position")));
            }
        }
        Ok(g)
    }
}

#[derive(Default, Clone, Copy)]
struct V3(Vec3);

impl std::ops::AddAssign for V3 {
    fn add_assign(&mut self, o: V3) {
        for d in 0..3 {
            self.0[d] += o.0[d];
        }
    }
}

impl std::ops::Sub for V3 {
    type Output = V3;
    fn sub(self, o: V3) -> V3 {
        V3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl std::ops::Mul<f64> for V3 {
    type Output = V3;
    fn mul(self, a: f64) -> V3 {
        V3([self.0[0] * a, self.0[1] * a, self.0[2] * a])
    }
}

/// Samples a profile at the cell centres of `cyl`.
pub fn sample(profile: &ProfileSpec, cyl: CylinderSpec, n: usize, nt: usize) -> Result<GridField> {
    if n < 2 || nt < 2 {
        return Err(Error::Resolution(format!("need N, Nt >= 2, got N={n}, Nt={nt}")));
    }
    let l = cyl.spatial_radius();
    let h = 2.0 * l / n as f64;
    let dt = cyl.time_depth() / nt as f64;
    let coord = |i: usize| -l + (i as f64 + 0.5) * h;
    let samples: Vec<(Vec3, f64)> = (0..nt * n * n * n)
        .into_par_iter()
        .map(|idx| {
            let k = idx % n;
            let j = (idx / n) % n;
            let i = (idx / (n * n)) % n;
            let it = idx / (n * n * n);
            let x = [coord(i), coord(j), coord(k)];
            let t = -cyl.time_depth() + (it as f64 + 0.5) * dt;
            profile.evaluate(&x, t)
        })
        .collect::<Result<_>>()?;
    let (velocity, pressure) = samples.into_iter().unzip();
    GridField::from_samples(cyl, n, nt, velocity, pressure, profile.singular_exponents())
}

/// Max over interior nodes of the centred-difference divergence.
pub fn divergence_residual(g: &GridField) -> f64 {
    let n = g.n;
    if n < 3 {
        return 0.0;
    }
    let inv = 1.0 / (2.0 * g.spacing());
    let mut worst: f64 = 0.0;
    for it in 0..g.nt {
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                for k in 1..n - 1 {
                    let d = (g.velocity_at(it, i + 1, j, k)[0] - g.velocity_at(it, i - 1, j, k)[0]
                        + g.velocity_at(it, i, j + 1, k)[1]
                        - g.velocity_at(it, i, j - 1, k)[1]
                        + g.velocity_at(it, i, j, k + 1)[2]
                        - g.velocity_at(it, i, j, k - 1)[2])
                        * inv;
                    worst = worst.max(d.abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn constant_field_samples() {
        let p = ProfileSpec::ConstantVector { c: [1.0, 0.0, 0.0] };
        let g = sample(&p, CylinderSpec::standard(1.0), 8, 4).unwrap();
        assert_eq!(g.node_count(), 4 * 512);
        assert!(g.velocities().iter().all(|v| *v == [1.0, 0.0, 0.0]));
        assert_eq!(g.divergence_residual, 0.0);
    }

    #[test]
    fn uniform_data_has_zero_gradient() {
        let p = ProfileSpec::ConstantVector { c: [0.3, -1.2, 0.8] };
        let g = sample(&p, CylinderSpec::standard(1.0), 16, 4).unwrap();
        for x in [[0.11, -0.37, 0.52], [0.97, 0.0, -0.99]] {
            assert_eq!(g.interpolate_gradient(&x, -0.4).unwrap(), [[0.0; 3]; 3]);
        }
    }

    #[test]
    fn resolution_errors() {
        let p = ProfileSpec::zero();
        assert!(matches!(sample(&p, CylinderSpec::standard(1.0), 1, 4), Err(Error::Resolution(_))));
        assert!(matches!(sample(&p, CylinderSpec::standard(1.0), 4, 1), Err(Error::Resolution(_))));
    }

    #[test]
    fn radial_field_has_divergence_three() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for n in [6, 12] {
            let g = sample(&ProfileSpec::Linear { matrix: id }, CylinderSpec::standard(1.0), n, 2).unwrap();
            assert!((g.divergence_residual - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_exact_for_linear_fields() {
        let m = [[0.5, -1.0, 0.2], [0.3, 0.1, -0.4], [1.0, 0.0, 0.7]];
        let p = ProfileSpec::Linear { matrix: m };
        let g = sample(&p, CylinderSpec::standard(1.0), 5, 3).unwrap();
        // includes a point in the extrapolated boundary half-cell
        for x in [[0.11, -0.37, 0.52], [0.95, -0.97, 0.0]] {
            let a = g.interpolate_velocity(&x, -0.42).unwrap();
            let b = p.velocity(&x, -0.42).unwrap();
            for d in 0..3 {
                assert!((a[d] - b[d]).abs() < 1e-12);
            }
            let grad = g.interpolate_gradient(&x, -0.3).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((grad[i][j] - m[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn export_import_round_trip() {
        let p = ProfileSpec::SteadyShear { amplitude: 1.0, wavenumber: 1.0 };
        let g = sample(&p, CylinderSpec::standard(1.0), 4, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        g.export(dir.path(), "grid").unwrap();
        let back = GridField::import(dir.path(), "grid").unwrap();
        assert_eq!(back.n, 4);
        for (a, b) in back.velocities().iter().zip(g.velocities()) {
            for d in 0..3 {
                assert!((a[d] - b[d]).abs() < 1e-15 * (1.0 + b[d].abs()));
            }
        }
    }

    #[test]
    fn sampled_profile_reproduces_nodes() {
        let p = ProfileSpec::power_law(1.0, 0.5, 1.087);
        let g = Arc::new(sample(&p, CylinderSpec::standard(1.0), 6, 3).unwrap());
        let s = ProfileSpec::Sampled(g.clone());
        for idx in [0, 17, 300, g.node_count() - 1] {
            let (x, t) = g.node_position(idx);
            let a = s.velocity(&x, t).unwrap();
            let b = p.velocity(&x, t).unwrap();
            for d in 0..3 {
                assert!((a[d] - b[d]).abs() < 1e-12 * (1.0 + b[d].abs()));
            }
        }
    }
}
