//! Ball averages over all grid centres, point sets and periodic distance fields.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fft::{fft_nd, Direction};
use crate::grid::Grid;

/// Grid points within physical distance `radius` of the origin (periodic).
pub fn ball_kernel(grid: &Grid, radius: f64) -> (Vec<f64>, usize) {
    let h = grid.spacing();
    let r2 = (radius / h) * (radius / h) * (1.0 + 1e-12);
    let mut k = vec![0.0; grid.len()];
    let mut count = 0;
    for (i, v) in k.iter_mut().enumerate() {
        let m = grid.multi_index(i);
        let d2: i64 = m.iter().map(|x| x * x).sum();
        if (d2 as f64) <= r2 {
            *v = 1.0;
            count += 1;
        }
    }
    (k, count)
}

/// Periodic convolution of real data with a real kernel (both grid-indexed).
pub struct Convolver {
    grid: Grid,
}

impl Convolver {
    pub fn new(grid: Grid) -> Self {
        Convolver { grid }
    }

    pub fn spectrum(&self, data: &[f64]) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = data.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        fft_nd(&mut v, self.grid.n, self.grid.dim, Direction::Forward);
        v
    }

    /// (data ∗ kernel)(x) = Σ_y data(y) kernel(x − y), given both spectra.
    pub fn apply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
        let mut v: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        fft_nd(&mut v, self.grid.n, self.grid.dim, Direction::Inverse);
        let s = 1.0 / self.grid.len() as f64;
        v.iter().map(|x| x.re * s).collect()
    }
}

/// Averages of `values` over the ball of given radius around every grid point.
pub fn ball_averages(grid: &Grid, values: &[f64], radius: f64) -> Vec<f64> {
    let (k, count) = ball_kernel(grid, radius);
    if count == 1 {
        return values.to_vec();
    }
    let c = Convolver::new(*grid);
    let a = c.spectrum(values);
    let b = c.spectrum(&k);
    let inv = 1.0 / count as f64;
    c.apply(&a, &b)
        .into_iter()
        .map(|x| (x * inv).max(0.0))
        .collect()
}

/// Exhaustive average over one ball, for oracles.
pub fn ball_average_direct(grid: &Grid, values: &[f64], centre: usize, radius: f64) -> f64 {
    let h = grid.spacing();
    let r2 = (radius / h) * (radius / h) * (1.0 + 1e-12);
    let c = grid.point_index(centre);
    let n = grid.n as i64;
    let reach = (radius / h) as i64;
    let mut sum = 0.0;
    let mut count = 0usize;
    let range = -reach..=reach;
    let zr = if grid.dim == 3 { range.clone() } else { 0..=0 };
    for dx in range.clone() {
        for dy in range.clone() {
            for dz in zr.clone() {
                if ((dx * dx + dy * dy + dz * dz) as f64) > r2 {
                    continue;
                }
                let p = [
                    (c[0] as i64 + dx).rem_euclid(n) as usize,
                    (c[1] as i64 + dy).rem_euclid(n) as usize,
                    (c[2] as i64 + dz).rem_euclid(n) as usize,
                ];
                sum += values[grid.linear(p)];
                count += 1;
            }
        }
    }
    sum / count as f64
}

/// Dyadic radii in cell units: 2^{i/4}·h up to half the box.
pub fn morrey_radii(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let top = (grid.n / 2) as f64;
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let r = libm::exp2(i as f64 / 4.0);
        if r > top * (1.0 + 1e-12) {
            break;
        }
        out.push(r * h);
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetShape {
    /// Single point at physical coordinates.
    Point([f64; 3]),
    /// Hyperplane {x_axis = offset}.
    Plane { axis: usize, offset: f64 },
    /// Line through `at` along `axis` (3-d).
    Line { axis: usize, at: [f64; 3] },
    /// Arbitrary finite sample.
    Samples,
}

/// Finite sample of a closed set on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub points: Vec<[f64; 3]>,
    pub shape: SetShape,
}

impl PointSet {
    pub fn point(p: [f64; 3]) -> Self {
        PointSet {
            points: vec![p],
            shape: SetShape::Point(p),
        }
    }

    /// Plane {x_axis = offset}, sampled on the grid trace.
    pub fn plane(grid: &Grid, axis: usize, offset: f64) -> Self {
        let mut points = Vec::new();
        let h = grid.spacing();
        let sub = Grid {
            dim: grid.dim,
            n: grid.n,
            l: grid.l,
        };
        for i in 0..sub.len() {
            let p = sub.point_index(i);
            if p[axis] != 0 {
                continue;
            }
            let mut x = [p[0] as f64 * h, p[1] as f64 * h, p[2] as f64 * h];
            x[axis] = offset;
            points.push(x);
        }
        PointSet {
            points,
            shape: SetShape::Plane { axis, offset },
        }
    }

    pub fn from_points(points: Vec<[f64; 3]>) -> Self {
        PointSet {
            points,
            shape: SetShape::Samples,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact periodic distance to the described set (analytic shapes) or to the samples.
    pub fn distance(&self, grid: &Grid, x: &[f64; 3]) -> f64 {
        match &self.shape {
            SetShape::Point(p) => grid.torus_distance(x, p),
            SetShape::Plane { axis, offset } => {
                let period = 2.0 * core::f64::consts::PI * grid.l;
                let mut d = crate::grid::wrap(x[*axis] - offset, period);
                if d > 0.5 * period {
                    d = period - d;
                }
                d
            }
            SetShape::Line { axis, at } => {
                let mut y = *x;
                y[*axis] = at[*axis];
                grid.torus_distance(&y, at)
            }
            SetShape::Samples => self
                .points
                .iter()
                .map(|p| grid.torus_distance(x, p))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// d_S sampled at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DistanceField {
    pub fn new(grid: &Grid, set: &PointSet) -> Result<Self> {
        if set.is_empty() {
            return Err(LabError::DegenerateSet);
        }
        let values = match set.shape {
            SetShape::Samples => {
                let h = grid.spacing();
                let on_grid = set.points.iter().all(|p| {
                    (0..grid.dim).all(|a| {
                        let c = p[a] / h;
                        (c - libm::round(c)).abs() < 1e-9
                    })
                });
                if on_grid && set.points.len() > 1 {
                    edt_sites(grid, set)
                } else {
                    brute(grid, set)
                }
            }
            _ => brute(grid, set),
        };
        Ok(DistanceField {
            grid: *grid,
            values,
        })
    }

    /// max over neighbour pairs of (|d(x) − d(y)| − |x − y|), ≤ 0 for a 1-Lipschitz field.
    pub fn lipschitz_excess(&self) -> f64 {
        let g = self.grid;
        let h = g.spacing();
        let mut worst = f64::MIN;
        for i in 0..g.len() {
            let p = g.point_index(i);
            for a in 0..g.dim {
                let mut q = p;
                q[a] = (q[a] + 1) % g.n;
                let j = g.linear(q);
                worst = worst.max((self.values[i] - self.values[j]).abs() - h);
            }
        }
        worst
    }
}

fn brute(grid: &Grid, set: &PointSet) -> Vec<f64> {
    (0..grid.len())
        .map(|i| set.distance(grid, &grid.point(i)))
        .collect()
}

/// Exact Euclidean distance transform (lower envelope of parabolas), periodic.
fn edt_sites(grid: &Grid, set: &PointSet) -> Vec<f64> {
    let n = grid.n;
    let h = grid.spacing();
    let big = 1e30;
    let mut f = vec![big; grid.len()];
    for p in &set.points {
        let mut pos = [0usize; 3];
        for a in 0..grid.dim {
            pos[a] = (libm::round(p[a] / h) as i64).rem_euclid(n as i64) as usize;
        }
        f[grid.linear(pos)] = 0.0;
    }
    let stride = |a: usize| n.pow((grid.dim - 1 - a) as u32);
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];
    for a in 0..grid.dim {
        let s = stride(a);
        for base in 0..grid.len() {
            if (base / s) % n != 0 {
                continue;
            }
            for (i, v) in line.iter_mut().enumerate() {
                *v = f[base + i * s];
            }
            periodic_envelope(&line, &mut out);
            for (i, v) in out.iter().enumerate() {
                f[base + i * s] = *v;
            }
        }
    }
    f.iter().map(|v| libm::sqrt(*v) * h).collect()
}

/// d(i) = min_q f(q) + dist_periodic(i, q)², via a tripled line.
fn periodic_envelope(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let m = 3 * n;
    let g: Vec<f64> = (0..m).map(|i| f[i % n]).collect();
    let mut v = vec![0usize; m];
    let mut z = vec![0.0f64; m + 1];
    let mut k = 0usize;
    let mut first = None;
    for q in 0..m {
        if g[q] >= 1e29 {
            continue;
        }
        if first.is_none() {
            first = Some(q);
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            continue;
        }
        loop {
            let p = v[k];
            let s =
                ((g[q] + (q * q) as f64) - (g[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    if first.is_none() {
        out.iter_mut().for_each(|o| *o = 1e30);
        return;
    }
    let mut kk = 0;
    for q in 0..m {
        while z[kk + 1] < q as f64 {
            kk += 1;
        }
        if q >= n && q < 2 * n {
            let p = v[kk];
            let d = q as f64 - p as f64;
            out[q - n] = d * d + g[p];
        }
    }
}
