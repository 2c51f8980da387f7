use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fit_line, lu_solve, Anderson};
use crate::quadgeom::{AngularGrid, AngularPoint};

/// Strictly increasing mesh on `[0, H]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaMesh {
    pub nodes: Vec<f64>,
}

impl Default for EtaMesh {
    fn default() -> Self {
        Self::graded(30.0, 1e-4, 1.05, 0.05).expect("default mesh")
    }
}

impl EtaMesh {
    /// Geometric grading from `first` by `ratio`, capped at `max_cell`, then
    /// stretched so the last node lands on `height`.
    pub fn graded(height: f64, first: f64, ratio: f64, max_cell: f64) -> Result<Self> {
        if !(height > 0.0 && first > 0.0 && ratio >= 1.0 && max_cell >= first) {
            return Err(Error::Config(format!(
                "bad eta mesh: H={height} h0={first} ratio={ratio} max={max_cell}"
            )));
        }
        let mut nodes = vec![0.0];
        let mut h = first;
        while *nodes.last().unwrap() < height {
            let next = nodes.last().unwrap() + h;
            nodes.push(next);
            h = (h * ratio).min(max_cell);
        }
        let last = *nodes.last().unwrap();
        // merge a sliver last cell, then rescale onto [0, H]
        let n = nodes.len();
        if n > 2 && last - height > 0.5 * (nodes[n - 1] - nodes[n - 2]) {
            nodes.pop();
        }
        let scale = height / nodes.last().unwrap();
        nodes.iter_mut().for_each(|x| *x *= scale);
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("eta mesh must start at 0 and increase strictly".into()));
        }
        Ok(Self { nodes })
    }

    pub fn height(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Split every cell into `factor` equal pieces.
    pub fn refined(&self, factor: usize) -> Self {
        let mut nodes = vec![0.0];
        for w in self.nodes.windows(2) {
            for k in 1..=factor {
                nodes.push(w[0] + (w[1] - w[0]) * k as f64 / factor as f64);
            }
        }
        Self { nodes }
    }

    /// Same grading continued to a larger height.
    pub fn extended(&self, height: f64) -> Self {
        let mut nodes = self.nodes.clone();
        let h = nodes[nodes.len() - 1] - nodes[nodes.len() - 2];
        while *nodes.last().unwrap() + 0.5 * h < height {
            let next = nodes.last().unwrap() + h;
            nodes.push(next);
        }
        *nodes.last_mut().unwrap() = height;
        Self { nodes }
    }
}

/// Half-space problem `sin φ ∂_η Φ + Φ − Φ̄ = 0`, `Φ(0, φ) = g(φ)` for `sin φ > 0`.
///
/// Directions are stored after collapsing the azimuth: in 3D each polar node
/// carries the azimuth-averaged data, which is all the average `Φ̄` sees.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilneProblem {
    pub dimension: usize,
    pub mesh: EtaMesh,
    /// `sin φ` per direction.
    pub directions: Vec<f64>,
    /// Polar angle per direction.
    pub angles: Vec<f64>,
    /// Normalized weights, summing to 1.
    pub weights: Vec<f64>,
    /// Incoming data per direction (unused where `sin φ < 0`).
    pub inflow: Vec<f64>,
}

impl MilneProblem {
    pub fn new<F: Fn(&AngularPoint) -> f64>(grid: &AngularGrid, mesh: EtaMesh, g: F) -> Result<Self> {
        let total = grid.total_measure();
        let (directions, raw_w) = grid.polar_collapsed();
        let weights: Vec<f64> = raw_w.iter().map(|w| w / total).collect();
        let mut angles = Vec::with_capacity(directions.len());
        let mut inflow = Vec::with_capacity(directions.len());
        for (chunk, wchunk) in grid
            .nodes
            .chunks(grid.n_azimuth)
            .zip(grid.weights.chunks(grid.n_azimuth))
        {
            angles.push(chunk[0].phi);
            let wsum: f64 = wchunk.iter().sum();
            let v: f64 = chunk.iter().zip(wchunk).map(|(p, w)| w * g(p)).sum::<f64>() / wsum;
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite inflow at phi={}", chunk[0].phi)));
            }
            inflow.push(if chunk[0].phi.sin() > 0.0 { v } else { 0.0 });
        }
        Ok(Self {
            dimension: grid.dimension,
            mesh,
            directions,
            angles,
            weights,
            inflow,
        })
    }

    /// One transport sweep given the average; returns the new average and
    /// optionally the nodal values per direction.
    fn sweep(&self, avg: &[f64], inflow_on: bool, mut nodal: Option<&mut Vec<Vec<f64>>>) -> Vec<f64> {
        let x = &self.mesh.nodes;
        let n = x.len();
        let mut out = vec![0.0; n];
        for (j, (&s, &w)) in self.directions.iter().zip(&self.weights).enumerate() {
            let mut vals = vec![0.0; n];
            if s > 0.0 {
                let mut phi = if inflow_on { self.inflow[j] } else { 0.0 };
                vals[0] = phi;
                for i in 0..n - 1 {
                    phi = cell_update(phi, avg[i], avg[i + 1], (x[i + 1] - x[i]) / s);
                    vals[i + 1] = phi;
                }
            } else {
                let mut phi = avg[n - 1];
                vals[n - 1] = phi;
                for i in (0..n - 1).rev() {
                    phi = cell_update(phi, avg[i + 1], avg[i], (x[i + 1] - x[i]) / -s);
                    vals[i] = phi;
                }
            }
            for (o, v) in out.iter_mut().zip(&vals) {
                *o += w * v;
            }
            if let Some(store) = nodal.as_deref_mut() {
                store[j] = vals;
            }
        }
        out
    }

    fn finish(&self, average: Vec<f64>, residual_history: Vec<f64>, iterations: usize) -> MilneSolution {
        let mut values = vec![Vec::new(); self.directions.len()];
        self.sweep(&average, true, Some(&mut values));
        let mut sol = MilneSolution {
            dimension: self.dimension,
            mesh: self.mesh.nodes.clone(),
            directions: self.directions.clone(),
            angles: self.angles.clone(),
            weights: self.weights.clone(),
            inflow: self.inflow.clone(),
            average,
            values,
            phi_inf: 0.0,
            phi_inf_extrapolated: 0.0,
            decay_rate: f64::INFINITY,
            decay_constant: 0.0,
            decay_floor: 0.0,
            residual: residual_history.last().copied().unwrap_or(0.0),
            residual_history,
            iterations,
        };
        sol.phi_inf = far_field_average(&sol.mesh, &sol.average);
        sol.phi_inf_extrapolated = aitken_limit(&sol);
        let (k, c, floor) = fit_decay(&sol);
        sol.decay_rate = k;
        sol.decay_constant = c;
        sol.decay_floor = floor;
        sol
    }
}

/// Exact characteristic update across one cell with linear `Φ̄`.
///
/// `avg_in` is the average at the entry end, `tau` the optical length
/// `h/|sin φ|`. Coefficients are non-negative and sum to one.
pub fn cell_update(phi_in: f64, avg_in: f64, avg_out: f64, tau: f64) -> f64 {
    let e = (-tau).exp();
    let one_minus = -(-tau).exp_m1();
    let c = if tau < 1e-4 {
        tau / 2.0 - tau * tau / 6.0 + tau.powi(3) / 24.0
    } else {
        1.0 - one_minus / tau
    };
    e * phi_in + (one_minus - c) * avg_in + c * avg_out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilneOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub anderson_depth: usize,
}

impl Default for MilneOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 20_000,
            anderson_depth: 10,
        }
    }
}

/// Solved half-space problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilneSolution {
    pub dimension: usize,
    pub mesh: Vec<f64>,
    pub directions: Vec<f64>,
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    pub inflow: Vec<f64>,
    /// `Φ̄` at mesh nodes.
    pub average: Vec<f64>,
    /// `Φ` indexed `[direction][node]`.
    pub values: Vec<Vec<f64>>,
    pub phi_inf: f64,
    pub phi_inf_extrapolated: f64,
    /// Fitted `K̂` in `max_φ |Ψ(η, ·)| ≈ C e^{−K̂ η}`; infinite when `Ψ ≡ 0`.
    pub decay_rate: f64,
    /// Smallest `C` making the bound hold on the mesh above `decay_floor`.
    pub decay_constant: f64,
    /// Level below which `Ψ` is treated as solver noise by the fit.
    pub decay_floor: f64,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub iterations: usize,
}

/// Source iteration with Anderson mixing.
pub fn solve_milne(problem: &MilneProblem, opts: &MilneOptions) -> Result<MilneSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config("milne tolerance must be positive".into()));
    }
    let n = problem.mesh.len();
    let start = problem
        .inflow
        .iter()
        .zip(&problem.directions)
        .filter(|(_, s)| **s > 0.0)
        .map(|(g, _)| *g)
        .sum::<f64>()
        / problem.directions.iter().filter(|s| **s > 0.0).count().max(1) as f64;
    let mut x = vec![start; n];
    let mut acc = Anderson::new(opts.anderson_depth);
    let mut history = Vec::new();
    for it in 1..=opts.max_iterations {
        let g = problem.sweep(&x, true, None);
        let diff = g.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        history.push(diff);
        if diff < opts.tol {
            return Ok(problem.finish(g, history, it));
        }
        x = acc.step(&x, &g);
    }
    Err(Error::IterationLimit {
        iterations: opts.max_iterations,
        residuals: history,
    })
}

/// Dense assembly of the sweep operator and a direct LU solve.
pub fn solve_milne_direct(problem: &MilneProblem) -> Result<MilneSolution> {
    let n = problem.mesh.len();
    let b = problem.sweep(&vec![0.0; n], true, None);
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut unit = vec![0.0; n];
    for col in 0..n {
        unit[col] = 1.0;
        let a = problem.sweep(&unit, false, None);
        for (row, v) in a.iter().enumerate() {
            m[(row, col)] -= v;
        }
        unit[col] = 0.0;
    }
    let avg = lu_solve(m, &b)?;
    let g = problem.sweep(&avg, true, None);
    let res = g.iter().zip(&avg).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(problem.finish(avg, vec![res], 1))
}

pub fn milne_infinity(solution: &MilneSolution) -> f64 {
    solution.phi_inf
}

/// Trapezoid average of `Φ̄` over the top tenth of the mesh.
fn far_field_average(mesh: &[f64], avg: &[f64]) -> f64 {
    let h = *mesh.last().unwrap();
    let lo = 0.9 * h;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..mesh.len() - 1 {
        if mesh[i + 1] <= lo {
            continue;
        }
        let a = mesh[i].max(lo);
        let b = mesh[i + 1];
        let t = |x: f64| avg[i] + (avg[i + 1] - avg[i]) * (x - mesh[i]) / (mesh[i + 1] - mesh[i]);
        num += 0.5 * (b - a) * (t(a) + t(b));
        den += b - a;
    }
    num / den
}

fn aitken_limit(sol: &MilneSolution) -> f64 {
    let h = *sol.mesh.last().unwrap();
    let v: Vec<f64> = [0.15, 0.2, 0.25].iter().map(|f| sol.average_at(f * h)).collect();
    let den = v[0] + v[2] - 2.0 * v[1];
    if den.abs() < 1e-14 {
        v[2]
    } else {
        (v[0] * v[2] - v[1] * v[1]) / den
    }
}

fn fit_decay(sol: &MilneSolution) -> (f64, f64, f64) {
    let m: Vec<f64> = (0..sol.mesh.len())
        .map(|i| {
            sol.values
                .iter()
                .map(|col| (col[i] - sol.phi_inf).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    if m[0] < 1e-12 {
        return (f64::INFINITY, 0.0, 1e-12);
    }
    let floor = (1e-8 * m[0]).max(1e3 * sol.residual.max(1e-16));
    let cut = m.iter().position(|v| *v <= floor).unwrap_or(m.len());
    if cut < 3 {
        return (f64::INFINITY, m[0], floor);
    }
    let xs = &sol.mesh[..cut];
    let ys: Vec<f64> = m[..cut].iter().map(|v| v.ln()).collect();
    let (slope, _, _) = fit_line(xs, &ys);
    let k = -slope;
    let c = xs
        .iter()
        .zip(&m[..cut])
        .map(|(x, v)| v * (k * x).exp())
        .fold(0.0, f64::max);
    (k, c, floor)
}

impl MilneSolution {
    pub fn height(&self) -> f64 {
        *self.mesh.last().unwrap()
    }

    pub fn psi(&self, direction: usize, node: usize) -> f64 {
        self.values[direction][node] - self.phi_inf
    }

    /// `Φ̄` at any `η` (constant beyond the mesh).
    pub fn average_at(&self, eta: f64) -> f64 {
        let x = &self.mesh;
        if eta <= 0.0 {
            return self.average[0];
        }
        if eta >= self.height() {
            return *self.average.last().unwrap();
        }
        let i = x.partition_point(|v| *v <= eta) - 1;
        let t = (eta - x[i]) / (x[i + 1] - x[i]);
        self.average[i] * (1.0 - t) + self.average[i + 1] * t
    }

    /// Angular flux `∫ sin φ Φ` at each node.
    pub fn flux(&self) -> Vec<f64> {
        (0..self.mesh.len())
            .map(|i| {
                self.values
                    .iter()
                    .zip(&self.directions)
                    .zip(&self.weights)
                    .map(|((col, s), w)| w * s * col[i])
                    .sum()
            })
            .collect()
    }

    /// `Φ` along a direction with `sin φ = s` at ascending `etas`.
    ///
    /// `inflow` is `g` for that direction and is ignored when `s ≤ 0`. Beyond
    /// the mesh top, `Φ̄` is continued as its last value.
    pub fn trace(&self, s: f64, inflow: f64, etas: &[f64]) -> Vec<f64> {
        let x = &self.mesh;
        let avg = &self.average;
        let n = x.len();
        let mut out = vec![0.0; etas.len()];
        if s > 0.0 {
            let mut phi = inflow;
            let mut i = 0;
            for (q, &e) in etas.iter().enumerate() {
                let e = e.max(0.0);
                while i + 1 < n && x[i + 1] <= e {
                    phi = cell_update(phi, avg[i], avg[i + 1], (x[i + 1] - x[i]) / s);
                    i += 1;
                }
                let d = e - x[i];
                let a_end = if i + 1 < n {
                    avg[i] + (avg[i + 1] - avg[i]) * d / (x[i + 1] - x[i])
                } else {
                    avg[n - 1]
                };
                out[q] = cell_update(phi, avg[i], a_end, d / s);
            }
        } else if s < 0.0 {
            let a = -s;
            let mut phi = avg[n - 1];
            let mut i = n - 1;
            for (q, &e) in etas.iter().enumerate().rev() {
                let e = e.max(0.0);
                if e >= x[n - 1] {
                    out[q] = avg[n - 1];
                    continue;
                }
                while i > 1 && x[i - 1] > e {
                    phi = cell_update(phi, avg[i], avg[i - 1], (x[i] - x[i - 1]) / a);
                    i -= 1;
                }
                let d = x[i] - e;
                let a_end = avg[i] + (avg[i - 1] - avg[i]) * d / (x[i] - x[i - 1]);
                out[q] = cell_update(phi, avg[i], a_end, d / a);
            }
        } else {
            for (q, &e) in etas.iter().enumerate() {
                out[q] = self.average_at(e);
            }
        }
        out
    }

    pub fn psi_trace(&self, s: f64, inflow: f64, etas: &[f64]) -> Vec<f64> {
        let mut v = self.trace(s, inflow, etas);
        v.iter_mut().for_each(|x| *x -= self.phi_inf);
        v
    }
}
