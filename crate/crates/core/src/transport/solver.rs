use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, TransportGrid};
use super::rays::Tracer;
use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::linalg::{fourier_coefficients, lu_solve_complex, solve_tridiagonal, Anderson};
use crate::quadgeom::{DomainSpec, Side};

/// Samples used to expand the inflow data in `θ`.
const DATA_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Source iteration on the scalar flux, one transport sweep per step.
    Iterative,
    /// Dense LU on the assembled scalar-flux system.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub method: SolveMethod,
    pub tol: f64,
    pub max_iterations: usize,
    /// Diffusion synthetic acceleration after each sweep.
    pub acceleration: bool,
    /// Anderson mixing depth on top of the (accelerated) iteration; 0 turns
    /// it off. Keeps the iteration stable when cells are optically thick.
    pub anderson_depth: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolveMethod::Iterative,
            tol: 1e-10,
            max_iterations: 500,
            acceleration: true,
            anderson_depth: 5,
        }
    }
}

/// `w·∇u + ε⁻¹(u − ū) = 0` in the domain, `u = g` on the incoming boundary.
#[derive(Debug, Clone)]
pub struct TransportProblem {
    pub grid: TransportGrid,
    pub data: BoundaryData,
    pub options: SolverOptions,
    /// Highest `θ` mode carried.
    pub k_max: usize,
}

impl TransportProblem {
    pub fn new(
        domain: &DomainSpec,
        eps: f64,
        data: &BoundaryData,
        spec: &GridSpec,
        options: SolverOptions,
    ) -> Result<Self> {
        data.validate()?;
        let dim = domain.dimension();
        if dim == 3 && !data.is_symmetric() {
            return Err(Error::Config(
                "ball and shell runs need rotationally symmetric data".into(),
            ));
        }
        let n_theta = default_theta_count(data, spec);
        let grid = TransportGrid::new(domain, eps, spec, n_theta)?;
        let k_max = if dim == 3 {
            0
        } else {
            let cap = (grid.thetas.len() - 1) / 2;
            (data.max_mode().map_or(16, |m| m as usize)).min(cap).min(32)
        };
        if !(options.tol > 0.0) {
            return Err(Error::Config("solver tolerance must be positive".into()));
        }
        Ok(Self {
            grid,
            data: data.clone(),
            options,
            k_max,
        })
    }

    /// Unknowns of the assembled scalar-flux system.
    pub fn unknowns(&self) -> usize {
        self.grid.radii.len() * (self.k_max + 1)
    }
}

/// `spec.n_theta` when set, or `max(8, 4k+4)` for data with top mode `k`.
pub fn default_theta_count(data: &BoundaryData, spec: &GridSpec) -> usize {
    if spec.n_theta > 0 {
        return spec.n_theta;
    }
    let k = data.max_mode().map_or(16, |m| m as usize);
    (4 * k + 4).max(8)
}

/// Solution on the phase-space grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportField {
    pub grid: TransportGrid,
    /// `ū_k(r_i)` for `k = 0..=k_max`.
    pub modes: Vec<Vec<Complex64>>,
    /// Row-major `[r][θ][ordinate]`.
    pub values: Vec<f64>,
    /// Successive `max |Δū|` per iteration (empty for direct solves).
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub method: SolveMethod,
    pub collar_resolved: bool,
}

impl TransportField {
    pub fn value(&self, ir: usize, it: usize, ia: usize) -> f64 {
        self.values[self.grid.index(ir, it, ia)]
    }

    pub fn average(&self) -> Vec<f64> {
        angular_average(&self.grid, &self.values)
    }
}

/// Normalized angular average of a phase-space field, indexed `[r][θ]`.
pub fn angular_average(grid: &TransportGrid, values: &[f64]) -> Vec<f64> {
    values
        .chunks(grid.alphas.len())
        .map(|c| c.iter().zip(&grid.weights).map(|(v, w)| v * w).sum())
        .collect()
}

/// Per-node boundary sources `[r][ordinate][k]`, kept between sweeps.
struct Sweeper<'a> {
    grid: &'a TransportGrid,
    k_max: usize,
    boundary: Vec<Vec<Vec<Complex64>>>,
}

fn phases(dtheta: f64, k_max: usize) -> impl Iterator<Item = Complex64> {
    let z = Complex64::from_polar(1.0, dtheta);
    std::iter::successors(Some(Complex64::new(1.0, 0.0)), move |p| Some(p * z)).take(k_max + 1)
}

fn data_modes(data: &BoundaryData, side: Side, phi: f64, k_max: usize, dim: usize) -> Vec<Complex64> {
    if dim == 3 {
        return vec![Complex64::new(data.value(side, 0.0, phi), 0.0)];
    }
    let n = DATA_SAMPLES.max(4 * k_max + 4);
    let samples: Vec<f64> = (0..n)
        .map(|l| data.value(side, 2.0 * PI * l as f64 / n as f64, phi))
        .collect();
    fourier_coefficients(&samples, k_max)
}

impl<'a> Sweeper<'a> {
    fn new(problem: &'a TransportProblem) -> Self {
        let grid = &problem.grid;
        let k_max = problem.k_max;
        let dim = grid.dimension();
        let boundary = grid
            .radii
            .par_iter()
            .map_init(Tracer::new, |tr, &r| {
                grid.alphas
                    .iter()
                    .map(|&a| match tr.trace(grid, r, a).exit {
                        Some(e) => data_modes(&problem.data, e.side, e.phi, k_max, dim)
                            .into_iter()
                            .zip(phases(e.dtheta, k_max))
                            .map(|(g, z)| g * z * e.weight)
                            .collect(),
                        None => vec![Complex64::new(0.0, 0.0); k_max + 1],
                    })
                    .collect()
            })
            .collect();
        Self { grid, k_max, boundary }
    }

    /// Angular flux modes `[r][ordinate][k]` for given scalar-flux modes.
    fn sweep(&self, ubar: &[Vec<Complex64>]) -> Vec<Vec<Vec<Complex64>>> {
        let grid = self.grid;
        let k_max = self.k_max;
        (0..grid.radii.len())
            .into_par_iter()
            .map_init(Tracer::new, |tr, i| {
                grid.alphas
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| {
                        let mut u = self.boundary[i][j].clone();
                        for p in tr.trace(grid, grid.radii[i], a).points {
                            for ((uk, z), ub) in u.iter_mut().zip(phases(p.dtheta, k_max)).zip(ubar) {
                                *uk += z * p.weight * (ub[p.cell] * (1.0 - p.t) + ub[p.cell + 1] * p.t);
                            }
                        }
                        u
                    })
                    .collect()
            })
            .collect()
    }

    fn average(&self, ang: &[Vec<Vec<Complex64>>]) -> Vec<Vec<Complex64>> {
        let w = &self.grid.weights;
        (0..=self.k_max)
            .map(|k| {
                ang.iter()
                    .map(|node| node.iter().zip(w).map(|(u, w)| u[k] * *w).sum())
                    .collect()
            })
            .collect()
    }

    /// Dense scalar-flux operator `K_k` and source `b_k` for every mode.
    fn assemble(&self) -> (Vec<DMatrix<Complex64>>, Vec<Vec<Complex64>>) {
        let grid = self.grid;
        let n = grid.radii.len();
        let k_max = self.k_max;
        let rows: Vec<Vec<Vec<Complex64>>> = (0..n)
            .into_par_iter()
            .map_init(Tracer::new, |tr, i| {
                let mut row = vec![vec![Complex64::new(0.0, 0.0); n]; k_max + 1];
                for (&a, w) in grid.alphas.iter().zip(&grid.weights) {
                    for p in tr.trace(grid, grid.radii[i], a).points {
                        for (rk, z) in row.iter_mut().zip(phases(p.dtheta, k_max)) {
                            let c = z * p.weight * *w;
                            rk[p.cell] += c * (1.0 - p.t);
                            rk[p.cell + 1] += c * p.t;
                        }
                    }
                }
                row
            })
            .collect();
        let b = self.average(&self.boundary);
        let mats = (0..=k_max)
            .map(|k| DMatrix::from_fn(n, n, |i, m| rows[i][k][m]))
            .collect();
        (mats, b)
    }
}

/// Vertex-centred diffusion correction `−(ε²/d)Δ_k f = res` with Marshak
/// conditions, for scalar-flux mode `k`.
fn dsa_correction(grid: &TransportGrid, k: usize, res: &[Complex64]) -> Vec<Complex64> {
    let r = &grid.radii;
    let n = r.len();
    let dim = grid.dimension();
    let p = |x: f64| x.powi(dim as i32 - 1);
    let dcoef = grid.eps * grid.eps / dim as f64;
    let marshak = if dim == 2 { PI / 4.0 } else { 2.0 / 3.0 };
    let vol = |lo: f64, hi: f64| (hi.powi(dim as i32) - lo.powi(dim as i32)) / dim as f64;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let lo = if i > 0 { 0.5 * (r[i - 1] + r[i]) } else { r[0] };
        let hi = if i + 1 < n { 0.5 * (r[i] + r[i + 1]) } else { r[n - 1] };
        let v = vol(lo, hi);
        if i > 0 {
            let f = dcoef * p(lo) / (r[i] - r[i - 1]);
            lower[i] = -f;
            diag[i] += f;
        }
        if i + 1 < n {
            let f = dcoef * p(hi) / (r[i + 1] - r[i]);
            upper[i] = -f;
            diag[i] += f;
        }
        if r[i] > 0.0 {
            diag[i] += dcoef * (k * k) as f64 * v / (r[i] * r[i]);
        }
        rhs[i] = res[i] * v;
    }
    diag[n - 1] += dcoef * p(r[n - 1]) / (marshak * grid.eps);
    if r[0] > 0.0 {
        diag[0] += dcoef * p(r[0]) / (marshak * grid.eps);
    } else if k > 0 {
        diag[0] = 1.0;
        upper[0] = 0.0;
        rhs[0] = Complex64::new(0.0, 0.0);
    }
    solve_tridiagonal(&lower, &diag, &upper, &rhs)
}

fn max_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

fn flatten(v: &[Vec<Complex64>]) -> Vec<f64> {
    v.iter().flat_map(|m| m.iter().flat_map(|c| [c.re, c.im])).collect()
}

fn unflatten(v: &[f64], n: usize) -> Vec<Vec<Complex64>> {
    v.chunks(2 * n)
        .map(|m| m.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
        .collect()
}

/// Solve the transport problem by source iteration (optionally accelerated)
/// or by a direct solve of the scalar-flux system.
pub fn solve_transport(problem: &TransportProblem) -> Result<TransportField> {
    let grid = &problem.grid;
    let opts = &problem.options;
    let sweeper = Sweeper::new(problem);
    let n = grid.radii.len();
    let nk = problem.k_max + 1;
    let mut residuals = Vec::new();
    let mut iterations = 0;
    let ubar = match opts.method {
        SolveMethod::Direct => {
            let (mats, b) = sweeper.assemble();
            mats.into_iter()
                .zip(&b)
                .map(|(k, bk)| {
                    let m = DMatrix::<Complex64>::identity(n, n) - k;
                    lu_solve_complex(m, bk)
                })
                .collect::<Result<Vec<_>>>()?
        }
        SolveMethod::Iterative => {
            let mut ubar = vec![vec![Complex64::new(0.0, 0.0); n]; nk];
            let mut mixer = Anderson::new(opts.anderson_depth);
            loop {
                iterations += 1;
                let half = sweeper.average(&sweeper.sweep(&ubar));
                let next: Vec<Vec<Complex64>> = if opts.acceleration {
                    half.iter()
                        .zip(&ubar)
                        .enumerate()
                        .map(|(k, (h, u))| {
                            let res: Vec<Complex64> = h.iter().zip(u).map(|(a, b)| a - b).collect();
                            let f = dsa_correction(grid, k, &res);
                            h.iter().zip(f).map(|(a, b)| a + b).collect()
                        })
                        .collect()
                } else {
                    half
                };
                let d = max_diff(&next, &ubar);
                residuals.push(d);
                ubar = if opts.anderson_depth > 0 {
                    let mixed = mixer.step(&flatten(&ubar), &flatten(&next));
                    unflatten(&mixed, n)
                } else {
                    next
                };
                if d < opts.tol {
                    break;
                }
                if iterations >= opts.max_iterations || !d.is_finite() {
                    return Err(Error::IterationLimit { iterations, residuals });
                }
            }
            ubar
        }
    };
    let ang = sweeper.sweep(&ubar);
    let (nt, na) = (grid.thetas.len(), grid.alphas.len());
    let mut values = vec![0.0; grid.len()];
    for (i, node) in ang.iter().enumerate() {
        for (l, &th) in grid.thetas.iter().enumerate() {
            let rot: Vec<Complex64> = phases(th, problem.k_max).collect();
            for (j, u) in node.iter().enumerate() {
                let mut v = u[0].re;
                for k in 1..nk {
                    v += 2.0 * (u[k] * rot[k]).re;
                }
                values[(i * nt + l) * na + j] = v;
            }
        }
    }
    Ok(TransportField {
        grid: grid.clone(),
        modes: ubar,
        values,
        residuals,
        iterations,
        method: opts.method,
        collar_resolved: grid.collar_resolved(),
    })
}

/// JSON header written next to a raw field payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema: String,
    pub domain: DomainSpec,
    pub eps: f64,
    pub shape: [usize; 3],
    pub axes: [String; 3],
    pub radii: Vec<f64>,
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub weights: Vec<f64>,
    pub dtype: String,
    pub order: String,
    pub payload: String,
}

pub const FIELD_SCHEMA: &str = "nte-field/1";

/// Write `<stem>.bin` (little-endian f64, row-major) and `<stem>.json`.
pub fn export_field(grid: &TransportGrid, values: &[f64], dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    if values.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "field has {} values, grid has {}",
            values.len(),
            grid.len()
        )));
    }
    std::fs::create_dir_all(dir)?;
    let bin = dir.join(format!("{stem}.bin"));
    let json = dir.join(format!("{stem}.json"));
    let mut w = BufWriter::new(File::create(&bin)?);
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    let header = FieldHeader {
        schema: FIELD_SCHEMA.into(),
        domain: grid.domain,
        eps: grid.eps,
        shape: grid.shape(),
        axes: ["r".into(), "theta".into(), "alpha".into()],
        radii: grid.radii.clone(),
        thetas: grid.thetas.clone(),
        alphas: grid.alphas.clone(),
        weights: grid.weights.clone(),
        dtype: "f64-le".into(),
        order: "row-major".into(),
        payload: format!("{stem}.bin"),
    };
    std::fs::write(&json, serde_json::to_string_pretty(&header)?)?;
    Ok((bin, json))
}

/// Read back a field written by [`export_field`].
pub fn import_field(json: &Path) -> Result<(FieldHeader, Vec<f64>)> {
    let header: FieldHeader = serde_json::from_str(&std::fs::read_to_string(json)?)?;
    let bin = json.with_file_name(&header.payload);
    let bytes = std::fs::read(bin)?;
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let expected: usize = header.shape.iter().product();
    if values.len() != expected {
        return Err(Error::GridMismatch(format!(
            "payload has {} values, header says {expected}",
            values.len()
        )));
    }
    Ok((header, values))
}
