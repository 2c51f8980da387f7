use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Band, Study, StudyConfig};
use super::export;
use super::fit::{fit_rate, RateFit};
use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::interior::build_expansion;
use crate::milne::{
    build_boundary_layer, classify_hollow, orbit_touches_boundary, solve_milne, solve_milne_direct,
    trace_characteristic, CharacteristicPath, CutoffSpec, MilneFamily, MilneProblem, MilneSolution,
};
use crate::quadgeom::{AngularGrid, DomainSpec, Side};
use crate::sources::{assemble_sources, sources_on_grid, ApproximateSolution, NormReport};
use crate::transport::{
    export_field, green_identity_residual, interior_distance, kernel_estimate_check, remainder_diagnostics,
    solve_transport, GridSpec, KernelReport, SolveMethod, SolverOptions, TransportField, TransportGrid,
    TransportProblem,
};

pub const REPORT_SCHEMA: &str = "nte-report/1";

/// A scalar property compared against a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub study: String,
    pub name: String,
    pub value: f64,
    /// One of `<=`, `>=`, `<`, `>`.
    pub relation: String,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn new(study: Study, name: impl Into<String>, value: f64, relation: &str, limit: f64) -> Self {
        let pass = match relation {
            "<=" => value <= limit,
            ">=" => value >= limit,
            "<" => value < limit,
            ">" => value > limit,
            _ => false,
        };
        Self {
            study: study.name().into(),
            name: name.into(),
            value,
            relation: relation.into(),
            limit,
            pass,
        }
    }

    fn flag(study: Study, name: impl Into<String>, ok: bool) -> Self {
        Self::new(study, name, if ok { 1.0 } else { 0.0 }, ">=", 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub quantity: String,
    #[serde(flatten)]
    pub fit: RateFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    #[serde(flatten)]
    pub band: Band,
    pub slope: f64,
    pub pass: bool,
}

/// Size of one solved transport grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub eps: f64,
    pub radial_nodes: usize,
    pub theta_nodes: usize,
    pub ordinates: usize,
    pub iterations: usize,
    /// Fewest radial cells inside an `ε`-collar over the faces.
    pub collar_cells: usize,
    pub collar_resolved: bool,
}

impl GridMeta {
    fn of(field: &TransportField) -> Self {
        let g = &field.grid;
        Self {
            eps: g.eps,
            radial_nodes: g.radii.len(),
            theta_nodes: g.thetas.len(),
            ordinates: g.alphas.len(),
            iterations: field.iterations,
            collar_cells: g.collar_cells().iter().map(|c| c.1).min().unwrap_or(0),
            collar_resolved: field.collar_resolved,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilneSummary {
    pub name: String,
    pub decay_rate: f64,
    pub decay_constant: f64,
    /// `‖Ψ(0, ·)‖_∞`
    pub boundary_sup: f64,
    pub phi_inf: f64,
    /// `Φ_∞` on the mesh extended to twice the height.
    pub phi_inf_extended: f64,
    pub iterations: usize,
}

/// Everything a run produces, written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema: String,
    pub name: String,
    pub config: StudyConfig,
    pub norms: NormReport,
    pub slopes: Vec<SlopeFit>,
    pub bands: Vec<BandCheck>,
    pub checks: Vec<Check>,
    pub grids: Vec<GridMeta>,
    pub kernel: Vec<KernelReport>,
    pub milne: Vec<MilneSummary>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl ConvergenceReport {
    fn new(cfg: &StudyConfig) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            name: cfg.name.clone(),
            config: cfg.clone(),
            norms: NormReport::new(),
            slopes: Vec::new(),
            bands: Vec::new(),
            checks: Vec::new(),
            grids: Vec::new(),
            kernel: Vec::new(),
            milne: Vec::new(),
            warnings: Vec::new(),
            pass: false,
        }
    }

    pub fn slope(&self, quantity: &str) -> Option<&RateFit> {
        self.slopes.iter().find(|s| s.quantity == quantity).map(|s| &s.fit)
    }

    /// Check `bands` against the fitted slopes. A missing quantity fails.
    pub fn evaluate_bands(&self, bands: &[Band]) -> Vec<BandCheck> {
        bands
            .iter()
            .map(|b| {
                let slope = self.slope(&b.quantity).map_or(f64::NAN, |f| f.slope);
                BandCheck {
                    band: b.clone(),
                    slope,
                    pass: b.contains(slope),
                }
            })
            .collect()
    }

    fn finish(&mut self) -> Result<()> {
        self.slopes = fit_all(&self.norms, &self.config.eps)?;
        self.bands = self.evaluate_bands(&self.config.active_bands());
        self.pass = self.bands.iter().all(|b| b.pass) && self.checks.iter().all(|c| c.pass);
        Ok(())
    }
}

/// Fit a rate to every `field/norm` quantity sampled at each `eps`.
fn fit_all(norms: &NormReport, eps: &[f64]) -> Result<Vec<SlopeFit>> {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for e in &norms.entries {
        series
            .entry(format!("{}/{}", e.field, e.norm))
            .or_default()
            .push((e.eps, e.value));
    }
    let mut out = Vec::new();
    for (quantity, pairs) in series {
        let full = eps.len() >= 3 && eps.iter().all(|e| pairs.iter().any(|p| p.0 == *e));
        if full {
            out.push(SlopeFit {
                quantity,
                fit: fit_rate(&pairs)?,
            });
        }
    }
    Ok(out)
}

/// Run every selected study and write the artefacts under `cfg.output`.
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let out = cfg.output.clone();
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("config.toml"), cfg.to_toml()?)?;
    let mut report = ConvergenceReport::new(cfg);
    let mut family = None;
    for study in &cfg.studies {
        log::info!("{}: {}", cfg.name, study.name());
        let stage = |e: Error| e.at_stage(study.name());
        match study {
            Study::Convergence | Study::Sources | Study::KernelCheck => {
                if family.is_none() {
                    family = Some(solve_family(cfg, &cfg.data).map_err(stage)?);
                }
                let fam = family.as_ref().expect("family");
                match study {
                    Study::Convergence => convergence(cfg, fam, &mut report),
                    Study::Sources => sources(cfg, fam, &mut report),
                    _ => kernel_check(cfg, fam, &mut report),
                }
            }
            Study::Milne => milne(cfg, &mut report),
            Study::Characteristics => characteristics(cfg, &mut report),
            Study::Exactness => exactness(cfg, &mut report),
            Study::Oracle => oracle(cfg, &mut report),
        }
        .map_err(stage)?;
    }
    report.finish()?;
    export::write_report(&report, &out)?;
    Ok(report)
}

pub(crate) fn solve_family(cfg: &StudyConfig, data: &BoundaryData) -> Result<Arc<MilneFamily>> {
    let grid = AngularGrid::new(cfg.domain.dimension(), cfg.milne.n_polar, 1)?;
    let fam = MilneFamily::solve(
        &cfg.domain,
        data,
        &grid,
        &cfg.milne.mesh()?,
        cfg.milne.n_theta,
        &cfg.milne.options(),
    )?;
    Ok(Arc::new(fam))
}

pub(crate) fn approximate(domain: &DomainSpec, family: &Arc<MilneFamily>, eps: f64) -> Result<ApproximateSolution> {
    let interior = build_expansion(domain, family, eps)?;
    let layer = build_boundary_layer(family.clone(), eps, CutoffSpec::fitted(domain.collar_room()))?;
    ApproximateSolution::new(interior, layer)
}

fn transport(
    domain: &DomainSpec,
    data: &BoundaryData,
    eps: f64,
    grid: &GridSpec,
    opts: SolverOptions,
) -> Result<TransportField> {
    let p = TransportProblem::new(domain, eps, data, grid, opts)?;
    solve_transport(&p).map_err(|e| e.at_stage(format!("transport eps={eps}")))
}

fn convergence(cfg: &StudyConfig, fam: &Arc<MilneFamily>, report: &mut ConvergenceReport) -> Result<()> {
    let st = Study::Convergence;
    let rows = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let u = transport(&cfg.domain, &cfg.data, eps, &cfg.grid, cfg.solver)?;
            let ua = approximate(&cfg.domain, fam, eps)?;
            let dist = interior_distance(&u, &ua.interior.u0)?;
            let diag = remainder_diagnostics(&u, &ua)?;
            if cfg.export_fields {
                export_field(&u.grid, &u.values, &cfg.output.join("fields"), &format!("u-eps{eps}"))?;
                export_field(
                    &u.grid,
                    &diag.remainder,
                    &cfg.output.join("fields"),
                    &format!("R-eps{eps}"),
                )?;
            }
            let refined = if cfg.refinement.eps.contains(&eps) {
                let fine = transport(&cfg.domain, &cfg.data, eps, &cfg.grid.refined(), cfg.solver)?;
                Some(interior_distance(&fine, &ua.interior.u0)?)
            } else {
                None
            };
            let defect = diag.decomposition_defect().abs() / diag.total_l2.powi(2).max(f64::MIN_POSITIVE);
            Ok((
                eps,
                GridMeta::of(&u),
                dist,
                diag.average_l2,
                diag.deviation_l2,
                diag.total_l2,
                diag.gamma_plus,
                defect,
                refined,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    for (eps, meta, dist, avg, dev, total, gamma, defect, refined) in rows {
        let n = &mut report.norms;
        n.push("u-U0", "L2", eps, dist);
        n.push("R", "L2", eps, total);
        n.push("Rbar", "L2", eps, avg);
        n.push("R-Rbar", "L2", eps, dev);
        n.push("R", "gamma+", eps, gamma);
        report.checks.push(Check::new(
            st,
            format!("orthogonal decomposition eps={eps}"),
            defect,
            "<=",
            1e-10,
        ));
        if let Some(fine) = refined {
            let change = (fine - dist).abs() / dist;
            report.checks.push(Check::new(
                st,
                format!("refinement change eps={eps}"),
                change,
                "<=",
                cfg.refinement.tol,
            ));
        }
        if !meta.collar_resolved {
            report.warnings.push(format!(
                "eps={eps}: only {} radial cells inside the collar",
                meta.collar_cells
            ));
        }
        if !report.grids.iter().any(|g| g.eps == eps) {
            report.grids.push(meta);
        }
    }
    Ok(())
}

fn sources(cfg: &StudyConfig, fam: &Arc<MilneFamily>, report: &mut ConvergenceReport) -> Result<()> {
    let parts = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let ua = approximate(&cfg.domain, fam, eps)?;
            assemble_sources(&ua, &cfg.collar)?.norms()
        })
        .collect::<Result<Vec<_>>>()?;
    for p in parts {
        report.norms.extend(p.entries);
    }
    Ok(())
}

/// Smooth phase-space fields for the Green identity; symmetric in 3D.
fn green_pair(dim: usize) -> (fn(&[f64], &[f64]) -> f64, fn(&[f64], &[f64]) -> f64) {
    if dim == 2 {
        (
            |x, w| (0.3 * x[0]).exp() * (1.0 + w[0]) + x[1],
            |x, w| (0.5 * x[0] * x[1] + w[1]).cos(),
        )
    } else {
        (
            |x, w| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let xw: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
                (0.5 * r2 + xw).exp()
            },
            |x, w| 1.0 + x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>().sin(),
        )
    }
}

fn sample(g: &TransportGrid, f: fn(&[f64], &[f64]) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; g.len()];
    for ir in 0..g.radii.len() {
        for it in 0..g.thetas.len() {
            for ia in 0..g.alphas.len() {
                let (x, w) = g.point(ir, it, ia);
                out[g.index(ir, it, ia)] = f(&x, &w);
            }
        }
    }
    out
}

fn kernel_check(cfg: &StudyConfig, fam: &Arc<MilneFamily>, report: &mut ConvergenceReport) -> Result<()> {
    let st = Study::KernelCheck;
    let k = &cfg.kernel;
    let reports = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let u = transport(&cfg.domain, &cfg.data, eps, &cfg.grid, cfg.solver)?;
            let ua = approximate(&cfg.domain, fam, eps)?;
            let diag = remainder_diagnostics(&u, &ua)?;
            let src = sources_on_grid(&ua, &u.grid)?;
            kernel_estimate_check(&diag, &src)
        })
        .collect::<Result<Vec<_>>>()?;
    for r in reports {
        let e = r.eps;
        let odd = r.oddness.abs() / r.oddness_scale.max(f64::MIN_POSITIVE);
        report
            .checks
            .push(Check::new(st, format!("oddness eps={e}"), odd, "<=", k.oddness_tol));
        report.checks.push(Check::new(
            st,
            format!("second moment ratio eps={e}"),
            (r.second_ratio - 1.0).abs(),
            "<=",
            k.moment_tol,
        ));
        report
            .norms
            .push("kernel-residual", "relative", e, (r.conservation / r.average_sq).abs());
        report.kernel.push(r);
    }
    let eps = cfg.eps[0];
    let (f, g) = green_pair(cfg.domain.dimension());
    let mut spec = cfg.grid;
    let mut residuals = Vec::new();
    for level in 0..=k.refinements {
        let nt = if cfg.domain.dimension() == 2 {
            (spec.n_polar / 2).max(8)
        } else {
            1
        };
        let grid = TransportGrid::new(&cfg.domain, eps, &spec, nt)?;
        let res = green_identity_residual(&grid, &sample(&grid, f), &sample(&grid, g))?.abs();
        report.norms.push("green-residual", &format!("level{level}"), eps, res);
        residuals.push(res);
        spec = spec.refined();
    }
    for (i, w) in residuals.windows(2).enumerate() {
        report.checks.push(Check::new(
            st,
            format!("green residual decays level {}->{}", i, i + 1),
            w[1] / w[0],
            "<",
            0.5,
        ));
    }
    Ok(())
}

fn exactness(cfg: &StudyConfig, report: &mut ConvergenceReport) -> Result<()> {
    let st = Study::Exactness;
    let c = cfg.kernel.exact_value;
    let data = BoundaryData::Constant { value: c };
    let fam = solve_family(cfg, &data)?;
    let tol = cfg.kernel.exact_tol;
    let opts = SolverOptions {
        tol: tol.min(cfg.solver.tol),
        ..cfg.solver
    };
    let rows = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let u = transport(&cfg.domain, &data, eps, &cfg.grid, opts)?;
            let dev = u.values.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
            let ua = approximate(&cfg.domain, &fam, eps)?;
            let grid_src = sources_on_grid(&ua, &u.grid)?
                .iter()
                .map(|s| s.total().abs().max(s.ub.abs()))
                .fold(0.0, f64::max);
            let terms = assemble_sources(&ua, &cfg.collar)?;
            let collar_src = terms
                .samples
                .iter()
                .map(|s| s.total().abs().max(s.ub.abs()))
                .chain(terms.s0.iter().map(|v| v.abs()))
                .chain(terms.h.iter().map(|v| v.abs()))
                .fold(0.0, f64::max);
            Ok((eps, dev, grid_src.max(collar_src)))
        })
        .collect::<Result<Vec<_>>>()?;
    for (eps, dev, src) in rows {
        report
            .checks
            .push(Check::new(st, format!("max |u - c| eps={eps}"), dev, "<=", tol));
        report
            .checks
            .push(Check::new(st, format!("max |source| eps={eps}"), src, "<=", tol));
    }
    Ok(())
}

fn oracle(cfg: &StudyConfig, report: &mut ConvergenceReport) -> Result<()> {
    let st = Study::Oracle;
    let o = &cfg.oracle;
    let tight = SolverOptions {
        tol: 1e-13,
        ..cfg.solver
    };
    for domain in &o.domains {
        let data = if domain.dimension() == 3 && !cfg.data.is_symmetric() {
            BoundaryData::SinPolynomial {
                coefficients: vec![1.0, 0.5, -0.3],
            }
        } else {
            cfg.data.clone()
        };
        for &eps in &o.eps {
            let p = TransportProblem::new(domain, eps, &data, &o.grid, tight)?;
            let label = format!("{} eps={eps}", domain_label(domain));
            if p.unknowns() > o.max_unknowns {
                report
                    .warnings
                    .push(format!("{label}: {} unknowns, skipped", p.unknowns()));
                continue;
            }
            let it = solve_transport(&p)?;
            let direct = solve_transport(&TransportProblem {
                options: SolverOptions {
                    method: SolveMethod::Direct,
                    ..tight
                },
                ..p.clone()
            })?;
            let diff = it
                .values
                .iter()
                .zip(&direct.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            report.checks.push(Check::new(
                st,
                format!("transport {label} unknowns={}", p.unknowns()),
                diff,
                "<=",
                o.tol,
            ));
        }
    }
    let dim = cfg.domain.dimension();
    let grid = AngularGrid::new(dim, cfg.milne.n_polar, 1)?;
    let opts = crate::milne::MilneOptions {
        tol: 1e-13,
        ..cfg.milne.options()
    };
    for named in &cfg.milne_study.families {
        let p = MilneProblem::new(&grid, cfg.milne.mesh()?, |a| named.data.value(Side::Outer, 0.0, a.phi))?;
        let it = solve_milne(&p, &opts)?;
        let direct = solve_milne_direct(&p)?;
        let diff = it
            .values
            .iter()
            .zip(&direct.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        report.checks.push(Check::new(
            st,
            format!("milne {} unknowns={}", named.name, p.mesh.len()),
            diff,
            "<=",
            o.tol,
        ));
    }
    Ok(())
}

fn domain_label(d: &DomainSpec) -> &'static str {
    match d {
        DomainSpec::Disk { .. } => "disk",
        DomainSpec::Annulus { .. } => "annulus",
        DomainSpec::Ball { .. } => "ball",
        DomainSpec::Shell { .. } => "shell",
    }
}

fn boundary_sup(s: &MilneSolution) -> f64 {
    (0..s.directions.len()).map(|j| s.psi(j, 0).abs()).fold(0.0, f64::max)
}

/// Largest excess of `max_φ |Ψ(η, φ)|` over `C e^{−Kη}` on the mesh, relative to `C`.
fn bound_excess(s: &MilneSolution) -> f64 {
    let mut worst = 0.0f64;
    for (i, &eta) in s.mesh.iter().enumerate() {
        let m = (0..s.directions.len()).map(|j| s.psi(j, i).abs()).fold(0.0, f64::max);
        let bound = s.decay_constant * (-s.decay_rate * eta).exp();
        worst = worst.max((m - bound - s.decay_floor) / s.decay_constant.max(f64::MIN_POSITIVE));
    }
    worst
}

fn milne(cfg: &StudyConfig, report: &mut ConvergenceReport) -> Result<()> {
    let st = Study::Milne;
    let ms = &cfg.milne_study;
    let grid = AngularGrid::new(cfg.domain.dimension(), cfg.milne.n_polar, 1)?;
    let mesh = cfg.milne.mesh()?;
    let long = mesh.extended(2.0 * mesh.height());
    let opts = cfg.milne.options();
    let dir = cfg.output.join("milne");
    std::fs::create_dir_all(&dir)?;
    let solved = ms
        .families
        .par_iter()
        .map(|named| {
            let inflow = |a: &crate::quadgeom::AngularPoint| named.data.value(Side::Outer, 0.0, a.phi);
            let s = solve_milne(&MilneProblem::new(&grid, mesh.clone(), inflow)?, &opts)?;
            let l = solve_milne(&MilneProblem::new(&grid, long.clone(), inflow)?, &opts)?;
            Ok((s, l))
        })
        .collect::<Result<Vec<_>>>()?;
    for (named, (s, l)) in ms.families.iter().zip(solved) {
        export::write_milne(&s, &dir.join(format!("{}.csv", named.name)))?;
        let sup = boundary_sup(&s);
        let n = &named.name;
        if sup > 0.0 {
            report
                .checks
                .push(Check::new(st, format!("{n} decay rate"), s.decay_rate, ">", 0.0));
            report.checks.push(Check::new(
                st,
                format!("{n} C / |Psi(0)|"),
                s.decay_constant / sup,
                "<=",
                ms.constant_ratio,
            ));
            report.checks.push(Check::new(
                st,
                format!("{n} bound excess"),
                bound_excess(&s),
                "<=",
                1e-12,
            ));
        }
        let scale = s.phi_inf.abs().max(1.0);
        report.checks.push(Check::new(
            st,
            format!("{n} far field H->2H"),
            (s.phi_inf - l.phi_inf).abs() / scale,
            "<=",
            ms.far_field_tol,
        ));
        report.milne.push(MilneSummary {
            name: n.clone(),
            decay_rate: s.decay_rate,
            decay_constant: s.decay_constant,
            boundary_sup: sup,
            phi_inf: s.phi_inf,
            phi_inf_extended: l.phi_inf,
            iterations: s.iterations,
        });
    }
    Ok(())
}

fn characteristics(cfg: &StudyConfig, report: &mut ConvergenceReport) -> Result<()> {
    let st = Study::Characteristics;
    let c = &cfg.characteristics;
    let eps = c.eps;
    let root = cfg.output.join("characteristics");
    let phis: Vec<f64> = (0..c.n_phi)
        .map(|j| -FRAC_PI_2 + std::f64::consts::PI * (j + 1) as f64 / (c.n_phi + 1) as f64)
        .collect();
    let lin =
        |n: usize, a: f64, b: f64| -> Vec<f64> { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
    let mask_eta = lin(c.mask_eta, 0.0, c.eta_max);
    let mask_phi = lin(c.mask_phi, -FRAC_PI_2, FRAC_PI_2);
    for (label, k) in [("convex", 1.0), ("non-convex", -1.0)] {
        let dir = root.join(label);
        std::fs::create_dir_all(&dir)?;
        let starts: Vec<(f64, f64)> = c.etas.iter().flat_map(|&e| phis.iter().map(move |&p| (e, p))).collect();
        let paths: Vec<CharacteristicPath> = starts
            .par_iter()
            .map(|&s| trace_characteristic(eps, k, s, -c.t_span, c.step))
            .collect();
        let mut drift = 0.0f64;
        let mut reached = 0;
        for (i, p) in paths.iter().enumerate() {
            export::write_path(p, c.write_every, &dir.join(format!("path-{i:03}.csv")))?;
            drift = drift.max(p.invariant_drift());
            reached += p.reached_boundary() as usize;
        }
        report.checks.push(Check::new(
            st,
            format!("{label} invariant drift"),
            drift,
            "<=",
            c.invariant_tol,
        ));
        if k > 0.0 {
            report.checks.push(Check::new(
                st,
                "convex paths reaching the boundary backward",
                reached as f64,
                ">=",
                paths.len() as f64,
            ));
        }
        let mask = classify_hollow(eps, k, &mask_eta, &mask_phi);
        let count = export::write_mask(&mask, &mask_eta, &mask_phi, &root.join(format!("hollow-{label}.csv")))?;
        report.norms.push("hollow", label, eps, count as f64);
        if k > 0.0 {
            report
                .checks
                .push(Check::new(st, "convex hollow points", count as f64, "<=", 0.0));
        } else {
            report
                .checks
                .push(Check::new(st, "non-convex hollow points", count as f64, ">", 0.0));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts: Vec<(f64, f64)> = (0..c.samples)
        .map(|_| {
            (
                rng.random_range(0.0..c.eta_max),
                rng.random_range(-FRAC_PI_2..FRAC_PI_2),
            )
        })
        .collect();
    let k = -1.0;
    let verdicts: Vec<Option<bool>> = pts
        .par_iter()
        .map(|&(eta, phi)| {
            let e = crate::milne::conserved_quantity(eps, k, eta, phi);
            if (e - 1.0).abs() < 1e-3 {
                return None;
            }
            let hollow = classify_hollow(eps, k, &[eta], &[phi])[0][0];
            let touches = orbit_touches_boundary(eps, k, eta, phi, 3.0 * c.eta_max, 0.01);
            Some(hollow != touches)
        })
        .collect();
    let checked = verdicts.iter().flatten().count();
    let agree = verdicts.iter().flatten().filter(|v| **v).count();
    report.checks.push(Check::new(
        st,
        format!(
            "hollow membership agrees ({checked} checked, {} near separatrix)",
            c.samples - checked
        ),
        agree as f64,
        ">=",
        checked as f64,
    ));
    report
        .checks
        .push(Check::flag(st, "sampled points checked", checked > 0));
    Ok(())
}

/// Write `report` where `run_study` would.
pub fn write_report(report: &ConvergenceReport, dir: &Path) -> Result<()> {
    export::write_report(report, dir)
}
