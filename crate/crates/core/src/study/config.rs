use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::milne::{EtaMesh, MilneOptions};
use crate::quadgeom::DomainSpec;
use crate::sources::CollarSpec;
use crate::transport::{GridSpec, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    /// `‖u^ε − U₀‖` and the remainder norms over the ε sweep.
    Convergence,
    /// Source and boundary-data norms over the ε sweep.
    Sources,
    /// Decay and far-field stability of named half-space problems.
    Milne,
    /// Characteristic paths and the hollow-region mask.
    Characteristics,
    /// Weak-formulation terms and the discrete Green identity.
    KernelCheck,
    /// Constant data end to end.
    Exactness,
    /// Iterated against direct solves on small instances.
    Oracle,
}

impl Study {
    pub fn name(&self) -> &'static str {
        match self {
            Study::Convergence => "convergence",
            Study::Sources => "sources",
            Study::Milne => "milne",
            Study::Characteristics => "characteristics",
            Study::KernelCheck => "kernel-check",
            Study::Exactness => "exactness",
            Study::Oracle => "oracle",
        }
    }

    fn needs_rates(&self) -> bool {
        matches!(self, Study::Convergence | Study::Sources)
    }
}

/// Half-space solves feeding the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MilneSettings {
    pub n_polar: usize,
    /// Boundary points per face at which a half-space problem is solved.
    pub n_theta: usize,
    pub height: f64,
    pub first: f64,
    pub ratio: f64,
    pub max_cell: f64,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for MilneSettings {
    fn default() -> Self {
        Self {
            n_polar: 64,
            n_theta: 8,
            height: 30.0,
            first: 1e-4,
            ratio: 1.05,
            max_cell: 0.05,
            tol: 1e-10,
            max_iterations: 20_000,
        }
    }
}

impl MilneSettings {
    pub fn mesh(&self) -> Result<EtaMesh> {
        EtaMesh::graded(self.height, self.first, self.ratio, self.max_cell)
    }

    pub fn options(&self) -> MilneOptions {
        MilneOptions {
            tol: self.tol,
            max_iterations: self.max_iterations,
            ..MilneOptions::default()
        }
    }
}

/// A named inflow for the half-space decay study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedData {
    pub name: String,
    pub data: BoundaryData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MilneStudySettings {
    pub families: Vec<NamedData>,
    /// Relative tolerance on `Φ_∞` under doubling the height.
    pub far_field_tol: f64,
    /// Largest admissible `C / ‖Ψ(0, ·)‖_∞`.
    pub constant_ratio: f64,
}

impl Default for MilneStudySettings {
    fn default() -> Self {
        let named = |name: &str, data| NamedData {
            name: name.into(),
            data,
        };
        Self {
            families: vec![
                named(
                    "cosine",
                    BoundaryData::FourierMode {
                        base: 1.0,
                        amplitude: 0.5,
                        mode: 0,
                    },
                ),
                named(
                    "sine",
                    BoundaryData::SinPolynomial {
                        coefficients: vec![0.0, 1.0],
                    },
                ),
                named(
                    "quadratic",
                    BoundaryData::SinPolynomial {
                        coefficients: vec![1.0, 0.5, -0.3],
                    },
                ),
                named(
                    "grazing",
                    BoundaryData::Grazing {
                        base: 0.0,
                        amplitude: 1.0,
                        mode: 0,
                        width: 0.2,
                    },
                ),
                named(
                    "tabulated",
                    BoundaryData::Tabulated {
                        thetas: vec![0.0],
                        phis: vec![-FRAC_PI_2, -0.5, 0.0, 0.5, FRAC_PI_2],
                        values: vec![vec![0.0, 0.4, 1.0, 0.7, 0.2]],
                    },
                ),
            ],
            far_field_tol: 1e-6,
            constant_ratio: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacteristicSettings {
    pub eps: f64,
    /// Starting heights of the exported paths.
    pub etas: Vec<f64>,
    /// Number of starting angles, uniform on `(−π/2, π/2)`.
    pub n_phi: usize,
    /// Backward tracing time.
    pub t_span: f64,
    pub step: f64,
    /// Mask resolution `[eta][phi]` on `[0, eta_max] × [−π/2, π/2]`.
    pub mask_eta: usize,
    pub mask_phi: usize,
    pub eta_max: f64,
    /// Random points checked against direct integration.
    pub samples: usize,
    pub invariant_tol: f64,
    /// Every how many steps a path sample is written.
    pub write_every: usize,
}

impl Default for CharacteristicSettings {
    fn default() -> Self {
        Self {
            eps: 0.1,
            etas: vec![0.5, 2.0, 5.0, 8.0],
            n_phi: 9,
            t_span: 60.0,
            step: 0.005,
            mask_eta: 81,
            mask_phi: 81,
            eta_max: 20.0,
            samples: 500,
            invariant_tol: 1e-8,
            write_every: 20,
        }
    }
}

/// Small instances for the iterated-versus-direct comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSettings {
    pub domains: Vec<DomainSpec>,
    pub eps: Vec<f64>,
    pub grid: GridSpec,
    pub tol: f64,
    pub max_unknowns: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            domains: vec![
                DomainSpec::Disk { radius: 1.0 },
                DomainSpec::Annulus { inner: 1.0, outer: 2.0 },
                DomainSpec::Ball { radius: 1.0 },
                DomainSpec::Shell { inner: 1.0, outer: 2.0 },
            ],
            eps: vec![0.2, 0.05],
            grid: GridSpec {
                n_polar: 16,
                finest: 0.25,
                grading: 1.3,
                max_cell: 0.1,
                ..GridSpec::default()
            },
            tol: 1e-8,
            max_unknowns: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSettings {
    /// Grid doublings for the Green-identity refinement check.
    pub refinements: usize,
    /// Largest admissible `|⟨R̄, w·∇ξ⟩| / (‖R̄‖‖w·∇ξ‖)`.
    pub oddness_tol: f64,
    /// Admissible deviation of `−⟨R̄, (w·∇)²ξ⟩ / (|S|/d ‖R̄‖²)` from 1.
    pub moment_tol: f64,
    /// Value and tolerance of the constant-data run.
    pub exact_value: f64,
    pub exact_tol: f64,
}

impl Default for KernelSettings {
    fn default() -> Self {
        Self {
            refinements: 2,
            oddness_tol: 1e-10,
            moment_tol: 0.2,
            exact_value: 1.5,
            exact_tol: 1e-10,
        }
    }
}

/// Re-solve on a refined grid at selected ε and compare `‖u − U₀‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementSettings {
    pub eps: Vec<f64>,
    /// Largest admissible relative change.
    pub tol: f64,
}

impl Default for RefinementSettings {
    fn default() -> Self {
        Self {
            eps: Vec::new(),
            tol: 0.05,
        }
    }
}

/// A pass band `[min, max]` on a fitted slope; either end may be open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub quantity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

impl Band {
    pub fn new(quantity: &str, min: Option<f64>, max: Option<f64>) -> Self {
        Self {
            quantity: quantity.into(),
            min,
            max,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v.is_finite() && self.min.is_none_or(|m| v >= m) && self.max.is_none_or(|m| v <= m)
    }
}

/// Everything a run needs. Every field has a default, and the resolved
/// configuration is echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub name: String,
    pub studies: Vec<Study>,
    pub domain: DomainSpec,
    pub data: BoundaryData,
    pub eps: Vec<f64>,
    pub seed: u64,
    pub output: PathBuf,
    /// Also write every solved field in the binary format.
    pub export_fields: bool,
    pub grid: GridSpec,
    pub solver: SolverOptions,
    pub milne: MilneSettings,
    pub collar: CollarSpec,
    pub milne_study: MilneStudySettings,
    pub characteristics: CharacteristicSettings,
    pub oracle: OracleSettings,
    pub kernel: KernelSettings,
    pub refinement: RefinementSettings,
    /// Slope bands checked after the fits; empty means the defaults of
    /// every selected study.
    pub bands: Vec<Band>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            name: "study".into(),
            studies: vec![Study::Convergence],
            domain: DomainSpec::Disk { radius: 1.0 },
            data: BoundaryData::default(),
            eps: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
            seed: 1,
            output: PathBuf::from("out"),
            export_fields: false,
            grid: GridSpec::default(),
            solver: SolverOptions::default(),
            milne: MilneSettings::default(),
            collar: CollarSpec::default(),
            milne_study: MilneStudySettings::default(),
            characteristics: CharacteristicSettings::default(),
            oracle: OracleSettings::default(),
            kernel: KernelSettings::default(),
            refinement: RefinementSettings::default(),
            bands: Vec::new(),
        }
    }
}

/// Default bands of each study.
pub fn default_bands(study: Study) -> Vec<Band> {
    match study {
        Study::Convergence => vec![
            Band::new("u-U0/L2", Some(0.4), Some(0.6)),
            Band::new("u-U0/L2", None, Some(0.75)),
            Band::new("Rbar/L2", Some(0.4), None),
            Band::new("R-Rbar/L2", Some(0.8), None),
        ],
        Study::Sources => vec![
            Band::new("h/gamma-", Some(0.9), Some(1.1)),
            Band::new("S0/L2", Some(1.8), Some(2.2)),
            Band::new("S1/L2-weighted", Some(-0.2), Some(0.2)),
            Band::new("S2/L2-weighted", Some(0.4), Some(0.6)),
            Band::new("S3/L2xL1-weighted", Some(0.4), Some(0.6)),
            Band::new("U_B/L2", Some(0.4), Some(0.6)),
        ],
        _ => Vec::new(),
    }
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?).map_err(|e| e.at_stage(format!("config {}", path.display())))
    }

    /// The resolved configuration as TOML.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.data.validate()?;
        self.grid.validate()?;
        if self.studies.is_empty() {
            return Err(Error::Config("no studies selected".into()));
        }
        if self.eps.iter().any(|e| !(*e > 0.0 && *e <= 0.5)) {
            return Err(Error::Config("every eps must lie in (0, 0.5]".into()));
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("eps list must be strictly decreasing".into()));
        }
        if self.studies.iter().any(Study::needs_rates) && self.eps.len() < 3 {
            return Err(Error::Config("rate fits need at least 3 eps values".into()));
        }
        if self
            .studies
            .iter()
            .any(|s| *s != Study::Characteristics && *s != Study::Oracle && *s != Study::Milne)
            && self.eps.is_empty()
        {
            return Err(Error::Config("eps list is empty".into()));
        }
        if self.domain.dimension() == 3 && !self.data.is_symmetric() {
            return Err(Error::Config(
                "ball and shell runs need rotationally symmetric data".into(),
            ));
        }
        let c = &self.characteristics;
        if !(c.eps > 0.0 && c.step > 0.0 && c.t_span > 0.0 && c.eta_max > 0.0)
            || c.mask_eta < 2
            || c.mask_phi < 2
            || c.write_every == 0
        {
            return Err(Error::Config("bad characteristics settings".into()));
        }
        Ok(())
    }

    /// Bands in force: the configured ones, or the defaults of every study.
    pub fn active_bands(&self) -> Vec<Band> {
        if !self.bands.is_empty() {
            return self.bands.clone();
        }
        self.studies.iter().flat_map(|s| default_bands(*s)).collect()
    }
}
