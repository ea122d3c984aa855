//! TOML run configuration. Unknown keys are rejected at every level.

use std::path::Path;

use dirac_split::expr::Expr;
use dirac_split::lattice::{Coupling, Grid};
use dirac_split::potential::PotentialSpec;
use dirac_split::separation::SolverMethod;
use dirac_split::Branch;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: f64,
    /// "1"/"dotted1" or "2"/"dotted2"; `--branch` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    pub potential: PotentialBlock,
    pub grid: GridBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub check: CheckBlock,
    #[serde(default)]
    pub solution: SolutionBlock,
    #[serde(default)]
    pub report: ReportBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    /// Charge for the expression form; builtins take it from `params`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a3: Option<String>,
    #[serde(default = "default_coupling")]
    pub coupling: String,
}

fn default_coupling() -> String {
    "peierls".into()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub transverse: AxisBlock,
    /// Shared by x⁰ and x³. Defaults to the transverse range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub longitudinal: Option<AxisBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub modes: usize,
    pub tolerance: f64,
    /// "auto", "dense" or "iterative".
    pub method: String,
    pub max_iter: usize,
    pub seed: u64,
    /// Number of distinct λ² levels to locate by inertia counting (0 skips).
    pub levels: usize,
    pub level_step: f64,
    pub level_resolution: f64,
    pub level_min_multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_window: Option<[f64; 2]>,
}

impl Default for SolverBlock {
    fn default() -> Self {
        SolverBlock {
            modes: 6,
            tolerance: 1e-8,
            method: "auto".into(),
            max_iter: 300,
            seed: 0x5eed,
            levels: 0,
            level_step: 0.5,
            level_resolution: 2e-3,
            level_min_multiplicity: 1,
            level_window: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckBlock {
    pub probes: usize,
    pub seed: u64,
    /// Points per axis of the 4D probe and sampling grid.
    pub points: usize,
    pub tolerance: f64,
}

impl Default for CheckBlock {
    fn default() -> Self {
        CheckBlock { probes: 4, seed: 1, points: 8, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    PlaneWave,
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransverseChoice {
    /// `index`-th mode of the transverse solver.
    Lowest,
    /// Inverse iteration from the `level`-th Landau seed.
    Landau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolutionBlock {
    pub kind: SolutionKind,
    /// Spatial canonical momentum (p¹, p², p³) of a plane wave.
    pub momentum: [f64; 3],
    /// Dotted spinor (η₁̇, η₂̇) as [re, im] pairs.
    pub eta: [[f64; 2]; 2],
    pub transverse: TransverseChoice,
    pub index: usize,
    pub level: usize,
    pub iterations: usize,
    /// Kinetic momentum along x³ of the longitudinal plane wave.
    pub p3: f64,
    pub energy: EnergySign,
    /// Canonical (p¹, p²) of the closed-form mode in constant potentials.
    pub p_transverse: [f64; 2],
    /// Pass threshold for `split`.
    pub tolerance: f64,
}

impl Default for SolutionBlock {
    fn default() -> Self {
        SolutionBlock {
            kind: SolutionKind::PlaneWave,
            momentum: [0.0; 3],
            eta: [[1.0, 0.0], [0.0, 0.0]],
            transverse: TransverseChoice::Lowest,
            index: 0,
            level: 0,
            iterations: 1,
            p3: 0.0,
            energy: EnergySign::Positive,
            p_transverse: [0.0; 2],
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportBlock {
    pub out: String,
}

impl Default for ReportBlock {
    fn default() -> Self {
        ReportBlock { out: "out".into() }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if !(cfg.m > 0.0) {
            return Err(CliError::Config(format!("m must be positive, got {}", cfg.m)));
        }
        cfg.solver_method()?;
        cfg.coupling()?;
        cfg.configured_branch()?;
        Ok(cfg)
    }

    pub fn potential(&self) -> Result<PotentialSpec, CliError> {
        let p = &self.potential;
        let exprs = [&p.a0, &p.a1, &p.a2, &p.a3];
        match &p.name {
            Some(name) => {
                if exprs.iter().any(|e| e.is_some()) || p.q.is_some() {
                    return Err(CliError::Config(
                        "potential: give either `name`/`params` or `q` with `a0`..`a3`, not both".into(),
                    ));
                }
                Ok(PotentialSpec::builtin(name, &p.params)?)
            }
            None => {
                if !p.params.is_empty() {
                    return Err(CliError::Config("potential.params needs potential.name".into()));
                }
                let mut a: [Expr; 4] = Default::default();
                for (slot, src) in a.iter_mut().zip(exprs) {
                    if let Some(s) = src {
                        *slot = Expr::parse(s)?;
                    }
                }
                Ok(PotentialSpec::new(p.q.unwrap_or(1.0), a))
            }
        }
    }

    pub fn coupling(&self) -> Result<Coupling, CliError> {
        match self.potential.coupling.as_str() {
            "peierls" => Ok(Coupling::Peierls),
            "minimal" => Ok(Coupling::Minimal),
            other => Err(CliError::Config(format!("potential.coupling: unknown value `{other}`"))),
        }
    }

    pub fn solver_method(&self) -> Result<SolverMethod, CliError> {
        self.solver.method.parse().map_err(|e: dirac_split::Error| CliError::Config(format!("solver.method: {e}")))
    }

    fn configured_branch(&self) -> Result<Option<Branch>, CliError> {
        self.branch.as_deref().map(parse_branch).transpose()
    }

    /// `--branch` if given, else the config value, else dotted1.
    pub fn branch(&self, flag: Option<&str>) -> Result<Branch, CliError> {
        match flag {
            Some(f) => parse_branch(f),
            None => Ok(self.configured_branch()?.unwrap_or(Branch::Dotted1)),
        }
    }

    pub fn transverse_grid(&self) -> Result<Grid, CliError> {
        let t = self.grid.transverse;
        Ok(Grid::transverse(t.min, t.max, t.n)?)
    }

    pub fn transverse_grid_with(&self, n: usize) -> Result<Grid, CliError> {
        let t = self.grid.transverse;
        Ok(Grid::transverse(t.min, t.max, n)?)
    }

    pub fn longitudinal_axis(&self) -> AxisBlock {
        self.grid.longitudinal.unwrap_or(self.grid.transverse)
    }

    /// 4D grid with `check.points` per axis over the configured ranges.
    pub fn sample_grid(&self) -> Result<Grid, CliError> {
        let n = self.check.points;
        let t = self.grid.transverse;
        let l = self.longitudinal_axis();
        let long = Grid::longitudinal((l.min, l.max, n), (l.min, l.max, n))?;
        let trans = Grid::transverse(t.min, t.max, n)?;
        Ok(dirac_split::potential::sample_grid(&long, &trans)?)
    }
}

fn parse_branch(s: &str) -> Result<Branch, CliError> {
    s.parse().map_err(|_| CliError::Config(format!("branch must be 1 or 2, got `{s}`")))
}
