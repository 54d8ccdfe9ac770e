//! Run configuration shared by every subcommand; read from JSON with `--config` and
//! overridden by flags.

use serde::{Deserialize, Serialize};

use lplab_core::solver::SolverConfig;
use lplab_core::symbol::SymbolSpec;
use lplab_core::Grid;

use crate::error::{parse_err, AppResult};
use crate::spec::parse_space;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCfg {
    pub dim: usize,
    pub n: usize,
    pub l: f64,
}

impl GridCfg {
    pub fn grid(&self) -> AppResult<Grid> {
        Ok(Grid::new(self.dim, self.n, self.l)?)
    }
}

impl From<Grid> for GridCfg {
    fn from(g: Grid) -> Self {
        GridCfg {
            dim: g.dim,
            n: g.n,
            l: g.l,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<String>,
    pub csv: Option<String>,
    pub field: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// None means the subcommand's own default grid.
    pub grid: Option<GridCfg>,
    pub space: String,
    pub symbol: String,
    pub n_exp: u32,
    pub k_max: u32,
    pub tol: f64,
    pub quad_nodes: usize,
    pub max_iter: usize,
    pub probes: usize,
    pub seed: u64,
    pub threads: usize,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: None,
            space: "lebesgue:p=3".into(),
            symbol: "scalar1".into(),
            n_exp: 4,
            k_max: 12,
            tol: 1e-8,
            quad_nodes: 32,
            max_iter: 60,
            probes: 32,
            seed: 1,
            threads: 1,
            outputs: Outputs::default(),
        }
    }
}

pub fn parse_symbol(s: &str) -> AppResult<SymbolSpec> {
    match s {
        "scalar1" => Ok(SymbolSpec::Scalar1),
        "cone" => Ok(SymbolSpec::ScalarCone),
        "leray" => Ok(SymbolSpec::LerayDiv),
        _ => parse_err(format!("unknown symbol '{s}' (scalar1, cone, leray)")),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> AppResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Grid in effect, filling in `fallback` when none was configured.
    pub fn resolve_grid(&mut self, fallback: GridCfg) -> AppResult<Grid> {
        let g = *self.grid.get_or_insert(fallback);
        g.grid()
    }

    pub fn solver_config(&self, grid: Grid) -> AppResult<SolverConfig> {
        let mut c = SolverConfig::new(grid);
        c.base = parse_space(&self.space, &grid)?;
        c.sym = parse_symbol(&self.symbol)?;
        c.n_exp = self.n_exp;
        c.k_max = self.k_max;
        c.tol = self.tol;
        c.quad_nodes = self.quad_nodes;
        c.max_iter = self.max_iter;
        c.probes = self.probes;
        c.seed = self.seed;
        Ok(c)
    }
}
