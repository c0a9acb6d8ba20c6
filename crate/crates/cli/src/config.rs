use std::path::{Path, PathBuf};

use cavity_route::{
    build_diamond_chain, build_hex_lattice, build_switch, HexLatticeDescriptor, NetworkSpec,
    SystemParams, TransferSearch,
};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    DiamondChain { n: usize },
    Switch,
    HexLattice { lattice: HexLatticeDescriptor },
    Custom { network: NetworkSpec },
}

/// Invariant block whose transfer time drives a protocol window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    /// First or last chain block (4x4).
    H1,
    /// Middle chain block (6x6).
    H2,
    /// Switch upload block (4x4).
    Mu0,
    /// Lattice hop block (6x6).
    Hop,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::H1 => "H1",
            Self::H2 => "H2",
            Self::Mu0 => "H_mu0",
            Self::Hop => "H_hop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoTag {
    #[serde(rename = "auto")]
    Auto,
}

/// `"auto"` or explicit window lengths. `t1` is the first/last chain
/// window or the upload window; `t2` the middle chain window or the hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesConfig {
    Auto(AutoTag),
    Explicit { t1: f64, t2: Option<f64> },
}

impl Default for TimesConfig {
    fn default() -> Self {
        Self::Auto(AutoTag::Auto)
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default)]
    pub times: TimesConfig,
    /// Search window for "auto" times.
    pub window: Option<(f64, f64)>,
    pub grid: Option<usize>,
    pub block: Option<BlockKind>,
    pub port: Option<usize>,
    pub path: Option<Vec<u32>>,
    #[serde(default = "yes")]
    pub compensate: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            times: TimesConfig::default(),
            window: None,
            grid: None,
            block: None,
            port: None,
            path: None,
            compensate: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub samples_per_window: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub topology: Topology,
    pub params: Option<SystemParams>,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(CliError::config)?;
        cfg.params().validate().map_err(CliError::config)?;
        if let Topology::Custom { .. } = cfg.topology {
            if cfg.params.is_some() {
                return Err(CliError::config("custom networks carry their own params"));
            }
        }
        if let Some((lo, hi)) = cfg.protocol.window {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CliError::config(format!("empty search window ({lo}, {hi})")));
            }
        }
        if let TimesConfig::Explicit { t1, t2 } = cfg.protocol.times {
            if !(t1 > 0.0 && t1.is_finite()) || t2.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return Err(CliError::config("explicit times must be positive"));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> SystemParams {
        match &self.topology {
            Topology::Custom { network } => network.params,
            _ => self.params.unwrap_or_else(SystemParams::resonant),
        }
    }

    pub fn network(&self) -> CliResult<NetworkSpec> {
        let p = self.params();
        let spec = match &self.topology {
            Topology::DiamondChain { n } => build_diamond_chain(*n, p),
            Topology::Switch => Ok(build_switch(p)),
            Topology::HexLattice { lattice } => build_hex_lattice(lattice, p),
            Topology::Custom { network } => network.validate().map(|_| network.clone()),
        };
        spec.map_err(CliError::config)
    }

    /// Search settings for "auto" times; flags override the config.
    pub fn search(&self, tmax: Option<f64>, grid: Option<usize>) -> CliResult<TransferSearch> {
        let mut s = TransferSearch::default_for(self.params().delta);
        if let Some(w) = self.protocol.window {
            s.window = w;
        }
        if let Some(g) = self.protocol.grid {
            s.grid_points = g;
        }
        if let Some(t) = tmax {
            s.window.1 = t;
        }
        if let Some(g) = grid {
            s.grid_points = g;
        }
        let (lo, hi) = s.window;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::config(format!("empty search window ({lo}, {hi})")));
        }
        Ok(s)
    }
}
