use std::io::Write;
use std::path::PathBuf;

use cavity_route::analytic::{uniform_grid, validate_analytic, AnalyticBlock};
use cavity_route::subspaces::{chain_length, CouplingScale};
use cavity_route::{
    block_decompose, build_single_excitation_hamiltonian, chain_collective_basis,
    chain_routing_schedule, entanglement_transfer, find_transfer_time, hex_routing_schedule,
    lattice_collective_basis, run_schedule, switch_schedule, BlockHamiltonian, ExcitationState,
    NetworkSpec, Schedule, SystemParams, TransferTime,
};
use clap::Args;

use crate::config::{BlockKind, RunConfig, TimesConfig, Topology};
use crate::error::{CliError, CliResult};
use crate::trace::{emit_trace_csv, Footer};

pub const DEFAULT_SAMPLES: usize = 1001;
pub const BLOCK_RESIDUAL_MAX: f64 = 1e-12;
pub const ANALYTIC_ERROR_MAX: f64 = 1e-9;
pub const ROUTING_FIDELITY_MIN: f64 = 0.99;
pub const TRANSFER_FIDELITY_MIN: f64 = 0.999;

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV trace destination (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Upper end of the transfer-time search window.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Grid size for transfer-time search or analytic validation.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Samples per evolution window in traces.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Exit with status 1 when a numerical threshold is missed.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TransferArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub block: Option<BlockKind>,
    /// Source basis index inside the block (default: first atom).
    #[arg(long)]
    pub source: Option<usize>,
    /// Target basis index inside the block (default: last atom).
    #[arg(long)]
    pub target: Option<usize>,
}

struct Context {
    cfg: RunConfig,
    spec: NetworkSpec,
    args: CommonArgs,
}

impl Context {
    fn load(args: &CommonArgs) -> CliResult<Self> {
        let cfg = RunConfig::load(&args.config)?;
        let spec = cfg.network()?;
        Ok(Self { cfg, spec, args: args.clone() })
    }

    fn strict_check(&self, ok: bool, what: String) -> CliResult<()> {
        if self.args.strict && !ok {
            Err(CliError::Numeric(what))
        } else {
            Ok(())
        }
    }

    fn chain_n(&self) -> Option<usize> {
        match self.cfg.topology {
            Topology::DiamondChain { n } => Some(n),
            Topology::Custom { .. } => chain_length(&self.spec),
            _ => None,
        }
    }
}

pub fn block_matrix(kind: BlockKind, p: &SystemParams) -> BlockHamiltonian {
    match kind {
        BlockKind::H1 => BlockHamiltonian::pair(p, CouplingScale::Sqrt2J),
        BlockKind::H2 => BlockHamiltonian::triple(p, CouplingScale::Sqrt2J),
        BlockKind::Mu0 => BlockHamiltonian::pair(p, CouplingScale::TwoJ),
        BlockKind::Hop => BlockHamiltonian::triple(p, CouplingScale::TwoJ),
    }
}

/// Window times for the blocks a protocol needs, in order. Auto times are
/// searched once per block and returned alongside.
struct ResolvedTimes {
    values: Vec<f64>,
    auto: Vec<(BlockKind, TransferTime)>,
}

fn resolve_times(ctx: &Context, kinds: &[BlockKind]) -> CliResult<ResolvedTimes> {
    match ctx.cfg.protocol.times {
        TimesConfig::Explicit { t1, t2 } => {
            let mut values = vec![t1];
            if kinds.len() > 1 {
                match t2 {
                    Some(t) => values.push(t),
                    None => return Err(CliError::config("explicit times need t2 for this protocol")),
                }
            }
            Ok(ResolvedTimes { values, auto: Vec::new() })
        }
        TimesConfig::Auto(_) => {
            let search = ctx.cfg.search(ctx.args.tmax, ctx.args.grid)?;
            let p = ctx.spec.params;
            let mut out = ResolvedTimes { values: Vec::new(), auto: Vec::new() };
            for &k in kinds {
                let b = block_matrix(k, &p);
                let t = find_transfer_time(&b, 1, b.dim() - 1, &search).map_err(CliError::config)?;
                out.values.push(t.t_star);
                out.auto.push((k, t));
            }
            Ok(out)
        }
    }
}

fn print_times(w: &mut dyn Write, times: &ResolvedTimes, kinds: &[BlockKind]) -> std::io::Result<()> {
    if times.auto.is_empty() {
        let parts: Vec<String> =
            kinds.iter().zip(&times.values).map(|(k, t)| format!("{}={t:.6}", k.name())).collect();
        writeln!(w, "times: {} (explicit)", parts.join(" "))
    } else {
        for (k, t) in &times.auto {
            writeln!(w, "time {}: t_star={:.6} fidelity={:.6}", k.name(), t.t_star, t.fidelity)?;
        }
        Ok(())
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source: e }
}

pub fn blocks(args: &CommonArgs, w: &mut dyn Write) -> CliResult<()> {
    let ctx = Context::load(args)?;
    let transform = match ctx.chain_n() {
        Some(n) => chain_collective_basis(n),
        None => lattice_collective_basis(&ctx.spec),
    }
    .map_err(CliError::config)?;
    let h = build_single_excitation_hamiltonian(&ctx.spec).map_err(CliError::config)?;
    let (blocks, residual) = block_decompose(&h, &transform).map_err(CliError::numeric)?;
    let sizes: Vec<String> = blocks.iter().map(|b| b.dim().to_string()).collect();
    writeln!(w, "blocks: {} residual: {residual:.3e}", sizes.join(",")).map_err(stdout_err)?;
    for b in &blocks {
        writeln!(w, "  {} [{}]", b.origin, b.basis_labels.join(" ")).map_err(stdout_err)?;
    }
    ctx.strict_check(
        residual <= BLOCK_RESIDUAL_MAX,
        format!("off-block residual {residual:.3e} exceeds {BLOCK_RESIDUAL_MAX:e}"),
    )
}

pub fn transfer_time(args: &TransferArgs, w: &mut dyn Write) -> CliResult<()> {
    let ctx = Context::load(&args.common)?;
    let kind = args.block.or(ctx.cfg.protocol.block).unwrap_or(match ctx.cfg.topology {
        Topology::Switch => BlockKind::Mu0,
        Topology::HexLattice { .. } => BlockKind::Hop,
        _ => BlockKind::H1,
    });
    let b = block_matrix(kind, &ctx.spec.params);
    let source = args.source.unwrap_or(1);
    let target = args.target.unwrap_or(b.dim() - 1);
    let search = ctx.cfg.search(args.common.tmax, args.common.grid)?;
    let t = find_transfer_time(&b, source, target, &search).map_err(CliError::config)?;
    writeln!(
        w,
        "block: {} ({}x{}) source {} target {}\nt_star: {:.6}\nfidelity: {:.6}\nphase: {:.6}\ngrid_points: {}",
        kind.name(),
        b.dim(),
        b.dim(),
        b.basis_labels[source],
        b.basis_labels[target],
        t.t_star,
        t.fidelity,
        t.phase(),
        t.grid_points
    )
    .map_err(stdout_err)?;
    ctx.strict_check(
        t.fidelity >= TRANSFER_FIDELITY_MIN,
        format!("peak fidelity {:.6} below {TRANSFER_FIDELITY_MIN}", t.fidelity),
    )
}

pub fn validate(args: &CommonArgs, w: &mut dyn Write) -> CliResult<()> {
    let ctx = Context::load(args)?;
    let p = ctx.spec.params;
    let hi = args.tmax.unwrap_or(ctx.cfg.search(None, None)?.window.1);
    let n = args.grid.unwrap_or(101);
    if n < 2 || hi.is_nan() || hi <= 0.0 {
        return Err(CliError::config("validation needs --grid >= 2 and --tmax > 0"));
    }
    let grid = uniform_grid(0.0, hi, n);
    let mut worst = 0.0f64;
    for (name, block) in [
        ("H1", AnalyticBlock::Pair(CouplingScale::Sqrt2J)),
        ("H2", AnalyticBlock::Triple(CouplingScale::Sqrt2J)),
        ("H_mu0", AnalyticBlock::Pair(CouplingScale::TwoJ)),
        ("H_hop", AnalyticBlock::Triple(CouplingScale::TwoJ)),
    ] {
        let err = validate_analytic(&p, block, &grid).map_err(CliError::numeric)?;
        worst = worst.max(err);
        writeln!(w, "{name}: max error {err:.3e} over {n} points in [0, {hi}]").map_err(stdout_err)?;
    }
    ctx.strict_check(
        worst <= ANALYTIC_ERROR_MAX,
        format!("analytic error {worst:.3e} exceeds {ANALYTIC_ERROR_MAX:e}"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Simulate,
    Switch,
    Route,
    Entangle,
}

fn build_schedule(ctx: &Context, kind: ProtocolKind, w: &mut dyn Write) -> CliResult<(Schedule, ResolvedTimes)> {
    let wrong = |need: &str| Err(CliError::config(format!("this command needs a {need} topology")));
    let chain = ctx.chain_n();
    let plan = match (&ctx.cfg.topology, kind) {
        (_, ProtocolKind::Simulate | ProtocolKind::Entangle) if chain.is_some() => 0,
        (Topology::Switch, ProtocolKind::Switch | ProtocolKind::Entangle) => 1,
        (Topology::HexLattice { .. }, ProtocolKind::Route | ProtocolKind::Entangle) => 2,
        (_, ProtocolKind::Simulate) => return wrong("diamond_chain"),
        (_, ProtocolKind::Switch) => return wrong("switch"),
        (_, ProtocolKind::Route) => return wrong("hex_lattice"),
        (_, ProtocolKind::Entangle) => return wrong("diamond_chain, switch or hex_lattice"),
    };
    let kinds: &[BlockKind] = match plan {
        0 if chain == Some(1) => &[BlockKind::H1],
        0 => &[BlockKind::H1, BlockKind::H2],
        1 => &[BlockKind::Mu0],
        _ => &[BlockKind::Mu0, BlockKind::Hop],
    };
    let times = resolve_times(ctx, kinds)?;
    print_times(w, &times, kinds).map_err(stdout_err)?;
    let sched = match (plan, &ctx.cfg.topology) {
        // a single diamond has no middle window
        (0, _) => chain_routing_schedule(
            chain.unwrap_or(1),
            times.values[0],
            *times.values.last().expect("at least one block time"),
        ),
        (1, _) => {
            let port = ctx.cfg.protocol.port.ok_or_else(|| CliError::config("protocol.port is required"))?;
            switch_schedule(port, times.values[0])
        }
        (_, Topology::HexLattice { lattice }) => {
            let path = ctx.cfg.protocol.path.as_ref().ok_or_else(|| CliError::config("protocol.path is required"))?;
            hex_routing_schedule(lattice, path, times.values[0], times.values[1])
        }
        _ => unreachable!("plan matches topology"),
    }
    .map_err(CliError::config)?;
    Ok((sched, times))
}

pub fn protocol(args: &CommonArgs, kind: ProtocolKind, w: &mut dyn Write) -> CliResult<()> {
    let ctx = Context::load(args)?;
    let (sched, times) = build_schedule(&ctx, kind, w)?;
    let samples = args.samples.or(ctx.cfg.output.samples_per_window).unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        return Err(CliError::config("samples per window must be at least 2"));
    }
    let psi = ExcitationState::excited(ctx.spec.dim(), sched.source.site, sched.source.kind)
        .map_err(CliError::config)?;
    let trace = run_schedule(&ctx.spec, &sched, &psi, samples).map_err(CliError::config)?;

    let mut extra: Vec<(String, f64)> =
        times.auto.iter().map(|(k, t)| (k.name().to_string(), t.t_star)).collect();
    let mut headline = trace.final_fidelity;
    if kind == ProtocolKind::Entangle {
        let rep = entanglement_transfer(&ctx.spec, &sched).map_err(CliError::numeric)?;
        headline = if ctx.cfg.protocol.compensate { rep.bell_fidelity } else { rep.uncompensated_fidelity };
        writeln!(
            w,
            "amplitude: |u|={:.6} arg={:.6}\ncompensation_phase: {:.6}\nbell_fidelity: {:.6} ({})\nuncompensated_fidelity: {:.6}",
            rep.amplitude.norm(),
            rep.amplitude.arg(),
            if ctx.cfg.protocol.compensate { rep.compensation_phase } else { 0.0 },
            headline,
            if ctx.cfg.protocol.compensate { "compensated" } else { "uncompensated" },
            rep.uncompensated_fidelity
        )
        .map_err(stdout_err)?;
        extra.push(("bell_fidelity".to_string(), headline));
    }

    writeln!(
        w,
        "total_time: {:.6}\nfidelity: {:.6}\nphase: {:.6}\nmax_photon: {:.6}\nmean_photon: {:.6}",
        trace.total_time,
        trace.final_fidelity,
        trace.final_amplitude.arg(),
        trace.max_photon(),
        trace.mean_photon()
    )
    .map_err(stdout_err)?;

    let out = args.out.clone().or(ctx.cfg.output.path.clone());
    if let Some(path) = out {
        let footer = Footer {
            t_star: trace.total_time,
            fidelity: trace.final_fidelity,
            phase: trace.final_amplitude.arg(),
            extra,
        };
        emit_trace_csv(&trace, &footer, &path)?;
        writeln!(w, "trace: {} ({} rows)", path.display(), trace.len()).map_err(stdout_err)?;
    }
    ctx.strict_check(
        headline >= ROUTING_FIDELITY_MIN,
        format!("fidelity {headline:.6} below {ROUTING_FIDELITY_MIN}"),
    )
}
