//! Single-excitation dynamics of coupled atom-cavity networks.
//!
//! Every cavity in the network holds one two-level atom. With a single
//! quantum in the system the state lives in a `2M`-dimensional space (one
//! cavity mode and one atom per site) plus a stationary vacuum component.
//! Cavity-cavity hopping has a common magnitude `J` and an engineered sign,
//! which splits the Hamiltonian into small invariant blocks. Routing is done
//! by letting each block transfer the excitation and then switching blocks
//! with local atomic phase flips.
//!
//! Module map:
//! - [`network`]: parameters, topologies and Hamiltonian assembly
//! - [`subspaces`]: collective bases and block extraction
//! - [`propagator`]: exact evolution and transfer-time search
//! - [`analytic`]: closed-form block amplitudes
//! - [`protocol`]: routing schedules and their execution

pub mod analytic;
pub mod error;
pub mod network;
pub mod propagator;
pub mod protocol;
pub mod subspaces;

pub use error::{Error, Result};
pub use network::{
    build_diamond_chain, build_hex_lattice, build_single_excitation_hamiltonian, build_switch,
    HamiltonianMatrix, HexLatticeDescriptor, HexLayout, Link, NetworkSpec, Role, Site,
    SystemParams,
};
pub use propagator::{
    eigendecompose, find_transfer_time, photon_population, propagate, site_population,
    ExcitationState, ModeKind, Spectrum, TransferSearch, TransferTime,
};
pub use protocol::{
    chain_routing_schedule, entanglement_transfer, hex_routing_schedule, local_phase_flip,
    run_schedule, schedule_checkpoints, schedule_checkpoints_blockwise, switch_port_flip,
    switch_schedule, bell_fidelity, EntanglementReport, Probe, Schedule, Step, TraceResult,
};
pub use subspaces::{
    block_decompose, chain_collective_basis, extract_block, lattice_collective_basis,
    switch_collective_basis, BasisGroup, BlockHamiltonian, OrthogonalTransform, Subspace,
};
