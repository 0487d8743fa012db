"""Spin-chain state transfer, GHZ generation and process tomography."""

__version__ = "0.1.0"

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    ResourceError,
    RunStore,
    emit_report,
    run_experiment,
)
from .hamiltonian import (
    MAX_DENSE_QUBITS,
    ChainSpec,
    CouplingPattern,
    EquivalentChainSpec,
    build_xx_z,
    build_xy_equivalent,
    build_xy_uniform,
    build_zz_x,
    equivalent_chain,
    perfect_transfer_pattern,
)
from .infoflux import (
    FluxTable,
    flux_coefficient,
    flux_scan,
    heisenberg_evolve,
    three_site_xx_reference,
)
from .noise import (
    CollectivePairs,
    DisorderRealization,
    EvolutionPlan,
    Individual,
    KrausSet,
    NoiseConfig,
    TrajectoryResult,
    adjacent_pairs,
    amplitude_damping_kraus,
    apply_channel,
    collective_dephasing_kraus,
    evolve_open_deterministic,
    evolve_open_trajectories,
    evolve_open_trajectory,
    phase_damping_kraus,
    sample_disorder,
    trajectory_seeds,
)
from .qpt import (
    CHI_IDENTITY,
    QPT_BASIS,
    ChannelSample,
    ProcessMatrix,
    average_state_fidelity,
    bloch_affine,
    bloch_image,
    bloch_image_csv,
    bloch_vector,
    chi_apply,
    haar_average_state_fidelity,
    kraus_from_chi,
    probe_states,
    process_fidelity,
    reconstruct_chi,
    sample_channel,
)
from .qstate import (
    KET0,
    KET1,
    KET_MINUS,
    KET_PLUS,
    KET_PLUS_Y,
    PAULI,
    DensityMatrix,
    HermitianOperator,
    PauliString,
    StateVector,
    apply_local,
    basis_state,
    conjugate_local,
    evolve_density,
    evolve_unitary,
    partial_trace,
    pauli_decompose,
    pauli_matrix,
    plus_state,
    product_state,
    reduced_from_statevector,
    state_fidelity,
    tensor_embed,
)
from .transfer import (
    ENGINES,
    HADAMARD,
    TransferCurve,
    average_curves,
    default_times,
    ghz_fidelity_observers,
    ghz_target,
    ideal_ghz_curve,
    ideal_transfer_curve,
    ideal_transfer_curve_crosscheck,
    noisy_ghz_curve,
    noisy_transfer_curve,
    prepared_transfer_state,
    pretransfer_gate,
    run_seed_children,
    single_noisy_run,
    site_n_fidelity_observers,
)
