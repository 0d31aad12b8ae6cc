"""Quantum-cutting simulator for entangled excitonic angular momentum (EAM)."""
from .errors import (
    BasisMismatch,
    ConfigError,
    ContractViolation,
    EamDomainError,
    EamsimError,
    UnsupportedConfiguration,
)
from .model import (
    ChainSpec,
    MoleculeSpec,
    TriadSpec,
    eam_window,
    mode_energy,
    resonant_donor_delta,
    resonant_triad,
    wrap_eam,
)
from .hamiltonian import (
    AcceptorPairArms,
    AcceptorPairEam,
    Arm,
    BellPair,
    ChainDonor,
    ChainPair,
    DonorArm,
    DonorEam,
    HermitianOperator,
    LabeledBasis,
    build_arm_sector,
    build_chain,
    build_eam_pair,
    build_molecule,
    build_two_level,
    eam_embedding,
)
from .dynamics import (
    Spectrum,
    StateVector,
    Trajectory,
    eigendecompose,
    evolve,
    rabi_frequency,
    two_level_amplitudes,
)
from .observables import (
    DensityOperator,
    SelectionTable,
    partial_trace,
    population_by_label,
    qc_matrix_element,
    reduced_density_acceptor1,
    selection_table,
    von_neumann_entropy,
)

__version__ = "0.1.0"
