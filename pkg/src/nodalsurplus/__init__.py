"""Nodal surplus of signed and magnetic matrices on graphs with disjoint cycles."""
from .errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    GraphMismatchError,
    Indeterminate,
    InputError,
    NonSimpleEigenvalue,
    NumericalError,
    RetriesExhausted,
    SelfLoopError,
    SolverBreakdown,
    VanishingEigenvector,
    VertexRangeError,
)
from .graph import (
    CycleStructure,
    Graph,
    analyze_cycles,
    biconnected_blocks,
    bridges,
    build_graph,
    has_disjoint_cycles,
)
from .instances import (
    GeneratorConfig,
    SplitMix64,
    canonical_instance,
    flat_band_instance,
    random_gsc_instance,
)
from .lattice import LatticeReport, binomial_verdict, lattice_map, morse_report
from .local_global import (
    LocalGlobalCertificate,
    build_certificate,
    haynsworth_check,
    schur_check,
    weyl_localglobal_check,
)
from .magnetic import (
    EdgeScan,
    ProbabilityCurrent,
    bz_definiteness,
    edge_scan,
    eigenvalue_gradient,
    fd_derivatives,
    j_minus,
    lambda_k,
    partial_criticality_check,
    probability_current,
)
from .matrix_space import (
    SupportedMatrix,
    flux,
    gauge_transform,
    reduce_to_flux_point,
    signing,
    signing_orbits,
    torus_action,
)
from .nodal import (
    GSCReport,
    SurplusDistribution,
    check_distinct_signings,
    check_gsc,
    nodal_count,
    nodal_surplus,
    surplus_distribution,
)
from .spectra import EigenSystem, eig_herm, eig_sym, spectral_margins

__version__ = "0.1.0"
