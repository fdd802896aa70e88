"""Optimal discrimination of symmetric nonorthogonal photon states.

Construction of square-root detection states for cyclic state families,
their analytic success probabilities, and simulations of the physical
measurements that realize them: conditional two-photon absorption,
sum-frequency up-conversion with retry on the inconclusive branch, linear
multiports on single-photon families, and a two-photon-transition atom
detector.
"""

from .channels import (
    AtomFieldModel,
    ChannelSchedule,
    ExcitationResult,
    ScheduleError,
    atom_excitation_avg,
    detector_atom_coefficients,
    detector_atom_model,
    sfg_schedule,
    sfg_unitary,
    tpa_conditional_operator,
    tpa_schedule,
)
from .families import (
    FamilyError,
    SymmetricFamily,
    coincident_family,
    cyclic_shift_operator,
    family_states,
    make_family,
    normalized_family,
    two_photon_basis,
)
from .fock import (
    FockBasis,
    Operator,
    StateVector,
    annihilation_matrix,
    basis_state,
    build_basis,
    creation_matrix,
    inv_sqrt_psd,
    matrix_exponential,
)
from .minerror import (
    DetectionSet,
    SupportError,
    gram_sum_operator,
    outcome_distribution,
    srm_states_closed,
    srm_states_numeric,
    success_probability_analytic,
)
from .montecarlo import TrialReport, run_min_error, run_sfg_recovery_pipeline, run_unambiguous
from .multiport import (
    MultiportUnitary,
    build_multiport,
    min_error_single_photon,
    output_distribution,
    single_photon_input,
)
from .unambiguous import (
    UnambiguousOutcome,
    branch_outcomes,
    equivalence_check,
    equivalence_residual,
    inconclusive_family,
    orthogonalize_sfg,
    orthogonalize_tpa,
    projective_discriminate,
    success_probability_ud,
)

__version__ = "0.1.0"
