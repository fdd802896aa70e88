"""Physical mechanisms that realize the detection-state contraction.

Two routes shrink the reference-state amplitudes of a two-photon family to
a common magnitude:

* conditional two-photon absorption: no-jump evolution under
  exp(-(gamma/2) a_i^dag a_j^dag a_i a_j t), diagonal in photon number, at
  the cost of an unrecoverable jump branch;
* sum-frequency generation: coherent pair conversion
  H = i (kappa/2) (a_i^dag a_j^dag b - a_i a_j b^dag) into ancilla modes,
  which keeps the rejected amplitude alive in a one-photon up-converted
  state.

Also here: a four-level atom whose two-photon transitions realize the
square-root measurement of the N = 3 family, with its excitation
probability averaged over an exponential waiting-time distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .families import SymmetricFamily, family_phases, two_photon_labels
from .fock import (
    FockBasis,
    Operator,
    StateVector,
    ancilla_lowering_matrix,
    ancilla_transition_matrix,
    annihilation_matrix,
    build_basis,
    matrix_exponential,
)

# atom level ordering: three ground states then the excited state
ATOM_LEVELS = 4
ATOM_EXCITED = 3


class ScheduleError(ValueError):
    """No nonnegative interaction times produce the requested contraction."""


@dataclass(frozen=True)
class ChannelSchedule:
    """Dimensionless interaction products (rate x time) for both mode pairs.

    products[0] drives the (1,1) pair, products[1] the (1,2) pair.  For the
    up-conversion mechanism the products are rotation angles and must stay
    on the principal branch.
    """

    mechanism: str
    products: tuple[float, float]

    def __post_init__(self):
        if self.mechanism not in ("tpa", "sfg"):
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        ps = tuple(float(p) for p in self.products)
        if len(ps) != 2:
            raise ValueError("expected exactly two interaction products")
        if any(not np.isfinite(p) or p < 0.0 for p in ps):
            raise ValueError(f"interaction products must be finite and >= 0, got {ps}")
        if self.mechanism == "sfg":
            if ps[0] > np.sqrt(2.0) * np.pi / 2.0 + 1e-12 or ps[1] > np.pi + 1e-12:
                raise ValueError(f"up-conversion products {ps} leave the principal branch")
        object.__setattr__(self, "products", ps)


def _pair_matrices(basis: FockBasis, mode_pair) -> tuple[np.ndarray, np.ndarray]:
    i, j = (int(m) for m in mode_pair)
    if not (1 <= i <= basis.mode_count and 1 <= j <= basis.mode_count):
        raise ValueError(f"mode pair {mode_pair} out of range (modes are 1-based)")
    return annihilation_matrix(basis, i - 1).matrix, annihilation_matrix(basis, j - 1).matrix


def tpa_conditional_operator(basis: FockBasis, mode_pair, product: float) -> Operator:
    """No-jump Kraus operator exp(-(product/2) a_i^dag a_j^dag a_i a_j).

    product = gamma_ij * t >= 0.  The generator is diagonal in photon
    number (n_i (n_i - 1) for i == j, n_i n_j otherwise), so this is exact
    for any truncation.  The decrease of the squared norm under this
    operator is the probability that an absorption jump occurred.
    """
    if product < 0.0:
        raise ValueError(f"interaction product must be >= 0, got {product}")
    Ai, Aj = _pair_matrices(basis, mode_pair)
    G = Ai.conj().T @ Aj.conj().T @ Ai @ Aj
    return matrix_exponential(Operator.hermitian(basis, G), -0.5 * product)


def tpa_schedule(family: SymmetricFamily) -> ChannelSchedule:
    """Absorption products that level all amplitudes down to |c_2|.

    gamma_11 T_0 = ln(|c_0| / |c_2|) empties the doubly occupied mode 1
    component (its generator eigenvalue is 2), gamma_12 T_1 =
    2 ln(|c_1| / |c_2|) the coincident component.
    """
    if family.M != 2:
        raise ValueError("absorption scheduling is defined for M = 2 families")
    m0, m1, m2 = family.moduli
    for name, m in (("c_0", m0), ("c_1", m1)):
        if m2 > m:
            raise ScheduleError(
                f"|c_2| = {m2:.6f} exceeds |{name}| = {m:.6f}; "
                "absorption can only shrink amplitudes toward the smallest one"
            )
    return ChannelSchedule("tpa", (float(np.log(m0 / m2)), float(2.0 * np.log(m1 / m2))))


def sfg_unitary(basis: FockBasis, mode_pair, product: float, ancilla: int = 0) -> Operator:
    """Pair-conversion unitary exp((product/2)(a_i^dag a_j^dag b - a_i a_j b^dag)).

    product = kappa_ij * t is the accumulated angle; b lowers the ancilla
    factor `ancilla`.  A two-level ancilla suffices for two-photon inputs,
    where the dynamics closes on one pair of levels.
    """
    if product < 0.0:
        raise ValueError(f"interaction product must be >= 0, got {product}")
    if not basis.ancilla_dims:
        raise ValueError("up-conversion needs at least one ancilla factor in the basis")
    Ai, Aj = _pair_matrices(basis, mode_pair)
    b = ancilla_lowering_matrix(basis, ancilla).matrix
    G = Ai.conj().T @ Aj.conj().T @ b - Ai @ Aj @ b.conj().T
    return matrix_exponential(Operator.general(basis, G), 0.5 * product)


def sfg_schedule(family: SymmetricFamily) -> ChannelSchedule:
    """Conversion angles that rotate all amplitudes down to |c_2|.

    The (1,1) pair rotates |2,0>|0>_A toward |0,0>|1>_A at angle
    product / sqrt(2), the (1,2) pair |1,1>|0>_B toward |0,0>|1>_B at
    product / 2, so

        kappa_11 T_0 = sqrt(2) arccos(|c_2| / |c_0|)
        kappa_12 T_1 = 2 arccos(|c_2| / |c_1|).
    """
    if family.M != 2:
        raise ValueError("up-conversion scheduling is defined for M = 2 families")
    m0, m1, m2 = family.moduli
    for name, m in (("c_0", m0), ("c_1", m1)):
        if m2 > m:
            raise ScheduleError(
                f"|c_2| = {m2:.6f} exceeds |{name}| = {m:.6f}; "
                "conversion can only rotate amplitude out, not in"
            )
    return ChannelSchedule(
        "sfg",
        (
            float(np.sqrt(2.0) * np.arccos(min(m2 / m0, 1.0))),
            float(2.0 * np.arccos(min(m2 / m1, 1.0))),
        ),
    )


@dataclass(frozen=True)
class AtomFieldModel:
    """Four-level atom coupled to two-photon transitions of a two-mode field.

    H = eta (a_1^2 |e><g_0| + sqrt(2) a_1 a_2 |e><g_1| + a_2^2 |e><g_2|) + h.c.

    alpha are the ground-state amplitudes (alpha_0, alpha_1, alpha_2) the
    atom is prepared in; Gamma is the rate of the exponential waiting-time
    distribution used when averaging the excitation probability.
    """

    eta: float
    Gamma: float
    alpha: tuple[complex, complex, complex]

    def __post_init__(self):
        if not np.isfinite(self.eta):
            raise ValueError("eta must be finite")
        if not (np.isfinite(self.Gamma) and self.Gamma > 0.0):
            raise ValueError(f"Gamma must be > 0, got {self.Gamma}")
        al = tuple(complex(a) for a in self.alpha)
        if len(al) != 3:
            raise ValueError("alpha must hold exactly three amplitudes")
        nrm = np.linalg.norm(al)
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"alpha must be unit norm, got |alpha| = {nrm:.12f}")
        object.__setattr__(self, "alpha", al)


class ExcitationResult(NamedTuple):
    """Waiting-time averaged excitation probability, three ways.

    numeric comes from quadrature of the simulated dynamics.  The two
    closed forms differ in the effective Rabi frequency of the bright
    two-photon transition: with the Hamiltonian above it is sqrt(6) eta
    (each two-photon matrix element carries a bosonic sqrt(2)), giving

        overlap * 4 eta^2 / (Gamma^2 + 24 eta^2),

    while normalizing every matrix element to eta gives sqrt(3) eta and

        overlap * 2 eta^2 / (Gamma^2 + 12 eta^2).

    Both reduce to overlap / 6 as Gamma -> 0.  detection_overlap is
    |sum_l alpha_l beta_l|^2 with beta the field amplitudes.
    """

    numeric: float
    analytic_rabi_sqrt6: float
    analytic_rabi_sqrt3: float
    detection_overlap: float


def atom_field_hamiltonian(model: AtomFieldModel, joint: FockBasis) -> Operator:
    """The two-photon Raman-like coupling on a (2-mode field) x (atom) basis."""
    if joint.ancilla_dims != (ATOM_LEVELS,):
        raise ValueError("joint basis must carry a single 4-level atom factor")
    A1 = annihilation_matrix(joint, 0).matrix
    A2 = annihilation_matrix(joint, 1).matrix
    raised = [
        ancilla_transition_matrix(joint, 0, ATOM_EXCITED, g).matrix for g in range(3)
    ]
    coupling = model.eta * (
        A1 @ A1 @ raised[0] + np.sqrt(2.0) * A1 @ A2 @ raised[1] + A2 @ A2 @ raised[2]
    )
    return Operator.hermitian(joint, coupling + coupling.conj().T)


def _excitation_quadrature(w, V, psi0, e_mask, Gamma, t_max, n_windows) -> float:
    """Composite 20-node Gauss-Legendre quadrature of Gamma e^{-Gamma t} P_e(t)."""
    nodes, weights = np.polynomial.legendre.leggauss(20)
    edges = np.linspace(0.0, t_max, n_windows + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[:-1] + edges[1:])
    ts = (mids[:, None] + half * nodes[None, :]).ravel()
    ws = np.tile(half * weights, n_windows)
    coefs = V.conj().T @ psi0
    total = 0.0
    # chunked so the (times x dimension) phase table stays small
    for sl in np.array_split(np.arange(ts.size), max(1, ts.size // 50000 + 1)):
        phases = np.exp(-1j * np.outer(ts[sl], w))
        psi_t = (phases * coefs) @ V.T
        pe = np.sum(np.abs(psi_t[:, e_mask]) ** 2, axis=1)
        total += float(np.sum(ws[sl] * Gamma * np.exp(-Gamma * ts[sl]) * pe))
    return total


def atom_excitation_avg(model: AtomFieldModel, field_state: StateVector) -> ExcitationResult:
    """Average excitation probability under exponential waiting times.

    The field state must be a two-photon state of two modes.  The integral
    int_0^inf Gamma e^{-Gamma t} P_e(t) dt is truncated at t_max = 50 /
    Gamma (truncation error <= e^{-50}) and evaluated with a composite
    Gauss-Legendre rule whose window count is doubled until two successive
    values agree to 1e-9 relative.
    """
    fb = field_state.basis
    if fb.mode_count != 2 or fb.ancilla_dims:
        raise ValueError("field state must live on a plain two-mode basis")
    labels = two_photon_labels(fb)
    beta = field_state.amplitudes[list(labels)]
    outside = np.linalg.norm(field_state.amplitudes) ** 2 - np.linalg.norm(beta) ** 2
    if outside > 1e-9:
        raise ValueError(
            f"field state carries probability {outside:.3e} outside the two-photon sector"
        )

    joint = build_basis(2, 2, (ATOM_LEVELS,))
    H = atom_field_hamiltonian(model, joint)
    psi0 = np.zeros(joint.dimension, dtype=complex)
    for l, b in enumerate(beta):
        for g, a in enumerate(model.alpha):
            occ = [(2, 0), (1, 1), (0, 2)][l]
            psi0[joint.index_of(occ, (g,))] = a * b
    e_mask = np.array(
        [idx % ATOM_LEVELS == ATOM_EXCITED for idx in range(joint.dimension)]
    )

    w, V = np.linalg.eigh(H.matrix)
    t_max = 50.0 / model.Gamma
    rate = max(float(np.max(np.abs(w))), model.Gamma, 1e-9)
    n_windows = max(8, int(np.ceil(t_max * rate / 2.0)))
    value = _excitation_quadrature(w, V, psi0, e_mask, model.Gamma, t_max, n_windows)
    for _ in range(6):
        n_windows *= 2
        refined = _excitation_quadrature(w, V, psi0, e_mask, model.Gamma, t_max, n_windows)
        if abs(refined - value) <= 1e-11 + 1e-9 * abs(refined):
            value = refined
            break
        value = refined
    else:
        raise RuntimeError("waiting-time quadrature did not converge")

    overlap = float(np.abs(np.sum(np.asarray(model.alpha) * beta)) ** 2)
    eta2 = model.eta**2
    g2 = model.Gamma**2
    return ExcitationResult(
        numeric=value,
        analytic_rabi_sqrt6=overlap * 4.0 * eta2 / (g2 + 24.0 * eta2),
        analytic_rabi_sqrt3=overlap * 2.0 * eta2 / (g2 + 12.0 * eta2),
        detection_overlap=overlap,
    )


def detector_atom_coefficients(family: SymmetricFamily, k: int) -> tuple[complex, complex, complex]:
    """Unit-norm atom preparation whose excitation selects detection state k.

    alpha_l = 3^{-1/2} (c_l / |c_l|)^* e^{-i 2 pi l k / N}, the conjugated
    phase pattern of detection state mu_k.  For a field with reference
    amplitudes beta this gives

        |sum_l alpha_l beta_l|^2 = (N / 3) |<mu_k|field>|^2,

    so for N = 3 the excitation probability measures |<mu_k|field>|^2
    exactly and the three preparations k = 1..3 realize the full
    square-root measurement.
    """
    if family.M != 2:
        raise ValueError("the detector atom has three ground states; need M = 2")
    if not 1 <= k <= family.N:
        raise ValueError(f"k must be in 1..{family.N}, got {k}")
    phase_coeffs = np.asarray(family.coeffs) / family.moduli
    alpha = (phase_coeffs * family_phases(family, k)).conj() / np.sqrt(3.0)
    return (complex(alpha[0]), complex(alpha[1]), complex(alpha[2]))


def detector_atom_model(family: SymmetricFamily, k: int, eta: float, Gamma: float) -> AtomFieldModel:
    return AtomFieldModel(eta=eta, Gamma=Gamma, alpha=detector_atom_coefficients(family, k))
