"""Exponential families of Gibbs states of k-body Hamiltonians.

A k-body Hamiltonian is a real combination of Pauli strings of weight
at most k (traceless normal form: no identity component).  Its Gibbs
state exp(H)/tr[exp(H)] is parameterized either by the coefficients
theta (exponential coordinates) or by the expectation values eta of the
same strings (mixture coordinates); the log-partition function links
the two as a Legendre pair.

The central operation is moment matching: given any state rho, find the
Gibbs state of a k-body Hamiltonian whose weight <= k expectations all
agree with rho's.  That state maximizes entropy among all states with
rho's k-party marginals, so it is the family's best proxy for rho, and
divergences from it obey an exact Pythagorean decomposition.  Matching
runs as damped Newton descent on the convex dual, with gradients and
Hessians computed exactly from the eigendecomposition (divided
differences of the exponential, no finite-difference steps).

The ascent and reduced-objective routines bound how well a family can
overlap a fixed pure target; they back the closed-form witness
thresholds (dim-1)/dim used by the certification layer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .errors import ConvergenceError, ResourceLimitError
from .pauli import PauliBasis, PauliExpansion, PauliString, weight_at_most_strings
from .states import DensityMatrix, PureState, relative_entropy

MAXIMALLY_MIXED_MARGINALS = "k-RDM-maximally-mixed"
MOMENT_MATCH_QUBIT_CAP = 8


class KLocalHamiltonian:
    """A traceless Hamiltonian built from Pauli strings of weight <= locality."""

    def __init__(self, expansion: PauliExpansion, locality: int):
        if expansion.max_weight() > locality:
            raise ValueError(
                f"expansion has weight-{expansion.max_weight()} terms, locality {locality}"
            )
        ident = PauliString.identity(expansion.n_qubits)
        if abs(expansion.coeff(ident)) > 1e-12:
            raise ValueError("Hamiltonian must be traceless (no identity term)")
        self.expansion = expansion
        self.locality = locality

    @property
    def n_qubits(self) -> int:
        return self.expansion.n_qubits

    @classmethod
    def from_coefficients(cls, strings, coeffs, locality: int) -> "KLocalHamiltonian":
        strings = list(strings)
        n = strings[0].n_qubits
        exp = PauliExpansion(n, dict(zip(strings, coeffs)))
        return cls(exp, locality)

    def to_matrix(self) -> np.ndarray:
        return self.expansion.to_matrix()

    def to_json(self) -> str:
        terms = [
            {"pauli": str(p), "coeff": float(c)}
            for p, c in sorted(self.expansion.items(), key=lambda t: str(t[0]))
        ]
        return json.dumps(terms)

    @classmethod
    def from_json(cls, text: str, locality: int) -> "KLocalHamiltonian":
        terms = json.loads(text)
        if not terms:
            raise ValueError("empty Hamiltonian serialization")
        n = len(terms[0]["pauli"].lstrip("+-"))
        exp = PauliExpansion(n)
        for term in terms:
            exp.add_term(PauliString.from_text(term["pauli"]), float(term["coeff"]))
        return cls(exp, locality)


def local_basis(n_qubits: int, locality: int) -> PauliBasis:
    """All traceless strings of weight <= locality, fixed order."""
    return PauliBasis(n_qubits, weight_at_most_strings(n_qubits, locality))


def _gibbs_from_eigs(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    weights = np.exp(w - w.max())
    weights /= weights.sum()
    return (v * weights) @ v.conj().T


def thermal_state(hamiltonian: KLocalHamiltonian) -> DensityMatrix:
    """exp(H)/tr[exp(H)]; strictly positive definite by construction."""
    w, v = np.linalg.eigh(hamiltonian.to_matrix())
    return DensityMatrix(_gibbs_from_eigs(w, v))


def log_partition(hamiltonian: KLocalHamiltonian) -> float:
    """ln tr[exp(H)], computed stably from the spectrum."""
    return float(logsumexp(np.linalg.eigvalsh(hamiltonian.to_matrix())))


@dataclass(frozen=True)
class ExponentialCoordinates:
    """The dual coordinate pair of one Gibbs state.

    theta are the Hamiltonian's coefficients over ``strings``, eta the
    Gibbs state's expectations of the same strings, and the two
    potentials satisfy log_partition + dual_potential = theta . eta
    (dual_potential is the negative entropy, computed independently so
    the identity is a genuine check).
    """

    strings: tuple[PauliString, ...]
    theta: np.ndarray
    eta: np.ndarray
    log_partition: float
    dual_potential: float

    @classmethod
    def from_hamiltonian(cls, hamiltonian: KLocalHamiltonian) -> "ExponentialCoordinates":
        basis = local_basis(hamiltonian.n_qubits, hamiltonian.locality)
        theta = np.array([hamiltonian.expansion.coeff(p) for p in basis.strings])
        w, v = np.linalg.eigh(hamiltonian.to_matrix())
        tau = _gibbs_from_eigs(w, v)
        eta = basis.coefficients(tau) * basis.dim
        psi = float(logsumexp(w))
        probs = np.exp(w - w.max())
        probs /= probs.sum()
        phi = float((probs * np.log(probs)).sum())
        return cls(tuple(basis.strings), theta, eta, psi, phi)

    def legendre_residual(self) -> float:
        return abs(self.log_partition + self.dual_potential - float(self.theta @ self.eta))


def _string_conjugations(basis: PauliBasis, v: np.ndarray) -> np.ndarray:
    """Stack of v^dagger P_i v for every basis string (exact, via sparse rows)."""
    m, dim = len(basis), basis.dim
    out = np.empty((m, dim, dim), dtype=complex)
    vh = v.conj().T
    for i in range(m):
        acted = basis._vals[i][:, None] * v[basis._cols[i], :]
        out[i] = vh @ acted
    return out


def _exp_divided_differences(lam: np.ndarray) -> np.ndarray:
    """Matrix of (e^a - e^b)/(a - b) over eigenvalue pairs, e^a on the diagonal."""
    e = np.exp(lam)
    num = e[:, None] - e[None, :]
    den = lam[:, None] - lam[None, :]
    near = np.abs(den) < 1e-9
    mid = np.exp(0.5 * (lam[:, None] + lam[None, :]))
    return np.where(near, mid, num / np.where(near, 1.0, den))


@dataclass
class MaxEntProjection:
    """Result of moment matching: the Gibbs state, its Hamiltonian, and
    how tightly the target expectations were reproduced."""

    state: DensityMatrix
    hamiltonian: KLocalHamiltonian
    residual: float
    iterations: int


def max_entropy_projection(
    rho,
    locality: int,
    tolerance: float = 1e-7,
    max_iterations: int = 500,
) -> MaxEntProjection:
    """The Gibbs state of a k-body Hamiltonian matching rho's k-body moments.

    Among all states with rho's k-party marginals this is the entropy
    maximizer.  Raises ConvergenceError (with the reached residual) if
    the expectations cannot be matched to ``tolerance`` in the iteration
    budget; targets on the moment boundary push coefficients to infinity
    and converge slowly.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = int(mat.shape[0]).bit_length() - 1
    if n > MOMENT_MATCH_QUBIT_CAP:
        raise ResourceLimitError(
            f"moment matching capped at {MOMENT_MATCH_QUBIT_CAP} qubits, got {n}"
        )
    basis = local_basis(n, locality)
    dim = basis.dim
    eta_target = basis.coefficients(mat) * dim
    m = len(basis)
    theta = np.zeros(m)

    def dual_value(th):
        w = np.linalg.eigvalsh(basis.build(th))
        return float(logsumexp(w)) - float(th @ eta_target)

    f_cur = dual_value(theta)
    residual = math.inf
    for it in range(1, max_iterations + 1):
        h = basis.build(theta)
        w, v = np.linalg.eigh(h)
        lam = w - w.max()
        weights = np.exp(lam)
        z = weights.sum()
        conj = _string_conjugations(basis, v)
        eta = np.einsum("iaa->ia", conj).real @ (weights / z)
        grad = eta - eta_target
        residual = float(np.abs(grad).max())
        if residual < tolerance:
            tau = _gibbs_from_eigs(w, v)
            ham = KLocalHamiltonian.from_coefficients(basis.strings, theta, locality)
            return MaxEntProjection(DensityMatrix(tau), ham, residual, it)
        phi = _exp_divided_differences(lam) / z
        weighted = conj * np.sqrt(phi)[None, :, :]
        flat = weighted.reshape(m, -1)
        hess = (flat @ flat.conj().T).real - np.outer(eta, eta)
        ridge = 1e-10 * max(np.trace(hess) / m, 1e-4)
        try:
            direction = np.linalg.solve(hess + ridge * np.eye(m), -grad)
        except np.linalg.LinAlgError:
            direction = -grad
        # damped step: halve until the dual objective decreases
        step = 1.0
        moved = False
        for _ in range(40):
            cand = theta + step * direction
            f_cand = dual_value(cand)
            if f_cand < f_cur - 1e-15:
                theta, f_cur, moved = cand, f_cand, True
                break
            step *= 0.5
        if not moved and not np.array_equal(direction, -grad):
            step = 1.0
            for _ in range(40):
                cand = theta - step * grad
                f_cand = dual_value(cand)
                if f_cand < f_cur - 1e-15:
                    theta, f_cur, moved = cand, f_cand, True
                    break
                step *= 0.5
        if not moved:
            break
    raise ConvergenceError(
        f"moment matching stalled at residual {residual:.3e}", residual=residual
    )


def pythagorean_residual(rho, tau, locality: int) -> float:
    """| S(rho||tau) - S(rho||proj) - S(proj||tau) | for the moment projection.

    tau must belong to the family (a Gibbs state of a k-body
    Hamiltonian); the decomposition is exact there.  Infinite
    divergences propagate as math.inf.
    """
    proj = max_entropy_projection(rho, locality).state
    full = relative_entropy(rho, tau)
    to_proj = relative_entropy(rho, proj)
    from_proj = relative_entropy(proj, tau)
    if math.isinf(full) or math.isinf(to_proj) or math.isinf(from_proj):
        return math.inf
    return abs(full - to_proj - from_proj)


def overlap_bound(state_class: str, dim: int) -> float:
    """Best possible Gibbs-state fidelity with a pure state of the class.

    For pure states whose in-scope marginals are all maximally mixed the
    bound is (dim - 1)/dim, independent of temperature and locality.
    """
    if state_class != MAXIMALLY_MIXED_MARGINALS:
        raise ValueError(f"unknown state class {state_class!r}")
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    return (dim - 1) / dim


def reduced_overlap_objective(
    p_plus: float,
    p_minus: float,
    eta_plus: float,
    eta_minus: float,
    dim: int,
    constraint_tol: float = 1e-9,
) -> float:
    """The two-level reduction of the Gibbs-overlap maximization.

    Probability mass p_plus / p_minus sits on two Hamiltonian levels
    eta_plus / eta_minus; the remaining dim - 2 levels share the
    balancing energy -(eta_plus + eta_minus)/(dim - 2) and carry no
    mass.  Inputs must satisfy p >= 0, p_plus + p_minus <= 1 and the
    zero-expected-energy constraint p_plus*eta_plus + p_minus*eta_minus = 0.
    """
    if dim < 3:
        raise ValueError("the reduction needs dim >= 3 (dim - 2 idle levels)")
    if p_plus < -1e-12 or p_minus < -1e-12:
        raise ValueError(f"probabilities must be nonnegative: {p_plus}, {p_minus}")
    if p_plus + p_minus > 1 + 1e-12:
        raise ValueError(f"p_plus + p_minus = {p_plus + p_minus} exceeds 1")
    scale = max(1.0, abs(eta_plus), abs(eta_minus))
    if abs(p_plus * eta_plus + p_minus * eta_minus) > constraint_tol * scale:
        raise ValueError("zero-expected-energy constraint violated")
    eta_mid = -(eta_plus + eta_minus) / (dim - 2)
    shift = max(eta_plus, eta_minus, eta_mid)
    top = p_plus * math.exp(eta_plus - shift) + p_minus * math.exp(eta_minus - shift)
    bottom = (
        math.exp(eta_plus - shift)
        + math.exp(eta_minus - shift)
        + (dim - 2) * math.exp(eta_mid - shift)
    )
    return top / bottom


def maximize_reduced_overlap(dim: int, restarts: int = 24, seed: int = 0):
    """Numerically maximize the reduced objective over its two free energies.

    The constraint eliminates the probabilities: p_minus =
    eta_plus/(eta_plus - eta_minus).  Multi-start Nelder-Mead over
    (eta_plus, eta_minus) with eta_plus > 0 > eta_minus.  Returns
    (best value, (p_plus, p_minus, eta_plus, eta_minus)).
    """

    def negated(v):
        ep, em = v
        if not (ep > 0.0 > em):
            return 2.0
        pm = ep / (ep - em)
        return -reduced_overlap_objective(1.0 - pm, pm, ep, em, dim)

    rng = np.random.default_rng(seed)
    starts = [(a, -b) for a in (0.1, 1.0, 3.0, 10.0) for b in (0.1, 1.0, 3.0, 10.0)]
    while len(starts) < restarts:
        starts.append((float(10 ** rng.uniform(-2, 1.5)), -float(10 ** rng.uniform(-2, 1.5))))
    best_val, best_x = -math.inf, None
    for x0 in starts[:restarts]:
        res = minimize(
            negated,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000},
        )
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    ep, em = best_x
    pm = ep / (ep - em)
    return best_val, (1.0 - pm, pm, float(ep), float(em))


@dataclass
class OverlapAscent:
    """Best Gibbs-state overlap found by gradient ascent, with its Hamiltonian."""

    value: float
    hamiltonian: KLocalHamiltonian
    restarts: int


def overlap_ascent(
    target: PureState,
    locality: int,
    restarts: int = 20,
    iterations: int = 300,
    seed: int = 0,
) -> OverlapAscent:
    """Maximize <psi| exp(H)/tr exp(H) |psi> over k-body Hamiltonians H.

    Plain gradient ascent with a doubling/halving step size, restarted
    from the zero Hamiltonian and seeded random coefficient draws.  The
    gradient is exact (divided differences of exp in the eigenbasis).
    Values are lower bounds on the family's true supremum.
    """
    n = target.n_parties
    basis = local_basis(n, locality)
    dim = basis.dim
    psi = target.vector
    m = len(basis)

    def value_and_gradient(theta):
        h = basis.build(theta)
        w, v = np.linalg.eigh(h)
        lam = w - w.max()
        e = np.exp(lam)
        z = e.sum()
        overlap_coords = v.conj().T @ psi
        value = float((e * np.abs(overlap_coords) ** 2).sum() / z)
        phi = _exp_divided_differences(lam)
        kern = phi * np.outer(overlap_coords.conj(), overlap_coords)
        c_raw = v @ kern.T @ v.conj().T
        gibbs = (v * e) @ v.conj().T
        dense_grad = (c_raw - value * gibbs) / z
        grad = basis.coefficients(dense_grad) * dim
        return value, grad

    rng = np.random.default_rng(seed)
    best_val, best_theta = -math.inf, np.zeros(m)
    for r in range(max(1, restarts)):
        theta = np.zeros(m) if r == 0 else 0.5 * rng.standard_normal(m)
        val, grad = value_and_gradient(theta)
        step = 1.0
        for _ in range(iterations):
            cand = theta + step * grad
            cand_val, cand_grad = value_and_gradient(cand)
            if cand_val > val + 1e-14:
                theta, val, grad = cand, cand_val, cand_grad
                step = min(step * 2.0, 1e3)
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if val > best_val:
            best_val, best_theta = val, theta
    ham = KLocalHamiltonian.from_coefficients(basis.strings, best_theta, locality)
    return OverlapAscent(best_val, ham, max(1, restarts))
