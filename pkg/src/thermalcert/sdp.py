"""Feasibility and optimization over states with prescribed low-weight
Pauli coefficients.

The core question: given a pure target |psi> and a locality k, is there
a density matrix rho with rho >= delta * identity whose Pauli
coefficients of weight <= k all match the target's?  A yes answer is an
exact witness that no Gibbs state of a k-body Hamiltonian sits within
trace distance delta of the target (the certification layer turns it
into fidelity witnesses).

The decision procedure is Dykstra's alternating projection between

* the affine set of Hermitian matrices with the prescribed coefficients
  (closed form: overwrite the fixed coefficients, Pauli directions are
  orthogonal), and
* the shifted cone {X : X >= delta * identity} (eigenvalue clipping).

Feasibility is declared only on an exact certificate, from either side
of the alternation: a cone-exact iterate whose fixed coefficients match
the targets within tolerance, or an affine-exact iterate whose smallest
eigenvalue clears delta.  The second kind matters in practice: the
nearest feasible point to the truncated target usually touches the cone
boundary tangentially, where alternating projections crawl, so between
two alternation phases the solver hunts for an interior witness by
projected gradient ascent on a softmin surrogate of the minimum
eigenvalue over the free coefficients.  Infeasibility is declared
numerically, when the inter-set gap stays above ``stall_gap`` without
meaningful improvement for a full stall window.  The optional linear
objective min <psi| rho |psi> is handled by projected subgradient steps
with a diminishing step size.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .pauli import PauliBasis, PauliString, _coeff_tensor, _tensor_matrix, weight_at_most_strings
from .states import DensityMatrix, PureState

FEASIBLE = "feasible"
INFEASIBLE = "infeasible_certified_numerically"
MAX_ITER = "max_iter"


@dataclass(frozen=True)
class MarginalProgram:
    """A marginal-matching feasibility problem, optionally with objective.

    ``scope`` is None for the full weight <= k coefficient list, or an
    explicit list of unsigned Pauli strings; the all-identity string is
    always included, which pins the trace.
    """

    target: PureState
    k: int
    delta: float
    scope: tuple[PauliString, ...] | None = None
    objective_enabled: bool = False

    def __post_init__(self):
        n = self.target.n_parties
        if self.target.local_dim != 2:
            raise ValueError("marginal programs are defined for qubit targets")
        if not 1 <= self.k <= n:
            raise ValueError(f"k must be in 1..{n}, got {self.k}")
        dim = self.target.dim
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.delta * dim > 1 + 1e-12:
            raise ValueError(
                f"delta * dim = {self.delta * dim:.3g} > 1: no state can satisfy it"
            )
        if self.scope is not None:
            scope = list(self.scope)
            identity = PauliString.identity(n)
            if identity not in scope:
                scope.insert(0, identity)
            for p in scope:
                if p.n_qubits != n:
                    raise ValueError(f"scope string {p} does not act on {n} qubits")
                if p.phase != 1:
                    raise ValueError("scope strings must be unsigned")
            object.__setattr__(self, "scope", tuple(scope))

    def scope_strings(self) -> list[PauliString]:
        if self.scope is not None:
            return list(self.scope)
        n = self.target.n_parties
        return list(weight_at_most_strings(n, self.k, include_identity=True))

    def to_json(self) -> str:
        amps = [[float(a.real), float(a.imag)] for a in self.target.vector]
        scope = None if self.scope is None else [str(p) for p in self.scope]
        return json.dumps(
            {
                "target_amplitudes": amps,
                "k": self.k,
                "delta": self.delta,
                "scope": scope,
                "objective": self.objective_enabled,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MarginalProgram":
        data = json.loads(text)
        vec = np.array([complex(re, im) for re, im in data["target_amplitudes"]])
        scope = data.get("scope")
        if scope is not None:
            scope = tuple(PauliString.from_text(s) for s in scope)
        return cls(
            target=PureState(vec),
            k=int(data["k"]),
            delta=float(data["delta"]),
            scope=scope,
            objective_enabled=bool(data.get("objective", False)),
        )


def marginal_program(target, k, delta, scope=None, objective=False) -> MarginalProgram:
    if scope is not None:
        scope = tuple(scope)
    return MarginalProgram(target, k, delta, scope, objective)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 50_000
    tolerance: float = 1e-9  # residual target for both constraint blocks
    stall_gap: float = 1e-7  # gap level that certifies infeasibility when stalled
    stall_window: int = 2000  # consecutive iterations without meaningful progress
    stall_improvement: float = 1e-3  # relative gap decrease that counts as progress
    phase_iterations: int = 256  # plain alternation budget before the interior hunt
    ascent_evals: int = 3000  # eigendecompositions allotted to the interior hunt
    ascent_width: float = 1e-2  # initial softmin width, relative to spectral spread
    ascent_width_floor: float = 1e-9
    witness_stride: int = 64  # affine-witness recheck period in the final phase
    subgradient_scale: float = 0.1  # c in the c / sqrt(t) step size
    subgradient_steps: int = 80
    inner_max_iterations: int = 8000  # projection solves inside objective mode
    inner_tolerance: float = 1e-10
    stagnation_steps: int = 10  # objective steps without improvement before stopping


@dataclass
class SdpOutcome:
    status: str
    iterations: int
    affine_residual: float
    cone_residual: float
    gap: float
    rho: DensityMatrix | None = None
    objective: float | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "status": self.status,
                "iterations": self.iterations,
                "objective": self.objective,
                "gap": self.gap,
                "residuals": {
                    "affine": self.affine_residual,
                    "cone": self.cone_residual,
                },
            }
        )


def _fix_trace(mat: np.ndarray) -> np.ndarray:
    """Move the identity coefficient to exactly 1/dim (uniform eigenvalue shift)."""
    dim = mat.shape[0]
    shift = (1.0 - mat.trace().real) / dim
    if shift != 0.0:
        mat = mat + shift * np.eye(dim)
    return mat


class _Projector:
    """Shared state for the two projections of one program."""

    def __init__(self, program: MarginalProgram):
        self.n_qubits = program.target.n_parties
        self.basis = PauliBasis(self.n_qubits, program.scope_strings())
        self.dim = self.basis.dim
        self.targets = self.basis.expectations(program.target.vector) / self.dim
        self.delta = program.delta
        # base-4 flat index of each fixed string in the full coefficient tensor
        n = self.n_qubits
        self.scope_flat = np.array(
            [sum(p.letters[a] << (2 * (n - 1 - a)) for a in range(n))
             for p in self.basis.strings],
            dtype=np.intp,
        )

    def start_point(self) -> np.ndarray:
        return self.basis.build(self.targets)

    def affine_correction(self, mat: np.ndarray) -> np.ndarray:
        """The matrix that moves ``mat`` onto the affine set when added."""
        deltas = self.targets - self.basis.coefficients(mat)
        return self.basis.build(deltas)

    def cone_lift(self, mat: np.ndarray) -> np.ndarray | None:
        """The matrix that lifts deficient eigenvalues to delta, or None."""
        w, v = np.linalg.eigh(mat)
        deficient = w < self.delta
        if not deficient.any():
            return None
        vd = v[:, deficient]
        return (vd * (self.delta - w[deficient])) @ vd.conj().T

    def affine_residual(self, mat: np.ndarray) -> float:
        return float(np.abs(self.basis.coefficients(mat) - self.targets).max())

    def cone_residual(self, mat: np.ndarray) -> float:
        low = np.linalg.eigvalsh(mat)[0]
        return max(0.0, self.delta - low)


def project_affine(matrix: np.ndarray, program: MarginalProgram) -> np.ndarray:
    """Frobenius projection onto the program's affine constraint set.

    Overwrites the fixed Pauli coefficients with the target values and
    leaves all free coefficients alone; this is the Euclidean projection
    because distinct Pauli strings are Frobenius-orthogonal.
    """
    proj = _Projector(program)
    return matrix + proj.affine_correction(matrix)


def project_cone_shifted(matrix: np.ndarray, delta: float) -> np.ndarray:
    """Frobenius projection onto the shifted cone {X : X >= delta * identity}."""
    w, v = np.linalg.eigh(matrix)
    return (v * np.maximum(w, delta)) @ v.conj().T


def _dykstra(proj: _Projector, start: np.ndarray, tolerance: float, max_iterations: int,
             config: SolverConfig, certify_infeasible: bool = True,
             witness_stride: int = 0):
    """Project ``start`` onto (affine set) intersect (shifted cone).

    Returns (point, status, iterations, gap, affine_residual).  Feasibility
    is declared on either exact witness: a cone-exact iterate whose fixed
    coefficients match within ``tolerance``, or (every ``witness_stride``
    iterations, when nonzero) an affine-exact iterate whose smallest
    eigenvalue clears delta.
    """
    x = start
    p = None  # correction for the cone projection
    q = None  # correction for the affine projection
    anchor_gap = math.inf  # gap at the last meaningful improvement
    stall = 0
    gap = math.inf
    aff_res = math.inf
    for it in range(1, max_iterations + 1):
        w = x if q is None else x + q
        corr = proj.affine_correction(w)
        y = w + corr
        q = -corr
        if witness_stride and it % witness_stride == 0:
            lam = float(np.linalg.eigvalsh(0.5 * (y + y.conj().T))[0])
            if lam >= proj.delta - 1e-10:
                return y, FEASIBLE, it, 0.0, proj.affine_residual(y)
        z_in = y if p is None else y + p
        lift = proj.cone_lift(z_in)
        if lift is None:
            z = z_in
            p = None
        else:
            z = z_in + lift
            p = -lift
        gap = float(np.linalg.norm(y - z))
        aff_res = proj.affine_residual(z)
        if aff_res <= tolerance:
            return z, FEASIBLE, it, gap, aff_res
        if certify_infeasible:
            if gap < anchor_gap * (1.0 - config.stall_improvement):
                anchor_gap = gap
                stall = 0
            elif gap > config.stall_gap:
                stall += 1
                if stall >= config.stall_window:
                    return z, INFEASIBLE, it, gap, aff_res
            else:
                stall = 0
        x = z
        if it % 512 == 0:
            x = 0.5 * (x + x.conj().T)
    return x, MAX_ITER, max_iterations, gap, aff_res


def _softmin(eigs: np.ndarray, width: float) -> float:
    low = float(eigs[0])
    return low - width * math.log(float(np.exp(-(eigs - low) / width).sum()))


class _AscentDone(Exception):
    pass


def _interior_ascent(proj: _Projector, y: np.ndarray, budget: int,
                     config: SolverConfig):
    """Hunt for an affine-exact point whose smallest eigenvalue clears delta.

    Maximizes the softmin surrogate of the minimum eigenvalue over the
    free coefficients with L-BFGS, annealing the surrogate width: each
    width level is solved warm-started from the last, and the exact
    minimum eigenvalue is monitored inside every function evaluation so
    a delta crossing exits immediately.  The surrogate sandwich
    min_eig - width*ln(dim) <= softmin <= min_eig also gives a cheap
    ceiling test: once a cleanly converged level optimum plus
    width*ln(dim) sits below delta, no completion can clear delta and
    the hunt stops.  The ceiling is only trusted when L-BFGS reports
    convergence; an iteration-capped level sits below the true optimum.

    Returns (point, min_eig, evals, crossed).
    """
    delta = proj.delta
    n = proj.n_qubits
    dim = proj.dim
    log_dim = math.log(dim)
    flat = proj.scope_flat
    pinned = proj.targets
    start = _coeff_tensor(0.5 * (y + y.conj().T), n).real.ravel()
    state = {"evals": 0, "lam": -math.inf, "coeffs": None, "crossed": False}

    def synthesize(c):
        t = c.copy()
        t[flat] = pinned
        mat = _tensor_matrix(t, n)
        return 0.5 * (mat + mat.conj().T)

    def negated_surrogate(c, width):
        if state["evals"] >= budget:
            raise _AscentDone
        state["evals"] += 1
        mat = synthesize(c)
        eigs, vecs = np.linalg.eigh(mat)
        lam = float(eigs[0])
        if lam > state["lam"]:
            state["lam"] = lam
            state["coeffs"] = c.copy()
            if lam >= delta - 1e-10:
                state["crossed"] = True
                raise _AscentDone
        weights = np.exp(-(eigs - eigs[0]) / width)
        weights /= weights.sum()
        grad = dim * _coeff_tensor((vecs * weights) @ vecs.conj().T, n).real.ravel()
        grad[flat] = 0.0
        return -_softmin(eigs, width), -grad

    spread = max(1e-6, float(np.linalg.norm(synthesize(start), 2)))
    width = config.ascent_width * spread
    coeffs = start
    try:
        while True:
            result = minimize(
                negated_surrogate, coeffs, args=(width,), jac=True,
                method="L-BFGS-B",
                options={"maxiter": 300, "maxfun": 400, "ftol": 1e-18,
                         "gtol": 1e-12, "maxcor": 25},
            )
            coeffs = result.x
            if result.status == 0 and -result.fun + width * log_dim < delta:
                break  # even the surrogate ceiling is below delta
            if width <= config.ascent_width_floor:
                break
            width = max(0.25 * width, config.ascent_width_floor)
    except _AscentDone:
        pass
    best = state["coeffs"] if state["coeffs"] is not None else coeffs
    return synthesize(best), state["lam"], state["evals"], state["crossed"]


def _wrap_feasible(proj: _Projector, point: np.ndarray, status: str, iterations: int,
                   gap: float) -> SdpOutcome:
    point = _fix_trace(0.5 * (point + point.conj().T))
    aff = proj.affine_residual(point)
    cone = proj.cone_residual(point)
    rho = DensityMatrix(point) if status == FEASIBLE else None
    return SdpOutcome(status, iterations, aff, cone, gap, rho=rho)


def solve(program: MarginalProgram, config: SolverConfig | None = None) -> SdpOutcome:
    """Decide the program; with objective_enabled, also minimize the overlap.

    Statuses: 'feasible' carries a certificate state rho (eigenvalues
    >= delta - 1e-9, coefficients within tolerance); the numerical
    infeasibility status means the projection gap stalled at a strictly
    positive level; 'max_iter' is inconclusive.

    Three phases, all deterministic: a plain alternation phase that
    settles easy instances at nearest-point accuracy, an interior hunt
    for an affine-exact witness with min eigenvalue >= delta (alternation
    alone crawls here, because the nearest intersection point touches
    the cone boundary tangentially), and a final alternation phase whose
    stall rule declares numerical infeasibility.  ``iterations`` counts
    eigendecomposition-bearing steps across all phases.
    """
    config = config or SolverConfig()
    proj = _Projector(program)
    start = proj.start_point()
    lam0 = float(np.linalg.eigvalsh(start)[0])
    gap = 0.0
    if lam0 >= program.delta - 1e-10:
        point, status, used = start, FEASIBLE, 1
    else:
        budget = config.max_iterations
        phase1 = min(config.phase_iterations, budget)
        point, status, used, gap, aff = _dykstra(
            proj, start, config.tolerance, phase1, config, witness_stride=1
        )
        if status == MAX_ITER and budget > used:
            y = point + proj.affine_correction(point)
            y, lam, evals, crossed = _interior_ascent(
                proj, y, min(config.ascent_evals, budget - used), config
            )
            used += evals
            if crossed:
                point, status, gap = y, FEASIBLE, 0.0
            elif budget > used:
                point, status, more, gap, aff = _dykstra(
                    proj, y, config.tolerance, budget - used, config,
                    witness_stride=config.witness_stride,
                )
                used += more
    if status != FEASIBLE:
        cone = proj.cone_residual(point)
        return SdpOutcome(status, used, proj.affine_residual(point), cone, gap)
    outcome = _wrap_feasible(proj, point, status, used, gap)
    if not program.objective_enabled:
        return outcome

    # projected subgradient on <psi| rho |psi> over the feasible set
    target_proj = program.target.projector()
    x = outcome.rho.matrix
    best_obj = float(np.real(np.vdot(program.target.vector, x @ program.target.vector)))
    best_x = x
    total_inner = used
    since_improvement = 0
    for t in range(1, config.subgradient_steps + 1):
        step = config.subgradient_scale / math.sqrt(t)
        x = x - step * target_proj
        x, st, inner_it, gap, aff = _dykstra(
            proj, x, config.inner_tolerance, config.inner_max_iterations,
            config, certify_infeasible=False,
        )
        total_inner += inner_it
        if st == FEASIBLE:
            obj = float(np.real(np.vdot(program.target.vector, x @ program.target.vector)))
            if obj < best_obj - 1e-12:
                best_obj = obj
                best_x = x
                since_improvement = 0
                continue
        since_improvement += 1
        if since_improvement >= config.stagnation_steps:
            break
    final = _wrap_feasible(proj, best_x, FEASIBLE, total_inner, gap)
    final.objective = float(
        np.real(np.vdot(program.target.vector, final.rho.matrix @ program.target.vector))
    )
    return final
