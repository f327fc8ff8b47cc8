"""Certified incompatibility of pure targets with few-body equilibrium.

The question: can a given pure state be a thermal state, or the unique
ground state, of any Hamiltonian built from the scope's Pauli strings
(all strings of weight <= k by default)?  A sufficient "no" is an
explicit completion: a density matrix sigma with every eigenvalue at
least delta whose in-scope expectations match the target's exactly.
Any in-scope Hamiltonian assigns sigma and the target the same energy,
so the target cannot be a nondegenerate ground state, and
quantitatively every in-scope thermal state tau obeys the fidelity
bound F(tau, target) <= alpha.

Two routes produce the certificate:

* ``sdp_ball``: run the marginal feasibility solver at level delta.  A
  feasible point is the certificate and yields alpha = 1 - delta**2.
* ``rdm_maximally_mixed``: when the target's non-identity in-scope
  expectations all vanish, sigma = identity/dim is a certificate by
  inspection for any delta <= 1/dim, and a sharper closed-form analysis
  of the induced two-level problem gives alpha = (dim - 1)/dim.  No
  solver runs.

All entropies are in nats.  relative_entropy_lower_bound converts alpha
into a divergence floor: S(target || tau) >= -ln(alpha) for every
in-scope thermal state tau.  The continuity and floor functions
(fannes_audenaert_bound, min_entropy_floor, entropy_gap) quantify the
same separation on the entropy scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .pauli import PauliBasis
from .sdp import (
    FEASIBLE,
    INFEASIBLE,
    MAX_ITER,
    MarginalProgram,
    SdpOutcome,
    SolverConfig,
    solve,
)
from .states import PureState, fidelity_pure

CERTIFIED = "certified"
NOT_CERTIFIED = "not_certified"
INCONCLUSIVE = "inconclusive"

_STATUS_FROM_SOLVER = {
    FEASIBLE: CERTIFIED,
    INFEASIBLE: NOT_CERTIFIED,
    MAX_ITER: INCONCLUSIVE,
}


def fannes_audenaert_bound(delta: float, dim: int) -> float:
    """Largest possible entropy difference between states delta apart.

    delta is trace distance, dim the Hilbert space dimension; the bound
    is delta*ln(dim - 1) + h(delta) with h the binary entropy, valid for
    delta <= 1 - 1/dim, monotone increasing there.
    """
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    if not 0.0 <= delta <= 1.0 - 1.0 / dim:
        raise ValueError(f"delta {delta} outside [0, 1 - 1/dim]")
    if delta == 0.0:
        return 0.0
    h = -delta * math.log(delta) - (1.0 - delta) * math.log1p(-delta)
    return delta * math.log(dim - 1) + h


def min_entropy_floor(delta: float, dim: int) -> float:
    """Least entropy among states with all dim eigenvalues at least delta.

    Attained by the spectrum (1 - (dim-1)*delta, delta, ..., delta);
    needs delta <= 1/(dim - 1) so that spectrum exists.
    """
    if dim < 2:
        raise ValueError(f"dim must be at least 2, got {dim}")
    if not 0.0 <= delta <= 1.0 / (dim - 1):
        raise ValueError(f"delta {delta} outside [0, 1/(dim - 1)]")
    if delta == 0.0:
        return 0.0
    top = 1.0 - (dim - 1) * delta
    ent = -(dim - 1) * delta * math.log(delta)
    if top > 0.0:
        ent -= top * math.log(top)
    return ent


def entropy_gap(delta: float, dim: int) -> float:
    """min_entropy_floor(delta) - 2*fannes_audenaert_bound(delta).

    Defined for delta in [0, 1/dim].  When nonnegative, a completion
    with spectrum floored at delta keeps its entropy above what any
    state within trace distance delta of a pure state can reach, even
    after paying the continuity cost twice (once per side of a triangle
    argument), so the certificate survives entropy accounting alone.
    """
    if not 0.0 <= delta <= 1.0 / dim + 1e-15:
        raise ValueError(f"delta {delta} outside [0, 1/dim]")
    return min_entropy_floor(delta, dim) - 2.0 * fannes_audenaert_bound(delta, dim)


def entropy_gap_at_uniform(dim: int) -> float:
    """The entropy gap evaluated at delta = 1/dim (the maximally mixed floor)."""
    return entropy_gap(1.0 / dim, dim)


def relative_entropy_lower_bound(fidelity: float) -> float:
    """S(rho || sigma) >= -ln F(rho, sigma), in nats.

    With F the (squared-overlap) fidelity; follows from monotonicity
    under the measurement onto rho's eigenbasis.  At F = 31/32 this is
    the 0.0317-nat floor quoted in the constants report.
    """
    if not 0.0 < fidelity <= 1.0:
        raise ValueError(f"fidelity must be in (0, 1], got {fidelity}")
    return -math.log(fidelity)


def ball_witness_threshold(delta: float) -> float:
    """Fidelity ceiling certified by a delta-floored completion: 1 - delta**2."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta}")
    return 1.0 - delta * delta


def witness_value(alpha: float, target: PureState, rho_test) -> float:
    """Evaluate the witness alpha*identity - |target><target| on a state.

    Returns alpha - <target|rho_test|target>.  Nonnegative on every
    thermal state of an in-scope Hamiltonian once alpha is a certified
    ceiling; a negative value flags correlations beyond the scope's
    reach.
    """
    return alpha - fidelity_pure(rho_test, target)


@dataclass
class CertificationResult:
    """Verdict for one (target, k, delta) certification query.

    certified means: every thermal state of every in-scope Hamiltonian
    has fidelity at most alpha with the target, hence relative entropy
    at least rel_entropy_lb_nats from it.
    """

    target_label: str
    k: int
    delta: float
    alpha: float
    method: str
    status: str
    rel_entropy_lb_nats: float
    solver: Optional[SdpOutcome]

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self) -> str:
        payload = {
            "target": self.target_label,
            "k": self.k,
            "delta": self.delta,
            "alpha": self.alpha,
            "method": self.method,
            "status": self.status,
            "rel_entropy_lb_nats": self.rel_entropy_lb_nats,
        }
        if self.solver is not None:
            payload["solver"] = {
                "status": self.solver.status,
                "iterations": self.solver.iterations,
                "residuals": {
                    "affine": self.solver.affine_residual,
                    "cone": self.solver.cone_residual,
                },
            }
        return json.dumps(payload, indent=2)


def certify_ball(
    target: PureState,
    k: int,
    delta: float,
    method: str = "sdp_ball",
    scope=None,
    config: Optional[SolverConfig] = None,
    target_label: str = "state",
) -> CertificationResult:
    """Certify that the target is far from every in-scope thermal state.

    Looks for a completion sigma >= delta*identity reproducing the
    target's expectations on the scope (all weight <= k strings unless
    ``scope`` narrows it).  Success certifies F(tau, target) <= alpha
    for every thermal state tau of every in-scope Hamiltonian.

    method ``sdp_ball`` runs the feasibility solver; a feasible point is
    the certificate, alpha = 1 - delta**2, and the solver outcome (with
    the certificate's residuals) is attached.  A numerically certified
    infeasibility reports not_certified, iteration exhaustion reports
    inconclusive.  method ``rdm_maximally_mixed`` applies only when the
    target's non-identity scope expectations all vanish and
    delta <= 1/dim; the certificate is the maximally mixed state itself
    and the sharper alpha = (dim - 1)/dim holds with no iteration.
    """
    dim = target.dim
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta * dim > 1.0 + 1e-12:
        raise ValueError(f"delta {delta} leaves no unit-trace spectrum in dimension {dim}")
    if dim < 8:
        raise ValueError(f"certification supports 3 or more qubits, got dimension {dim}")

    program = MarginalProgram(target, k, delta, scope=scope)

    if method == "rdm_maximally_mixed":
        basis = PauliBasis(target.n_parties, program.scope_strings())
        expectations = basis.expectations(target.vector)
        weights = np.array([p.weight for p in basis.strings])
        off = np.abs(expectations[weights > 0])
        if off.size and off.max() > 1e-9:
            raise ValueError(
                "rdm_maximally_mixed needs vanishing in-scope correlations; "
                f"largest is {off.max():.3e}"
            )
        if delta > 1.0 / dim + 1e-12:
            raise ValueError(f"rdm_maximally_mixed needs delta <= 1/dim, got {delta}")
        alpha = (dim - 1) / dim
        gap = entropy_gap(min(delta, 1.0 / dim), dim)
        status = CERTIFIED if gap >= 0.0 else INCONCLUSIVE
        return CertificationResult(
            target_label,
            k,
            delta,
            alpha,
            method,
            status,
            relative_entropy_lower_bound(alpha),
            None,
        )

    if method != "sdp_ball":
        raise ValueError(f"unknown certification method {method!r}")

    outcome = solve(program, config)
    status = _STATUS_FROM_SOLVER[outcome.status]
    if status == CERTIFIED and entropy_gap(min(delta, 1.0 / dim), dim) < 0.0:
        # defense in depth: the entropy accounting must independently
        # support the certificate before we report success
        status = INCONCLUSIVE
    alpha = ball_witness_threshold(delta)
    return CertificationResult(
        target_label,
        k,
        delta,
        alpha,
        method,
        status,
        relative_entropy_lower_bound(alpha),
        outcome,
    )
