"""Pure and mixed states of N qudits, with the handful of distance and
entropy functionals the certification arguments need.

Natural logarithms everywhere.  Entropies ignore eigenvalues below a
relative cutoff of 1e-14; relative entropy returns math.inf when the
first argument has weight outside the support of the second instead of
raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .linalg import EIG_CUTOFF, eig_hermitian, require_hermitian

TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-12


def _infer_parties(dim: int, local_dim: int) -> int:
    n = round(math.log(dim, local_dim))
    if local_dim**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of local dim {local_dim}")
    return n


@dataclass(frozen=True)
class PureState:
    """A normalized state vector on n_parties systems of local_dim levels."""

    vector: np.ndarray
    local_dim: int = 2
    n_parties: int = field(init=False, default=0)

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).ravel()
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "n_parties", _infer_parties(vec.size, self.local_dim))
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector norm {norm!r} is not 1 within {NORM_TOL}")

    @classmethod
    def from_amplitudes(cls, amplitudes, local_dim: int = 2) -> "PureState":
        """Normalize raw amplitudes (rejecting the zero vector)."""
        vec = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm, local_dim)

    @property
    def dim(self) -> int:
        return self.vector.size

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), self.local_dim)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix: Hermitian, unit trace, eigenvalues >= -1e-9."""

    matrix: np.ndarray
    local_dim: int = 2
    n_parties: int = field(init=False, default=0)

    def __post_init__(self):
        mat = require_hermitian(np.asarray(self.matrix, dtype=complex))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "n_parties", _infer_parties(mat.shape[0], self.local_dim))
        tr = mat.trace().real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} is not 1 within {TRACE_TOL}")
        low = np.linalg.eigvalsh(mat)[0]
        if low < -PSD_TOL:
            raise ValueError(f"matrix has eigenvalue {low:.3e} below -{PSD_TOL}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_matrix(state) -> np.ndarray:
    if isinstance(state, DensityMatrix):
        return state.matrix
    if isinstance(state, PureState):
        return state.projector()
    return np.asarray(state, dtype=complex)


def partial_trace(state, keep, local_dim: int = 2):
    """Reduced state on the sorted subset ``keep`` of parties.

    Accepts a DensityMatrix (returned as one) or a raw matrix.  Party
    indices count from 0, in tensor-product order.
    """
    if isinstance(state, DensityMatrix):
        local_dim = state.local_dim
    mat = _as_matrix(state)
    n = _infer_parties(mat.shape[0], local_dim)
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ValueError("keep must name at least one party")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep {keep} out of range for {n} parties")
    traced = [q for q in range(n) if q not in keep]
    t = mat.reshape((local_dim,) * (2 * n))
    order = keep + traced + [n + q for q in keep] + [n + q for q in traced]
    t = t.transpose(order)
    dk = local_dim ** len(keep)
    dt = local_dim ** len(traced)
    reduced = np.trace(t.reshape(dk, dt, dk, dt), axis1=1, axis2=3)
    if isinstance(state, DensityMatrix):
        return DensityMatrix(reduced, local_dim)
    return reduced


def fidelity_pure(rho, psi: PureState) -> float:
    """<psi| rho |psi>, the fidelity against a pure target."""
    mat = _as_matrix(rho)
    if mat.shape[0] != psi.dim:
        raise DimensionError(f"dimension mismatch: {mat.shape[0]} vs {psi.dim}")
    return float(np.real(psi.vector.conj() @ mat @ psi.vector))


def trace_distance(a, b) -> float:
    """(1/2) tr |a - b|."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionError(f"shape mismatch: {ma.shape} vs {mb.shape}")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(ma - mb)).sum())


def _spectrum(mat: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(mat)
    return w[w > EIG_CUTOFF * max(w[-1], 1.0)]


def von_neumann_entropy(rho) -> float:
    """-tr[rho ln rho] in nats."""
    w = _spectrum(_as_matrix(rho))
    return float(-(w * np.log(w)).sum())


def relative_entropy(rho, sigma, support_tol: float = 1e-12) -> float:
    """S(rho || sigma) in nats; math.inf on a support violation."""
    mr = _as_matrix(rho)
    ms = _as_matrix(sigma)
    if mr.shape != ms.shape:
        raise DimensionError(f"shape mismatch: {mr.shape} vs {ms.shape}")
    ws, vs = eig_hermitian(ms)
    cutoff = EIG_CUTOFF * max(ws[-1], 1.0)
    weights = np.einsum("ij,jk,ki->i", vs.conj().T, mr, vs).real
    outside = float(weights[ws <= cutoff].sum())
    if outside > support_tol:
        return math.inf
    inside = ws > cutoff
    cross = float((weights[inside] * np.log(ws[inside])).sum())
    wr = _spectrum(mr)
    return float((wr * np.log(wr)).sum()) - cross


def haar_random_pure(n_parties: int, local_dim: int = 2, seed=None) -> PureState:
    """Haar-distributed pure state: normalized complex Gaussian vector.

    ``seed`` may be an int, a SeedSequence, or a Generator; sampling is
    reproducible given the same seed.
    """
    rng = np.random.default_rng(seed)
    dim = local_dim**n_parties
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(vec / np.linalg.norm(vec), local_dim)


def ghz_state(n_qubits: int) -> PureState:
    vec = np.zeros(2**n_qubits, dtype=complex)
    vec[0] = vec[-1] = 1 / math.sqrt(2)
    return PureState(vec)


def basis_product_state(n_qubits: int, index: int = 0) -> PureState:
    """Computational basis state |index> as an n-qubit product state."""
    vec = np.zeros(2**n_qubits, dtype=complex)
    vec[index] = 1.0
    return PureState(vec)
