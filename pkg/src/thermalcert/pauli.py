"""Signed Pauli strings and real Pauli expansions on N qubits.

Conventions used throughout the package:

* A Pauli string is a tensor product of single-qubit letters I, X, Y, Z
  with an overall sign.  Letters are encoded as integers 0..3 in the
  order (I, X, Y, Z); qubit 0 is the leftmost tensor factor, so basis
  index r has qubit q's bit at position n-1-q.
* Products of letters are tracked exactly: multiplying two strings
  yields a third string together with a phase that is a power of the
  imaginary unit, kept as an integer exponent mod 4 (i**0, i**1, ...).
* A Hermitian operator A on n qubits has the unique real expansion
  A = sum_P c_P P over unsigned strings P, with c_P = tr(A P) / 2**n.
  The weight of a string counts its non-identity letters; truncating an
  expansion at weight k keeps exactly the part of A visible to k-party
  marginals.

Dense conversions are capped at 12 qubits; they exist for tests and
small certificates, not for bulk numerics.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import DimensionError, ResourceLimitError

DENSE_QUBIT_CAP = 12

_LETTERS = "IXYZ"

# i-exponent of the product of two letters: row * col = i**_PHASE_POW * (row ^ col)
_PHASE_POW = np.array(
    [
        [0, 0, 0, 0],
        [0, 0, 1, 3],
        [0, 3, 0, 1],
        [0, 1, 3, 0],
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli string with sign +1 or -1.

    ``letters`` holds one byte per qubit (0=I, 1=X, 2=Y, 3=Z).
    """

    letters: bytes
    phase: int = 1

    def __post_init__(self):
        if self.phase not in (1, -1):
            raise ValueError(f"phase must be +1 or -1, got {self.phase!r}")
        if any(b > 3 for b in self.letters):
            raise ValueError("letters must be bytes with values 0..3")

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse strings like 'XIZI' or '-YYXZ'."""
        phase = 1
        if text[:1] in ("+", "-"):
            phase = -1 if text[0] == "-" else 1
            text = text[1:]
        try:
            letters = bytes(_LETTERS.index(ch) for ch in text)
        except ValueError:
            raise ValueError(f"invalid Pauli letter in {text!r}") from None
        if not letters:
            raise ValueError("empty Pauli string")
        return cls(letters, phase)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(bytes(n_qubits))

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliString":
        """Weight-1 string with one non-identity letter."""
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
        arr = bytearray(n_qubits)
        arr[qubit] = _LETTERS.index(letter)
        return cls(bytes(arr))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(1 for b in self.letters if b)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, b in enumerate(self.letters) if b)

    def unsigned(self) -> "PauliString":
        return self if self.phase == 1 else PauliString(self.letters)

    def __str__(self):
        sign = "-" if self.phase == -1 else ""
        return sign + "".join(_LETTERS[b] for b in self.letters)

    def __repr__(self):
        return f"PauliString('{self}')"

    def column_action(self):
        """Sparse action as (columns, values): P[r, columns[r]] = values[r].

        Each row of a Pauli-string matrix has exactly one nonzero entry.
        """
        n = self.n_qubits
        if n > DENSE_QUBIT_CAP:
            raise ResourceLimitError(
                f"dense Pauli action capped at {DENSE_QUBIT_CAP} qubits, got {n}"
            )
        dim = 1 << n
        rows = np.arange(dim)
        xmask = 0
        for q, b in enumerate(self.letters):
            if b in (1, 2):
                xmask |= 1 << (n - 1 - q)
        cols = rows ^ xmask
        vals = np.full(dim, complex(self.phase))
        for q, b in enumerate(self.letters):
            bit = (rows >> (n - 1 - q)) & 1
            if b == 2:
                vals = vals * (1j * (2 * bit - 1))
            elif b == 3:
                vals = vals * (1 - 2 * bit)
        return cols, vals

    def to_matrix(self) -> np.ndarray:
        cols, vals = self.column_action()
        dim = cols.size
        mat = np.zeros((dim, dim), dtype=complex)
        mat[np.arange(dim), cols] = vals
        return mat


def multiply(a: PauliString, b: PauliString) -> tuple[PauliString, int]:
    """Product of two strings: a * b = i**k * result, result sign +1.

    Returns the unsigned result string and the exponent k (mod 4), which
    folds in the signs of both operands.  Example: X(x)I times Z(x)I is
    -i * Y(x)I, returned as (PauliString('YI'), 3).
    """
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"cannot multiply strings on {a.n_qubits} and {b.n_qubits} qubits"
        )
    la = np.frombuffer(a.letters, dtype=np.uint8)
    lb = np.frombuffer(b.letters, dtype=np.uint8)
    k = int(_PHASE_POW[la, lb].sum())
    if a.phase == -1:
        k += 2
    if b.phase == -1:
        k += 2
    return PauliString(bytes(np.bitwise_xor(la, lb))), k % 4


def multiply_signed(a: PauliString, b: PauliString) -> PauliString:
    """Product when it is Hermitian, i.e. the phase comes out as +-1."""
    base, k = multiply(a, b)
    if k == 0:
        return base
    if k == 2:
        return PauliString(base.letters, -1)
    raise ValueError(f"product of {a} and {b} carries phase i**{k}, not a sign")


class PauliExpansion:
    """Real coefficients of a Hermitian operator over unsigned strings.

    Keys are canonicalized to sign +1; adding a signed string folds the
    sign into its coefficient.
    """

    def __init__(self, n_qubits: int, terms=None):
        self.n_qubits = n_qubits
        self._coeffs: dict[PauliString, float] = {}
        if terms:
            for p, c in dict(terms).items():
                self.add_term(p, c)

    def add_term(self, p: PauliString, c: float) -> None:
        if p.n_qubits != self.n_qubits:
            raise DimensionError(
                f"string on {p.n_qubits} qubits added to {self.n_qubits}-qubit expansion"
            )
        key = p.unsigned()
        value = self._coeffs.get(key, 0.0) + p.phase * float(c)
        if value == 0.0:
            self._coeffs.pop(key, None)
        else:
            self._coeffs[key] = value

    def coeff(self, p: PauliString) -> float:
        return p.phase * self._coeffs.get(p.unsigned(), 0.0)

    def items(self):
        return self._coeffs.items()

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def scaled(self, factor: float) -> "PauliExpansion":
        return PauliExpansion(
            self.n_qubits, {p: c * factor for p, c in self._coeffs.items()}
        )

    def max_weight(self) -> int:
        return max((p.weight for p in self._coeffs), default=0)

    def to_matrix(self) -> np.ndarray:
        _check_dense_cap(self.n_qubits)
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        rows = np.arange(dim)
        for p, c in self._coeffs.items():
            cols, vals = p.column_action()
            mat[rows, cols] += c * vals
        return mat


def _check_dense_cap(n_qubits: int) -> None:
    if n_qubits > DENSE_QUBIT_CAP:
        raise ResourceLimitError(
            f"dense conversion capped at {DENSE_QUBIT_CAP} qubits, got {n_qubits}"
        )


def _infer_qubits(matrix: np.ndarray) -> int:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    n = int(matrix.shape[0]).bit_length() - 1
    if 1 << n != matrix.shape[0]:
        raise DimensionError(f"matrix dimension {matrix.shape[0]} is not a power of 2")
    return n


# Per-qubit change of basis between the matrix-entry block (a, b; c, d),
# flattened as (00, 01, 10, 11), and the coefficients of (I, X, Y, Z).
_BLOCK_TO_COEFF = 0.5 * np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1j, -1j, 0],
        [1, 0, 0, -1],
    ]
)
_COEFF_TO_BLOCK = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, -1j, 0],
        [0, 1, 1j, 0],
        [1, 0, 0, -1],
    ]
)


def _coeff_tensor(matrix: np.ndarray, n: int) -> np.ndarray:
    """Full coefficient tensor, shape (4,)*n, axis q indexed by qubit q's letter."""
    t = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * n))
    perm = []
    for q in range(n):
        perm += [q, n + q]
    t = t.transpose(perm).reshape((4,) * n)
    for q in range(n):
        t = np.moveaxis(np.tensordot(_BLOCK_TO_COEFF, t, axes=([1], [q])), 0, q)
    return t


def _tensor_matrix(t: np.ndarray, n: int) -> np.ndarray:
    """Inverse of _coeff_tensor: synthesize the matrix from its full tensor."""
    t = np.asarray(t, dtype=complex).reshape((4,) * n)
    for q in range(n):
        t = np.moveaxis(np.tensordot(_COEFF_TO_BLOCK, t, axes=([1], [q])), 0, q)
    t = t.reshape((2,) * (2 * n))
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return t.transpose(perm).reshape(1 << n, 1 << n)


def expand(matrix: np.ndarray, hermitian_tol: float = 1e-10) -> PauliExpansion:
    """Expand a Hermitian matrix into its real Pauli coefficients.

    Raises DimensionError for non-power-of-2 shapes and ValueError when
    the matrix is not Hermitian at ``hermitian_tol``.
    """
    n = _infer_qubits(matrix)
    _check_dense_cap(n)
    matrix = np.asarray(matrix, dtype=complex)
    if np.abs(matrix - matrix.conj().T).max() > hermitian_tol:
        raise ValueError("matrix is not Hermitian")
    t = _coeff_tensor(matrix, n)
    coeffs = t.real
    scale = max(np.abs(coeffs).max(), 1e-300)
    keep = np.argwhere(np.abs(coeffs) > 1e-14 * scale)
    out = PauliExpansion(n)
    for idx in keep:
        out.add_term(PauliString(bytes(int(v) for v in idx)), float(coeffs[tuple(idx)]))
    return out


def truncate_weight(expansion: PauliExpansion, max_weight: int) -> PauliExpansion:
    """Keep terms of weight <= max_weight; the k-body visible part."""
    if max_weight < 0:
        raise ValueError("max_weight must be nonnegative")
    return PauliExpansion(
        expansion.n_qubits,
        {p: c for p, c in expansion.items() if p.weight <= max_weight},
    )


def weight_at_most_strings(n_qubits: int, max_weight: int, include_identity=False):
    """Unsigned strings of weight 1..max_weight in a fixed deterministic order.

    Ordered by weight, then support (lexicographic), then letters.  The
    identity is prepended when requested.
    """
    if include_identity:
        yield PauliString.identity(n_qubits)
    for w in range(1, min(max_weight, n_qubits) + 1):
        for supp in combinations(range(n_qubits), w):
            for letters in product((1, 2, 3), repeat=w):
                arr = bytearray(n_qubits)
                for q, b in zip(supp, letters):
                    arr[q] = b
                yield PauliString(bytes(arr))


def strings_on_supports(n_qubits: int, supports, include_identity=False):
    """Unsigned strings acting fully within any of the given qubit subsets.

    ``supports`` is an iterable of qubit tuples; a string qualifies when
    its non-identity letters cover one subset exactly.  Used for
    interaction-restricted coefficient scopes.
    """
    if include_identity:
        yield PauliString.identity(n_qubits)
    seen = set()
    for supp in supports:
        supp = tuple(sorted(supp))
        if supp in seen:
            continue
        seen.add(supp)
        if any(not 0 <= q < n_qubits for q in supp):
            raise ValueError(f"support {supp} out of range for {n_qubits} qubits")
        for letters in product((1, 2, 3), repeat=len(supp)):
            arr = bytearray(n_qubits)
            for q, b in zip(supp, letters):
                arr[q] = b
            yield PauliString(bytes(arr))


class PauliBasis:
    """Precomputed sparse action for an ordered list of unsigned strings.

    Supports the three bulk operations the solvers need: read the
    coefficients of a dense Hermitian matrix, synthesize a dense matrix
    from coefficients, and add a coefficient correction in place.
    Coefficients follow the tr(A P) / 2**n convention.
    """

    def __init__(self, n_qubits: int, strings):
        self.n_qubits = n_qubits
        self.strings = list(strings)
        self.dim = 1 << n_qubits
        m = len(self.strings)
        self._cols = np.empty((m, self.dim), dtype=np.int64)
        self._vals = np.empty((m, self.dim), dtype=complex)
        for i, p in enumerate(self.strings):
            if p.n_qubits != n_qubits:
                raise DimensionError("basis strings must share the qubit count")
            if p.phase != 1:
                raise ValueError("basis strings must be unsigned")
            cols, vals = p.column_action()
            self._cols[i] = cols
            self._vals[i] = vals
        rows = np.arange(self.dim)[None, :]
        self._flat = (rows * self.dim + self._cols).ravel()
        self._rows = rows

    def __len__(self):
        return len(self.strings)

    def coefficients(self, matrix: np.ndarray) -> np.ndarray:
        """c_i = tr(matrix P_i) / 2**n, real parts (Hermitian input assumed)."""
        gathered = matrix[self._cols, self._rows]
        return (gathered * self._vals).sum(axis=1).real / self.dim

    def expectations(self, vector: np.ndarray) -> np.ndarray:
        """<v|P_i|v> for a state vector, one value per basis string."""
        acted = vector[self._cols] * self._vals
        return (acted @ vector.conj()).real

    def build(self, coeffs: np.ndarray) -> np.ndarray:
        """Dense sum_i coeffs[i] * P_i."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        self.add_scaled(out, np.asarray(coeffs, dtype=float))
        return out

    def add_scaled(self, matrix: np.ndarray, deltas: np.ndarray) -> None:
        """matrix += sum_i deltas[i] * P_i, in place."""
        weights = (deltas[:, None] * self._vals).ravel()
        size = self.dim * self.dim
        flat = np.bincount(self._flat, weights=weights.real, minlength=size)
        flat = flat + 1j * np.bincount(self._flat, weights=weights.imag, minlength=size)
        matrix += flat.reshape(self.dim, self.dim)
