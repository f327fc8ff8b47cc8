"""Graph states and their stabilizer groups.

A graph on n vertices defines the n-qubit state stabilized by the
generators g_a = X_a prod_{b ~ a} Z_b (one per vertex).  The projector
onto the state is the normalized sum of all 2**n signed stabilizer
elements.  The minimum weight over non-identity stabilizer elements
controls which marginals of the state are maximally mixed: weight m
means every (m-1)-party reduced state is proportional to the identity.

Weight-only questions are answered on packed bitmasks (one x bit and
one z bit per vertex), which keeps a 2**25 enumeration affordable;
phase-exact enumeration uses the Pauli-string algebra and a Gray-code
walk so each element costs a single generator multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ResourceLimitError
from .pauli import PauliString, multiply_signed
from .states import PureState

ENUMERATION_QUBIT_CAP = 25


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    v = arr.astype(np.uint64)
    v = v - ((v >> 1) & 0x5555555555555555)
    v = (v & 0x3333333333333333) + ((v >> 2) & 0x3333333333333333)
    v = (v + (v >> 4)) & 0x0F0F0F0F0F0F0F0F
    return (v * 0x0101010101010101) >> 56


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on vertices 0..n_vertices-1."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        canon = []
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ValueError(f"edge ({a}, {b}) out of range")
            e = (min(a, b), max(a, b))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            canon.append(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @classmethod
    def from_edge_file(cls, path) -> "Graph":
        """Read 'u v' pairs, one per line; '#' starts a comment."""
        edges = []
        top = -1
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"expected 'u v' pair, got {line!r}")
                a, b = int(parts[0]), int(parts[1])
                edges.append((a, b))
                top = max(top, a, b)
        if not edges:
            raise ValueError(f"no edges found in {path}")
        return cls(top + 1, tuple(edges))

    def neighbors(self, vertex: int) -> tuple[int, ...]:
        out = []
        for a, b in self.edges:
            if a == vertex:
                out.append(b)
            elif b == vertex:
                out.append(a)
        return tuple(sorted(out))

    def adjacency_masks(self) -> list[int]:
        """Neighborhood of each vertex as a bitmask (vertex a = bit a)."""
        masks = [0] * self.n_vertices
        for a, b in self.edges:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return masks


def ring_cluster(n_vertices: int) -> Graph:
    """Cycle graph 0-1-...-(n-1)-0."""
    if n_vertices < 3:
        raise ValueError("a ring needs at least 3 vertices")
    edges = [(i, (i + 1) % n_vertices) for i in range(n_vertices)]
    return Graph(n_vertices, tuple(edges))


def linear_cluster(n_vertices: int) -> Graph:
    if n_vertices < 2:
        raise ValueError("a path needs at least 2 vertices")
    return Graph(n_vertices, tuple((i, i + 1) for i in range(n_vertices - 1)))


def permuted_linear_cluster() -> Graph:
    """The 4-vertex path 0-2-1-3: a linear cluster with the middle pair swapped.

    Its four stabilizer generators are XIZI, IXZZ, ZZXI, IZIX, and no
    nearest-neighbor pair of qubits (in the 0,1,2,3 line order) supports
    a non-identity stabilizer element.
    """
    return Graph(4, ((0, 2), (1, 2), (1, 3)))


def periodic_grid_cluster(rows: int, cols: int) -> Graph:
    """2D cluster graph on a torus (wrap-around in both directions)."""
    if rows < 3 or cols < 3:
        raise ValueError("periodic grid needs at least 3 rows and columns")
    edges = set()
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            right = r * cols + (c + 1) % cols
            down = ((r + 1) % rows) * cols + c
            edges.add((min(v, right), max(v, right)))
            edges.add((min(v, down), max(v, down)))
    return Graph(rows * cols, tuple(sorted(edges)))


class GraphState:
    """The stabilizer state of a graph, with exact signed enumeration."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.n_qubits = graph.n_vertices

    @property
    def generators(self) -> list[PauliString]:
        """g_a = X on vertex a, Z on its neighbors; one per vertex, in order."""
        gens = []
        for a in range(self.n_qubits):
            letters = bytearray(self.n_qubits)
            letters[a] = 1
            for b in self.graph.neighbors(a):
                letters[b] = 3
            gens.append(PauliString(bytes(letters)))
        return gens

    def stabilizer_elements(self):
        """All 2**n signed stabilizer elements, identity first (Gray-code walk)."""
        gens = self.generators
        current = PauliString.identity(self.n_qubits)
        yield current
        for t in range(1, 1 << self.n_qubits):
            flip = (t & -t).bit_length() - 1
            current = multiply_signed(current, gens[flip])
            yield current

    def min_stabilizer_weight(self) -> int:
        return min_stabilizer_weight(self.graph)

    def state_vector(self) -> PureState:
        """|G> built directly: uniform superposition with CZ sign pattern."""
        n = self.n_qubits
        dim = 1 << n
        amps = np.full(dim, 1.0 / np.sqrt(dim))
        idx = np.arange(dim)
        for a, b in self.graph.edges:
            both = ((idx >> (n - 1 - a)) & 1) & ((idx >> (n - 1 - b)) & 1)
            amps = amps * (1 - 2 * both)
        return PureState(amps.astype(complex))

    def dense_projector(self) -> np.ndarray:
        """|G><G| as the normalized sum of all stabilizer elements."""
        from .pauli import _check_dense_cap

        _check_dense_cap(self.n_qubits)
        dim = 1 << self.n_qubits
        rows = np.arange(dim)
        mat = np.zeros((dim, dim), dtype=complex)
        for element in self.stabilizer_elements():
            cols, vals = element.column_action()
            mat[rows, cols] += vals
        return mat / dim


def _half_masks(adj: list[int], members: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """x and z bitmasks of all subset products over the given generators."""
    size = 1 << len(members)
    sub = np.arange(size, dtype=np.uint64)
    x = np.zeros(size, dtype=np.uint64)
    z = np.zeros(size, dtype=np.uint64)
    for bit, a in enumerate(members):
        chosen = ((sub >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        x[chosen] ^= np.uint64(1 << a)
        z[chosen] ^= np.uint64(adj[a])
    return x, z


def min_stabilizer_weight(graph: Graph) -> int:
    """Smallest weight over the 2**n - 1 non-identity stabilizer elements.

    Meet-in-the-middle over generator subsets; capped at 25 vertices.
    """
    n = graph.n_vertices
    if n > ENUMERATION_QUBIT_CAP:
        raise ResourceLimitError(
            f"stabilizer enumeration capped at {ENUMERATION_QUBIT_CAP} qubits, got {n}"
        )
    adj = graph.adjacency_masks()
    lo = list(range(n // 2))
    hi = list(range(n // 2, n))
    x_lo, z_lo = _half_masks(adj, lo)
    x_hi, z_hi = _half_masks(adj, hi)
    best = n + 1
    block = max(1, (1 << 22) // max(x_hi.size, 1))
    for start in range(0, x_lo.size, block):
        xs = x_lo[start : start + block, None] ^ x_hi[None, :]
        zs = z_lo[start : start + block, None] ^ z_hi[None, :]
        weights = _popcount(xs | zs)
        if start == 0:
            weights[0, 0] = n + 1  # identity element does not count
        best = min(best, int(weights.min()))
    return best


def _min_weight_small(adj: list[int], n: int) -> int:
    """Weight minimum via one vectorized pass; for search loops, n <= 20."""
    size = 1 << n
    sub = np.arange(size, dtype=np.uint64)
    z = np.zeros(size, dtype=np.uint64)
    for a in range(n):
        chosen = ((sub >> np.uint64(a)) & np.uint64(1)).astype(bool)
        z[chosen] ^= np.uint64(adj[a])
    weights = _popcount(sub | z)
    return int(weights[1:].min())


def search_graph_min_weight(n_vertices: int, target: int, seed: int = 0):
    """Find a graph on n_vertices whose minimum stabilizer weight is >= target.

    Exhaustive over all edge sets for n <= 6 (first hit in a fixed edge-mask
    order, so the result is deterministic); for n = 7 or 8 the searched class
    is circulant graphs plus a seeded random sample.  Returns the Graph, or
    None when the searched class contains no example.
    """
    if n_vertices > 8:
        raise ResourceLimitError("graph search supported up to 8 vertices")
    pairs = list(combinations(range(n_vertices), 2))

    def from_mask(mask: int) -> list[int]:
        adj = [0] * n_vertices
        for i, (a, b) in enumerate(pairs):
            if (mask >> i) & 1:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
        return adj

    def check(adj: list[int]):
        # generator weight = 1 + degree, so low-degree vertices cap m cheaply
        if any(int(_popcount(np.uint64(m))) < target - 1 for m in adj):
            return None
        return _min_weight_small(adj, n_vertices)

    if n_vertices <= 6:
        for mask in range(1 << len(pairs)):
            adj = from_mask(mask)
            m = check(adj)
            if m is not None and m >= target:
                edges = tuple(p for i, p in enumerate(pairs) if (mask >> i) & 1)
                return Graph(n_vertices, edges)
        return None

    # circulants first: connection set over distances 1..n//2
    distances = list(range(1, n_vertices // 2 + 1))
    for conn_mask in range(1, 1 << len(distances)):
        conn = [d for i, d in enumerate(distances) if (conn_mask >> i) & 1]
        edges = set()
        for v in range(n_vertices):
            for d in conn:
                w = (v + d) % n_vertices
                edges.add((min(v, w), max(v, w)))
        graph = Graph(n_vertices, tuple(sorted(edges)))
        adj = graph.adjacency_masks()
        m = check(adj)
        if m is not None and m >= target:
            return graph
    rng = np.random.default_rng(seed)
    for _ in range(50_000):
        mask = int(rng.integers(0, 1 << len(pairs)))
        adj = from_mask(mask)
        m = check(adj)
        if m is not None and m >= target:
            edges = tuple(p for i, p in enumerate(pairs) if (mask >> i) & 1)
            return Graph(n_vertices, edges)
    return None
