"""Model configuration, state space, contact graphs and transition-rate functions.

The system tracks a closed population of ``N`` nodes.  Infected nodes occupy
one of ``c`` recovery units; when all units are busy a newly infected node
joins the orbit (capacity ``N - c``) and retries for service.  A system state
is the pair ``(i, j)`` = (busy units, orbit occupancy).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError, GraphFormatError

State = tuple[int, int]


class Mode(str, Enum):
    HOMOGENEOUS = "homogeneous"
    HETEROGENEOUS = "heterogeneous"


class Closure(str, Enum):
    """Count-level closure of the infected-neighbor term in heterogeneous mode.

    The per-node infection pressure depends on which neighbors are infected,
    which a count-level chain cannot represent.  MEAN_FIELD scales the full
    neighbor sum by the infected fraction (i + j) / N; FULL_NEIGHBOR keeps the
    whole sum as an upper bound.
    """

    MEAN_FIELD = "mean_field"
    FULL_NEIGHBOR = "full_neighbor"


@dataclass(frozen=True)
class StateSpace:
    """Rectangular lattice of states (i, j), 0 <= i <= c, 0 <= j <= N - c."""

    N: int
    c: int

    def __post_init__(self):
        if self.N < 2:
            raise ConfigError(f"N must be >= 2, got {self.N}")
        if not 1 <= self.c < self.N:
            raise ConfigError(f"c must satisfy 1 <= c < N, got c={self.c}, N={self.N}")

    @property
    def width(self) -> int:
        """Number of orbit levels per recovery level."""
        return self.N - self.c + 1

    @property
    def size(self) -> int:
        return (self.c + 1) * self.width

    def contains(self, i: int, j: int) -> bool:
        return 0 <= i <= self.c and 0 <= j <= self.N - self.c

    def index(self, i: int, j: int) -> int:
        """Linear index (N - c + 1) * i + j; bijective onto 0 .. size - 1."""
        if not self.contains(i, j):
            raise DomainError(f"state ({i}, {j}) outside the (N={self.N}, c={self.c}) lattice")
        return self.width * i + j

    def state_at(self, index: int) -> State:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.size:
            raise DomainError(f"index {index} outside 0..{self.size - 1}")
        i, j = divmod(index, self.width)
        return i, j

    def states(self) -> list[State]:
        """All states ordered by linear index."""
        return [self.state_at(k) for k in range(self.size)]


@dataclass(frozen=True, eq=False)
class ContactGraph:
    """Undirected simple graph given by a symmetric 0/1 adjacency matrix."""

    adjacency: np.ndarray
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=int)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ConfigError(f"adjacency must be square, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ConfigError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ConfigError("adjacency diagonal must be zero (no self-loops)")
        if not np.isin(a, (0, 1)).all():
            raise ConfigError("adjacency entries must be 0 or 1")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)
        d = a.sum(axis=1)
        d.setflags(write=False)
        object.__setattr__(self, "degrees", d)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def degree(self, node: int) -> int:
        if not 0 <= node < self.n:
            raise DomainError(f"node {node} outside 0..{self.n - 1}")
        return int(self.degrees[node])


def load_graph(text: str) -> ContactGraph:
    """Parse an edge-list document into a :class:`ContactGraph`.

    Format: a header line ``n <count>`` followed by one ``u v`` edge per line
    (0-based node ids).  Blank lines and lines starting with ``#`` are
    ignored.  Duplicate edges collapse; self-loops are rejected.
    """
    n = None
    adjacency = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphFormatError("expected header 'n <count>'", line=lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"bad node count {parts[1]!r}", line=lineno) from None
            if n < 1:
                raise GraphFormatError(f"node count must be >= 1, got {n}", line=lineno)
            adjacency = np.zeros((n, n), dtype=int)
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer node id in {line!r}", line=lineno) from None
        if u == v:
            raise GraphFormatError(f"self-loop at node {u}", line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"node id outside 0..{n - 1} in {line!r}", line=lineno)
        adjacency[u, v] = 1
        adjacency[v, u] = 1
    if adjacency is None:
        raise GraphFormatError("empty document: missing 'n <count>' header")
    return ContactGraph(adjacency)


def graph_to_text(graph: ContactGraph) -> str:
    """Serialize a graph back to the edge-list format accepted by load_graph."""
    lines = [f"n {graph.n}"]
    rows, cols = np.nonzero(np.triu(graph.adjacency))
    lines += [f"{u} {v}" for u, v in zip(rows.tolist(), cols.tolist())]
    return "\n".join(lines) + "\n"


def ring_with_hub(n: int) -> ContactGraph:
    """Fixture contact topology: a ring over nodes 1..n-1 plus node 0 joined to all.

    Every non-hub node has degree 3 (two ring neighbors and the hub), so the
    tagged-node dynamics are comparable across sizes; the hub has degree n - 1.
    """
    if n < 4:
        raise ConfigError(f"ring_with_hub needs n >= 4, got {n}")
    a = np.zeros((n, n), dtype=int)
    ring = list(range(1, n))
    for u, v in zip(ring, ring[1:] + ring[:1]):
        a[u, v] = a[v, u] = 1
    a[0, 1:] = 1
    a[1:, 0] = 1
    return ContactGraph(a)


@dataclass(frozen=True)
class ModelConfig:
    """Population, service and rate parameters; the single source of model truth.

    Rates are per unit time: ``alpha`` population contact rate, ``mu`` recovery
    rate per busy unit, ``theta`` retrial rate per orbiting node (0 allowed).
    """

    N: int
    c: int
    alpha: float
    mu: float
    theta: float
    mode: Mode = Mode.HOMOGENEOUS
    tagged_node: int | None = None
    closure: Closure = Closure.MEAN_FIELD
    initial_state: State = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "closure", Closure(self.closure))
        object.__setattr__(self, "initial_state", tuple(self.initial_state))
        space = StateSpace(self.N, self.c)  # validates N, c
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if not self.mu > 0:
            raise ConfigError(f"mu must be > 0, got {self.mu}")
        if self.theta < 0:
            raise ConfigError(f"theta must be >= 0, got {self.theta}")
        i0, j0 = self.initial_state
        if not space.contains(i0, j0):
            raise ConfigError(f"initial_state {self.initial_state} outside the state space")
        if self.mode is Mode.HETEROGENEOUS and self.tagged_node is None:
            raise ConfigError("heterogeneous mode requires tagged_node")

    @cached_property
    def space(self) -> StateSpace:
        return StateSpace(self.N, self.c)


RateFunction = Callable[[int, int], float]


def arrival_rate_hom(cfg: ModelConfig, i: int, j: int) -> float:
    """Well-mixed arrival rate alpha * (N - i - j) / N; zero iff everyone is infected."""
    if not cfg.space.contains(i, j):
        raise DomainError(f"state ({i}, {j}) outside the (N={cfg.N}, c={cfg.c}) lattice")
    return cfg.alpha * (cfg.N - i - j) / cfg.N


def arrival_rate_het(cfg: ModelConfig, graph: ContactGraph, i: int, j: int) -> float:
    """Arrival rate seen by the tagged node under degree-dependent contacts.

    External pressure scales the population rate by the tagged node's degree:
    (alpha * d_k / N) * (N - i - j) / N.  Internal pressure sums d_k / N over
    the node's neighbors (d_k^2 / N in full) and is closed over count states
    per ``cfg.closure``.
    """
    if cfg.mode is not Mode.HETEROGENEOUS:
        raise ConfigError("arrival_rate_het requires mode=heterogeneous")
    if graph is None:
        raise ConfigError("heterogeneous mode requires a contact graph")
    if graph.n != cfg.N:
        raise ConfigError(f"graph has {graph.n} nodes but config N={cfg.N}")
    k = cfg.tagged_node
    if k is None or not 0 <= k < graph.n:
        raise ConfigError(f"tagged_node {k} outside 0..{graph.n - 1}")
    if not cfg.space.contains(i, j):
        raise DomainError(f"state ({i}, {j}) outside the (N={cfg.N}, c={cfg.c}) lattice")
    N = cfg.N
    d_k = graph.degree(k)
    external = (cfg.alpha * d_k / N) * (N - i - j) / N
    neighbor_sum = d_k * d_k / N
    if cfg.closure is Closure.MEAN_FIELD:
        neighbor_sum *= (i + j) / N
    return external + neighbor_sum


def rate_function(cfg: ModelConfig, graph: ContactGraph | None = None) -> RateFunction:
    """Bind the configured arrival-rate family to ``(i, j) -> rate``."""
    if cfg.mode is Mode.HOMOGENEOUS:
        return lambda i, j: arrival_rate_hom(cfg, i, j)
    if graph is None:
        raise ConfigError("heterogeneous mode requires a contact graph")
    return lambda i, j: arrival_rate_het(cfg, graph, i, j)
