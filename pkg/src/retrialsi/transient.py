"""Time-domain solvers independent of the Laplace route: uniformization and simulation.

Uniformization expresses P(t) = P(0) exp(Q t) as a Poisson mixture of powers of
the stochastic matrix U = I + Q / Lambda, truncated with an explicit total
variation bound.  It serves as the oracle the inverse-transform solver is
checked against.  Gillespie sampling provides a third, statistical route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.special import gammaln

from .errors import DomainError
from .generator import GeneratorMatrix
from .model import ModelConfig, RateFunction, State, StateSpace

RNG_ALGORITHM = "pcg64"  # numpy default_rng bit generator


class Provenance(str, Enum):
    ILT = "ilt"
    UNIFORMIZATION = "uniformization"
    MONTE_CARLO = "monte_carlo"
    STATIONARY = "stationary"


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Distribution over the state space at one time point."""

    values: np.ndarray
    t: float
    provenance: Provenance
    space: StateSpace | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise DomainError(f"probability vector must be 1-d, got shape {v.shape}")
        if self.space is not None and v.size != self.space.size:
            raise DomainError(
                f"vector length {v.size} does not match state space size {self.space.size}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def as_grid(self) -> np.ndarray:
        """Values reshaped to (c + 1, N - c + 1); needs an attached space."""
        if self.space is None:
            raise DomainError("no state space attached to this vector")
        return self.values.reshape(self.space.c + 1, self.space.width)

    def clipped(self) -> "ProbabilityVector":
        """Strictly nonnegative copy, renormalized to total one.

        Inverse-transform vectors may carry small negative excursions; this
        zeroes them for consumers that need a proper distribution.  Note the
        zeroing can bias moments by more than the excursions themselves.
        """
        values = np.clip(self.values, 0.0, 1.0)
        return ProbabilityVector(values / values.sum(), self.t, self.provenance, self.space)


def delta_vector(space: StateSpace, state: State,
                 provenance: Provenance = Provenance.UNIFORMIZATION) -> ProbabilityVector:
    """Point mass at ``state`` at time 0."""
    values = np.zeros(space.size)
    values[space.index(*state)] = 1.0
    return ProbabilityVector(values, 0.0, provenance, space)


@dataclass(frozen=True, eq=False)
class TransientSolution:
    """One probability vector per grid time, plus solver metadata."""

    times: np.ndarray
    vectors: list[ProbabilityVector]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size != len(self.vectors):
            raise DomainError("times and vectors must align one to one")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise DomainError("time grid must be strictly increasing")
        sizes = {v.values.size for v in self.vectors}
        if len(sizes) > 1:
            raise DomainError("all vectors must live on the same state space")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return len(self.vectors)

    def at(self, t: float) -> ProbabilityVector:
        hits = np.nonzero(np.isclose(self.times, t))[0]
        if hits.size != 1:
            raise DomainError(f"time {t} not on the solution grid")
        return self.vectors[int(hits[0])]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One sampled path: state after each event, starting state included."""

    times: np.ndarray
    states: np.ndarray  # shape (n_events + 1, 2)
    horizon: float
    seed: int
    rng: str = RNG_ALGORITHM

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=int)
        if t.size and not np.all(np.diff(t) > 0):
            raise DomainError("event times must be strictly increasing")
        if s.shape != (t.size, 2):
            raise DomainError("states must align with event times")
        t.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    def __len__(self) -> int:
        return self.times.size

    def write_csv(self, fileobj) -> None:
        fileobj.write("time,i,j\n")
        for t, (i, j) in zip(self.times.tolist(), self.states.tolist()):
            fileobj.write(f"{t!r},{i},{j}\n")


def _poisson_weights(q: float, eps: float) -> np.ndarray:
    """Poisson(q) pmf on 0..n*, n* chosen so the truncated tail is < eps.

    Computed in log space, then renormalized so the truncation mass is
    redistributed proportionally.
    """
    if q == 0.0:
        return np.ones(1)
    # generous upper bound for the support scan
    hi = int(np.ceil(q + 12.0 * np.sqrt(q) + 60.0))
    n = np.arange(hi + 1)
    logw = -q + n * np.log(q) - gammaln(n + 1)
    w = np.exp(logw)
    cum = np.cumsum(w)
    cut = int(np.searchsorted(cum, 1.0 - eps))
    cut = min(cut, hi)
    w = w[: cut + 1]
    return w / w.sum()


def uniformize(gen: GeneratorMatrix, p0: ProbabilityVector, t: float,
               eps: float = 1e-10) -> ProbabilityVector:
    """Propagate ``p0`` for a duration ``t``; total variation error below ``eps``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if not 0 < eps <= 1e-6:
        raise DomainError(f"eps must lie in (0, 1e-6], got {eps}")
    v = np.array(p0.values, dtype=float)
    out_t = p0.t + t
    lam = float(gen.exit_rates().max())
    if t == 0.0 or lam == 0.0:
        return ProbabilityVector(v, out_t, Provenance.UNIFORMIZATION, p0.space or gen.space)

    weights = _poisson_weights(lam * t, eps)
    U = (sparse.eye(gen.dim, format="csr") + gen.matrix / lam).tocsr()
    acc = weights[0] * v
    for w in weights[1:]:
        v = v @ U
        acc += w * v
    return ProbabilityVector(acc, out_t, Provenance.UNIFORMIZATION, p0.space or gen.space)


def transient_grid(gen: GeneratorMatrix, p0: ProbabilityVector, times,
                   eps: float = 1e-10) -> TransientSolution:
    """Evaluate the distribution on a time grid, propagating step by step.

    Cost scales with the largest time, not with grid size times horizon.
    """
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("times must be a nonempty 1-d sequence")
    if np.any(grid < 0):
        raise DomainError("times must be nonnegative")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise DomainError("times must be strictly increasing")

    vectors = []
    current = p0
    prev_t = 0.0
    for t in grid:
        current = uniformize(gen, current, float(t) - prev_t, eps)
        vectors.append(current)
        prev_t = float(t)
    meta = {"method": "uniformization", "eps": eps}
    return TransientSolution(grid, vectors, meta)


@lru_cache(maxsize=32)
def _transition_table(cfg: ModelConfig, rate_fn: RateFunction):
    """Per-state targets and rates for the four transition families.

    Returns (exit_rate[s], cum_rates[s, 0:4], targets[s, 0:4]) padded with the
    row's total so slot selection never overruns.  Cached per (config, rate
    function) pair; rate functions are pure, so identity caching is sound.
    """
    space = cfg.space
    size = space.size
    targets = np.zeros((size, 4), dtype=np.int64)
    rates = np.zeros((size, 4))
    for i in range(space.c + 1):
        for j in range(space.width):
            src = space.index(i, j)
            moves = []
            lam = rate_fn(i, j)
            if i <= space.c - 1:
                moves.append((space.index(i + 1, j), lam))
            if i >= 1:
                moves.append((space.index(i - 1, j), i * cfg.mu))
            if i <= space.c - 1 and j >= 1:
                moves.append((space.index(i + 1, j - 1), j * cfg.theta))
            if i == space.c and j <= space.N - space.c - 1:
                moves.append((space.index(space.c, j + 1), lam))
            for slot, (dst, rate) in enumerate(moves):
                targets[src, slot] = dst
                rates[src, slot] = rate
    exit_rate = rates.sum(axis=1)
    cum = np.cumsum(rates, axis=1)
    return exit_rate, cum, targets


def simulate_gillespie(cfg: ModelConfig, rate_fn: RateFunction, horizon: float,
                       seed: int) -> Trajectory:
    """Sample one exact jump path of the chain up to ``horizon``.

    Random draws are consumed from fixed-size buffers (one unit-exponential
    and one uniform per event, in event order), so a seed pins the path.
    """
    if horizon <= 0:
        raise DomainError(f"horizon must be > 0, got {horizon}")
    space = cfg.space
    exit_rate, cum, targets = _transition_table(cfg, rate_fn)
    # plain-Python tables keep the event loop cheap
    totals = exit_rate.tolist()
    cum_rows = [row.tolist() for row in cum]
    target_rows = [row.tolist() for row in targets]
    rng = np.random.default_rng(seed)

    chunk = 256
    exp_buf = rng.standard_exponential(chunk)
    uni_buf = rng.random(chunk)
    pos = 0

    state = space.index(*cfg.initial_state)
    t = 0.0
    times = [0.0]
    path = [state]
    while True:
        total = totals[state]
        if total == 0.0:
            break  # absorbing; path simply ends at the horizon
        if pos == chunk:
            exp_buf = rng.standard_exponential(chunk)
            uni_buf = rng.random(chunk)
            pos = 0
        t += exp_buf[pos] / total
        if t > horizon:
            break
        u = uni_buf[pos] * total
        pos += 1
        row = cum_rows[state]
        slot = 0
        while row[slot] <= u and slot < 3:
            slot += 1
        state = target_rows[state][slot]
        times.append(t)
        path.append(state)
    states = np.stack(divmod(np.asarray(path), space.width), axis=1)
    return Trajectory(np.array(times), states, horizon, seed)


@dataclass(frozen=True, eq=False)
class MonteCarloResult:
    """Empirical transient distribution plus per-entry binomial standard errors."""

    solution: TransientSolution
    standard_errors: list[np.ndarray]


def monte_carlo_estimate(cfg: ModelConfig, rate_fn: RateFunction, times,
                         replicas: int, seed: int) -> MonteCarloResult:
    """Estimate the state distribution at each grid time from ``replicas`` paths.

    All replicas advance in lockstep; at each requested time the residual
    holding time is resampled, which is distribution-exact because holding
    times are exponential.  Deterministic for a fixed seed.
    """
    if replicas < 1000:
        raise DomainError(f"replicas must be >= 1000, got {replicas}")
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("times must be a nonempty 1-d sequence")
    if np.any(grid < 0):
        raise DomainError("times must be nonnegative")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise DomainError("times must be strictly increasing")

    space = cfg.space
    exit_rate, cum, targets = _transition_table(cfg, rate_fn)
    rng = np.random.default_rng(seed)

    state = np.full(replicas, space.index(*cfg.initial_state), dtype=np.int64)
    clock = np.zeros(replicas)
    vectors = []
    errors = []
    for t_q in grid:
        while True:
            live = clock < t_q
            if not live.any():
                break
            idx = np.nonzero(live)[0]
            lam = exit_rate[state[idx]]
            stuck = lam == 0.0
            if stuck.any():
                clock[idx[stuck]] = t_q
                idx = idx[~stuck]
                if idx.size == 0:
                    continue
                lam = lam[~stuck]
            dt = rng.exponential(1.0, size=idx.size) / lam
            t_new = clock[idx] + dt
            past = t_new >= t_q
            clock[idx[past]] = t_q
            movers = idx[~past]
            if movers.size:
                clock[movers] = t_new[~past]
                u = rng.uniform(0.0, exit_rate[state[movers]])
                rows = cum[state[movers]]
                slots = (rows < u[:, None]).sum(axis=1)
                state[movers] = targets[state[movers], np.minimum(slots, 3)]
        counts = np.bincount(state, minlength=space.size).astype(float)
        phat = counts / replicas
        vectors.append(ProbabilityVector(phat, float(t_q), Provenance.MONTE_CARLO, space))
        errors.append(np.sqrt(phat * (1.0 - phat) / replicas))
    meta = {
        "method": "monte_carlo",
        "replicas": replicas,
        "seed": seed,
        "rng": RNG_ALGORITHM,
        "stepping": "lockstep with memoryless resampling at grid times",
    }
    return MonteCarloResult(TransientSolution(grid, vectors, meta), errors)
