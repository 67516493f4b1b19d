"""Sparse infinitesimal generator of the retrial-SI chain.

Four transition families leave a state (i, j):

    (i, j) -> (i + 1, j)      arrival straight to a unit   rate lambda(i, j), i <= c - 1
    (i, j) -> (i - 1, j)      recovery completes           rate i * mu,       i >= 1
    (i, j) -> (i + 1, j - 1)  successful retrial           rate j * theta,    i <= c - 1, j >= 1
    (c, j) -> (c, j + 1)      arrival joins the orbit      rate lambda(c, j), j <= N - c - 1

The diagonal carries minus the row's total exit rate, so every row sums to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import DomainError, ModelError
from .model import ModelConfig, RateFunction, StateSpace

DENSE_LIMIT = 10_000


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Generator Q in CSR form, optionally tied to its state space."""

    matrix: sparse.csr_matrix
    space: StateSpace | None = None

    def __post_init__(self):
        m = sparse.csr_matrix(self.matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise ModelError(f"generator must be square, got shape {m.shape}")
        if self.space is not None and self.space.size != m.shape[0]:
            raise ModelError(
                f"generator dimension {m.shape[0]} does not match state space size {self.space.size}"
            )
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_dense(cls, array, space: StateSpace | None = None) -> "GeneratorMatrix":
        """Wrap an explicit (typically hand-built or test) matrix."""
        return cls(sparse.csr_matrix(np.asarray(array, dtype=float)), space)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        if self.dim > DENSE_LIMIT:
            raise ModelError(f"refusing dense conversion for dimension {self.dim} > {DENSE_LIMIT}")
        return self.matrix.toarray()

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def exit_rates(self) -> np.ndarray:
        """Total exit rate per state (= minus the diagonal)."""
        return -self.matrix.diagonal()

    def triplets(self):
        """(rows, cols, rates) of all stored entries, diagonal included."""
        coo = self.matrix.tocoo()
        return coo.row, coo.col, coo.data

    def write_triplets(self, fileobj) -> None:
        """Dump the matrix as ``row,col,rate`` CSV lines for external inspection."""
        fileobj.write("row,col,rate\n")
        rows, cols, vals = self.triplets()
        for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
            fileobj.write(f"{r},{c},{v!r}\n")


def build_generator(cfg: ModelConfig, rate_fn: RateFunction) -> GeneratorMatrix:
    """Assemble Q over the linear state ordering from the four transition families."""
    space = cfg.space
    width = space.width
    rows, cols, vals = [], [], []

    def push(src, dst, rate):
        rows.append(src)
        cols.append(dst)
        vals.append(rate)

    for i in range(space.c + 1):
        for j in range(width):
            src = space.index(i, j)
            lam = rate_fn(i, j)
            if lam < 0:
                raise ModelError(f"rate function returned {lam} < 0 at state ({i}, {j})")
            if i <= space.c - 1:
                push(src, space.index(i + 1, j), lam)
            if i >= 1:
                push(src, space.index(i - 1, j), i * cfg.mu)
            if i <= space.c - 1 and j >= 1:
                push(src, space.index(i + 1, j - 1), j * cfg.theta)
            if i == space.c and j <= space.N - space.c - 1:
                push(src, space.index(space.c, j + 1), lam)

    off = sparse.coo_matrix((vals, (rows, cols)), shape=(space.size, space.size)).tocsr()
    diag = sparse.diags(-np.asarray(off.sum(axis=1)).ravel())
    return GeneratorMatrix((off + diag).tocsr(), space)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks on a generator matrix."""

    max_abs_row_sum: float
    row_sum_violations: tuple[int, ...]
    negative_off_diagonal: tuple[tuple[int, int], ...]
    off_stencil: tuple[tuple[int, int], ...]
    stencil_checked: bool
    tolerance: float

    @property
    def ok(self) -> bool:
        return (
            not self.row_sum_violations
            and not self.negative_off_diagonal
            and not self.off_stencil
        )

    def summary(self) -> str:
        status = "pass" if self.ok else "FAIL"
        parts = [f"{status}: max |row sum| = {self.max_abs_row_sum:.3e}"]
        if self.row_sum_violations:
            parts.append(f"row sums off in rows {list(self.row_sum_violations)}")
        if self.negative_off_diagonal:
            parts.append(f"negative off-diagonal at {list(self.negative_off_diagonal)}")
        if self.off_stencil:
            parts.append(f"off-stencil transition at {list(self.off_stencil)}")
        return "; ".join(parts)


def _on_stencil(space: StateSpace, src: int, dst: int) -> bool:
    i, j = space.state_at(src)
    x, y = space.state_at(dst)
    if (x, y) == (i + 1, j) and i <= space.c - 1:
        return True
    if (x, y) == (i - 1, j) and i >= 1:
        return True
    if (x, y) == (i + 1, j - 1) and i <= space.c - 1 and j >= 1:
        return True
    if i == space.c and (x, y) == (space.c, j + 1) and j <= space.N - space.c - 1:
        return True
    return False


def validate_generator(gen: GeneratorMatrix, tol: float = 1e-12) -> ValidationReport:
    """Check zero row sums, nonnegative off-diagonal, and the transition stencil.

    Reports rather than raises, so it can run on deliberately broken input.
    The stencil check needs a state space; it is skipped (and flagged) without one.
    """
    sums = gen.row_sums()
    bad_rows = tuple(np.nonzero(np.abs(sums) > tol)[0].tolist())

    rows, cols, vals = gen.triplets()
    neg = tuple(
        (int(r), int(c))
        for r, c, v in zip(rows, cols, vals)
        if r != c and v < 0
    )

    off_stencil: tuple[tuple[int, int], ...] = ()
    checked = gen.space is not None
    if checked:
        off_stencil = tuple(
            (int(r), int(c))
            for r, c, v in zip(rows, cols, vals)
            if r != c and v != 0 and not _on_stencil(gen.space, int(r), int(c))
        )

    return ValidationReport(
        max_abs_row_sum=float(np.abs(sums).max()) if sums.size else 0.0,
        row_sum_violations=bad_rows,
        negative_off_diagonal=neg,
        off_stencil=off_stencil,
        stencil_checked=checked,
        tolerance=tol,
    )
