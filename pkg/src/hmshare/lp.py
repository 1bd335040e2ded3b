"""Standard-form linear program for optimal time sharing.

The problem maximises the common time-averaged spectral efficiency R over
time shares t_1..t_k of k achievable rate vectors: each receiver row forces
sum_j t_j r_ji = R w_i, the last row forces sum_j t_j = 1, and all variables
are non-negative.  Solved with a revised simplex (dense basis inverse,
Dantzig pricing, Bland's rule after a degenerate streak).
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .ratevectors import EnumerationLimits, ModcodIndex, RateVector, \
    best_single_rate, enumerate_all

_PIVOT_TOL = 1e-11
_DEGENERATE_STREAK = 50
_REFACTOR_EVERY = 64


@dataclass
class LpProblem:
    """Equality-form data (a, b, c) plus per-column rate-vector provenance.

    Column j < k carries rate vector j and a time-share variable; the last
    column carries R.  provenance[j] is the RateVector behind column j, None
    for the R column.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    provenance: tuple[RateVector | None, ...]

    @property
    def n_receivers(self) -> int:
        return self.a.shape[0] - 1

    @property
    def n_vectors(self) -> int:
        return self.a.shape[1] - 1


@dataclass
class LpSolution:
    """Solver output: x_opt stacks the time shares and R."""

    x_opt: np.ndarray | None
    objective: float | None
    status: str                 # optimal | infeasible | iteration-limit
    iterations: int
    reduced_cost_max: float = np.nan
    residual: float = np.nan


@dataclass(frozen=True)
class Schedule:
    """Optimal schedule: rate R and the strictly positive time shares."""

    rate: float
    shares: tuple[tuple[float, RateVector], ...]
    covered_ids: tuple[int, ...]
    columns: int
    iterations: int
    solution: LpSolution


def assemble(vectors, n: int, weights=None) -> LpProblem:
    """Assemble the (a, b, c) triple from rate vectors and rate weights.

    Column j holds vector j's rates stacked over the n receiver rows plus a
    closing 1 in the time-budget row; the final column is (-w, 0); b picks
    the time budget; c picks R.
    """
    vectors = list(vectors)
    if not vectors:
        raise ValueError("cannot assemble a problem from zero rate vectors")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or (w <= 0).any():
        raise ValueError("weights must be n positive values")
    k = len(vectors)
    a = np.zeros((n + 1, k + 1))
    for j, v in enumerate(vectors):
        for i, r in v.entries:
            if not 0 <= i < n:
                raise ValueError(f"vector references receiver {i} outside 0..{n - 1}")
            a[i, j] = r
        a[n, j] = 1.0
    a[:n, k] = -w
    b = np.zeros(n + 1)
    b[n] = 1.0
    c = np.zeros(k + 1)
    c[k] = 1.0
    return LpProblem(a, b, c, tuple(vectors) + (None,))


def _equalization_basis(problem: LpProblem) -> list[int] | None:
    """Basis of one single-receiver column per row plus the R column.

    This is the harmonic-equalization feasible point; None when some
    receiver row has no single-receiver column.
    """
    a = problem.a
    n = problem.n_receivers
    cols = a[:n, :problem.n_vectors]
    singles = np.count_nonzero(cols, axis=0) == 1
    candidates = np.where(singles[None, :], cols, 0.0)
    best = np.argmax(candidates, axis=1)
    rows = np.arange(n)
    if (candidates[rows, best] <= 0).any():
        return None
    basis = best.tolist()
    basis.append(a.shape[1] - 1)
    return basis


def _run_simplex(a, b, c, basis, max_iterations, tol, frozen=None):
    """Revised simplex from a feasible basis; returns (basis, status, iters)."""
    m = a.shape[0]
    basis = list(basis)
    b_inv = np.linalg.inv(a[:, basis])
    bland = False
    streak = 0
    iterations = 0
    while iterations < max_iterations:
        y = c[basis] @ b_inv
        d = c - y @ a
        d[basis] = 0.0
        if frozen is not None:
            d[frozen] = -np.inf
        if bland:
            improving = np.nonzero(d > tol)[0]
            if improving.size == 0:
                return basis, "optimal", iterations
            enter = int(improving[0])
        else:
            enter = int(np.argmax(d))
            if d[enter] <= tol:
                return basis, "optimal", iterations
        u = b_inv @ a[:, enter]
        x_b = b_inv @ b
        positive = np.nonzero(u > _PIVOT_TOL)[0]
        if positive.size == 0:
            raise RuntimeError("linear program is unbounded")
        ratios = x_b[positive] / u[positive]
        theta = ratios.min()
        ties = positive[ratios <= theta + 1e-12]
        leave = int(min(ties, key=lambda i: basis[i]))
        if theta < 1e-12:
            streak += 1
            if streak >= _DEGENERATE_STREAK:
                bland = True
        else:
            streak = 0
            bland = False
        basis[leave] = enter
        iterations += 1
        if iterations % _REFACTOR_EVERY == 0:
            b_inv = np.linalg.inv(a[:, basis])
        else:
            piv = u[leave]
            row = b_inv[leave] / piv
            b_inv -= np.outer(u, row)
            b_inv[leave] = row
    return basis, "iteration-limit", iterations


def _phase_one(a, b, max_iterations, tol):
    """Feasible basis via artificial variables; None when infeasible."""
    m, ncols = a.shape
    if (b < 0).any():
        raise ValueError("phase one expects b >= 0")
    a1 = np.hstack([a, np.eye(m)])
    c1 = np.zeros(ncols + m)
    c1[ncols:] = -1.0
    basis = list(range(ncols, ncols + m))
    basis, status, iters = _run_simplex(a1, b, c1, basis, max_iterations, tol)
    if status != "optimal":
        return None, status, iters
    x_b = np.linalg.solve(a1[:, basis], b)
    if c1[basis] @ x_b < -1e-9:
        return None, "infeasible", iters
    # drive remaining zero-level artificials out of the basis where possible
    b_inv = np.linalg.inv(a1[:, basis])
    for pos in range(m):
        if basis[pos] < ncols:
            continue
        row = b_inv[pos] @ a[:, :ncols]
        pivots = np.nonzero(np.abs(row) > _PIVOT_TOL)[0]
        replace = next((int(j) for j in pivots if j not in basis), None)
        if replace is not None:
            basis[pos] = replace
            b_inv = np.linalg.inv(a1[:, basis])
    return basis, "optimal", iters


def solve(problem: LpProblem, *, max_iterations: int = 20_000,
          tol: float = 1e-9) -> LpSolution:
    """Maximise c'x subject to a x = b, x >= 0.

    Starts from the harmonic-equalization basis when single-receiver columns
    cover every row, otherwise runs a phase-one with artificial variables.
    """
    a, b, c = problem.a, problem.b, problem.c
    ncols = a.shape[1]
    basis = _equalization_basis(problem)
    total_iters = 0
    frozen = None
    if basis is None:
        basis, status, it1 = _phase_one(a, b, max_iterations, tol)
        total_iters += it1
        if basis is None:
            return LpSolution(None, None, status, total_iters)
        if any(j >= ncols for j in basis):
            # redundant rows keep zero-level artificials; let phase two run
            # on the extended matrix but never re-enter an artificial
            m = a.shape[0]
            a = np.hstack([a, np.eye(m)])
            c = np.concatenate([c, np.zeros(m)])
            frozen = np.arange(ncols, ncols + m)

    basis, status, iters = _run_simplex(a, b, c, basis, max_iterations, tol,
                                        frozen=frozen)
    total_iters += iters
    if status != "optimal":
        return LpSolution(None, None, status, total_iters)

    x = np.zeros(a.shape[1])
    x[basis] = np.linalg.solve(a[:, basis], b)
    y = c[basis] @ np.linalg.inv(a[:, basis])
    d = c - y @ a
    d[basis] = 0.0
    if frozen is not None:
        d[frozen] = 0.0
    x = x[:ncols]
    residual = float(np.abs(problem.a @ x - problem.b).max())
    return LpSolution(x, float(x[-1]), "optimal", total_iters,
                      reduced_cost_max=float(d.max()), residual=residual)


def optimal_schedule(receivers, table, limits: EnumerationLimits | None = None,
                     weights=None) -> Schedule:
    """Best common rate via enumerate -> assemble -> solve.

    weights align with the receivers argument.  Receivers that decode
    nothing are excluded before assembly; returned shares carry provenance
    in the original receiver ids.
    """
    original = list(receivers)
    weight_by_id = None
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(original),):
            raise ValueError("weights must align with the receivers argument")
        weight_by_id = {rx.id: w for rx, w in zip(original, weights)}

    index = ModcodIndex(table)
    coverable = [rx for rx in sorted(original, key=lambda rx: rx.id)
                 if best_single_rate(rx, table, index) is not None]
    if not coverable:
        raise ValueError("empty beam: no receiver decodes any modcod")
    id_to_row = {rx.id: row for row, rx in enumerate(coverable)}
    row_to_id = {row: rx.id for row, rx in enumerate(coverable)}
    relabeled = [dataclasses.replace(rx, id=id_to_row[rx.id]) for rx in coverable]
    vectors = enumerate_all(relabeled, table, limits)

    w = None
    if weight_by_id is not None:
        w = np.array([weight_by_id[rx.id] for rx in coverable])
    problem = assemble(vectors, len(coverable), w)
    solution = solve(problem)
    if solution.status != "optimal":
        raise RuntimeError(f"LP solve failed: {solution.status}")

    shares = []
    for j, t in enumerate(solution.x_opt[:-1]):
        if t > 1e-9:
            v = problem.provenance[j]
            restored = RateVector(
                tuple((row_to_id[i], r) for i, r in v.entries),
                tuple((row_to_id[i], key) for i, key in v.provenance))
            shares.append((float(t), restored))
    return Schedule(rate=solution.objective, shares=tuple(shares),
                    covered_ids=tuple(rx.id for rx in coverable),
                    columns=problem.n_vectors,
                    iterations=solution.iterations, solution=solution)


def dump_problem(problem: LpProblem, stream) -> None:
    """Write (a, b, c) as plain text columns for external cross-checking.

    Format: a header line `lp rows R cols C`, one `b` and one `c` line, then
    one `col j` line per column listing row:value pairs of non-zeros and the
    provenance key list.
    """
    rows, cols = problem.a.shape
    stream.write(f"lp rows {rows} cols {cols}\n")
    stream.write("b " + " ".join(f"{v:.17g}" for v in problem.b) + "\n")
    stream.write("c " + " ".join(f"{v:.17g}" for v in problem.c) + "\n")
    for j in range(cols):
        nz = [f"{i}:{problem.a[i, j]:.17g}" for i in range(rows)
              if problem.a[i, j] != 0.0]
        v = problem.provenance[j]
        prov = "R" if v is None else ";".join(f"{i}={key}" for i, key in v.provenance)
        stream.write(f"col {j} " + " ".join(nz) + f" # {prov}\n")
