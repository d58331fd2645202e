"""Self-contained simplex LP solver with float and exact-rational modes.

Two entry points:

* :func:`solve` minimizes a linear objective over arbitrary >= / == rows
  (free variables) using a lifted two-phase tableau.
* :func:`solve_decoding_lp` minimizes a cost vector over a
  :class:`~pseudopoly.polytope.RelaxedPolytope`, optionally with one
  constraint forced to equality. Internally it runs the primal simplex on
  the dual program (the polytope has many more rows than columns), starting
  from the always-feasible basis of sign-matched box multipliers, with
  forbidden-set constraints activated only as they are separated, and reads
  the primal vertex off the optimal dual basis.

Every pivot sequence is deterministic. :func:`solve` uses Bland's rule
(smallest eligible entering index; ratio ties break toward the smallest
basic column), which also guarantees termination. The decoding path uses
the most-negative-reduced-cost rule for speed and engages Bland's rule
whenever the objective stalls, so the cycling guarantee is preserved on
these highly degenerate programs.

Exact mode works over `fractions.Fraction`. Non-rational inputs are
quantized to denominator 2^20 first, so exact runs are well defined. For
decoding programs the exact path reuses the float run's optimal basis: the
vertex is re-solved exactly, feasibility and reduced-cost optimality are
audited exactly, and only on an audit failure does a full exact simplex run
from the crash basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Union

import numpy as np

from .polytope import RelaxedPolytope

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
QUANT_DENOMINATOR = 1 << 20
REINVERT_EVERY = 128

GE = ">="
EQ = "=="


class SolverError(RuntimeError):
    """Internal solver failure (numerical breakdown, contract violation)."""


class IterationLimitError(SolverError):
    """Pivot cap exceeded; reported distinctly from infeasible/unbounded."""


class RestrictionInfeasibleError(SolverError):
    """A facet-restricted decoding program turned out empty."""


@dataclass
class LinearProgram:
    """min objective . x  subject to  lhs x (>= | ==) rhs, x free."""

    objective: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    senses: tuple[str, ...]

    def __init__(self, objective, lhs, rhs, senses=None):
        self.objective = np.asarray(objective, dtype=np.float64)
        self.lhs = np.atleast_2d(np.asarray(lhs, dtype=np.float64))
        self.rhs = np.asarray(rhs, dtype=np.float64)
        rows = self.lhs.shape[0]
        if senses is None:
            senses = (GE,) * rows
        self.senses = tuple(senses)
        if self.objective.ndim != 1 or self.objective.size < 1:
            raise ValueError("objective must be a nonempty vector")
        if self.lhs.shape != (rows, self.objective.size):
            raise ValueError("constraint matrix shape mismatch")
        if self.rhs.shape != (rows,) or rows < 1:
            raise ValueError("need at least one constraint")
        if len(self.senses) != rows or any(s not in (GE, EQ) for s in self.senses):
            raise ValueError("senses must be '>=' or '=='")
        for arr in (self.objective, self.lhs, self.rhs):
            if not np.all(np.isfinite(arr)):
                raise ValueError("coefficients must be finite")

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_rows(self) -> int:
        return self.lhs.shape[0]


@dataclass
class BasicSolution:
    """Solver result. For ``status == "optimal"`` the point satisfies every
    constraint and ``basis`` lists tight, linearly independent constraint
    indices (size n when the feasible region has vertices). For decoding
    programs ``activated`` records which forbidden-set constraints entered
    the working system; restricted re-solves can seed from it."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[Union[np.ndarray, list]]
    objective: Optional[Union[float, Fraction]]
    basis: tuple[int, ...] = ()
    iterations: int = 0
    activated: tuple[int, ...] = ()


def _as_fraction(v) -> Fraction:
    if isinstance(v, Rational):
        return Fraction(v)
    f = float(v)
    if not math.isfinite(f):
        raise ValueError("cannot rationalize a non-finite value")
    return Fraction(round(f * QUANT_DENOMINATOR), QUANT_DENOMINATOR)


# ---------------------------------------------------------------------------
# core tableau loop (shared by float and exact modes via dtype)


STALL_LIMIT = 25


def _pivot_loop(body, rhs, red, basic, allowed, max_iter, exact,
                m_full=None, rhs_full=None, cost_full=None, rule="bland"):
    """Simplex pivoting on a (rows x cols) tableau until optimal/unbounded.

    ``body`` is B^-1 M, ``rhs`` is B^-1 b >= 0, ``red`` the reduced costs.
    ``rule`` selects the entering column: "bland" (smallest eligible index)
    or "hybrid" (most negative reduced cost, with Bland engaged while the
    objective stalls, which preserves both determinism and termination).
    Float tableaus are periodically refactorized from ``m_full`` to contain
    drift. Returns ("optimal", iters) or ("unbounded", column, iters).
    """
    tol = Fraction(0) if exact else PIVOT_TOL
    iters = 0
    since_reinvert = 0
    rows = body.shape[0]
    stalled = 0
    prev_obj = None
    while True:
        eligible = np.nonzero(allowed & (red < -tol))[0]
        if eligible.size == 0:
            return ("optimal", iters)
        if rule == "hybrid" and stalled < STALL_LIMIT:
            j = int(eligible[np.argmin(red[eligible])])
        else:
            j = int(eligible[0])
        if rule == "hybrid" and cost_full is not None:
            obj = float(cost_full[basic] @ rhs)
            if prev_obj is not None and obj < prev_obj - 1e-12 * (1.0 + abs(prev_obj)):
                stalled = 0
            elif prev_obj is not None:
                stalled += 1
            prev_obj = obj
        col = body[:, j]
        if exact:
            pos = [r for r in range(rows) if col[r] > 0]
        else:
            pos = np.nonzero(col > PIVOT_TOL)[0]
        if len(pos) == 0:
            return ("unbounded", j, iters)
        if exact:
            best = None
            for r in pos:
                ratio = rhs[r] / col[r]
                key = (ratio, basic[r])
                if best is None or key < best[0]:
                    best = (key, r)
            leave = best[1]
        else:
            ratios = rhs[pos] / col[pos]
            rmin = float(ratios.min())
            cutoff = rmin + PIVOT_TOL * (1.0 + abs(rmin))
            tied = [int(r) for r, ra in zip(pos, ratios) if ra <= cutoff]
            leave = min(tied, key=lambda r: basic[r])
        piv = body[leave, j]
        body[leave] = body[leave] / piv
        rhs[leave] = rhs[leave] / piv
        colvals = body[:, j].copy()
        colvals[leave] = 0 if exact else 0.0
        body -= np.outer(colvals, body[leave])
        rhs -= colvals * rhs[leave]
        red -= red[j] * body[leave]
        # pin the pivot column exactly
        body[:, j] = 0 if exact else 0.0
        body[leave, j] = 1 if exact else 1.0
        red[j] = 0 if exact else 0.0
        basic[leave] = j
        iters += 1
        since_reinvert += 1
        if not exact:
            np.clip(rhs, 0.0, None, out=rhs)
            if since_reinvert >= REINVERT_EVERY and m_full is not None:
                try:
                    B = m_full[:, basic]
                    inv = np.linalg.inv(B)
                    body[:] = inv @ m_full
                    rhs[:] = inv @ rhs_full
                    np.clip(rhs, 0.0, None, out=rhs)
                    red[:] = cost_full - cost_full[basic] @ body
                    red[np.asarray(basic)] = 0.0
                except np.linalg.LinAlgError:
                    pass
                since_reinvert = 0
        if iters > max_iter:
            raise IterationLimitError(f"pivot cap {max_iter} exceeded")


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def _solve_fraction_system(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve a square system exactly by Gaussian elimination over Fractions."""
    n = len(rhs)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[r])] for r, row in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise SolverError("singular basis system")
        if piv != c:
            aug[c], aug[piv] = aug[piv], aug[c]
        pivval = aug[c][c]
        if pivval != 1:
            aug[c] = [v / pivval for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                factor = aug[r][c]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[c])]
    return [aug[r][n] for r in range(n)]


def _fraction_rank(rows: list[list[Fraction]]) -> int:
    if not rows:
        return 0
    work = [list(r) for r in rows]
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(work)) if work[r][c] != 0), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        pr = work[rank]
        for r in range(len(work)):
            if r != rank and work[r][c] != 0:
                f = work[r][c] / pr[c]
                work[r] = [a - f * b for a, b in zip(work[r], pr)]
        rank += 1
        if rank == len(work):
            break
    return rank


def _dense_constraint_row(P: RelaxedPolytope, idx: int) -> list[int]:
    c = P.constraints[idx]
    row = [0] * P.n
    for i, co in zip(c.cols, c.coeffs):
        row[i] = co
    return row


def certify_vertex(P: RelaxedPolytope, basis: Sequence[int]) -> list[Fraction]:
    """Exactly re-solve a claimed vertex from its n-constraint basis.

    Solves A_B x = b_B over the rationals and verifies feasibility of every
    polytope constraint; the result is a certified vertex of P.
    """
    basis = list(basis)
    if len(basis) != P.n:
        raise SolverError(f"basis must have {P.n} constraints, got {len(basis)}")
    # substitute pinned coordinates from box rows, then solve the rest densely
    pinned: dict[int, Fraction] = {}
    others: list[int] = []
    for idx in basis:
        c = P.constraints[idx]
        if c.kind == "box_lower":
            pinned[c.bit] = Fraction(0)
        elif c.kind == "box_upper":
            pinned[c.bit] = Fraction(1)
        else:
            others.append(idx)
    free = [i for i in range(P.n) if i not in pinned]
    if len(free) != len(others):
        raise SolverError("degenerate basis: pinned/free mismatch")
    if free:
        rows = []
        rhs = []
        for idx in others:
            c = P.constraints[idx]
            row = dict(zip(c.cols, c.coeffs))
            rows.append([Fraction(row.get(i, 0)) for i in free])
            rhs.append(Fraction(c.rhs) - sum(
                Fraction(co) * pinned[i] for i, co in zip(c.cols, c.coeffs) if i in pinned
            ))
        sol = _solve_fraction_system(rows, rhs)
        for i, v in zip(free, sol):
            pinned[i] = v
    x = [pinned[i] for i in range(P.n)]
    for c in P.constraints:
        if c.evaluate(x) < c.rhs:
            raise SolverError(f"basis re-solve violates {c.label()}")
    return x


def _audit_optimality(
    P: RelaxedPolytope,
    basis: Sequence[int],
    llr_q: Sequence[Fraction],
    fixed_facet: Optional[int],
) -> bool:
    """Exact reduced-cost check: the cost vector must be a nonnegative
    combination of the basis constraint normals (the fixed facet's multiplier
    is sign-free)."""
    rows = [_dense_constraint_row(P, idx) for idx in basis]
    cols = [[Fraction(rows[r][i]) for r in range(len(basis))] for i in range(P.n)]
    try:
        y = _solve_fraction_system(cols, list(llr_q))
    except SolverError:
        return False
    for idx, mult in zip(basis, y):
        if idx != fixed_facet and mult < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# decoding LP: primal simplex on the dual, crash basis of box multipliers,
# forbidden-set constraints activated as violated (cut generation)

SEPARATION_TOL = 1e-9


def _most_violated_forbidden(P, x):
    """Per check, the forbidden inequality minimizing the left-hand side at
    x (the classic greedy parity fix); returns the constraint indices whose
    minimum falls below 1, i.e. the violated cuts."""
    cuts = []
    for j, row in enumerate(P.H.rows):
        value = 0.0
        mask = 0
        best_flip = None
        for p, i in enumerate(row):
            xi = x[i]
            if xi > 0.5:
                mask |= 1 << p
                value += 1.0 - xi
            else:
                value += xi
            gap = abs(2.0 * xi - 1.0)
            if best_flip is None or gap < best_flip[0]:
                best_flip = (gap, p)
        if mask.bit_count() % 2 == 0:
            value += best_flip[0]
            mask ^= 1 << best_flip[1]
        if value < 1.0 - SEPARATION_TOL:
            cuts.append(P.forbidden_index(j, mask))
    return cuts


def _decode_float(P, llr, fixed_facet, max_iterations, seed_cuts=(), warm_basis=None):
    n = P.n
    nc = len(P.constraints)
    if fixed_facet is not None and not 0 <= fixed_facet < nc:
        raise KeyError(f"unknown constraint index {fixed_facet}")
    llr = np.asarray(llr, dtype=np.float64)

    # active dual columns: (constraint id, sign); sign -1 is the negated
    # copy that frees the fixed facet's multiplier
    col_ids = list(range(P.num_forbidden, nc))
    col_signs = [1.0] * len(col_ids)
    active = set(col_ids)
    for cid in seed_cuts:
        if cid not in active:
            col_ids.append(int(cid))
            col_signs.append(1.0)
            active.add(int(cid))
    if warm_basis is not None:
        for cid in warm_basis:
            if cid not in active:
                col_ids.append(int(cid))
                col_signs.append(1.0)
                active.add(int(cid))
    if fixed_facet is not None:
        if fixed_facet not in active:
            col_ids.append(fixed_facet)
            col_signs.append(1.0)
            active.add(fixed_facet)
        col_ids.append(fixed_facet)
        col_signs.append(-1.0)

    def build_cols(ids, signs):
        cols = P.A[ids].T * np.asarray(signs)
        cost = -P.b[np.asarray(ids)] * np.asarray(signs)
        return np.ascontiguousarray(cols), cost

    M, cost = build_cols(col_ids, col_signs)
    pos_of = {cid: k for k, cid in enumerate(col_ids) if col_signs[k] > 0}
    basic = None
    if warm_basis is not None and len(set(warm_basis)) == n:
        try:
            cand = [pos_of[cid] for cid in warm_basis]
            B = M[:, cand]
            inv = np.linalg.inv(B)
            rhs = inv @ llr
            if rhs.min() >= -1e-9:
                basic = cand
                body = inv @ M
                np.clip(rhs, 0.0, None, out=rhs)
        except (KeyError, np.linalg.LinAlgError):
            basic = None
    if basic is None:
        signs = np.where(llr >= 0, 1.0, -1.0)
        basic = [
            pos_of[P.box_lower_index(i)] if llr[i] >= 0 else pos_of[P.box_upper_index(i)]
            for i in range(n)
        ]
        body = signs[:, None] * M
        rhs = signs * llr
    red = cost - cost[basic] @ body
    red[np.array(basic)] = 0.0
    cap = max_iterations if max_iterations is not None else 50 * (n + nc)
    total_iters = 0
    while True:
        allowed = np.ones(M.shape[1], dtype=bool)
        result = _pivot_loop(
            body, rhs, red, basic, allowed, cap - total_iters, exact=False,
            m_full=M, rhs_full=llr, cost_full=cost, rule="hybrid",
        )
        if result[0] == "unbounded":
            if fixed_facet is None:
                raise SolverError(
                    "decoding program reported unbounded dual; P should be nonempty"
                )
            raise RestrictionInfeasibleError(
                f"restriction to constraint {fixed_facet} is infeasible"
            )
        total_iters += result[1]
        basis_ids = [col_ids[c] for c in basic]
        try:
            x = np.linalg.solve(P.A[basis_ids], P.b[basis_ids])
        except np.linalg.LinAlgError:
            raise SolverError("singular basis system in decode recovery")
        cuts = [c for c in _most_violated_forbidden(P, x) if c not in active]
        if not cuts:
            break
        B = M[:, basic]
        new_cols = P.A[cuts].T
        new_body = np.linalg.solve(B, new_cols)
        new_cost = -P.b[cuts]
        new_red = new_cost - cost[basic] @ new_body
        M = np.hstack([M, new_cols])
        cost = np.concatenate([cost, new_cost])
        body = np.hstack([body, new_body])
        red = np.concatenate([red, new_red])
        col_ids.extend(cuts)
        col_signs.extend([1.0] * len(cuts))
        active.update(cuts)

    basis_ids = sorted(basis_ids)
    x = np.linalg.solve(P.A[basis_ids], P.b[basis_ids])
    slack = P.A @ x - P.b
    if slack.min() < -FEAS_TOL:
        raise SolverError(f"recovered point infeasible by {-slack.min():.3g}")
    if fixed_facet is not None and abs(slack[fixed_facet]) > FEAS_TOL:
        raise SolverError("fixed facet not tight at recovered point")
    return BasicSolution(
        status="optimal",
        x=x,
        objective=float(llr @ x),
        basis=tuple(basis_ids),
        iterations=total_iters,
        activated=tuple(cid for cid in col_ids if cid < P.num_forbidden),
    )


def _decode_exact_full(P, llr_q, fixed_facet, max_iterations):
    """Full exact simplex on the dual, crash-started; tiny scale only."""
    n = P.n
    nc = len(P.constraints)
    ncols = nc + (1 if fixed_facet is not None else 0)
    col_ids = list(range(nc)) + ([fixed_facet] if fixed_facet is not None else [])
    zero = Fraction(0)

    def column(c: int) -> list[Fraction]:
        cons = P.constraints[col_ids[c]]
        col = [zero] * n
        sign = -1 if c >= nc else 1
        for i, co in zip(cons.cols, cons.coeffs):
            col[i] = Fraction(sign * co)
        return col

    M = np.empty((n, ncols), dtype=object)
    cost = np.empty(ncols, dtype=object)
    for c in range(ncols):
        col = column(c)
        for r in range(n):
            M[r, c] = col[r]
        cost[c] = Fraction((1 if c >= nc else -1) * P.constraints[col_ids[c]].rhs)
    basic = [
        P.box_lower_index(i) if llr_q[i] >= 0 else P.box_upper_index(i)
        for i in range(n)
    ]
    signs = [1 if llr_q[i] >= 0 else -1 for i in range(n)]
    body = np.empty_like(M)
    for r in range(n):
        for c in range(ncols):
            body[r, c] = signs[r] * M[r, c]
    rhs = np.array([signs[i] * llr_q[i] for i in range(n)], dtype=object)
    costB = np.array([cost[b] for b in basic], dtype=object)
    red = cost - costB @ body
    for b in basic:
        red[b] = zero
    allowed = np.ones(ncols, dtype=bool)
    cap = max_iterations if max_iterations is not None else 50 * (n + nc)
    result = _pivot_loop(body, rhs, red, basic, allowed, cap, exact=True)
    if result[0] == "unbounded":
        if fixed_facet is None:
            raise SolverError("decoding program reported unbounded dual; P should be nonempty")
        raise RestrictionInfeasibleError(
            f"restriction to constraint {fixed_facet} is infeasible"
        )
    basis_ids = sorted(col_ids[c] for c in basic)
    return basis_ids, result[1]


def solve_decoding_lp(
    P: RelaxedPolytope,
    llr: Sequence,
    fixed_facet: Optional[int] = None,
    mode: str = "float",
    max_iterations: Optional[int] = None,
    seed_cuts: Sequence[int] = (),
    warm_basis: Optional[Sequence[int]] = None,
) -> BasicSolution:
    """Minimize llr . f over P (or over P with one constraint tightened).

    Always returns a vertex: the ``basis`` of the solution lists the n tight
    constraints that define it. Exact mode returns Fraction coordinates for
    the cost vector quantized at denominator 2^20. ``seed_cuts`` pre-loads
    forbidden constraints into the working system and ``warm_basis`` starts
    pivoting from a known feasible basis (facet-restricted re-solves pass
    the unrestricted optimum); neither affects which optima are reachable.
    """
    if len(llr) != P.n:
        raise ValueError(f"cost vector length {len(llr)} != n = {P.n}")
    if mode == "float":
        return _decode_float(
            P, llr, fixed_facet, max_iterations, seed_cuts=seed_cuts, warm_basis=warm_basis
        )
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")

    llr_q = [_as_fraction(v) for v in llr]
    try:
        float_sol = _decode_float(
            P, [float(v) for v in llr_q], fixed_facet, max_iterations,
            seed_cuts=seed_cuts, warm_basis=warm_basis,
        )
        basis_ids = list(float_sol.basis)
        iters = float_sol.iterations
        x = certify_vertex(P, basis_ids)
        ok = _audit_optimality(P, basis_ids, llr_q, fixed_facet)
        if fixed_facet is not None:
            c = P.constraints[fixed_facet]
            ok = ok and c.evaluate(x) == c.rhs
    except IterationLimitError:
        raise
    except RestrictionInfeasibleError:
        raise
    except (SolverError, np.linalg.LinAlgError):
        ok = False
        iters = 0
    if not ok:
        basis_ids, iters = _decode_exact_full(P, llr_q, fixed_facet, max_iterations)
        x = certify_vertex(P, basis_ids)
        if not _audit_optimality(P, basis_ids, llr_q, fixed_facet):
            raise SolverError("exact solve failed its own optimality audit")
    objective = sum(g * v for g, v in zip(llr_q, x))
    return BasicSolution(
        status="optimal",
        x=x,
        objective=objective,
        basis=tuple(sorted(basis_ids)),
        iterations=iters,
    )


# ---------------------------------------------------------------------------
# general LP path: lifted two-phase tableau


def _lift(lp: LinearProgram, exact: bool):
    """Standard form of the lifted program: columns [x+, x-, slacks]."""
    n = lp.num_vars
    rows = lp.num_rows
    ineq = [r for r in range(rows) if lp.senses[r] == GE]
    nslack = len(ineq)
    if exact:
        A = [[_as_fraction(v) for v in row] for row in lp.lhs]
        b = [_as_fraction(v) for v in lp.rhs]
        c = [_as_fraction(v) for v in lp.objective]
        zero = Fraction(0)
        M = np.empty((rows, 2 * n + nslack), dtype=object)
        M.fill(zero)
        for r in range(rows):
            for i in range(n):
                M[r, i] = A[r][i]
                M[r, n + i] = -A[r][i]
        for k, r in enumerate(ineq):
            M[r, 2 * n + k] = Fraction(-1)
        rhs = np.array(b, dtype=object)
        cost = np.array(c + [-v for v in c] + [zero] * nslack, dtype=object)
    else:
        M = np.hstack([lp.lhs, -lp.lhs, np.zeros((rows, nslack))])
        for k, r in enumerate(ineq):
            M[r, 2 * n + k] = -1.0
        rhs = lp.rhs.astype(np.float64).copy()
        cost = np.concatenate([lp.objective, -lp.objective, np.zeros(nslack)])
    return M, rhs, cost


def _phase1(M, rhs, exact, cap):
    """Find a feasible basis with artificial variables; returns the working
    tableau with artificial columns marked disallowed, or None if infeasible."""
    rows, q = M.shape
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    work = M.copy()
    wrhs = rhs.copy()
    for r in range(rows):
        if wrhs[r] < zero:
            work[r] = -work[r]
            wrhs[r] = -wrhs[r]
    if exact:
        full = np.empty((rows, q + rows), dtype=object)
        full[:, :q] = work
        for r in range(rows):
            for k in range(rows):
                full[r, q + k] = one if r == k else zero
    else:
        full = np.hstack([work, np.eye(rows)])
    basic = [q + r for r in range(rows)]
    if exact:
        red = np.empty(q + rows, dtype=object)
        for j in range(q + rows):
            red[j] = zero
        for j in range(q):
            s = zero
            for r in range(rows):
                s += full[r, j]
            red[j] = -s
    else:
        red = np.zeros(q + rows)
        red[:q] = -full[:, :q].sum(axis=0)
    allowed = np.ones(q + rows, dtype=bool)
    result = _pivot_loop(full, wrhs, red, basic, allowed, cap, exact)
    if result[0] != "optimal":
        raise SolverError("phase 1 cannot be unbounded")
    obj = sum(wrhs[r] for r in range(rows) if basic[r] >= q)
    tol = zero if exact else 1e-7
    if obj > tol:
        return None
    # drive artificial variables out of the basis; drop redundant rows
    keep = list(range(rows))
    for r in range(rows):
        if basic[r] >= q:
            piv = None
            for j in range(q):
                v = full[r, j]
                big = (v != 0) if exact else abs(v) > PIVOT_TOL
                if big:
                    piv = j
                    break
            if piv is None:
                keep.remove(r)
                continue
            pivval = full[r, piv]
            full[r] = full[r] / pivval
            wrhs[r] = wrhs[r] / pivval
            colvals = full[:, piv].copy()
            colvals[r] = zero
            full -= np.outer(colvals, full[r])
            wrhs -= colvals * wrhs[r]
            basic[r] = piv
    full = full[keep][:, :q]
    wrhs = wrhs[keep]
    if not exact:
        np.clip(wrhs, 0.0, None, out=wrhs)
    basic = [basic[r] for r in keep]
    return full, wrhs, basic


def _tight_rows(lp: LinearProgram, x, exact: bool) -> list[int]:
    out = []
    for r in range(lp.num_rows):
        if lp.senses[r] == EQ:
            out.append(r)
            continue
        if exact:
            val = sum(_as_fraction(lp.lhs[r, i]) * x[i] for i in range(lp.num_vars))
            if val == _as_fraction(lp.rhs[r]):
                out.append(r)
        else:
            val = float(lp.lhs[r] @ x)
            if abs(val - lp.rhs[r]) <= FEAS_TOL * (1.0 + abs(lp.rhs[r])):
                out.append(r)
    return out


def _greedy_basis(lp: LinearProgram, tight: list[int], exact: bool) -> list[int]:
    """First maximal linearly independent subset of tight rows, in index order."""
    chosen: list[int] = []
    if exact:
        rows: list[list[Fraction]] = []
        for r in tight:
            cand = rows + [[_as_fraction(v) for v in lp.lhs[r]]]
            if _fraction_rank(cand) == len(cand):
                rows = cand
                chosen.append(r)
                if len(chosen) == lp.num_vars:
                    break
    else:
        stack: list[np.ndarray] = []
        for r in tight:
            cand = np.array(stack + [lp.lhs[r]])
            if np.linalg.matrix_rank(cand, tol=1e-8) == len(cand):
                stack.append(lp.lhs[r])
                chosen.append(r)
                if len(chosen) == lp.num_vars:
                    break
    return chosen


def _null_direction(lp: LinearProgram, rows: list[int], exact: bool):
    """A nonzero direction in the null space of the given rows, or None."""
    n = lp.num_vars
    if exact:
        mat = [[_as_fraction(v) for v in lp.lhs[r]] for r in rows]
        work = [list(r) for r in mat]
        pivots: list[tuple[int, int]] = []
        rank = 0
        for c in range(n):
            piv = next((r for r in range(rank, len(work)) if work[r][c] != 0), None)
            if piv is None:
                continue
            work[rank], work[piv] = work[piv], work[rank]
            pr = work[rank]
            for r in range(len(work)):
                if r != rank and work[r][c] != 0:
                    f = work[r][c] / pr[c]
                    work[r] = [a - f * bb for a, bb in zip(work[r], pr)]
            pivots.append((rank, c))
            rank += 1
        pivot_cols = {c for _, c in pivots}
        free = next((c for c in range(n) if c not in pivot_cols), None)
        if free is None:
            return None
        d = [Fraction(0)] * n
        d[free] = Fraction(1)
        for rr, pc in pivots:
            d[pc] = -work[rr][free] / work[rr][pc]
        return d
    mat = lp.lhs[rows] if rows else np.zeros((0, n))
    if rows and np.linalg.matrix_rank(mat, tol=1e-8) >= n:
        return None
    _, s, vt = np.linalg.svd(mat) if rows else (None, np.array([]), np.eye(n))
    null_mask = np.ones(n, dtype=bool)
    null_mask[: len(s)] = s > 1e-8
    null_vecs = vt[~null_mask[: vt.shape[0]]] if rows else np.eye(n)
    if rows:
        if null_vecs.shape[0] == 0:
            return None
        return null_vecs[0]
    return np.eye(n)[0]


def _drive_to_vertex(lp: LinearProgram, x, exact: bool):
    """Walk objective-neutral null directions of the tight rows until the
    tight set has full rank (when the feasible region has vertices)."""
    for _ in range(lp.num_vars + 1):
        tight = _tight_rows(lp, x, exact)
        basis = _greedy_basis(lp, tight, exact)
        if len(basis) >= lp.num_vars:
            return x, basis
        d = _null_direction(lp, tight, exact)
        if d is None:
            return x, basis
        cdot = (
            sum(_as_fraction(lp.objective[i]) * d[i] for i in range(lp.num_vars))
            if exact
            else float(lp.objective @ d)
        )
        tol = 0 if exact else 1e-7
        if abs(float(cdot)) > tol if not exact else cdot != 0:
            raise SolverError("null direction changes the objective at an optimum")
        moved = False
        for direction in (d, [-v for v in d] if exact else -np.asarray(d)):
            best_t = None
            for r in range(lp.num_rows):
                if r in tight or lp.senses[r] == EQ:
                    continue
                if exact:
                    ad = sum(_as_fraction(lp.lhs[r, i]) * direction[i] for i in range(lp.num_vars))
                    if ad < 0:
                        slack = sum(
                            _as_fraction(lp.lhs[r, i]) * x[i] for i in range(lp.num_vars)
                        ) - _as_fraction(lp.rhs[r])
                        t = slack / (-ad)
                        if best_t is None or t < best_t:
                            best_t = t
                else:
                    ad = float(lp.lhs[r] @ direction)
                    if ad < -1e-10:
                        slack = float(lp.lhs[r] @ x - lp.rhs[r])
                        t = slack / (-ad)
                        if best_t is None or t < best_t:
                            best_t = t
            if best_t is not None:
                if exact:
                    x = [xi + best_t * di for xi, di in zip(x, direction)]
                else:
                    x = np.asarray(x) + best_t * np.asarray(direction)
                moved = True
                break
        if not moved:
            return x, basis  # vertex-free region in this direction
    return x, basis


def solve(
    lp: LinearProgram,
    mode: str = "float",
    max_iterations: Optional[int] = None,
) -> BasicSolution:
    """Two-phase simplex over the lifted standard form of the program."""
    if mode not in ("float", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    exact = mode == "exact"
    n = lp.num_vars
    cap = max_iterations if max_iterations is not None else 50 * (n + lp.num_rows)
    M, rhs, cost = _lift(lp, exact)
    phase1 = _phase1(M, rhs, exact, cap)
    if phase1 is None:
        return BasicSolution(status="infeasible", x=None, objective=None)
    body, wrhs, basic = phase1
    q = M.shape[1]
    if exact:
        costB = np.array([cost[b] for b in basic], dtype=object)
        red = cost - costB @ body if len(basic) else cost.copy()
    else:
        red = cost - cost[basic] @ body if len(basic) else cost.copy()
    for b in basic:
        red[b] = Fraction(0) if exact else 0.0
    allowed = np.ones(q, dtype=bool)
    result = _pivot_loop(body, wrhs, red, basic, allowed, cap, exact)
    if result[0] == "unbounded":
        return BasicSolution(status="unbounded", x=None, objective=None)
    iters = result[-1]
    z = [Fraction(0)] * q if exact else np.zeros(q)
    for r, b in enumerate(basic):
        z[b] = wrhs[r]
    if exact:
        x = [z[i] - z[n + i] for i in range(n)]
    else:
        x = z[:n] - z[n : 2 * n]
    x, basis = _drive_to_vertex(lp, x, exact)
    if exact:
        objective = sum(_as_fraction(lp.objective[i]) * x[i] for i in range(n))
        for r in range(lp.num_rows):
            val = sum(_as_fraction(lp.lhs[r, i]) * x[i] for i in range(n))
            rv = _as_fraction(lp.rhs[r])
            bad = val != rv if lp.senses[r] == EQ else val < rv
            if bad:
                raise SolverError(f"returned point violates row {r}")
    else:
        objective = float(lp.objective @ x)
        vals = lp.lhs @ x
        for r in range(lp.num_rows):
            err = (
                abs(vals[r] - lp.rhs[r])
                if lp.senses[r] == EQ
                else max(0.0, lp.rhs[r] - vals[r])
            )
            if err > FEAS_TOL * (1.0 + abs(lp.rhs[r])):
                raise SolverError(f"returned point violates row {r} by {err:.3g}")
    return BasicSolution(
        status="optimal",
        x=x,
        objective=objective,
        basis=tuple(basis),
        iterations=iters,
    )
