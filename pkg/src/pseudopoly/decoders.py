"""Decoders over the relaxed polytope: plain LP decoding, exhaustive and
randomized facet guessing, a brute-force ML oracle, a sum-product baseline,
and exact vertex enumeration for tiny polytopes.

Cost convention: ``llr[i] = log(Pr(y_i | x_i = 0) / Pr(y_i | x_i = 1))``, so
decoding minimizes ``sum llr[i] * f[i]`` and positive entries favor bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Optional, Sequence, Union

import numpy as np

from .codes import BudgetExceededError, ParityCheckMatrix, enumerate_codewords, syndrome
from .polytope import (
    EPS_ACTIVE,
    EPS_INT,
    FORBIDDEN,
    RelaxedPolytope,
    active_set,
)
from .simplex import RestrictionInfeasibleError, SolverError, solve_decoding_lp

INTEGRAL = "integral"
FRACTIONAL = "fractional"
NO_INTEGRAL = "no_integral_found"

MSG_CLIP = 30.0


class EmptyFacetPoolError(RuntimeError):
    """Every polytope constraint is active at the LP point; nothing to guess."""


@dataclass(frozen=True)
class Exhaustive:
    """Try every candidate facet."""


@dataclass(frozen=True)
class Randomized:
    """Sample ``budget`` candidate facets uniformly without replacement."""

    budget: int
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("guess budget must be >= 1")


GuessStrategy = Union[Exhaustive, Randomized]


@dataclass(frozen=True)
class FacetGuess:
    """One facet-restricted sub-solve in a facet-guessing run."""

    facet: int
    objective: Optional[float]
    integral: bool
    failed: bool = False


@dataclass
class DecodeOutcome:
    status: str  # INTEGRAL | FRACTIONAL | NO_INTEGRAL
    point: Union[np.ndarray, list]
    objective: Union[float, Fraction]
    ml_certified: bool = False
    guesses_used: int = 0
    facet_trace: list[FacetGuess] = field(default_factory=list)
    # underlying solver result (when produced by lp_decode); lets restricted
    # re-solves warm-start from the optimum
    _solution: object = field(default=None, repr=False, compare=False)

    @property
    def codeword(self) -> Optional[np.ndarray]:
        if self.status != INTEGRAL:
            return None
        return np.asarray([int(round(float(v))) for v in self.point], dtype=np.uint8)


def _is_integral_point(point, eps_int: float) -> bool:
    for v in point:
        if isinstance(v, Fraction):
            if v.denominator != 1:
                return False
        elif min(abs(float(v)), abs(1.0 - float(v))) > eps_int:
            return False
    return True


def lp_decode(
    P: RelaxedPolytope,
    llr: Sequence,
    mode: str = "float",
    eps_int: float = EPS_INT,
    max_iterations: Optional[int] = None,
) -> DecodeOutcome:
    """Minimize the cost over P. An integral optimum is the ML codeword and
    is returned with its certificate flag set."""
    sol = solve_decoding_lp(P, llr, mode=mode, max_iterations=max_iterations)
    if _is_integral_point(sol.x, eps_int):
        word = np.asarray([int(round(float(v))) for v in sol.x], dtype=np.uint8)
        if syndrome(P.H, word).any():
            raise SolverError("integral LP output fails the parity checks")
        point = sol.x if mode == "exact" else word.astype(np.float64)
        return DecodeOutcome(INTEGRAL, point, sol.objective, ml_certified=True, _solution=sol)
    return DecodeOutcome(FRACTIONAL, sol.x, sol.objective, _solution=sol)


def ml_decode_bruteforce(H: ParityCheckMatrix, llr: Sequence) -> np.ndarray:
    """Exhaustive maximum-likelihood codeword: argmin of the cost over all
    codewords, ties broken toward the lexicographically smallest word."""
    llr = np.asarray(llr, dtype=np.float64)
    best_word = None
    best_key = None
    for w in enumerate_codewords(H):
        key = (float(llr @ w), tuple(int(v) for v in w))
        if best_key is None or key < best_key:
            best_key = key
            best_word = w
    return best_word


def facet_guess(
    P: RelaxedPolytope,
    llr: Sequence,
    lp_outcome: Optional[DecodeOutcome] = None,
    strategy: GuessStrategy = Exhaustive(),
    mode: str = "float",
    eps_int: float = EPS_INT,
    eps_active: float = EPS_ACTIVE,
    max_iterations: Optional[int] = None,
) -> DecodeOutcome:
    """Re-solve the decoding program on facets not active at the fractional
    LP point and return the best integral solution found.

    The candidate pool is every constraint of P (box constraints included)
    that is not tight at the LP optimum. Exhaustive iterates the whole pool
    in index order; Randomized samples without replacement with a seeded
    generator. An integral input is returned unchanged.
    """
    if lp_outcome is None:
        lp_outcome = lp_decode(P, llr, mode=mode, eps_int=eps_int, max_iterations=max_iterations)
    if lp_outcome.status == INTEGRAL:
        return lp_outcome
    act = active_set(P, lp_outcome.point, mode=mode, eps_active=eps_active)
    pool = [i for i in range(len(P.constraints)) if i not in act.indices]
    if not pool:
        raise EmptyFacetPoolError("no inactive constraints at the LP point")
    if isinstance(strategy, Exhaustive):
        chosen = pool
    else:
        rng = np.random.default_rng(strategy.seed)
        take = min(strategy.budget, len(pool))
        chosen = [int(v) for v in rng.choice(pool, size=take, replace=False)]
    # each restricted re-solve warm-starts from the unrestricted optimum
    base = getattr(lp_outcome, "_solution", None)
    tight_forbidden = {i for i in act.indices if i < P.num_forbidden}
    if base is not None:
        seed_cuts = tuple(sorted(set(base.activated) | tight_forbidden))
        warm = base.basis
    else:
        seed_cuts = tuple(sorted(tight_forbidden))
        warm = None
    trace: list[FacetGuess] = []
    best_word: Optional[tuple[int, ...]] = None
    best_obj = None
    for f in chosen:
        try:
            sub = solve_decoding_lp(
                P, llr, fixed_facet=f, mode=mode, max_iterations=max_iterations,
                seed_cuts=seed_cuts, warm_basis=warm,
            )
        except RestrictionInfeasibleError:
            trace.append(FacetGuess(f, None, False, failed=True))
            continue
        integral = _is_integral_point(sub.x, eps_int)
        obj = float(sub.objective)
        if integral:
            word = tuple(int(round(float(v))) for v in sub.x)
            if syndrome(P.H, np.asarray(word)).any():
                trace.append(FacetGuess(f, obj, False, failed=True))
                continue
            if best_obj is None or (obj, word) < (best_obj, best_word):
                best_obj, best_word = obj, word
        trace.append(FacetGuess(f, obj, integral))
    if best_word is None:
        return DecodeOutcome(
            NO_INTEGRAL,
            lp_outcome.point,
            lp_outcome.objective,
            guesses_used=len(trace),
            facet_trace=trace,
        )
    certified = abs(best_obj - float(lp_outcome.objective)) <= 1e-9 * (1.0 + abs(best_obj))
    return DecodeOutcome(
        INTEGRAL,
        np.asarray(best_word, dtype=np.float64),
        best_obj,
        ml_certified=certified,
        guesses_used=len(trace),
        facet_trace=trace,
    )


# ---------------------------------------------------------------------------
# sum-product baseline


def sum_product_decode(
    H: ParityCheckMatrix, llr: Sequence, max_iters: int = 100
) -> DecodeOutcome:
    """LLR-domain sum-product with a flooding schedule and tanh check rule.

    Messages are clipped at +-30. Stops early once the hard decision
    satisfies all checks; otherwise reports the final hard decision as
    NO_INTEGRAL.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    llr = np.asarray(llr, dtype=np.float64)
    n, m = H.n, H.m
    dmax = max(H.row_degrees) if m else 0
    idx = np.zeros((m, dmax), dtype=np.int64)
    mask = np.zeros((m, dmax), dtype=bool)
    for j, row in enumerate(H.rows):
        idx[j, : len(row)] = row
        mask[j, : len(row)] = True
    c2v = np.zeros((m, dmax))

    def hard_word(totals: np.ndarray) -> np.ndarray:
        return (totals < 0).astype(np.uint8)

    word = hard_word(llr)
    for _ in range(max_iters):
        totals = llr.copy()
        np.add.at(totals, idx[mask], c2v[mask])
        v2c = totals[idx] - c2v
        v2c = np.clip(v2c, -MSG_CLIP, MSG_CLIP)
        th = np.tanh(v2c / 2.0)
        th[~mask] = 1.0
        pre = np.ones((m, dmax + 1))
        suf = np.ones((m, dmax + 1))
        for k in range(dmax):
            pre[:, k + 1] = pre[:, k] * th[:, k]
            suf[:, dmax - 1 - k] = suf[:, dmax - k] * th[:, dmax - 1 - k]
        loo = pre[:, :dmax] * suf[:, 1:]
        loo = np.clip(loo, -1.0 + 1e-15, 1.0 - 1e-15)
        c2v = np.clip(2.0 * np.arctanh(loo), -MSG_CLIP, MSG_CLIP)
        c2v[~mask] = 0.0
        totals = llr.copy()
        np.add.at(totals, idx[mask], c2v[mask])
        word = hard_word(totals)
        if not syndrome(H, word).any():
            return DecodeOutcome(INTEGRAL, word.astype(np.float64), float(llr @ word))
    return DecodeOutcome(NO_INTEGRAL, word.astype(np.float64), float(llr @ word))


# ---------------------------------------------------------------------------
# exact vertex census (double description over the rationals)

MAX_CENSUS_BITS = 8
MAX_CENSUS_CONSTRAINTS = 40


@dataclass(frozen=True)
class PolytopeVertex:
    point: tuple[Fraction, ...]
    integral: bool
    active: frozenset[int]  # constraint indices tight at the vertex


@dataclass
class PseudocodewordCensus:
    """Every vertex of a tiny relaxed polytope, exactly enumerated."""

    polytope: RelaxedPolytope
    vertices: tuple[PolytopeVertex, ...]

    @property
    def integral_vertices(self) -> list[PolytopeVertex]:
        return [v for v in self.vertices if v.integral]

    @property
    def fractional_vertices(self) -> list[PolytopeVertex]:
        return [v for v in self.vertices if not v.integral]

    def objective(self, vertex: PolytopeVertex, llr: Sequence) -> Fraction:
        return sum(Fraction(float(g)) * x for g, x in zip(llr, vertex.point))

    def ml_codeword(self, llr: Sequence) -> tuple[tuple[int, ...], Fraction]:
        """Best integral vertex by (objective, lexicographic word)."""
        best = None
        for v in self.integral_vertices:
            word = tuple(int(x) for x in v.point)
            key = (self.objective(v, llr), word)
            if best is None or key < best:
                best = key
        if best is None:
            raise SolverError("census contains no integral vertex")
        return best[1], best[0]


def enumerate_vertices(
    P: RelaxedPolytope,
    max_bits: int = MAX_CENSUS_BITS,
    max_constraints: int = MAX_CENSUS_CONSTRAINTS,
) -> PseudocodewordCensus:
    """Exact vertex enumeration by double description.

    Starts from the unit-cube vertices (the box subsystem) and inserts the
    forbidden-set constraints one at a time, in polytope order, over integer
    homogeneous coordinates. Guarded to n <= 8 bits and <= 40 constraints by
    default; callers may raise the caps explicitly at their own expense.
    """
    n = P.n
    nc = len(P.constraints)
    if n > max_bits or nc > max_constraints:
        raise BudgetExceededError(
            f"census limited to n <= {max_bits} and {max_constraints} constraints"
        )
    # rays: (coords tuple of n+1 ints, active bitmask); t is the last coord
    rays: list[tuple[tuple[int, ...], int]] = []
    for bits in range(1 << n):
        v = tuple((bits >> i) & 1 for i in range(n))
        act = 0
        for i in range(n):
            if v[i] == 0:
                act |= 1 << P.box_lower_index(i)
            else:
                act |= 1 << P.box_upper_index(i)
        rays.append((v + (1,), act))

    def gcd_reduce(vec: tuple[int, ...]) -> tuple[int, ...]:
        g = 0
        for v in vec:
            g = math.gcd(g, abs(v))
        return vec if g in (0, 1) else tuple(v // g for v in vec)

    for cons in P.constraints:
        if cons.kind != FORBIDDEN:
            continue
        bit = 1 << cons.index
        vals = []
        for vec, _ in rays:
            vals.append(sum(co * vec[i] for i, co in zip(cons.cols, cons.coeffs)) - cons.rhs * vec[n])
        keep: list[tuple[tuple[int, ...], int]] = []
        pos_idx = []
        neg_idx = []
        for k, val in enumerate(vals):
            if val > 0:
                keep.append(rays[k])
                pos_idx.append(k)
            elif val == 0:
                vec, act = rays[k]
                keep.append((vec, act | bit))
            else:
                neg_idx.append(k)
        created: list[tuple[tuple[int, ...], int]] = []
        for p in pos_idx:
            vec_p, act_p = rays[p]
            for q in neg_idx:
                vec_q, act_q = rays[q]
                common = act_p & act_q
                if common.bit_count() < n - 1:
                    continue
                adjacent = True
                for r, (_, act_r) in enumerate(rays):
                    if r == p or r == q:
                        continue
                    if common & ~act_r == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                lam, mu = vals[p], -vals[q]
                combo = tuple(
                    lam * vec_q[i] + mu * vec_p[i] for i in range(n + 1)
                )
                created.append((gcd_reduce(combo), common | bit))
        rays = keep + created

    seen: dict[tuple[int, ...], int] = {}
    for vec, act in rays:
        if vec[n] <= 0:
            raise SolverError("census produced an unbounded direction")
        seen[vec] = act
    vertices = []
    for vec, act in sorted(seen.items()):
        t = vec[n]
        point = tuple(Fraction(vec[i], t) for i in range(n))
        integral = all(x.denominator == 1 for x in point)
        vertices.append(PolytopeVertex(point, integral, frozenset(
            i for i in range(nc) if (act >> i) & 1
        )))
    return PseudocodewordCensus(P, tuple(vertices))


def count_better_pseudocodewords(
    census: PseudocodewordCensus, llr: Sequence, ml_codeword: Sequence[int]
) -> int:
    """Number of fractional vertices with objective strictly below the ML
    codeword's (exact comparison; float costs convert to exact rationals)."""
    ml_obj = sum(Fraction(float(g)) * int(c) for g, c in zip(llr, ml_codeword))
    return sum(
        1
        for v in census.fractional_vertices
        if census.objective(v, llr) < ml_obj
    )


# ---------------------------------------------------------------------------
# text interchange for cost vectors and outcomes


def write_llr(llr: Sequence, stream: IO[str]) -> None:
    for v in llr:
        stream.write(f"{float(v):.17g}\n")


def read_llr(stream: IO[str]) -> np.ndarray:
    vals = []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise ValueError(f"llr line {lineno}: not a number: {line!r}")
    return np.asarray(vals, dtype=np.float64)


def format_outcome(outcome: DecodeOutcome) -> str:
    """Line-oriented record: status, objective, point, guesses_used."""
    if isinstance(outcome.point, np.ndarray):
        point = " ".join(f"{float(v):.12g}" for v in outcome.point)
    else:
        point = " ".join(str(v) for v in outcome.point)
    return (
        f"status={outcome.status}\n"
        f"objective={float(outcome.objective):.12g}\n"
        f"point={point}\n"
        f"guesses_used={outcome.guesses_used}\n"
    )
