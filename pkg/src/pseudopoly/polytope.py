"""The relaxed codeword polytope: constraint generation, active sets,
fractional supports, facet restrictions, and structural constants.

Constraint system for a parity-check matrix H (n bits, m checks):

* one "forbidden set" inequality per check j and odd-size subset S of its
  neighborhood N(j):  sum_{i in N(j)\\S} f_i - sum_{i in S} f_i >= 1 - |S|
  (the standard >= rewriting of keeping L1 distance >= 1 from the odd
  pattern S);
* 2n box inequalities  f_i >= 0  and  -f_i >= -1.

Ordering is fixed so facet indices are reproducible: forbidden constraints
first (checks ascending, subsets of each neighborhood in colexicographic
order over the check's sorted bit positions), then all box lower bounds by
bit index, then all box upper bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from .codes import ParityCheckMatrix

FORBIDDEN = "forbidden"
BOX_LOWER = "box_lower"
BOX_UPPER = "box_upper"

EPS_INT = 1e-6
EPS_ACTIVE = 1e-9
EPS_FEAS = 1e-8

MAX_CHECK_DEGREE = 20


class InfeasiblePointError(ValueError):
    """The supplied point violates the polytope constraints."""


@dataclass(frozen=True)
class LinearConstraint:
    """One >= inequality of the relaxed polytope with a stable identity.

    ``index`` is the position in the polytope's deterministic ordering and is
    the identifier used everywhere (active sets, facet restrictions, traces).
    """

    index: int
    kind: str  # FORBIDDEN | BOX_LOWER | BOX_UPPER
    check: Optional[int]  # FORBIDDEN only
    subset: Optional[tuple[int, ...]]  # FORBIDDEN only: odd-size S, bit indices
    bit: Optional[int]  # box constraints only
    cols: tuple[int, ...]
    coeffs: tuple[int, ...]
    rhs: int

    def label(self) -> str:
        if self.kind == FORBIDDEN:
            return f"F:{self.check}:{','.join(str(b) for b in self.subset)}"
        side = "lo" if self.kind == BOX_LOWER else "up"
        return f"B:{self.bit}:{side}"

    def evaluate(self, x: Sequence) -> object:
        """Left-hand side at x; exact when x has exact entries."""
        return sum(c * x[i] for i, c in zip(self.cols, self.coeffs))


def _odd_subset_masks(degree: int) -> Iterable[int]:
    """All odd-popcount bitmasks of the given width, in increasing numeric
    (= colexicographic subset) order, one per (degree-1)-bit prefix."""
    for g in range(1 << (degree - 1)):
        yield (g << 1) | ((g.bit_count() + 1) & 1)


class RelaxedPolytope:
    """Immutable constraint system of the LP decoding relaxation of H."""

    def __init__(self, H: ParityCheckMatrix, constraints: Sequence[LinearConstraint]):
        self.H = H
        self.n = H.n
        self.constraints: tuple[LinearConstraint, ...] = tuple(constraints)
        self.num_forbidden = sum(1 for c in self.constraints if c.kind == FORBIDDEN)
        self.num_box = len(self.constraints) - self.num_forbidden
        # dense float copies for the LP solver and vectorized evaluation
        nc = len(self.constraints)
        A = np.zeros((nc, self.n), dtype=np.float64)
        b = np.zeros(nc, dtype=np.float64)
        for c in self.constraints:
            A[c.index, list(c.cols)] = c.coeffs
            b[c.index] = c.rhs
        self.A = A
        self.b = b
        self._box_lower_base = self.num_forbidden
        self._box_upper_base = self.num_forbidden + self.n
        offsets = []
        acc = 0
        for row in H.rows:
            offsets.append(acc)
            acc += 1 << (len(row) - 1)
        self._forbidden_offsets = tuple(offsets)

    def __len__(self) -> int:
        return len(self.constraints)

    def box_lower_index(self, bit: int) -> int:
        return self._box_lower_base + bit

    def box_upper_index(self, bit: int) -> int:
        return self._box_upper_base + bit

    def forbidden_index(self, check: int, position_mask: int) -> int:
        """Constraint index of the forbidden inequality for a check and an
        odd-popcount mask over the check's sorted bit positions. The colex
        enumeration makes this a direct offset: rank(mask) = mask >> 1."""
        return self._forbidden_offsets[check] + (position_mask >> 1)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=np.float64)

    def is_feasible(self, x, eps: float = EPS_FEAS) -> bool:
        vals = self.evaluate(np.asarray(x, dtype=np.float64))
        return bool(np.all(vals >= self.b - eps))

    def __repr__(self):
        return (
            f"RelaxedPolytope(n={self.n}, m={self.H.m}, "
            f"forbidden={self.num_forbidden}, box={self.num_box})"
        )


def build_polytope(H: ParityCheckMatrix, max_check_degree: int = MAX_CHECK_DEGREE) -> RelaxedPolytope:
    """Generate the full constraint system for H in the documented order."""
    if H.m and max(H.row_degrees) > max_check_degree:
        raise ValueError(
            f"check degree {max(H.row_degrees)} exceeds guard {max_check_degree} "
            f"(2^(d_c-1) forbidden constraints per check)"
        )
    constraints: list[LinearConstraint] = []
    idx = 0
    for j, row in enumerate(H.rows):
        d = len(row)
        for mask in _odd_subset_masks(d):
            subset = tuple(row[p] for p in range(d) if (mask >> p) & 1)
            in_subset = set(subset)
            coeffs = tuple(-1 if i in in_subset else 1 for i in row)
            constraints.append(
                LinearConstraint(
                    index=idx,
                    kind=FORBIDDEN,
                    check=j,
                    subset=subset,
                    bit=None,
                    cols=tuple(row),
                    coeffs=coeffs,
                    rhs=1 - len(subset),
                )
            )
            idx += 1
    for i in range(H.n):
        constraints.append(
            LinearConstraint(idx, BOX_LOWER, None, None, i, (i,), (1,), 0)
        )
        idx += 1
    for i in range(H.n):
        constraints.append(
            LinearConstraint(idx, BOX_UPPER, None, None, i, (i,), (-1,), -1)
        )
        idx += 1
    return RelaxedPolytope(H, constraints)


@dataclass(frozen=True)
class ActiveSet:
    """Constraint indices tight at a point, with the tolerance that defined
    tightness (0 for exact mode)."""

    indices: frozenset[int]
    mode: str
    eps_active: float

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, idx: int) -> bool:
        return idx in self.indices


def _is_exact_entry(v) -> bool:
    return isinstance(v, Rational)


def active_set(
    P: RelaxedPolytope,
    x: Sequence,
    mode: str = "float",
    eps_active: float = EPS_ACTIVE,
    eps_feas: float = EPS_FEAS,
) -> ActiveSet:
    """Constraints satisfied with equality at x.

    Float mode uses eps_active for tightness and eps_feas for the feasibility
    precondition. Exact mode requires rational (or integer) coordinates and
    decides both exactly.
    """
    if mode == "exact":
        xs = [Fraction(v) if not _is_exact_entry(v) else v for v in x]
        for v in xs:
            if not isinstance(v, Rational):
                raise TypeError("exact mode requires rational coordinates")
        tight = []
        for c in P.constraints:
            val = c.evaluate(xs)
            if val < c.rhs:
                raise InfeasiblePointError(f"constraint {c.label()} violated: {val} < {c.rhs}")
            if val == c.rhs:
                tight.append(c.index)
        return ActiveSet(frozenset(tight), "exact", 0.0)
    if mode == "float":
        vals = P.evaluate(np.asarray(x, dtype=np.float64))
        slack = vals - P.b
        if np.any(slack < -eps_feas):
            worst = int(np.argmin(slack))
            raise InfeasiblePointError(
                f"constraint {P.constraints[worst].label()} violated by {-slack[worst]:.3g}"
            )
        tight = np.nonzero(np.abs(slack) <= eps_active)[0]
        return ActiveSet(frozenset(int(i) for i in tight), "float", eps_active)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class FractionalSupport:
    """Bits with non-integral value and the checks adjacent to them."""

    bits: frozenset[int]
    checks: frozenset[int]


def fractional_support(
    H: ParityCheckMatrix, x: Sequence, eps_int: float = EPS_INT
) -> FractionalSupport:
    """Fractional bit set and its check neighborhood at the point x.

    A coordinate counts as fractional when min(x_i, 1 - x_i) > eps_int; exact
    rational coordinates are classified exactly.
    """
    bits = set()
    for i, v in enumerate(x):
        if _is_exact_entry(v):
            if v != 0 and v != 1:
                bits.add(i)
        else:
            if min(float(v), 1.0 - float(v)) > eps_int:
                bits.add(i)
    checks = set()
    for i in bits:
        checks.update(H.cols[i])
    return FractionalSupport(frozenset(bits), frozenset(checks))


@dataclass(frozen=True)
class FacetRestriction:
    """A polytope with one constraint converted to an equality."""

    polytope: RelaxedPolytope
    facet: int

    def __post_init__(self):
        if not 0 <= self.facet < len(self.polytope.constraints):
            raise KeyError(f"unknown constraint index {self.facet}")

    @property
    def constraint(self) -> LinearConstraint:
        return self.polytope.constraints[self.facet]

    def admits(self, x, eps: float = EPS_ACTIVE) -> bool:
        """Whether x stays feasible after the restriction (tight on the facet)."""
        c = self.constraint
        val = float(sum(co * float(x[i]) for i, co in zip(c.cols, c.coeffs)))
        return self.polytope.is_feasible(x) and abs(val - c.rhs) <= eps


def restrict_to_facet(P: RelaxedPolytope, constraint_index: int) -> FacetRestriction:
    return FacetRestriction(P, constraint_index)


def local_restriction(x: Sequence, H: ParityCheckMatrix, check: int) -> np.ndarray:
    """Projection of x onto the bits of a check, in the check's bit order."""
    row = H.rows[check]
    return np.asarray([x[i] for i in row])


def local_active_intersection(d_c: int, w1: Sequence[int], w2: Sequence[int]) -> int:
    """Number of odd-weight length-d_c strings at Hamming distance 1 from both
    of the given even-weight strings."""
    w1 = tuple(int(v) for v in w1)
    w2 = tuple(int(v) for v in w2)
    if len(w1) != d_c or len(w2) != d_c:
        raise ValueError("local codewords must have length d_c")
    for w in (w1, w2):
        if any(v not in (0, 1) for v in w):
            raise ValueError("local codewords must be binary")
        if sum(w) % 2 != 0:
            raise ValueError("local codewords must have even weight")
    m1 = sum(b << p for p, b in enumerate(w1))
    m2 = sum(b << p for p, b in enumerate(w2))
    count = 0
    for f in _odd_subset_masks(d_c):
        if (f ^ m1).bit_count() == 1 and (f ^ m2).bit_count() == 1:
            count += 1
    return count


def active_set_bound(m: int, d_c: int, n: int, support: FractionalSupport) -> int:
    """Upper bound on the active-set size of a point from its fractional
    support: (m - |C|) d_c + 2 |C| + n - |V|."""
    nC = len(support.checks)
    nV = len(support.bits)
    if nC > m or nV > n:
        raise ValueError("support larger than the graph")
    return (m - nC) * d_c + 2 * nC + n - nV


@dataclass(frozen=True)
class StructureConstants:
    """Per-bit active-set densities for codewords and fractional vertices of
    an (alpha, delta)-expander code, with the inputs that produced them."""

    gamma_cw: float
    gamma_pc: float
    rate: float
    d_c: int
    d_v: int
    alpha: float
    delta: float

    @property
    def c1_threshold(self) -> float:
        """Largest count of better fractional vertices that still guarantees
        exhaustive facet guessing succeeds."""
        return self.gamma_cw / self.gamma_pc

    def rfg_success_bound(self, c1: int = 1) -> float:
        """Per-guess success probability lower bound for randomized facet
        guessing with c1 better fractional vertices."""
        total_density = 2 ** (self.d_c - 1) * (1 - self.rate) + 2
        return (self.gamma_cw - c1 * self.gamma_pc) / total_density


def structure_constants(
    rate: float, d_c: int, d_v: int, alpha: float, delta: float
) -> StructureConstants:
    """Evaluate the codeword / fractional-vertex active-set densities.

    gamma_cw = (1 - R) d_c + 1
    gamma_pc = (1 - R - delta d_v alpha) d_c + 2 delta d_v alpha + (1 - alpha)
    """
    if not 0 < rate < 1:
        raise ValueError("rate must be in (0, 1)")
    if not delta > 0.5:
        raise ValueError("delta must exceed 1/2")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if d_c < 3:
        raise ValueError("d_c must be >= 3")
    gamma_cw = (1 - rate) * d_c + 1
    gamma_pc = (1 - rate - delta * d_v * alpha) * d_c + 2 * delta * d_v * alpha + (1 - alpha)
    cs = StructureConstants(gamma_cw, gamma_pc, rate, d_c, d_v, alpha, delta)
    if not cs.gamma_pc < cs.gamma_cw:
        raise AssertionError("density ordering violated; check parameters")
    return cs


CONSTRAINT_DUMP_VERSION = "pseudopoly-constraints v1"


def dump_constraints(P: RelaxedPolytope, stream: IO[str]) -> None:
    """Write the constraint system, one per line, for external cross-checks.

    Format: versioned header, then `<label> ; <bit>:<coeff> ... ; >= <rhs>`.
    """
    stream.write(f"# {CONSTRAINT_DUMP_VERSION} n={P.n} m={P.H.m}\n")
    for c in P.constraints:
        terms = " ".join(f"{i}:{co}" for i, co in zip(c.cols, c.coeffs))
        stream.write(f"{c.label()} ; {terms} ; >= {c.rhs}\n")
