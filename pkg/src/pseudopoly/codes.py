"""Binary code structures: parity-check matrices, Tanner graphs, GF(2) linear
algebra, codeword enumeration, and bipartite expansion verification."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


class AlistError(ValueError):
    """Malformed alist input. Carries the 1-based line number of the offence."""

    def __init__(self, line: int, message: str):
        super().__init__(f"alist line {line}: {message}")
        self.line = line


class GraphSampleError(RuntimeError):
    """Could not sample a simple regular bipartite graph within the attempt cap."""


class BudgetExceededError(RuntimeError):
    """An enumeration guard (subset count, codeword count, ...) was exceeded."""


class ParityCheckMatrix:
    """Sparse parity-check matrix H over GF(2), stored as per-check bit lists.

    `rows[j]` is the sorted tuple of bit indices incident to check j. The
    structure is immutable after construction and safe to share across
    threads or processes.
    """

    def __init__(self, n: int, rows: Sequence[Sequence[int]]):
        if n < 1:
            raise ValueError("bit count must be >= 1")
        clean = []
        for j, row in enumerate(rows):
            row = sorted(int(i) for i in row)
            for i in row:
                if not 0 <= i < n:
                    raise ValueError(f"check {j}: bit index {i} out of range [0, {n})")
            if len(set(row)) != len(row):
                raise ValueError(f"check {j}: repeated bit index")
            clean.append(tuple(row))
        self.n = int(n)
        self.rows: tuple[tuple[int, ...], ...] = tuple(clean)
        cols: list[list[int]] = [[] for _ in range(n)]
        for j, row in enumerate(self.rows):
            for i in row:
                cols[i].append(j)
        self.cols: tuple[tuple[int, ...], ...] = tuple(tuple(c) for c in cols)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def row_degrees(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def col_degrees(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cols)

    def regular_degrees(self) -> Optional[tuple[int, int]]:
        """(d_v, d_c) when column and row degrees are uniform, else None."""
        dvs = set(self.col_degrees)
        dcs = set(self.row_degrees)
        if len(dvs) == 1 and len(dcs) == 1:
            return (dvs.pop(), dcs.pop())
        return None

    def require_regular(self) -> tuple[int, int]:
        deg = self.regular_degrees()
        if deg is None:
            raise ValueError("matrix is not (d_v, d_c)-regular")
        return deg

    @property
    def rate(self) -> float:
        """Design rate 1 - m/n (row-count based, not rank based)."""
        return 1.0 - self.m / self.n

    def rank(self) -> int:
        return gf2_rank(self.dense())

    def dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, row in enumerate(self.rows):
            H[j, list(row)] = 1
        return H

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ParityCheckMatrix)
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"ParityCheckMatrix(n={self.n}, m={self.m})"


def from_alist(text: str) -> ParityCheckMatrix:
    """Parse the alist interchange format (1-based indices).

    Layout: `n m`, then `dv_max dc_max`, then the n column degrees, the m row
    degrees, n column adjacency lines and m row adjacency lines. Zero padding
    in adjacency lines is tolerated on read.
    """
    lines = text.splitlines()

    def ints(lineno: int, expect: Optional[int] = None) -> list[int]:
        if lineno >= len(lines):
            raise AlistError(lineno + 1, "unexpected end of input")
        try:
            vals = [int(tok) for tok in lines[lineno].split()]
        except ValueError:
            raise AlistError(lineno + 1, f"non-integer token in {lines[lineno]!r}")
        if expect is not None and len(vals) != expect:
            raise AlistError(lineno + 1, f"expected {expect} integers, got {len(vals)}")
        return vals

    header = ints(0)
    if len(header) != 2:
        raise AlistError(1, "header must contain exactly 'n m'")
    n, m = header
    if n < 1 or m < 0:
        raise AlistError(1, f"invalid dimensions n={n} m={m}")
    maxdeg = ints(1)
    if len(maxdeg) != 2:
        raise AlistError(2, "second line must contain 'dv_max dc_max'")
    col_deg = ints(2, n)
    row_deg = ints(3, m) if m > 0 else []
    if m > 0 and not lines[3].strip() and row_deg == []:
        raise AlistError(4, "missing row degree list")

    col_adj: list[list[int]] = []
    for i in range(n):
        lineno = 4 + i
        raw = ints(lineno)
        entries = [v for v in raw if v != 0]
        for v in entries:
            if not 1 <= v <= m:
                raise AlistError(lineno + 1, f"check index {v} out of range [1, {m}]")
        if len(entries) != col_deg[i]:
            raise AlistError(
                lineno + 1,
                f"bit {i + 1} lists {len(entries)} checks, header says {col_deg[i]}",
            )
        col_adj.append(entries)

    rows: list[list[int]] = []
    for j in range(m):
        lineno = 4 + n + j
        raw = ints(lineno)
        entries = [v for v in raw if v != 0]
        for v in entries:
            if not 1 <= v <= n:
                raise AlistError(lineno + 1, f"bit index {v} out of range [1, {n}]")
        if len(entries) != row_deg[j]:
            raise AlistError(
                lineno + 1,
                f"check {j + 1} lists {len(entries)} bits, header says {row_deg[j]}",
            )
        if len(set(entries)) != len(entries):
            raise AlistError(lineno + 1, f"check {j + 1} repeats a bit index")
        rows.append([v - 1 for v in entries])

    # cross-validate the two adjacency blocks
    from_cols: list[set[int]] = [set() for _ in range(m)]
    for i, checks in enumerate(col_adj):
        for c in checks:
            from_cols[c - 1].add(i)
    for j in range(m):
        if from_cols[j] != set(rows[j]):
            raise AlistError(4 + n + j + 1, f"check {j + 1} disagrees with column lists")

    return ParityCheckMatrix(n, rows)


def to_alist(H: ParityCheckMatrix) -> str:
    """Serialize to alist text (1-based, no zero padding)."""
    lines = [f"{H.n} {H.m}"]
    lines.append(f"{max(H.col_degrees) if H.n else 0} {max(H.row_degrees) if H.m else 0}")
    lines.append(" ".join(str(d) for d in H.col_degrees))
    lines.append(" ".join(str(d) for d in H.row_degrees))
    for i in range(H.n):
        lines.append(" ".join(str(j + 1) for j in H.cols[i]))
    for j in range(H.m):
        lines.append(" ".join(str(i + 1) for i in H.rows[j]))
    return "\n".join(lines) + "\n"


def random_regular(
    n: int, d_v: int, d_c: int, seed: int, max_attempts: int = 1000
) -> ParityCheckMatrix:
    """Sample a (d_v, d_c)-regular simple bipartite graph on n bits.

    Configuration-model stub matching with whole-graph resampling until no
    parallel edges remain. Deterministic for a fixed seed.
    """
    if d_v < 1 or d_c < 1:
        raise ValueError("degrees must be >= 1")
    if (n * d_v) % d_c != 0:
        raise ValueError(f"n*d_v = {n * d_v} is not divisible by d_c = {d_c}")
    m = n * d_v // d_c
    rng = np.random.default_rng(seed)
    var_stubs = np.repeat(np.arange(n), d_v)
    for _ in range(max_attempts):
        perm = rng.permutation(n * d_v)
        check_stubs = np.repeat(np.arange(m), d_c)[perm]
        pairs = set(zip(var_stubs.tolist(), check_stubs.tolist()))
        if len(pairs) != n * d_v:
            continue  # parallel edge, resample
        rows: list[list[int]] = [[] for _ in range(m)]
        for i, j in pairs:
            rows[j].append(i)
        return ParityCheckMatrix(n, rows)
    raise GraphSampleError(
        f"no simple ({d_v},{d_c})-regular graph on n={n} after {max_attempts} attempts"
    )


def syndrome(H: ParityCheckMatrix, x: Sequence[int]) -> np.ndarray:
    """Per-check parity of x (mod 2); all-zeros iff x is a codeword."""
    x = np.asarray(x)
    if x.shape != (H.n,):
        raise ValueError(f"expected length-{H.n} vector, got shape {x.shape}")
    out = np.zeros(H.m, dtype=np.uint8)
    xb = x.astype(np.int64)
    for j, row in enumerate(H.rows):
        out[j] = int(xb[list(row)].sum()) & 1
    return out


def gf2_rank(M: np.ndarray) -> int:
    A = (np.asarray(M) & 1).astype(np.uint8, copy=True)
    m, n = A.shape
    r = 0
    for c in range(n):
        if r >= m:
            break
        pivots = np.nonzero(A[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + int(pivots[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            A[others] ^= A[r]
        r += 1
    return r


def nullspace_basis(H: ParityCheckMatrix) -> list[np.ndarray]:
    """Basis of {x : Hx = 0} over GF(2), from the RREF of the dense matrix.

    Returns n - rank(H) vectors; free columns in ascending order, so the
    result is deterministic.
    """
    A = H.dense().copy()
    m, n = A.shape
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        pivots = np.nonzero(A[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + int(pivots[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            A[others] ^= A[r]
        pivot_cols.append(c)
        r += 1
    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        for rr, pc in enumerate(pivot_cols):
            if A[rr, f]:
                v[pc] = 1
        basis.append(v)
    return basis


MAX_CODEWORD_DIM = 28


def enumerate_codewords(H: ParityCheckMatrix) -> list[np.ndarray]:
    """All 2^k codewords of H, k = n - rank(H), in a deterministic order.

    Order: binary counter over the nullspace basis (basis vector 0 toggles
    fastest). Guarded by MAX_CODEWORD_DIM.
    """
    basis = nullspace_basis(H)
    k = len(basis)
    if k > MAX_CODEWORD_DIM:
        raise BudgetExceededError(f"codeword dimension {k} exceeds guard {MAX_CODEWORD_DIM}")
    words = [np.zeros(H.n, dtype=np.uint8)]
    for v in basis:
        words = words + [w ^ v for w in words]
    return words


@dataclass(frozen=True)
class ExpansionCertificate:
    """Outcome of an (alpha, delta) expansion check.

    Only ``mode == "exhaustive"`` with ``holds`` certifies the property; a
    sampled certificate records random trials and carries no guarantee, and
    any report built from one must say so.
    """

    alpha: float
    delta: float
    mode: str  # "exhaustive" | "sampled"
    holds: bool
    witness: Optional[tuple[int, ...]]
    subsets_checked: int
    trials: Optional[int] = None
    seed: Optional[int] = None

    @property
    def certifies(self) -> bool:
        return self.mode == "exhaustive" and self.holds


DEFAULT_SUBSET_BUDGET = 5_000_000


def _subset_count(n: int, smax: int) -> int:
    return sum(math.comb(n, s) for s in range(1, smax + 1))


def verify_expansion(
    H: ParityCheckMatrix,
    alpha: float,
    delta: float,
    mode: str = "exhaustive",
    budget: int = DEFAULT_SUBSET_BUDGET,
    trials: int = 10_000,
    seed: int = 0,
) -> ExpansionCertificate:
    """Check |N(S)| >= delta * d_v * |S| for variable subsets with |S| <= alpha*n.

    Exhaustive mode enumerates subsets in ascending size (then lexicographic)
    and is exact; the witness, when present, is a smallest violating subset.
    Sampled mode draws random subsets and is not certifying.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if not 0 < delta <= 1:
        raise ValueError("delta must be in (0, 1]")
    dvs = set(H.col_degrees)
    if len(dvs) != 1:
        raise ValueError("expansion check requires uniform variable degree")
    d_v = dvs.pop()
    smax = math.floor(alpha * H.n)
    if smax < 1:
        raise ValueError(f"alpha = {alpha} admits no nonempty subsets at n = {H.n}")
    col_masks = [0 for _ in range(H.n)]
    for i in range(H.n):
        mask = 0
        for j in H.cols[i]:
            mask |= 1 << j
        col_masks[i] = mask

    def violates(subset: tuple[int, ...]) -> bool:
        acc = 0
        for i in subset:
            acc |= col_masks[i]
        return acc.bit_count() < delta * d_v * len(subset)

    if mode == "exhaustive":
        total = _subset_count(H.n, smax)
        if total > budget:
            raise BudgetExceededError(
                f"{total} subsets exceed budget {budget}; shrink alpha or sample"
            )
        checked = 0
        for s in range(1, smax + 1):
            for subset in itertools.combinations(range(H.n), s):
                checked += 1
                if violates(subset):
                    return ExpansionCertificate(
                        alpha, delta, "exhaustive", False, subset, checked
                    )
        return ExpansionCertificate(alpha, delta, "exhaustive", True, None, checked)

    if mode == "sampled":
        rng = np.random.default_rng(seed)
        for t in range(trials):
            s = int(rng.integers(1, smax + 1))
            subset = tuple(sorted(rng.choice(H.n, size=s, replace=False).tolist()))
            if violates(subset):
                return ExpansionCertificate(
                    alpha, delta, "sampled", False, subset, t + 1, trials=trials, seed=seed
                )
        return ExpansionCertificate(
            alpha, delta, "sampled", True, None, trials, trials=trials, seed=seed
        )

    raise ValueError(f"unknown mode {mode!r}")


def unique_neighbor_witness(
    H: ParityCheckMatrix, subset: Iterable[int]
) -> Optional[int]:
    """Smallest check index adjacent to exactly one member of the subset, if any."""
    S = set(subset)
    if not S:
        raise ValueError("subset must be nonempty")
    counts: dict[int, int] = {}
    for i in S:
        for j in H.cols[i]:
            counts[j] = counts.get(j, 0) + 1
    hits = sorted(j for j, c in counts.items() if c == 1)
    return hits[0] if hits else None
