"""Bundled structural verification at desk scale, for CI and the `verify`
CLI subcommand. Each check prints one PASS/FAIL line; the run is
deterministic for a fixed seed."""

from __future__ import annotations

import itertools
from typing import IO

import numpy as np

from .codes import enumerate_codewords, random_regular, verify_expansion
from .decoders import (
    FRACTIONAL,
    INTEGRAL,
    Exhaustive,
    Randomized,
    count_better_pseudocodewords,
    enumerate_vertices,
    facet_guess,
    lp_decode,
    ml_decode_bruteforce,
)
from .polytope import (
    active_set,
    active_set_bound,
    build_polytope,
    fractional_support,
    local_active_intersection,
    structure_constants,
)
from .simplex import certify_vertex, solve_decoding_lp


def _check(out: IO[str], name: str, ok: bool) -> bool:
    out.write(f"{name}={'PASS' if ok else 'FAIL'}\n")
    return bool(ok)


def run_verification(out: IO[str], seed: int = 0) -> bool:
    ok = True
    rng = np.random.default_rng(seed)

    # codeword active sets have exactly m*d_c + n members (exact arithmetic)
    H = random_regular(12, 3, 4, seed=seed)
    P = build_polytope(H)
    want = H.m * 4 + H.n
    sizes = {
        len(active_set(P, [int(v) for v in w], mode="exact"))
        for w in enumerate_codewords(H)
    }
    ok &= _check(out, "codeword_active_sets_exact", sizes == {want})

    # pairwise local active-set intersections stay <= 2 for distinct words
    good = True
    for d_c in range(3, 8):
        evens = [w for w in itertools.product((0, 1), repeat=d_c) if sum(w) % 2 == 0]
        for w1, w2 in itertools.combinations(evens, 2):
            if local_active_intersection(d_c, w1, w2) > 2:
                good = False
    ok &= _check(out, "local_intersection_bound", good)

    # harvested fractional vertices: no singly-fractional check, active-set
    # size within the support bound
    H2 = random_regular(40, 3, 4, seed=seed + 1)
    P2 = build_polytope(H2)
    harvested = 0
    good = True
    for _ in range(200):
        if harvested >= 10:
            break
        g = rng.standard_normal(H2.n)
        sol = solve_decoding_lp(P2, g)
        x = certify_vertex(P2, sol.basis)
        if all(v.denominator == 1 for v in x):
            continue
        harvested += 1
        sup = fractional_support(H2, x)
        for j in range(H2.m):
            if sum(1 for i in H2.rows[j] if x[i] not in (0, 1)) == 1:
                good = False
        if len(active_set(P2, x, mode="exact")) > active_set_bound(H2.m, 4, H2.n, sup):
            good = False
    ok &= _check(out, "fractional_vertex_structure", good and harvested >= 10)

    # fractional supports respect the verified expansion bound
    H3 = random_regular(24, 3, 4, seed=seed + 2)
    P3 = build_polytope(H3)
    cert = verify_expansion(H3, alpha=3 / 24, delta=0.51)
    good = cert.certifies
    found = 0
    for _ in range(200):
        if found >= 10:
            break
        g = rng.standard_normal(24)
        sol = solve_decoding_lp(P3, g)
        x = certify_vertex(P3, sol.basis)
        if all(v.denominator == 1 for v in x):
            continue
        found += 1
        sup = fractional_support(H3, x)
        if len(sup.bits) < cert.alpha * 24:
            good = False
        if len(sup.checks) < cert.delta * 3 * cert.alpha * 24:
            good = False
    ok &= _check(out, "fractional_support_bound", good and found >= 10)

    # census instance: exhaustive facet guessing recovers the ML word when
    # exactly one fractional vertex beats it, and a single randomized guess
    # succeeds at least at the structural rate
    H4 = random_regular(8, 3, 4, seed=4)
    P4 = build_polytope(H4)
    census = enumerate_vertices(P4, max_constraints=64)
    cert4 = verify_expansion(H4, alpha=1 / 8, delta=0.99)
    cs = structure_constants(H4.rate, 4, 3, alpha=1 / 8, delta=0.99)
    bound = cs.rfg_success_bound(1)
    good = cert4.certifies
    instances = 0
    for _ in range(400):
        if instances >= 3:
            break
        g = rng.standard_normal(8)
        outcome = lp_decode(P4, g)
        if outcome.status != FRACTIONAL:
            continue
        ml_word, _ = census.ml_codeword(g)
        if count_better_pseudocodewords(census, g, ml_word) != 1:
            continue
        instances += 1
        fixed = facet_guess(P4, g, lp_outcome=outcome, strategy=Exhaustive())
        if fixed.status != INTEGRAL or tuple(fixed.codeword) != ml_word:
            good = False
        hits = 0
        for s in range(400):
            r = facet_guess(P4, g, lp_outcome=outcome, strategy=Randomized(1, seed=s))
            hits += r.status == INTEGRAL and tuple(r.codeword) == ml_word
        if hits / 400 < bound:
            good = False
    ok &= _check(out, "facet_guessing_census", good and instances >= 3)

    # integral LP outputs match brute-force ML
    H5 = random_regular(8, 3, 4, seed=seed + 3)
    P5 = build_polytope(H5)
    good = True
    for _ in range(200):
        g = rng.standard_normal(8)
        outcome = lp_decode(P5, g)
        if outcome.status == INTEGRAL:
            ml = ml_decode_bruteforce(H5, g)
            if abs(float(g @ ml) - float(outcome.objective)) > 1e-9:
                good = False
    ok &= _check(out, "ml_certificate", good)

    out.write(f"result={'PASS' if ok else 'FAIL'}\n")
    return bool(ok)
