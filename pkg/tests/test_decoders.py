import io
import itertools
from fractions import Fraction

import numpy as np
import pytest

from pseudopoly.codes import (
    BudgetExceededError,
    ParityCheckMatrix,
    enumerate_codewords,
    random_regular,
    syndrome,
)
from pseudopoly.decoders import (
    FRACTIONAL,
    INTEGRAL,
    NO_INTEGRAL,
    EmptyFacetPoolError,
    Exhaustive,
    Randomized,
    count_better_pseudocodewords,
    enumerate_vertices,
    facet_guess,
    format_outcome,
    lp_decode,
    ml_decode_bruteforce,
    read_llr,
    sum_product_decode,
    write_llr,
)
from pseudopoly.polytope import active_set, build_polytope, fractional_support
from pseudopoly.simplex import SolverError, _fraction_rank, _solve_fraction_system

ADVERSARIAL_HAMMING_LLR = np.array([0.581, 0.365, 0.294, 0.028, 0.547, -0.736, -0.163])


class TestLpDecode:
    def test_positive_cost(self, hamming_polytope):
        out = lp_decode(hamming_polytope, np.ones(7))
        assert out.status == INTEGRAL
        assert out.ml_certified
        assert not out.codeword.any()
        assert out.objective == pytest.approx(0.0)

    def test_adversarial_fractional(self, hamming, hamming_polytope):
        out = lp_decode(hamming_polytope, ADVERSARIAL_HAMMING_LLR)
        assert out.status == FRACTIONAL
        assert fractional_support(hamming, out.point).bits
        # some codeword has strictly larger objective than the LP optimum
        ml = ml_decode_bruteforce(hamming, ADVERSARIAL_HAMMING_LLR)
        assert float(ADVERSARIAL_HAMMING_LLR @ ml) > float(out.objective) + 1e-9

    def test_integral_matches_bruteforce(self, hamming, hamming_polytope):
        rng = np.random.default_rng(12)
        checked = 0
        for _ in range(300):
            g = rng.standard_normal(7)
            out = lp_decode(hamming_polytope, g)
            if out.status != INTEGRAL:
                continue
            checked += 1
            ml = ml_decode_bruteforce(hamming, g)
            assert float(g @ ml) == pytest.approx(float(out.objective), abs=1e-9)
            assert np.array_equal(out.codeword, ml)
        assert checked > 100

    def test_exact_mode_point(self, hamming_polytope):
        out = lp_decode(hamming_polytope, ADVERSARIAL_HAMMING_LLR, mode="exact")
        assert out.status == FRACTIONAL
        assert all(isinstance(v, Fraction) for v in out.point)


class TestMlBruteforce:
    def test_positive(self, hamming):
        assert not ml_decode_bruteforce(hamming, np.ones(7)).any()

    def test_single_check_example(self, single_check):
        word = ml_decode_bruteforce(single_check, [-1.0, -1.0, 3.0])
        assert word.tolist() == [1, 1, 0]
        assert float(np.dot([-1.0, -1.0, 3.0], word)) == pytest.approx(-2.0)

    def test_tie_breaks_lexicographically(self, single_check):
        # 000 and 110 tie at objective 0
        word = ml_decode_bruteforce(single_check, [0.0, 0.0, 2.0])
        assert word.tolist() == [0, 0, 0]


class TestFacetGuess:
    def test_integral_input_returned_unchanged(self, hamming_polytope):
        base = lp_decode(hamming_polytope, np.ones(7))
        out = facet_guess(hamming_polytope, np.ones(7), lp_outcome=base)
        assert out is base
        assert out.guesses_used == 0

    def test_exhaustive_pool_is_inactive_constraints(self, hamming_polytope):
        g = ADVERSARIAL_HAMMING_LLR
        base = lp_decode(hamming_polytope, g)
        out = facet_guess(hamming_polytope, g, lp_outcome=base, strategy=Exhaustive())
        act = active_set(hamming_polytope, base.point)
        pool_size = len(hamming_polytope.constraints) - len(act)
        assert out.guesses_used == pool_size
        assert [t.facet for t in out.facet_trace] == sorted(
            i for i in range(len(hamming_polytope.constraints)) if i not in act.indices
        )

    def test_exhaustive_recovers_ml_on_adversarial(self, hamming, hamming_polytope):
        g = ADVERSARIAL_HAMMING_LLR
        out = facet_guess(hamming_polytope, g, strategy=Exhaustive())
        assert out.status == INTEGRAL
        assert np.array_equal(out.codeword, ml_decode_bruteforce(hamming, g))

    def test_randomized_deterministic(self, hamming_polytope):
        g = ADVERSARIAL_HAMMING_LLR
        base = lp_decode(hamming_polytope, g)
        a = facet_guess(hamming_polytope, g, lp_outcome=base, strategy=Randomized(5, seed=3))
        b = facet_guess(hamming_polytope, g, lp_outcome=base, strategy=Randomized(5, seed=3))
        assert [t.facet for t in a.facet_trace] == [t.facet for t in b.facet_trace]
        assert a.guesses_used == 5

    def test_randomized_budget_clamped(self, hamming_polytope):
        g = ADVERSARIAL_HAMMING_LLR
        base = lp_decode(hamming_polytope, g)
        out = facet_guess(hamming_polytope, g, lp_outcome=base, strategy=Randomized(10_000, seed=0))
        act = active_set(hamming_polytope, base.point)
        assert out.guesses_used == len(hamming_polytope.constraints) - len(act)

    def test_objective_dominance(self, hamming, hamming_polytope):
        rng = np.random.default_rng(21)
        done = 0
        while done < 10:
            g = rng.standard_normal(7)
            base = lp_decode(hamming_polytope, g)
            if base.status != FRACTIONAL:
                continue
            done += 1
            out = facet_guess(hamming_polytope, g, lp_outcome=base, strategy=Exhaustive())
            if out.status != INTEGRAL:
                continue
            # never better than the LP bound, never worse than any integral guess
            assert float(out.objective) >= float(base.objective) - 1e-9
            integral_objs = [t.objective for t in out.facet_trace if t.integral]
            assert float(out.objective) == pytest.approx(min(integral_objs), abs=1e-12)
            assert not syndrome(hamming, out.codeword).any()

    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            Randomized(0, seed=1)

    def test_empty_pool_error(self, hamming_polytope, monkeypatch):
        # no real point activates every constraint (upper and lower box of a
        # bit are mutually exclusive), so force the degenerate pool
        import pseudopoly.decoders as decoders_mod

        g = ADVERSARIAL_HAMMING_LLR
        base = lp_decode(hamming_polytope, g)
        everything = active_set(hamming_polytope, base.point)
        monkeypatch.setattr(
            decoders_mod,
            "active_set",
            lambda *a, **k: type(everything)(
                frozenset(range(len(hamming_polytope.constraints))), "float", 1e-9
            ),
        )
        with pytest.raises(EmptyFacetPoolError):
            facet_guess(hamming_polytope, g, lp_outcome=base)


class TestSumProduct:
    def test_strong_positive(self, hamming):
        out = sum_product_decode(hamming, np.full(7, 10.0), max_iters=100)
        assert out.status == INTEGRAL
        assert not out.codeword.any()

    def test_tree_matches_ml_when_converged(self):
        tree = ParityCheckMatrix(7, [[0, 1, 2], [2, 3, 4], [4, 5, 6]])
        rng = np.random.default_rng(5)
        converged = 0
        for _ in range(150):
            g = rng.standard_normal(7) * 2
            out = sum_product_decode(tree, g, max_iters=50)
            if out.status == INTEGRAL:
                converged += 1
                assert np.array_equal(out.codeword, ml_decode_bruteforce(tree, g))
        assert converged >= 100

    def test_deterministic(self, hamming):
        g = np.array([0.3, -1.2, 0.9, -0.1, 0.4, -0.8, 1.1])
        a = sum_product_decode(hamming, g, max_iters=20)
        b = sum_product_decode(hamming, g, max_iters=20)
        assert a.status == b.status
        assert np.array_equal(a.point, b.point)

    def test_nonconvergence_reports_hard_decision(self, hamming):
        # skewed costs that keep flipping: force max_iters=1 to observe the
        # attached hard decision
        g = np.array([0.01, -0.01, 0.02, -0.02, 0.01, -0.01, 0.005])
        out = sum_product_decode(hamming, g, max_iters=1)
        assert out.status in (INTEGRAL, NO_INTEGRAL)
        assert set(np.unique(out.point)).issubset({0.0, 1.0})

    def test_max_iters_validation(self, hamming):
        with pytest.raises(ValueError):
            sum_product_decode(hamming, np.zeros(7), max_iters=0)


def _brute_force_vertices(P):
    out = set()
    n = P.n
    for combo in itertools.combinations(range(len(P.constraints)), n):
        rows, rhs = [], []
        for idx in combo:
            c = P.constraints[idx]
            row = [0] * n
            for i, co in zip(c.cols, c.coeffs):
                row[i] = co
            rows.append(row)
            rhs.append(c.rhs)
        try:
            x = _solve_fraction_system(rows, rhs)
        except SolverError:
            continue
        if all(c.evaluate(x) >= c.rhs for c in P.constraints):
            out.add(tuple(x))
    return out


class TestCensus:
    def test_single_check_exactly_local_codewords(self, single_check_polytope):
        census = enumerate_vertices(single_check_polytope)
        words = {tuple(int(v) for v in x.point) for x in census.integral_vertices}
        assert words == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
        assert not census.fractional_vertices

    def test_matches_brute_force_small(self):
        H = ParityCheckMatrix(5, [[0, 1, 2], [2, 3, 4]])
        P = build_polytope(H)
        dd = {v.point for v in enumerate_vertices(P).vertices}
        assert dd == _brute_force_vertices(P)

    def test_k4_relaxation_is_exact(self, k4_code):
        # the K4 cycle-code relaxation is exact: vertices are the 8 codewords
        P = build_polytope(k4_code)
        census = enumerate_vertices(P)
        assert not census.fractional_vertices
        words = {tuple(w) for w in enumerate_codewords(k4_code)}
        assert {tuple(int(v) for v in x.point) for x in census.vertices} == words

    def test_hamming_census(self, hamming, hamming_census):
        census = hamming_census
        words = {tuple(w) for w in enumerate_codewords(hamming)}
        integral = {tuple(int(v) for v in x.point) for x in census.integral_vertices}
        assert integral == words
        assert census.fractional_vertices
        # contains half-integral fractional vertices
        assert any(
            all(x.denominator in (1, 2) for x in v.point) and not v.integral
            for v in census.vertices
        )

    def test_census_soundness(self, hamming_polytope, hamming_census):
        P = hamming_polytope
        for v in hamming_census.vertices:
            for c in P.constraints:
                assert c.evaluate(v.point) >= c.rhs
            rows = []
            for ci in sorted(v.active):
                c = P.constraints[ci]
                row = [Fraction(0)] * 7
                for i, co in zip(c.cols, c.coeffs):
                    row[i] = Fraction(co)
                rows.append(row)
            assert _fraction_rank(rows) == 7
            assert v.active == active_set(P, list(v.point), mode="exact").indices

    def test_lp_optimum_in_census(self, hamming_polytope, hamming_census):
        pts = {v.point for v in hamming_census.vertices}
        rng = np.random.default_rng(9)
        for _ in range(60):
            g = rng.standard_normal(7)
            out = lp_decode(hamming_polytope, g, mode="exact")
            assert tuple(out.point) in pts

    def test_budget_guard(self):
        H = random_regular(12, 3, 4, seed=0)
        with pytest.raises(BudgetExceededError):
            enumerate_vertices(build_polytope(H))


class TestCountBetter:
    def test_positive_cost_zero(self, hamming_census):
        g = np.ones(7)
        ml_word, _ = hamming_census.ml_codeword(g)
        assert ml_word == (0,) * 7
        assert count_better_pseudocodewords(hamming_census, g, ml_word) == 0

    def test_definitional_equivalence_with_lp(self, hamming, hamming_polytope, hamming_census):
        # C1 = 0 iff plain LP decoding returns the integral ML output
        rng = np.random.default_rng(17)
        for _ in range(300):
            g = rng.standard_normal(7)
            ml_word, _ = hamming_census.ml_codeword(g)
            c1 = count_better_pseudocodewords(hamming_census, g, ml_word)
            out = lp_decode(hamming_polytope, g)
            if c1 == 0:
                assert out.status == INTEGRAL
                assert tuple(out.codeword) == ml_word
            else:
                assert out.status == FRACTIONAL

    def test_census_recount(self, n8_census):
        g = np.asarray([0.1, -0.9, 0.4, 0.3, -0.2, 0.8, -0.5, 0.6])
        ml_word, ml_obj = n8_census.ml_codeword(g)
        c1 = count_better_pseudocodewords(n8_census, g, ml_word)
        manual = sum(
            1
            for v in n8_census.fractional_vertices
            if float(n8_census.objective(v, g)) < float(ml_obj) - 1e-12
        )
        assert c1 == manual


class TestTextFormats:
    def test_llr_roundtrip(self):
        g = np.array([0.125, -3.5, 2.0 ** -18])
        buf = io.StringIO()
        write_llr(g, buf)
        buf.seek(0)
        assert np.array_equal(read_llr(buf), g)

    def test_llr_rejects_garbage(self):
        with pytest.raises(ValueError, match="line 2"):
            read_llr(io.StringIO("1.0\nnope\n"))

    def test_outcome_record(self, hamming_polytope):
        out = lp_decode(hamming_polytope, np.ones(7))
        rec = format_outcome(out)
        lines = rec.splitlines()
        assert lines[0] == "status=integral"
        assert lines[1].startswith("objective=")
        assert lines[2] == "point=" + " ".join(["0"] * 7)
        assert lines[3] == "guesses_used=0"
