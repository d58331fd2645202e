import pytest

from pseudopoly.codes import ParityCheckMatrix, random_regular
from pseudopoly.decoders import enumerate_vertices
from pseudopoly.polytope import build_polytope

HAMMING_ROWS = ((0, 2, 4, 6), (1, 2, 5, 6), (3, 4, 5, 6))

HAMMING_ALIST = """7 3
3 4
1 1 2 1 2 2 3
4 4 4
1
2
1 2
3
1 3
2 3
1 2 3
1 3 5 7
2 3 6 7
4 5 6 7
"""


@pytest.fixture(scope="session")
def hamming():
    return ParityCheckMatrix(7, HAMMING_ROWS)


@pytest.fixture(scope="session")
def hamming_polytope(hamming):
    return build_polytope(hamming)


@pytest.fixture(scope="session")
def hamming_census(hamming_polytope):
    return enumerate_vertices(hamming_polytope)


@pytest.fixture(scope="session")
def single_check():
    return ParityCheckMatrix(3, [[0, 1, 2]])


@pytest.fixture(scope="session")
def single_check_polytope(single_check):
    return build_polytope(single_check)


@pytest.fixture(scope="session")
def k4_code():
    # incidence matrix of K4: bits are edges, checks are vertices
    return ParityCheckMatrix(6, [[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]])


@pytest.fixture(scope="session")
def n8_code():
    return random_regular(8, 3, 4, seed=4)


@pytest.fixture(scope="session")
def n8_polytope(n8_code):
    return build_polytope(n8_code)


@pytest.fixture(scope="session")
def n8_census(n8_polytope):
    return enumerate_vertices(n8_polytope, max_constraints=64)
