import math
from fractions import Fraction

import pytest

from poolgraph.combinatorics import binomial
from poolgraph.detection import NODE, SOCKET, Algorithm
from poolgraph.ensemble import regular_spec
from poolgraph.enumerator import build_table, fa_probability, md_probability
from poolgraph.errors import SizeLimitError
from poolgraph.oracle import exact_enumerators, exact_error_probability


def test_comp_oracle_matches_closed_form_per_cell():
    spec = regular_spec(4, 1, 2)
    report = exact_enumerators(spec, Algorithm.COMP)
    closed = build_table(spec, Algorithm.COMP)
    assert report.exact_table.keys() == closed.values.keys()
    for key, value in report.exact_table.items():
        assert value == closed.values[key], key


def test_dd_oracle_matches_closed_form_per_cell():
    spec = regular_spec(2, 1, 2)
    report = exact_enumerators(spec, Algorithm.DD)
    closed = build_table(spec, Algorithm.DD)
    for key, value in report.exact_table.items():
        assert value == closed.values[key], key


def test_oracle_walks_every_matching():
    spec = regular_spec(4, 1, 2)
    report = exact_enumerators(spec, Algorithm.COMP)
    assert report.matchings_enumerated == math.factorial(spec.edge_count)


def test_oracle_table_rows_sum_to_pattern_counts():
    spec = regular_spec(4, 1, 2)
    report = exact_enumerators(spec, Algorithm.COMP)
    table = report.as_table()
    assert table.source == "oracle"
    table.check_row_sums()
    sums = table.row_sums()
    assert sums == {a: binomial(spec.n, a) for a in range(spec.n + 1)}


@pytest.mark.parametrize("delta", [0, 1, Fraction(1, 2), Fraction(1, 3)])
def test_direct_expectation_agrees_with_table_route(delta):
    # exact_error_probability never builds a table; fa/md_probability only
    # consume one. Agreement means two independent aggregations coincide.
    spec = regular_spec(4, 1, 2)
    report = exact_enumerators(spec, Algorithm.COMP)
    direct = exact_error_probability(spec, Algorithm.COMP, delta)
    assert direct == fa_probability(report.as_table(), delta)

    spec = regular_spec(2, 1, 2)
    report = exact_enumerators(spec, Algorithm.DD)
    direct = exact_error_probability(spec, Algorithm.DD, delta)
    assert direct == md_probability(report.as_table(), delta)


def test_frozen_error_probabilities():
    half = Fraction(1, 2)
    assert exact_error_probability(regular_spec(4, 1, 2), Algorithm.COMP, half) == Fraction(7, 12)
    assert exact_error_probability(regular_spec(2, 1, 2), Algorithm.DD, half) == Fraction(3, 4)
    assert exact_error_probability(regular_spec(2, 1, 2), Algorithm.DD, 1) == 1


def test_socket_certification_counts_multi_edges():
    # n=2, l=2, m=2, r=2 forces double edges often enough that the two
    # certification rules genuinely disagree.
    spec = regular_spec(2, 2, 2)
    socket = exact_enumerators(spec, Algorithm.DD, uniqueness=SOCKET)
    node = exact_enumerators(spec, Algorithm.DD, uniqueness=NODE)
    assert socket.uniqueness == SOCKET
    assert node.uniqueness == NODE

    # A doubled edge fills both sockets of its test, so nothing is ever
    # certified: every defective set is missed wholesale.
    nonzero = {k: v for k, v in socket.exact_table.items() if v}
    assert nonzero == {(0, 0): Fraction(1), (1, 1): Fraction(2), (2, 2): Fraction(1)}

    nonzero = {k: v for k, v in node.exact_table.items() if v}
    assert nonzero == {
        (0, 0): Fraction(1),
        (1, 0): Fraction(2, 3),
        (1, 1): Fraction(4, 3),
        (2, 0): Fraction(1, 3),
        (2, 2): Fraction(2, 3),
    }

    half = Fraction(1, 2)
    assert exact_error_probability(spec, Algorithm.DD, half, uniqueness=SOCKET) == Fraction(3, 4)
    assert exact_error_probability(spec, Algorithm.DD, half, uniqueness=NODE) == Fraction(1, 2)


def test_refuses_oversized_ensembles():
    with pytest.raises(SizeLimitError):
        exact_enumerators(regular_spec(30, 3, 6), Algorithm.COMP)
    # 8! matchings alone fit in 10^5; crossed with 2^4 patterns they do not.
    with pytest.raises(SizeLimitError, match="100000"):
        exact_error_probability(regular_spec(4, 2, 2), Algorithm.DD, Fraction(1, 2), limit=10**5)
    with pytest.raises(SizeLimitError):
        exact_enumerators(regular_spec(4, 2, 2), Algorithm.DD, limit=10**3)


def test_delta_validation():
    spec = regular_spec(2, 1, 2)
    with pytest.raises(TypeError):
        exact_error_probability(spec, Algorithm.DD, 0.5)
    with pytest.raises(ValueError):
        exact_error_probability(spec, Algorithm.DD, Fraction(3, 2))
    with pytest.raises(ValueError):
        exact_error_probability(spec, Algorithm.DD, -1)


def test_unknown_uniqueness_rejected():
    with pytest.raises(ValueError, match="uniqueness"):
        exact_enumerators(regular_spec(2, 1, 2), Algorithm.DD, uniqueness="edge")
