import math

import pytest
from hypothesis import given, strategies as st

from deltaspec.errors import PreconditionError
from deltaspec.pir import LABEL, _solve_log_dimension, pir_params, pir_table


def test_example_r2():
    rep = pir_params(2, 10 ** 6, 3)
    j = rep.to_json()
    assert j["label"] == LABEL == "shape-only"
    assert j["feasible"] and j["required_servers"] == 3 and j["servers"] == 3
    assert j["communication"] == "O(k)"
    # ln ln 10^6 = 2 ln L - ln ln L
    L = rep.log_k
    assert math.isclose(L ** 2 / math.log(L), math.log(10 ** 6), rel_tol=1e-9)


def test_lower_bound_direct_formula():
    rep = pir_params(2, 2 ** 64, 3)
    direct = math.exp((64 * math.log(2)) ** (1 / 3))
    assert rep.to_json()["lower_bound_communication"] == float(f"{direct:.6g}")
    assert rep.to_json()["n"] == str(2 ** 64)


def test_infeasible_below_r_plus_one():
    assert not pir_params(3, 10 ** 6, 3).feasible
    assert pir_params(3, 10 ** 6, 4).feasible
    assert [p.feasible for p in pir_table(2, 1000, range(1, 5))] == [False, False, True, True]


@given(st.integers(2, 6), st.floats(1.5, 1e6))
def test_bisection_solves_equation(r, log_n):
    L, clamped = _solve_log_dimension(r, log_n)
    assert L >= math.e
    if clamped:
        assert log_n <= math.e ** r
    else:
        assert math.isclose(L ** r / math.log(L) ** (r - 1), log_n, rel_tol=1e-9)


@given(st.integers(2, 5), st.integers(3, 60))
def test_dimension_monotone_in_n(r, bits):
    a = pir_params(r, 2 ** bits).log_k
    b = pir_params(r, 2 ** (bits + 1)).log_k
    assert b >= a


def test_errors():
    for args in [(1, 100), (2, 1), (2, 100, 0)]:
        with pytest.raises(PreconditionError):
            pir_params(*args)
