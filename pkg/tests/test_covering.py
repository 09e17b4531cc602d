import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from deltaspec.constructions import covering_recursion
from deltaspec.covering import covering_number_exact, covers, punctured_box
from deltaspec.errors import BudgetExceededError, PreconditionError
from deltaspec.fields import make_prime_field
from deltaspec.groups import GroupSpec, point_set
from deltaspec.search import SearchProblem, min_sparsity


def brute_force_F(spec):
    els = spec.elements()
    H = [x for x in els if all(x)]
    for k in range(1, spec.order + 1):
        for S in itertools.combinations(els, k):
            if len({spec.add(s, h) for s in S for h in H}) == spec.order:
                return k


def test_examples():
    F, S = covering_number_exact(GroupSpec((3,)))
    assert F == 2 and covers(GroupSpec((3,)), S) and (0,) in S
    F, S = covering_number_exact(GroupSpec((3, 3)))
    assert F == 3 and sorted(S) == [(0, 0), (1, 1), (2, 2)]
    assert covering_number_exact(GroupSpec((2,)))[0] == 2


@settings(max_examples=25)
@given(st.lists(st.integers(2, 5), min_size=1, max_size=3).filter(lambda m: math.prod(m) <= 30))
def test_matches_brute_force(mods):
    spec = GroupSpec(tuple(mods))
    F, S = covering_number_exact(spec)
    assert F == brute_force_F(spec) == len(S)
    assert covers(spec, S)
    assert F >= covering_recursion(tuple(sorted(mods)))


@pytest.mark.parametrize("mods,want", [((3, 3, 3), 5), ((2, 3), 4), ((4, 4), 3),
                                       ((2, 3, 5), 6), ((2, 2, 2), 8), ((5, 5, 5), 4)])
def test_known_values(mods, want):
    spec = GroupSpec(mods)
    F, S = covering_number_exact(spec)
    assert F == want and covers(spec, S)


@pytest.mark.parametrize("mods,backend", [((2, 3), "cyclo"), ((3, 3, 3), "fp"),
                                          ((4, 4), "fp"), ((2, 2, 2), "fp")])
def test_covering_below_sparsity(mods, backend):
    spec = GroupSpec(mods)
    from deltaspec.fields import field_for
    res = min_sparsity(SearchProblem(spec, field_for(spec.exponent, backend),
                                     point_set(spec, "hypercube")))
    assert covering_number_exact(spec)[0] <= res.min_t


def test_limits():
    with pytest.raises(PreconditionError):
        covering_number_exact(GroupSpec((2,) * 13))
    with pytest.raises(BudgetExceededError) as err:
        covering_number_exact(GroupSpec((3,) * 5), node_budget=50)
    prog = err.value.progress
    assert prog["lower_bound"] <= prog["incumbent"]
    assert len(punctured_box(GroupSpec((3, 4)))) == 6
