import random

import pytest
import sympy
from hypothesis import given, strategies as st

from deltaspec.constructions import aux_g, single_block
from deltaspec.errors import PreconditionError
from deltaspec.fields import PrimeField, make_cyclotomic, make_prime_field
from deltaspec.fourier import (DenseFunction, Spectrum, character_eval, character_function,
                               constant, delta_identity_check, forward, hypercube_identity,
                               indicator, inverse, is_delta_on, pointwise_mul, spectrum_is_delta_on,
                               spectrum_mul, total_delta)
from deltaspec.groups import GroupSpec, element_of, point_set, sumset

GRID = [(2,), (3,), (4,), (2, 2), (2, 3), (3, 3), (2, 2, 2), (4, 2), (5, 5), (3, 3, 3)]


def exact_fields(spec):
    return [make_prime_field(spec.exponent), make_cyclotomic(spec.exponent)]


def random_function(spec, F, rng, density=1.0):
    return DenseFunction(spec, F, [F.random(rng) if rng.random() < density else F.zero
                                   for _ in range(spec.order)])


def random_sparse(spec, F, rng, k):
    idx = rng.sample(range(spec.order), k)
    coeffs = {}
    for i in idx:
        c = F.zero
        while F.is_zero(c):
            c = F.random(rng)
        coeffs[element_of(spec, i)] = c
    return Spectrum(spec, F, coeffs)


def test_character_examples():
    s3 = GroupSpec((3,))
    F = make_prime_field(6)
    for x in s3.elements():
        assert character_eval(s3, F, (0,), x) == 1
    assert character_eval(s3, PrimeField(7, 3), (1,), (1,)) == 2
    assert character_eval(GroupSpec((2, 3)), F, (1, 2), (1, 1)) == 3


def test_character_is_homomorphism():
    spec = GroupSpec((4, 6))
    F = make_prime_field(12)
    rng = random.Random(0)
    for _ in range(50):
        a, x, y = (element_of(spec, rng.randrange(spec.order)) for _ in range(3))
        assert F.mul(character_eval(spec, F, a, x), character_eval(spec, F, a, y)) == \
            character_eval(spec, F, a, spec.add(x, y))


def test_character_matches_sympy_complex_roots():
    spec = GroupSpec((3, 4))
    C = make_cyclotomic(12)
    for a in spec.elements()[:6]:
        for x in spec.elements()[:6]:
            v = character_eval(spec, C, a, x)
            z = sympy.exp(2 * sympy.pi * sympy.I / 12)
            num = sum(sympy.Rational(c.numerator, c.denominator) * z ** k for k, c in enumerate(v))
            ref = sympy.exp(2 * sympy.pi * sympy.I * (sympy.Rational(a[0] * x[0], 3)
                                                      + sympy.Rational(a[1] * x[1], 4)))
            assert abs(complex(sympy.N(num - ref))) < 1e-12


def test_forward_examples():
    spec = GroupSpec((2, 3))
    F = make_prime_field(6)
    assert forward(constant(spec, F)).coeffs == {(0, 0): 1}
    assert forward(character_function(spec, F, (1, 2))).coeffs == {(1, 2): 1}
    s2 = GroupSpec((2,))
    F3 = PrimeField(3, 2)
    assert forward(indicator(s2, F3, (0,))).coeffs == {(0,): 2, (1,): 2}


def test_forward_rejects_missing_roots():
    # F_5 has no primitive cube root of unity
    with pytest.raises(PreconditionError):
        forward(DenseFunction(GroupSpec((3,)), PrimeField(5, 4), [0, 0, 0]))


def test_inverse_examples():
    spec = GroupSpec((3,))
    F = PrimeField(7, 3)
    assert inverse(Spectrum(spec, F, {(0,): 1})).values == [1, 1, 1]
    assert inverse(total_delta(spec, F)).values == [1, 0, 0]


def test_total_delta_examples():
    assert total_delta(GroupSpec((3,)), PrimeField(7, 3)).coeffs == {(0,): 5, (1,): 5, (2,): 5}
    assert total_delta(GroupSpec((2,)), PrimeField(3, 2)).coeffs == {(0,): 2, (1,): 2}


@pytest.mark.parametrize("mods", GRID)
def test_total_delta_coefficients(mods):
    spec = GroupSpec(mods)
    for F in exact_fields(spec):
        s = total_delta(spec, F)
        inv = F.inv(F.from_int(spec.order))
        assert s.sparsity == spec.order
        assert all(F.eq(c, inv) for c in s.coeffs.values())
        assert inverse(s).equals(indicator(spec, F, spec.zero))


@pytest.mark.parametrize("mods", GRID)
def test_roundtrips(mods):
    spec = GroupSpec(mods)
    rng = random.Random(hash(mods) & 0xffff)
    for F in exact_fields(spec):
        for _ in range(3):
            f = random_function(spec, F, rng, density=0.7)
            assert inverse(forward(f)).equals(f)
            s = random_sparse(spec, F, rng, min(4, spec.order))
            assert forward(inverse(s)).equals(s)


def test_forward_matches_naive_definition():
    spec = GroupSpec((3, 4))
    F = make_prime_field(12)
    rng = random.Random(3)
    f = random_function(spec, F, rng)
    got = forward(f)
    inv = F.inv(F.from_int(spec.order))
    for a in spec.elements():
        tot = F.sum(F.mul(f(x), character_eval(spec, F, a, spec.neg(x))) for x in spec.elements())
        assert F.eq(got.coeffs.get(a, F.zero), F.mul(tot, inv))


def test_pointwise_examples():
    spec = GroupSpec((5, 5))
    F = make_prime_field(5)
    rng = random.Random(7)
    f = random_function(spec, F, rng)
    assert pointwise_mul(f, constant(spec, F)).equals(f)
    assert pointwise_mul(f, constant(spec, F, F.zero)).equals(constant(spec, F, F.zero))
    with pytest.raises(PreconditionError):
        pointwise_mul(f, constant(GroupSpec((5,)), F))


@pytest.mark.parametrize("mods", [(5, 5), (3, 3), (2, 3), (4, 4)])
def test_convolution_support_and_product_bound(mods):
    spec = GroupSpec(mods)
    rng = random.Random(11)
    for F in exact_fields(spec):
        for _ in range(4):
            s = random_sparse(spec, F, rng, 3)
            t = random_sparse(spec, F, rng, 3)
            h = forward(pointwise_mul(inverse(s), inverse(t)))
            assert h.support() <= sumset(spec, s.support(), t.support())
            assert h.sparsity <= s.sparsity * t.sparsity
            assert h.equals(spectrum_mul(s, t))


def test_is_delta_examples():
    spec = GroupSpec((4, 4))
    F = make_prime_field(4)
    for kind in ("hypercube", "pm_cube", "full"):
        B = point_set(spec, kind)
        assert is_delta_on(indicator(spec, F, spec.zero), B)
        assert not is_delta_on(constant(spec, F), B)
    s = single_block(4, 2, F)
    assert is_delta_on(inverse(s), point_set(spec, "hypercube"))
    assert spectrum_is_delta_on(s, point_set(spec, "hypercube"))


def test_delta_identity_examples():
    F = make_prime_field(4)
    assert delta_identity_check(single_block(4, 2, F), trials=50)
    assert not delta_identity_check(Spectrum(GroupSpec((4, 4)), F, {(0, 0): 1}), trials=50)
    assert hypercube_identity(F, [(1, [])], [])


@pytest.mark.parametrize("mods", [(2,), (3, 3), (2, 3), (4, 2)])
def test_aux_g_gives_full_support(mods):
    # any hypercube delta f times g has full spectral support
    spec = GroupSpec(mods)
    F = make_cyclotomic(spec.exponent)
    from deltaspec.search import SearchProblem, min_sparsity
    res = min_sparsity(SearchProblem(spec, F, point_set(spec, "hypercube")))
    g, gs = aux_g(spec, F)
    h = forward(pointwise_mul(inverse(res.witness), g))
    assert h.sparsity == spec.order
    assert sumset(spec, res.witness.support(), gs.support()) == set(spec.elements())


@given(st.integers(0, 10 ** 6))
def test_random_sparse_is_not_delta_by_accident(seed):
    # the identity holds for deltas and almost never for random spectra; never in reverse
    spec = GroupSpec((3, 3))
    F = make_cyclotomic(3)
    s = random_sparse(spec, F, random.Random(seed), 3)
    if is_delta_on(inverse(s), point_set(spec, "hypercube")):
        assert delta_identity_check(s, trials=10, seed=seed)


def test_spectrum_json_roundtrip():
    s = single_block(3, 2, make_cyclotomic(3))
    back = Spectrum.from_json(s.to_json())
    assert back.equals(s)
    assert s.to_json()["moduli"] == [3, 3]
    assert {tuple(t["a"]) for t in s.to_json()["coeffs"]} == {(0, 0), (1, 1), (2, 2)}
    f = inverse(s)
    assert DenseFunction.from_json(f.to_json()).equals(f)
