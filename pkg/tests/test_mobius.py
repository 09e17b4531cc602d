import pytest

from deltaspec.errors import PreconditionError
from deltaspec.fields import make_cyclotomic, make_prime_field
from deltaspec.mobius import check_certificate, mobius_multilinear, random_triples, verify_r2_lower


def _roots(F, m, exps):
    w = F.root_of_unity(m)
    return [F.power(w, a % m) for a in exps]


def test_case_one_formula():
    C = make_cyclotomic(6)
    a, b = [0, 0, 1], [0, 1, 2]
    cert = mobius_multilinear(2, 3, a, b, C)
    al, be = _roots(C, 2, a), _roots(C, 3, b)
    assert cert.case == 1
    want = (C.mul(al[0], be[2]), C.neg(be[2]), C.neg(al[0]), C.one)
    assert all(C.eq(x, y) for x, y in zip(cert.v, want))
    assert check_certificate(cert, 2, 3, a, b)


def test_two_three_pigeonhole():
    # alpha = (1, -1, 1): alpha_1 = alpha_3, so the equal-pair branch applies
    for b in ([0, 1, 2], [1, 1, 0], [2, 0, 1]):
        cert = mobius_multilinear(2, 3, [0, 1, 0], b)
        assert cert.case in (1, 2)
        assert check_certificate(cert, 2, 3, [0, 1, 0], b)
    for a, b in random_triples(2, 3, 50, seed=3):
        assert mobius_multilinear(2, 3, a, b).case in (1, 2)


def test_case_two_and_three():
    cert = mobius_multilinear(3, 5, [0, 1, 2], [4, 4, 1])
    assert cert.case == 2 and check_certificate(cert, 3, 5, [0, 1, 2], [4, 4, 1])
    cert = mobius_multilinear(3, 5, [0, 1, 2], [0, 1, 3])
    assert cert.case == 3 and check_certificate(cert, 3, 5, [0, 1, 2], [0, 1, 3])


@pytest.mark.parametrize("m1,m2", [(2, 3), (2, 5), (3, 5), (3, 4), (4, 5)])
def test_random_triples(m1, m2):
    for a, b in random_triples(m1, m2, 200, seed=0):
        cert = mobius_multilinear(m1, m2, a, b)
        assert cert.hypothesis_ok
        assert check_certificate(cert, m1, m2, a, b)
        F = cert.field
        assert not F.is_zero(cert.evaluate(F.zero, F.zero))


def test_hypothesis_violation_is_flagged():
    cert = mobius_multilinear(3, 3, [0, 1, 2], [0, 1, 2])
    assert not cert.hypothesis_ok and not cert.ok
    assert cert.to_json()["v"] is None
    with pytest.raises(PreconditionError):
        mobius_multilinear(3, 5, [0, 1], [0, 1])
    with pytest.raises(PreconditionError):
        mobius_multilinear(3, 5, [0, 1, 2], [0, 1, 3], make_prime_field(15))


@pytest.mark.parametrize("m1,m2", [(2, 3), (2, 5), (3, 5)])
def test_verify_r2_lower(m1, m2):
    assert verify_r2_lower(m1, m2)


def test_verify_r2_lower_rejects_common_factor():
    with pytest.raises(PreconditionError):
        verify_r2_lower(3, 3)
