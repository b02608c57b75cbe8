from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quartlines.errors import (
    CompositeModulus,
    DenominatorNotInvertible,
    NoSquareRootInField,
    TooSmallPrime,
)
from quartlines.field import SurdRational, embed_surd, field_make, field_sqrt, least_nonresidue


def test_prime_field():
    F = field_make(7)
    assert F.q == 7
    assert len(F.elements()) == 7


def test_quadratic_extension_uses_least_nonresidue():
    F = field_make(5, 2)
    assert F.q == 25
    assert F.nonresidue == 2
    assert F.irreducible == (1, 0, 3)  # t^2 - 2
    assert least_nonresidue(5) == 2


def test_bad_moduli():
    with pytest.raises(CompositeModulus):
        field_make(4)
    with pytest.raises(TooSmallPrime):
        field_make(3)
    assert field_make(3, allow_small=True).q == 3


def test_sqrt_examples():
    F29 = field_make(29)
    assert field_sqrt(F29, 7) == 6
    assert field_sqrt(field_make(7), 0) == 0
    assert field_sqrt(field_make(5), 7) is None
    r = field_sqrt(field_make(5, 2), 7)
    assert r is not None and r * r == 2


def test_embed_surd_examples():
    F = field_make(29)
    assert embed_surd(F, SurdRational(-5, 1, 7)) == 1
    assert embed_surd(F, SurdRational(-5, -1, 7)) == 18
    assert embed_surd(field_make(13), SurdRational(1, 0, 3)) == 1


def test_embed_errors():
    with pytest.raises(NoSquareRootInField):
        embed_surd(field_make(5), SurdRational(0, 1, 7))
    with pytest.raises(DenominatorNotInvertible):
        field_make(7).element(Fraction(1, 7))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 168), st.integers(1, 168), st.integers(0, 168))
def test_extension_field_axioms(a, b, c):
    F = field_make(13, 2)
    x, y, z = F.decode(a), F.decode(b), F.decode(c)
    assert (x + y) * z == x * z + y * z
    assert y * y.inverse() == 1
    assert (x - y) + y == x
    assert x ** 169 == x


def test_square_roots_are_exhaustive():
    for F in (field_make(11), field_make(5, 2)):
        squares = {x * x for x in F.elements()}
        for a in F.elements():
            r = field_sqrt(F, a)
            assert (r is not None) == (a in squares)
            if r is not None:
                assert r * r == a
