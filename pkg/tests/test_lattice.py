from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import BRYAN_LEUNG, U, VINBERG_1, VINBERG_2, even_grams, unimodular
from k3cert.exceptions import DimensionError, InvalidInputError, UnsupportedRankError
from k3cert.lattice import (Lattice, _transform, determinant, diagonalize,
                            divisibility_violations, form_signature, is_primitive,
                            lattice_isomorphic, pair)


def eigen_oracle(g):
    m = sympy.Matrix(g)
    zero = m.shape[0] - m.rank()
    ev = np.linalg.eigvalsh(np.array(g, dtype=float))
    pos = int(sum(ev > 1e-9))
    return pos, m.shape[0] - zero - pos, zero


class TestValidation:
    def test_odd_diagonal_rejected(self):
        with pytest.raises(InvalidInputError, match="even"):
            Lattice(((1, 0), (0, 2)))

    def test_asymmetric_rejected(self):
        with pytest.raises(InvalidInputError, match="symmetric"):
            Lattice(((0, 1), (2, 0)))

    @pytest.mark.parametrize("gram", [(), ((0, 1),), ((0, 1), (1,))])
    def test_bad_shape(self, gram):
        with pytest.raises(InvalidInputError):
            Lattice(gram)

    def test_float_entries_rejected(self):
        with pytest.raises(InvalidInputError):
            Lattice(((0.0, 1), (1, 0)))

    def test_coordinate_count(self, u):
        with pytest.raises(DimensionError):
            u.vector((1, 2, 3))

    def test_mixed_lattices(self, u, bl):
        with pytest.raises(DimensionError):
            pair(u.vector((1, 0)), bl.vector((1, 0)))

    def test_name_does_not_affect_equality(self):
        assert Lattice(U, name="a") == Lattice(U, name="b")


class TestKnownValues:
    def test_hyperbolic_plane(self, u):
        assert pair(u.vector((1, 0)), u.vector((0, 1))) == 1
        assert u.signature == (1, 1, 0)
        assert u.discriminant == -1

    def test_bryan_leung(self, bl):
        c3f = bl.vector((1, 3))
        assert pair(c3f, c3f) == 4
        assert bl.signature == (1, 1, 0)
        assert bl.discriminant == -1

    def test_zero_vector(self, u):
        z = u.zero()
        assert pair(z, z) == 0

    @pytest.mark.parametrize("gram, sig, det", [
        (VINBERG_1, (1, 3, 0), -28),
        (VINBERG_2, (1, 3, 0), -60),
        (((2, 0), (0, -2)), (1, 1, 0), -4),
        (((6,),), (1, 0, 0), 6),
        (((0, 0), (0, 0)), (0, 0, 2), 0),
    ])
    def test_signature_and_det(self, gram, sig, det):
        lat = Lattice(gram)
        assert lat.signature == sig
        assert lat.discriminant == det
        assert lat.discriminant == int(sympy.Matrix(gram).det())

    def test_zero_diagonal_pivot(self):
        # every diagonal entry vanishes, forcing the e_i + e_j pivot
        assert diagonalize(U)[0] == 2
        assert Lattice(((0, 2, 0), (2, 0, 1), (0, 1, 0))).signature == (1, 1, 1)


class TestPrimitivity:
    @pytest.mark.parametrize("coords, expected", [((1, 0), True), ((3, 9), False),
                                                  ((1, 3), True)])
    def test_examples(self, bl, coords, expected):
        assert is_primitive(bl.vector(coords)) is expected

    def test_zero_raises(self, u):
        with pytest.raises(InvalidInputError):
            is_primitive(u.zero())

    def test_divisibility(self, u):
        assert divisibility_violations(u.vector((2, 4)), u.vector((1, 0))).in_twice_lattice
        clear = divisibility_violations(u.vector((1, 0)), u.vector((0, 1)))
        assert clear.clear and clear.multiple is None
        bad = divisibility_violations(u.vector((4, 6)), u.vector((1, 0)))
        assert bad.multiple == 3 and bad.difference_violation

    def test_equal_classes_violate(self, u):
        rep = divisibility_violations(u.vector((1, 2)), u.vector((1, 2)))
        assert rep.multiple == 0 and not rep.clear


class TestIsomorphism:
    def test_identity(self, u):
        assert lattice_isomorphic(u, u) == ((1, 0), (0, 1))

    def test_discriminant_mismatch(self, u):
        assert lattice_isomorphic(u, Lattice(((2, 0), (0, -2)))) is None

    def test_vinberg_pair(self):
        assert lattice_isomorphic(Lattice(VINBERG_1), Lattice(VINBERG_2)) is None

    def test_rank_limit(self):
        g = [[2 * (i == j) for j in range(5)] for i in range(5)]
        with pytest.raises(UnsupportedRankError):
            lattice_isomorphic(Lattice(g), Lattice(g))

    def test_bryan_leung_is_u(self, u, bl):
        # both even unimodular of signature (1,1)
        t = lattice_isomorphic(u, bl)
        assert t is not None
        assert _transform(t, u.gram) == [list(r) for r in bl.gram]


@given(even_grams(), st.data())
def test_pair_bilinear_symmetric(g, data):
    lat = Lattice(g)
    r = lat.rank
    vec = st.lists(st.integers(-5, 5), min_size=r, max_size=r)
    u, v, w = (lat.vector(data.draw(vec)) for _ in range(3))
    k = data.draw(st.integers(-4, 4))
    assert pair(u + v, w) == pair(u, w) + pair(v, w)
    assert pair(k * u, w) == k * pair(u, w)
    assert pair(u, w) == pair(w, u)


@given(even_grams())
def test_signature_matches_eigen_oracle(g):
    sig = Lattice(g).signature
    assert sum(sig) == len(g)
    assert tuple(sig) == eigen_oracle(g)


@given(even_grams())
def test_discriminant_matches_sympy(g):
    assert Lattice(g).discriminant == int(sympy.Matrix(g).det())
    assert determinant(g) == int(sympy.Matrix(g).det())
    assert Fraction(determinant(g)) == Fraction(int(sympy.Matrix(g).det()))


@given(even_grams(min_rank=2, max_rank=3, bound=4), st.data())
def test_basis_change_invariance(g, data):
    lat = Lattice(g)
    t = data.draw(unimodular(lat.rank))
    other = Lattice(_transform(t, g))
    assert other.signature == lat.signature
    assert other.discriminant == lat.discriminant
    assert form_signature(other.gram) == lat.signature


@given(even_grams(min_rank=1, max_rank=3, bound=4), st.data())
def test_isomorphism_found_and_verified(g, data):
    lat = Lattice(g)
    assume(lat.signature.zero == 0)
    t = data.draw(unimodular(lat.rank, steps=2))
    other = Lattice(_transform(t, g))
    assert lattice_isomorphic(lat, lat) is not None
    found = lattice_isomorphic(lat, other)
    if found is not None:
        assert _transform(found, g) == [list(r) for r in other.gram]
        assert abs(determinant(found)) == 1
