import random
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BRYAN_LEUNG, U, box, slab_box_bound
from k3cert.exceptions import InvalidInputError, PreconditionError
from k3cert.lattice import Lattice
from k3cert.positivity import (BigNefness, Effectivity, Minimality, Nefness, Order, RootSet,
                               default_prec_basis, is_big_nef, is_effective, is_minimal_nef,
                               is_nef, minimal_nef_decompose, prec_compare, prec_key)


@pytest.fixture
def u_roots():
    lat = Lattice(U)
    return RootSet((lat.vector((-1, 1)),), lat.vector((2, 1)), 3, True)


@pytest.fixture
def bl_roots():
    lat = Lattice(BRYAN_LEUNG)
    return RootSet.from_lattice(lat.vector((1, 3)), 10)


class Rank2Oracle:
    """Box enumeration of roots and recursive effectivity, independent of the library."""

    def __init__(self, lat, ample, degree):
        self.lat = lat
        self.a = ample.coords
        b = slab_box_bound(ample, -2, degree)
        self.roots = sorted((x for x in box(lat.rank, b)
                             if lat.form(x, x) == -2 and 0 < lat.form(self.a, x) <= degree),
                            key=lambda x: lat.form(self.a, x))
        self.degree = degree
        self.effective = lru_cache(maxsize=None)(self._effective)

    def deg(self, x):
        return self.lat.form(self.a, x)

    def _effective(self, w):
        if not any(w):
            return True
        d = self.deg(w)
        assert d <= self.degree
        if d <= 0:
            return False
        if self.lat.form(w, w) >= -2:
            return True
        return any(self.effective(tuple(p - q for p, q in zip(w, r)))
                   for r in self.roots if self.deg(r) < d)

    def nef(self, v):
        if not any(v):
            return True
        if self.lat.form(v, v) < 0 or self.deg(v) <= 0:
            return False
        return all(self.lat.form(v, r) >= 0 for r in self.roots)

    def minimal(self, v):
        m = self.deg(v)
        for x in box(self.lat.rank, slab_box_bound(self.lat.vector(self.a), 0, m)):
            if 0 < self.deg(x) < m and self.lat.form(x, x) >= 0 and self.nef(x):
                if self.effective(tuple(p - q for p, q in zip(v, x))):
                    return False
        return True


def random_rank2(rng):
    while True:
        a, c = rng.randint(-3, 3), rng.randint(-3, 3)
        b = rng.randint(-6, 6)
        if b * b - 4 * a * c <= 0:
            continue
        lat = Lattice(((2 * a, b), (b, 2 * c)))
        for x in sorted(box(2, 3), key=lambda x: (max(map(abs, x)), x)):
            if lat.form(x, x) <= 0:
                continue
            amp = lat.vector(x)
            orth = [y for y in box(2, slab_box_bound(amp, -2, 0))
                    if lat.form(y, y) == -2 and lat.form(x, y) == 0]
            if not orth:
                return lat, amp


RANK2_SAMPLE = [random_rank2(random.Random(seed)) for seed in range(60)]


class TestEffectivity:
    def test_zero(self, u_roots):
        assert is_effective(Lattice(U).zero(), u_roots).status is Effectivity.EFFECTIVE

    def test_riemann_roch(self, bl_roots):
        v = is_effective(Lattice(BRYAN_LEUNG).vector((1, 3)), bl_roots)
        assert v.status is Effectivity.EFFECTIVE

    def test_negative_degree(self, u_roots):
        assert is_effective(Lattice(U).vector((-1, 0)), u_roots).status \
            is Effectivity.NOT_EFFECTIVE

    def test_root_combination(self, bl_roots):
        # 3C has square -18; peeling C twice leaves C itself (square -2)
        lat = Lattice(BRYAN_LEUNG)
        v = is_effective(lat.vector((3, 0)), bl_roots)
        assert v.status is Effectivity.EFFECTIVE
        total = v.remainder if v.remainder is not None else lat.zero()
        for r, k in v.combination:
            total = total + k * r
        assert total == lat.vector((3, 0))
        assert v.remainder is None or v.remainder.square >= -2

    def test_incomplete_roots_give_unknown(self):
        lat = Lattice(BRYAN_LEUNG)
        rs = RootSet((), lat.vector((1, 3)), 0, False)
        lat3 = Lattice(((2, 0, 0), (0, -2, 0), (0, 0, -2)))
        rs3 = RootSet((), lat3.vector((1, 0, 0)), 1, False)
        assert is_effective(lat3.vector((1, 2, 2)), rs3).status is Effectivity.UNKNOWN
        assert is_effective(lat.vector((3, 0)), rs).status is Effectivity.EFFECTIVE

    @pytest.mark.parametrize("idx", range(0, 60, 3))
    def test_matches_oracle(self, idx):
        lat, amp = RANK2_SAMPLE[idx]
        roots = RootSet.from_lattice(amp, 1)
        oracle = Rank2Oracle(lat, amp, 12)
        for x in box(2, 3):
            if 0 < oracle.deg(x) <= 12:
                got = is_effective(lat.vector(x), roots)
                assert got.status is not Effectivity.UNKNOWN
                assert got.effective == oracle.effective(x), x


class TestRootSet:
    def test_validation(self):
        lat = Lattice(U)
        a = lat.vector((2, 1))
        with pytest.raises(InvalidInputError):
            RootSet((lat.vector((1, 1)),), a, 3)
        with pytest.raises(InvalidInputError):
            RootSet((lat.vector((1, -1)),), a, 3)
        with pytest.raises(InvalidInputError):
            RootSet((lat.vector((-1, 1)), lat.vector((-1, 1))), a, 3)

    def test_from_lattice_sorted_by_degree(self, bl_roots):
        degrees = [bl_roots.ample.dot(r) for r in bl_roots.roots]
        assert degrees == sorted(degrees) and bl_roots.complete_up_to_bound
        assert bl_roots.roots[0].coords == (1, 0)


class TestNef:
    def test_hyperbolic_plane(self, u_roots):
        lat = Lattice(U)
        assert is_nef(lat.vector((1, 0)), u_roots).status is Nefness.NEF
        bad = is_nef(lat.vector((0, 1)), u_roots)
        assert bad.status is Nefness.NOT_NEF and bad.witness.coords == (-1, 1)
        assert is_nef(lat.zero(), u_roots).nef

    def test_big_nef(self, u_roots, bl_roots):
        assert is_big_nef(Lattice(BRYAN_LEUNG).vector((1, 3)), bl_roots).status \
            is BigNefness.BIG_NEF
        assert is_big_nef(Lattice(U).vector((1, 0)), u_roots).status is BigNefness.NEF_NOT_BIG
        assert is_big_nef(Lattice(U).zero(), u_roots).status is BigNefness.NEF_NOT_BIG

    def test_bryan_leung_ampleness_range(self, bl_roots):
        lat = Lattice(BRYAN_LEUNG)
        assert is_nef(lat.vector((1, 1)), bl_roots).status is Nefness.NOT_NEF
        assert is_nef(lat.vector((1, 2)), bl_roots).nef
        assert all(is_big_nef(lat.vector((1, n)), bl_roots).big_nef for n in range(3, 8))

    def test_rank3_incomplete_is_unknown(self):
        lat = Lattice(((2, 0, 0), (0, -2, 0), (0, 0, -2)))
        rs = RootSet((), lat.vector((1, 0, 0)), 0, False)
        assert is_nef(lat.vector((1, 0, 0)), rs).status is Nefness.UNKNOWN

    @pytest.mark.parametrize("idx", range(60))
    def test_nef_and_minimal_match_oracle(self, idx):
        lat, amp = RANK2_SAMPLE[idx]
        roots = RootSet.from_lattice(amp, 1)
        oracle = Rank2Oracle(lat, amp, 30)
        for x in box(2, 2):
            v = lat.vector(x)
            if not any(x) or not 0 < oracle.deg(x) <= 12:
                continue
            got = is_nef(v, roots)
            assert got.status is not Nefness.UNKNOWN
            assert got.nef == oracle.nef(x), x
            if got.witness is not None:
                assert got.witness.square == -2 and v.dot(got.witness) < 0
            if got.nef:
                mv = is_minimal_nef(v, roots)
                assert mv.status is not Minimality.UNKNOWN
                assert (mv.status is Minimality.MINIMAL) == oracle.minimal(x), x


class TestMinimal:
    def test_hyperbolic_plane(self, u_roots):
        lat = Lattice(U)
        assert is_minimal_nef(lat.vector((1, 0)), u_roots).status is Minimality.MINIMAL
        mv = is_minimal_nef(lat.vector((1, 1)), u_roots)
        assert mv.status is Minimality.NOT_MINIMAL and mv.witness.coords == (1, 0)

    def test_zero_rejected(self, u_roots):
        with pytest.raises(PreconditionError):
            is_minimal_nef(Lattice(U).zero(), u_roots)

    def test_not_nef_rejected(self, u_roots):
        with pytest.raises(PreconditionError):
            is_minimal_nef(Lattice(U).vector((0, 1)), u_roots)


class TestOrder:
    def test_examples(self):
        lat = Lattice(U)
        basis = [lat.vector((2, 1)), lat.vector((1, 2))]
        f, g = lat.vector((1, 0)), lat.vector((0, 1))
        assert prec_compare(f, g, basis) is Order.LESS
        assert prec_compare(g, f, basis) is Order.GREATER
        assert prec_compare(f, f, basis) is Order.EQUIV

    def test_basis_validation(self):
        lat = Lattice(U)
        with pytest.raises(InvalidInputError):
            prec_compare(lat.vector((1, 0)), lat.vector((0, 1)), [lat.vector((1, 1))])
        with pytest.raises(InvalidInputError):
            prec_compare(lat.vector((1, 0)), lat.vector((0, 1)),
                         [lat.vector((1, 1)), lat.vector((2, 2))])

    def test_default_basis(self):
        lat = Lattice(((2, -1, -1, -1), (-1, -2, 0, 0), (-1, 0, -2, 0), (-1, 0, 0, -2)))
        basis = default_prec_basis(lat.vector((1, 0, 0, 0)))
        assert basis[0].coords == (1, 0, 0, 0)
        assert all(b.square > 0 for b in basis)
        assert all(b.dot(c) > 0 for b in basis for c in basis)

    @given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=3, max_size=3),
           st.tuples(st.integers(0, 4), st.integers(0, 4)))
    def test_total_preorder(self, vs, shift):
        lat = Lattice(BRYAN_LEUNG)
        basis = default_prec_basis(lat.vector((1, 3)))
        f, g, h = (lat.vector(v) for v in vs)
        fg, gf = prec_compare(f, g, basis), prec_compare(g, f, basis)
        assert (fg, gf) in {(Order.LESS, Order.GREATER), (Order.GREATER, Order.LESS),
                            (Order.EQUIV, Order.EQUIV)}
        keys = sorted((prec_key(x, basis), x.coords) for x in (f, g, h))
        assert prec_compare(lat.vector(keys[0][1]), lat.vector(keys[2][1]), basis) \
            is not Order.GREATER
        # adding an effective class of positive degree on the whole basis moves up
        e = lat.vector((0, 1)) * (1 + shift[0]) + lat.vector((1, 3)) * shift[1]
        assert prec_compare(f + e, f, basis) is Order.GREATER


class TestDecomposition:
    def test_hyperbolic_plane(self, u_roots):
        lat = Lattice(U)
        dec = minimal_nef_decompose(lat.vector((1, 1)), u_roots)
        assert dec.nef_parts == ((lat.vector((1, 0)), 2),)
        assert dec.residual == ((lat.vector((-1, 1)), 1),)
        assert dec.total() == lat.vector((1, 1))
        assert dec.residual_signature() == (0, 1, 0)
        assert list(dec.degrees) == sorted(dec.degrees, reverse=True)

    def test_fixed_point(self, u_roots):
        lat = Lattice(U)
        dec = minimal_nef_decompose(lat.vector((1, 0)), u_roots)
        assert dec.nef_parts == ((lat.vector((1, 0)), 1),) and dec.residual == ()

    def test_single_root(self, u_roots):
        lat = Lattice(U)
        dec = minimal_nef_decompose(lat.vector((-1, 1)), u_roots)
        assert dec.nef_parts == () and dec.residual == ((lat.vector((-1, 1)), 1),)

    def test_not_effective_rejected(self, u_roots):
        with pytest.raises(PreconditionError):
            minimal_nef_decompose(Lattice(U).vector((-1, 0)), u_roots)

    def test_bryan_leung_multiple(self, bl_roots):
        lat = Lattice(BRYAN_LEUNG)
        dec = minimal_nef_decompose(lat.vector((3, 9)), bl_roots)
        assert dec.total() == lat.vector((3, 9))
        assert dec.nef_parts == ((lat.vector((0, 1)), 9),)
        assert dec.residual == ((lat.vector((1, 0)), 3),)

    @pytest.mark.parametrize("idx", range(0, 60, 2))
    def test_random_rank2(self, idx):
        lat, amp = RANK2_SAMPLE[idx]
        roots = RootSet.from_lattice(amp, 1)
        oracle = Rank2Oracle(lat, amp, 30)
        for x in box(2, 2):
            if not 0 < oracle.deg(x) <= 10 or not oracle.effective(x):
                continue
            dec = minimal_nef_decompose(lat.vector(x), roots)
            assert not dec.partial
            assert dec.total().coords == x
            degs = list(dec.degrees)
            assert all(p > q for p, q in zip(degs, degs[1:]))
            for q, _ in dec.nef_parts:
                assert oracle.nef(q.coords) and oracle.minimal(q.coords)
            sig = dec.residual_signature()
            if sig is not None:
                assert sig.positive == 0 and sig.zero == 0
            for r, _ in dec.residual:
                # irreducible: no smaller root splits off with an effective rest
                assert not any(oracle.deg(s) < oracle.deg(r.coords) and oracle.effective(
                    tuple(p - q for p, q in zip(r.coords, s))) for s in oracle.roots)
