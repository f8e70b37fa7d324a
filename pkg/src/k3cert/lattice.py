"""Integral lattices, divisor classes and exact invariants.

Everything here works with Python integers and :class:`fractions.Fraction`,
so no value is ever rounded.
"""
from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .exceptions import DimensionError, InvalidInputError, UnsupportedRankError


class SignatureTriple(NamedTuple):
    positive: int
    negative: int
    zero: int


def _as_int(x) -> int:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    if isinstance(x, bool) or not isinstance(x, numbers.Integral):
        raise InvalidInputError(f"expected an integer, got {x!r}")
    return int(x)


def diagonalize(gram: Sequence[Sequence]) -> list[Fraction]:
    """Return the diagonal of a form congruent to ``gram`` over Q.

    Symmetric Gaussian elimination; every congruence used has determinant
    +-1, so the product of the returned entries is ``det(gram)``.  When all
    remaining diagonal entries vanish but an off-diagonal entry does not,
    ``e_i <- e_i + e_j`` creates the nonzero pivot ``2 * g_ij``.
    """
    m = [[Fraction(x) for x in row] for row in gram]
    n = len(m)
    diag: list[Fraction] = []
    active = list(range(n))
    while active:
        pivot = next((i for i in active if m[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active
                         if i != j and m[i][j] != 0), None)
            if pair is None:
                diag.extend(Fraction(0) for _ in active)
                break
            i, j = pair
            for k in range(n):
                m[i][k] += m[j][k]
            for k in range(n):
                m[k][i] += m[k][j]
            pivot = i
        p = m[pivot][pivot]
        active.remove(pivot)
        for i in active:
            f = m[i][pivot] / p
            if f:
                for k in active:
                    m[i][k] -= f * m[pivot][k]
        for i in active:
            m[pivot][i] = m[i][pivot] = Fraction(0)
        diag.append(p)
    return diag


def _inertia(diag: Iterable[Fraction]) -> SignatureTriple:
    diag = list(diag)
    pos = sum(1 for d in diag if d > 0)
    neg = sum(1 for d in diag if d < 0)
    return SignatureTriple(pos, neg, len(diag) - pos - neg)


@dataclass(frozen=True)
class Lattice:
    """An even integral lattice given by its symmetric Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        try:
            rows = tuple(tuple(_as_int(x) for x in row) for row in self.gram)
        except TypeError as exc:
            raise InvalidInputError("gram must be a square matrix of integers") from exc
        object.__setattr__(self, "gram", rows)
        r = len(rows)
        if r < 1:
            raise InvalidInputError("lattice rank must be at least 1")
        if any(len(row) != r for row in rows):
            raise InvalidInputError("gram must be square")
        for i in range(r):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise InvalidInputError(f"gram is not symmetric at ({i}, {j})")
            if rows[i][i] % 2:
                raise InvalidInputError(f"gram diagonal entry {i} is odd; lattice must be even")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def _diagonal(self) -> list[Fraction]:
        return diagonalize(self.gram)

    @cached_property
    def signature(self) -> SignatureTriple:
        return _inertia(self._diagonal)

    @cached_property
    def discriminant(self) -> int:
        return int(math.prod(self._diagonal, start=Fraction(1)))

    @property
    def is_hyperbolic(self) -> bool:
        return self.signature == (1, self.rank - 1, 0)

    def vector(self, coords: Iterable[int]) -> "DivisorClass":
        return DivisorClass(tuple(coords), self)

    def basis(self) -> list["DivisorClass"]:
        r = self.rank
        return [self.vector(int(i == j) for j in range(r)) for i in range(r)]

    def zero(self) -> "DivisorClass":
        return self.vector((0,) * self.rank)

    def form(self, x: Sequence[int], y: Sequence[int]) -> int:
        g = self.gram
        return sum(x[i] * g[i][j] * y[j] for i in range(len(x)) for j in range(len(y))
                   if x[i] and y[j])

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Lattice({label}{[list(r) for r in self.gram]})"


@dataclass(frozen=True)
class DivisorClass:
    """Integer coordinates of a class with respect to the lattice basis."""

    coords: tuple[int, ...]
    lattice: Lattice = field(repr=False)

    def __post_init__(self):
        coords = tuple(_as_int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.lattice.rank:
            raise DimensionError(
                f"class has {len(coords)} coordinates but lattice rank is {self.lattice.rank}")

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected DivisorClass, got {type(other).__name__}")
        if other.lattice is not self.lattice and other.lattice != self.lattice:
            raise DimensionError("classes belong to different lattices")

    def __add__(self, other):
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other):
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self):
        return DivisorClass(tuple(-a for a in self.coords), self.lattice)

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return DivisorClass(tuple(k * a for a in self.coords), self.lattice)

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def dot(self, other: "DivisorClass") -> int:
        self._check(other)
        return self.lattice.form(self.coords, other.coords)

    @property
    def square(self) -> int:
        return self.lattice.form(self.coords, self.coords)

    @property
    def content(self) -> int:
        """gcd of the coordinates (0 for the zero class)."""
        return math.gcd(*self.coords)

    def __repr__(self):
        return f"DivisorClass{self.coords}"


def pair(v: DivisorClass, w: DivisorClass) -> int:
    """Intersection number ``v . w``."""
    return v.dot(w)


def signature(lattice: Lattice) -> SignatureTriple:
    return lattice.signature


def discriminant(lattice: Lattice) -> int:
    return lattice.discriminant


def gram_of(classes: Sequence[DivisorClass]) -> list[list[int]]:
    """Gram matrix of a list of classes (all from one lattice)."""
    if not classes:
        raise InvalidInputError("need at least one class")
    first = classes[0]
    for c in classes[1:]:
        first._check(c)
    return [[a.dot(b) for b in classes] for a in classes]


def form_signature(gram: Sequence[Sequence[int]]) -> SignatureTriple:
    """Inertia of an arbitrary (not necessarily even) symmetric integer matrix."""
    return _inertia(diagonalize(gram))


def is_primitive(v: DivisorClass) -> bool:
    if not v:
        raise InvalidInputError("the zero class is neither primitive nor imprimitive")
    return v.content == 1


@dataclass(frozen=True)
class DivisibilityReport:
    """Outcome of the two divisibility tests used by condition A3.

    ``multiple`` is the largest ``n >= 2`` with ``v - w`` in ``n * Lambda``
    (``None`` when there is none); a zero difference lies in every
    ``n * Lambda`` and is reported with ``multiple = 0``.
    """

    in_twice_lattice: bool
    multiple: int | None

    @property
    def difference_violation(self) -> bool:
        return self.multiple is not None

    @property
    def clear(self) -> bool:
        return not self.in_twice_lattice and self.multiple is None


def divisibility_violations(v: DivisorClass, w: DivisorClass) -> DivisibilityReport:
    v._check(w)
    in_2 = all(c % 2 == 0 for c in v.coords)
    g = (v - w).content
    if g == 0:
        multiple = 0
    elif g >= 2:
        multiple = g
    else:
        multiple = None
    return DivisibilityReport(in_2, multiple)


def diagonalize_general(m: Sequence[Sequence[int]]) -> list[Fraction]:
    """Pivots of Gaussian elimination with row swaps; product is ``det(m)``
    (sign included)."""
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    sign = 1
    pivots = []
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return [Fraction(0)] * n
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        pivots.append(a[c][c])
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    pivots[0] *= sign
    return pivots


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix."""
    return int(math.prod(diagonalize_general(m), start=Fraction(1)))


def _transform(t: Sequence[Sequence[int]], g: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(g)
    gt = [[sum(g[i][k] * t[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[sum(t[k][i] * gt[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def lattice_isomorphic(l1: Lattice, l2: Lattice, coord_bound: int = 3
                       ) -> tuple[tuple[int, ...], ...] | None:
    """Search for a unimodular ``T`` with ``T^t G1 T = G2``.

    Columns of ``T`` are vectors of ``l1`` with all coordinates in
    ``[-coord_bound, coord_bound]``; a ``None`` result therefore proves
    non-isomorphism only when an invariant (rank, signature, discriminant)
    differs.  Any returned matrix has been re-verified exactly.
    """
    if max(l1.rank, l2.rank) > 4:
        raise UnsupportedRankError("isomorphism testing is limited to rank <= 4")
    if (l1.rank != l2.rank or l1.signature != l2.signature
            or l1.discriminant != l2.discriminant):
        return None
    r = l1.rank
    g2 = l2.gram
    by_norm: dict[int, list[tuple[int, ...]]] = {}
    wanted = {g2[i][i] for i in range(r)}
    rng = range(-coord_bound, coord_bound + 1)
    for x in itertools.product(rng, repeat=r):
        if any(x):
            q = l1.form(x, x)
            if q in wanted:
                by_norm.setdefault(q, []).append(x)
    # enumerate small vectors first so the identity is found immediately
    for vs in by_norm.values():
        vs.sort(key=lambda x: (sum(map(abs, x)), tuple(-c for c in x)))

    cols: list[tuple[int, ...]] = []

    def extend(j: int):
        if j == r:
            t = [[cols[c][i] for c in range(r)] for i in range(r)]
            if abs(determinant(t)) == 1:
                return tuple(tuple(row) for row in t)
            return None
        for x in by_norm.get(g2[j][j], ()):
            if all(l1.form(cols[i], x) == g2[i][j] for i in range(j)):
                cols.append(x)
                found = extend(j + 1)
                cols.pop()
                if found is not None:
                    return found
        return None

    t = extend(0)
    if t is not None and _transform(t, l1.gram) != [list(row) for row in g2]:
        raise AssertionError("isometry failed re-verification")
    return t
