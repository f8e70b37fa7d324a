"""Nefness, effectivity, the degree order and minimal nef decompositions.

Verdicts are three-valued.  A root set stands for the effective (-2)-classes
of a K3 surface whose Picard lattice is the given lattice, i.e. every
(-2)-vector of positive degree on the designated ample class.  In rank 2 that
set is enumerated on demand, so verdicts there are exact; in higher rank a
definite answer is given only when the supplied root set is flagged complete
far enough.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .exceptions import DimensionError, InvalidAmpleError, InvalidInputError, PreconditionError
from .lattice import DivisorClass, Lattice, determinant, form_signature, gram_of
from .qform import enumerate_norm_vectors, slab_vectors

# node budget for root-combination searches
SEARCH_BUDGET = 200_000


def _degree_key(ample: DivisorClass):
    return lambda r: (ample.dot(r), r.coords)


@dataclass(frozen=True)
class RootSet:
    """Effective (-2)-classes of positive degree on ``ample``.

    ``complete_up_to_bound`` asserts that every (-2)-class ``r`` with
    ``0 < ample.r <= degree_bound`` is listed.
    """

    roots: tuple[DivisorClass, ...]
    ample: DivisorClass
    degree_bound: int
    complete_up_to_bound: bool = False

    def __post_init__(self):
        if self.ample.square <= 0:
            raise InvalidAmpleError("ample class must have positive square")
        roots = tuple(self.roots)
        seen = set()
        for r in roots:
            if r.lattice != self.ample.lattice:
                raise DimensionError("root and ample class live in different lattices")
            if r.square != -2:
                raise InvalidInputError(f"{r} has square {r.square}, expected -2")
            if self.ample.dot(r) <= 0:
                raise InvalidAmpleError(f"ample class has degree {self.ample.dot(r)} on root {r}")
            if r.coords in seen:
                raise InvalidInputError(f"duplicate root {r}")
            seen.add(r.coords)
        object.__setattr__(self, "roots", tuple(sorted(roots, key=_degree_key(self.ample))))

    @classmethod
    def from_lattice(cls, ample: DivisorClass, degree_bound: int) -> "RootSet":
        """All (-2)-classes up to ``degree_bound``; complete by construction."""
        roots = enumerate_norm_vectors(ample.lattice, -2, ample, degree_bound)
        return cls(tuple(roots), ample, degree_bound, True)

    @property
    def lattice(self) -> Lattice:
        return self.ample.lattice

    def up_to(self, degree: int | None) -> tuple[list[DivisorClass], bool]:
        """Roots of degree ``<= degree`` and whether that list is known complete."""
        a = self.ample
        if degree is not None and self.lattice.rank <= 2:
            return sorted(enumerate_norm_vectors(self.lattice, -2, a, degree),
                          key=_degree_key(a)), True
        if degree is None:
            return list(self.roots), False
        listed = [r for r in self.roots if a.dot(r) <= degree]
        return listed, self.complete_up_to_bound and degree <= self.degree_bound


# --------------------------------------------------------------------------
# effectivity

class Effectivity(str, Enum):
    EFFECTIVE = "effective"
    NOT_EFFECTIVE = "not_effective"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class EffectivityVerdict:
    status: Effectivity
    reason: str
    # v = sum(mult * root) + remainder, remainder Riemann-Roch effective or zero
    combination: tuple[tuple[DivisorClass, int], ...] = ()
    remainder: DivisorClass | None = None

    @property
    def effective(self) -> bool:
        return self.status is Effectivity.EFFECTIVE


def _rr_effective(w: DivisorClass, ample: DivisorClass) -> bool:
    return w.square >= -2 and ample.dot(w) > 0


def _collect(seq: Sequence[DivisorClass]) -> tuple[tuple[DivisorClass, int], ...]:
    counts: dict[DivisorClass, int] = {}
    for r in seq:
        counts[r] = counts.get(r, 0) + 1
    return tuple(counts.items())


def _root_search(target: DivisorClass, roots: Sequence[DivisorClass], ample: DivisorClass,
                 accept, budget: int = SEARCH_BUDGET):
    """Depth-first search for ``target - sum(roots)`` satisfying ``accept``.

    Returns ``(used_roots, remainder)``, or ``(None, exhausted)`` where
    ``exhausted`` tells whether the whole space was explored.
    """
    seen = set()
    stack = [(target, ())]
    while stack:
        w, used = stack.pop()
        if w.coords in seen:
            continue
        seen.add(w.coords)
        if accept(w):
            return list(used), w
        if len(seen) > budget:
            return None, False
        deg = ample.dot(w)
        for r in reversed(roots):
            if ample.dot(r) <= deg:
                stack.append((w - r, used + (r,)))
    return None, True


def is_effective(v: DivisorClass, roots: RootSet) -> EffectivityVerdict:
    a = roots.ample
    a._check(v)
    if not v:
        return EffectivityVerdict(Effectivity.EFFECTIVE, "zero class")
    m = a.dot(v)
    if m < 0:
        return EffectivityVerdict(Effectivity.NOT_EFFECTIVE, "negative degree on the ample class")
    if m == 0:
        return EffectivityVerdict(Effectivity.NOT_EFFECTIVE,
                                  "nonzero class of degree 0 on the ample class")
    if v.square >= -2:
        return EffectivityVerdict(Effectivity.EFFECTIVE,
                                  "Riemann-Roch: v^2 >= -2 and positive degree", remainder=v)
    rs, complete = roots.up_to(m)
    used, rest = _root_search(v, rs, a, lambda w: not w or _rr_effective(w, a))
    if used is not None:
        return EffectivityVerdict(Effectivity.EFFECTIVE, "explicit (-2)-class decomposition",
                                  _collect(used), rest if rest else None)
    if rest and complete:
        return EffectivityVerdict(Effectivity.NOT_EFFECTIVE,
                                  "no decomposition into (-2)-classes plus a class of "
                                  "square >= -2 (complete root list)")
    return EffectivityVerdict(Effectivity.UNKNOWN,
                              "root list incomplete or search budget exhausted")


# --------------------------------------------------------------------------
# nefness

class Nefness(str, Enum):
    NEF = "nef"
    NOT_NEF = "not_nef"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class NefVerdict:
    status: Nefness
    witness: DivisorClass | None = None
    reason: str = ""

    @property
    def nef(self) -> bool:
        return self.status is Nefness.NEF


def obstruction_degree_bound(v: DivisorClass, ample: DivisorClass) -> int | None:
    """Largest ``ample``-degree of a (-2)-class ``r`` that can have ``v.r < 0``
    when ``v`` lies in the closed positive cone; ``None`` if unbounded.

    For ``v^2 > 0``: ``k^2 v^2 < 2((A.v)^2 - A^2 v^2)``.  For ``v^2 = 0`` in
    rank 2 every such ``r`` has ``A.r < A.v``.
    """
    sq = v.square
    m = ample.dot(v)
    s = ample.square
    if sq > 0:
        rhs = 2 * (m * m - s * sq)
        k = math.isqrt(max(rhs, 0) // sq) + 1
        while k > 0 and k * k * sq >= rhs:
            k -= 1
        return k
    if sq == 0 and v.lattice.rank <= 2:
        return m - 1
    return None


def is_nef(v: DivisorClass, roots: RootSet) -> NefVerdict:
    a = roots.ample
    a._check(v)
    if not v:
        return NefVerdict(Nefness.NEF, reason="zero class")
    for r in roots.roots:
        if v.dot(r) < 0:
            return NefVerdict(Nefness.NOT_NEF, r, "negative on a listed (-2)-class")
    sq = v.square
    m = a.dot(v)
    if sq < 0:
        return NefVerdict(Nefness.NOT_NEF, reason="negative self-intersection")
    if m <= 0:
        return NefVerdict(Nefness.NOT_NEF, reason="outside the positive cone of the ample class")
    kmax = obstruction_degree_bound(v, a)
    rs, complete = roots.up_to(kmax)
    for r in rs:
        if v.dot(r) < 0:
            return NefVerdict(Nefness.NOT_NEF, r, "negative on a (-2)-class")
    if complete:
        return NefVerdict(Nefness.NEF, reason=f"non-negative on all (-2)-classes of degree <= {kmax}")
    return NefVerdict(Nefness.UNKNOWN, reason="root list not known complete for the needed degree")


class BigNefness(str, Enum):
    BIG_NEF = "big_nef"
    NEF_NOT_BIG = "nef_not_big"
    NOT_NEF = "not_nef"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class BigNefVerdict:
    status: BigNefness
    nef: NefVerdict

    @property
    def big_nef(self) -> bool:
        return self.status is BigNefness.BIG_NEF


def is_big_nef(v: DivisorClass, roots: RootSet) -> BigNefVerdict:
    nv = is_nef(v, roots)
    if nv.status is Nefness.NOT_NEF:
        return BigNefVerdict(BigNefness.NOT_NEF, nv)
    if not nv.nef:
        return BigNefVerdict(BigNefness.UNKNOWN, nv)
    if v.square > 0:
        return BigNefVerdict(BigNefness.BIG_NEF, nv)
    return BigNefVerdict(BigNefness.NEF_NOT_BIG, nv)


# --------------------------------------------------------------------------
# the degree order

class Order(str, Enum):
    LESS = "less"
    EQUIV = "equiv"
    GREATER = "greater"


def _validate_basis(basis: Sequence[DivisorClass]) -> Lattice:
    if not basis:
        raise InvalidInputError("empty basis")
    lat = basis[0].lattice
    if len(basis) != lat.rank:
        raise InvalidInputError(f"basis has {len(basis)} classes, lattice rank is {lat.rank}")
    for i, b in enumerate(basis):
        basis[0]._check(b)
        if b.square <= 0:
            raise InvalidInputError(f"basis class {b} has non-positive square")
        for c in basis[:i]:
            if b.dot(c) <= 0:
                raise InvalidInputError(f"basis classes {c} and {b} have non-positive degree")
    if determinant([b.coords for b in basis]) == 0:
        raise InvalidInputError("basis classes are linearly dependent")
    return lat


def default_prec_basis(ample: DivisorClass) -> list[DivisorClass]:
    """``A, cA + e_j, ...``: independent, positive squares and mutual degrees."""
    lat = ample.lattice
    j0 = next(i for i, c in enumerate(ample.coords) if c)
    extra = [e for i, e in enumerate(lat.basis()) if i != j0]
    c = 1
    while True:
        basis = [ample] + [c * ample + e for e in extra]
        try:
            _validate_basis(basis)
            return basis
        except InvalidInputError:
            c += 1


def prec_key(v: DivisorClass, basis: Sequence[DivisorClass]) -> tuple[int, ...]:
    return tuple(v.dot(b) for b in basis)


def prec_compare(f: DivisorClass, g: DivisorClass, basis: Sequence[DivisorClass]) -> Order:
    """Lexicographic comparison of degree vectors against an ample basis."""
    _validate_basis(basis)
    kf, kg = prec_key(f, basis), prec_key(g, basis)
    if kf == kg:
        return Order.EQUIV
    return Order.LESS if kf < kg else Order.GREATER


# --------------------------------------------------------------------------
# minimal nef classes

class Minimality(str, Enum):
    MINIMAL = "minimal"
    NOT_MINIMAL = "not_minimal"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class MinimalityVerdict:
    status: Minimality
    witness: DivisorClass | None = None
    reason: str = ""


def is_minimal_nef(v: DivisorClass, roots: RootSet) -> MinimalityVerdict:
    if not v:
        raise PreconditionError("the zero class is excluded from minimal nef testing")
    nv = is_nef(v, roots)
    if nv.status is Nefness.NOT_NEF:
        raise PreconditionError(f"{v} is not nef ({nv.reason})")
    a = roots.ample
    basis = default_prec_basis(a)
    exact = nv.nef
    m = a.dot(v)
    candidates = sorted(slab_vectors(a, 1, m - 1, 0), key=lambda c: prec_key(c, basis))
    for mm in candidates:
        nm = is_nef(mm, roots)
        if nm.status is Nefness.NOT_NEF:
            continue
        ev = is_effective(v - mm, roots)
        if ev.status is Effectivity.UNKNOWN:
            exact = False
            continue
        if ev.effective:
            if nm.nef:
                return MinimalityVerdict(Minimality.NOT_MINIMAL, mm,
                                         f"{mm} is nef and {v - mm} is effective")
            exact = False
    if exact:
        return MinimalityVerdict(Minimality.MINIMAL, reason="exhaustive search of the degree slab")
    return MinimalityVerdict(Minimality.UNKNOWN, reason="some candidate verdicts were inconclusive")


# --------------------------------------------------------------------------
# decomposition

@dataclass(frozen=True)
class Decomposition:
    """``target = sum(mult * nef part) + sum(mult * root)``.

    ``partial`` marks a run that could not certify a step; ``stuck`` is the
    class left over at that point.
    """

    target: DivisorClass
    nef_parts: tuple[tuple[DivisorClass, int], ...]
    residual: tuple[tuple[DivisorClass, int], ...]
    unverified_minimal: tuple[DivisorClass, ...] = ()
    degrees: tuple[int, ...] = ()
    partial: bool = False
    stuck: DivisorClass | None = None
    notes: tuple[str, ...] = field(default=())

    def total(self) -> DivisorClass:
        s = self.target.lattice.zero()
        for c, k in self.nef_parts + self.residual:
            s = s + k * c
        if self.stuck is not None:
            s = s + self.stuck
        return s

    def residual_signature(self):
        roots = [r for r, _ in self.residual]
        if not roots:
            return None
        return form_signature(gram_of(roots))


def irreducible_roots(roots: RootSet, degree: int) -> tuple[list[DivisorClass], bool]:
    """(-2)-curves among the roots of degree ``<= degree``.

    An effective root ``r`` is irreducible iff ``r - r'`` is not effective for
    every other effective root ``r'`` of smaller degree.
    """
    rs, complete = roots.up_to(degree)
    a = roots.ample
    out = []
    for r in rs:
        reducible = False
        for s in rs:
            if a.dot(s) >= a.dot(r):
                break
            ev = is_effective(r - s, roots)
            if ev.effective:
                reducible = True
                break
            if ev.status is Effectivity.UNKNOWN:
                complete = False
        if not reducible:
            out.append(r)
    return out, complete


def nef_part(b: DivisorClass, roots: RootSet) -> tuple[DivisorClass, list[DivisorClass]]:
    """Strip fixed (-2)-curves from an effective ``b``: returns ``(P, removed)``.

    The lowest-degree root with ``P.r < 0`` is a (-2)-curve contained in
    every member of ``|P|``, so ``P - r`` stays effective.
    """
    a = roots.ample
    p = b
    removed = []
    while True:
        rs, _ = roots.up_to(a.dot(p))
        bad = next((r for r in rs if p.dot(r) < 0), None)
        if bad is None:
            return p, removed
        p = p - bad
        removed.append(bad)


def minimal_nef_decompose(d: DivisorClass, roots: RootSet) -> Decomposition:
    """Split an effective class into minimal nef classes plus (-2)-curves.

    Greedy peel: while the remaining class ``C`` dominates an effective
    ``B`` with ``B^2 >= 0``, take the nef part of the smallest such ``B``,
    shrink it to a minimal nef ``Q`` and replace ``C`` by ``C - Q``.  The
    ample degree of ``C`` drops every round.
    """
    ev = is_effective(d, roots)
    if not ev.effective:
        raise PreconditionError(f"{d} is not certified effective ({ev.reason})")
    a = roots.ample
    basis = default_prec_basis(a)
    parts: list[DivisorClass] = []
    unverified: list[DivisorClass] = []
    notes: list[str] = []
    c = d
    degrees = [a.dot(c)]
    while True:
        deg = a.dot(c)
        cands = sorted(slab_vectors(a, 1, deg, 0), key=lambda v: prec_key(v, basis))
        pick = None
        undecided = False
        for b in cands:
            ev = is_effective(c - b, roots)
            if ev.effective:
                pick = b
                break
            if ev.status is Effectivity.UNKNOWN:
                undecided = True
        if pick is None:
            if undecided:
                notes.append("effectivity of some C - B undecided; stopping")
                return _finish(d, parts, unverified, degrees, c, roots, notes, partial=True)
            break
        p, _ = nef_part(pick, roots)
        pv = is_nef(p, roots)
        if not p or pv.status is Nefness.NOT_NEF:
            notes.append(f"could not extract a nef part from {pick}")
            return _finish(d, parts, unverified, degrees, c, roots, notes, partial=True)
        q = p
        while True:
            mv = is_minimal_nef(q, roots)
            if mv.status is Minimality.NOT_MINIMAL:
                q = mv.witness
                continue
            if mv.status is Minimality.UNKNOWN or not pv.nef:
                unverified.append(q)
            break
        new_c = c - q
        if a.dot(new_c) >= deg:
            raise AssertionError("decomposition degree failed to decrease")
        parts.append(q)
        c = new_c
        degrees.append(a.dot(c))
    return _finish(d, parts, unverified, degrees, c, roots, notes, partial=False)


def _finish(d, parts, unverified, degrees, c, roots, notes, partial):
    a = roots.ample
    nef_parts = _collect(parts)
    if not c:
        return Decomposition(d, nef_parts, (), tuple(unverified), tuple(degrees), partial,
                             None, tuple(notes))
    if partial:
        return Decomposition(d, nef_parts, (), tuple(unverified), tuple(degrees), True,
                             c, tuple(notes))
    curves, _ = irreducible_roots(roots, a.dot(c))
    used, rest = _root_search(c, curves, a, lambda w: not w)
    if used is None:
        notes.append("residual is not a combination of (-2)-curves")
        return Decomposition(d, nef_parts, (), tuple(unverified), tuple(degrees), True,
                             c, tuple(notes))
    residual = _collect(used)
    result = Decomposition(d, nef_parts, residual, tuple(unverified), tuple(degrees), False,
                           None, tuple(notes))
    sig = result.residual_signature()
    if sig is not None and sig.positive + sig.zero:
        raise AssertionError(f"residual support is not negative definite: {sig}")
    return result
