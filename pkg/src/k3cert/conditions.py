"""Checkers for the numerical hypotheses of the curve-existence theorems.

Every search here is complete: a part ``L_i`` with ``L.L_i > 0`` and a
bounded square lies in the ellipsoid ``P_L(v) <= const`` (see
:mod:`k3cert.qform`), so ``None`` means no witness exists at all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from enum import Enum
from typing import Sequence

from .exceptions import (HodgeIndexError, InvalidInputError, InvalidLatticeError,
                         InvalidRankError)
from .lattice import (DivisorClass, Lattice, divisibility_violations, form_signature,
                      gram_of, lattice_isomorphic)
from .positivity import Nefness, RootSet, default_prec_basis, is_nef, prec_key
from .qform import slab_vectors

VINBERG_GRAMS = {
    1: ((2, -1, -1, -1),
        (-1, -2, 0, 0),
        (-1, 0, -2, 0),
        (-1, 0, 0, -2)),
    2: ((12, -2, 0, 0),
        (-2, -2, -1, 0),
        (0, -1, -2, -1),
        (0, 0, -1, -2)),
}


class Condition(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    RANK4 = "R4"


@dataclass(frozen=True)
class ConditionWitness:
    """Parts realising a condition, with each verified quantity recorded.

    ``checks`` holds ``(label, value)`` pairs; :meth:`verify` recomputes them
    from ``lattice``, ``target`` and ``parts`` alone.
    """

    condition: Condition
    lattice: Lattice
    target: DivisorClass | None
    parts: tuple[DivisorClass, ...]
    checks: tuple[tuple[str, int], ...]

    def verify(self) -> bool:
        if self.condition is Condition.A1:
            fresh = a1_witness(self.lattice)
        elif self.condition is Condition.A2:
            fresh = verify_A2(self.target, self.parts)
        elif self.condition is Condition.A3:
            fresh = verify_A3(self.target, *self.parts) if len(self.parts) == 2 else None
        else:
            fresh = verify_rank4(self.target, self.parts)
        return fresh is not None and fresh.checks == self.checks


def _witness_order(parts: Sequence[DivisorClass], basis) -> tuple:
    # largest part first: the preferred witness has the smallest largest part
    return tuple(sorted((prec_key(p, basis) for p in parts), reverse=True))


def _basis_for(target: DivisorClass, roots: RootSet | None):
    a = roots.ample if roots is not None else target
    if a.square <= 0:
        raise InvalidInputError("ordering class must have positive square")
    return default_prec_basis(a)


# --------------------------------------------------------------------------
# A1

def check_A1(lattice: Lattice) -> bool:
    if lattice.rank != 2:
        raise InvalidRankError("A1 applies to rank-2 lattices only")
    return lattice.discriminant % 2 == 0


def a1_witness(lattice: Lattice) -> ConditionWitness | None:
    if not check_A1(lattice):
        return None
    return ConditionWitness(Condition.A1, lattice, None, (),
                            (("det", lattice.discriminant),))


# --------------------------------------------------------------------------
# A2 and the rank-4 condition

def _triple_checks(target, parts):
    checks = []
    for i, p in enumerate(parts, 1):
        checks.append((f"L.L{i}", target.dot(p)))
        checks.append((f"L{i}^2", p.square))
    return tuple(checks)


def _valid_triple(target, parts) -> bool:
    if len(parts) != 3:
        return False
    for p in parts:
        target._check(p)
    if parts[0] + parts[1] + parts[2] != target:
        return False
    return all(target.dot(p) > 0 and p.square > 0 for p in parts)


def verify_A2(target: DivisorClass, parts: Sequence[DivisorClass]) -> ConditionWitness | None:
    """Witness for ``L = L1 + L2 + L3`` with ``L.Li > 0`` and ``Li^2 > 0``."""
    parts = tuple(parts)
    if not _valid_triple(target, parts):
        return None
    return ConditionWitness(Condition.A2, target.lattice, target, parts,
                            _triple_checks(target, parts))


@lru_cache(maxsize=512)
def _positive_parts(target: DivisorClass) -> tuple[DivisorClass, ...]:
    # cached: classification, certificate checks and the CLI re-run the same search
    n = target.square
    if n <= 0:
        return ()
    return tuple(v for v in slab_vectors(target, 1, n - 1, 1) if v.square > 0)


def _triple_search(target: DivisorClass, basis) -> tuple[DivisorClass, ...] | None:
    cands = sorted(_positive_parts(target), key=lambda v: prec_key(v, basis))
    coords = [v.coords for v in cands]
    rank = {c: i for i, c in enumerate(coords)}
    t = target.coords
    # scan the largest part upwards; the first one admitting a pair is optimal
    for k, c3 in enumerate(coords):
        rest = tuple(a - b for a, b in zip(t, c3))
        best = None
        for i in range(k + 1):
            j = rank.get(tuple(a - b for a, b in zip(rest, coords[i])))
            if j is not None and i <= j <= k and (best is None or (j, i) < best):
                best = (j, i)
        if best is not None:
            j, i = best
            return cands[i], cands[j], cands[k]
    return None


def a2_triples(target: DivisorClass) -> list[tuple[DivisorClass, DivisorClass, DivisorClass]]:
    """Every unordered A2 triple, parts sorted by coordinates."""
    parts = sorted(_positive_parts(target), key=lambda v: v.coords)
    index = {v.coords: i for i, v in enumerate(parts)}
    out = []
    for i, l1 in enumerate(parts):
        for l2 in parts[i:]:
            j = index.get((target - l1 - l2).coords)
            if j is not None and parts[j].coords >= l2.coords:
                out.append((l1, l2, parts[j]))
    return out


def check_A2(target: DivisorClass, roots: RootSet | None = None) -> ConditionWitness | None:
    """Exhaustive search for an A2 triple.

    Among all triples the one whose largest part (in the degree order) is
    smallest is returned, so ``3M`` yields ``(M, M, M)`` whenever ``M``
    qualifies.
    """
    parts = _triple_search(target, _basis_for(target, roots))
    return None if parts is None else verify_A2(target, parts)


def recognize_vinberg(lattice: Lattice) -> int | None:
    """1 or 2 if ``lattice`` is isometric to that Vinberg lattice, else None."""
    if lattice.rank != 4:
        return None
    for which, gram in VINBERG_GRAMS.items():
        if lattice_isomorphic(Lattice(gram), lattice) is not None:
            return which
    return None


def verify_rank4(target: DivisorClass, parts: Sequence[DivisorClass]) -> ConditionWitness | None:
    if recognize_vinberg(target.lattice) is None:
        raise InvalidLatticeError("lattice is not one of the two Vinberg lattices")
    parts = tuple(parts)
    if not _valid_triple(target, parts):
        return None
    return ConditionWitness(Condition.RANK4, target.lattice, target, parts,
                            _triple_checks(target, parts))


def check_rank4(target: DivisorClass, roots: RootSet | None = None) -> ConditionWitness | None:
    if recognize_vinberg(target.lattice) is None:
        raise InvalidLatticeError("lattice is not one of the two Vinberg lattices")
    parts = _triple_search(target, _basis_for(target, roots))
    return None if parts is None else verify_rank4(target, parts)


# --------------------------------------------------------------------------
# A3

A3_THRESHOLD = 18


def verify_A3(target: DivisorClass, l1: DivisorClass, l2: DivisorClass
              ) -> ConditionWitness | None:
    """Witness for ``L = L1 + L2`` under the A3 constraints, or None."""
    target._check(l1)
    target._check(l2)
    if l1 + l2 != target:
        return None
    if target.dot(l1) <= 0 or target.dot(l2) <= 0:
        return None
    if l1.square <= 0 or l2.square != -2:
        return None
    div = divisibility_violations(l1, l2)
    if not div.clear:
        return None
    value = l1.square + 2 * l1.dot(l2)
    if value < A3_THRESHOLD:
        return None
    checks = (("L.L1", target.dot(l1)), ("L.L2", target.dot(l2)), ("L1^2", l1.square),
              ("L2^2", l2.square), ("content(L1)", l1.content),
              ("content(L1-L2)", (l1 - l2).content), ("L1^2+2L1.L2", value))
    return ConditionWitness(Condition.A3, target.lattice, target, (l1, l2), checks)


def a3_splits(target: DivisorClass) -> list[ConditionWitness]:
    """Every A3 witness ``(L1, L2)``, ordered by the coordinates of ``L2``."""
    n = target.square
    if n <= 0:
        return []
    out = []
    for l2 in sorted(slab_vectors(target, 1, n - 1, -2), key=lambda v: v.coords):
        if l2.square == -2:
            w = verify_A3(target, target - l2, l2)
            if w is not None:
                out.append(w)
    return out


def check_A3(target: DivisorClass, roots: RootSet | None = None) -> ConditionWitness | None:
    if target.square <= 0:
        return None
    basis = _basis_for(target, roots)
    best = None
    best_key = None
    for w in a3_splits(target):
        order = _witness_order(w.parts, basis)
        if best_key is None or order < best_key:
            best, best_key = w, order
    return best


# --------------------------------------------------------------------------
# inequalities

def genus1_bound_values(s: int, x: int) -> bool:
    """``x >= 4s + sqrt(17 (s - 2) s)`` decided by squaring."""
    if s < 2:
        raise InvalidInputError("needs A^2 >= 2")
    return x >= 4 * s and (x - 4 * s) ** 2 >= 17 * (s - 2) * s


def genus1_bound_holds(ample: DivisorClass, root: DivisorClass) -> bool:
    if ample.square < 2:
        raise InvalidInputError("needs A^2 >= 2")
    if root.square != -2:
        raise InvalidInputError("needs R^2 = -2")
    return genus1_bound_values(ample.square, ample.dot(root))


def genus1_threshold(s: int) -> int:
    """Smallest degree ``A.R`` satisfying the genus-1 bound for ``A^2 = s``."""
    x = 4 * s + math.isqrt(17 * (s - 2) * s)
    while not genus1_bound_values(s, x):
        x += 1
    while x > 4 * s and genus1_bound_values(s, x - 1):
        x -= 1
    return x


def hodge_scalar_form(a2: int, d2: int, ad: int, ar: int, dr: int) -> bool:
    """``(2AD + (AR)(DR))^2 >= (2A^2 + (AR)^2)(2D^2 + (DR)^2)`` (for ``R^2 = -2``)."""
    return (2 * ad + ar * dr) ** 2 >= (2 * a2 + ar * ar) * (2 * d2 + dr * dr)


def hodge_index_validate(classes: Sequence[DivisorClass]) -> bool:
    """At most one positive eigenvalue on the span of ``classes``.

    For a triple ``(A, D, R)`` with ``A^2 > 0``, ``D^2 >= 0`` and
    ``R^2 = -2`` the scalar form of the same statement is checked too.
    """
    classes = list(classes)
    if not classes:
        raise InvalidInputError("need at least one class")
    g = gram_of(classes)
    ok = form_signature(g).positive <= 1
    if len(classes) == 3:
        a, d, r = classes
        if a.square > 0 and d.square >= 0 and r.square == -2:
            ok = ok and hodge_scalar_form(a.square, d.square, a.dot(d), a.dot(r), d.dot(r))
    return ok


def _regen_ok(n: int, a: int, b: int, disc: int) -> bool:
    t = n * a - b
    return t > 0 and t * t > disc


def regeneration_degree_bound(a: int, b: int, c: int) -> int:
    """``n0 + 2`` for the least integer ``n0 > (b + sqrt(b^2 - ac)) / a``."""
    if a <= 0:
        raise InvalidInputError("needs a = H^2 > 0")
    disc = b * b - a * c
    if disc <= 0:
        raise HodgeIndexError(f"b^2 - ac = {disc} must be positive")
    n = (b + math.isqrt(disc)) // a
    while not _regen_ok(n, a, b, disc):
        n += 1
    while _regen_ok(n - 1, a, b, disc):
        n -= 1
    return n + 2


@dataclass(frozen=True)
class GenusPlan:
    target: DivisorClass
    genus: int
    intersection: int


def genus_reduction_plan(g: int, curve: DivisorClass, elliptic: DivisorClass,
                         roots: RootSet | None = None) -> GenusPlan | None:
    """Attach a genus-1 class ``E`` to a rational class ``C`` when ``2 <= g <= C.E``."""
    if g < 2:
        raise InvalidInputError("target genus must be at least 2")
    curve._check(elliptic)
    if elliptic.square < 0:
        raise InvalidInputError("genus-1 class must have E^2 >= 0")
    if curve.square < -2:
        raise InvalidInputError("rational class must have C^2 >= -2")
    if roots is not None and is_nef(elliptic, roots).status is Nefness.NOT_NEF:
        raise InvalidInputError("genus-1 class is not nef")
    ce = curve.dot(elliptic)
    if ce < g:
        return None
    return GenusPlan(curve + elliptic, g, ce)


def big_nef_sum(e1: DivisorClass, e2: DivisorClass, roots: RootSet) -> bool:
    if not (is_nef(e1, roots).nef and is_nef(e2, roots).nef):
        return False
    return (e1 + e2).square > 0


def fibration_index(lattice: Lattice, fiber: DivisorClass) -> int:
    """gcd of ``D.F`` over the lattice."""
    if fiber.lattice != lattice:
        raise InvalidInputError("fiber class is not in the given lattice")
    if not fiber or fiber.square != 0:
        raise InvalidInputError("fiber class must be nonzero and isotropic")
    return math.gcd(*(e.dot(fiber) for e in lattice.basis()))
