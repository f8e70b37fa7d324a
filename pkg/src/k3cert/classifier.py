"""Case analysis from a Picard lattice to the result that produces rational curves.

:func:`classify` walks a fixed decision order (rank >= 5, isotropy, odd
rank, the two exceptional rank-4 lattices, other rank-4 lattices, rank 2)
and returns a :class:`Certificate` holding enough data to be re-checked
without trusting this module.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any

from .conditions import (VINBERG_GRAMS, Condition, ConditionWitness, a1_witness, check_A1,
                         check_A2, check_A3, check_rank4, recognize_vinberg, verify_A2,
                         verify_A3, verify_rank4)
from .exceptions import InvalidAmpleError, InvalidInputError, NotK3LatticeError
from .lattice import DivisorClass, Lattice
from .positivity import BigNefness, RootSet, is_big_nef
from .qform import IsotropyStatus, height_key, sign_normalize, isotropic_exists, slab_vectors

CORPUS_ROOT_DEGREE = 10
_VINBERG_DISCRIMINANTS = {Lattice(g).discriminant: k for k, g in VINBERG_GRAMS.items()}

GENERIC_MEMBER = ("lattice conditions only: the curve statement holds for a generic member "
                  "of the moduli of lattice-polarised K3 surfaces")
ISOTRIVIAL_CAVEAT = ("characteristic {p}: the elliptic fibration may be isotrivial, "
                     "which is the one possible exception")
NON_SUPERSPECIAL = "characteristic {p}: surface assumed not superspecial"
SUPERSINGULAR_CAVEAT = ("characteristic {p}: odd rank result excludes the supersingular "
                        "cases it names")


class Verdict(str, Enum):
    ODD_RANK = "OddRank"
    ELLIPTIC = "Elliptic"
    RANK4_EXCEPTIONAL = "Rank4Exceptional"
    RANK2_CONDITION = "Rank2Condition"
    INFINITE_AUTOMORPHISMS = "InfiniteAutomorphismsDeduced"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    lattice: Lattice
    ample: DivisorClass
    queried: DivisorClass | None
    characteristic: int
    assumptions: tuple[str, ...] = ()
    reasons: tuple[str, ...] = ()
    elliptic_witness: DivisorClass | None = None
    which: int | str | None = None
    witness: ConditionWitness | None = None
    roots: RootSet | None = field(default=None, compare=False)

    def verify(self) -> bool:
        """Re-check every embedded witness and the verdict itself."""
        lat = self.lattice
        if not lat.is_hyperbolic:
            return False
        v = self.verdict
        if v is Verdict.ELLIPTIC:
            w = self.elliptic_witness
            if w is None or not w or w.square != 0 or w.content != 1:
                return False
        elif v is Verdict.ODD_RANK:
            if lat.rank % 2 == 0:
                return False
        elif v is Verdict.RANK4_EXCEPTIONAL:
            if self.witness is None or recognize_vinberg(lat) != self.which:
                return False
            if self.witness.target != self.queried or not self.witness.verify():
                return False
        elif v is Verdict.RANK2_CONDITION:
            if lat.rank != 2 or self.witness is None or not self.witness.verify():
                return False
            if self.which != self.witness.condition.value:
                return False
            if self.which != "A1" and self.witness.target != self.queried:
                return False
        elif v is Verdict.INFINITE_AUTOMORPHISMS:
            if lat.rank != 4 or recognize_vinberg(lat) is not None:
                return False
        if v is not Verdict.ELLIPTIC and lat.rank <= 4:
            if isotropic_exists(lat).status is not IsotropyStatus.ANISOTROPIC:
                return False
        again = classify(lat, self.ample, self.queried, self.characteristic, self.roots)
        return again == self

    # ---- serialisation

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "verdict": self.verdict.value,
            "lattice": {"name": self.lattice.name, "gram": [list(r) for r in self.lattice.gram]},
            "ample": list(self.ample.coords),
            "queried": None if self.queried is None else list(self.queried.coords),
            "characteristic": self.characteristic,
            "assumptions": list(self.assumptions),
            "reasons": list(self.reasons),
        }
        if self.elliptic_witness is not None:
            doc["elliptic_witness"] = list(self.elliptic_witness.coords)
        if self.which is not None:
            doc["which"] = self.which
        if self.witness is not None:
            doc["witness"] = witness_to_dict(self.witness)
        if self.roots is not None:
            doc["roots"] = {"roots": [list(r.coords) for r in self.roots.roots],
                            "degree_bound": self.roots.degree_bound,
                            "complete": self.roots.complete_up_to_bound}
        return doc

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Certificate":
        try:
            lat = Lattice(doc["lattice"]["gram"], name=doc["lattice"].get("name"))
            ample = lat.vector(doc["ample"])
            q = doc.get("queried")
            roots = None
            if doc.get("roots") is not None:
                rd = doc["roots"]
                roots = RootSet(tuple(lat.vector(r) for r in rd["roots"]), ample,
                                rd["degree_bound"], bool(rd["complete"]))
            ew = doc.get("elliptic_witness")
            w = doc.get("witness")
            return cls(
                verdict=Verdict(doc["verdict"]),
                lattice=lat, ample=ample,
                queried=None if q is None else lat.vector(q),
                characteristic=doc["characteristic"],
                assumptions=tuple(doc.get("assumptions", ())),
                reasons=tuple(doc.get("reasons", ())),
                elliptic_witness=None if ew is None else lat.vector(ew),
                which=doc.get("which"),
                witness=None if w is None else witness_from_dict(w, lat),
                roots=roots,
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed certificate: {exc!r}") from exc
        except ValueError as exc:
            raise InvalidInputError(f"malformed certificate: {exc}") from exc

    def render_text(self) -> str:
        lat = self.lattice
        lines = [f"verdict: {self.verdict.value}",
                 f"lattice: {lat.name or '-'} gram {[list(r) for r in lat.gram]}",
                 f"characteristic: {self.characteristic}"]
        if self.queried is not None:
            lines.append(f"queried: {_fmt(self.queried)}")
        if self.elliptic_witness is not None:
            lines.append(f"isotropic witness: {_fmt(self.elliptic_witness)}")
        if self.which is not None:
            lines.append(f"which: {self.which}")
        if self.witness is not None:
            lines.append(render_witness(self.witness))
        for title, items in (("assumptions", self.assumptions), ("reasons", self.reasons)):
            if items:
                lines.append(f"{title}:")
                lines.extend(f"  - {s}" for s in items)
        return "\n".join(lines)


def _fmt(v: DivisorClass) -> str:
    return ",".join(str(c) for c in v.coords)


def render_witness(w: ConditionWitness) -> str:
    lines = [f"condition {w.condition.value} witness:"]
    for i, p in enumerate(w.parts, 1):
        lines.append(f"  L{i} = {_fmt(p)}")
    lines.extend(f"  {label} = {value}" for label, value in w.checks)
    return "\n".join(lines)


def witness_to_dict(w: ConditionWitness) -> dict[str, Any]:
    return {"condition": w.condition.value,
            "target": None if w.target is None else list(w.target.coords),
            "parts": [list(p.coords) for p in w.parts],
            "checks": [[label, value] for label, value in w.checks]}


def witness_from_dict(doc: dict[str, Any], lat: Lattice) -> ConditionWitness:
    t = doc.get("target")
    return ConditionWitness(Condition(doc["condition"]), lat,
                            None if t is None else lat.vector(t),
                            tuple(lat.vector(p) for p in doc["parts"]),
                            tuple((str(label), int(value)) for label, value in doc["checks"]))


def rebuild_witness(condition: Condition, target: DivisorClass | None,
                    parts: list[DivisorClass]) -> ConditionWitness | None:
    """Recompute a witness from its parts, or None if they do not qualify."""
    if condition is Condition.A1:
        return a1_witness(target.lattice)
    if condition is Condition.A2:
        return verify_A2(target, parts)
    if condition is Condition.A3:
        return verify_A3(target, *parts) if len(parts) == 2 else None
    return verify_rank4(target, parts)


# --------------------------------------------------------------------------

def _validate(lattice, ample, queried, char, roots):
    if not isinstance(char, int) or isinstance(char, bool) or char < 0:
        raise InvalidInputError("characteristic must be a non-negative integer")
    if not lattice.is_hyperbolic:
        raise NotK3LatticeError(
            f"signature {tuple(lattice.signature)} is not (1, {lattice.rank - 1}, 0)")
    if ample.lattice != lattice:
        raise InvalidInputError("ample class is not in the given lattice")
    if ample.square <= 0:
        raise InvalidAmpleError("ample class must have positive square")
    if queried is not None and queried.lattice != lattice:
        raise InvalidInputError("queried class is not in the given lattice")
    if roots is not None:
        if roots.lattice != lattice:
            raise InvalidInputError("root set is not in the given lattice")
        bad = [r for r in roots.roots if ample.dot(r) <= 0]
        if bad:
            raise InvalidAmpleError(f"ample class has non-positive degree on root {_fmt(bad[0])}")


def _char_assumptions(char: int) -> list[str]:
    return [NON_SUPERSPECIAL.format(p=char)] if char > 0 else []


def _positivity_gate(queried: DivisorClass, roots: RootSet | None):
    """(assumptions, failure reason) for the big-and-nef hypothesis on ``queried``."""
    if queried.square <= 0:
        return [], f"queried class has square {queried.square} <= 0, so it is not big"
    if roots is None:
        return ["queried class big and nef: asserted by caller (no root set supplied)"], None
    bn = is_big_nef(queried, roots)
    if bn.status is BigNefness.BIG_NEF:
        return ["queried class big and nef: verified against the supplied roots"], None
    if bn.status is BigNefness.NOT_NEF:
        w = bn.nef.witness
        return [], f"queried class is not nef: root {_fmt(w)} has degree {queried.dot(w)}"
    return [f"queried class big and nef: asserted by caller ({bn.nef.reason or 'undecided'})"], None


def _roots_assumption(roots: RootSet | None) -> list[str]:
    if roots is None:
        return []
    if roots.complete_up_to_bound:
        return [f"root set complete up to degree {roots.degree_bound}"]
    return [f"root set of {len(roots.roots)} roots, completeness not asserted"]


def classify(lattice: Lattice, ample: DivisorClass, queried: DivisorClass | None = None,
             char: int = 0, roots: RootSet | None = None, cap: int | None = None
             ) -> Certificate:
    _validate(lattice, ample, queried, char, roots)
    base = dict(lattice=lattice, ample=ample, queried=queried, characteristic=char, roots=roots)
    r = lattice.rank

    iso = isotropic_exists(lattice, cap)
    if iso.isotropic:
        w = lattice.vector(iso.witness)
        g = w.content
        w = lattice.vector(c // g for c in w.coords)
        notes = [f"isotropic class found by {iso.method.value}"]
        if char in (2, 3):
            notes.append(ISOTRIVIAL_CAVEAT.format(p=char))
        notes += _char_assumptions(char)
        return Certificate(Verdict.ELLIPTIC, assumptions=tuple(notes), elliptic_witness=w, **base)
    if iso.status is IsotropyStatus.UNKNOWN:
        return Certificate(Verdict.INCONCLUSIVE, reasons=(
            "form is isotropic at every place but no isotropic class was found within the "
            f"search cap ({iso.note})",), **base)

    if r % 2 == 1:
        notes = [SUPERSINGULAR_CAVEAT.format(p=char)] if char > 0 else []
        return Certificate(Verdict.ODD_RANK, assumptions=tuple(notes), **base)

    common = _roots_assumption(roots) + _char_assumptions(char)

    if r == 4:
        which = recognize_vinberg(lattice)
        if which is None:
            k = _VINBERG_DISCRIMINANTS.get(lattice.discriminant)
            if k is not None:
                return Certificate(Verdict.INCONCLUSIVE, reasons=(
                    f"invariants match exceptional rank-4 lattice {k} but no isometry was found "
                    "in the bounded search",), **base)
            return Certificate(Verdict.INFINITE_AUTOMORPHISMS, assumptions=tuple(
                ["anisotropic rank-4 lattice outside the two exceptional ones"] + common), **base)
        if queried is None:
            return Certificate(Verdict.INCONCLUSIVE, which=which, reasons=(
                f"exceptional rank-4 lattice {which}: no queried class to decompose",), **base)
        gate, failure = _positivity_gate(queried, roots)
        if failure:
            return Certificate(Verdict.INCONCLUSIVE, which=which, reasons=(failure,), **base)
        w = check_rank4(queried, roots)
        if w is None:
            return Certificate(Verdict.INCONCLUSIVE, which=which, reasons=(
                "R4: no triple L1+L2+L3 = L with L.Li > 0 and Li^2 > 0",), **base)
        return Certificate(Verdict.RANK4_EXCEPTIONAL, which=which, witness=w,
                           assumptions=tuple([GENERIC_MEMBER] + gate + common), **base)

    # rank 2, anisotropic
    if check_A1(lattice):
        return Certificate(Verdict.RANK2_CONDITION, which="A1", witness=a1_witness(lattice),
                           assumptions=tuple([GENERIC_MEMBER] + common), **base)
    reasons = [f"A1: det = {lattice.discriminant} is odd"]
    if queried is None:
        reasons.append("A2/A3: no queried class")
        return Certificate(Verdict.INCONCLUSIVE, reasons=tuple(reasons), **base)
    gate, failure = _positivity_gate(queried, roots)
    if failure:
        reasons.append(failure)
        return Certificate(Verdict.INCONCLUSIVE, reasons=tuple(reasons), **base)
    for name, check in (("A2", check_A2), ("A3", check_A3)):
        w = check(queried, roots)
        if w is not None:
            return Certificate(Verdict.RANK2_CONDITION, which=name, witness=w,
                               assumptions=tuple([GENERIC_MEMBER] + gate + common), **base)
    reasons.append("A2: no triple L1+L2+L3 = L with L.Li > 0 and Li^2 > 0")
    reasons.append(f"A3: no split L1+L2 = L qualifies (L^2 = {queried.square})")
    return Certificate(Verdict.INCONCLUSIVE, reasons=tuple(reasons), **base)


# --------------------------------------------------------------------------
# bundled lattices

@dataclass(frozen=True)
class CorpusEntry:
    name: str
    lattice: Lattice
    ample: DivisorClass
    roots: RootSet


def _find_ample(lat: Lattice, box: int = 2) -> DivisorClass:
    """Smallest class of positive square that is orthogonal to no root."""
    cands = sorted((x for x in itertools.product(range(-box, box + 1), repeat=lat.rank)
                    if any(x) and sign_normalize(x) == x), key=height_key)
    for x in cands:
        a = lat.vector(x)
        if a.square > 0 and not any(v.square == -2 for v in slab_vectors(a, 0, 0, -2)):
            return a
    raise InvalidInputError("no ample class in the search box")


_CORPUS_SPECS = (
    ("U", ((0, 1), (1, 0)), (2, 1)),
    ("<2>", ((2,),), (1,)),
    ("<4>", ((4,),), (1,)),
    ("<6>", ((6,),), (1,)),
    ("bryan-leung", ((-2, 1), (1, 0)), (1, 3)),
    ("vinberg-1", VINBERG_GRAMS[1], None),
    ("vinberg-2", VINBERG_GRAMS[2], None),
    ("k3-2m-5", ((2, 1), (1, -2)), (1, 0)),
    ("k3-2m-12", ((2, 0), (0, -6)), (1, 0)),
)


@lru_cache(maxsize=None)
def corpus() -> tuple[CorpusEntry, ...]:
    out = []
    for name, gram, ample in _CORPUS_SPECS:
        lat = Lattice(gram, name=name)
        a = _find_ample(lat) if ample is None else lat.vector(ample)
        out.append(CorpusEntry(name, lat, a, RootSet.from_lattice(a, CORPUS_ROOT_DEGREE)))
    return tuple(out)


def corpus_entry(name: str) -> CorpusEntry:
    for e in corpus():
        if e.name == name:
            return e
    raise KeyError(name)
