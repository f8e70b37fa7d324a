"""Command-line front end.

Exit codes: 0 when a verdict is produced (or a check passes), 2 when the
result is inconclusive or a condition is not established, 1 on input
errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .classifier import (CORPUS_ROOT_DEGREE, Certificate, Verdict, classify, corpus,
                         corpus_entry, rebuild_witness, render_witness, witness_to_dict)
from .conditions import (Condition, a1_witness, check_A2, check_A3, check_rank4,
                         regeneration_degree_bound)
from .exceptions import InvalidInputError, K3CertError
from .lattice import DivisorClass, Lattice
from .positivity import RootSet, minimal_nef_decompose
from .qform import enumerate_norm_vectors, isotropic_exists

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2


class DocumentError(InvalidInputError):
    pass


@dataclass(frozen=True)
class LatticeDocument:
    name: str
    lattice: Lattice
    ample: DivisorClass
    roots: RootSet


def _reject_float(text: str):
    raise DocumentError(f"non-integer number {text!r}; only integers are allowed")


def _int_list(value: Any, fieldname: str) -> list[int]:
    if not isinstance(value, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise DocumentError(f"field {fieldname!r}: expected a list of integers")
    return value


def parse_document(text: str, source: str = "<document>") -> LatticeDocument:
    """Parse a JSON lattice document; all invariants are checked here."""
    try:
        doc = json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}: line {exc.lineno}: {exc.msg}") from exc
    except DocumentError as exc:
        raise DocumentError(f"{source}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: top level must be an object")
    known = {"name", "gram", "ample", "roots", "root_degree_bound", "complete"}
    extra = set(doc) - known
    if extra:
        raise DocumentError(f"{source}: unknown field {sorted(extra)[0]!r}")
    for key in ("gram", "ample"):
        if key not in doc:
            raise DocumentError(f"{source}: missing field {key!r}")
    name = doc.get("name", Path(source).stem)
    if not isinstance(name, str):
        raise DocumentError(f"{source}: field 'name': expected a string")
    gram = doc["gram"]
    if not isinstance(gram, list) or not gram:
        raise DocumentError(f"{source}: field 'gram': expected a non-empty matrix")
    rows = [_int_list(row, f"gram[{i}]") for i, row in enumerate(gram)]
    try:
        lat = Lattice(rows, name=name)
        ample = lat.vector(_int_list(doc["ample"], "ample"))
        bound = doc.get("root_degree_bound", CORPUS_ROOT_DEGREE)
        if not isinstance(bound, int) or isinstance(bound, bool) or bound < 0:
            raise DocumentError("field 'root_degree_bound': expected a non-negative integer")
        complete = doc.get("complete", "roots" not in doc)
        if not isinstance(complete, bool):
            raise DocumentError("field 'complete': expected true or false")
        if "roots" in doc:
            if not isinstance(doc["roots"], list):
                raise DocumentError("field 'roots': expected a list of vectors")
            rs = tuple(lat.vector(_int_list(r, f"roots[{i}]"))
                       for i, r in enumerate(doc["roots"]))
            roots = RootSet(rs, ample, bound, complete)
        else:
            if not lat.is_hyperbolic:
                raise DocumentError("invariant: signature must be (1, r-1, 0)")
            roots = RootSet.from_lattice(ample, bound)
    except DocumentError as exc:
        raise DocumentError(f"{source}: {exc}") from exc
    except InvalidInputError as exc:
        raise DocumentError(f"{source}: validation failed: {exc}") from exc
    return LatticeDocument(name, lat, ample, roots)


def load_lattice(ref: str) -> LatticeDocument:
    """A corpus name or the path of a lattice document."""
    try:
        e = corpus_entry(ref)
        return LatticeDocument(e.name, e.lattice, e.ample, e.roots)
    except KeyError:
        pass
    path = Path(ref)
    if not path.is_file():
        raise DocumentError(f"{ref!r} is neither a corpus lattice nor a readable file")
    return parse_document(path.read_text(encoding="utf-8"), str(path))


def parse_class(text: str, lattice: Lattice) -> DivisorClass:
    try:
        coords = [int(s) for s in text.split(",")]
    except ValueError as exc:
        raise InvalidInputError(f"class {text!r}: expected comma-separated integers") from exc
    return lattice.vector(coords)


def parse_parts(text: str, lattice: Lattice) -> list[DivisorClass]:
    return [parse_class(p, lattice) for p in text.split(";") if p.strip()]


# --------------------------------------------------------------------------

def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def cmd_classify(args) -> int:
    doc = load_lattice(args.lattice)
    queried = parse_class(args.cls, doc.lattice) if args.cls else None
    cert = classify(doc.lattice, doc.ample, queried, args.char, doc.roots)
    _emit(args, cert.to_dict(), cert.render_text())
    return EXIT_INCONCLUSIVE if cert.verdict is Verdict.INCONCLUSIVE else EXIT_OK


def _check_certificate(args) -> int:
    src = sys.stdin.read() if args.certificate == "-" else Path(args.certificate).read_text()
    try:
        data = json.loads(src, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"certificate: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise DocumentError("certificate: top level must be an object")
    cert = Certificate.from_dict(data)
    ok = cert.verify()
    _emit(args, {"verdict": cert.verdict.value, "verified": ok},
          f"certificate {cert.verdict.value}: {'verified' if ok else 'FAILED verification'}")
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


def cmd_check(args) -> int:
    if args.certificate:
        return _check_certificate(args)
    if not args.condition or not args.lattice:
        raise InvalidInputError("check needs --condition and --lattice (or --certificate)")
    doc = load_lattice(args.lattice)
    cond = Condition(args.condition)
    target = None
    if cond is not Condition.A1:
        if not args.cls:
            raise InvalidInputError(f"condition {cond.value} needs --class")
        target = parse_class(args.cls, doc.lattice)
    if args.parts is not None:
        if cond is Condition.A1:
            raise InvalidInputError("A1 takes no parts")
        w = rebuild_witness(cond, target, parse_parts(args.parts, doc.lattice))
    elif cond is Condition.A1:
        w = a1_witness(doc.lattice)
    else:
        search = {Condition.A2: check_A2, Condition.A3: check_A3, Condition.RANK4: check_rank4}
        w = search[cond](target, doc.roots)
    if w is None:
        _emit(args, {"condition": cond.value, "holds": False},
              f"condition {cond.value}: not established")
        return EXIT_INCONCLUSIVE
    _emit(args, {"condition": cond.value, "holds": True, "witness": witness_to_dict(w)},
          f"condition {cond.value}: holds\n{render_witness(w)}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    doc = load_lattice(args.lattice)
    d = parse_class(args.cls, doc.lattice)
    dec = minimal_nef_decompose(d, doc.roots)
    payload = {
        "target": list(d.coords),
        "nef_parts": [[list(q.coords), k] for q, k in dec.nef_parts],
        "residual": [[list(r.coords), k] for r, k in dec.residual],
        "degrees": list(dec.degrees),
        "partial": dec.partial,
        "unverified_minimal": [list(q.coords) for q in dec.unverified_minimal],
        "notes": list(dec.notes),
    }
    lines = [f"decomposition of {','.join(map(str, d.coords))}:"]
    lines += [f"  nef part {k} x ({','.join(map(str, q.coords))})" for q, k in dec.nef_parts]
    lines += [f"  residual {k} x ({','.join(map(str, r.coords))})" for r, k in dec.residual]
    lines.append(f"  degrees: {list(dec.degrees)}")
    if dec.partial:
        lines.append("  partial: yes")
    lines += [f"  note: {n}" for n in dec.notes]
    _emit(args, payload, "\n".join(lines))
    return EXIT_INCONCLUSIVE if dec.partial else EXIT_OK


def cmd_isotropic(args) -> int:
    doc = load_lattice(args.lattice)
    v = isotropic_exists(doc.lattice)
    payload = {"status": v.status.value, "method": v.method.value,
               "witness": None if v.witness is None else list(v.witness), "note": v.note}
    text = f"{v.status.value} ({v.method.value})"
    if v.witness is not None:
        text += f" witness {','.join(map(str, v.witness))}"
    _emit(args, payload, text)
    return EXIT_INCONCLUSIVE if v.status.value == "unknown" else EXIT_OK


def cmd_roots(args) -> int:
    doc = load_lattice(args.lattice)
    if args.max_degree < 0:
        raise InvalidInputError("--max-degree must be non-negative")
    found = enumerate_norm_vectors(doc.lattice, -2, doc.ample, args.max_degree)
    _emit(args, {"max_degree": args.max_degree,
                 "roots": [[list(r.coords), doc.ample.dot(r)] for r in found]},
          "\n".join(f"{','.join(map(str, r.coords))}  degree {doc.ample.dot(r)}"
                    for r in found) or "no roots")
    return EXIT_OK


def cmd_bound(args) -> int:
    n = regeneration_degree_bound(args.a, args.b, args.c)
    _emit(args, {"a": args.a, "b": args.b, "c": args.c, "bound": n}, str(n))
    return EXIT_OK


def cmd_corpus(args) -> int:
    entries = [{"name": e.name, "gram": [list(r) for r in e.lattice.gram],
                "ample": list(e.ample.coords), "roots": len(e.roots.roots),
                "root_degree_bound": e.roots.degree_bound} for e in corpus()]
    _emit(args, {"corpus": entries},
          "\n".join(f"{e['name']:<12} gram {e['gram']} ample {e['ample']}" for e in entries))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="k3cert", description="Lattice certificates for rational curves on K3 surfaces.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, lattice=True):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if lattice:
            sp.add_argument("--lattice", required=True, help="corpus name or document path")
        return sp

    sp = add("classify", cmd_classify, "certify a lattice")
    sp.add_argument("--class", dest="cls", help="queried class, e.g. 3,9")
    sp.add_argument("--char", type=int, default=0, help="characteristic (default 0)")

    sp = add("check", cmd_check, "check one condition or re-verify a certificate", lattice=False)
    sp.add_argument("--lattice")
    sp.add_argument("--condition", choices=[c.value for c in Condition])
    sp.add_argument("--class", dest="cls")
    sp.add_argument("--parts", help="witness parts separated by ';', e.g. 1,3;1,3;1,3")
    sp.add_argument("--certificate", help="certificate JSON file to re-verify ('-' for stdin)")

    sp = add("decompose", cmd_decompose, "minimal nef decomposition")
    sp.add_argument("--class", dest="cls", required=True)

    add("isotropic", cmd_isotropic, "decide isotropy")

    sp = add("roots", cmd_roots, "list (-2)-classes by degree")
    sp.add_argument("--max-degree", type=int, required=True)

    sp = add("bound", cmd_bound, "regeneration degree bound", lattice=False)
    sp.add_argument("--a", type=int, required=True, help="H^2")
    sp.add_argument("--b", type=int, required=True, help="H.C")
    sp.add_argument("--c", type=int, required=True, help="C^2")

    add("corpus", cmd_corpus, "list bundled lattices", lattice=False)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (K3CertError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
