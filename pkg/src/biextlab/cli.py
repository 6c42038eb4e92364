"""Command-line front end and the declarative input format.

Documents are line oriented::

    group B1 = Z/2               # sums: Z/6 + Z/4, Z + Z/3, ...
    hom u : A -> B = [[1,0],[0,1]]   # rows follow target generators
    complex K1 = A --u--> B

``0`` names the trivial group and every zero map.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .abgroup import FgAbGroup, GroupHom, present_orders, snf
from .complex import TwoTermComplex, homology
from .errors import (
    BicomplexInvalid,
    BiextlabError,
    IllDefinedHom,
    InfiniteGroup,
    ParseError,
    RouteMismatch,
    SizeGuardExceeded,
    UnknownName,
)

SCHEMA = 1
DEFAULT_MAX_ORDER = 16

EXIT_OK, EXIT_PARSE, EXIT_INPUT, EXIT_GUARD, EXIT_STRICT, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5

# --------------------------------------------------------------------------
# documents


@dataclass(frozen=True)
class GroupDecl:
    name: str
    terms: tuple[int, ...]  # 0 for Z, n for Z/n, in declared order

    @property
    def presentation(self):
        return present_orders(self.terms)

    @property
    def group(self) -> FgAbGroup:
        return self.presentation.group

    def text(self) -> str:
        body = " + ".join("Z" if t == 0 else f"Z/{t}" for t in self.terms) or "0"
        return f"group {self.name} = {body}"


@dataclass(frozen=True)
class HomDecl:
    name: str
    source: str
    target: str
    matrix: tuple[tuple[int, ...], ...]  # over declared generators

    def text(self) -> str:
        rows = ",".join("[" + ",".join(str(x) for x in r) + "]" for r in self.matrix)
        return f"hom {self.name} : {self.source} -> {self.target} = [{rows}]"


@dataclass(frozen=True)
class ComplexDecl:
    name: str
    A: str
    hom: str
    B: str

    def text(self) -> str:
        return f"complex {self.name} = {self.A} --{self.hom}--> {self.B}"


@dataclass
class InputDocument:
    groups: dict[str, GroupDecl] = field(default_factory=dict)
    homs: dict[str, HomDecl] = field(default_factory=dict)
    complexes: dict[str, ComplexDecl] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)
    resolved_groups: dict[str, FgAbGroup] = field(default_factory=dict)
    resolved_homs: dict[str, GroupHom] = field(default_factory=dict)
    resolved_complexes: dict[str, TwoTermComplex] = field(default_factory=dict)

    def serialize(self) -> str:
        lines = []
        for name in self.order:
            kind, key = name.split(":", 1)
            lines.append({"g": self.groups, "h": self.homs, "c": self.complexes}[kind][key].text())
        return "\n".join(lines) + ("\n" if lines else "")

    def declarations(self) -> tuple:
        return (self.groups, self.homs, self.complexes, self.order)

    def __eq__(self, other) -> bool:
        return isinstance(other, InputDocument) and self.declarations() == other.declarations()

    def complex(self, name: str) -> TwoTermComplex:
        if name not in self.resolved_complexes:
            raise UnknownName(name)
        return self.resolved_complexes[name]


_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_GROUP_RE = re.compile(rf"group\s+({_NAME})\s*=\s*(.+)$")
_HOM_RE = re.compile(rf"hom\s+({_NAME})\s*:\s*({_NAME}|0)\s*->\s*({_NAME}|0)\s*=\s*(.+)$")
_COMPLEX_RE = re.compile(rf"complex\s+({_NAME})\s*=\s*({_NAME}|0)\s*--\s*({_NAME}|0)\s*-->\s*({_NAME}|0)\s*$")
_TERM_RE = re.compile(r"\s*(?:Z/(\d+)|(Z)|(0))\s*$")


def _column(raw: str, fragment: str) -> int:
    i = raw.find(fragment)
    return i + 1 if i >= 0 else 1


def _parse_terms(body: str, lineno: int, raw: str) -> tuple[int, ...]:
    terms = []
    for part in body.split("+"):
        m = _TERM_RE.match(part)
        if not m:
            raise ParseError(f"expected 'Z', 'Z/<n>' or '0', found {part.strip()!r}", lineno, _column(raw, part.strip()))
        if m.group(1) is not None:
            n = int(m.group(1))
            if n < 1:
                raise ParseError("cyclic order must be positive", lineno, _column(raw, part.strip()))
            terms.append(n)
        elif m.group(2):
            terms.append(0)
    return tuple(terms)


def _parse_matrix(text: str, lineno: int, raw: str) -> tuple[tuple[int, ...], ...]:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"expected a matrix [[...],...]: {exc.msg}", lineno, _column(raw, text) + exc.pos) from None
    if not isinstance(value, list) or not all(
        isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r) for r in value
    ):
        raise ParseError("expected a list of integer rows", lineno, _column(raw, text))
    return tuple(tuple(r) for r in value)


def _declared_hom(decl: HomDecl, src: GroupDecl, tgt: GroupDecl, lineno: int) -> GroupHom:
    """Check the matrix against the declared relations, then move to normal forms."""
    m, n = len(tgt.terms), len(src.terms)
    mat = decl.matrix
    if m == 0 and mat in ((), ((),)):
        mat = ()
    if len(mat) != m or any(len(r) != n for r in mat):
        raise ParseError(f"hom {decl.name}: matrix must be {m}×{n}", lineno, 1)
    for j, d in enumerate(src.terms):
        if d == 0:
            continue
        for i, e in enumerate(tgt.terms):
            if (d * mat[i][j]) % e if e else d * mat[i][j]:
                tname = "Z" if e == 0 else f"Z/{e}"
                raise IllDefinedHom(
                    f"line {lineno}: hom {decl.name}: {d}·(generator {j + 1} of {decl.source}) "
                    f"has entry {d * mat[i][j]} in {tname} (row {i + 1}), which is nonzero"
                )
    sp, tp = src.presentation, tgt.presentation
    rows = []
    for r in range(tp.group.ngens):
        to_row = tp.to_normal[r]
        row = {}
        for k, lift in enumerate(sp.from_normal):
            v = sum(to_row.get(i, 0) * mat[i][j] * c for i in range(m) for j, c in lift.items())
            if v:
                row[k] = v
        rows.append(row)
    return GroupHom(sp.group, tp.group, rows=rows)


def parse(text: str) -> InputDocument:
    doc = InputDocument()
    zero = GroupDecl("0", ())
    doc.resolved_groups["0"] = FgAbGroup()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("group"):
            m = _GROUP_RE.match(line)
            if not m:
                raise ParseError("expected 'group <Name> = <term> (+ <term>)*'", lineno, 1)
            name, body = m.groups()
            _fresh(doc, name, lineno, raw)
            decl = GroupDecl(name, _parse_terms(body, lineno, raw))
            doc.groups[name] = decl
            doc.resolved_groups[name] = decl.group
            doc.order.append(f"g:{name}")
        elif line.startswith("hom"):
            m = _HOM_RE.match(line)
            if not m:
                raise ParseError("expected 'hom <name> : <Src> -> <Tgt> = [[...],...]'", lineno, 1)
            name, s, t, body = m.groups()
            _fresh(doc, name, lineno, raw)
            src = zero if s == "0" else _lookup(doc.groups, s, lineno)
            tgt = zero if t == "0" else _lookup(doc.groups, t, lineno)
            decl = HomDecl(name, s, t, _parse_matrix(body, lineno, raw))
            doc.resolved_homs[name] = _declared_hom(decl, src, tgt, lineno)
            doc.homs[name] = decl
            doc.order.append(f"h:{name}")
        elif line.startswith("complex"):
            m = _COMPLEX_RE.match(line)
            if not m:
                raise ParseError("expected 'complex <Name> = <A> --<hom>--> <B>'", lineno, 1)
            name, a, h, b = m.groups()
            _fresh(doc, name, lineno, raw)
            ga = doc.resolved_groups[a] if a in doc.resolved_groups else _lookup(doc.groups, a, lineno)
            gb = doc.resolved_groups[b] if b in doc.resolved_groups else _lookup(doc.groups, b, lineno)
            if h == "0":
                u = GroupHom.zero(ga, gb)
            else:
                hd = _lookup(doc.homs, h, lineno)
                if (hd.source, hd.target) != (a, b):
                    raise ParseError(
                        f"hom {h} goes {hd.source} -> {hd.target}, not {a} -> {b}", lineno, _column(raw, h)
                    )
                u = doc.resolved_homs[h]
            doc.complexes[name] = ComplexDecl(name, a, h, b)
            doc.resolved_complexes[name] = TwoTermComplex(ga, gb, u)
            doc.order.append(f"c:{name}")
        else:
            word = line.split()[0]
            raise ParseError(f"expected 'group', 'hom' or 'complex', found {word!r}", lineno, _column(raw, word))
    return doc


def _fresh(doc: InputDocument, name: str, lineno: int, raw: str) -> None:
    if name == "0" or name in doc.groups or name in doc.homs or name in doc.complexes:
        raise ParseError(f"name {name!r} is already declared", lineno, _column(raw, name))


def _lookup(table: dict, name: str, lineno: int):
    if name not in table:
        raise UnknownName(name, lineno)
    return table[name]


# --------------------------------------------------------------------------
# serialization of results


def group_json(g: FgAbGroup) -> dict:
    return {"free_rank": g.free_rank, "torsion": list(g.torsion)}


def _hom_json(h: GroupHom) -> list[list[int]]:
    return [list(r) for r in h.matrix]


def _table_json(table: dict) -> list:
    return [[[list(x) for x in k], list(v)] for k, v in sorted(table.items())]


def _max_order(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("BIEXTLAB_MAX_ORDER")
    return int(env) if env else DEFAULT_MAX_ORDER


# --------------------------------------------------------------------------
# commands


def _cmd_snf(args, doc) -> tuple[dict, int]:
    text = args.source
    mat = _parse_matrix(text.strip(), 1, text)
    if len({len(r) for r in mat}) > 1:
        raise ParseError("rows have different lengths", 1, 1)
    d = snf([list(r) for r in mat])
    return {"U": d.U, "S": d.S, "V": d.V, "diagonal": list(d.diagonal)}, EXIT_OK


def _cmd_homology(args, doc) -> tuple[dict, int]:
    K = doc.complex(args.complex).complex
    degrees = [args.degree] if args.degree is not None else [0, 1]
    return {"homology": {str(n): group_json(homology(K, n)) for n in degrees}}, EXIT_OK


def _cmd_resolve(args, doc) -> tuple[dict, int]:
    from .resolution import canonical_resolution

    K = doc.complex(args.complex)
    res = canonical_resolution(K, max_order=_max_order(args.max_order))
    bc = res.bicomplex
    positions = sorted(bc.positions())
    out: dict = {}
    if args.stats:
        out["components"] = [
            {"position": list(p), "rank": bc.component(*p).ngens} for p in positions
        ]
        out["ranks"] = [bc.component(*p).ngens for p in positions]
    tot = res.total
    out["homology"] = {str(n): group_json(homology(tot, n)) for n in (0, 1)}
    return out, EXIT_OK


def _cmd_ext(args, doc) -> tuple[dict, int]:
    from .pairing import ext_geometric, ext_groups_homological

    K1, K3 = doc.complex(args.k1), doc.complex(args.k3)
    out: dict = {}
    if args.side in ("geometric", "both"):
        geo = ext_geometric(K1, K3, max_order=_max_order(args.max_order))
        out["geometric"] = {"ext0": group_json(geo.groups[0]), "ext1": group_json(geo.groups[1])}
        if args.witnesses:
            out["geometric"]["witnesses"] = [
                {"f": _table_json(d.f), "r": _table_json(d.r)} for d in geo.data()
            ]
    if args.side in ("homological", "both"):
        e0, e1 = ext_groups_homological(K1, K3)
        out["homological"] = {"ext0": group_json(e0), "ext1": group_json(e1)}
    return out, EXIT_OK


def _biext_witness(d) -> dict:
    return {k: _table_json(getattr(d, k)) for k in ("phi", "psi", "rho1", "rho2", "lam")}


def _cmd_biext(args, doc) -> tuple[dict, int]:
    from .pairing import biext_geometric, biext_homological

    K1, K2, K3 = (doc.complex(n) for n in (args.k1, args.k2, args.k3))
    mo = _max_order(args.max_order)
    out: dict = {}
    if args.side in ("geometric", "both"):
        geo = biext_geometric(K1, K2, K3, max_order=mo)
        out["geometric"] = {"biext0": group_json(geo.groups[0]), "biext1": group_json(geo.groups[1])}
        if args.witnesses:
            out["geometric"]["witnesses"] = [_biext_witness(d) for d in geo.data()]
    if args.side in ("homological", "both"):
        h = biext_homological(K1, K2, K3, max_order=mo)
        out["homological"] = {
            "ext0": group_json(h.ext0),
            "ext1": group_json(h.ext1),
            "chain_level": group_json(h.chain_level),
            "chain_level_model": h.chain_level_model,
        }
    return out, EXIT_OK


def _verify_payload(K1, K2, K3, mo: int, witnesses: bool) -> dict:
    from .pairing import verify_main_theorem

    r = verify_main_theorem(K1, K2, K3, max_order=mo)
    out = {
        "instance": r.instance,
        "hypotheses": dict(r.hypotheses),
        "geometric": [group_json(g) for g in r.geometric],
        "homological": [group_json(g) for g in r.homological],
        "chain_level": group_json(r.chain_level),
        "verdicts": {str(k): v for k, v in r.verdicts.items()},
        "observed_equal": {str(k): v for k, v in r.observed_equal.items()},
    }
    if witnesses:
        out["hypothesis_witnesses"] = {
            k: _hom_json(w) if isinstance(w, GroupHom) else w for k, w in r.hypothesis_witnesses.items()
        }
        out["witnesses"] = [_biext_witness(d) for d in r.witnesses]
    return out


def _strict_code(payloads: Sequence[dict], strict: bool) -> int:
    if strict and any("unequal" in p.get("verdicts", {}).values() for p in payloads):
        return EXIT_STRICT
    return EXIT_OK


def _cmd_verify(args, doc) -> tuple[dict, int]:
    K1, K2, K3 = (doc.complex(n) for n in (args.k1, args.k2, args.k3))
    out = _verify_payload(K1, K2, K3, _max_order(args.max_order), args.witnesses)
    return out, _strict_code([out], args.strict)


def _cmd_les(args, doc) -> tuple[dict, int]:
    from .pairing import les_check

    K1, K2, K3 = (doc.complex(n) for n in (args.k1, args.k2, args.k3))
    r = les_check(K1, K2, K3)
    return {
        "groups": [group_json(g) for g in r.groups],
        "maps": [_hom_json(m) for m in r.maps],
        "exact": r.exact,
        "nodes": [
            {"node": n.node, "composite_zero": n.composite_zero, "kernel_in_image": n.kernel_in_image}
            for n in r.nodes
        ],
    }, EXIT_OK


def _corpus_one(path: str, mo: int) -> dict:
    try:
        doc = parse(Path(path).read_text(encoding="utf-8"))
        K1, K2, K3 = (doc.complex(n) for n in ("K1", "K2", "K3"))
        return {"file": Path(path).name, **_verify_payload(K1, K2, K3, mo, False)}
    except BiextlabError as exc:
        return {"file": Path(path).name, "error": _error_json(exc)}


def _cmd_corpus(args, doc) -> tuple[dict, int]:
    files = sorted(str(p) for p in Path(args.directory).iterdir() if p.is_file() and p.suffix == ".txt")
    mo = _max_order(args.max_order)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_corpus_one, files, [mo] * len(files)))
    else:
        results = [_corpus_one(f, mo) for f in files]
    return {"results": results}, _strict_code(results, args.strict)


# --------------------------------------------------------------------------
# entry point


_EXIT_FOR = [
    ((ParseError, UnknownName), EXIT_PARSE),
    ((IllDefinedHom, InfiniteGroup), EXIT_INPUT),
    ((SizeGuardExceeded,), EXIT_GUARD),
    ((RouteMismatch, BicomplexInvalid), EXIT_INTERNAL),
]


def _error_json(exc: BaseException) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        out["line"], out["column"] = exc.line, exc.column
    if isinstance(exc, UnknownName):
        out["name"], out["line"] = exc.name, exc.line
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--max-order", type=int, default=None, help=f"size guard (default {DEFAULT_MAX_ORDER})")
    common.add_argument("--strict", action="store_true", help="exit 4 on an unequal verdict under valid hypotheses")
    common.add_argument("-f", "--file", default="-", help="input document (default: stdin)")
    common.add_argument("--witnesses", action="store_true", help="include witness tables")

    p = _Parser(prog="biextlab", description="Extension and biextension groups of two-term complexes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("snf", parents=[common], help="Smith normal form of a matrix")
    s.add_argument("matrix", nargs="?", default="-", help="file holding [[...],...] (default: stdin)")
    s.set_defaults(run=_cmd_snf, needs_doc=False)

    s = sub.add_parser("homology", parents=[common], help="homology of a declared complex")
    s.add_argument("complex")
    s.add_argument("--degree", type=int, default=None)
    s.set_defaults(run=_cmd_homology, needs_doc=True)

    s = sub.add_parser("resolve", parents=[common], help="canonical resolution of a complex")
    s.add_argument("complex")
    s.add_argument("--stats", action="store_true")
    s.set_defaults(run=_cmd_resolve, needs_doc=True)

    s = sub.add_parser("ext", parents=[common], help="Ext^0 and Ext^1 between complexes")
    s.add_argument("k1")
    s.add_argument("k3")
    s.add_argument("--side", choices=("geometric", "homological", "both"), default="both")
    s.set_defaults(run=_cmd_ext, needs_doc=True)

    s = sub.add_parser("biext", parents=[common], help="Biext^0 and Biext^1")
    for name in ("k1", "k2", "k3"):
        s.add_argument(name)
    s.add_argument("--side", choices=("geometric", "homological", "both"), default="both")
    s.set_defaults(run=_cmd_biext, needs_doc=True)

    s = sub.add_parser("verify", parents=[common], help="compare both routes with hypothesis checks")
    for name in ("k1", "k2", "k3"):
        s.add_argument(name)
    s.set_defaults(run=_cmd_verify, needs_doc=True)

    s = sub.add_parser("les", parents=[common], help="exactness of the six-term sequence")
    for name in ("k1", "k2", "k3"):
        s.add_argument(name)
    s.set_defaults(run=_cmd_les, needs_doc=True)

    s = sub.add_parser("corpus-verify", parents=[common], help="verify every *.txt document in a directory")
    s.add_argument("directory")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(run=_cmd_corpus, needs_doc=False)
    return p


def _echo(args) -> list[str]:
    skip = {"run", "needs_doc", "file"}
    out = [args.command]
    for k, v in sorted(vars(args).items()):
        if k in skip or k == "command":
            continue
        out.append(f"{k}={v}")
    return out


def _text_lines(value, indent: str = "") -> list[str]:
    if isinstance(value, dict) and set(value) == {"free_rank", "torsion"}:
        return [indent + str(FgAbGroup(value["free_rank"], tuple(value["torsion"])))]
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            sub = _text_lines(v, indent + "  ")
            if len(sub) == 1:
                lines.append(f"{indent}{k}: {sub[0].strip()}")
            else:
                lines.append(f"{indent}{k}:")
                lines += sub
        return lines
    if isinstance(value, list) and value and all(
        isinstance(v, dict) and set(v) == {"free_rank", "torsion"} for v in value
    ):
        return [indent + ", ".join(_text_lines(v)[0] for v in value)]
    if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        lines = []
        for v in value:
            lines += _text_lines(v, indent + "  ")
            lines.append(indent + "  -")
        return lines[:-1]
    return [indent + json.dumps(value, ensure_ascii=False)]


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    source = ""
    report: dict = {"schema": SCHEMA, "command": _echo(args)}
    try:
        path = args.file if args.needs_doc else getattr(args, "matrix", None)
        if path is not None:
            source = Path(path).read_text(encoding="utf-8") if path != "-" else sys.stdin.read()
        args.source = source
        doc = parse(source) if args.needs_doc else None
        payload, code = args.run(args, doc)
        report["result"] = payload
    except BiextlabError as exc:
        code = next((c for types, c in _EXIT_FOR if isinstance(exc, types)), EXIT_INTERNAL)
        report["error"] = _error_json(exc)
        print(f"biextlab: {exc}", file=sys.stderr)
    except (OSError, UnicodeDecodeError) as exc:
        code = EXIT_PARSE
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        print(f"biextlab: cannot read input: {exc}", file=sys.stderr)
    except (ValueError, ArithmeticError) as exc:
        code = EXIT_INTERNAL
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        print(f"biextlab: {exc}", file=sys.stderr)
    report.setdefault("fingerprint", hashlib.sha256(source.encode("utf-8")).hexdigest())
    report["exit_code"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    if args.json:
        print(json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2))
    elif "result" in report:
        print("\n".join(_text_lines(report["result"])))
    return code


def run(argv: Sequence[str] | None = None) -> None:
    raise SystemExit(main(argv))


if __name__ == "__main__":
    run()
