"""Canonical JSON documents: sorted keys, two-space indent, rationals as "p/q" strings, no floats."""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .dmod import CoreData
from .errors import ParseError, SchemaError
from .filtration import IncreasingFiltration
from .gluing import GluingDatum, PsiPiece
from .linalg import Matrix, Subspace
from .mhm import MHSModel, MonodromicMHM

VERSION = "1.0.0"
KINDS = ("core", "gluing", "mmhm")
_RATIONAL = re.compile(r"-?\d+(/\d+)?")


# emit

def _q(x: Fraction) -> str:
    return str(Fraction(x))


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": m.rows, "cols": m.cols, "entries": [[_q(x) for x in row] for row in m.to_rows()]}


def filtration_to_json(f: IncreasingFiltration) -> dict:
    return {"ambient_dim": f.ambient_dim,
            "jumps": [{"index": i, "generators": [[_q(x) for x in v] for v in s.vectors()]} for i, s in f.jumps]}


def mhs_to_json(h: MHSModel) -> dict:
    return {"F": filtration_to_json(h.F), "W": filtration_to_json(h.W), "twist": h.twist}


def core_to_json(core: CoreData) -> dict:
    return {"components": [{"alpha": _q(a), "N": matrix_to_json(n)} for a, n in core.components.items()],
            "u": matrix_to_json(core.u), "w": matrix_to_json(core.w)}


def gluing_to_json(g: GluingDatum) -> dict:
    return {"psi": [{"alpha": _q(a), "mhs": mhs_to_json(p.mhs), "N": matrix_to_json(p.N)} for a, p in g.psi.items()],
            "phi": None if g.psi_only else mhs_to_json(g.phi), "c": matrix_to_json(g.c), "v": matrix_to_json(g.v)}


def mmhm_to_json(m: MonodromicMHM) -> dict:
    return {"core": core_to_json(m.core),
            "filtrations": [{"alpha": _q(a), "F": filtration_to_json(m.pair(a).F), "W": filtration_to_json(m.pair(a).W)}
                            for a in m.core.alphas],
            "polarizable": m.polarizable}


def to_document(obj) -> dict:
    if isinstance(obj, CoreData):
        kind, payload = "core", core_to_json(obj)
    elif isinstance(obj, GluingDatum):
        kind, payload = "gluing", gluing_to_json(obj)
    elif isinstance(obj, MonodromicMHM):
        kind, payload = "mmhm", mmhm_to_json(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return {"kind": kind, "version": VERSION, "payload": payload}


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit(obj) -> str:
    """Canonical text of one object, or of a list of objects."""
    if isinstance(obj, (list, tuple)):
        return dumps([to_document(o) for o in obj])
    return dumps(to_document(obj))


# parse

class _FloatLiteral(ValueError):
    def __init__(self, literal):
        super().__init__(f"number {literal} is not allowed; write rationals as strings")
        self.literal = literal


def _reject_float(text):
    raise _FloatLiteral(text)


def _position(text: str, needle: str) -> tuple[int, int]:
    i = max(text.find(needle), 0)
    line = text.count("\n", 0, i) + 1
    return line, i - (text.rfind("\n", 0, i) + 1) + 1


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    except _FloatLiteral as e:
        raise ParseError(str(e), *_position(text, e.literal)) from None


def _get(d: Any, key: str, path: str):
    if not isinstance(d, dict):
        raise SchemaError(path, "expected an object")
    if key not in d:
        raise SchemaError(f"{path}.{key}", "missing field")
    return d[key]


def _int(x: Any, path: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise SchemaError(path, "expected an integer")
    return x


def _list(x: Any, path: str) -> list:
    if not isinstance(x, list):
        raise SchemaError(path, "expected an array")
    return x


def rational_from_json(x: Any, path: str) -> Fraction:
    if not isinstance(x, str) or not _RATIONAL.fullmatch(x):
        raise SchemaError(path, "expected a rational string such as \"-1/2\"")
    q = Fraction(x)
    if "/" in x and int(x.split("/")[1]) == 0:
        raise SchemaError(path, "zero denominator")
    return q


def matrix_from_json(d: Any, path: str) -> Matrix:
    rows = _int(_get(d, "rows", path), f"{path}.rows")
    cols = _int(_get(d, "cols", path), f"{path}.cols")
    entries = _list(_get(d, "entries", path), f"{path}.entries")
    if rows < 0 or cols < 0 or len(entries) != rows:
        raise SchemaError(f"{path}.entries", f"expected {rows} rows")
    out = []
    for i, row in enumerate(_list(e, f"{path}.entries[{i}]") for i, e in enumerate(entries)):
        if len(row) != cols:
            raise SchemaError(f"{path}.entries[{i}]", f"expected {cols} entries")
        out.append([rational_from_json(x, f"{path}.entries[{i}][{j}]") for j, x in enumerate(row)])
    return Matrix.from_rows(out, cols)


def filtration_from_json(d: Any, path: str) -> IncreasingFiltration:
    n = _int(_get(d, "ambient_dim", path), f"{path}.ambient_dim")
    steps = {}
    for k, jump in enumerate(_list(_get(d, "jumps", path), f"{path}.jumps")):
        p = f"{path}.jumps[{k}]"
        index = _int(_get(jump, "index", p), f"{p}.index")
        gens = []
        for j, g in enumerate(_list(_get(jump, "generators", p), f"{p}.generators")):
            g = _list(g, f"{p}.generators[{j}]")
            if len(g) != n:
                raise SchemaError(f"{p}.generators[{j}]", f"expected {n} coordinates")
            gens.append([rational_from_json(x, f"{p}.generators[{j}][{i}]") for i, x in enumerate(g)])
        if index in steps:
            raise SchemaError(f"{p}.index", "duplicate index")
        steps[index] = Subspace.span(gens, n)
    try:
        return IncreasingFiltration.from_steps(n, steps)
    except ValueError as e:
        raise SchemaError(f"{path}.jumps", str(e)) from None


def mhs_from_json(d: Any, path: str) -> MHSModel:
    F = filtration_from_json(_get(d, "F", path), f"{path}.F")
    W = filtration_from_json(_get(d, "W", path), f"{path}.W")
    twist = _int(d.get("twist", 0), f"{path}.twist")
    if F.ambient_dim != W.ambient_dim:
        raise SchemaError(path, "F and W have different ambient dimensions")
    return MHSModel.make(F, W, twist)


def _alpha(x: Any, path: str, lo_open: bool) -> Fraction:
    a = rational_from_json(x, path)
    if a > 0 or a < -1 or (lo_open and a == -1):
        raise SchemaError(path, "alpha out of range")
    return a


def core_from_json(d: Any, path: str = "payload") -> CoreData:
    comps = {}
    for k, c in enumerate(_list(_get(d, "components", path), f"{path}.components")):
        p = f"{path}.components[{k}]"
        a = _alpha(_get(c, "alpha", p), f"{p}.alpha", lo_open=False)
        if a in comps:
            raise SchemaError(f"{p}.alpha", "duplicate alpha")
        comps[a] = matrix_from_json(_get(c, "N", p), f"{p}.N")
        if not comps[a].is_square:
            raise SchemaError(f"{p}.N", "N must be square")
    u = matrix_from_json(_get(d, "u", path), f"{path}.u")
    w = matrix_from_json(_get(d, "w", path), f"{path}.w")
    n0, n1 = (comps[x].rows if x in comps else 0 for x in (Fraction(0), Fraction(-1)))
    if u.shape != (n1, n0):
        raise SchemaError(f"{path}.u", f"expected shape {(n1, n0)}")
    if w.shape != (n0, n1):
        raise SchemaError(f"{path}.w", f"expected shape {(n0, n1)}")
    return CoreData(comps, u, w)


def gluing_from_json(d: Any, path: str = "payload") -> GluingDatum:
    psi = {}
    for k, c in enumerate(_list(_get(d, "psi", path), f"{path}.psi")):
        p = f"{path}.psi[{k}]"
        a = _alpha(_get(c, "alpha", p), f"{p}.alpha", lo_open=True)
        if a in psi:
            raise SchemaError(f"{p}.alpha", "duplicate alpha")
        mhs = mhs_from_json(_get(c, "mhs", p), f"{p}.mhs")
        N = matrix_from_json(_get(c, "N", p), f"{p}.N")
        if N.shape != (mhs.dim, mhs.dim):
            raise SchemaError(f"{p}.N", f"expected shape {(mhs.dim, mhs.dim)}")
        psi[a] = PsiPiece(mhs, N)
    raw_phi = _get(d, "phi", path)
    c = matrix_from_json(_get(d, "c", path), f"{path}.c")
    v = matrix_from_json(_get(d, "v", path), f"{path}.v")
    if raw_phi is None:
        if c.rows or v.cols:
            raise SchemaError(f"{path}.phi", "c and v must be empty when phi is null")
        return GluingDatum(psi)
    phi = mhs_from_json(raw_phi, f"{path}.phi")
    n0 = psi[Fraction(0)].dim if Fraction(0) in psi else 0
    nphi = phi.dim
    if c.shape != (nphi, n0):
        raise SchemaError(f"{path}.c", f"expected shape {(nphi, n0)}")
    if v.shape != (n0, nphi):
        raise SchemaError(f"{path}.v", f"expected shape {(n0, nphi)}")
    return GluingDatum(psi, phi, c, v)


def mmhm_from_json(d: Any, path: str = "payload") -> MonodromicMHM:
    core = core_from_json(_get(d, "core", path), f"{path}.core")
    F, W = {}, {}
    for k, f in enumerate(_list(_get(d, "filtrations", path), f"{path}.filtrations")):
        p = f"{path}.filtrations[{k}]"
        a = _alpha(_get(f, "alpha", p), f"{p}.alpha", lo_open=False)
        F[a] = filtration_from_json(_get(f, "F", p), f"{p}.F")
        W[a] = filtration_from_json(_get(f, "W", p), f"{p}.W")
        if F[a].ambient_dim != core.dim(a) or W[a].ambient_dim != core.dim(a):
            raise SchemaError(p, f"filtration dimension does not match M^{a}")
    pol = d.get("polarizable", True)
    if not isinstance(pol, bool):
        raise SchemaError(f"{path}.polarizable", "expected a boolean")
    return MonodromicMHM(core, F, W, pol)


_READERS = {"core": core_from_json, "gluing": gluing_from_json, "mmhm": mmhm_from_json}


def from_document(doc: Any, path: str = "") -> CoreData | GluingDatum | MonodromicMHM:
    kind = _get(doc, "kind", path or "document")
    if kind not in KINDS:
        raise SchemaError(f"{path}kind", f"unknown kind {kind!r}")
    version = _get(doc, "version", path or "document")
    if not isinstance(version, str) or version.split(".")[0] != VERSION.split(".")[0]:
        raise SchemaError(f"{path}version", f"unsupported version {version!r}")
    return _READERS[kind](_get(doc, "payload", path or "document"), f"{path}payload")


def parse(text: str):
    """One object from a single document, or a list from an array of documents."""
    data = loads(text)
    if isinstance(data, list):
        return [from_document(d, f"[{i}].") for i, d in enumerate(data)]
    return from_document(data)
