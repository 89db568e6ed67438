"""Command-line driver.  Every verb reads a document from a file or stdin and writes to stdout.

Exit codes: 0 success, 2 a check failed, 3 bad arguments or unreadable input.
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .blocks import VARIANTS, compare_with_direct, make_blocks, required_m, required_r
from .dmod import CoreData, cycles, dual, expand, validate
from .errors import MonodromicError, ParseError, SchemaError
from .fourier import fourier, fourier_core
from .generate import GeneratorConfig, generate_random
from .gluing import GluingDatum, functor_F, functor_G, roundtrip_check, validate_datum
from .mhm import MonodromicMHM, propagate_filtration, validate_mmhm
from .suites import SUITES, ConfigError, run_suite

OK, FAILED, USAGE = 0, 2, 3


class UsageError(Exception):
    pass


def _read(path: str | None):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return io.parse(text)


def _objects(path):
    x = _read(path)
    return x if isinstance(x, list) else [x]


def _single(path):
    x = _read(path)
    if isinstance(x, list):
        if len(x) != 1:
            raise UsageError("this command takes a single document")
        x = x[0]
    return x


def _core(x) -> CoreData:
    if isinstance(x, CoreData):
        return x
    if isinstance(x, GluingDatum):
        return functor_G(x).core
    return x.core


def _out(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _matrix_text(name, m):
    rows = ["[" + " ".join(str(x) for x in r) + "]" for r in m.to_rows()]
    return f"{name} ({m.rows}x{m.cols}): " + (" ".join(rows) if rows else "empty")


# verbs

def cmd_validate(args) -> int:
    reports = []
    for x in _objects(args.file):
        if isinstance(x, CoreData):
            kind, problems = "core", validate(x)
        elif isinstance(x, GluingDatum):
            kind, problems = "gluing", validate_datum(x)
        else:
            kind, problems = "mmhm", validate_mmhm(x)
        reports.append({"kind": kind, "valid": not problems, "violations": problems})
    if args.json:
        _out(io.dumps(reports if len(reports) != 1 else reports[0]))
    else:
        for i, r in enumerate(reports):
            head = f"[{i}] {r['kind']}: " if len(reports) > 1 else f"{r['kind']}: "
            _out(head + ("valid" if r["valid"] else "INVALID"))
            for v in r["violations"]:
                _out(f"  - {v}")
    return OK if all(r["valid"] for r in reports) else FAILED


def cmd_expand(args) -> int:
    x = _single(args.file)
    if args.window < 1:
        raise UsageError("--window must be at least 1 so the window contains [-2, 1]")
    m = functor_G(x) if isinstance(x, GluingDatum) else x
    win = expand(_core(m), args.window)
    F = propagate_filtration(m, args.window).F if isinstance(m, MonodromicMHM) else {}
    comps = []
    for b in win.betas:
        entry = {"beta": str(b), "dim": win.dim(b), "euler": io.matrix_to_json(win.euler[b])}
        if b in win.t_maps:
            entry["t"] = io.matrix_to_json(win.t_maps[b])
        if b in win.d_maps:
            entry["d"] = io.matrix_to_json(win.d_maps[b])
        if b in F:
            entry["F"] = io.filtration_to_json(F[b])
        comps.append(entry)
    if args.json:
        _out(io.dumps({"window": [str(w) for w in win.window], "components": comps}))
        return OK
    _out(f"window [{win.window[0]}, {win.window[1]}]")
    for c in comps:
        line = f"  beta={c['beta']:>6}  dim={c['dim']}"
        if "F" in c:
            line += "  F jumps: " + ", ".join(f"{j['index']}:{len(j['generators'])}" for j in c["F"]["jumps"])
        _out(line)
    return OK


def cmd_cycles(args) -> int:
    x = _single(args.file)
    if isinstance(x, CoreData):
        c = cycles(x)
        if args.json:
            _out(io.dumps({"psi": [{"alpha": str(a), "N": io.matrix_to_json(n)} for a, n in c.psi.items()],
                           "phi_N": io.matrix_to_json(c.phi), "can": io.matrix_to_json(c.can),
                           "var": io.matrix_to_json(c.var)}))
        else:
            for a, n in c.psi.items():
                _out(_matrix_text(f"N on psi, alpha={a}", n))
            for name, m in (("N on phi", c.phi), ("can", c.can), ("var", c.var)):
                _out(_matrix_text(name, m))
        return OK
    m = functor_G(x) if isinstance(x, GluingDatum) else x
    _out(io.emit(functor_F(m)))
    return OK


def cmd_dual(args) -> int:
    _out(io.emit(dual(_core(_single(args.file)))))
    return OK


def cmd_fourier(args) -> int:
    x = _single(args.file)
    if isinstance(x, CoreData):
        _out(io.emit(fourier_core(x)))
    else:
        _out(io.emit(fourier(functor_G(x) if isinstance(x, GluingDatum) else x)))
    return OK


def cmd_blocks(args) -> int:
    if args.r < 1 or args.m < 1:
        raise UsageError("--r and --m must be positive")
    if args.file is None:
        _out(io.emit(list(make_blocks(args.r, args.m))))
        return OK
    x = _single(args.file)
    if isinstance(x, CoreData):
        raise UsageError("the construction needs a gluing datum or a module")
    g = x if isinstance(x, GluingDatum) else functor_F(x)
    g = GluingDatum(g.psi)
    c = compare_with_direct(g, args.r, args.m, args.variant)
    report = {"r": args.r, "m": args.m, "variant": args.variant,
              "nilpotency_index": required_r(g), "required_m": required_m(g),
              "matches_direct": c.ok, "failure": c.failure}
    if args.json:
        _out(io.dumps(report))
    else:
        _out(f"variant {args.variant}, r={args.r}, m={args.m}: "
             + ("matches the direct construction" if c.ok else f"differs: {c.failure}"))
    return OK if c.ok else FAILED


def cmd_roundtrip(args) -> int:
    results = []
    for x in _objects(args.file):
        if isinstance(x, CoreData):
            raise UsageError("roundtrip needs a gluing datum or a module")
        r = roundtrip_check(x)
        results.append({"ok": r.ok, "failure": r.failure,
                        "counterexample": None if r.ok else io.to_document(x)})
    if args.json:
        _out(io.dumps(results if len(results) != 1 else results[0]))
    else:
        for i, r in enumerate(results):
            _out(f"[{i}] " + ("ok" if r["ok"] else f"FAILED: {r['failure']}"))
    return OK if all(r["ok"] for r in results) else FAILED


def _config(args) -> GeneratorConfig:
    try:
        return GeneratorConfig(seed=args.seed, max_dim=args.max_dim, case_count=args.cases,
                               eigen_denominators=tuple(args.denominators),
                               max_weight_span=args.weight_span)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_suite(args) -> int:
    cfg = _config(args)
    cases = _objects(args.input) if args.input else None
    try:
        report = run_suite(args.name, cfg, cases, jobs=args.jobs)
    except ConfigError as e:
        raise UsageError(str(e)) from None
    if args.json:
        _out(io.dumps(report))
    else:
        _out(f"suite {args.name}: {report['cases']} cases, {report['failed']} failed, "
             f"{report['wall_time_ms']} ms")
        for r in report["results"]:
            if not r["ok"]:
                bad = {k: v["problems"] for k, v in r["checks"].items() if not v["ok"]}
                _out(f"  case {r['index']}: {bad}")
    return OK if report["ok"] else FAILED


def cmd_gen(args) -> int:
    _out(io.emit(generate_random(_config(args))))
    return OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    gen = argparse.ArgumentParser(add_help=False)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--cases", type=int, default=1)
    gen.add_argument("--max-dim", type=int, default=5)
    gen.add_argument("--denominators", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    gen.add_argument("--weight-span", type=int, default=3)

    p = argparse.ArgumentParser(prog="monodromic", description="Monodromic modules over a point in exact arithmetic.")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help, parents=(common,), file=True):
        s = sub.add_parser(name, help=help, parents=list(parents))
        if file:
            s.add_argument("file", nargs="?", help="input document (default: stdin)")
        s.set_defaults(fn=fn)
        return s

    verb("validate", cmd_validate, "list violated axioms")
    verb("expand", cmd_expand, "expand to the window [-1-K, K]").add_argument("--window", type=int, default=2)
    verb("cycles", cmd_cycles, "nearby and vanishing cycles with can and var")
    verb("dual", cmd_dual, "dual of the underlying core")
    verb("fourier", cmd_fourier, "Fourier-Laplace transform")
    b = verb("blocks", cmd_blocks, "emit the building blocks, or run the kernel/cokernel construction on a file")
    b.add_argument("--r", type=int, default=1)
    b.add_argument("--m", type=int, default=1)
    b.add_argument("--variant", choices=VARIANTS, default="cc")
    verb("roundtrip", cmd_roundtrip, "check both functor compositions")
    s = verb("suite", cmd_suite, "run a verification suite", parents=(common, gen), file=False)
    s.add_argument("--name", default="all", help=f"one of {', '.join(SUITES)}, all")
    s.add_argument("--input", help="run on these documents instead of generated ones")
    s.add_argument("--jobs", type=int, default=1)
    verb("gen", cmd_gen, "generate random valid gluing data", parents=(common, gen), file=False)
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.fn(args)
    except (UsageError, ParseError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except MonodromicError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
