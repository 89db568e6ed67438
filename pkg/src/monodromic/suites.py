"""Batch verification suites over generated or user-supplied objects, with JSON reports."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

from .blocks import compare_with_direct, m_independence, stabilization_check, variants_agree
from .dmod import CoreData, dual, dual_window_oracle, expand, sign_isomorphism, v_oracle_matches
from .errors import MonodromicError
from .filtration import check_relative_monodromy
from .fourier import double_fourier_check, fourier, fourier_agreement, fourier_core, hodge_shift_violations
from .generate import GeneratorConfig, generate_random
from .gluing import GluingDatum, functor_F, functor_G, roundtrip_check
from .io import to_document
from .mhm import (
    MonodromicMHM, decomposition_violations, phi_model, propagate_filtration, psi_model,
    specializability_violations, validate_mmhm,
)

SUITES = ("roundtrip", "vfilt", "weights", "blocks", "fourier", "dual")
# older name of the weights suite, still accepted
ALIASES = {"arashi": "weights"}
REPORT_SCHEMA = "monodromic-suite-report/1"


class ConfigError(ValueError):
    pass


def _core(x) -> CoreData:
    if isinstance(x, CoreData):
        return x
    if isinstance(x, GluingDatum):
        return functor_G(x).core
    return x.core


def _module(x) -> MonodromicMHM | None:
    if isinstance(x, GluingDatum):
        return functor_G(x)
    if isinstance(x, MonodromicMHM):
        return x
    return None


def check_roundtrip(x) -> list[str]:
    if isinstance(x, CoreData):
        return ["roundtrip needs a gluing datum or a module"]
    r = roundtrip_check(x)
    return [] if r else [r.failure]


def check_vfilt(x) -> list[str]:
    out = []
    if not v_oracle_matches(expand(_core(x), 2)):
        out.append("V-filtration oracle disagrees with the direct-sum formula (K=2)")
    m = _module(x)
    if m is not None:
        fw = propagate_filtration(m, 3)
        out += specializability_violations(fw)
        out += decomposition_violations(m, fw)
    return out


def check_weights(x) -> list[str]:
    m = _module(x)
    if m is None:
        return ["weight checks need a gluing datum or a module"]
    out = validate_mmhm(m)
    for a in m.core.alphas:
        mhs = phi_model(m) if a == -1 else psi_model(m, a)
        chk = check_relative_monodromy(m.core.N(a), mhs.W, mhs.W)
        if not chk.ok:
            out.append(f"alpha={a}: {chk.message}")
    return out


def check_blocks(x) -> list[str]:
    if isinstance(x, CoreData):
        return ["block checks need a gluing datum or a module"]
    g = x if isinstance(x, GluingDatum) else functor_F(x)
    g = GluingDatum(g.psi)
    out = []
    st = stabilization_check(g)
    if not st:
        out.append(f"stabilization: l0={st.l0}, stable from {st.stable_from}; " + "; ".join(st.failures[:3]))
    for label, c in (("variants", variants_agree(g)), ("direct", compare_with_direct(g)),
                     ("m-independence", m_independence(g))):
        if not c:
            out.append(f"{label}: {c.failure}")
    return out


def check_fourier(x) -> list[str]:
    core = _core(x)
    out = []
    if fourier_agreement(core) is None:
        out.append("gluing-level and window-level transforms are not isomorphic")
    m = _module(x)
    if m is None:
        return out
    fm = fourier(m)
    out += [f"transform: {v}" for v in validate_mmhm(fm)]
    out += hodge_shift_violations(m, fm)
    if fm.core != fourier_core(m.core):
        out.append("module transform and core transform differ")
    if not double_fourier_check(m).core_matches:
        out.append("double transform is not the sign-twisted identity on the core")
    return out


def check_dual(x) -> list[str]:
    core = _core(x)
    out = []
    if sign_isomorphism(dual_window_oracle(core, 2), dual(core)) is None:
        out.append("dual disagrees with the transposed window")
    if sign_isomorphism(dual(dual(core)), core) is None:
        out.append("double dual is not isomorphic to the input")
    return out


CHECKS = {
    "roundtrip": check_roundtrip, "vfilt": check_vfilt, "weights": check_weights,
    "blocks": check_blocks, "fourier": check_fourier, "dual": check_dual,
}


def run_case(args) -> dict:
    index, names, x = args
    checks = {}
    for name in names:
        try:
            problems = CHECKS[name](x)
        except MonodromicError as e:
            problems = [f"{type(e).__name__}: {e}"]
        checks[name] = {"ok": not problems, "problems": problems}
    ok = all(c["ok"] for c in checks.values())
    return {"index": index, "ok": ok, "checks": checks, "counterexample": None if ok else to_document(x)}


def suite_names(name: str) -> tuple[str, ...]:
    if name == "all":
        return SUITES
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return (name,)


def run_suite(name: str, cfg: GeneratorConfig | None = None, cases=None, jobs: int = 1) -> dict:
    """Run one suite (or all) on the given objects, or on cfg.case_count generated data.

    Results are ordered by case index whatever the number of worker processes.
    """
    names = suite_names(name)
    cfg = cfg or GeneratorConfig()
    if jobs < 1:
        raise ConfigError("jobs must be positive")
    start = time.perf_counter()
    objs = list(cases) if cases is not None else generate_random(cfg)
    work = [(i, names, x) for i, x in enumerate(objs)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_case, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [run_case(w) for w in work]
    failed = sum(not r["ok"] for r in results)
    return {
        "schema": REPORT_SCHEMA,
        "suite": name,
        "suites": list(names),
        "config": {**asdict(cfg), "eigen_denominators": list(cfg.eigen_denominators),
                   "source": "generated" if cases is None else "input"},
        "cases": len(results),
        "failed": failed,
        "ok": failed == 0,
        "results": results,
        "wall_time_ms": round(1000 * (time.perf_counter() - start)),
    }
