"""Named verification checks over catalog machines, shared by the CLI ``verify`` command."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from . import catalog
from .catalog import CatalogEntry
from .decision import (
    DEFAULT_CAP,
    BisimBudget,
    is_identity,
    order,
    verify_contraction,
    verify_section_onto,
    verify_torsion_base,
)
from .growth import REFERENCE_ALPHA, activity_direct, activity_recursive, ball_sizes, classify_activity
from .machine import root_perm, section
from .perm import Perm
from .schreier import build
from .words import parse_word, section_profile

G_STATES = {
    "a": ("(34)(67)(58)", ["a"] + ["id"] * 7),
    "b": ("(123)(456)", ["id"] * 6 + ["b", "b-1"]),
    "b-1": ("(132)(465)", ["id"] * 6 + ["b-1", "b"]),
}
LEVEL1_EDGES = {
    "a": {(1, 1), (2, 2), (3, 4), (4, 3), (6, 7), (7, 6), (5, 8), (8, 5)},
    "b": {(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4), (7, 7), (8, 8)},
}
KEY_WORD = "a b a b-1 a"
KEY_PERM = "(27)(35)(68)"
KEY_SECTIONS = ("id", "id", "b", "a", "b-1", "b", "id", "b-1")


@dataclass
class VerifyConfig:
    budget: BisimBudget = field(default_factory=BisimBudget)
    cap: int = DEFAULT_CAP
    contraction_max_a: int | None = None  # 16 for G, 12 otherwise
    torsion_max_a: int = 8
    growth_n: int = 10
    workers: int = 1
    artifacts: dict = field(default_factory=dict)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _word(entry: CatalogEntry, text: str):
    return parse_word(entry.machine, text)


def check_defining_data(entry, cfg):
    m = entry.machine
    for name, (perm, trans) in G_STATES.items():
        s = m.state(name)
        if s.perm != Perm.from_cycles(perm, 8) or [t or "id" for t in s.transitions] != trans:
            return False, f"state {name} differs from its defining recursion"
    derived = m.derive_inverse("b")
    shown = m.state("b-1")
    if derived != shown:
        return False, f"derived inverse of b is {derived.perm} {derived.transitions}, stored {shown.perm} {shown.transitions}"
    return True, "a, b, b-1 match; derived inverse of b equals the stored b-1"


def check_schreier_level1(entry, cfg):
    g = build(entry.machine, [_word(entry, "a"), _word(entry, "b")], 1)
    got = {lab: {(s[0], t[0]) for s, t in pairs} for lab, pairs in g.edge_multiset().items()}
    if got != LEVEL1_EDGES:
        return False, f"level-1 edges {got}"
    return True, "level-1 action graph matches the reference edge set"


def check_relations(entry, cfg):
    b = cfg.budget
    if entry.name in ("grigorchuk", "grigorchuk-exp"):
        a = "a'" if entry.name == "grigorchuk-exp" else "a"
        for rel in (f"{a}{a}", "bb", "cc", "dd", "bcd"):
            if not is_identity(_word(entry, rel), b):
                return False, f"{rel} is not trivial"
        return True, f"{a}^2 = b^2 = c^2 = d^2 = bcd = 1"
    if entry.name in ("G", "H"):
        bname = "b" if entry.name == "G" else "b'"
        for rel in ("a a", f"{bname} {bname} {bname}"):
            if not is_identity(_word(entry, rel), b):
                return False, f"{rel} is not trivial"
        oa, ob = order(_word(entry, "a"), cfg.cap, b), order(_word(entry, bname), cfg.cap, b)
        if (oa.n, ob.n) != (2, 3):
            return False, f"order(a) = {oa}, order({bname}) = {ob}"
        return True, f"a^2 = {bname}^3 = 1, order(a) = 2, order({bname}) = 3"
    for name, n in entry.machine.orders.items():
        res = order(entry.machine.gen(name), cfg.cap, b)
        if res.n != n:
            return False, f"declared order of {name} is {n}, computed {res}"
    return True, "declared state orders verified"


def check_key_identity(entry, cfg):
    m = entry.machine
    if entry.name == "H":
        w = _word(entry, "a b' a b'-1 a")
        s1 = section(w, 1)
        prof = section_profile(w)
        if str(s1) != "a a" or str(prof.sections[0]) != "id":
            return False, f"slot 1 is {s1} reducing to {prof.sections[0]}"
        return True, f"slot 1 is 'a a' and cancels; L = {prof.L}"
    w = _word(entry, KEY_WORD)
    perm = root_perm(w)
    secs = [str(s) for s in section_profile(w).sections]
    if perm != Perm.from_cycles(KEY_PERM, m.d):
        return False, f"root permutation {perm}"
    if tuple(secs) != KEY_SECTIONS:
        return False, f"sections {secs}"
    return True, f"root permutation {perm}, sections <{', '.join(secs)}>"


def check_sixteenth_power(entry, cfg):
    b = cfg.budget
    if not is_identity(_word(entry, "(ab)^16"), b):
        return False, "(ab)^16 is not trivial"
    if is_identity(_word(entry, "(ab)^8"), b):
        return False, "(ab)^8 is trivial"
    res = order(_word(entry, "ab"), cfg.cap, b)
    if res.n != 16:
        return False, f"order(ab) = {res}"
    return True, "(ab)^16 = 1, (ab)^8 != 1, order(ab) = 16"


def check_contraction(entry, cfg):
    max_a = cfg.contraction_max_a or (16 if entry.name == "G" else 12)
    rep = verify_contraction(entry.machine, max_a)
    cfg.artifacts["contraction"] = rep.to_json()
    summary = f"{rep.words_checked} words, max (L-1)/|w|_a = {rep.max_ratio}"
    if rep.violations:
        return False, f"{summary}; {len(rep.violations)} violations, first: {rep.violations[0]}"
    if rep.worst_case_is_maximizer is False:
        return False, f"{summary}; worst-case word has ratio {rep.worst_case_ratio}, not a maximizer"
    return True, summary


def check_torsion(entry, cfg):
    rep = verify_torsion_base(entry.machine, cfg.torsion_max_a, cfg.cap, cfg.budget, workers=cfg.workers)
    cfg.artifacts["torsion"] = rep.to_json()
    if rep.failures:
        w, why = next(iter(rep.failures.items()))
        return False, f"{len(rep.failures)} words without a verified order, first: {w}: {why}"
    return True, f"{len(rep.orders)} words torsion; orders {sorted(rep.histogram)}"


def check_section_onto(entry, cfg):
    rep = verify_section_onto(entry.machine, cfg.budget)
    if not rep.ok:
        bad = [k for k, v in rep.checks.items() if not v]
        extra = "; ".join(f"slot {i}: computed {g}, displayed {s}" for i, (g, s) in rep.display_mismatches.items())
        return False, f"failed: {', '.join(bad)}" + (f" ({extra})" if extra else "")
    return True, "generators a, b lie in the image of the section map at vertex 1"


def check_activity(entry, cfg):
    b = cfg.budget
    m = entry.machine
    if entry.name == "G":
        for lv in range(1, 21):
            if activity_recursive(_word(entry, "b"), lv, b) != 2**lv:
                return False, f"act_b({lv}) != 2^{lv}"
        for lv in range(1, 7):
            if activity_direct(_word(entry, "b"), lv, b) != 2**lv:
                return False, f"direct act_b({lv}) != 2^{lv}"
        prof = classify_activity(m, "b", budget=b)
        if prof.classification != "exponential" or abs(prof.rate - 2) > 1e-6:
            return False, f"b classified {prof.classification} rate {prof.rate}"
        h = classify_activity(catalog.load("H").machine, "b'", budget=b)
        if h.classification != "bounded":
            return False, f"H: b' classified {h.classification}"
        ge = classify_activity(catalog.load("grigorchuk-exp").machine, "a'", budget=b)
        if ge.classification != "exponential":
            return False, f"grigorchuk-exp: a' classified {ge.classification}"
        return True, "act_b(l) = 2^l for l <= 20; b exponential (rate 2); H b' bounded; a' exponential"
    out = []
    for name in m.names:
        prof = classify_activity(m, name, budget=b)
        out.append(f"{name}: {prof.classification}")
        if entry.name == "H" and name.startswith("b'") and prof.classification != "bounded":
            return False, f"{name} classified {prof.classification}"
        if entry.name == "grigorchuk" and prof.classification != "bounded":
            return False, f"{name} classified {prof.classification}"
        if entry.name == "grigorchuk-exp" and name == "a'":
            if prof.classification != "exponential" or prof.values[:10] != [2**k for k in range(1, 11)]:
                return False, f"a' classified {prof.classification}, act {prof.values}"
    return True, "; ".join(out)


def check_growth(entry, cfg):
    rep = ball_sizes(entry.machine, entry.generators, cfg.growth_n, budget=cfg.budget)
    cfg.artifacts["growth"] = rep.to_json()
    s = rep.sizes
    if entry.name == "G" and s[:3] != [1, 4, 8]:
        return False, f"b(0..2) = {s[:3]}"
    for n in range(len(s) - 1):
        if s[n + 1] < s[n]:
            return False, f"b not monotone at {n}"
    for n in range(len(s)):
        for k in range(len(s) - n):
            if s[n + k] > s[n] * s[k]:
                return False, f"b({n}+{k}) > b({n}) b({k})"
    fit = rep.fit
    return True, (
        f"b = {s}; fitted alpha {fit['alpha_lsq']:.4f} (reference {REFERENCE_ALPHA:.4f}); "
        "fit not a verification of the asymptotic bound"
    )


CHECKS: dict[str, Callable] = {
    "defining-data": check_defining_data,
    "schreier": check_schreier_level1,
    "relations": check_relations,
    "key-identity": check_key_identity,
    "sixteenth-power": check_sixteenth_power,
    "contraction": check_contraction,
    "torsion": check_torsion,
    "section-onto": check_section_onto,
    "activity": check_activity,
    "growth": check_growth,
}

GROUP_CHECKS = {
    "G": list(CHECKS),
    "H": ["relations", "key-identity", "contraction", "activity", "growth"],
    "grigorchuk": ["relations", "activity", "growth"],
    "grigorchuk-exp": ["relations", "activity", "growth"],
}
USER_CHECKS = ["relations", "activity"]


def available_checks(entry: CatalogEntry) -> list[str]:
    return GROUP_CHECKS.get(entry.name, USER_CHECKS)


def run_checks(entry: CatalogEntry, names: list[str] | None = None, cfg: VerifyConfig | None = None) -> list[CheckResult]:
    cfg = cfg or VerifyConfig()
    allowed = available_checks(entry)
    names = names or allowed
    unknown = [n for n in names if n not in allowed]
    if unknown:
        raise ValueError(f"checks {unknown} do not apply to {entry.name}; available: {', '.join(allowed)}")
    out = []
    for name in names:
        t = time.perf_counter()
        try:
            ok, detail = CHECKS[name](entry, cfg)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t))
    return out


def report_document(results: list[CheckResult], cfg: VerifyConfig) -> dict:
    """JSON report: check table plus the sweep outputs that were produced."""
    doc: dict = {"checks": [r.__dict__ for r in results]}
    con = cfg.artifacts.get("contraction")
    if con:
        doc.update(violations=con["violations"], max_ratio=con["max_ratio"], argmax=con["argmax"], contraction=con)
    tor = cfg.artifacts.get("torsion")
    if tor:
        doc.update(orders=tor["orders"], torsion={k: v for k, v in tor.items() if k != "orders"})
    if "growth" in cfg.artifacts:
        doc["growth"] = cfg.artifacts["growth"]
    return doc
