"""Verification suites: one function per acceptance criterion.

Every suite returns a :class:`SuiteResult` made of named checks that carry the
measured value, the tolerance and a pass flag.  The CLI ``verify`` command
and the acceptance tests both drive these functions.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cosets as C
from . import typeiii as T
from .finite_group import build_group
from .fock import factorization_check, matrix_element, moment_check
from .presets import preset, standard_z2
from .thoma import (
    alternating_sum,
    centrality_residual,
    check_alternating_identity,
    evaluate,
    gram_psd,
    pure_cycle_element,
    thoma_classical,
)
from .wreath import (
    Permutation,
    WreathElement,
    are_conjugate,
    conjugate,
    omega,
    omega2,
    parse_element,
    random_element,
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tolerance": float(self.tolerance),
                "pass": bool(self.passed), "detail": self.detail}


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, tolerance: float, passed: bool | None = None, detail: str = ""):
        value = float(value)
        ok = value <= tolerance if passed is None else bool(passed)
        self.checks.append(Check(name, value, float(tolerance), ok, detail))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


CHARACTER_PRESETS = ("z2-standard", "z2-b", "z3-a", "z3-b", "s3-a", "s3-b")


@_timed
def characters(seed: int = 0, samples: int = 100, max_support: int = 5) -> SuiteResult:
    """Thoma formula versus the tensor-product matrix element."""
    res = SuiteResult("characters")
    rng = np.random.default_rng(seed)
    for name in CHARACTER_PRESETS:
        P = preset(name)
        worst = 0.0
        for _ in range(samples):
            g = random_element(P.group, rng, int(rng.integers(1, max_support + 1)))
            worst = max(worst, abs(evaluate(P, g) - matrix_element(P, g)))
        res.add(f"{name}: max |evaluate - matrix_element|", worst, 1e-9)
    return res


def _z2_wr_s4():
    G = build_group("cyclic 2")
    els = [WreathElement.make(G, Permutation.from_dict({i + 1: q + 1 for i, q in enumerate(p)}),
                              dict(zip(range(1, 5), bits)))
           for p in itertools.permutations(range(4)) for bits in itertools.product((0, 1), repeat=4)]
    return G, els


def brute_force_classes(elements) -> dict:
    """Class label of each element by explicit conjugation orbits."""
    label = {}
    for g in elements:
        if g in label:
            continue
        cls = len(set(label.values()))
        for x in {conjugate(h, g) for h in elements}:
            label[x] = cls
    return label


@_timed
def conjugacy(seed: int = 0, pairs: int = 2000) -> SuiteResult:
    """Invariant equality versus brute-force conjugacy in Z2 wr S4."""
    res = SuiteResult("conjugacy")
    G, els = _z2_wr_s4()
    res.add("group order", len(set(els)), 384, passed=len(set(els)) == 384)
    label = brute_force_classes(els)
    # classes of Z2 wr S4 are pairs of partitions of total size 4: 5+3+4+3+5
    n_cls = len(set(label.values()))
    res.add("number of classes", n_cls, 20, passed=n_cls == 20)
    rng = np.random.default_rng(seed)
    mismatches = 0
    conj_pairs = 0
    for t in range(pairs):
        g = els[int(rng.integers(len(els)))]
        h = els[int(rng.integers(len(els)))]
        if t % 2:
            h = conjugate(els[int(rng.integers(len(els)))], g)
        same = label[g] == label[h]
        conj_pairs += same
        mismatches += same != are_conjugate(g, h)
    res.add("mismatches", mismatches, 0)
    res.add("conjugate pairs sampled", conj_pairs, pairs, passed=0 < conj_pairs < pairs)
    return res


@_timed
def single_cycles(seed: int = 0) -> SuiteResult:
    """Single-cycle values against sums over the repeated weight lists."""
    res = SuiteResult("single_cycles")
    for name in CHARACTER_PRESETS:
        P = preset(name)
        a = [w for w, r in P.alpha for _ in range(r.dim)]
        b = [w for w, r in P.beta for _ in range(r.dim)]
        worst = 0.0
        for l in range(2, 7):
            expected = sum(x ** l for x in a) + (-1) ** (l - 1) * sum(x ** l for x in b)
            worst = max(worst, abs(thoma_classical(P, [l]) - expected))
            worst = max(worst, abs(evaluate(P, pure_cycle_element(P.group, [l])) - expected))
        res.add(f"{name}: l = 2..6", worst, 1e-12)
    return res


@_timed
def gram(seed: int = 0, size: int = 20, pairs: int = 50) -> SuiteResult:
    """Positive definiteness and centrality on sampled elements."""
    res = SuiteResult("gram")
    rng = np.random.default_rng(seed)
    for name in CHARACTER_PRESETS:
        P = preset(name)
        els = [random_element(P.group, rng, int(rng.integers(1, 5))) for _ in range(size)]
        res.add(f"{name}: -min eigenvalue", -gram_psd(P, els), 1e-8)
        worst = 0.0
        for _ in range(pairs):
            g = random_element(P.group, rng, int(rng.integers(1, 5)))
            h = random_element(P.group, rng, int(rng.integers(1, 5)))
            worst = max(worst, centrality_residual(P, g, h))
        res.add(f"{name}: centrality residual", worst, 1e-12)
    return res


@_timed
def alternating(seed: int = 0, max_m: int = 7) -> SuiteResult:
    res = SuiteResult("alternating")
    for m in range(1, max_m + 1):
        for signed in (True, False):
            ok = check_alternating_identity(m, signed)
            res.add(f"{'signed' if signed else 'unsigned'} identity m={m}", 0 if ok else 1, 0, passed=ok)
    val = alternating_sum(Fraction(3, 2), 3)
    res.add("alternating_sum(3/2, 3) < 0", float(val), 0, passed=val < 0)
    worst = min(alternating_sum(k, m) for m in range(1, max_m + 1) for k in range(1, m + 1))
    res.add("min alternating_sum(k, m), 1 <= k <= m <= 7", float(worst), 0, passed=worst >= 0)
    return res


@_timed
def omega_identity(seed: int = 0) -> SuiteResult:
    """omega_M^(n) = omega_{m,M-m}^(n+m) omega_m^(n) omega_{M-m,M}^(n+m)."""
    res = SuiteResult("omega")
    bad, total = 0, 0
    for n in range(0, 5):
        for M in range(2, 7):
            for m in range(1, M):
                total += 1
                lhs = omega(n, M)
                rhs = omega2(n + m, m, M - m).compose(omega(n, m)).compose(omega2(n + m, M - m, M))
                bad += lhs != rhs
    res.add(f"failures among {total} cases", bad, 0)
    return res


@_timed
def moments(seed: int = 0, n_small: int = 16, n_large: int = 32) -> SuiteResult:
    res = SuiteResult("moments")
    P = standard_z2()
    for q in (1, 2):
        a = moment_check(P, 1, q, n_small)
        b = moment_check(P, 1, q, n_large)
        res.add(f"q={q} gap at n={n_small}", a.gap, 3 / n_small)
        res.add(f"q={q} gap shrinks n={n_small}->{n_large}", b.gap, a.gap, passed=b.gap < a.gap,
                detail=f"{a.gap:.6g} -> {b.gap:.6g}")
    return res


FACTORIZATION_CASES = (("(1 2)[1:g]", {1: 1}), ("(2 3)[1:g]", {1: 1, 2: 1}), ("(1 2 3)", {}))


@_timed
def factorization(seed: int = 0, ns=(8, 16, 32)) -> SuiteResult:
    res = SuiteResult("factorization")
    P = standard_z2()
    for text, r in FACTORIZATION_CASES:
        g = parse_element(text, P.group)
        vals = [factorization_check(P, g, r, n).residual for n in ns]
        dec = all(b < a for a, b in zip(vals, vals[1:]))
        res.add(f"{text} r={r}: residual trend", vals[-1], vals[0], passed=dec,
                detail=", ".join(f"n={n}: {v:.4g}" for n, v in zip(ns, vals)))
    return res


def fig7_reproduction(G, rng):
    """Markings for Figs. 1 and 2 drawn from ``rng``; returns (d5, d6, d7)."""
    g = C.fig1_pair(G, C.random_markings(G, rng), C.random_markings(G, rng))
    h = C.fig2_pair(G, C.random_markings(G, rng), C.random_markings(G, rng))
    d5, d6 = C.theta(g, 3), C.theta(h, 3)
    return d5, d6, C.mult_diagram(d5, d6)


@_timed
def coset_calculus(seed: int = 0, pairs: int = 100, translations: int = 100, elements: int = 5) -> SuiteResult:
    res = SuiteResult("cosets")
    rng = np.random.default_rng(seed)
    G = build_group("S3")
    bad = 0
    for t in range(pairs):
        n = t % 4
        g = (random_element(G, rng, 5), random_element(G, rng, 5))
        h = (random_element(G, rng, 5), random_element(G, rng, 5))
        dg, dh = C.theta(g, n), C.theta(h, n)
        bad += C.mult_diagram(dg, dh) != C.mult_repr(dg, dh)
    res.add("mult_diagram != mult_repr", bad, 0)
    bad = 0
    for t in range(elements):
        n = t % 4
        g = (random_element(G, rng, 5), random_element(G, rng, 5))
        base = C.theta(g, n)
        for _ in range(translations):
            a = C.random_window_element(G, rng, n, 4)
            b = C.random_window_element(G, rng, n, 4)
            bad += C.theta(C.pair_multiply(C.pair_multiply((a, a), g), (b, b)), n) != base
    res.add(f"theta changed under K_n translation ({elements * translations} trials)", bad, 0)
    bad = 0
    for n in (1, 2, 3):
        for i in range(1, n + 1):
            for x in range(G.order):
                s = C.theta(C.fig8_transposition(G, n, i), n)
                gm = C.theta(C.fig8_gamma(G, {i: x}), n)
                bad += C.mult_diagram(gm, s) != C.mult_diagram(s, gm)
                bad += C.mult_repr(gm, s) != C.mult_repr(s, gm)
    res.add("Fig. 8 commutation failures", bad, 0)
    # Fig. 7: pasting Fig. 5 over Fig. 6 should show two weight-1 circles
    G4 = build_group("S4")
    circles = []
    for _ in range(20):
        *_, d7 = fig7_reproduction(G4, rng)
        circles.append(d7.circles)
    counts = sorted({len(c) for c in circles})
    all_weight_one = all(w == 1 for c in circles for w, _ in c)
    res.add("Fig. 7 circle count", max(counts), 2,
            passed=counts == [2] and all_weight_one,
            detail=f"circle counts seen over 20 markings: {counts}")
    return res


@_timed
def typeiii(seed: int = 0, samples: int = 20) -> SuiteResult:
    res = SuiteResult("type3")
    rng = np.random.default_rng(seed)
    ps = [T.ProbMatrix.random(rng) for _ in range(samples)]
    res.add("(lr) identities, max residual", max(T.iso_and_lr(p).max_residual for p in ps), 1e-12)
    # det sqrt(p) = 0 exactly for product measures p_kl = a_k b_l
    singular = []
    for _ in range(5):
        a, b = rng.dirichlet([2, 2]), rng.dirichlet([2, 2])
        singular.append(T.ProbMatrix(np.outer(a, b)))
    wrong = 0
    for p in ps[:10] + singular:
        for n in (1, 2):
            wrong += not T.cyclic_separating_check(p, n).matches_det
    res.add("cyclic verdict disagrees with det", wrong, 0)
    worst = 0.0
    for p in ps[:3]:
        for n in (1, 2, 3):
            worst = max(worst, T.modular_operator(p, n).modular_residual)
    res.add("modular identity, max residual", worst, 1e-10)
    Z2 = build_group("cyclic 2")
    worst = 0.0
    for p in ps[:5]:
        for _ in range(10):
            g = random_element(Z2, rng, 3)
            s = random_element(Z2, rng, 3, p_entry=0.0).perm
            worst = max(worst, T.kms_trace_check(p, 3, s, g))
    res.add("phi(sg) = phi(gs), max residual", worst, 1e-12)
    w = T.centrality_counterexample(ps[0], 2)
    res.add("witness breaking full centrality", 0.0 if w is None else w.gap, 1e-6,
            passed=w is not None, detail="" if w is None else f"g={w.g}, h={w.h}")
    return res


SUITES = {
    "characters": characters,
    "conjugacy": conjugacy,
    "single_cycles": single_cycles,
    "gram": gram,
    "alternating": alternating,
    "omega": omega_identity,
    "moments": moments,
    "factorization": factorization,
    "cosets": coset_calculus,
    "type3": typeiii,
}

QUICK = {
    "characters": {"samples": 10},
    "conjugacy": {"pairs": 200},
    "gram": {"size": 8, "pairs": 10},
    "moments": {"n_small": 8, "n_large": 16},
    "factorization": {"ns": (4, 8)},
    "cosets": {"pairs": 10, "translations": 10, "elements": 2},
    "type3": {"samples": 5},
}


def run_suite(name: str, seed: int = 0, quick: bool = False) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    kwargs = QUICK.get(name, {}) if quick else {}
    return SUITES[name](seed=seed, **kwargs)

