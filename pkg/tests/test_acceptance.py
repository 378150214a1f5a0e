"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""

import pytest

from wreath_lab.suites import run_suite

from conftest import ACCEPTANCE_LINES

# (criterion, suite, runtime limit in seconds or None)
CRITERIA = [
    (1, "characters", 60.0, "two-oracle character equality"),
    (2, "conjugacy", 30.0, "conjugacy oracle in Z2 wr S4"),
    (3, "single_cycles", None, "single-cycle values"),
    (4, "gram", None, "Gram PSD and centrality"),
    (5, "alternating", None, "alternating sums, exact"),
    (6, "omega", None, "shift separator identity"),
    (7, "moments", 120.0, "Okounkov moments"),
    (8, "factorization", None, "factorization trend"),
    (9, "cosets", None, "coset calculus"),
    (10, "type3", 60.0, "type-III lab"),
]


@pytest.mark.parametrize("number,suite,limit,title", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, limit, title):
    res = run_suite(suite, seed=0)
    if limit is not None:
        res.add("runtime [s]", res.elapsed, limit)
    verdict = "PASS" if res.passed else "FAIL"
    line = f"criterion {number:2d} {verdict}  {title} ({res.elapsed:.1f} s)"
    for c in res.failures():
        line += f"\n      failed: {c.name}: value={c.value:.3g} tol={c.tolerance:.3g} {c.detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line
