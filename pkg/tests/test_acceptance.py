"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line (collected in the terminal summary).
Hours-scale reproduction runs carry the ``long`` marker; select them with
``pytest -m long tests/test_acceptance.py``.
"""

import pytest

from mclsearch import checks

RESULTS = []


def _run(check):
    r = check()
    RESULTS.append(r.line())
    print(r.line())
    assert r.ok, r.line()


FAST = [
    checks.check_group_orders,
    checks.check_graph,
    checks.check_lines,
    checks.check_first_line,
    checks.check_frame,
    checks.check_feasible_counts,
    checks.check_heuristic,
    checks.check_fingerprint_equivalence,
    checks.check_invariant_identities,
    checks.check_class_fixture,
    checks.check_rejection,
    checks.check_case_pipeline(36),
    checks.check_case_pipeline(29),
    checks.check_case_order,
]

LONG = [
    checks.check_census,
    checks.check_table2_rows,
    checks.check_engine_agreement,
    checks.check_worker_independence,
    checks.check_max_level(29, 2),
    checks.check_max_level(35, 3),
]


@pytest.mark.parametrize("check", FAST, ids=lambda c: c.__name__)
def test_fast(check):
    _run(check)


@pytest.mark.long
@pytest.mark.parametrize("check", LONG, ids=lambda c: c.__name__)
def test_long(check):
    _run(check)
