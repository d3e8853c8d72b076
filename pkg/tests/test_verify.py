import json

import pytest

from lgd.matgroup import Mat2
from lgd.verify import (
    VerificationReport,
    gb_closed_form,
    smallest_nonsquare_unit,
    verify_closed_forms,
    verify_inert_lemma,
    verify_ramified_lemma,
    verify_reduce_to_C,
    verify_split_vanishing,
    worker_count,
)

SUM_TO_B = "g^b closed form with sum over i = 1..b matches"


def test_report_pass_flag():
    r = VerificationReport("x", {})
    assert r.passed
    r.check("fine", True)
    assert r.passed
    r.check("broken", False)
    assert not r.passed
    assert r.to_dict()["failures"] == ["claim failed: broken"]
    assert VerificationReport("x", {}).to_dict()["failures"] == []


def test_smallest_nonsquare():
    assert [smallest_nonsquare_unit(p) for p in (3, 5, 7, 11, 13)] == [2, 2, 3, 2, 2]


@pytest.mark.parametrize("p,n,budget", [(3, 1, None), (3, 2, 3), (5, 1, 3)])
def test_split_examples(p, n, budget):
    r = verify_split_vanishing(p, n, budget)
    assert r.failures == []
    assert r.subgroups_checked > 0


def test_inert_p3():
    r = verify_inert_lemma(3, 3)
    assert r.failures == []
    assert sum(1 for c, _ in r.witness_checks if "H1_* nonzero" in c) == 3
    assert all(ok for _, ok in r.witness_checks)


def test_inert_part_two_only():
    for p in (5, 7):
        r = verify_inert_lemma(p, 0)
        assert r.failures == []
        assert r.subgroups_checked == 3


def test_inert_p5_budget2():
    r = verify_inert_lemma(5, 2)
    assert r.failures == []


def test_ramified_examples():
    assert verify_ramified_lemma(3, 3).failures == []
    for p in (5, 7):
        assert verify_ramified_lemma(p, 0).failures == []


@pytest.mark.parametrize("n,delta,budget", [(1, 2, None), (2, 2, 3), (2, 3, 3), (2, 1, 3)])
def test_reduce_to_c_examples(n, delta, budget):
    r = verify_reduce_to_C(3, n, delta, budget)
    assert r.failures == []


def test_parts_are_disjoint():
    for r in (verify_inert_lemma(3, 3), verify_ramified_lemma(3, 3)):
        disjoint = [ok for c, ok in r.witness_checks if "disjoint from part 1" in c]
        assert disjoint and all(disjoint)


def test_conjugacy_note_present():
    r = verify_inert_lemma(3, 3)
    assert any("only up to conjugacy" in note for note in r.notes)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_inert_closed_forms(p):
    r = verify_closed_forms(p, None, "inert")
    assert r.failures == []
    assert len(r.witness_checks) == 6


@pytest.mark.parametrize("p", [3, 5, 7])
def test_ramified_closed_forms_only_sum_to_b_fails(p):
    r = verify_closed_forms(p, None, "ramified")
    failing = [c for c, ok in r.witness_checks if not ok]
    assert len(failing) == 1 and failing[0].startswith(SUM_TO_B)
    assert any("sum over i = 1..b-1" in c and ok for c, ok in r.witness_checks)


def test_gb_closed_form_second_power():
    m, delta = 25, 5
    g = Mat2.of(1, 1, delta, 1, m)
    assert g @ g == Mat2.of(1 + delta, 2, 2 * delta, 1 + delta, m)
    assert gb_closed_form(2, delta, m, 1) == g @ g
    assert gb_closed_form(2, delta, m, 2) == Mat2.of(1 + delta, 2 + delta, 2 * delta, 1 + delta, m)


def test_closed_form_bad_inputs():
    with pytest.raises(ValueError):
        verify_closed_forms(3, 1, "inert")
    with pytest.raises(ValueError):
        verify_closed_forms(3, 9, "ramified")
    with pytest.raises(ValueError):
        verify_closed_forms(3, 2, "split")


def test_reports_deterministic():
    a = json.dumps(verify_reduce_to_C(3, 2, 2, 3).to_dict(), sort_keys=True)
    b = json.dumps(verify_reduce_to_C(3, 2, 2, 3).to_dict(), sort_keys=True)
    assert a == b
    assert "elapsed" not in a


def test_parallel_matches_serial(monkeypatch):
    serial = verify_split_vanishing(3, 2, 2).to_dict()
    monkeypatch.setenv("LGD_THREADS", "2")
    assert worker_count() == 2
    assert verify_split_vanishing(3, 2, 2).to_dict() == serial
    monkeypatch.setenv("LGD_THREADS", "junk")
    assert worker_count() == 1
