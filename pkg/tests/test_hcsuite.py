import json

import pytest

from hicomm import Congruence, con_lattice, hc_suite, zoo
from hicomm.hcsuite import GENERAL_LAWS, LAWS, _quotient_congruence
from hicomm.zoo import NON_MALCEV_ZOO


@pytest.mark.parametrize("name", ["cyclic(4)", "klein4", "sym3"])
def test_all_laws_pass(name):
    rep = hc_suite(zoo(name), n_max=3)
    assert rep.passed and not rep.sampled
    assert all(rep.laws[k].passed and rep.laws[k].checked > 0 for k in LAWS)


def test_values_on_dihedral4():
    A = zoo("dihedral4")
    rep = hc_suite(A, n_max=3)
    assert rep.passed
    L = con_lattice(A)
    top = len(L) - 1
    assert rep.value((top, top, top)) == 0
    assert rep.value((top, top)) != 0
    assert L[rep.value((top,))].is_one()


def test_cyclic4_values():
    A = zoo("cyclic(4)")
    rep = hc_suite(A, n_max=2)
    assert all(rep.value((i, j)) == 0 for i in range(3) for j in range(3))


@pytest.mark.parametrize("name", NON_MALCEV_ZOO)
def test_non_malcev_control(name):
    rep = hc_suite(zoo(name), n_max=3)
    assert rep.method == "termcond"
    for law in LAWS:
        if law in GENERAL_LAWS:
            assert rep.laws[law].passed
        else:
            assert rep.laws[law].skipped
    assert rep.passed


def test_sampling_and_selection():
    rep = hc_suite(zoo("klein4"), n_max=3, laws=("HC1", "HC2"), budget=10, seed=1)
    assert rep.sampled and set(rep.laws) == {"HC1", "HC2"}
    again = hc_suite(zoo("klein4"), n_max=3, laws=("HC1", "HC2"), budget=10, seed=1)
    assert rep.to_dict() == again.to_dict()


def test_report_serializes():
    d = hc_suite(zoo("cyclic(3)"), n_max=2).to_dict()
    json.dumps(d)
    assert [x["law"] for x in d["laws"]] == list(LAWS)
    assert d["passed"]


def test_quotient_congruence():
    eta = Congruence.from_partition([[0, 2], [1, 3]], 4)
    c = Congruence.one(4)
    q = _quotient_congruence(eta, c)
    assert q.size == 2 and q.is_one()
    assert _quotient_congruence(eta, eta).is_zero()
