from itertools import product

import numpy as np
import pytest

from hicomm import (AlgebraError, Congruence, ResourceLimitError, VerificationError, centralizes,
                    commutator, commutator_forks, commutator_termcond, con_lattice, delta,
                    delta_join_check, delta_membership, face_projection, forks, paired_faces,
                    sg_power, supernilpotence_degree, zoo)
from hicomm.delta import delta_generators, delta_membership_rows, max_dimension, termcond_violations
from hicomm.hypercube import flip

from oracles import (all_congruences, centralizes_by_terms, coset_blocks, commutator_subgroup,
                     kernel_subgroup, nilpotency_class, pairs_of, term_clone)

ONE2 = Congruence.one(2)


def congs_of(name, n):
    A = zoo(name)
    L = list(con_lattice(A))
    return A, list(product(L, repeat=n))


# --- Delta


def test_delta_z2_even_weight():
    R = delta(zoo("cyclic(2)"), [ONE2, ONE2])
    assert R.to_set() == {t for t in product(range(2), repeat=4) if sum(t) % 2 == 0}


def test_delta_dimension_one_is_the_congruence():
    A = zoo("cyclic(4)")
    for c in con_lattice(A):
        assert delta(A, [c]).to_set() == pairs_of(c.blocks)


def test_delta_dimension_zero():
    assert len(delta(zoo("cyclic(3)"), [])) == 3


def test_delta_generators_shape():
    gens = delta_generators(zoo("cyclic(2)"), [ONE2, Congruence.zero(2)])
    assert gens.shape == (6, 4)
    assert tuple(gens[1]) == (0, 1, 0, 1)


def test_delta_rejects_non_congruence():
    with pytest.raises(AlgebraError):
        delta(zoo("cyclic(4)"), [Congruence.from_partition([[0, 1], [2, 3]], 4)])
    with pytest.raises(AlgebraError):
        delta(zoo("cyclic(4)"), [ONE2])


def test_dimension_cap():
    assert max_dimension(3) == 4 and max_dimension(8) == 3 and max_dimension(13) == 2
    A = zoo("cyclic(4)")
    one = Congruence.one(4)
    with pytest.raises(ResourceLimitError):
        delta(A, [one] * 4)
    assert len(delta(A, [Congruence.zero(4)] * 4, max_dim=4)) == 4


@pytest.mark.parametrize("name", ["cyclic(2)", "cyclic(3)", "klein4", "semilattice3", "majority2"])
def test_delta_projections_and_flips(name):
    # (i) faces of Delta are the lower Delta; (iii) flips preserve it
    A, tuples = congs_of(name, 3)
    for congs in tuples[:: max(1, len(tuples) // 30)]:
        R = delta(A, congs)
        for i, d in product(range(3), (0, 1)):
            sub = list(congs[:i]) + list(congs[i + 1:])
            assert face_projection(R, i, d) == delta(A, sub)
        for i in range(3):
            assert flip(R, i) == R


@pytest.mark.parametrize("name", ["cyclic(3)", "klein4", "ring_z(4)", "semilattice3"])
def test_delta_doubled_faces(name):
    # (ii) a tuple whose two opposite i-faces are the same lower-Delta tuple is in Delta
    A, tuples = congs_of(name, 2)
    for c0, c1 in tuples:
        R = delta(A, [c0, c1]).to_set()
        for i, low in ((0, c1), (1, c0)):
            for a, b in pairs_of(low.blocks):
                t = (a, a, b, b) if i == 0 else (a, b, a, b)
                assert t in R


@pytest.mark.parametrize("name", ["cyclic(4)", "klein4", "sym3"])
def test_paired_faces_form_a_congruence_on_lower_delta(name):
    A, tuples = congs_of(name, 2)
    for c0, c1 in tuples:
        R = delta(A, [c0, c1])
        for i, low in ((0, c1), (1, c0)):
            pf = paired_faces(R, i)
            base = delta(A, [low]).to_set()
            faces = {x for x, _ in pf}
            assert faces == base
            assert all((x, x) in pf for x in base)
            assert all((y, x) in pf for x, y in pf)
            by_left = {}
            for x, y in pf:
                by_left.setdefault(x, set()).add(y)
            assert all(by_left[y] <= by_left[x] for x, y in pf)
            # compatible: the pairs form a subalgebra of the square of the lower Delta
            rows = [x + y for x, y in pf]
            assert sg_power(A, 4, rows).to_set() == set(rows)


@pytest.mark.parametrize("name", ["cyclic(2)", "cyclic(3)", "sym3", "klein4", "semilattice3",
                                  "majority2"])
def test_forks_of_delta_do_not_depend_on_coordinate(name):
    A, tuples = congs_of(name, 2)
    for congs in tuples:
        R = delta(A, congs)
        values = {frozenset(forks(R, i)) for i in range(4)}
        assert len(values) == 1


# --- commutators


def test_commutator_examples():
    A = zoo("cyclic(4)")
    one, zero = Congruence.one(4), Congruence.zero(4)
    assert commutator(A, [one, one]).is_zero()
    assert commutator(A, [one]) == one
    S = zoo("sym3")
    c = commutator(S, [Congruence.one(6)] * 2)
    assert len(set(c.blocks)) == 2
    with pytest.raises(AlgebraError):
        commutator(A, [one], method="bogus")
    assert commutator(A, [zero, one], method="both").is_zero()


@pytest.mark.parametrize("name", ["cyclic(4)", "cyclic(6)", "klein4", "sym3", "dihedral4",
                                  "quaternion8"])
def test_binary_commutators_are_group_commutators(name):
    A = zoo(name)
    L = list(con_lattice(A))
    for a, b in product(L, repeat=2):
        M, N = kernel_subgroup(a.blocks), kernel_subgroup(b.blocks)
        want = coset_blocks(A, commutator_subgroup(A, M, N))
        assert commutator_forks(A, [a, b]).blocks == want
        assert commutator_termcond(A, [a, b]).blocks == want


@pytest.mark.parametrize("name", ["cyclic(3)", "klein4", "sym3", "ring_z(4)"])
def test_methods_agree_including_other_fork_index(name):
    A, tuples = congs_of(name, 3)
    for congs in tuples:
        f = commutator_forks(A, congs)
        assert f == commutator_termcond(A, congs)
        R = delta(A, congs)
        mid = (1 << 2) - 1
        assert pairs_of(f.blocks) == forks(R, mid)


def test_termcond_for_non_malcev_is_least_without_violations():
    S = zoo("semilattice3")
    L = list(con_lattice(S))
    for congs in product(L, repeat=2):
        c = commutator_termcond(S, congs)
        R = delta(S, congs)
        assert len(termcond_violations(R, c)) == 0
        for g in L:
            if len(termcond_violations(R, g)) == 0:
                assert c <= g
    with pytest.raises(Exception):
        commutator_forks(S, [Congruence.one(3)] * 2)


def test_termcond_violations_examples():
    S = zoo("sym3")
    one, zero = Congruence.one(6), Congruence.zero(6)
    R = delta(S, [one, one])
    assert len(termcond_violations(R, zero)) > 0
    assert len(termcond_violations(R, commutator(S, [one, one]))) == 0
    assert len(termcond_violations(delta(zoo("cyclic(2)"), [ONE2, ONE2]), Congruence.zero(2))) == 0


def test_centralizes():
    A = zoo("cyclic(4)")
    one, zero = Congruence.one(4), Congruence.zero(4)
    assert centralizes(A, [one], one, zero)
    S = zoo("sym3")
    one6, zero6 = Congruence.one(6), Congruence.zero(6)
    assert not centralizes(S, [one6], one6, zero6)
    a3 = commutator(S, [one6, one6])
    assert centralizes(S, [one6], one6, a3)
    # n = 1: alpha centralizes modulo gamma iff alpha <= gamma
    assert centralizes(S, [], a3, one6) and not centralizes(S, [], one6, a3)


def test_centralizes_matches_least_gamma():
    A, tuples = congs_of("klein4", 2)
    L = list(con_lattice(A))
    for a, b in tuples:
        c = commutator(A, [a, b])
        for g in L:
            assert centralizes(A, [a], b, g) == (c <= g)


# --- membership through the cube term


@pytest.mark.parametrize("name", ["cyclic(2)", "cyclic(3)", "ring_z(3)", "ring_z(2)"])
def test_delta_membership_matches_closure(name):
    A, _ = congs_of(name, 1)
    L = list(con_lattice(A))
    for n in (1, 2):
        for congs in product(L, repeat=n):
            R = delta(A, congs).to_set()
            allt = np.array(list(product(range(A.size), repeat=1 << n)))
            got = delta_membership_rows(A, allt, congs)
            assert {tuple(int(v) for v in t) for t in allt[got]} == R


def test_delta_membership_single():
    A = zoo("cyclic(2)")
    assert delta_membership(A, (0, 1, 1, 0), [ONE2, ONE2])
    assert not delta_membership(A, (0, 1, 1, 1), [ONE2, ONE2])
    with pytest.raises(AlgebraError):
        delta_membership(A, (0, 1, 1), [ONE2, ONE2])
    with pytest.raises(AlgebraError):
        delta_membership(A, (0, 1, 1, 2), [ONE2, ONE2])


# --- supernilpotence


def test_supernilpotence_groups():
    for name, degree in [("cyclic(4)", 1), ("klein4", 1), ("dihedral4", 2), ("quaternion8", 2)]:
        res = supernilpotence_degree(zoo(name), 3)
        assert res.degree == degree
        assert res.degree == nilpotency_class(zoo(name))


def test_supernilpotence_sym3_lower_bound():
    S = zoo("sym3")
    res = supernilpotence_degree(S, 3)
    assert res.degree is None and nilpotency_class(S) is None
    assert [lv["method"] for lv in res.levels] == ["exact", "exact", "lower-bound"]
    a3 = coset_blocks(S, commutator_subgroup(S, range(6), range(6)))
    assert all(lv["value"] == str(Congruence(a3)) for lv in res.levels[1:])
    d = res.to_dict()
    assert d["degree"] is None and d["kmax"] == 3


def test_supernilpotence_inconclusive_raises():
    # with the cap lowered to 1, level 1 of an abelian group yields a zero bound
    with pytest.raises(ResourceLimitError):
        supernilpotence_degree(zoo("cyclic(3)"), 2, max_dim=1)


def test_supernilpotence_needs_malcev():
    with pytest.raises(Exception):
        supernilpotence_degree(zoo("semilattice3"), 2)
    with pytest.raises(AlgebraError):
        supernilpotence_degree(zoo("cyclic(3)"), 0)


# --- joins


@pytest.mark.parametrize("name", ["klein4", "cyclic(4)"])
def test_delta_join_check_dimension_two(name):
    A = zoo(name)
    L = list(con_lattice(A))
    for a, r1, r2 in product(L, repeat=3):
        assert delta_join_check(A, [a], [r1, r2])


def test_delta_join_check_needs_rhos():
    with pytest.raises(AlgebraError):
        delta_join_check(zoo("klein4"), [], [])


def test_verification_error_type():
    assert issubclass(VerificationError, Exception)


@pytest.mark.parametrize("name,k", [("cyclic(2)", 3), ("cyclic(3)", 3), ("cyclic(4)", 2),
                                    ("klein4", 2), ("semilattice3", 3), ("majority2", 3),
                                    ("set(2)", 3), ("set(3)", 2)])
def test_termcond_matches_definition_with_terms(name, k):
    # least gamma modulo which alpha centralizes beta for all terms of arity <= k,
    # computed with no reference to Delta; agreement means the Delta scan is both
    # sufficient and necessary on these algebras
    A = zoo(name)
    clone = term_clone(A, k)
    cs = sorted(all_congruences(A))
    for a, b in product(cs, repeat=2):
        ok = [g for g in cs if centralizes_by_terms(A, clone, k, a, b, g)]
        least = set.intersection(*[pairs_of(g) for g in ok])
        got = commutator_termcond(A, [Congruence(a), Congruence(b)])
        assert pairs_of(got.blocks) == least
        for g in cs:
            assert centralizes(A, [Congruence(a)], Congruence(b), Congruence(g)) == (
                centralizes_by_terms(A, clone, k, a, b, g))


def test_cached_delta_respects_limit():
    A = zoo("ring_z(6)")
    one = Congruence.one(6)
    assert len(delta(A, [one, one])) > 10
    with pytest.raises(ResourceLimitError):
        delta(A, [one, one], max_tuples=10)
