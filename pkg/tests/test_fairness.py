from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import bruteforce as bf
from socialfair import fairness as F
from socialfair.model import Allocation, Instance, InvalidInputError, ResourceLimitError
from socialfair.oracle import gen_lowerbound_efk

from strategies import instance_and_allocation


def A(*bundles):
    return Allocation(tuple(frozenset(b) for b in bundles))


def by_counts(counts):
    """Consecutive goods: counts (4,1,1) -> ({0,1,2,3},{4},{5})."""
    out, g = [], 0
    for c in counts:
        out.append(set(range(g, g + c)))
        g += c
    return A(*out)


LB31 = gen_lowerbound_efk(3, 1)


class TestEFk:
    def test_one_good_envy(self):
        i = Instance(v=[[1], [1]], s=[[0], [0]])
        c = F.is_efk(i, A({0}, set()), 0)
        assert not c
        assert (c.witness.agent, c.witness.other) == (1, 0)
        assert F.is_efk(i, A({0}, set()), 1)

    def test_lower_bound_instance(self):
        assert not F.is_efk(LB31, by_counts((4, 1, 1)), 1)
        assert F.is_efk(LB31, by_counts((2, 2, 2)), 1)

    def test_negative_k(self):
        with pytest.raises(InvalidInputError):
            F.is_efk(LB31, by_counts((2, 2, 2)), -1)

    def test_partial_allowed(self):
        assert F.is_ef1(LB31, A({0}, set(), set()))

    def test_witness_is_lexicographically_first(self):
        i = Instance(v=[[1, 1, 1]] * 3, s=[[0, 0, 0]] * 3)
        c = F.is_ef(i, A(set(), {0}, {1, 2}))
        assert (c.witness.agent, c.witness.other) == (0, 1)


class TestEFX:
    def test_symmetric(self):
        assert F.is_efx(LB31, by_counts((2, 2, 2)))

    def test_identical_321(self):
        i = Instance(v=[[3, 2, 1]] * 2, s=[[0] * 3] * 2)
        a = A({0}, {1, 2})
        assert F.is_efx(i, a)
        assert bf.efx([r for r in i.v], [set(b) for b in a])

    def test_empty_vs_two(self):
        i = Instance(v=[[1, 1], [1, 1]], s=[[0, 0], [0, 0]])
        assert not F.is_efx(i, A(set(), {0, 1}))

    def test_zero_valued_good_counts(self):
        # removing the zero good does not help: EFX fails though EF1 holds
        i = Instance(v=[[1, 0], [1, 0]], s=[[0, 0]] * 2)
        a = A(set(), {0, 1})
        assert F.is_ef1(i, a) and not F.is_efx(i, a)


class TestProp:
    def test_single_agent(self):
        i = Instance(v=[[3, 4]], s=[[0, 0]])
        assert F.is_prop(i, A({0, 1})) and F.is_prop1(i, A({0, 1}))

    def test_two_agents(self):
        i = Instance(v=[[1, 1], [1, 1]], s=[[0, 0]] * 2)
        assert F.is_prop(i, A({0}, {1}))
        c = F.is_prop(i, A(set(), {0, 1}))
        assert not c and c.witness.agent == 0
        assert F.is_prop1(i, A(set(), {0, 1}))

    def test_partial_rejected(self):
        i = Instance(v=[[1, 1], [1, 1]], s=[[0, 0]] * 2)
        with pytest.raises(InvalidInputError):
            F.is_prop(i, A({0}, set()))
        with pytest.raises(InvalidInputError):
            F.is_prop1(i, A({0}, set()))

    def test_prop1_fails(self):
        i = Instance(v=[[1, 1, 1, 1]] * 2, s=[[0] * 4] * 2)
        assert not F.is_prop1(i, A(set(), {0, 1, 2, 3}))


class TestSocial:
    EX1 = Instance(v=[[1], [1]], s=[[1], [Fraction(1, 10)]])

    def test_example_item_to_low_impact_agent(self):
        c = F.is_sef(self.EX1, A(set(), {0}))
        assert not c and (c.witness.agent, c.witness.other) == (0, 1)

    def test_example_item_to_high_impact_agent(self):
        assert F.is_sef(self.EX1, A({0}, set()))

    @given(instance_and_allocation(complete=False))
    def test_zero_impact_reduces_to_ef(self, pair):
        inst, a = pair
        z = Instance(v=inst.v, s=[[0] * inst.m for _ in inst.agents])
        assert F.is_sef(z, a).holds == F.is_efk(z, a, 0).holds
        assert F.is_sef1(z, a).holds == F.is_efk(z, a, 1).holds

    @given(instance_and_allocation(complete=False))
    def test_ef1_implies_sef1(self, pair):
        inst, a = pair
        if F.is_ef1(inst, a):
            assert F.is_sef1(inst, a)


class TestEpistemic:
    def test_lower_bound_unbalanced(self):
        assert not F.is_epistemic_ef1(LB31, by_counts((4, 1, 1)))
        assert F.is_epistemic_ef1(LB31, by_counts((2, 2, 2)))

    def test_certificates_fix_own_bundle_and_are_ef1_for_owner(self):
        i = Instance(v=[[5, 3, 1, 1], [1, 1, 3, 5], [2, 2, 2, 2]], s=[[0] * 4] * 3)
        a = A({0}, {3}, {1, 2})
        c = F.is_epistemic_ef1(i, a)
        assert c
        for agent, cert in enumerate(c.certificates):
            assert cert[agent] == a[agent] and cert.is_complete(i.m)
            b = [set(x) for x in cert]
            assert all(bf.efk_pair(i.v, b, agent, j, 1) for j in i.agents if j != agent)

    def test_cap(self):
        i = Instance(v=[[1] * 10] * 3, s=[[0] * 10] * 3)
        with pytest.raises(ResourceLimitError) as err:
            F.is_epistemic_ef1(i, A(set(range(10)), set(), set()), cap=100)
        assert "1024" in str(err.value)

    @settings(max_examples=150, deadline=None)
    @given(instance_and_allocation(n=st.just(2), m=st.integers(0, 6)))
    def test_two_agents_equivalent_to_ef1(self, pair):
        inst, a = pair
        assert F.is_epistemic_ef1(inst, a).holds == F.is_ef1(inst, a).holds

    @settings(max_examples=150, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 5)))
    def test_matches_brute_force(self, pair):
        inst, a = pair
        assert F.is_epistemic_ef1(inst, a).holds == bf.epistemic_ef1(inst.v, [set(b) for b in a], inst.m)


class TestEpistemicSufficient:
    def test_first_and_third(self):
        i = Instance(v=[[4, 3, 2, 1], [4, 3, 2, 1]], s=[[0] * 4] * 2)
        assert F.check_epistemic_sufficient(i, A({0, 2}, {1, 3}))

    def test_too_few_goods(self):
        i = Instance(v=[[4, 3, 2, 1], [4, 3, 2, 1]], s=[[0] * 4] * 2)
        assert not F.check_epistemic_sufficient(i, A({0}, {1, 2, 3}))

    def test_missing_top_block(self):
        i = Instance(v=[[4, 3, 2, 1], [4, 3, 2, 1]], s=[[0] * 4] * 2)
        assert not F.check_epistemic_sufficient(i, A({2, 3}, {0, 1}))

    @settings(max_examples=200, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 6)))
    def test_sound(self, pair):
        inst, a = pair
        if F.check_epistemic_sufficient(inst, a):
            assert F.is_epistemic_ef1(inst, a)


class TestDefinitionEquivalence:
    @settings(max_examples=300, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 6), complete=False))
    def test_partial_checkers(self, pair):
        inst, a = pair
        b = [set(x) for x in a]
        for k in range(4):
            assert F.is_efk(inst, a, k).holds == bf.efk(inst.v, b, k)
        assert F.is_efx(inst, a).holds == bf.efx(inst.v, b)
        assert F.is_sef(inst, a).holds == bf.sef(inst.v, inst.s, b)
        assert F.is_sef1(inst, a).holds == bf.sef1(inst.v, inst.s, b)

    @settings(max_examples=300, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 6)))
    def test_share_checkers(self, pair):
        inst, a = pair
        b = [set(x) for x in a]
        assert F.is_prop(inst, a).holds == bf.prop(inst.v, b, inst.m)
        assert F.is_prop1(inst, a).holds == bf.prop1(inst.v, b, inst.m)

    @settings(max_examples=200, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 6)), st.integers(1, 5), st.data())
    def test_scaling_a_value_row(self, pair, factor, data):
        inst, a = pair
        i = data.draw(st.integers(0, inst.n - 1))
        v = [list(r) for r in inst.v]
        v[i] = [x * factor for x in v[i]]
        scaled = Instance(v=v, s=inst.s)
        assert F.full_report(inst, a).flags() == F.full_report(scaled, a).flags()

    @settings(max_examples=200, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 6), complete=False))
    def test_witnesses_are_real(self, pair):
        inst, a = pair
        b = [set(x) for x in a]
        for k in (0, 1, 2):
            c = F.is_efk(inst, a, k)
            if not c:
                assert not bf.efk_pair(inst.v, b, c.witness.agent, c.witness.other, k)
        c = F.is_sef1(inst, a)
        if not c:
            i, j = c.witness.agent, c.witness.other
            own = bf.val(inst.v[i], b[i])
            assert b[j] and all(own < bf.val(inst.v[i], b[j] - {g}) for g in b[j])
            assert bf.val(inst.s[i], b[j]) >= bf.val(inst.s[j], b[j])


class TestImplications:
    @settings(max_examples=300, deadline=None)
    @given(instance_and_allocation(m=st.integers(0, 6)))
    def test_chain(self, pair):
        inst, a = pair
        r = F.full_report(inst, a).flags()
        ef = r["ef"]
        assert not ef or (r["ef1"] and r["ef2"] and r["prop"])
        assert not r["ef1"] or (r["ef2"] and r["prop1"] and r["sef1"])
        assert not r["efx"] or r["ef1"]
        assert not r["epistemic-ef1"] or r["prop1"]
        assert not r["ef1"] or r["epistemic-ef1"]
        assert not r["epistemic-sufficient"] or r["epistemic-ef1"]
        assert not r["sef"] or r["sef1"]


class TestReport:
    def test_ef_allocation_everything_holds(self):
        i = Instance(v=[[1, 0], [0, 1]], s=[[0, 0]] * 2)
        r = F.full_report(i, A({0}, {1}))
        assert all(r[k].holds for k in ("ef", "ef1", "efx", "prop", "prop1"))

    def test_empty_instance(self):
        r = F.full_report(Instance.empty(3), A(set(), set(), set()))
        assert all(x.holds for x in r.results.values())

    def test_ef1_but_not_ef(self):
        i = Instance(v=[[1, 1, 1]] * 2, s=[[0] * 3] * 2)
        r = F.full_report(i, A({0}, {1, 2}))
        assert r["ef1"].holds and not r["ef"].holds
        d = r.to_dict()
        assert d["ef"]["holds"] is False and "witness" in d["ef"]
        assert "witness" not in d["ef1"]

    def test_skipped_on_cap(self):
        i = Instance(v=[[3] + [1] * 11] * 3, s=[[0] * 12] * 3)
        a = A({0}, set(range(1, 12)), set())
        r = F.full_report(i, a, epistemic_cap=10)
        assert r["epistemic-ef1"].holds is None and r["epistemic-ef1"].skipped
        assert r.to_dict()["epistemic-ef1"]["skipped"]
