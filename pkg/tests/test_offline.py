"""Offline optima: closed forms against the brute-force oracle."""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadex import (
    BadParams,
    OfflinePlan,
    TooLarge,
    build_cycle,
    build_n_tadpole,
    build_tadpole,
    eccentricity,
    opt_arms,
    opt_bruteforce,
    opt_cycle,
    opt_ntadpole_nplus2,
    opt_single_agent_ntadpole,
    opt_tadpole_k3plus,
    plan_arms,
    plan_cycle,
    plan_single_agent,
    two_agent_lower_bound,
    walk_length,
    with_start,
)

small_weights = st.fractions(min_value=F(1, 3), max_value=F(5), max_denominator=3)


def small_graphs():
    """Cycles and tadpoles within the brute-force comfort zone."""
    cycles = st.lists(small_weights, min_size=3, max_size=6).map(build_cycle)

    def tad(args):
        cw, tw, attach = args
        return build_tadpole(cw, tw, attach=attach % len(cw))

    tadpoles = st.tuples(
        st.lists(small_weights, min_size=3, max_size=5),
        st.lists(small_weights, min_size=1, max_size=2),
        st.integers(0, 4),
    ).map(tad)
    return st.one_of(cycles, tadpoles)


def test_walk_length():
    g = build_cycle([1, 2, 3])
    assert walk_length(g, ("c0", "c1", "c2", "c0")) == 6
    assert walk_length(g, ("c0",)) == 0
    with pytest.raises(BadParams):
        walk_length(g, ("c0", "c2", "c1", "c0", "oops"))


def test_plan_validation():
    g = build_cycle([1, 1, 1])
    with pytest.raises(BadParams):
        OfflinePlan.from_walks(g, [("c0", "c1")])  # not closed
    with pytest.raises(BadParams):
        OfflinePlan.from_walks(g, [("c0", "c1", "c0")])  # misses c2
    plan = OfflinePlan.from_walks(g, [("c0", "c1", "c0"), ("c0", "c2", "c0")])
    assert plan.makespan == 2


def test_closed_form_plans_achieve_their_values():
    g = build_cycle([1, 3, F(5, 2), 2])
    p = plan_cycle(g)
    p.validate(g)
    assert p.makespan == opt_cycle(g)

    t = build_tadpole([2, 1, 1], [1, 2], attach=1, start="c2")
    p = plan_arms(t)
    p.validate(t)
    assert p.makespan == opt_tadpole_k3plus(t) == opt_arms(t) == 2 * eccentricity(t)

    p = plan_single_agent(t)
    p.validate(t)
    assert p.makespan == opt_single_agent_ntadpole(t)
    assert len(p.walks) == 1


def test_single_agent_skips_heavy_edge_only_when_worth_it():
    # heavy edge outweighs the rest of the cycle: walk the path twice instead
    g = build_cycle([1, 1, 10])
    assert opt_single_agent_ntadpole(g) == 4
    # balanced cycle: one full lap wins
    g = build_cycle([1, 1, 1])
    assert opt_single_agent_ntadpole(g) == 3


def test_brute_force_small_pins():
    g = build_cycle([1, 1, 2])
    assert opt_bruteforce(g, 2).makespan == opt_cycle(g) == 4
    t = build_tadpole([1, 1, 1], [1], attach=0)
    assert opt_bruteforce(t, 3).makespan == opt_tadpole_k3plus(t) == 2
    assert opt_bruteforce(t, 1).makespan == opt_single_agent_ntadpole(t) == 5


def test_brute_force_caps():
    big = build_cycle([1] * 20)
    with pytest.raises(TooLarge):
        opt_bruteforce(big, 2)
    with pytest.raises(TooLarge):
        opt_bruteforce(build_cycle([1, 1, 1]), 5)


def test_brute_cap_env_override(monkeypatch):
    monkeypatch.setenv("TADEX_BRUTE_CAP", "4")
    with pytest.raises(TooLarge):
        opt_bruteforce(build_cycle([1, 1, 1, 1, 1]), 2)
    monkeypatch.setenv("TADEX_BRUTE_CAP", "5")
    assert opt_bruteforce(build_cycle([1, 1, 1, 1, 1]), 2).makespan == 4


@settings(max_examples=50, deadline=None)
@given(g=small_graphs())
def test_brute_monotone_in_k(g):
    plans = [opt_bruteforce(g, k).makespan for k in (1, 2, 3)]
    assert plans[0] >= plans[1] >= plans[2]
    for k in (1, 2, 3):
        opt_bruteforce(g, k).validate(g)


@settings(max_examples=50, deadline=None)
@given(ws=st.lists(small_weights, min_size=3, max_size=6))
def test_cycle_closed_form_matches_brute(ws):
    g = build_cycle(ws)
    assert opt_cycle(g) == opt_bruteforce(g, 2).makespan


@settings(max_examples=50, deadline=None)
@given(
    cw=st.lists(small_weights, min_size=3, max_size=4),
    tw=st.lists(small_weights, min_size=1, max_size=2),
    attach=st.integers(0, 3),
    data=st.data(),
)
def test_tadpole_closed_forms_match_brute(cw, tw, attach, data):
    g = build_tadpole(cw, tw, attach=attach % len(cw))
    g = with_start(g, data.draw(st.sampled_from(g.nodes)))
    assert opt_tadpole_k3plus(g) == opt_bruteforce(g, 3).makespan
    assert opt_single_agent_ntadpole(g) == opt_bruteforce(g, 1).makespan


@settings(max_examples=40, deadline=None)
@given(
    cw=st.lists(small_weights, min_size=3, max_size=4),
    t1=st.lists(small_weights, min_size=1, max_size=2),
    t2=st.lists(small_weights, min_size=1, max_size=2),
)
def test_ntadpole_closed_forms_match_brute(cw, t1, t2):
    g = build_n_tadpole(cw, [(0, t1), (1, t2)])
    assert opt_ntadpole_nplus2(g) == opt_bruteforce(g, 4).makespan
    assert opt_single_agent_ntadpole(g) == opt_bruteforce(g, 1).makespan


@settings(max_examples=60, deadline=None)
@given(g=small_graphs())
def test_two_agent_lower_bound_is_a_lower_bound(g):
    lb = two_agent_lower_bound(g)
    opt2 = opt_bruteforce(g, 2).makespan
    assert lb <= opt2
    # the single-agent relation used for the out-of-scope 12-bound
    assert opt_single_agent_ntadpole(g) <= 4 * lb
