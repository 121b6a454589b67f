"""Adversarial constructions: fixed gadgets and the two adaptive oracles."""

from fractions import Fraction as F

import pytest

from tadex import (
    STRATEGIES,
    BadParams,
    build_cycle,
    cost_energy,
    cost_time,
    make_2_5_example,
    make_ale_lb_tadpole,
    make_energy_lb_adaptive,
    make_energy_lb_cycle,
    make_ntad_lb,
    make_time_lb_adaptive,
    opt_bruteforce,
    opt_cycle,
    opt_tadpole_k3plus,
    replay_policy,
    run,
    serialize_graph,
)


def total_weight(g):
    return sum(e.weight for e in g.edges)


def test_energy_cycle_gadget():
    e = F(1, 4)
    g = make_energy_lb_cycle(e)
    ref = build_cycle([1 + e, 1, 1 - e])
    assert serialize_graph(g) == serialize_graph(ref)
    assert opt_cycle(g) == 2 * (1 + e) / 2 + 1  # 2 * d_long
    with pytest.raises(BadParams):
        make_energy_lb_cycle(F(1, 2))
    with pytest.raises(BadParams):
        make_energy_lb_cycle(0)


def test_unit_loop_example_params():
    g = make_2_5_example(F(1, 5))
    assert len(g.tails) == 1 and g.tails[0].attach == g.start
    assert total_weight(g) == 3  # loop of 2 plus tail of 1
    with pytest.raises(BadParams):
        make_2_5_example(F(2, 7))  # 1/e not an integer
    with pytest.raises(BadParams):
        make_2_5_example(F(3, 2))


def test_ale_tadpole_gadget_optimum_is_two():
    for gran in (None, 3, 5):
        g = make_ale_lb_tadpole(F(1, 100), granularity=gran)
        assert opt_tadpole_k3plus(g) == 2
    small = make_ale_lb_tadpole(F(1, 100), granularity=3)
    assert len(small.nodes) == 10
    assert opt_bruteforce(small, 3).makespan == 2


def test_time_oracle_rejects_bad_params():
    with pytest.raises(BadParams):
        make_time_lb_adaptive(3)
    with pytest.raises(BadParams):
        make_ntad_lb(1, 8)
    with pytest.raises(BadParams):
        make_ntad_lb(2, 3)


def test_time_oracle_full_path_case():
    # a strategy that explores the cheap path to its end gets the
    # expensive ring, whose optimum stays at 2
    orc = make_time_lb_adaptive(8)
    tr = run(STRATEGIES["amp-tad3"](), orc, 3, seed=0)
    assert orc.committed_case == 1
    assert orc.committed_opt() == 2
    assert cost_time(tr) == F(11, 4)
    g = orc.finalize()
    assert opt_bruteforce(g, 3).makespan == orc.committed_opt()
    assert orc.weight_bound() >= total_weight(g)


def test_time_oracle_early_commit_case():
    # jumping onto the heavy edge immediately gets the shortcut ring
    orc = make_time_lb_adaptive(8)
    run(replay_policy([["s", "c3", "p1", "s", "t1", "s"]]), orc, 1, seed=0)
    assert orc.committed_case == 2
    assert orc.cut_index == 1
    assert orc.committed_opt() == F(1, 2)
    assert opt_bruteforce(orc.finalize(), 3).makespan == F(1, 2)


def test_time_oracle_ratio_meets_target():
    J = 20
    target = F(3, 2) - F(3, 2 * J)
    for name in ("amp-tad2", "amp-tad3", "amp-tad4"):
        orc = make_time_lb_adaptive(J)
        k = STRATEGIES[name]().min_agents
        tr = run(STRATEGIES[name](), orc, k, seed=0)
        assert cost_time(tr) / orc.committed_opt() >= target


def test_ntad_oracle_splits_the_tail():
    orc = make_ntad_lb(2, 8)
    assert orc.graph_class == "ntadpole"
    assert orc.tail_names == ("t1_1", "t2_1")
    tr = run(STRATEGIES["ntad-n2"](), orc, 4, seed=0)
    assert cost_time(tr) / orc.committed_opt() >= F(3, 2) - F(3, 16)
    g = orc.finalize()
    assert len(g.tails) == 2
    assert sum(t.weights[0] for t in g.tails) == orc.epsilon


def test_energy_oracle_vs_two_agents():
    orc = make_energy_lb_adaptive(F(1, 10))
    tr = run(STRATEGIES["amp-tad2"](), orc, 2, seed=0)
    assert cost_energy(tr) == 6
    g = orc.finalize()
    assert opt_bruteforce(g, 2).makespan == 4
    assert orc.weight_bound() >= total_weight(g)
    # adaptive choices resolve the same way regardless of the seed
    orc2 = make_energy_lb_adaptive(F(1, 10))
    run(STRATEGIES["amp-tad2"](), orc2, 2, seed=3)
    assert serialize_graph(orc2.finalize()) == serialize_graph(g)


def test_energy_oracle_epsilon_range():
    with pytest.raises(BadParams):
        make_energy_lb_adaptive(0)
    with pytest.raises(BadParams):
        make_energy_lb_adaptive(1)
