"""Engine: revelation, command legality, clocks, traces, choice streams."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadex import (
    IllegalCommand,
    NonTermination,
    Retreat,
    ScriptedStream,
    SeededStream,
    StaticOracle,
    StrategyPolicy,
    Traverse,
    Wait,
    ZeroOptimum,
    build_cycle,
    build_tadpole,
    competitive_ratio,
    cost_energy,
    cost_time,
    enumerate_choice_paths,
    replay_policy,
    run,
    trace_to_csv,
)


def square():
    return build_cycle([1, 2, 3, 4])


def test_static_oracle_reveals_incident_edges():
    g = build_tadpole([1, 2, 3], [5], attach=0)
    oracle = StaticOracle(g)
    start, edges = oracle.initial_view()
    assert start == "c0"
    assert sorted(edges) == [("c1", F(1)), ("c2", F(3)), ("t1", F(5))]
    assert sorted(oracle.reveal("c1")) == [("c0", F(1)), ("c2", F(2))]
    assert oracle.finalize() == g
    assert oracle.weight_bound() >= g.total_weight


def test_replay_walk_costs_and_trace():
    g = square()
    walks = [["c0", "c1", "c2", "c1", "c0"], ["c0", "c3", "c0"]]
    trace = run(replay_policy(walks), StaticOracle(g), 2)
    assert trace.agent_distances == (F(6), F(8))
    assert cost_energy(trace) == 8
    # both agents move in parallel; the longer walk sets the clock
    assert cost_time(trace) == 8
    assert trace.completion == 8
    visits = trace.first_visits()
    assert visits["c0"] == 0 and visits["c1"] == 1 and visits["c3"] == 4
    assert trace.traversed_edges() == {("c0", "c1"), ("c1", "c2"), ("c0", "c3")}


def test_trace_csv_shape():
    g = square()
    trace = run(
        replay_policy([["c0", "c1", "c2", "c1", "c0"], ["c0", "c3", "c0"]]),
        StaticOracle(g),
        2,
    )
    lines = trace_to_csv(trace).strip().splitlines()
    assert lines[0].startswith("time,agent,kind")
    assert len(lines) > 4


class _GreedyWithLateSecond(StrategyPolicy):
    """Agent 1 sits out the first decision; both then walk greedily and
    retreat when their frontier dries up."""

    name = "greedy-late"

    def check(self, graph_class, k):
        pass

    def fresh(self, k, stream):
        class Run:
            def __init__(self):
                self.held = False

            def decide(self, view):
                cmds = {}
                for a in view.needs_command:
                    if a == 1 and not self.held:
                        self.held = True
                        cmds[a] = Wait()
                        continue
                    nxt = view.unexplored_out(view.position(a))
                    if nxt:
                        cmds[a] = Traverse(nxt[0][0])
                    elif view.position(a) != view.start:
                        cmds[a] = Retreat()
                return cmds

        return Run()


def test_wait_and_retreat_bookkeeping():
    g = build_cycle([1, 1, 1])
    trace = run(_GreedyWithLateSecond(), StaticOracle(g), 2)
    kinds = [e.kind for e in trace.events]
    assert "wait_begin" in kinds and "wait_end" in kinds
    assert set(trace.first_visits()) == set(g.nodes)
    assert cost_time(trace) == 3
    assert sorted(trace.agent_distances) == [2, 3]


class _Cheater(StrategyPolicy):
    """Tries to traverse an edge no visit has revealed."""

    name = "cheater"

    def check(self, graph_class, k):
        pass

    def fresh(self, k, stream):
        class Run:
            def decide(self, view):
                return {0: Traverse("c2")}

        return Run()


def test_unrevealed_edge_is_illegal():
    g = build_cycle([1, 1, 1, 1])  # c2 is not adjacent to the start
    with pytest.raises(IllegalCommand):
        run(_Cheater(), StaticOracle(g), 1)


class _PingPong(StrategyPolicy):
    name = "ping-pong"

    def check(self, graph_class, k):
        pass

    def fresh(self, k, stream):
        class Run:
            def decide(self, view):
                pos = view.position(0)
                return {0: Traverse("c1" if pos != "c1" else "c0")}

        return Run()


def test_nontermination_guard():
    with pytest.raises(NonTermination):
        run(_PingPong(), StaticOracle(build_cycle([1, 1, 1])), 1)


def test_unfinished_exploration_is_flagged():
    # walks that skip c2 leave frontier work behind
    g = square()
    with pytest.raises(NonTermination):
        run(replay_policy([["c0", "c1", "c0"], ["c0", "c3", "c0"]]), StaticOracle(g), 2)


def test_seeded_stream_is_deterministic():
    a = SeededStream(5)
    b = SeededStream(5)
    picks = [(a.choice(3), b.choice(3)) for _ in range(20)]
    assert all(x == y for x, y in picks)
    assert any(x > 0 for x, _ in picks)


def test_scripted_stream_records_arities():
    s = ScriptedStream([1, 2])
    assert s.choice(2) == 1
    assert s.choice(4) == 2
    assert s.choice(3) == 0  # past the script: leftmost branch
    assert s.choice(1) == 0  # single-outcome choices are not choice points
    assert s.arities == [2, 4, 3]
    assert s.used == [1, 2, 0]
    with pytest.raises(ValueError):
        ScriptedStream([7]).choice(2)


def test_enumerate_choice_paths_covers_tree():
    def fake_run(stream):
        a = stream.choice(2)
        b = stream.choice(3) if a == 0 else stream.choice(2)
        return (a, b)

    leaves = enumerate_choice_paths(fake_run, limit=16)
    assert sorted(c for c, _ in leaves) == [
        (0, 0), (0, 1), (0, 2), (1, 0), (1, 1),
    ]
    assert all(choices == result for choices, result in leaves)
    with pytest.raises(NonTermination):
        enumerate_choice_paths(fake_run, limit=3)


def test_competitive_ratio_guards_zero():
    assert competitive_ratio(F(3), F(2)) == F(3, 2)
    with pytest.raises(ZeroOptimum):
        competitive_ratio(F(3), F(0))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_same_seed_same_trace(seed):
    g = build_tadpole([2, 1, 1], [1], attach=1, start="c0")
    from tadex import STRATEGIES

    t1 = run(STRATEGIES["amp-tad2"](), StaticOracle(g), 2, seed=seed)
    t2 = run(STRATEGIES["amp-tad2"](), StaticOracle(g), 2, seed=seed)
    assert t1 == t2
