"""Online exploration engine.

Agents start on the start node knowing only its incident edges; visiting a
node for the first time reveals that node's incident edges and neighbor
labels.  Knowledge is shared.  Policies are consulted whenever an agent is
idle at a node (after every arrival batch); they answer with traverse /
wait / retreat commands.  The engine permits parallel motion; strategies
that want strictly sequential movement simply keep the other agents idle.

Costs: completion time is the clock when every node has been visited and
every agent stands on the start node again; energy is the maximum single
agent's traversed distance.
"""

from __future__ import annotations

import csv
import heapq
import io
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Protocol, Sequence, Union

from .errors import (
    IllegalCommand,
    InsufficientAgents,
    NonTermination,
    OracleInconsistency,
    ZeroOptimum,
)
from .graph import Node, WeightedGraph
from .rationals import format_rational

# ---------------------------------------------------------------------------
# randomness


class ChoiceStream:
    """Source of the discrete choices a strategy is allowed to randomize."""

    def choice(self, n: int) -> int:
        raise NotImplementedError

    def pick(self, seq: Sequence):
        return seq[self.choice(len(seq))]


class SeededStream(ChoiceStream):
    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def choice(self, n: int) -> int:
        if n <= 1:
            return 0
        return self._rng.randrange(n)


class ScriptedStream(ChoiceStream):
    """Replays a fixed choice script, defaulting to 0 past its end.

    Records the arity of every choice point, which is what the exhaustive
    enumerator needs to expand the sibling branches.
    """

    def __init__(self, script: Sequence[int] = ()):
        self.script = list(script)
        self.used: list[int] = []
        self.arities: list[int] = []

    def choice(self, n: int) -> int:
        if n <= 1:
            return 0
        depth = len(self.arities)
        self.arities.append(n)
        value = self.script[depth] if depth < len(self.script) else 0
        if not 0 <= value < n:
            raise ValueError(f"scripted choice {value} out of range 0..{n - 1}")
        self.used.append(value)
        return value


def enumerate_choice_paths(run_fn: Callable[[ScriptedStream], object], limit: int = 256):
    """Run `run_fn` once per distinct random-choice path.

    Returns a list of (choices, result) pairs covering the whole choice tree;
    raises NonTermination if the tree exceeds `limit` leaves.
    """
    results: list[tuple[tuple[int, ...], object]] = []

    def explore(prefix: list[int]) -> None:
        if len(results) >= limit:
            raise NonTermination(f"choice tree larger than {limit} paths")
        stream = ScriptedStream(prefix)
        out = run_fn(stream)
        results.append((tuple(stream.used), out))
        for depth in range(len(prefix), len(stream.arities)):
            for alt in range(1, stream.arities[depth]):
                explore(stream.used[:depth] + [alt])

    explore([])
    return results


# ---------------------------------------------------------------------------
# oracles


class RevelationOracle(Protocol):
    """Answers what an exploring team learns, possibly adaptively."""

    graph_class: str

    def initial_view(self) -> tuple[Node, list[tuple[Node, Fraction]]]:
        """Start node and its incident (neighbor, weight) list."""

    def reveal(self, node: Node) -> list[tuple[Node, Fraction]]:
        """Incident edges of a node on its first visit."""

    def finalize(self) -> WeightedGraph:
        """A committed graph consistent with every answer given."""

    def weight_bound(self) -> Fraction:
        """Upper bound on total edge weight, for the non-termination guard."""


class StaticOracle:
    """Reveals a fixed graph."""

    def __init__(self, g: WeightedGraph):
        self.g = g

    @property
    def graph_class(self) -> str:
        return self.g.graph_class

    def initial_view(self) -> tuple[Node, list[tuple[Node, Fraction]]]:
        return self.g.start, list(self.g.neighbors(self.g.start))

    def reveal(self, node: Node) -> list[tuple[Node, Fraction]]:
        return list(self.g.neighbors(node))

    def finalize(self) -> WeightedGraph:
        return self.g

    def weight_bound(self) -> Fraction:
        return self.g.total_weight


# ---------------------------------------------------------------------------
# commands, trace


@dataclass(frozen=True)
class Traverse:
    to: Node


@dataclass(frozen=True)
class Wait:
    pass


@dataclass(frozen=True)
class Retreat:
    """Walk the shortest currently-known path back to the start node."""


Command = Union[Traverse, Wait, Retreat]


@dataclass(frozen=True)
class TraceEvent:
    time: Fraction
    agent: int
    kind: str  # depart | arrive | wait_begin | wait_end | done
    node_from: Node
    node_to: Node
    weight: Optional[Fraction]
    total: Fraction  # agent's cumulative traversed distance at this event


@dataclass(frozen=True)
class Trace:
    start: Node
    k: int
    events: tuple[TraceEvent, ...]
    agent_distances: tuple[Fraction, ...]
    completion: Fraction

    def first_visits(self) -> dict[Node, Fraction]:
        seen: dict[Node, Fraction] = {self.start: Fraction(0)}
        for ev in self.events:
            if ev.kind == "arrive" and ev.node_to not in seen:
                seen[ev.node_to] = ev.time
        return seen

    def traversed_edges(self) -> set[tuple[Node, Node]]:
        out: set[tuple[Node, Node]] = set()
        for ev in self.events:
            if ev.kind == "depart":
                a, b = ev.node_from, ev.node_to
                out.add((a, b) if a <= b else (b, a))
        return out


def trace_to_csv(trace: Trace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["time", "agent", "kind", "from", "to", "edge_weight", "agent_total_distance"]
    )
    for ev in trace.events:
        writer.writerow(
            [
                format_rational(ev.time),
                ev.agent,
                ev.kind,
                ev.node_from,
                ev.node_to,
                format_rational(ev.weight) if ev.weight is not None else "",
                format_rational(ev.total),
            ]
        )
    return buf.getvalue()


def cost_time(trace: Trace) -> Fraction:
    return trace.completion


def cost_energy(trace: Trace) -> Fraction:
    return max(trace.agent_distances)


def competitive_ratio(online: Fraction, opt: Fraction) -> Fraction:
    if opt <= 0:
        raise ZeroOptimum("offline optimum must be positive")
    return Fraction(online, 1) / opt


# ---------------------------------------------------------------------------
# policy interface


class PolicyRun(Protocol):
    def decide(self, view: "EngineView") -> dict[int, Command]:
        """Commands for agents in view.needs_command; omissions mean wait."""


class StrategyPolicy:
    """Descriptor for a strategy: class/agent requirements plus run factory."""

    name: str = "policy"

    def check(self, graph_class: str, k: int) -> None:
        raise NotImplementedError

    def fresh(self, k: int, stream: ChoiceStream) -> PolicyRun:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# engine internals


def _edge_key(a: Node, b: Node) -> tuple[Node, Node]:
    return (a, b) if a <= b else (b, a)


class EngineView:
    """Read-only window onto the shared knowledge state."""

    def __init__(self, engine: "_Engine"):
        self._e = engine

    @property
    def clock(self) -> Fraction:
        return self._e.clock

    @property
    def k(self) -> int:
        return self._e.k

    @property
    def start(self) -> Node:
        return self._e.start

    @property
    def visited(self) -> frozenset:
        return frozenset(self._e.visited)

    def is_visited(self, node: Node) -> bool:
        return node in self._e.visited

    def known_neighbors(self, node: Node) -> tuple[tuple[Node, Fraction], ...]:
        return tuple(self._e.adj.get(node, ()))

    def known_weight(self, a: Node, b: Node) -> Optional[Fraction]:
        return self._e.known_w.get(_edge_key(a, b))

    def unexplored_out(self, node: Node) -> tuple[tuple[Node, Fraction], ...]:
        return tuple(
            (nbr, w) for nbr, w in self._e.adj.get(node, ()) if nbr not in self._e.visited
        )

    def has_frontier(self) -> bool:
        return bool(self._e.unvisited_known)

    def position(self, agent: int) -> Node:
        return self._e.pos[agent]

    def distance(self, agent: int) -> Fraction:
        return self._e.dist[agent]

    def in_transit(self, agent: int) -> bool:
        return agent in self._e.transit

    @property
    def needs_command(self) -> tuple[int, ...]:
        return self._e.needs_command()

    def shortest_known(self, u: Node, v: Node) -> tuple[Fraction, list[Node]]:
        """Dijkstra over revealed edges; deterministic tie-breaking."""
        return self._e.shortest_known(u, v)

    def known_distances(self, u: Node) -> dict[Node, Fraction]:
        """Distances from u over revealed edges, for every reachable node."""
        return self._e.known_distances(u)

    def known_cycle(self) -> Optional[tuple[tuple[Node, ...], Fraction]]:
        """The unique cycle of the revealed subgraph once all its edges are
        known, as (ordered nodes, total length); None while still open."""
        return self._e.known_cycle()


class _Engine:
    def __init__(self, oracle: RevelationOracle, k: int):
        self.oracle = oracle
        self.k = k
        self.clock = Fraction(0)
        self.visited: set[Node] = set()
        self.adj: dict[Node, list[tuple[Node, Fraction]]] = {}
        self.known_w: dict[tuple[Node, Node], Fraction] = {}
        self.unvisited_known: set[Node] = set()
        self.pos: list[Node] = []
        self.dist: list[Fraction] = []
        self.transit: dict[int, tuple[Node, Fraction, Fraction]] = {}  # dest, w, t_arrive
        self.autopath: dict[int, list[Node]] = {}
        self.waiting: set[int] = set()
        self.events: list[TraceEvent] = []
        self.start: Node = ""
        self._cycle_cache: tuple[int, Optional[tuple[tuple[Node, ...], Fraction]]] = (-1, None)
        self._epoch = 0
        self.view = EngineView(self)

    # -- knowledge ---------------------------------------------------------

    def _learn_edge(self, a: Node, b: Node, w: Fraction) -> None:
        key = _edge_key(a, b)
        old = self.known_w.get(key)
        if old is not None:
            if old != w:
                raise OracleInconsistency(
                    f"edge {key} revealed with weight {w}, previously {old}"
                )
            return
        self.known_w[key] = w
        self.adj.setdefault(a, []).append((b, w))
        self.adj.setdefault(b, []).append((a, w))
        for node in (a, b):
            if node not in self.visited:
                self.unvisited_known.add(node)
        self._epoch += 1

    def _visit(self, node: Node) -> None:
        self.visited.add(node)
        self.unvisited_known.discard(node)
        answer = self.oracle.reveal(node)
        seen_here: set[Node] = set()
        for nbr, w in answer:
            seen_here.add(nbr)
            self._learn_edge(node, nbr, w)
        # every edge previously known at this node must be acknowledged
        for nbr, w in self.adj.get(node, ()):
            if nbr not in seen_here:
                raise OracleInconsistency(
                    f"reveal({node}) omitted known edge to {nbr}"
                )
        self._epoch += 1

    def shortest_known(self, u: Node, v: Node) -> tuple[Fraction, list[Node]]:
        dist: dict[Node, Fraction] = {u: Fraction(0)}
        prev: dict[Node, Node] = {}
        heap: list[tuple[Fraction, Node]] = [(Fraction(0), u)]
        settled: set[Node] = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in settled:
                continue
            settled.add(x)
            if x == v:
                break
            for nbr, w in self.adj.get(x, ()):
                nd = d + w
                if nbr not in settled and (nbr not in dist or nd < dist[nbr]):
                    dist[nbr] = nd
                    prev[nbr] = x
                    heapq.heappush(heap, (nd, nbr))
        if v not in dist:
            raise IllegalCommand(f"no known path from {u} to {v}")
        path = [v]
        while path[-1] != u:
            path.append(prev[path[-1]])
        path.reverse()
        return dist[v], path

    def known_distances(self, u: Node) -> dict[Node, Fraction]:
        dist: dict[Node, Fraction] = {u: Fraction(0)}
        heap: list[tuple[Fraction, Node]] = [(Fraction(0), u)]
        settled: set[Node] = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in settled:
                continue
            settled.add(x)
            for nbr, w in self.adj.get(x, ()):
                nd = d + w
                if nbr not in settled and (nbr not in dist or nd < dist[nbr]):
                    dist[nbr] = nd
                    heapq.heappush(heap, (nd, nbr))
        return dist

    def known_cycle(self) -> Optional[tuple[tuple[Node, ...], Fraction]]:
        epoch, cached = self._cycle_cache
        if epoch == self._epoch:
            return cached
        result = self._compute_known_cycle()
        self._cycle_cache = (self._epoch, result)
        return result

    def _compute_known_cycle(self) -> Optional[tuple[tuple[Node, ...], Fraction]]:
        degree = {v: len(es) for v, es in self.adj.items()}
        stack = [v for v, d in degree.items() if d <= 1]
        alive = dict(degree)
        removed: set[Node] = set()
        while stack:
            v = stack.pop()
            if v in removed:
                continue
            removed.add(v)
            for nbr, _w in self.adj.get(v, ()):
                if nbr in removed:
                    continue
                alive[nbr] -= 1
                if alive[nbr] <= 1:
                    stack.append(nbr)
        ring = [v for v in self.adj if v not in removed]
        if not ring or any(alive[v] != 2 for v in ring):
            return None
        # walk the ring in a deterministic direction
        anchor = min(ring)
        order = [anchor]
        total = Fraction(0)
        nbrs = [(n, w) for n, w in self.adj[anchor] if n not in removed]
        nxt, w0 = min(nbrs)
        order.append(nxt)
        total += w0
        while order[-1] != anchor:
            here = order[-1]
            back = order[-2]
            step = [(n, w) for n, w in self.adj[here] if n not in removed and n != back]
            if len(step) != 1:
                return None
            here_next, w = step[0]
            order.append(here_next)
            total += w
        if len(order) - 1 != len(ring):
            return None
        return tuple(order[:-1]), total

    # -- agents ------------------------------------------------------------

    def needs_command(self) -> tuple[int, ...]:
        return tuple(
            a
            for a in range(self.k)
            if a not in self.transit and not self.autopath.get(a)
        )

    def _emit(self, agent: int, kind: str, frm: Node, to: Node, w: Optional[Fraction]) -> None:
        self.events.append(TraceEvent(self.clock, agent, kind, frm, to, w, self.dist[agent]))

    def _begin_traverse(self, agent: int, dest: Node) -> None:
        here = self.pos[agent]
        w = self.known_w.get(_edge_key(here, dest))
        if w is None:
            raise IllegalCommand(
                f"agent {agent} ordered over unrevealed edge {here}-{dest}"
            )
        if agent in self.waiting:
            self.waiting.discard(agent)
            self._emit(agent, "wait_end", here, here, None)
        self._emit(agent, "depart", here, dest, w)
        self.transit[agent] = (dest, w, self.clock + w)

    def _apply_commands(self, cmds: dict[int, Command]) -> None:
        for agent in sorted(cmds):
            cmd = cmds[agent]
            if isinstance(cmd, Traverse):
                self._begin_traverse(agent, cmd.to)
            elif isinstance(cmd, Retreat):
                here = self.pos[agent]
                if here == self.start:
                    continue
                _, path = self.shortest_known(here, self.start)
                self.autopath[agent] = path[1:]
                self._begin_traverse(agent, self.autopath[agent].pop(0))
            elif isinstance(cmd, Wait):
                if agent not in self.waiting:
                    self.waiting.add(agent)
                    here = self.pos[agent]
                    self._emit(agent, "wait_begin", here, here, None)
            else:
                raise IllegalCommand(f"unknown command {cmd!r}")

    # -- main loop ---------------------------------------------------------

    def setup(self) -> None:
        start, edges = self.oracle.initial_view()
        self.start = start
        self.pos = [start] * self.k
        self.dist = [Fraction(0)] * self.k
        self.visited.add(start)
        self.adj.setdefault(start, [])
        for nbr, w in edges:
            self._learn_edge(start, nbr, w)

    def done(self) -> bool:
        return (
            not self.unvisited_known
            and not self.transit
            and all(p == self.start for p in self.pos)
        )

    def drive(self, policy_run: PolicyRun, guard_factor: int = 100) -> None:
        guard = self.oracle.weight_bound() * guard_factor
        while True:
            if self.done():
                break
            eligible = self.needs_command()
            decided = policy_run.decide(self.view)
            cmds: dict[int, Command] = {}
            for agent in range(self.k):
                if agent not in self.transit and self.autopath.get(agent):
                    cmds[agent] = Traverse(self.autopath[agent].pop(0))
            for agent, cmd in decided.items():
                if agent not in eligible:
                    raise IllegalCommand(
                        f"policy commanded agent {agent} which is not idle"
                    )
                cmds[agent] = cmd
            self._apply_commands(cmds)
            if not self.transit:
                raise NonTermination("no agent in motion, exploration incomplete")
            t_next = min(t for _, _, t in self.transit.values())
            if t_next > guard:
                raise NonTermination(f"clock exceeded guard {guard}")
            self.clock = t_next
            arriving = sorted(
                a for a, (_, _, t) in self.transit.items() if t == t_next
            )
            for agent in arriving:
                dest, w, _ = self.transit.pop(agent)
                frm = self.pos[agent]
                self.pos[agent] = dest
                self.dist[agent] += w
                self._emit(agent, "arrive", frm, dest, w)
                if dest not in self.visited:
                    self._visit(dest)

    def finish(self) -> Trace:
        for agent in range(self.k):
            self._emit(agent, "done", self.pos[agent], self.pos[agent], None)
        final = self.oracle.finalize()
        for (a, b), w in self.known_w.items():
            try:
                actual = dict(final.neighbors(a)).get(b)
            except Exception as exc:  # unknown node in final graph
                raise OracleInconsistency(f"final graph lacks node {a}") from exc
            if actual != w:
                raise OracleInconsistency(
                    f"final graph disagrees on edge {a}-{b}: {actual} vs revealed {w}"
                )
        if set(final.nodes) != self.visited:
            raise OracleInconsistency("final graph nodes differ from the visited set")
        if final.start != self.start:
            raise OracleInconsistency("final graph start differs from revealed start")
        return Trace(
            start=self.start,
            k=self.k,
            events=tuple(self.events),
            agent_distances=tuple(self.dist),
            completion=self.clock,
        )


def run(
    policy: StrategyPolicy,
    oracle: RevelationOracle,
    k: int,
    seed: Union[int, ChoiceStream] = 0,
    guard_factor: int = 100,
) -> Trace:
    """Execute `policy` with `k` agents against `oracle`; returns the trace."""
    if k < 1:
        raise InsufficientAgents("at least one agent required")
    policy.check(oracle.graph_class, k)
    stream = seed if isinstance(seed, ChoiceStream) else SeededStream(seed)
    engine = _Engine(oracle, k)
    engine.setup()
    policy_run = policy.fresh(k, stream)
    engine.drive(policy_run, guard_factor=guard_factor)
    return engine.finish()
