"""Weighted cycle, tadpole, and n-tadpole graphs.

A graph here is a single cycle of at least three nodes plus ``n >= 0``
simple paths ("tails") attached to cycle nodes.  Node labels are generated
canonically: cycle nodes ``c0..c{m-1}``, tail nodes ``t1..tj`` for a single
tail and ``t{i}_{k}`` when several tails exist.  All weights are strictly
positive exact rationals.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    BadAttachIndex,
    EmptyOrTooShort,
    EmptyTail,
    GraphFormatError,
    NonpositiveWeight,
    UnknownNode,
)
from .rationals import format_rational, parse_rational

Node = str
WeightLike = Union[Fraction, int, str]


def as_weight(value: WeightLike) -> Fraction:
    """Coerce an int / Fraction / text literal into a positive Fraction."""
    if isinstance(value, Fraction):
        w = value
    elif isinstance(value, int):
        w = Fraction(value)
    elif isinstance(value, str):
        w = parse_rational(value)
    else:
        raise NonpositiveWeight(f"unsupported weight type {type(value).__name__}")
    if w <= 0:
        raise NonpositiveWeight(f"edge weight must be positive, got {w}")
    return w


@dataclass(frozen=True)
class Edge:
    """Undirected weighted edge; `index` is its canonical position."""

    u: Node
    v: Node
    weight: Fraction
    index: int

    def other(self, node: Node) -> Node:
        if node == self.u:
            return self.v
        if node == self.v:
            return self.u
        raise UnknownNode(f"{node} is not an endpoint of edge {self.u}-{self.v}")

    @property
    def key(self) -> tuple[Node, Node]:
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


@dataclass(frozen=True)
class Tail:
    """A path hanging off the cycle at `attach`, listed root-to-leaf."""

    attach: Node
    nodes: tuple[Node, ...]
    weights: tuple[Fraction, ...]

    @property
    def length(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def end(self) -> Node:
        return self.nodes[-1]


@dataclass(frozen=True)
class WeightedGraph:
    cycle_nodes: tuple[Node, ...]
    cycle_weights: tuple[Fraction, ...]
    tails: tuple[Tail, ...]
    start: Node

    # -- structure ---------------------------------------------------------

    @cached_property
    def nodes(self) -> tuple[Node, ...]:
        out = list(self.cycle_nodes)
        for tail in self.tails:
            out.extend(tail.nodes)
        return tuple(out)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        out: list[Edge] = []
        m = len(self.cycle_nodes)
        for i, w in enumerate(self.cycle_weights):
            out.append(Edge(self.cycle_nodes[i], self.cycle_nodes[(i + 1) % m], w, i))
        idx = m
        for tail in self.tails:
            prev = tail.attach
            for node, w in zip(tail.nodes, tail.weights):
                out.append(Edge(prev, node, w, idx))
                prev = node
                idx += 1
        return tuple(out)

    @cached_property
    def adjacency(self) -> Mapping[Node, tuple[Edge, ...]]:
        adj: dict[Node, list[Edge]] = {v: [] for v in self.nodes}
        for e in self.edges:
            adj[e.u].append(e)
            adj[e.v].append(e)
        return {v: tuple(es) for v, es in adj.items()}

    def neighbors(self, node: Node) -> tuple[tuple[Node, Fraction], ...]:
        if node not in self.adjacency:
            raise UnknownNode(node)
        return tuple((e.other(node), e.weight) for e in self.adjacency[node])

    def degree(self, node: Node) -> int:
        if node not in self.adjacency:
            raise UnknownNode(node)
        return len(self.adjacency[node])

    # -- measures ----------------------------------------------------------

    @property
    def n_tails(self) -> int:
        return len(self.tails)

    @property
    def graph_class(self) -> str:
        if not self.tails:
            return "cycle"
        return "tadpole" if len(self.tails) == 1 else "ntadpole"

    @property
    def cycle_length(self) -> Fraction:
        return sum(self.cycle_weights, Fraction(0))

    @property
    def tails_length(self) -> Fraction:
        return sum((t.length for t in self.tails), Fraction(0))

    @property
    def total_weight(self) -> Fraction:
        return self.cycle_length + self.tails_length

    def on_cycle(self, node: Node) -> bool:
        return node in self._cycle_index

    @cached_property
    def _cycle_index(self) -> Mapping[Node, int]:
        return {v: i for i, v in enumerate(self.cycle_nodes)}

    def tail_containing(self, node: Node) -> Optional[int]:
        """Index of the tail holding `node`, or None for cycle nodes."""
        for i, tail in enumerate(self.tails):
            if node in tail.nodes:
                return i
        if node not in self._cycle_index:
            raise UnknownNode(node)
        return None


# ---------------------------------------------------------------------------
# constructors


def _cycle_labels(count: int) -> tuple[Node, ...]:
    return tuple(f"c{i}" for i in range(count))


def _check_cycle_weights(weights: Sequence[WeightLike]) -> tuple[Fraction, ...]:
    ws = tuple(as_weight(w) for w in weights)
    if len(ws) < 3:
        raise EmptyOrTooShort(f"cycle needs >= 3 edges, got {len(ws)}")
    return ws


def build_cycle(weights: Sequence[WeightLike], start: Node = "c0") -> WeightedGraph:
    """Cycle with edge i joining ``ci`` and ``c(i+1 mod m)``."""
    ws = _check_cycle_weights(weights)
    nodes = _cycle_labels(len(ws))
    if start not in nodes:
        raise UnknownNode(f"start node {start!r} not in cycle")
    return WeightedGraph(nodes, ws, (), start)


def build_n_tadpole(
    cycle_weights: Sequence[WeightLike],
    tails: Sequence[tuple[int, Sequence[WeightLike]]] = (),
    start: Node = "c0",
) -> WeightedGraph:
    """Cycle plus tails given as (attach_index, weights) pairs.

    Several tails may share an attachment node.  With no tails the result is
    exactly ``build_cycle``; a single tail uses the plain ``t1..tj`` labels.
    """
    ws = _check_cycle_weights(cycle_weights)
    cyc = _cycle_labels(len(ws))
    built: list[Tail] = []
    single = len(tails) == 1
    for ti, (attach, tail_weights) in enumerate(tails, start=1):
        if not (0 <= attach < len(cyc)):
            raise BadAttachIndex(f"attach index {attach} outside cycle of {len(cyc)} nodes")
        tws = tuple(as_weight(w) for w in tail_weights)
        if not tws:
            raise EmptyTail("tail needs at least one edge")
        if single:
            labels = tuple(f"t{k}" for k in range(1, len(tws) + 1))
        else:
            labels = tuple(f"t{ti}_{k}" for k in range(1, len(tws) + 1))
        built.append(Tail(cyc[attach], labels, tws))
    g = WeightedGraph(cyc, ws, tuple(built), start)
    if start not in g.adjacency:
        raise UnknownNode(f"start node {start!r} not in graph")
    return g


def build_tadpole(
    cycle_weights: Sequence[WeightLike],
    tail_weights: Sequence[WeightLike],
    attach: int = 0,
    start: Node = "c0",
) -> WeightedGraph:
    """Cycle with a single tail ``t1..tj`` attached at cycle index `attach`."""
    return build_n_tadpole(cycle_weights, [(attach, tail_weights)], start=start)


# ---------------------------------------------------------------------------
# shortest paths


def _dijkstra(g: WeightedGraph, source: Node) -> tuple[dict[Node, Fraction], dict[Node, Node]]:
    if source not in g.adjacency:
        raise UnknownNode(source)
    dist: dict[Node, Fraction] = {source: Fraction(0)}
    prev: dict[Node, Node] = {}
    heap: list[tuple[Fraction, Node]] = [(Fraction(0), source)]
    done: set[Node] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for e in g.adjacency[u]:
            v = e.other(u)
            nd = d + e.weight
            if v not in dist or nd < dist[v] or (nd == dist[v] and u < prev.get(v, u)):
                if v not in done:
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, v))
    return dist, prev


def distances_from(g: WeightedGraph, source: Node) -> dict[Node, Fraction]:
    return _dijkstra(g, source)[0]


def shortest_distance(g: WeightedGraph, u: Node, v: Node) -> Fraction:
    dist, _ = _dijkstra(g, u)
    if v not in dist:
        raise UnknownNode(v)
    return dist[v]


def shortest_path(g: WeightedGraph, u: Node, v: Node) -> list[Node]:
    dist, prev = _dijkstra(g, u)
    if v not in dist:
        raise UnknownNode(v)
    path = [v]
    while path[-1] != u:
        path.append(prev[path[-1]])
    path.reverse()
    return path


# ---------------------------------------------------------------------------
# cycle geometry


@dataclass(frozen=True)
class CycleGeometry:
    """Midpoint and extremal-edge data for the cycle part of a graph.

    The reference node is the start when it lies on the cycle, otherwise the
    attachment node of the path leading to the start.  `v_short` / `v_long`
    flank the cycle midpoint with arc distances `d_short <= d_long` measured
    from the reference; when the midpoint falls on a node both coincide with
    it and `mid_edge` is None (weight zero by convention).
    """

    reference: Node
    cycle_length: Fraction
    v_short: Node
    v_long: Node
    d_short: Fraction
    d_long: Fraction
    mid_edge: Optional[Edge]
    mid_offset: Fraction  # into mid_edge from its v_short-side endpoint; 0 on a node
    e_max: Edge
    d_intersection: Fraction  # shortest start-to-attachment distance (0 on cycles)
    d_tail: Fraction  # remaining tail length per the single-tail convention

    @property
    def midpoint_on_node(self) -> bool:
        return self.mid_edge is None

    @property
    def mid_weight(self) -> Fraction:
        return self.mid_edge.weight if self.mid_edge is not None else Fraction(0)


def cycle_geometry(g: WeightedGraph, reference: Optional[Node] = None) -> CycleGeometry:
    """Geometry of the cycle relative to `reference` (defaults per the start).

    For graphs with several tails a reference must make sense for the caller;
    the default uses the start's own tail attachment.
    """
    if reference is None:
        if g.on_cycle(g.start):
            reference = g.start
        else:
            reference = g.tails[g.tail_containing(g.start)].attach
    if not g.on_cycle(reference):
        raise UnknownNode(f"reference {reference!r} is not a cycle node")

    m = len(g.cycle_nodes)
    r = g._cycle_index[reference]
    L = g.cycle_length
    half = L / 2

    # prefix[j]: arc distance from the reference after j canonical-direction edges
    prefix = [Fraction(0)]
    for i in range(m):
        prefix.append(prefix[-1] + g.cycle_weights[(r + i) % m])

    mid_edge: Optional[Edge] = None
    mid_offset = Fraction(0)
    v_short = v_long = reference
    d_short = d_long = half
    for j in range(m + 1):
        if prefix[j] == half:
            v_short = v_long = g.cycle_nodes[(r + j) % m]
            break
        if prefix[j] < half < prefix[j + 1]:
            ei = (r + j) % m
            a = g.cycle_nodes[ei]
            b = g.cycle_nodes[(ei + 1) % m]
            da = prefix[j]
            db = L - prefix[j + 1]
            mid_edge = g.edges[ei]
            if da <= db:
                v_short, d_short = a, da
                v_long, d_long = b, db
                mid_offset = half - da
            else:
                v_short, d_short = b, db
                v_long, d_long = a, da
                mid_offset = prefix[j + 1] - half
            break

    max_i = 0
    for i in range(1, m):
        if g.cycle_weights[i] > g.cycle_weights[max_i]:
            max_i = i
    e_max = g.edges[max_i]

    if g.n_tails == 0:
        d_i = Fraction(0)
        d_t = Fraction(0)
    else:
        on_cycle_start = g.on_cycle(g.start)
        if g.n_tails == 1:
            tail = g.tails[0]
            if on_cycle_start:
                d_i = shortest_distance(g, g.start, tail.attach)
                d_t = tail.length
            else:
                d_i = shortest_distance(g, g.start, tail.attach)
                d_t = shortest_distance(g, g.start, tail.end)
        else:
            d_i = shortest_distance(g, g.start, reference)
            d_t = Fraction(0)

    return CycleGeometry(
        reference=reference,
        cycle_length=L,
        v_short=v_short,
        v_long=v_long,
        d_short=d_short,
        d_long=d_long,
        mid_edge=mid_edge,
        mid_offset=mid_offset,
        e_max=e_max,
        d_intersection=d_i,
        d_tail=d_t,
    )


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> WeightedGraph:
    """Parse the line-oriented graph format.

    One ``cycle w1 .. wm`` line, any number of ``tail <attach_index> w1 .. wj``
    lines (order defines tail numbering), and an optional ``start <label>``
    line.  ``#`` starts a comment; weights are integers, p/q fractions, or
    finite decimals.
    """
    cycle: Optional[list[str]] = None
    tails: list[tuple[int, list[str]]] = []
    start: Optional[str] = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        if kind == "cycle":
            if cycle is not None:
                raise GraphFormatError("duplicate cycle line")
            cycle = args
        elif kind == "tail":
            if len(args) < 2:
                raise GraphFormatError("tail line needs an attach index and weights")
            try:
                attach = int(args[0])
            except ValueError as exc:
                raise GraphFormatError(f"bad attach index {args[0]!r}") from exc
            tails.append((attach, args[1:]))
        elif kind == "start":
            if len(args) != 1:
                raise GraphFormatError("start line takes exactly one label")
            start = args[0]
        else:
            raise GraphFormatError(f"unknown directive {kind!r}")
    if cycle is None:
        raise GraphFormatError("missing cycle line")
    return build_n_tadpole(cycle, tails, start=start if start is not None else "c0")


def serialize_graph(g: WeightedGraph) -> str:
    lines = ["cycle " + " ".join(format_rational(w) for w in g.cycle_weights)]
    for tail in g.tails:
        attach = g._cycle_index[tail.attach]
        lines.append(
            f"tail {attach} " + " ".join(format_rational(w) for w in tail.weights)
        )
    lines.append(f"start {g.start}")
    return "\n".join(lines) + "\n"
