"""Worst-case instance generators: fixed gadgets and adaptive oracles.

The fixed gadgets are ordinary graphs whose geometry forces a specific
exploration order out of the strategies under test.  The adaptive oracles
implement the lazy-commitment arguments: topology and weights are decided in
response to reveal calls, while every answer stays consistent with the graph
finally returned.  Scale parameters are exact rationals throughout.

Long ideal paths are discretized into equal edges.  Where a construction
needs its discretized path edges to stay lighter than a competing single
edge, the granularity default adapts to the scale parameter; callers can
still pin any granularity >= 1 explicitly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import BadParams
from .graph import Node, Tail, WeightedGraph, build_cycle, build_tadpole
from .rationals import parse_rational

DEFAULT_BIG = Fraction(1000)


def _as_fraction(value) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


# ---------------------------------------------------------------------------
# fixed gadgets


def make_ale_lb_tadpole(epsilon, granularity: Optional[int] = None) -> WeightedGraph:
    """Tadpole on which lightest-next-edge exploration pays double.

    One short closing edge of weight 2e leaves the start; the long way round
    (length 2 - 2e) and the tail (length 1 - 2e, attached at the closing
    edge's far end) hide behind paths of lighter edges, so the walking agent
    circles everything the long way and finishes in 4 - 4e instead of 2.

    `granularity` is the number of edges per discretized path; the default
    keeps every path edge strictly lighter than the closing edge, which the
    forced exploration order depends on.
    """
    e = _as_fraction(epsilon)
    if not 0 < e < Fraction(1, 2):
        raise BadParams(f"need 0 < epsilon < 1/2, got {e}")
    if granularity is None:
        granularity = max(10, int(1 / (2 * e)) + 1)
    if granularity < 1:
        raise BadParams("granularity must be at least 1")
    long_arc = Fraction(1, granularity)
    short_arc = (1 - 2 * e) / granularity
    cycle = [long_arc] * granularity + [short_arc] * granularity + [2 * e]
    tail = [short_arc] * granularity
    return build_tadpole(cycle, tail, attach=2 * granularity)


def make_energy_lb_cycle(epsilon) -> WeightedGraph:
    """Triangle with weights 1+e, 1, 1-e; the heaviest edge leaves the start."""
    e = _as_fraction(epsilon)
    if not 0 < e < Fraction(1, 2):
        raise BadParams(f"need 0 < epsilon < 1/2, got {e}")
    return build_cycle([1 + e, 1, 1 - e])


def make_2_5_example(epsilon) -> WeightedGraph:
    """Tadpole of three unit-length uniform paths from the start.

    Two paths close a cycle of length 2 (midpoint exactly on the far node),
    the third is the tail.  Every edge has weight e, so 1/e must be an
    integer.
    """
    e = _as_fraction(epsilon)
    if e <= 0 or (1 / e).denominator != 1:
        raise BadParams(f"need epsilon > 0 with integer 1/epsilon, got {e}")
    steps = int(1 / e)
    return build_tadpole([e] * (2 * steps), [e] * steps, attach=0)


# ---------------------------------------------------------------------------
# adaptive oracle: time model on tadpoles


class TimeLowerBoundOracle:
    """Cycle-or-shortcut adversary for the time model.

    The team initially sees a weight-1 edge to c3, a path of weight-e edges,
    and a short tail.  As long as nobody has looked at c3, the path keeps
    growing.  Whoever commits to the heavy edge early gets a shortcut ring
    (case 2: the path is cut at its first unvisited node, joined to c3 by a
    weight-e edge); a team that first pushes the path to its full length
    (J-3 edges) gets the expensive ring (case 1: the path end joins c3 by a
    second weight-1 edge).

    `committed_case` is None until one of the triggers fires; `committed_opt`
    is the offline optimum of the committed graph.
    """

    graph_class = "tadpole"

    def __init__(self, J: int, n_tails: int = 1):
        if J < 4:
            raise BadParams(f"need J >= 4, got {J}")
        if n_tails < 1:
            raise BadParams("need at least one tail")
        self.J = J
        self.epsilon = Fraction(1, J)
        self.n_tails = n_tails
        self.tail_delta = self.epsilon / n_tails
        self.tail_names = tuple(f"t{i}" if n_tails == 1 else f"t{i}_1" for i in range(1, n_tails + 1))
        self.committed_case: Optional[int] = None
        self.cut_index: Optional[int] = None  # case 2: c2 = p_<cut_index>
        self._promised = 1  # highest path index promised so far
        if n_tails > 1:
            self.graph_class = "ntadpole"

    # path node labels; index 0 is the start itself
    def _p(self, i: int) -> Node:
        return "s" if i == 0 else f"p{i}"

    def initial_view(self) -> tuple[Node, list[tuple[Node, Fraction]]]:
        first = [(self._p(1), self.epsilon), ("c3", Fraction(1))]
        return "s", first + [(t, self.tail_delta) for t in self.tail_names]

    def reveal(self, node: Node) -> list[tuple[Node, Fraction]]:
        e = self.epsilon
        if node in self.tail_names:
            return [("s", self.tail_delta)]
        if node == "c3":
            if self.committed_case is None:
                # case 2: cut the path at its first unvisited node
                self.committed_case = 2
                self.cut_index = self._promised
            far = self._p(self.cut_index) if self.committed_case == 2 else self._p(self.J - 3)
            w = e if self.committed_case == 2 else Fraction(1)
            return [("s", Fraction(1)), (far, w)]
        if not node.startswith("p"):
            raise BadParams(f"reveal of unknown node {node!r}")
        i = int(node[1:])
        if self.committed_case == 2 and i == self.cut_index:
            return [(self._p(i - 1), e), ("c3", e)]
        if self.committed_case is None and i == self.J - 3:
            # case 1: the walker earned the full-length path
            self.committed_case = 1
        if self.committed_case == 1 and i == self.J - 3:
            return [(self._p(i - 1), e), ("c3", Fraction(1))]
        self._promised = max(self._promised, i + 1)
        return [(self._p(i - 1), e), (self._p(i + 1), e)]

    def finalize(self) -> WeightedGraph:
        if self.committed_case == 2:
            ring = self.cut_index
            closing = self.epsilon
        else:
            # pads the path to full length when nothing ever committed
            ring = self.J - 3
            closing = Fraction(1)
        cycle_nodes = tuple(["s"] + [self._p(i) for i in range(1, ring + 1)] + ["c3"])
        cycle_weights = tuple([self.epsilon] * ring + [closing, Fraction(1)])
        tails = tuple(
            Tail("s", (name,), (self.tail_delta,)) for name in self.tail_names
        )
        return WeightedGraph(cycle_nodes, cycle_weights, tails, "s")

    def weight_bound(self) -> Fraction:
        return Fraction(4)

    def committed_opt(self) -> Fraction:
        """Offline optimum of the committed graph, any k >= n_tails + 2."""
        if self.committed_case == 2:
            return 2 * (self.cut_index + 1) * self.epsilon
        return Fraction(2)


def make_time_lb_adaptive(J: int) -> TimeLowerBoundOracle:
    """Adaptive tadpole adversary forcing time ratio toward 3/2."""
    return TimeLowerBoundOracle(J)


def make_ntad_lb(n: int, J: int) -> TimeLowerBoundOracle:
    """The same adversary with the tail split into n tails of weight e/n."""
    if n < 2:
        raise BadParams("n >= 2; the single-tail variant is the plain adversary")
    if J < 4:
        raise BadParams(f"need J >= 4, got {J}")
    return TimeLowerBoundOracle(J, n_tails=n)


# ---------------------------------------------------------------------------
# adaptive oracle: energy model on tadpoles


class EnergyLowerBoundOracle:
    """Three-identical-branches adversary for the energy model.

    The start has three indistinguishable weight-(1-e) edges.  The first two
    branch heads to be revealed become the cycle shoulders (continuing by a
    weight-e edge each to bottoms joined by one huge edge); the last becomes
    the tail, continuing by weight 1+e.  Whoever clears branches early finds
    the long tail work stacked on whatever distance is already on the clock.
    """

    graph_class = "tadpole"

    def __init__(self, epsilon, big=DEFAULT_BIG):
        e = _as_fraction(epsilon)
        if not 0 < e < 1:
            raise BadParams(f"need 0 < epsilon < 1, got {e}")
        self.epsilon = e
        self.big = _as_fraction(big)
        if self.big <= 8:
            raise BadParams("the huge edge must dominate the rest of the graph")
        self.heads = ("q1", "q2", "q3")
        self.role: dict[Node, str] = {}  # head -> "shoulder" | "tail"
        self.bottom_of: dict[Node, Node] = {}
        self.head_of_bottom: dict[Node, Node] = {}
        self._next_bottom = 1
        self._shoulders: list[Node] = []

    def initial_view(self) -> tuple[Node, list[tuple[Node, Fraction]]]:
        w = 1 - self.epsilon
        return "s", [(h, w) for h in self.heads]

    def _assign_shoulder(self, head: Node) -> Node:
        self.role[head] = "shoulder"
        self._shoulders.append(head)
        bottom = f"w{self._next_bottom}"
        self._next_bottom += 1
        self.bottom_of[head] = bottom
        self.head_of_bottom[bottom] = head
        return bottom

    def reveal(self, node: Node) -> list[tuple[Node, Fraction]]:
        e = self.epsilon
        if node in self.heads:
            if node not in self.role:
                if len(self._shoulders) < 2:
                    self._assign_shoulder(node)
                else:
                    self.role[node] = "tail"
            if self.role[node] == "tail":
                return [("s", 1 - e), ("t2", 1 + e)]
            return [("s", 1 - e), (self.bottom_of[node], e)]
        if node == "t2":
            tail_head = next(h for h in self.heads if self.role.get(h) == "tail")
            return [(tail_head, 1 + e)]
        if node in self.head_of_bottom:
            if len(self._shoulders) < 2:
                free = min(h for h in self.heads if h not in self.role)
                self._assign_shoulder(free)
            a, b = (self.bottom_of[self._shoulders[0]], self.bottom_of[self._shoulders[1]])
            partner = b if node == a else a
            return [(self.head_of_bottom[node], e), (partner, self.big)]
        raise BadParams(f"reveal of unknown node {node!r}")

    def finalize(self) -> WeightedGraph:
        # commit anything still open, deterministically
        while len(self._shoulders) < 2:
            free = min(h for h in self.heads if h not in self.role)
            self._assign_shoulder(free)
        unassigned = [h for h in self.heads if h not in self.role]
        tail_head = unassigned[0] if unassigned else next(
            h for h in self.heads if self.role[h] == "tail"
        )
        self.role.setdefault(tail_head, "tail")
        e = self.epsilon
        a, b = self._shoulders[0], self._shoulders[1]
        cycle_nodes = ("s", a, self.bottom_of[a], self.bottom_of[b], b)
        cycle_weights = (1 - e, e, self.big, e, 1 - e)
        tails = (Tail("s", (tail_head, "t2"), (1 - e, 1 + e)),)
        return WeightedGraph(cycle_nodes, cycle_weights, tails, "s")

    def weight_bound(self) -> Fraction:
        return self.big + 10


def make_energy_lb_adaptive(epsilon, big=DEFAULT_BIG) -> EnergyLowerBoundOracle:
    """Adaptive tadpole adversary forcing energy ratio toward 3/2."""
    return EnergyLowerBoundOracle(epsilon, big)
