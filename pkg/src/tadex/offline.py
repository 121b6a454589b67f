"""Offline optima: closed forms plus an exact brute-force oracle.

Offline cost is the makespan of a set of closed walks from the start that
together cover every node.  The closed forms here come with explicit plan
builders so each value is witnessed by a validated plan; the brute-force
solver is an independent check that enumerates partitions of the node set
and prices each block by a shortest covering closed walk.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import BadParams, TooLarge, WrongGraphClass
from .graph import (
    Edge,
    Node,
    WeightedGraph,
    cycle_geometry,
    distances_from,
    shortest_path,
)

BRUTE_CAP_ENV = "TADEX_BRUTE_CAP"
DEFAULT_BRUTE_CAP = 12
MAX_BRUTE_AGENTS = 4


# ---------------------------------------------------------------------------
# plans


def walk_length(g: WeightedGraph, walk: tuple[Node, ...]) -> Fraction:
    """Total weight of a node walk; every hop must be an edge of `g`."""
    weights = {}
    for e in g.edges:
        weights[(e.u, e.v)] = e.weight
        weights[(e.v, e.u)] = e.weight
    total = Fraction(0)
    for a, b in zip(walk, walk[1:]):
        if (a, b) not in weights:
            raise BadParams(f"walk uses nonexistent edge ({a!r}, {b!r})")
        total += weights[(a, b)]
    return total


@dataclass(frozen=True)
class OfflinePlan:
    """One closed walk per agent, each from the start back to the start."""

    walks: tuple[tuple[Node, ...], ...]
    lengths: tuple[Fraction, ...]
    makespan: Fraction

    @classmethod
    def from_walks(cls, g: WeightedGraph, walks) -> "OfflinePlan":
        ws = tuple(tuple(w) for w in walks)
        lengths = tuple(walk_length(g, w) for w in ws)
        plan = cls(ws, lengths, max(lengths, default=Fraction(0)))
        plan.validate(g)
        return plan

    def validate(self, g: WeightedGraph) -> None:
        if not self.walks:
            raise BadParams("plan needs at least one walk")
        covered: set[Node] = set()
        for walk, length in zip(self.walks, self.lengths):
            if not walk or walk[0] != g.start or walk[-1] != g.start:
                raise BadParams(f"walk must start and end at {g.start!r}: {walk!r}")
            if walk_length(g, walk) != length:
                raise BadParams("stored walk length disagrees with the graph")
            covered.update(walk)
        if covered != set(g.nodes):
            missing = set(g.nodes) - covered
            raise BadParams(f"plan misses nodes: {sorted(missing)!r}")
        if self.makespan != max(self.lengths):
            raise BadParams("makespan is not the maximum walk length")


# ---------------------------------------------------------------------------
# closed forms


def opt_cycle(g: WeightedGraph, k: int = 2) -> Fraction:
    """Optimal makespan on a cycle with k >= 2 agents.

    Two agents walk to the two midpoint flanks and back, skipping the mid
    edge; no plan beats twice the farthest shortest distance.
    """
    if g.graph_class != "cycle":
        raise WrongGraphClass(f"expected a cycle, got {g.graph_class}")
    if k < 2:
        raise BadParams("closed form needs at least two agents")
    return 2 * cycle_geometry(g).d_long


def eccentricity(g: WeightedGraph) -> Fraction:
    return max(distances_from(g, g.start).values())


def opt_arms(g: WeightedGraph) -> Fraction:
    """Optimal makespan with one agent per arm (two cycle arms plus the tails).

    Valid whenever k >= n_tails + 2.  The farthest node must be visited by
    somebody who then returns, so twice the eccentricity is a lower bound for
    every k; the arm plan achieves it.
    """
    return 2 * eccentricity(g)


def opt_tadpole_k3plus(g: WeightedGraph) -> Fraction:
    """Optimal makespan on a tadpole with k >= 3 agents."""
    if g.graph_class != "tadpole":
        raise WrongGraphClass(f"expected a tadpole, got {g.graph_class}")
    return opt_arms(g)


def opt_ntadpole_nplus2(g: WeightedGraph) -> Fraction:
    """Optimal makespan on an n-tadpole with k >= n + 2 agents."""
    return opt_arms(g)


def opt_single_agent_ntadpole(g: WeightedGraph) -> Fraction:
    """Optimal single closed walk covering an n-tadpole.

    Skipping the heaviest cycle edge pays for walking the remaining path
    twice; that wins exactly when the edge outweighs half the cycle.  Tails
    are always walked down and back.
    """
    geo = cycle_geometry(g)
    L = g.cycle_length
    tails_twice = 2 * g.tails_length
    if geo.e_max.weight > L / 2:
        return 2 * (L - geo.e_max.weight) + tails_twice
    return L + tails_twice


def two_agent_lower_bound(g: WeightedGraph) -> Fraction:
    """Half the doubled-path work: no 2-agent plan finishes faster than this."""
    return (g.cycle_length - cycle_geometry(g).e_max.weight) / 2 + g.tails_length / 2


# ---------------------------------------------------------------------------
# plan builders witnessing the closed forms


def _cycle_arm_walks(g: WeightedGraph, reference: Node) -> tuple[list[Node], list[Node]]:
    """Two out-and-back node walks from `reference` covering the whole cycle.

    The walks flank the cycle midpoint; neither crosses the mid edge, so the
    longer one traverses exactly 2 * d_long.
    """
    m = len(g.cycle_nodes)
    r = g.cycle_nodes.index(reference)
    L = g.cycle_length
    seq = [g.cycle_nodes[(r + i) % m] for i in range(m)]
    prefix = [Fraction(0)]
    for i in range(m):
        prefix.append(prefix[-1] + g.cycle_weights[(r + i) % m])
    j = max(i for i in range(m + 1) if prefix[i] <= L / 2)
    fwd = seq[: j + 1] if j < m else seq + [seq[0]]
    out_fwd = fwd + fwd[-2::-1]
    back_from = j if prefix[j] == L / 2 else j + 1
    rev = [seq[0]] + [seq[i] for i in range(m - 1, back_from - 1, -1)]
    out_rev = rev + rev[-2::-1]
    return out_fwd, out_rev


def plan_cycle(g: WeightedGraph) -> OfflinePlan:
    """Two-agent plan achieving opt_cycle."""
    if g.graph_class != "cycle":
        raise WrongGraphClass(f"expected a cycle, got {g.graph_class}")
    a, b = _cycle_arm_walks(g, g.start)
    return OfflinePlan.from_walks(g, [a, b])


def _splice(*segments: list[Node]) -> list[Node]:
    """Concatenate walk segments, collapsing duplicated junction nodes."""
    out: list[Node] = []
    for seg in segments:
        for v in seg:
            if not out or out[-1] != v:
                out.append(v)
    return out


def plan_arms(g: WeightedGraph) -> OfflinePlan:
    """Plan with one agent per arm achieving opt_arms; n_tails + 2 walks."""
    if not g.tails:
        return plan_cycle(g)
    if g.on_cycle(g.start):
        reference = g.start
        own_tail = None
    else:
        own_tail = g.tail_containing(g.start)
        reference = g.tails[own_tail].attach
    approach = shortest_path(g, g.start, reference)
    arm_a, arm_b = _cycle_arm_walks(g, reference)
    walks = [
        _splice(approach, arm_a, approach[::-1]),
        _splice(approach, arm_b, approach[::-1]),
    ]
    for ti, tail in enumerate(g.tails):
        if ti == own_tail:
            # walk the leaf side of the start's own tail; the cycle-side
            # segment is already covered by the two arm walks above
            pos = tail.nodes.index(g.start)
            down = [g.start] + list(tail.nodes[pos + 1 :])
            walks.append(down + down[-2::-1])
        else:
            to_leaf = shortest_path(g, g.start, tail.end)
            walks.append(to_leaf + to_leaf[-2::-1])
    return OfflinePlan.from_walks(g, walks)


def _tree_walk(g: WeightedGraph, skip: Edge) -> list[Node]:
    """Depth-first closed walk from the start over the graph minus `skip`."""
    adj: dict[Node, list[Node]] = {v: [] for v in g.nodes}
    for e in g.edges:
        if e is skip:
            continue
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    walk = [g.start]
    seen = {g.start}

    def visit(u: Node) -> None:
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                walk.append(v)
                visit(v)
                walk.append(u)

    visit(g.start)
    return walk


def plan_single_agent(g: WeightedGraph) -> OfflinePlan:
    """One-walk plan achieving opt_single_agent_ntadpole."""
    geo = cycle_geometry(g)
    if geo.e_max.weight > g.cycle_length / 2:
        return OfflinePlan.from_walks(g, [_tree_walk(g, geo.e_max)])

    # loop the cycle once, detouring down every tail at its attach node;
    # a start on a tail first clears its own leaf side, then walks up
    if g.on_cycle(g.start):
        own_tail = None
        reference = g.start
        walk: list[Node] = [g.start]
    else:
        own_tail = g.tail_containing(g.start)
        tail = g.tails[own_tail]
        reference = tail.attach
        pos = tail.nodes.index(g.start)
        # leaf side first, then climb to the attach node
        down = [g.start] + list(tail.nodes[pos + 1 :])
        walk = down + down[-2::-1]
        walk.extend(list(reversed(tail.nodes[:pos])) + [tail.attach])

    m = len(g.cycle_nodes)
    r = g.cycle_nodes.index(reference)
    for i in range(1, m + 1):
        node = g.cycle_nodes[(r + i) % m]
        here = g.cycle_nodes[(r + i - 1) % m]
        for ti, tail in enumerate(g.tails):
            if tail.attach == here and ti != own_tail:
                down = [here] + list(tail.nodes)
                walk.extend(down[1:] + down[-2::-1])
        walk.append(node)
    if own_tail is not None:
        back = shortest_path(g, reference, g.start)
        walk.extend(back[1:])
    return OfflinePlan.from_walks(g, [walk])


# ---------------------------------------------------------------------------
# brute force


def brute_cap() -> int:
    return int(os.environ.get(BRUTE_CAP_ENV, str(DEFAULT_BRUTE_CAP)))


def opt_bruteforce(g: WeightedGraph, k: int) -> OfflinePlan:
    """Exact minimum-makespan plan for k agents.

    Partitions the non-start nodes into at most k blocks (remaining agents
    stay home) and prices each block by its shortest covering closed walk,
    computed by subset dynamic programming over the shortest-path metric
    closure.  Revisits make the metric-closure substitution lossless.
    """
    cap = brute_cap()
    n = len(g.nodes)
    if n > cap:
        raise TooLarge(f"{n} nodes exceeds the brute-force cap of {cap}")
    if k < 1:
        raise BadParams("need at least one agent")
    if k > MAX_BRUTE_AGENTS:
        raise TooLarge(f"brute force handles at most {MAX_BRUTE_AGENTS} agents, got {k}")

    others = [v for v in g.nodes if v != g.start]
    nn = len(others)
    full = (1 << nn) - 1

    # integer-scaled metric closure; exact because distances are weight sums
    scale = lcm(*(w.denominator for w in g.cycle_weights), 1)
    for t in g.tails:
        scale = lcm(scale, *(w.denominator for w in t.weights))
    from_start = distances_from(g, g.start)
    d0 = [int(from_start[v] * scale) for v in others]
    dist = []
    for u in others:
        du = distances_from(g, u)
        dist.append([int(du[v] * scale) for v in others])

    inf = 1 << 62
    # best[mask][j]: shortest path from the start visiting exactly `mask`,
    # currently at others[j]
    best = [[inf] * nn for _ in range(full + 1)]
    parent = [[-1] * nn for _ in range(full + 1)]
    for j in range(nn):
        best[1 << j][j] = d0[j]
    for mask in range(1, full + 1):
        row = best[mask]
        for j in range(nn):
            if not (mask >> j) & 1:
                continue
            c = row[j]
            if c >= inf:
                continue
            dj = dist[j]
            for t in range(nn):
                if (mask >> t) & 1:
                    continue
                nm = mask | (1 << t)
                nc = c + dj[t]
                if nc < best[nm][t]:
                    best[nm][t] = nc
                    parent[nm][t] = j

    tour = [0] * (full + 1)
    tour_end = [-1] * (full + 1)
    for mask in range(1, full + 1):
        row = best[mask]
        bc, bj = inf, -1
        for j in range(nn):
            if (mask >> j) & 1:
                c = row[j] + d0[j]
                if c < bc:
                    bc, bj = c, j
        tour[mask] = bc
        tour_end[mask] = bj

    # min-max partition: dp[mask] over at most r blocks; the block holding
    # the lowest set bit is chosen explicitly, which canonicalizes partitions
    dp = tour[:]
    choices: list[list[int]] = []
    for _ in range(2, k + 1):
        ndp = [0] * (full + 1)
        ch = [0] * (full + 1)
        for mask in range(1, full + 1):
            low = mask & (-mask)
            bv, bt = tour[mask], mask
            sub = (mask - 1) & mask
            while sub:
                if sub & low:
                    v = tour[sub]
                    rest = dp[mask ^ sub]
                    if rest > v:
                        v = rest
                    if v < bv:
                        bv, bt = v, sub
                sub = (sub - 1) & mask
            ndp[mask] = bv
            ch[mask] = bt
        choices.append(ch)
        dp = ndp

    blocks: list[int] = []
    mask = full
    for ch in reversed(choices):
        if mask == 0:
            break
        t = ch[mask]
        blocks.append(t)
        mask ^= t
    if mask:
        blocks.append(mask)

    walks = []
    for block in blocks:
        order: list[int] = []
        j = tour_end[block]
        b = block
        while j >= 0:
            order.append(j)
            pj = parent[b][j]
            b ^= 1 << j
            j = pj
        order.reverse()
        walk = [g.start]
        for idx in order:
            walk.extend(shortest_path(g, walk[-1], others[idx])[1:])
        walk.extend(shortest_path(g, walk[-1], g.start)[1:])
        walks.append(walk)
    while len(walks) < k:
        walks.append([g.start])
    return OfflinePlan.from_walks(g, walks)
