"""Random instance generators for sweeps and property tests.

All sampling goes through a caller-supplied ``random.Random`` so sweeps are
reproducible from a single seed.  The default distribution keeps graphs small
enough for brute-force grading while still hitting both midpoint-on-node and
midpoint-on-edge cycle geometries: integer numerators up to 20 over
denominators up to 5 produce plenty of half-length collisions.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from random import Random

from .errors import BadParams, UnknownNode
from .graph import Node, WeightedGraph, build_cycle, build_n_tadpole


@dataclass(frozen=True)
class InstanceParams:
    """Bounds for the random distribution.

    Weights are a/b with a uniform in 1..max_numerator and b uniform in
    1..max_denominator.  Node counts refer to the cycle; each tail draws its
    edge count uniformly from 1..max_tail_edges.
    """

    min_cycle_nodes: int = 3
    max_cycle_nodes: int = 10
    max_tail_edges: int = 5
    max_numerator: int = 20
    max_denominator: int = 5

    def check(self) -> None:
        if self.min_cycle_nodes < 3 or self.max_cycle_nodes < self.min_cycle_nodes:
            raise BadParams("cycle node bounds must allow at least a triangle")
        if self.max_tail_edges < 1 or self.max_numerator < 1 or self.max_denominator < 1:
            raise BadParams("tail and weight bounds must be positive")


DEFAULT_PARAMS = InstanceParams()

# Shrunk variant for sweeps graded by the brute-force oracle, which caps out
# around 12 nodes.  A 6-node cycle plus a 5-edge tail stays within that.
SMALL_PARAMS = InstanceParams(max_cycle_nodes=6, max_tail_edges=5)


def random_weight(rng: Random, params: InstanceParams = DEFAULT_PARAMS) -> Fraction:
    return Fraction(
        rng.randint(1, params.max_numerator), rng.randint(1, params.max_denominator)
    )


def random_cycle(rng: Random, params: InstanceParams = DEFAULT_PARAMS) -> WeightedGraph:
    params.check()
    m = rng.randint(params.min_cycle_nodes, params.max_cycle_nodes)
    return build_cycle([random_weight(rng, params) for _ in range(m)])


def random_tadpole(rng: Random, params: InstanceParams = DEFAULT_PARAMS) -> WeightedGraph:
    return random_ntadpole(rng, 1, params)


def random_ntadpole(
    rng: Random, n_tails: int, params: InstanceParams = DEFAULT_PARAMS
) -> WeightedGraph:
    """Cycle with `n_tails` tails at random (possibly shared) attach nodes."""
    params.check()
    if n_tails < 0:
        raise BadParams("n_tails must be nonnegative")
    m = rng.randint(params.min_cycle_nodes, params.max_cycle_nodes)
    cycle = [random_weight(rng, params) for _ in range(m)]
    tails = []
    for _ in range(n_tails):
        attach = rng.randrange(m)
        j = rng.randint(1, params.max_tail_edges)
        tails.append((attach, [random_weight(rng, params) for _ in range(j)]))
    return build_n_tadpole(cycle, tails)


def with_start(g: WeightedGraph, node: Node) -> WeightedGraph:
    """Same graph, exploration starting from `node`."""
    if node not in g.adjacency:
        raise UnknownNode(node)
    return dataclasses.replace(g, start=node)
