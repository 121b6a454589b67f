"""Online exploration strategies for cycles, tadpoles, and n-tadpoles.

Every strategy is a StrategyPolicy descriptor whose fresh() returns a run
object driving agents through the engine view. Agents are grouped into
units (singletons, pairs, or larger teams) that move in lockstep; a unit
walks an "arm", meaning a maximal direction of exploration claimed at the
start node or at an intersection.

Movement disciplines:
  * token, lightest-edge: among units with a pending frontier edge, the one
    with the lightest next edge moves; weight ties are broken by the run's
    choice stream.
  * token, shortest-extension: the unit minimizing traversed distance plus
    next edge weight moves; ties go to the unit with the largest agent
    index.
  * parallel, longest-waits: every unit moves except a unique strict
    maximum (by traversed distance); that one waits until the others catch
    up.

The tadpole token strategies add: full-arm continuation (a unit keeps
walking through already-visited cycle nodes while its arc from the cycle
reference plus the next edge stays within half the cycle length),
synchronized retreat of cycle arms, relocation of reserve agents to newly
found intersections, and claiming of directions left unexplored at the
start node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .engine import (
    ChoiceStream,
    Command,
    EngineView,
    PolicyRun,
    Retreat,
    StrategyPolicy,
    Traverse,
    Wait,
)
from .errors import InsufficientAgents, WrongGraphClass
from .graph import Node

ALL_CLASSES = ("cycle", "tadpole", "ntadpole")

# next_hop is (destination, edge weight); reloc_path is the node sequence
# still to walk toward a claimed intersection.
Hop = tuple[Node, Fraction]


@dataclass
class _Unit:
    uid: int
    members: tuple[int, ...]
    at: Node
    prev: Optional[Node] = None
    state: str = "explore"  # explore | sync | relocate | return | home | idle | gone
    next_hop: Optional[Hop] = None
    reloc_path: list[Node] = field(default_factory=list)
    reloc_arm: Optional[tuple[Node, Node]] = None
    # claimants walk a single arm on their own; the ride up to the cycle
    # midpoint is reserved for the units paired off at dispatch
    lone: bool = False
    # odometer offset: a unit reborn on a leftover arm competes for the
    # token with a fresh distance count, not its lifetime total
    base: Fraction = Fraction(0)

    @property
    def lead(self) -> int:
        return self.members[0]


@dataclass(frozen=True)
class _RunConfig:
    movement: str  # "amp" | "ale" | "maxwait"
    dispatch: str  # "cycle_random" | "cycle_fixed" | "amp2" | "reserve" | "ale4" | "teams"
    branch: str  # "choice_leftover" | "first_reserve" | "split"
    continuation: bool
    sync_cycle: bool
    freeze_reloc: bool


class _WalkRun:
    """Shared unit state machine; behaviour switches live in _RunConfig."""

    def __init__(self, k: int, stream: ChoiceStream, cfg: _RunConfig):
        self.k = k
        self.stream = stream
        self.cfg = cfg
        self.units: list[_Unit] = []
        self.reserve_pool: list[_Unit] = []
        self.leftovers: list[tuple[Node, Node]] = []
        self.assigned: set[tuple[Node, Node]] = set()
        self._next_uid = 0
        self._setup = False
        self._ref: Optional[Node] = None

    # -- unit bookkeeping ---------------------------------------------------

    def _new_unit(
        self,
        members: Sequence[int],
        at: Node,
        state: str = "explore",
        next_hop: Optional[Hop] = None,
        prev: Optional[Node] = None,
    ) -> _Unit:
        u = _Unit(
            uid=self._next_uid,
            members=tuple(sorted(members)),
            at=at,
            prev=prev,
            state=state,
            next_hop=next_hop,
        )
        self._next_uid += 1
        self.units.append(u)
        return u

    def _take(self, unit: _Unit, hop: Hop) -> None:
        unit.next_hop = hop
        self.assigned.add((unit.at, hop[0]))

    # -- dispatch at the start node ------------------------------------------

    def _dispatch(self, view: EngineView) -> None:
        s = view.start
        dirs = list(view.known_neighbors(s))
        mode = self.cfg.dispatch
        if mode in ("cycle_random", "cycle_fixed"):
            if mode == "cycle_random" and self.stream.choice(2) == 1:
                dirs.reverse()
            for a in (0, 1):
                self._take(self._new_unit((a,), s), dirs[a])
            spare = range(2, self.k)
        elif mode == "amp2":
            if len(dirs) == 1:
                self._take(self._new_unit((0, 1), s), dirs[0])
                spare = range(2, self.k)
            elif len(dirs) == 2:
                for a in (0, 1):
                    self._take(self._new_unit((a,), s), dirs[a])
                spare = range(2, self.k)
            else:
                drop = self.stream.choice(len(dirs))
                kept = [d for i, d in enumerate(dirs) if i != drop]
                for a in (0, 1):
                    self._take(self._new_unit((a,), s), kept[a])
                self.leftovers.append((s, dirs[drop][0]))
                spare = range(2, self.k)
            for a in spare:
                self._new_unit((a,), s, state="idle")
            return
        elif mode == "reserve":
            if len(dirs) == 1:
                if self.k < 2:
                    raise InsufficientAgents(
                        "two agents are needed to walk out of a degree-1 start"
                    )
                self._take(self._new_unit((0, 1), s), dirs[0])
                first_spare = 2
            else:
                if self.k < len(dirs):
                    raise InsufficientAgents(
                        f"start node has {len(dirs)} directions but only {self.k} agents"
                    )
                for a, d in enumerate(dirs):
                    self._take(self._new_unit((a,), s), d)
                first_spare = len(dirs)
            for a in range(first_spare, self.k):
                self.reserve_pool.append(self._new_unit((a,), s, state="idle"))
            return
        elif mode == "ale4":
            if len(dirs) == 2:
                self._take(self._new_unit((0, 1), s), dirs[0])
                self._take(self._new_unit((2, 3), s), dirs[1])
                spare = range(4, self.k)
            elif len(dirs) == 1:
                self._take(self._new_unit((0, 1), s), dirs[0])
                spare = range(2, self.k)
            else:
                for a, d in enumerate(dirs):
                    self._take(self._new_unit((a,), s), d)
                spare = range(len(dirs), self.k)
        elif mode == "teams":
            size = self.k // len(dirs)
            if size == 0:
                raise InsufficientAgents(
                    f"cannot split {self.k} agents over {len(dirs)} directions"
                )
            for i, d in enumerate(dirs):
                self._take(
                    self._new_unit(range(i * size, (i + 1) * size), s), d
                )
            spare = range(size * len(dirs), self.k)
        else:  # pragma: no cover
            raise AssertionError(mode)
        for a in spare:
            self._new_unit((a,), s, state="idle")

    # -- intersection handling ------------------------------------------------

    def _branch(self, view: EngineView, unit: _Unit, opts: list[Hop]) -> None:
        mode = self.cfg.branch
        if mode == "split":
            self._split_team(unit, opts)
            return
        if len(unit.members) >= 2:
            # a pair that walked in from a tail splits one agent per direction
            self._split_team(unit, opts[:2])
            extras = opts[2:]
        elif mode == "choice_leftover":
            pick = self.stream.choice(len(opts))
            self._take(unit, opts[pick])
            extras = [o for i, o in enumerate(opts) if i != pick]
        else:
            self._take(unit, opts[0])
            extras = opts[1:]
        if mode == "choice_leftover":
            for nbr, _ in extras:
                self.leftovers.append((unit.at, nbr))
        else:
            self._send_reserves(view, unit.at, extras)

    def _split_team(self, unit: _Unit, opts: list[Hop]) -> None:
        m = len(unit.members)
        size = m // len(opts)
        if size == 0:
            raise InsufficientAgents(
                f"team of {m} cannot cover {len(opts)} directions"
            )
        sizes = [size] * len(opts)
        sizes[0] += m - size * len(opts)
        pos = 0
        for take, hop in zip(sizes, opts):
            sub = self._new_unit(
                unit.members[pos : pos + take], unit.at, prev=unit.prev
            )
            self._take(sub, hop)
            pos += take
        unit.state = "gone"

    def _send_reserves(
        self, view: EngineView, node: Node, extras: list[Hop]
    ) -> None:
        for nbr, w in extras:
            if not self.reserve_pool:
                raise InsufficientAgents(
                    "no reserve agent left for a direction at " + node
                )
            r = self.reserve_pool.pop(0)
            self.assigned.add((node, nbr))
            if r.at == node:
                r.state = "explore"
                r.next_hop = (nbr, w)
                continue
            r.state = "relocate"
            r.reloc_arm = (node, nbr)
            r.reloc_path = view.shortest_known(r.at, node)[1][1:]

    # -- per-arrival resolution -------------------------------------------

    def _resolve(self, view: EngineView, unit: _Unit) -> None:
        opts = [
            (nbr, w)
            for nbr, w in view.unexplored_out(unit.at)
            if (unit.at, nbr) not in self.assigned
        ]
        if len(opts) >= 2:
            self._branch(view, unit, opts)
            return
        if len(opts) == 1:
            self._take(unit, opts[0])
            return
        step = (
            self._ring_continue(view, unit)
            if self.cfg.continuation and not unit.lone
            else None
        )
        if step is not None:
            unit.next_hop = step
            return
        unit.next_hop = None
        if len(view.known_neighbors(unit.at)) == 1:
            unit.state = "return"  # tail end: retreat without waiting
        elif self.cfg.sync_cycle:
            unit.state = "sync"
        else:
            unit.state = "return"

    def _cycle_reference(self, view: EngineView, ring: tuple[Node, ...]) -> Node:
        if self._ref is not None and self._ref in ring:
            return self._ref
        if view.start in ring:
            self._ref = view.start
        else:
            dist = view.known_distances(view.start)
            self._ref = min(ring, key=lambda v: (dist[v], v))
        return self._ref

    def _ring_continue(self, view: EngineView, unit: _Unit) -> Optional[Hop]:
        found = view.known_cycle()
        if found is None or unit.prev is None:
            return None
        ring, length = found
        if unit.at not in ring:
            return None
        ref = self._cycle_reference(view, ring)
        if unit.at == ref:
            return None  # came full circle
        n = len(ring)
        i = ring.index(unit.at)
        if unit.prev == ring[(i - 1) % n]:
            step = 1
        elif unit.prev == ring[(i + 1) % n]:
            step = -1
        else:
            return None  # entered sideways through a tail
        nxt = ring[(i + step) % n]
        w = view.known_weight(unit.at, nxt)
        arc = Fraction(0)
        j = ring.index(ref)
        while ring[j] != unit.at:
            j2 = (j + step) % n
            arc += view.known_weight(ring[j], ring[j2])
            j = j2
        if arc + w <= length / 2:
            return (nxt, w)
        return None

    # -- movement ------------------------------------------------------------

    def _token_mover(self, view: EngineView) -> list[_Unit]:
        explorers = [u for u in self.units if u.state == "explore"]
        if any(view.in_transit(u.lead) for u in explorers):
            return []
        ready = [u for u in explorers if u.next_hop is not None]
        if not ready:
            return []
        if self.cfg.movement == "amp":
            def cand(u: _Unit) -> Fraction:
                return view.distance(u.lead) - u.base + u.next_hop[1]

            best = min(cand(u) for u in ready)
            pending = self._pending_claim_bound(view)
            if pending is not None and pending < best:
                # a freed agent will restart on the leftover branch with a
                # fresh count and outrank every current walker's next step;
                # hold the token for it
                return []
            tied = [u for u in ready if cand(u) == best]
            return [max(tied, key=lambda u: u.lead)]
        best = min(u.next_hop[1] for u in ready)
        tied = [u for u in ready if u.next_hop[1] == best]
        return [tied[self.stream.choice(len(tied))]]

    def _pending_claim_bound(self, view: EngineView) -> Optional[Fraction]:
        """Cheapest prospective total for leftover work that is not walking
        yet: an unclaimed branch once a freed unit picks it up, or the first
        edge of a claimed branch whose claimant is still relocating.

        Priced in the prospective claimant's lifetime frame, so a branch
        far from every freed unit does not stall a walker that can finish
        its own side first.
        """
        best: Optional[Fraction] = None
        fallbacks = [u for u in self.units if u.state in ("return", "home")]
        for node, first in self.leftovers:
            if view.is_visited(first) or (node, first) in self.assigned:
                continue
            w = view.known_weight(node, first)
            approach = view.shortest_known(view.start, node)[0] + w
            for u in fallbacks:
                p = (
                    view.distance(u.lead)
                    + view.shortest_known(u.at, view.start)[0]
                    + approach
                )
                if best is None or p < best:
                    best = p
        for u in self.units:
            if u.state == "relocate" and u.reloc_arm is not None:
                node, first = u.reloc_arm
                if view.is_visited(first):
                    continue
                p = (
                    view.distance(u.lead)
                    + view.shortest_known(u.at, node)[0]
                    + view.known_weight(node, first)
                )
                if best is None or p < best:
                    best = p
        return best

    def _maxwait_movers(
        self, view: EngineView
    ) -> tuple[list[_Unit], list[_Unit]]:
        explorers = [u for u in self.units if u.state == "explore"]
        measure: dict[int, Fraction] = {}
        idle_ready = []
        for u in explorers:
            # traversed distance after the edge in progress or up next
            d = view.distance(u.lead)
            measure[u.uid] = d + (u.next_hop[1] if u.next_hop else Fraction(0))
            if not view.in_transit(u.lead) and u.next_hop is not None:
                idle_ready.append(u)
        movers, waiters = [], []
        for u in idle_ready:
            rest = [measure[v.uid] for v in explorers if v is not u]
            if rest and measure[u.uid] > max(rest):
                # taking the next edge would put it strictly ahead of all
                # other walkers, so it holds until someone catches up
                waiters.append(u)
            else:
                movers.append(u)
        return movers, waiters

    # -- the decision round ----------------------------------------------

    def decide(self, view: EngineView) -> dict[int, Command]:
        if not self._setup:
            self._setup = True
            self._dispatch(view)
        arrived: set[int] = set()
        for u in self.units:
            if u.state in ("home", "idle", "gone"):
                continue
            if view.in_transit(u.lead):
                continue
            p = view.position(u.lead)
            if p != u.at:
                u.prev, u.at = u.at, p
                arrived.add(u.uid)
        for u in self.units:
            # flip before claims so a finished walker can pick up leftovers
            if (
                u.state == "return"
                and u.at == view.start
                and not view.in_transit(u.lead)
            ):
                u.state = "home"

        if not view.has_frontier():
            # Nothing left to discover.  Walkers under a full-arm config may
            # still owe ring edges up to the midpoint; everyone else goes home.
            for u in self.units:
                if u.state == "relocate" or (
                    u.state == "explore" and not self.cfg.continuation
                ):
                    u.state = "return"
                    u.next_hop = None
                    u.reloc_path = []
                elif u.state == "explore" and not view.in_transit(u.lead):
                    if (
                        u.uid in arrived
                        or u.next_hop is None
                        or view.is_visited(u.next_hop[0])
                    ):
                        self._resolve(view, u)
            for u in self.units:
                if u.state == "sync" and not any(
                    v is not u and v.state == "explore" for v in self.units
                ):
                    u.state = "return"
            self.leftovers.clear()
        else:
            for u in list(self.units):
                if view.in_transit(u.lead):
                    continue
                if u.state == "relocate":
                    if u.reloc_path and u.at == u.reloc_path[0]:
                        u.reloc_path.pop(0)
                    if not u.reloc_path:
                        node, first = u.reloc_arm
                        u.state = "explore"
                        u.reloc_arm = None
                        if u.lone:
                            # reborn walker: its count restarts on the new arm
                            u.base = view.distance(u.lead)
                        if not view.is_visited(first):
                            u.next_hop = (first, view.known_weight(node, first))
                        else:
                            self.assigned.discard((node, first))
                            self._resolve(view, u)
                elif u.state == "explore":
                    if u.uid in arrived or u.next_hop is None:
                        self._resolve(view, u)
                    elif view.is_visited(u.next_hop[0]):
                        self._resolve(view, u)
            for u in self.units:
                if u.state == "sync" and not any(
                    v is not u and v.state == "explore" for v in self.units
                ):
                    u.state = "return"
            if self.leftovers:
                self._run_claims(view)

        self.units = [u for u in self.units if u.state != "gone"]

        cmds: dict[int, Command] = {}
        needs = set(view.needs_command)
        for u in self.units:
            if u.state == "return" and all(m in needs for m in u.members):
                for m in u.members:
                    cmds[m] = Retreat()
            elif u.state == "relocate" and u.reloc_path and all(
                m in needs for m in u.members
            ):
                for m in u.members:
                    cmds[m] = Traverse(u.reloc_path[0])
        frozen = self.cfg.freeze_reloc and any(
            u.state == "relocate" for u in self.units
        )
        if not frozen:
            if self.cfg.movement == "maxwait":
                movers, waiters = self._maxwait_movers(view)
            else:
                movers, waiters = self._token_mover(view), []
            for u in movers:
                for m in u.members:
                    cmds[m] = Traverse(u.next_hop[0])
            for u in waiters:
                for m in u.members:
                    cmds[m] = Wait()
        return cmds

    def _run_claims(self, view: EngineView) -> None:
        claimants = sorted(
            (u for u in self.units if u.state == "home"),
            key=lambda u: (view.distance(u.lead), u.lead),
        )
        for item in list(self.leftovers):
            node, first = item
            if view.is_visited(first) or (node, first) in self.assigned:
                self.leftovers.remove(item)
                continue
            if not claimants:
                break
            u = claimants.pop(0)
            self.leftovers.remove(item)
            self.assigned.add((node, first))
            u.lone = True
            if u.at == node:
                u.state = "explore"
                u.prev = None
                u.base = view.distance(u.lead)
                u.next_hop = (first, view.known_weight(node, first))
            else:
                u.state = "relocate"
                u.reloc_arm = (node, first)
                u.reloc_path = view.shortest_known(u.at, node)[1][1:]


# ---------------------------------------------------------------------------
# policy descriptors


class _WalkPolicy(StrategyPolicy):
    def __init__(
        self,
        name: str,
        classes: tuple[str, ...],
        min_agents: int,
        cfg: _RunConfig,
    ):
        self.name = name
        self.classes = classes
        self.min_agents = min_agents
        self.cfg = cfg

    def check(self, graph_class: str, k: int) -> None:
        if graph_class not in self.classes:
            raise WrongGraphClass(
                f"{self.name} runs on {'/'.join(self.classes)} graphs, got {graph_class}"
            )
        if k < self.min_agents:
            raise InsufficientAgents(
                f"{self.name} needs at least {self.min_agents} agents, got {k}"
            )

    def fresh(self, k: int, stream: ChoiceStream) -> PolicyRun:
        return _WalkRun(k, stream, self.cfg)


def ale_cycle_policy() -> StrategyPolicy:
    """Two agents around a cycle, always extending the lightest frontier edge."""
    return _WalkPolicy(
        "ale",
        ("cycle",),
        2,
        _RunConfig("ale", "cycle_fixed", "first_reserve", False, False, False),
    )


def amp_cycle_policy() -> StrategyPolicy:
    """Two agents around a cycle, always moving the one whose position plus
    next edge gives the shortest total extension."""
    return _WalkPolicy(
        "amp",
        ("cycle",),
        2,
        _RunConfig("amp", "cycle_random", "first_reserve", False, False, False),
    )


def ale_tadpole_policy(variant: int = 3) -> StrategyPolicy:
    """Lightest-edge exploration adapted to tadpoles.

    variant 3 keeps one reserve agent at the start and walks it to the
    intersection when a third direction shows up; variant 4 sends two pairs
    that split on arrival at the intersection.
    """
    if variant == 3:
        return _WalkPolicy(
            "ale-tad3",
            ("tadpole",),
            3,
            _RunConfig("ale", "reserve", "first_reserve", False, False, True),
        )
    if variant == 4:
        return _WalkPolicy(
            "ale-tad4",
            ("tadpole",),
            4,
            _RunConfig("ale", "ale4", "split", False, False, False),
        )
    raise ValueError("variant must be 3 or 4")


def amp_tadpole2_policy() -> StrategyPolicy:
    """Two agents on a tadpole; directions that cannot be covered right away
    are parked at their node and claimed by whichever agent returns first."""
    return _WalkPolicy(
        "amp-tad2",
        ("tadpole",),
        2,
        _RunConfig("amp", "amp2", "choice_leftover", True, True, False),
    )


def amp_tadpole3_policy() -> StrategyPolicy:
    """Three agents on a tadpole; a reserve walks out to the intersection
    while the other agents hold position."""
    return _WalkPolicy(
        "amp-tad3",
        ("tadpole",),
        3,
        _RunConfig("amp", "reserve", "first_reserve", True, True, True),
    )


def amp_tadpole4_policy() -> StrategyPolicy:
    """Four agents on a tadpole exploring all directions in parallel."""
    return _WalkPolicy(
        "amp-tad4",
        ("tadpole",),
        4,
        _RunConfig("maxwait", "teams", "split", False, False, False),
    )


def ntad_nplus2_policy() -> StrategyPolicy:
    """One agent per direction plus reserves, on any number of tails."""
    return _WalkPolicy(
        "ntad-n2",
        ALL_CLASSES,
        2,
        _RunConfig("amp", "reserve", "first_reserve", True, True, True),
    )


def ntad_exp_policy() -> StrategyPolicy:
    """Teams that halve at every intersection, exploring fully in parallel."""
    return _WalkPolicy(
        "ntad-exp",
        ALL_CLASSES,
        1,
        _RunConfig("maxwait", "teams", "split", False, False, False),
    )


# ---------------------------------------------------------------------------
# offline replay


class _ReplayRun:
    def __init__(self, walks: Sequence[Sequence[Node]]):
        self.rem = [list(w) for w in walks]
        self._started = False

    def decide(self, view: EngineView) -> dict[int, Command]:
        if not self._started:
            self._started = True
            for seq in self.rem:
                if seq and seq[0] == view.start:
                    seq.pop(0)
        cmds: dict[int, Command] = {}
        needs = set(view.needs_command)
        for a, seq in enumerate(self.rem):
            if not seq or a not in needs:
                continue
            if view.position(a) == seq[0]:
                seq.pop(0)
            if seq:
                cmds[a] = Traverse(seq[0])
        return cmds


class ReplayPolicy(StrategyPolicy):
    """Drives agents along fixed closed walks, for replaying offline plans."""

    name = "replay"

    def __init__(self, walks: Sequence[Sequence[Node]]):
        self.walks = [list(w) for w in walks]

    def check(self, graph_class: str, k: int) -> None:
        if k < len(self.walks):
            raise InsufficientAgents(
                f"plan has {len(self.walks)} walks but only {k} agents"
            )

    def fresh(self, k: int, stream: ChoiceStream) -> PolicyRun:
        return _ReplayRun(self.walks)


def replay_policy(walks: Sequence[Sequence[Node]]) -> StrategyPolicy:
    return ReplayPolicy(walks)


STRATEGIES = {
    "ale": ale_cycle_policy,
    "amp": amp_cycle_policy,
    "ale-tad3": lambda: ale_tadpole_policy(3),
    "ale-tad4": lambda: ale_tadpole_policy(4),
    "amp-tad2": amp_tadpole2_policy,
    "amp-tad3": amp_tadpole3_policy,
    "amp-tad4": amp_tadpole4_policy,
    "ntad-n2": ntad_nplus2_policy,
    "ntad-exp": ntad_exp_policy,
}
