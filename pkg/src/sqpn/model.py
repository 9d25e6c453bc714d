"""Network data model, structural validation, and link-activity queries.

A network is an acyclic digraph over binary variables (true > false).  Each
node either carries a full conditional probability table (or a prior, for
roots) or has a qualitative sign on every incoming arc -- never a mixture.
Product-synergy declarations attach intercausal signs to parent pairs of a
node for a given observed value.

Networks are immutable after construction; every operation here is a pure
query, so one network can safely be shared across concurrent readers.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .algebra import Sign

NODE_ID_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

ParentConfig = tuple  # tuple of bools, one per parent, in canonical parent order


class SqpnError(Exception):
    """Base error for domain failures."""


def check_node_id(name: str) -> str:
    if not NODE_ID_RE.match(name or ""):
        raise SqpnError(
            f"invalid node id {name!r}: must be letters/digits/underscore, starting with a letter"
        )
    return name


def enumerate_configs(n_parents: int) -> list[ParentConfig]:
    """All parent configurations in ascending binary order (false=0, true=1)."""
    return [
        tuple(bool(b) for b in bits)
        for bits in itertools.product((False, True), repeat=n_parents)
    ]


@dataclass(frozen=True)
class Cpt:
    """Pr(node=true | parents), total over all 2^k parent configurations.

    ``parents`` is the canonical (NodeId-ascending) parent order and every
    config key is a bool tuple aligned with it.
    """

    parents: tuple[str, ...]
    entries: Mapping[ParentConfig, float]

    def __post_init__(self) -> None:
        if tuple(sorted(self.parents)) != self.parents:
            raise SqpnError(f"cpt parents not in canonical order: {self.parents}")
        object.__setattr__(self, "entries", dict(self.entries))

    def probability(self, config: ParentConfig) -> float:
        return self.entries[tuple(config)]


@dataclass(frozen=True)
class Node:
    id: str
    prior: Optional[float] = None
    cpt: Optional[Cpt] = None

    @property
    def quantified(self) -> bool:
        return self.prior is not None or self.cpt is not None


@dataclass(frozen=True)
class Arc:
    parent: str
    child: str
    sign: Optional[Sign] = None


@dataclass(frozen=True)
class SynergyDecl:
    """Intercausal sign for a parent pair of ``child`` when ``child`` is observed."""

    child: str
    observed_value: bool
    pair: tuple[str, str]
    sign: Sign

    def __post_init__(self) -> None:
        a, b = self.pair
        object.__setattr__(self, "pair", (min(a, b), max(a, b)))


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.subject}]: {self.message}"


class SqpnNetwork:
    """Immutable semi-qualitative network: nodes, arcs, synergy declarations."""

    def __init__(
        self,
        nodes: Iterable[Node],
        arcs: Iterable[Arc] = (),
        synergies: Iterable[SynergyDecl] = (),
    ) -> None:
        self.nodes: dict[str, Node] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise SqpnError(f"duplicate node {node.id}")
            self.nodes[node.id] = node
        self.arcs: dict[tuple[str, str], Arc] = {}
        for arc in arcs:
            key = (arc.parent, arc.child)
            if key in self.arcs:
                raise SqpnError(f"duplicate arc {arc.parent} -> {arc.child}")
            self.arcs[key] = arc
        self.synergies: tuple[SynergyDecl, ...] = tuple(synergies)
        self._parents: dict[str, tuple[str, ...]] = {n: () for n in self.nodes}
        self._children: dict[str, tuple[str, ...]] = {n: () for n in self.nodes}
        parents: dict[str, list[str]] = {n: [] for n in self.nodes}
        children: dict[str, list[str]] = {n: [] for n in self.nodes}
        for parent, child in self.arcs:
            if parent in parents and child in parents:
                parents[child].append(parent)
                children[parent].append(child)
        for name in self.nodes:
            self._parents[name] = tuple(sorted(parents[name]))
            self._children[name] = tuple(sorted(children[name]))

    def parents_of(self, node: str) -> tuple[str, ...]:
        return self._parents[node]

    def children_of(self, node: str) -> tuple[str, ...]:
        return self._children[node]

    def node(self, name: str) -> Node:
        try:
            return self.nodes[name]
        except KeyError:
            raise SqpnError(f"unknown node {name}") from None

    def arc(self, parent: str, child: str) -> Arc:
        try:
            return self.arcs[(parent, child)]
        except KeyError:
            raise SqpnError(f"unknown arc {parent} -> {child}") from None

    def synergy_sign(self, child: str, observed_value: bool, pair: Sequence[str]) -> Sign:
        """Declared intercausal sign for a parent pair, '?' when undeclared."""
        a, b = sorted(pair)
        for decl in self.synergies:
            if decl.child == child and decl.observed_value == observed_value and decl.pair == (a, b):
                return decl.sign
        return Sign.AMBIGUOUS


Evidence = Mapping[str, bool]


def check_evidence(network: SqpnNetwork, evidence: Evidence) -> dict[str, bool]:
    out = {}
    for name, value in evidence.items():
        if name not in network.nodes:
            raise SqpnError(f"evidence for unknown node {name}")
        out[name] = bool(value)
    return out


def _find_cycle(network: SqpnNetwork) -> Optional[list[str]]:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in network.nodes}
    stack: list[str] = []

    def visit(node: str) -> Optional[list[str]]:
        color[node] = GRAY
        stack.append(node)
        for child in network.children_of(node):
            if color[child] == GRAY:
                return stack[stack.index(child):] + [child]
            if color[child] == WHITE:
                found = visit(child)
                if found:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for name in sorted(network.nodes):
        if color[name] == WHITE:
            found = visit(name)
            if found:
                return found
    return None


def validate(network: SqpnNetwork) -> list[Violation]:
    """Structural validation; the returned report is empty iff the network is valid."""
    report: list[Violation] = []

    for name, node in network.nodes.items():
        if not NODE_ID_RE.match(name):
            report.append(Violation("bad-id", name, "node id violates the token grammar"))
        if node.prior is not None and node.cpt is not None:
            report.append(Violation("prior-and-cpt", name, "node has both a prior and a cpt"))
        if node.prior is not None and not (0.0 <= node.prior <= 1.0):
            report.append(Violation("bad-probability", name, f"prior {node.prior} outside [0, 1]"))

    for (parent, child), _arc in network.arcs.items():
        if parent == child:
            report.append(Violation("self-loop", f"{parent}->{child}", "arc endpoints coincide"))
        for end in (parent, child):
            if end not in network.nodes:
                report.append(Violation("unknown-node", f"{parent}->{child}", f"arc references unknown node {end}"))

    cycle = _find_cycle(network)
    if cycle:
        report.append(Violation("cycle", " -> ".join(cycle), "digraph contains a directed cycle"))

    for name, node in network.nodes.items():
        parents = network.parents_of(name)
        incoming = [network.arcs[(p, name)] for p in parents]
        if node.cpt is not None:
            if tuple(sorted(parents)) != node.cpt.parents:
                report.append(Violation(
                    "cpt-parent-mismatch", name,
                    f"cpt parents {list(node.cpt.parents)} != graph parents {list(parents)}",
                ))
            else:
                expected = enumerate_configs(len(parents))
                missing = [c for c in expected if c not in node.cpt.entries]
                extra = [c for c in node.cpt.entries if c not in set(expected)]
                if missing or extra:
                    report.append(Violation(
                        "incomplete-cpt", name,
                        f"cpt must cover exactly the {len(expected)} parent configurations",
                    ))
                for config, p in node.cpt.entries.items():
                    if not (0.0 <= p <= 1.0):
                        report.append(Violation("bad-probability", name, f"cpt entry {p} outside [0, 1]"))
            for arc in incoming:
                if arc.sign is not None:
                    report.append(Violation(
                        "sign-on-quantified", f"{arc.parent}->{name}",
                        "arc carries a sign but the child has a cpt",
                    ))
        else:
            for arc in incoming:
                if arc.sign is None:
                    report.append(Violation(
                        "missing-sign", f"{arc.parent}->{name}",
                        "child has no cpt, so every incoming arc needs a sign",
                    ))

    for decl in network.synergies:
        if decl.child not in network.nodes:
            report.append(Violation("unknown-node", decl.child, "synergy references unknown child"))
            continue
        parents = set(network.parents_of(decl.child))
        for p in decl.pair:
            if p not in parents:
                report.append(Violation(
                    "bad-synergy", decl.child,
                    f"synergy parent {p} is not a predecessor of {decl.child}",
                ))

    return report


def require_valid(network: SqpnNetwork) -> None:
    report = validate(network)
    if report:
        raise SqpnError("invalid network: " + "; ".join(str(v) for v in report))


def topo_order(network: SqpnNetwork) -> list[str]:
    """Topological order, ties broken by NodeId ascending."""
    indegree = {n: len(network.parents_of(n)) for n in network.nodes}
    ready = [n for n, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for child in network.children_of(node):
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(ready, child)
    if len(order) != len(network.nodes):
        raise SqpnError("cycle detected in network")
    return order


# --- link activity ---------------------------------------------------------
#
# Messages travel over directed links: each arc both ways, plus intercausal
# links between parents of an evidence node (the opened converging
# connection, labelled by the matching synergy sign).  Links into evidence
# nodes are never usable, which is what blocks serial and diverging chains
# through evidence.  A converging connection at an unobserved node stays
# closed: a message that arrived from a parent may not leave towards another
# parent.  That pairwise rule is captured by the FROM_PARENT/FROM_CHILD roles
# below and shared with the propagation algorithms.

FORWARD = "forward"
REVERSE = "reverse"
INTERCAUSAL = "intercausal"

ORIGIN = "origin"
FROM_PARENT = "from-parent"
FROM_CHILD = "from-child"


@dataclass(frozen=True)
class Link:
    source: str
    target: str
    kind: str
    via: Optional[str] = None  # evidence child inducing an intercausal link
    sign: Optional[Sign] = None  # intercausal label (declared or '?')

    def sort_key(self) -> tuple:
        return (self.target, self.kind, self.via or "")


def arrival_role(link: Link) -> str:
    """Role a message has at ``link.target`` after traversing ``link``."""
    return FROM_PARENT if link.kind == FORWARD else FROM_CHILD


def traversal_allowed(role: str, link: Link) -> bool:
    """May a message that reached ``link.source`` with ``role`` leave over ``link``?

    The only forbidden step is parent-to-parent through an unobserved node
    (a closed converging connection): arriving from a parent rules out
    reverse links.  Evidence nodes never relay (they receive no messages);
    their converging connections are opened by the intercausal links instead.
    """
    if role == ORIGIN or role == FROM_CHILD:
        return True
    return link.kind != REVERSE


@dataclass
class ActiveLinks:
    """Usable directed links for a given evidence set."""

    links: list[Link]
    _by_source: dict[str, list[Link]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        by_source: dict[str, list[Link]] = {}
        for link in self.links:
            by_source.setdefault(link.source, []).append(link)
        for source in by_source:
            by_source[source].sort(key=Link.sort_key)
        self._by_source = by_source

    def links_from(self, source: str) -> list[Link]:
        return self._by_source.get(source, [])

    def as_set(self) -> set[tuple[str, str, str, Optional[str]]]:
        return {(l.source, l.target, l.kind, l.via) for l in self.links}

    def reachable_from(self, origin: str) -> set[str]:
        """Nodes reachable from ``origin`` over active simple paths.

        Depth-first search with a per-path trail, mirroring the propagation
        algorithms: a path never revisits a node, and each step obeys
        ``traversal_allowed``.
        """
        reached: set[str] = set()

        def walk(node: str, role: str, trail: frozenset) -> None:
            for link in self.links_from(node):
                if link.target in trail or not traversal_allowed(role, link):
                    continue
                reached.add(link.target)
                walk(link.target, arrival_role(link), trail | {link.target})

        walk(origin, ORIGIN, frozenset({origin}))
        return reached


def active_links(network: SqpnNetwork, evidence: Evidence) -> ActiveLinks:
    """All usable directed links given the evidence.

    With empty evidence this is exactly both directions of every arc.  Each
    evidence node additionally induces intercausal links between every pair
    of its parents, labelled with the declared synergy sign ('?' when
    undeclared).
    """
    ev = check_evidence(network, evidence)
    links: list[Link] = []
    for (parent, child), _arc in network.arcs.items():
        if child not in ev:
            links.append(Link(parent, child, FORWARD))
        if parent not in ev:
            links.append(Link(child, parent, REVERSE))
    for name, value in ev.items():
        parents = network.parents_of(name)
        for a, b in itertools.combinations(parents, 2):
            sign = network.synergy_sign(name, value, (a, b))
            if b not in ev:
                links.append(Link(a, b, INTERCAUSAL, via=name, sign=sign))
            if a not in ev:
                links.append(Link(b, a, INTERCAUSAL, via=name, sign=sign))
    links.sort(key=lambda l: (l.source,) + l.sort_key())
    return ActiveLinks(links)
