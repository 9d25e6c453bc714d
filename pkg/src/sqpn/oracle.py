"""Exact inference and trade-off resolution on fully quantified (sub)networks.

Inference is plain joint enumeration over the 2^n assignments, held as a
numpy tensor with one binary axis per node and capped at 20 nodes: the
oracle exists for desk-scale verification, where simplicity is worth more
than scalability.  On top of it sit distribution-preserving arc reversal
and node reduction, the local trade-off resolution built from them, and an
empirical soundness audit of interval propagation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .abstraction import build_interval_network, influence_interval_from_cpt
from .algebra import Interval, Sign, classify, sign_to_unit_interval
from .model import (
    Arc,
    Cpt,
    Evidence,
    Node,
    SqpnError,
    SqpnNetwork,
    SynergyDecl,
    check_evidence,
    enumerate_configs,
    topo_order,
)
from .propagate import Observation, PropagationConfig, entry_interval, propagate_intervals

ENUMERATION_CAP = 20


def _table(network: SqpnNetwork, name: str) -> tuple[tuple[str, ...], dict[tuple, float]]:
    """A node's distribution as (parents, config -> Pr(node=true))."""
    node = network.node(name)
    parents = network.parents_of(name)
    if node.cpt is not None:
        return node.cpt.parents, dict(node.cpt.entries)
    if node.prior is not None and not parents:
        return (), {(): node.prior}
    raise SqpnError(f"node {name} is not quantified")


def ensure_quantified(network: SqpnNetwork, cap: int = ENUMERATION_CAP) -> None:
    if len(network.nodes) > cap:
        raise SqpnError(f"{len(network.nodes)} nodes exceed the enumeration cap of {cap}")
    for name in network.nodes:
        _table(network, name)


class JointTable:
    """The full joint distribution of a quantified network, one axis per node."""

    def __init__(self, network: SqpnNetwork, cap: int = ENUMERATION_CAP) -> None:
        ensure_quantified(network, cap)
        self.names = sorted(network.nodes)
        self.index = {n: i for i, n in enumerate(self.names)}
        n = len(self.names)
        joint = np.ones((2,) * n)
        for name in self.names:
            parents, entries = _table(network, name)
            axes = [self.index[p] for p in parents] + [self.index[name]]
            factor = np.empty((2,) * len(axes))
            for config in enumerate_configs(len(parents)):
                p = entries[tuple(config)]
                idx = tuple(int(v) for v in config)
                factor[idx + (1,)] = p
                factor[idx + (0,)] = 1.0 - p
            # Align the factor's axes with the joint tensor's axis order.
            perm = sorted(range(len(axes)), key=lambda k: axes[k])
            arranged = np.transpose(factor, perm)
            shape = [1] * n
            for ax in axes:
                shape[ax] = 2
            joint = joint * arranged.reshape(shape)
        self.joint = joint

    def _conditioned(self, evidence: Evidence) -> np.ndarray:
        view = self.joint
        indexer: list = [slice(None)] * len(self.names)
        for name, value in evidence.items():
            indexer[self.index[name]] = int(bool(value))
        return view[tuple(indexer)]

    def probability(self, evidence: Evidence) -> float:
        return float(self._conditioned(evidence).sum())

    def marginals(self, evidence: Evidence) -> dict[str, float]:
        """Pr(node=true | evidence) for every node not in evidence."""
        cond = self._conditioned(evidence)
        total = float(cond.sum())
        if total <= 0.0:
            raise SqpnError("evidence has zero probability")
        remaining = [n for n in self.names if n not in evidence]
        out = {name: 1.0 if evidence[name] else 0.0 for name in evidence}
        for axis, name in enumerate(remaining):
            other = tuple(i for i in range(cond.ndim) if i != axis)
            out[name] = float(cond.sum(axis=other)[1]) / total
        return out


def posterior(network: SqpnNetwork, evidence: Evidence, target: str) -> float:
    """Pr(target=true | evidence), exact up to floating point."""
    ev = check_evidence(network, evidence)
    network.node(target)
    table = JointTable(network)
    return table.marginals(ev)[target]


def delta_effect(
    network: SqpnNetwork,
    prior_evidence: Evidence,
    node: str,
    value: bool,
    target: str,
) -> float:
    """Change in Pr(target=true) occasioned by observing ``node=value``."""
    ev = check_evidence(network, prior_evidence)
    if node in ev:
        raise SqpnError(f"{node} is already in the evidence")
    table = JointTable(network)
    before = table.marginals(ev)[target]
    after = table.marginals({**ev, node: value})[target]
    return after - before


def _as_node(name: str, parents: tuple[str, ...], entries: dict[tuple, float]) -> Node:
    if not parents:
        return Node(name, prior=entries[()])
    return Node(name, cpt=Cpt(parents, entries))


def _has_other_path(network: SqpnNetwork, parent: str, child: str) -> bool:
    # Directed path parent ~> child avoiding the direct arc.
    stack = [c for c in network.children_of(parent) if c != child]
    seen = set(stack)
    while stack:
        node = stack.pop()
        if node == child:
            return True
        for nxt in network.children_of(node):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def _valid_synergies(
    decls: Iterable[SynergyDecl], parents_of: dict[str, set[str]]
) -> list[SynergyDecl]:
    kept = []
    for decl in decls:
        parents = parents_of.get(decl.child, set())
        if set(decl.pair) <= parents:
            kept.append(decl)
    return kept


def reverse_arc(network: SqpnNetwork, parent: str, child: str) -> SqpnNetwork:
    """Flip an arc, recomputing both tables so the joint is unchanged.

    The child inherits the parent's former parents; the parent additionally
    gains the child.  In contexts where the new child table gives the
    conditioning value probability zero, the parent's entry is arbitrary
    (the context never occurs); 0.5 is used.
    """
    if (parent, child) not in network.arcs:
        raise SqpnError(f"unknown arc {parent} -> {child}")
    if _has_other_path(network, parent, child):
        raise SqpnError(f"reversing {parent} -> {child} would create a cycle")
    a_parents, a_entries = _table(network, parent)
    b_parents, b_entries = _table(network, child)

    union = tuple(sorted(set(a_parents) | (set(b_parents) - {parent})))
    b_index = b_parents.index(parent)

    def b_prob(a_value: bool, u_values: dict[str, bool]) -> float:
        cfg = [u_values[p] if p != parent else a_value for p in b_parents]
        cfg[b_index] = a_value
        return b_entries[tuple(cfg)]

    def a_prob(u_values: dict[str, bool]) -> float:
        return a_entries[tuple(u_values[p] for p in a_parents)]

    new_b_entries: dict[tuple, float] = {}
    new_a_entries: dict[tuple, float] = {}
    new_a_parents = tuple(sorted(union + (child,)))
    for config in enumerate_configs(len(union)):
        u_values = dict(zip(union, config))
        ap = a_prob(u_values)
        marginal = b_prob(True, u_values) * ap + b_prob(False, u_values) * (1.0 - ap)
        new_b_entries[tuple(config)] = marginal
        for b_value, denom in ((True, marginal), (False, 1.0 - marginal)):
            like = b_prob(True, u_values) if b_value else 1.0 - b_prob(True, u_values)
            post = like * ap / denom if denom > 0.0 else 0.5
            cfg = tuple(
                b_value if p == child else u_values[p] for p in new_a_parents
            )
            new_a_entries[cfg] = min(max(post, 0.0), 1.0)

    nodes = []
    for name, node in network.nodes.items():
        if name == parent:
            nodes.append(_as_node(parent, new_a_parents, new_a_entries))
        elif name == child:
            nodes.append(_as_node(child, union, new_b_entries))
        else:
            nodes.append(node)

    arcs: dict[tuple[str, str], Arc] = {}
    for (p, c), arc in network.arcs.items():
        if (p, c) == (parent, child):
            continue
        if c in (parent, child):
            arcs[(p, c)] = Arc(p, c)  # endpoints are now quantified: no signs
        else:
            arcs[(p, c)] = arc
    for u in union:
        arcs.setdefault((u, child), Arc(u, child))
    for v in new_a_parents:
        arcs.setdefault((v, parent), Arc(v, parent))

    parents_after = {n: set() for n in network.nodes}
    for (p, c) in arcs:
        parents_after[c].add(p)
    synergies = _valid_synergies(network.synergies, parents_after)
    return SqpnNetwork(nodes, arcs.values(), synergies)


def reduce_node(network: SqpnNetwork, name: str) -> SqpnNetwork:
    """Remove a node by marginalization, preserving the remaining joint.

    Children are detached one arc reversal at a time (topologically first
    child first, which can never create a cycle); the then-barren node is
    dropped.  With a single child this reduces to rebuilding that child's
    table over its other parents plus the removed node's parents.
    """
    network.node(name)
    _table(network, name)
    for child in network.children_of(name):
        _table(network, child)
    net = network
    while True:
        children = net.children_of(name)
        if not children:
            break
        position = {n: i for i, n in enumerate(topo_order(net))}
        first = min(children, key=lambda c: position[c])
        net = reverse_arc(net, name, first)
    nodes = [node for n, node in net.nodes.items() if n != name]
    arcs = [arc for (p, c), arc in net.arcs.items() if name not in (p, c)]
    parents_after = {n: set() for n in net.nodes if n != name}
    for arc in arcs:
        parents_after[arc.child].add(arc.parent)
    synergies = _valid_synergies(net.synergies, parents_after)
    return SqpnNetwork(nodes, arcs, synergies)


@dataclass
class ResolutionOutcome:
    """Result of a local trade-off resolution."""

    net_influence: Interval
    removed_nodes: list[str]
    resolved: bool
    network: SqpnNetwork  # the reduced network, reusable in propagation


def _directed_paths(network: SqpnNetwork, source: str, target: str) -> list[list[str]]:
    paths: list[list[str]] = []

    def walk(node: str, path: list[str]) -> None:
        if node == target:
            paths.append(path[:])
            return
        for child in network.children_of(node):
            if child not in path:
                walk(child, path + [child])

    walk(source, [source])
    return paths


def resolve_tradeoff(
    network: SqpnNetwork,
    source: str,
    target: str,
    sign_abstraction: bool = False,
) -> ResolutionOutcome:
    """Locally resolve the trade-off between ``source`` and ``target``.

    Interior nodes of the chains from source to target are marginalized out
    children-first (reverse topological order) until only the direct arc
    remains; its table then carries the net influence.  By default the net
    influence is returned as the interval computed from that table, which is
    strictly more informative than its sign; ``sign_abstraction`` collapses
    it to the unit interval of its classification instead.
    """
    network.node(source)
    network.node(target)
    paths = _directed_paths(network, source, target)
    if not paths:
        raise SqpnError(f"no directed chains from {source} to {target}")
    on_path = {n for path in paths for n in path}
    for name in sorted(on_path - {source}):
        _table(network, name)  # raises for an unquantified chain node

    net = network
    removed: list[str] = []
    while True:
        interior = {n for p in _directed_paths(net, source, target) for n in p[1:-1]}
        if not interior:
            break
        position = {n: i for i, n in enumerate(topo_order(net))}
        victim = max(sorted(interior), key=lambda n: position[n])
        net = reduce_node(net, victim)
        removed.append(victim)

    if (source, target) not in net.arcs:
        raise SqpnError(f"reduction left no arc {source} -> {target}")
    interval = influence_interval_from_cpt(net, net.arcs[(source, target)])
    resolved = classify(interval) is not Sign.AMBIGUOUS
    if sign_abstraction:
        interval = sign_to_unit_interval(classify(interval))
    return ResolutionOutcome(interval, removed, resolved, net)


@dataclass
class TrialRow:
    trial: int
    observed: str
    value: bool
    target: str
    delta: float
    lo: float
    hi: float
    contained: bool


def soundness_report(
    network: SqpnNetwork,
    trials: int,
    seed: Optional[int] = None,
    tol: float = 1e-9,
) -> list[TrialRow]:
    """Audit interval propagation against the exact oracle.

    Each trial observes a random node with an exact entry interval and
    checks, for every node, that the exact probability change lies in the
    propagated interval.  Rows report the failures as well; callers decide
    what to assert.
    """
    ensure_quantified(network)
    rng = random.Random(seed)
    table = JointTable(network)
    inet = build_interval_network(network)
    priors = table.marginals({})
    names = sorted(network.nodes)
    rows: list[TrialRow] = []
    for trial in range(trials):
        observed = rng.choice(names)
        x = priors[observed]
        if x >= 1.0:
            value = False
        elif x <= 0.0:
            value = True
        else:
            value = rng.random() < 0.5
        obs = Observation(observed, value, entry_interval(value, x, "exact"))
        result = propagate_intervals(inet, {}, obs, PropagationConfig())
        after = table.marginals({observed: value})
        for target in names:
            delta = after[target] - priors[target]
            iv = result.per_node[target]
            rows.append(TrialRow(
                trial=trial,
                observed=observed,
                value=value,
                target=target,
                delta=delta,
                lo=iv.lo,
                hi=iv.hi,
                contained=iv.contains(delta, tol),
            ))
    return rows


def containment_rate(rows: list[TrialRow]) -> float:
    if not rows:
        return 1.0
    return sum(1 for r in rows if r.contained) / len(rows)
