"""Sign propagation and interval propagation.

Both algorithms trace the effect of a single new observation through the
network by depth-first message passing over the active links, carrying a
per-path trail so that no message ever revisits a node on its own path.
Node signs start at '0' and accumulate messages with the parallel operator;
each node can change sign at most twice, so sign propagation is polynomial.

Interval propagation keeps, per node, one contribution slot per incoming
link: a re-sent message replaces the sender's previous contribution instead
of being added again, and the node's interval is the parallel combination
of its slots (folded in deterministic link order).  This is what makes a
node's interval track the *latest* state of each neighbour -- adding
repeated messages from the same neighbour would double-count it.

A node's interval can change as often as it is visited, which is
exponential in the worst case.  The optional per-node change limit ``m``
restores a polynomial bound: on the m-th change the interval is replaced by
the unit interval of its classification, after which at most one further
change (to the ambiguous unit interval) is allowed.  The observed node is
exempt.  The relaxation is sound: a collapsed interval always contains the
value it replaced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .abstraction import IntervalNetwork, abstract_cpt_to_sign, synergy_sign_from_cpt
from .algebra import (
    TOLERANCE,
    Interval,
    Sign,
    ZERO_INTERVAL,
    classify,
    interval_add,
    interval_mul,
    sign_add,
    sign_mul,
    sign_to_unit_interval,
)
from .model import (
    INTERCAUSAL,
    ORIGIN,
    Evidence,
    Link,
    SqpnError,
    SqpnNetwork,
    active_links,
    arrival_role,
    check_evidence,
    require_valid,
    traversal_allowed,
)

ENTRY_MODES = ("exact", "maximal", "ignorant")


@dataclass(frozen=True)
class Observation:
    """An observed node value with the entry interval encoding its strength."""

    node: str
    value: bool
    strength: Interval

    def __post_init__(self) -> None:
        cls = classify(self.strength)
        if self.value and cls not in (Sign.POSITIVE, Sign.ZERO):
            raise SqpnError(f"positive observation of {self.node} needs a non-negative strength")
        if not self.value and cls not in (Sign.NEGATIVE, Sign.ZERO):
            raise SqpnError(f"negative observation of {self.node} needs a non-positive strength")


@dataclass(frozen=True)
class PropagationConfig:
    """Interval-propagation options; ``m`` is the per-node change limit."""

    m: Optional[int] = None

    def __post_init__(self) -> None:
        if self.m is not None and self.m < 1:
            raise SqpnError(f"m must be >= 1, got {self.m}")


@dataclass
class PropagationResult:
    """Per-node outcome of one observation, plus diagnostics."""

    algorithm: str  # "signs" or "intervals"
    observed: str
    per_node: dict[str, Union[Sign, Interval]]
    visits: dict[str, int]
    changes: dict[str, int]
    collapsed: set[str] = field(default_factory=set)
    messages: int = 0
    entry_mode: Optional[str] = None


def entry_interval(value: bool, prior: Optional[float] = None, mode: str = "exact") -> Interval:
    """Entry interval for an observation.

    ``exact`` needs the observed node's prior x and yields the point interval
    [1-x, 1-x] (or [-x, -x] for a negative observation); ``ignorant`` yields
    the positive or negative unit interval; ``maximal`` yields [1, 1] or
    [-1, -1], describing the maximum possible effect.
    """
    if mode == "exact":
        if prior is None:
            raise SqpnError("exact entry requires a known prior")
        if not (0.0 <= prior <= 1.0):
            raise SqpnError(f"prior {prior} outside [0, 1]")
        return Interval(1.0 - prior, 1.0 - prior) if value else Interval(-prior, -prior)
    if mode == "ignorant":
        return Interval(0.0, 1.0) if value else Interval(-1.0, 0.0)
    if mode == "maximal":
        return Interval(1.0, 1.0) if value else Interval(-1.0, -1.0)
    raise SqpnError(f"unknown entry mode {mode!r} (expected one of {', '.join(ENTRY_MODES)})")


def _sign_of_link(network: SqpnNetwork, link: Link, evidence: Mapping[str, bool]) -> Sign:
    if link.kind == INTERCAUSAL:
        assert link.via is not None
        if network.node(link.via).cpt is not None:
            return synergy_sign_from_cpt(network, link.via, evidence[link.via], (link.source, link.target))
        return link.sign if link.sign is not None else Sign.AMBIGUOUS
    # Arc links: a reverse influence carries the same sign as the forward one.
    pair = (link.source, link.target) if (link.source, link.target) in network.arcs \
        else (link.target, link.source)
    arc = network.arcs[pair]
    if network.node(arc.child).cpt is not None:
        return abstract_cpt_to_sign(network, arc)
    assert arc.sign is not None
    return arc.sign


def propagate_signs(
    network: SqpnNetwork,
    prior_evidence: Evidence,
    node: str,
    sign: Sign,
) -> PropagationResult:
    """Effect of observing ``node`` with entry ``sign`` on every node's sign.

    Quantified arcs are abstracted to signs on the fly.  Nodes in the prior
    evidence receive no messages and report '0': their probabilities cannot
    change further.
    """
    require_valid(network)
    prior = check_evidence(network, prior_evidence)
    network.node(node)
    if node in prior:
        raise SqpnError(f"{node} is already in the evidence")
    if sign not in (Sign.POSITIVE, Sign.NEGATIVE):
        raise SqpnError("the entry sign must be '+' (true) or '-' (false)")
    evidence = {**prior, node: sign is Sign.POSITIVE}
    links = active_links(network, evidence)

    state = {n: Sign.ZERO for n in network.nodes}
    visits = {n: 0 for n in network.nodes}
    changes = {n: 0 for n in network.nodes}
    messages = 0

    def visit(trail: frozenset, to: str, message: Sign, role: str) -> None:
        nonlocal messages
        state[to] = sign_add(state[to], message)
        visits[to] += 1
        changes[to] += 1
        for link in links.links_from(to):
            if link.target in trail or not traversal_allowed(role, link):
                continue
            out = sign_mul(state[to], _sign_of_link(network, link, evidence))
            messages += 1
            if sign_add(state[link.target], out) != state[link.target]:
                visit(trail | {link.target}, link.target, out, arrival_role(link))

    visit(frozenset({node}), node, sign, ORIGIN)
    return PropagationResult(
        algorithm="signs",
        observed=node,
        per_node=dict(state),
        visits=visits,
        changes=changes,
        messages=messages,
    )


def _interval_of_link(inet: IntervalNetwork, link: Link, evidence: Mapping[str, bool]) -> Interval:
    if link.kind == INTERCAUSAL:
        assert link.via is not None
        return inet.intercausal_interval(link.via, evidence[link.via], (link.source, link.target))
    return inet.influence(link.source, link.target).interval


def propagate_intervals(
    inet: IntervalNetwork,
    prior_evidence: Evidence,
    observation: Observation,
    config: PropagationConfig = PropagationConfig(),
    entry_mode: Optional[str] = None,
) -> PropagationResult:
    """Effect of one observation on every node's interval.

    Same message-passing scheme as sign propagation, with the interval
    operators and per-link contribution slots.  A node re-sends only when
    its interval actually changed (beyond :data:`~sqpn.algebra.TOLERANCE`);
    neighbours are served in NodeId-ascending order, which pins down the
    result whenever the change limit makes it order-sensitive.
    """
    network = inet.base
    prior = check_evidence(network, prior_evidence)
    network.node(observation.node)
    if observation.node in prior:
        raise SqpnError(f"{observation.node} is already in the evidence")
    evidence = {**prior, observation.node: observation.value}
    links = active_links(network, evidence)

    interval = {n: ZERO_INTERVAL for n in network.nodes}
    contribs: dict[str, dict[Link, Interval]] = {n: {} for n in network.nodes}
    visits = {n: 0 for n in network.nodes}
    changes = {n: 0 for n in network.nodes}
    collapsed: set[str] = set()
    collapse_sign: dict[str, Sign] = {}
    frozen: set[str] = set()
    messages = 0

    def merged(node: str) -> Interval:
        # Deterministic left fold: clipping makes the sum order-sensitive.
        total = ZERO_INTERVAL
        for link in sorted(contribs[node], key=Link.sort_key):
            total = interval_add(total, contribs[node][link])
        return total

    def next_value(node: str, candidate: Interval) -> Optional[Interval]:
        """New stored interval for ``node``, or None when it must not change."""
        current = interval[node]
        if node in frozen:
            return None
        if node in collapse_sign:
            if classify(candidate) is collapse_sign[node]:
                return None  # same classification: keep the unit interval
            frozen.add(node)
            return sign_to_unit_interval(Sign.AMBIGUOUS)
        if candidate.approx_eq(current):
            return None
        if (
            config.m is not None
            and node != observation.node
            and changes[node] + 1 == config.m
        ):
            cls = classify(candidate)
            collapse_sign[node] = cls
            collapsed.add(node)
            if cls is Sign.AMBIGUOUS:
                frozen.add(node)
            unit = sign_to_unit_interval(cls)
            return None if unit.approx_eq(current) else unit
        return candidate

    def deliver(trail: frozenset, link: Link, message: Interval) -> None:
        target = link.target
        contribs[target][link] = message
        visits[target] += 1
        new = next_value(target, merged(target))
        if new is None:
            return
        interval[target] = new
        changes[target] += 1
        send_from(trail, target, arrival_role(link))

    def send_from(trail: frozenset, source: str, role: str) -> None:
        nonlocal messages
        for link in links.links_from(source):
            if link.target in trail or not traversal_allowed(role, link):
                continue
            message = interval_mul(interval[source], _interval_of_link(inet, link, evidence))
            messages += 1
            previous = contribs[link.target].get(link)
            if previous is not None and previous.approx_eq(message):
                continue
            deliver(trail | {link.target}, link, message)

    interval[observation.node] = observation.strength
    visits[observation.node] = 1
    changes[observation.node] = 1
    send_from(frozenset({observation.node}), observation.node, ORIGIN)

    return PropagationResult(
        algorithm="intervals",
        observed=observation.node,
        per_node=dict(interval),
        visits=visits,
        changes=changes,
        collapsed=collapsed,
        messages=messages,
        entry_mode=entry_mode,
    )


def apply_strength(result: PropagationResult, strength: Interval) -> PropagationResult:
    """Scale a maximal-effect propagation by a later-known observation strength.

    Every node interval, the observed node included, is multiplied with the
    strength interval.
    """
    if result.algorithm != "intervals" or result.entry_mode != "maximal":
        raise SqpnError("strength applies to maximal-effect interval propagations only")
    per_node = {n: interval_mul(iv, strength) for n, iv in result.per_node.items()}
    return PropagationResult(
        algorithm=result.algorithm,
        observed=result.observed,
        per_node=per_node,
        visits=dict(result.visits),
        changes=dict(result.changes),
        collapsed=set(result.collapsed),
        messages=result.messages,
        entry_mode="strength-applied",
    )
