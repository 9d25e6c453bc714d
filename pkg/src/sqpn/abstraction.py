"""Construction of the interval network from a semi-qualitative network.

Forward influences come from the child's conditional table when it has one
(min/max of the per-context probability differences) and from the arc sign
otherwise.  Reverse influences default to the unit interval of the forward
classification and are tightened where the numbers allow it: exactly via
Bayes' theorem when the arc's local family is fully quantified by root
priors, or to [0, max{x, 1-x}] (mirrored for negative influences) when the
source is a single-child root with prior x.  Intercausal influences carry
the unit interval of the declared or table-derived synergy sign.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .algebra import (
    Interval,
    Sign,
    classify,
    sign_to_unit_interval,
)
from .model import (
    Arc,
    Evidence,
    SqpnError,
    SqpnNetwork,
    enumerate_configs,
    require_valid,
)

# Influence provenance labels.
FROM_SIGN = "from-sign"
FROM_CPT = "from-cpt"
DEFAULT_REVERSE = "default-reverse"
TIGHTENED_REVERSE = "tightened-reverse"
RESOLVED = "resolved"  # value installed externally (resolution or file)


@dataclass(frozen=True)
class IntervalInfluence:
    source: str
    target: str
    interval: Interval
    origin: str


@dataclass
class IntervalNetwork:
    """Per-direction interval influences plus intercausal synergy intervals."""

    base: SqpnNetwork
    influences: dict[tuple[str, str], IntervalInfluence]
    intercausal: dict[tuple[str, bool, tuple[str, str]], Interval] = field(default_factory=dict)

    def influence(self, source: str, target: str) -> IntervalInfluence:
        try:
            return self.influences[(source, target)]
        except KeyError:
            raise SqpnError(f"no influence {source} -> {target}") from None

    def intercausal_interval(self, child: str, observed_value: bool, pair) -> Interval:
        a, b = sorted(pair)
        return self.intercausal.get(
            (child, observed_value, (a, b)), sign_to_unit_interval(Sign.AMBIGUOUS)
        )


def _context_diffs(network: SqpnNetwork, arc: Arc) -> list[float]:
    """Pr(child | parent=T, x) - Pr(child | parent=F, x) for every context x."""
    child = network.node(arc.child)
    if child.cpt is None:
        raise SqpnError(f"node {arc.child} has no cpt")
    cpt = child.cpt
    index = cpt.parents.index(arc.parent)
    others = [i for i in range(len(cpt.parents)) if i != index]
    diffs = []
    for context in enumerate_configs(len(others)):
        hi_cfg = [False] * len(cpt.parents)
        lo_cfg = [False] * len(cpt.parents)
        for pos, value in zip(others, context):
            hi_cfg[pos] = value
            lo_cfg[pos] = value
        hi_cfg[index] = True
        lo_cfg[index] = False
        diffs.append(cpt.probability(tuple(hi_cfg)) - cpt.probability(tuple(lo_cfg)))
    return diffs


def influence_interval_from_cpt(network: SqpnNetwork, arc: Arc) -> Interval:
    """Interval influence of an arc computed from the child's table."""
    diffs = _context_diffs(network, arc)
    return Interval(min(diffs), max(diffs))


def abstract_cpt_to_sign(network: SqpnNetwork, arc: Arc) -> Sign:
    """Qualitative sign of a quantified arc."""
    return classify(influence_interval_from_cpt(network, arc))


def default_reverse(forward: IntervalInfluence) -> Interval:
    """Default reverse interval: the unit interval of the forward classification."""
    return sign_to_unit_interval(classify(forward.interval))


def tighten_reverse_root(prior: float, forward_class: Sign) -> Interval:
    """Reverse interval for a single-child root with a known prior.

    Observing the child can shift the root's probability by at most
    max{x, 1-x}, in the direction given by the forward sign.
    """
    if not (0.0 <= prior <= 1.0):
        raise SqpnError(f"prior {prior} outside [0, 1]")
    bound = max(prior, 1.0 - prior)
    if forward_class is Sign.POSITIVE:
        return Interval(0.0, bound)
    if forward_class is Sign.NEGATIVE:
        return Interval(-bound, 0.0)
    raise SqpnError("root tightening applies to positive or negative influences only")


def _family_quantified_by_roots(network: SqpnNetwork, arc: Arc) -> bool:
    source = network.node(arc.parent)
    if source.prior is None or network.parents_of(arc.parent):
        return False
    for other in network.parents_of(arc.child):
        if other == arc.parent:
            continue
        node = network.node(other)
        if node.prior is None or network.parents_of(other):
            return False
    return network.node(arc.child).cpt is not None


def tighten_reverse_bayes(network: SqpnNetwork, arc: Arc) -> Interval:
    """Exact reverse interval via Bayes' theorem on the arc's local family.

    Applicable when the source is a root with a prior and every other parent
    of the target is too: the family joint is then a product of the priors
    and the target's table, and Pr(source | target, x) is computed exactly
    for every context x of the other parents.  Contexts in which the target
    value has probability zero impose no constraint and are skipped.
    """
    if not _family_quantified_by_roots(network, arc):
        raise SqpnError(
            f"arc {arc.parent} -> {arc.child} lacks the quantification needed for Bayes tightening"
        )
    cpt = network.node(arc.child).cpt
    assert cpt is not None
    x = network.node(arc.parent).prior
    assert x is not None
    index = cpt.parents.index(arc.parent)
    others = [i for i in range(len(cpt.parents)) if i != index]
    other_priors = [network.node(cpt.parents[i]).prior for i in others]
    diffs = []
    for context in enumerate_configs(len(others)):
        weight = 1.0
        for prior, value in zip(other_priors, context):
            weight *= prior if value else 1.0 - prior
        if weight == 0.0:
            continue
        cfg_true = [False] * len(cpt.parents)
        cfg_false = [False] * len(cpt.parents)
        for pos, value in zip(others, context):
            cfg_true[pos] = value
            cfg_false[pos] = value
        cfg_true[index] = True
        cfg_false[index] = False
        p_child_given_src = cpt.probability(tuple(cfg_true))
        p_child_given_not = cpt.probability(tuple(cfg_false))
        p_child = p_child_given_src * x + p_child_given_not * (1.0 - x)
        if not (0.0 < p_child < 1.0):
            continue  # only one target value possible here: no constraint
        # Covariance form of Pr(a|bx) - Pr(a|b'x); it keeps the sign of the
        # forward difference exactly, also in floating point.
        diffs.append(
            x * (1.0 - x) * (p_child_given_src - p_child_given_not)
            / (p_child * (1.0 - p_child))
        )
    if not diffs:
        raise SqpnError(
            f"reverse of {arc.parent} -> {arc.child}: no context with both target values possible"
        )
    return Interval(min(diffs), max(diffs))


def synergy_sign_from_cpt(
    network: SqpnNetwork, child: str, observed_value: bool, pair
) -> Sign:
    """Sign of the product synergy of a parent pair, from the child's table.

    Per context of the remaining parents, the 2x2 determinant
    Pr(ab)Pr(a'b') - Pr(a'b)Pr(ab') of the child-value probabilities decides
    the intercausal direction; for an observed false value the complemented
    probabilities are used.  Signs are aggregated worst-case over contexts.
    """
    node = network.node(child)
    if node.cpt is None:
        raise SqpnError(f"node {child} has no cpt")
    cpt = node.cpt
    a, b = sorted(pair)
    if a not in cpt.parents or b not in cpt.parents or a == b:
        raise SqpnError(f"({a}, {b}) is not a parent pair of {child}")
    ia, ib = cpt.parents.index(a), cpt.parents.index(b)
    others = [i for i in range(len(cpt.parents)) if i not in (ia, ib)]

    def prob(value_a: bool, value_b: bool, context) -> float:
        cfg = [False] * len(cpt.parents)
        for pos, value in zip(others, context):
            cfg[pos] = value
        cfg[ia] = value_a
        cfg[ib] = value_b
        p = cpt.probability(tuple(cfg))
        return p if observed_value else 1.0 - p

    determinants = []
    for context in enumerate_configs(len(others)):
        det = prob(True, True, context) * prob(False, False, context) \
            - prob(False, True, context) * prob(True, False, context)
        determinants.append(det)
    if all(d == 0.0 for d in determinants):
        return Sign.ZERO
    if all(d >= 0.0 for d in determinants):
        return Sign.POSITIVE
    if all(d <= 0.0 for d in determinants):
        return Sign.NEGATIVE
    return Sign.AMBIGUOUS


def _oracle_reverse(network: SqpnNetwork, arc: Arc, cap: int) -> Optional[Interval]:
    # Global tightening via the exact oracle; opt-in because it requires a
    # fully quantified network within the enumeration cap.
    from . import oracle

    if len(network.nodes) > cap:
        return None
    if not all(n.quantified for n in network.nodes.values()):
        return None
    others = [p for p in network.parents_of(arc.child) if p != arc.parent]
    diffs = []
    for context in enumerate_configs(len(others)):
        base = dict(zip(others, context))
        try:
            p_true = oracle.posterior(network, {**base, arc.child: True}, arc.parent)
            p_false = oracle.posterior(network, {**base, arc.child: False}, arc.parent)
        except SqpnError:
            continue  # context with a zero-probability target value
        diffs.append(p_true - p_false)
    if not diffs:
        return None
    return Interval(min(diffs), max(diffs))


def build_interval_network(
    network: SqpnNetwork,
    installed: Optional[Mapping[tuple[str, str], Interval]] = None,
    oracle_tighten: bool = False,
    oracle_cap: int = 16,
) -> IntervalNetwork:
    """Build the interval network exploited by interval propagation.

    ``installed`` maps directed node pairs to externally supplied intervals
    (for instance a reverse influence computed elsewhere, or the outcome of a
    trade-off resolution); they override the derived value for that direction
    and must not change its classification.
    """
    require_valid(network)
    installed = dict(installed or {})
    influences: dict[tuple[str, str], IntervalInfluence] = {}

    for (parent, child), arc in sorted(network.arcs.items()):
        if network.node(child).cpt is not None:
            forward = IntervalInfluence(parent, child, influence_interval_from_cpt(network, arc), FROM_CPT)
        else:
            assert arc.sign is not None
            forward = IntervalInfluence(parent, child, sign_to_unit_interval(arc.sign), FROM_SIGN)

        forward_class = classify(forward.interval)
        reverse_interval: Optional[Interval] = None
        origin = DEFAULT_REVERSE
        if _family_quantified_by_roots(network, arc):
            reverse_interval = tighten_reverse_bayes(network, arc)
            origin = TIGHTENED_REVERSE
            source = network.node(parent)
            if (
                source.prior is not None
                and len(network.children_of(parent)) == 1
                and forward_class in (Sign.POSITIVE, Sign.NEGATIVE)
            ):
                # Bayes wins over root tightening; sanity: it must nest.
                root_bound = tighten_reverse_root(source.prior, forward_class)
                if not reverse_interval.is_subset_of(root_bound):
                    raise SqpnError(
                        f"reverse of {parent} -> {child}: Bayes interval escapes the root bound"
                    )
        elif oracle_tighten:
            reverse_interval = _oracle_reverse(network, arc, oracle_cap)
            if reverse_interval is not None:
                origin = TIGHTENED_REVERSE
        if reverse_interval is None:
            source = network.node(parent)
            if (
                source.prior is not None
                and not network.parents_of(parent)
                and len(network.children_of(parent)) == 1
                and forward_class in (Sign.POSITIVE, Sign.NEGATIVE)
            ):
                reverse_interval = tighten_reverse_root(source.prior, forward_class)
                origin = TIGHTENED_REVERSE
            else:
                reverse_interval = default_reverse(forward)
                origin = DEFAULT_REVERSE

        if (parent, child) in installed:
            forward = IntervalInfluence(parent, child, installed.pop((parent, child)), RESOLVED)
        reverse = IntervalInfluence(child, parent, reverse_interval, origin)
        if (child, parent) in installed:
            reverse = IntervalInfluence(child, parent, installed.pop((child, parent)), RESOLVED)

        if classify(reverse.interval) not in (classify(forward.interval), Sign.ZERO):
            if classify(forward.interval) is not Sign.AMBIGUOUS:
                raise SqpnError(
                    f"reverse of {parent} -> {child} classifies as "
                    f"{classify(reverse.interval)} but the forward influence is "
                    f"{classify(forward.interval)}"
                )
        influences[(parent, child)] = forward
        influences[(child, parent)] = reverse

    if installed:
        pairs = ", ".join(f"{s} -> {t}" for s, t in installed)
        raise SqpnError(f"installed intervals for non-arcs: {pairs}")

    intercausal: dict[tuple[str, bool, tuple[str, str]], Interval] = {}
    for child in sorted(network.nodes):
        parents = network.parents_of(child)
        if len(parents) < 2:
            continue
        quantified = network.node(child).cpt is not None
        for a, b in itertools.combinations(parents, 2):
            for value in (True, False):
                if quantified:
                    sign = synergy_sign_from_cpt(network, child, value, (a, b))
                else:
                    sign = network.synergy_sign(child, value, (a, b))
                intercausal[(child, value, (a, b))] = sign_to_unit_interval(sign)

    return IntervalNetwork(network, influences, intercausal)
