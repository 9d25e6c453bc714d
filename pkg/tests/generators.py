"""Seeded random network builders for property and acceptance tests."""

from __future__ import annotations

import random

from sqpn.algebra import Sign
from sqpn.model import Arc, Cpt, Node, SqpnNetwork, enumerate_configs


def _prob(rng: random.Random) -> float:
    return rng.uniform(0.05, 0.95)


def _names(count: int) -> list[str]:
    return [f"V{i:02d}" for i in range(count)]


def _random_cpt(rng: random.Random, parents: tuple[str, ...]) -> Cpt:
    entries = {cfg: _prob(rng) for cfg in enumerate_configs(len(parents))}
    return Cpt(parents, entries)


def random_chain(rng: random.Random, max_nodes: int = 8) -> SqpnNetwork:
    """A quantified directed chain V00 -> V01 -> ... (2..max_nodes nodes)."""
    names = _names(rng.randint(2, max_nodes))
    nodes = [Node(names[0], prior=_prob(rng))]
    arcs = []
    for prev, cur in zip(names, names[1:]):
        nodes.append(Node(cur, cpt=_random_cpt(rng, (prev,))))
        arcs.append(Arc(prev, cur))
    return SqpnNetwork(nodes, arcs)


def random_tree(rng: random.Random, max_nodes: int = 8) -> SqpnNetwork:
    """A quantified directed tree: every non-root has one parent among earlier nodes."""
    names = _names(rng.randint(2, max_nodes))
    nodes = [Node(names[0], prior=_prob(rng))]
    arcs = []
    for i, name in enumerate(names[1:], start=1):
        parent = names[rng.randrange(i)]
        nodes.append(Node(name, cpt=_random_cpt(rng, (parent,))))
        arcs.append(Arc(parent, name))
    return SqpnNetwork(nodes, arcs)


def random_fig4(rng: random.Random) -> SqpnNetwork:
    """The three-node parallel-composition pattern with all influences positive.

    Arcs V00 -> V01, V01 -> V02 and V00 -> V02; every per-context probability
    difference is non-negative by construction.
    """
    a, b, c = _names(3)
    pb_low = _prob(rng)
    pb_high = min(0.98, pb_low + rng.uniform(0.0, 0.9))
    base = rng.uniform(0.02, 0.3)
    alpha = rng.uniform(0.0, 0.3)   # direct V00 effect
    beta = rng.uniform(0.0, 0.3)    # V01 effect
    gamma = rng.uniform(0.0, max(0.0, 0.98 - (base + alpha + beta)))
    c_entries = {
        (False, False): base,
        (False, True): base + beta,
        (True, False): base + alpha,
        (True, True): base + alpha + beta + gamma,
    }
    nodes = [
        Node(a, prior=_prob(rng)),
        Node(b, cpt=Cpt((a,), {(True,): pb_high, (False,): pb_low})),
        Node(c, cpt=Cpt((a, b), c_entries)),
    ]
    return SqpnNetwork(nodes, [Arc(a, b), Arc(a, c), Arc(b, c)])


def random_dag(
    rng: random.Random,
    max_nodes: int = 8,
    max_parents: int = 3,
    quantified: bool = True,
) -> SqpnNetwork:
    """A random quantified DAG; parents are drawn from earlier nodes."""
    names = _names(rng.randint(2, max_nodes))
    nodes = []
    arcs = []
    for i, name in enumerate(names):
        k = min(i, rng.randint(0, max_parents))
        parents = tuple(sorted(rng.sample(names[:i], k))) if k else ()
        if parents:
            nodes.append(Node(name, cpt=_random_cpt(rng, parents)))
            arcs.extend(Arc(p, name) for p in parents)
        else:
            nodes.append(Node(name, prior=_prob(rng)))
    return SqpnNetwork(nodes, arcs)


def random_sign_network(
    rng: random.Random,
    max_nodes: int = 8,
    max_parents: int = 3,
) -> SqpnNetwork:
    """A random qualitative DAG: every arc carries a sign, no numbers."""
    names = _names(rng.randint(2, max_nodes))
    signs = [Sign.POSITIVE, Sign.NEGATIVE, Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.AMBIGUOUS]
    nodes = [Node(name) for name in names]
    arcs = []
    for i, name in enumerate(names):
        k = min(i, rng.randint(0, max_parents))
        for parent in (rng.sample(names[:i], k) if k else ()):
            arcs.append(Arc(parent, name, rng.choice(signs)))
    return SqpnNetwork(nodes, arcs)
