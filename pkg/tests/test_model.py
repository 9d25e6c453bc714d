"""Validation, topological order, and link activity against a path oracle."""

import random

import pytest

from sqpn.algebra import Sign
from sqpn.fileformat import parse_network
from sqpn.model import (
    Arc,
    Cpt,
    Node,
    SqpnError,
    SqpnNetwork,
    SynergyDecl,
    active_links,
    topo_order,
    validate,
)

from generators import random_dag, random_sign_network


def chain(*names, sign=Sign.POSITIVE):
    nodes = [Node(n) for n in names]
    arcs = [Arc(p, c, sign) for p, c in zip(names, names[1:])]
    return SqpnNetwork(nodes, arcs)


def test_fig1a_fixture_is_valid(fig1a_text):
    network = parse_network(fig1a_text).network
    assert validate(network) == []


def test_cycle_is_reported():
    net = SqpnNetwork(
        [Node("A"), Node("B")],
        [Arc("A", "B", Sign.POSITIVE), Arc("B", "A", Sign.POSITIVE)],
    )
    codes = {v.code for v in validate(net)}
    assert "cycle" in codes


def test_incomplete_cpt_is_reported():
    cpt = Cpt(("A", "C"), {(True, True): 0.6, (True, False): 0.9})
    net = SqpnNetwork(
        [Node("A", prior=0.5), Node("C", prior=0.5), Node("B", cpt=cpt)],
        [Arc("A", "B"), Arc("C", "B")],
    )
    codes = {v.code for v in validate(net)}
    assert "incomplete-cpt" in codes


def test_either_or_property():
    quantified_with_sign = SqpnNetwork(
        [Node("A"), Node("B", cpt=Cpt(("A",), {(True,): 0.3, (False,): 0.5}))],
        [Arc("A", "B", Sign.POSITIVE)],
    )
    assert {v.code for v in validate(quantified_with_sign)} == {"sign-on-quantified"}
    unsigned_unquantified = SqpnNetwork([Node("A"), Node("B")], [Arc("A", "B")])
    assert {v.code for v in validate(unsigned_unquantified)} == {"missing-sign"}


def test_validate_is_pure():
    net = chain("A", "B", "C")
    first = validate(net)
    second = validate(net)
    assert first == second == []


def test_topo_order_tiebreak():
    net = SqpnNetwork(
        [Node("B"), Node("C"), Node("A")],
        [Arc("A", "B", Sign.POSITIVE), Arc("C", "B", Sign.POSITIVE)],
    )
    assert topo_order(net) == ["A", "C", "B"]


def test_topo_order_singleton_and_chain():
    assert topo_order(SqpnNetwork([Node("X")])) == ["X"]
    assert topo_order(chain("C", "B", "A")) == ["C", "B", "A"]


def test_topo_order_respects_arcs():
    rng = random.Random(11)
    for _ in range(25):
        net = random_dag(rng)
        order = topo_order(net)
        assert sorted(order) == sorted(net.nodes)
        position = {n: i for i, n in enumerate(order)}
        for parent, child in net.arcs:
            assert position[parent] < position[child]


def test_empty_evidence_links_are_all_arc_directions():
    net = chain("A", "B", "C")
    links = active_links(net, {})
    assert links.as_set() == {
        ("A", "B", "forward", None), ("B", "A", "reverse", None),
        ("B", "C", "forward", None), ("C", "B", "reverse", None),
    }


def test_serial_blocking_through_evidence():
    net = chain("A", "B", "C")
    links = active_links(net, {"B": True})
    assert "C" not in links.reachable_from("A")
    assert "A" not in links.reachable_from("C")


def test_collider_closed_without_evidence():
    net = SqpnNetwork(
        [Node("A"), Node("B"), Node("C")],
        [Arc("A", "B", Sign.POSITIVE), Arc("C", "B", Sign.POSITIVE)],
    )
    links = active_links(net, {})
    assert all(l.kind != "intercausal" for l in links.links)
    assert "C" not in links.reachable_from("A")


def test_collider_opened_by_evidence_with_synergy_sign():
    net = SqpnNetwork(
        [Node("A"), Node("B"), Node("C")],
        [Arc("A", "B", Sign.POSITIVE), Arc("C", "B", Sign.POSITIVE)],
        [SynergyDecl("B", True, ("A", "C"), Sign.NEGATIVE)],
    )
    links = active_links(net, {"B": True})
    intercausal = {(l.source, l.target): l for l in links.links if l.kind == "intercausal"}
    assert set(intercausal) == {("A", "C"), ("C", "A")}
    assert intercausal[("A", "C")].sign is Sign.NEGATIVE
    assert intercausal[("A", "C")].via == "B"
    # Undeclared synergies default to '?'.
    links2 = active_links(net, {"B": False})
    signs = {l.sign for l in links2.links if l.kind == "intercausal"}
    assert signs == {Sign.AMBIGUOUS}


def test_no_links_into_evidence():
    net = chain("A", "B", "C")
    links = active_links(net, {"B": True})
    assert all(l.target != "B" for l in links.links)


def test_evidence_for_unknown_node():
    with pytest.raises(SqpnError):
        active_links(chain("A", "B"), {"Z": True})


# --- brute-force d-separation oracle (path enumeration) ---------------------

def brute_force_reachable(network: SqpnNetwork, origin: str, evidence) -> set[str]:
    """Targets of active simple paths from origin.

    Connection rules at an interior node: converging (both arcs point into
    it) is active iff the node is in evidence; serial and diverging are
    active iff it is not.  Evidence nodes are never targets, but a path may
    pass through one via an opened converging connection.
    """
    arcs = set(network.arcs)
    neighbours = {
        n: sorted(set(network.parents_of(n)) | set(network.children_of(n)))
        for n in network.nodes
    }
    reached: set[str] = set()

    def extend(path: list[str]) -> None:
        last = path[-1]
        for nxt in neighbours[last]:
            if nxt in path:
                continue
            if len(path) >= 2:
                prev = path[-2]
                converging = (prev, last) in arcs and (nxt, last) in arcs
                if converging != (last in evidence):
                    continue
            if nxt not in evidence:
                reached.add(nxt)
            extend(path + [nxt])

    extend([origin])
    return reached


@pytest.mark.parametrize("seed", range(30))
def test_active_links_agree_with_path_enumeration(seed):
    rng = random.Random(seed)
    net = random_sign_network(rng, max_nodes=8)
    names = sorted(net.nodes)
    k = rng.randint(0, min(2, len(names) - 1))
    evidence = {n: rng.random() < 0.5 for n in rng.sample(names, k)}
    links = active_links(net, evidence)
    for origin in names:
        assert links.reachable_from(origin) == brute_force_reachable(net, origin, evidence), (
            origin, evidence, sorted(net.arcs),
        )
