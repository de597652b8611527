import numpy as np

from conftest import random_classifier
from specdisc.classifier import PairClassifier, QuantileNeuron, SpectralRange, classify
from specdisc.netlist import netlist_from_json, netlist_to_json, simulate_netlist, to_netlist


def make(pos, neg, theta=0.0, kind="Z"):
    return PairClassifier(
        QuantileNeuron(SpectralRange(pos[0], pos[1]), pos[2]),
        QuantileNeuron(SpectralRange(neg[0], neg[1]), neg[2]),
        theta, kind,
    )


def ops(net):
    return [n["op"] for n in net.nodes]


def test_width_one_is_input_to_subtract():
    net = to_netlist(make((2, 2, 1), (1, 1, 1)))
    assert ops(net) == ["input", "input", "subtract", "compare"]


def test_width_three_max_is_two_max2():
    net = to_netlist(make((1, 3, 3), (4, 4, 1)))
    assert ops(net).count("max2") == 2
    assert ops(net).count("min2") == 0


def test_median_select_uses_only_min_max():
    net = to_netlist(make((1, 5, 3), (6, 6, 1)))
    assert set(ops(net)) == {"input", "min2", "max2", "subtract", "compare"}
    assert ops(net).count("compare") == 1


def test_acyclic_by_construction():
    net = to_netlist(make((1, 4, 2), (5, 8, 3)))
    for node in net.nodes:
        assert all(a < node["id"] for a in node["args"])
    assert net.output == len(net.nodes) - 1


def test_simulation_equals_classify_500_random():
    rng = np.random.default_rng(17)
    for _ in range(500):
        c = random_classifier(rng, 16, kind="B",
                              theta=float(rng.normal()),)
        net = to_netlist(c)
        v = rng.normal(size=16) * 5
        assert simulate_netlist(net, v) == classify(c, v)


def test_simulation_equals_classify_on_ties():
    c = make((1, 2, 2), (3, 3, 1))
    v = np.array([1.0, 4.0, 4.0])
    assert classify(c, v) == -1
    assert simulate_netlist(to_netlist(c), v) == -1


def test_json_round_trip():
    c = make((1, 5, 2), (6, 8, 3), theta=1.25, kind="B")
    net = to_netlist(c)
    net2 = netlist_from_json(netlist_to_json(net))
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = rng.normal(size=8)
        assert simulate_netlist(net2, v) == simulate_netlist(net, v)
