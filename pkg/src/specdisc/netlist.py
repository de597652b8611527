"""Lowering of classifiers to min/max hardware netlists.

A netlist is a DAG over primitive nodes: input(i), min2, max2, subtract
and a single compare(theta) output node.  Order-statistic selection is
expanded into a bubble-style sorting network built from min2/max2
comparators, so the whole circuit uses only hardware-friendly
primitives.  Simulation of the netlist reproduces classify() exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import PairClassifier, QuantileNeuron

__all__ = ["Netlist", "to_netlist", "simulate_netlist", "netlist_to_json", "netlist_from_json"]


@dataclass
class Netlist:
    """DAG of primitive nodes; node ids index the nodes list."""

    nodes: list = field(default_factory=list)
    output: int = -1
    theta: float = 0.0

    def add(self, op: str, *args: int) -> int:
        for a in args:
            if not (0 <= a < len(self.nodes)):
                raise ValueError(f"node argument {a} not yet defined (acyclicity)")
        self.nodes.append({"id": len(self.nodes), "op": op, "args": list(args)})
        return len(self.nodes) - 1


def _select_kth(net: Netlist, wires: list[int], k: int) -> int:
    """Wire carrying the k-th smallest of the inputs (1-based).

    Full bubble sorting network: after the passes, wire j carries the
    (j+1)-th smallest value.  O(n^2) comparators, min2/max2 only.
    """
    wires = list(wires)
    n = len(wires)
    for _ in range(n - 1):
        for j in range(n - 1):
            lo = net.add("min2", wires[j], wires[j + 1])
            hi = net.add("max2", wires[j], wires[j + 1])
            wires[j], wires[j + 1] = lo, hi
    return wires[k - 1]


def _lower_neuron(net: Netlist, neuron: QuantileNeuron) -> int:
    r = neuron.range
    inputs = []
    for i in range(r.start, r.end + 1):
        node = net.add("input")
        net.nodes[node]["index"] = i
        inputs.append(node)
    if r.width == 1:
        return inputs[0]
    if neuron.order_index == r.width:
        # pure max: balanced fold is smaller than a sorting network
        return _fold(net, inputs, "max2")
    if neuron.order_index == 1:
        return _fold(net, inputs, "min2")
    return _select_kth(net, inputs, neuron.order_index)


def _fold(net: Netlist, wires: list[int], op: str) -> int:
    while len(wires) > 1:
        nxt = []
        for i in range(0, len(wires) - 1, 2):
            nxt.append(net.add(op, wires[i], wires[i + 1]))
        if len(wires) % 2:
            nxt.append(wires[-1])
        wires = nxt
    return wires[0]


def to_netlist(c: PairClassifier) -> Netlist:
    """Circuit computing classify(c, .) from raw spectrum inputs."""
    net = Netlist(theta=c.theta)
    pos = _lower_neuron(net, c.pos_neuron)
    neg = _lower_neuron(net, c.neg_neuron)
    diff = net.add("subtract", pos, neg)
    out = net.add("compare", diff)
    net.output = out
    return net


def simulate_netlist(net: Netlist, values) -> int:
    """Evaluate the netlist on one spectrum; returns +-1 like classify."""
    values = np.asarray(values, dtype=np.float64)
    wire = np.empty(len(net.nodes))
    result = None
    for node in net.nodes:
        op = node["op"]
        a = node["args"]
        i = node["id"]
        if op == "input":
            idx = node["index"]
            if idx > len(values):
                raise IndexError(f"input index {idx} exceeds spectrum length {len(values)}")
            wire[i] = values[idx - 1]
        elif op == "min2":
            wire[i] = min(wire[a[0]], wire[a[1]])
        elif op == "max2":
            wire[i] = max(wire[a[0]], wire[a[1]])
        elif op == "subtract":
            wire[i] = wire[a[0]] - wire[a[1]]
        elif op == "compare":
            wire[i] = +1 if wire[a[0]] > net.theta else -1
            if i == net.output:
                result = int(wire[i])
        else:
            raise ValueError(f"unknown netlist op {op!r}")
    if result is None:
        raise ValueError("netlist output is not a compare node")
    return result


def netlist_to_json(net: Netlist) -> str:
    return json.dumps(
        {"nodes": net.nodes, "output": net.output, "theta": net.theta}, indent=2
    )


def netlist_from_json(text: str) -> Netlist:
    obj = json.loads(text)
    return Netlist(nodes=obj["nodes"], output=obj["output"], theta=obj["theta"])
