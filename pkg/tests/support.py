"""
Shared test helpers: an isolated configuration, a brute-force contraction
oracle and hypothesis strategies for small networks.
"""

import itertools
import math
import shutil
import tempfile
import unittest

import numpy as np
from hypothesis import strategies as st

import config as config_module
from config import Config
from core.netgraph import Network, parse_network


class ConfigTestCase(unittest.TestCase):
    """Installs a throwaway Config for the duration of each test."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.config = Config(config_dir=self.test_dir, data_dir=self.test_dir)
        self.original_config = config_module._config_instance
        config_module._config_instance = self.config

    def tearDown(self):
        config_module._config_instance = self.original_config
        shutil.rmtree(self.test_dir, ignore_errors=True)


def brute_force_matrix(net: Network, tensors, p=None) -> np.ndarray:
    """
    Output-by-input matrix by summing over every index of every edge.

    Each edge carries one index shared by both of its ends, so terminal
    pass-throughs give identities and self-loops give traces.
    """
    out_dims = [net.edges[e].capacity for e in net.outputs]
    in_dims = [net.edges[e].capacity for e in net.inputs]
    dtype = object if p is not None else np.complex128
    matrix = np.zeros((math.prod(out_dims), math.prod(in_dims)), dtype=dtype)

    for values in itertools.product(*[range(e.capacity) for e in net.edges]):
        term = 1
        for vid in net.vertex_ids:
            index = tuple(values[eid] for eid in net.port_edges[vid])
            term = term * tensors[vid][index]
        if term == 0:
            continue
        row = 0
        for eid, dim in zip(net.outputs, out_dims):
            row = row * dim + values[eid]
        col = 0
        for eid, dim in zip(net.inputs, in_dims):
            col = col * dim + values[eid]
        matrix[row, col] += term
    if p is not None:
        matrix = np.mod(matrix, p)
    return matrix


@st.composite
def small_networks(draw, max_vertices=3, max_capacity=3, max_configurations=2000):
    """
    Valid networks with up to ``max_vertices`` vertices, small capacities,
    optional self-loops and pass-through wires.
    """
    n = draw(st.integers(1, max_vertices))
    names = [f"v{i}" for i in range(n)]
    ports = {name: 0 for name in names}
    lines = []

    def attach(name):
        ports[name] += 1
        return f"{name}.{ports[name]}"

    cap = st.integers(1, max_capacity)
    n_in = draw(st.integers(0, 2))
    n_out = draw(st.integers(0, 2))
    for k in range(1, n_in + 1):
        lines.append(f"e {draw(cap)} S.{k} {attach(draw(st.sampled_from(names)))}")
    for k in range(1, n_out + 1):
        lines.append(f"e {draw(cap)} {attach(draw(st.sampled_from(names)))} T.{k}")
    for _ in range(draw(st.integers(0, 3))):
        a = draw(st.sampled_from(names))
        b = draw(st.sampled_from(names))
        lines.append(f"e {draw(cap)} {attach(a)} {attach(b)}")
    if draw(st.booleans()):
        lines.append(f"e {draw(cap)} S.{n_in + 1} T.{n_out + 1}")

    text = "\n".join([f"v {name} {ports[name]}" for name in names] + lines) + "\n"
    net = parse_network(text, name="hyp")
    configurations = math.prod(e.capacity for e in net.edges)
    if configurations > max_configurations:
        # shrink every capacity to 1 or 2 instead of rejecting
        text = "\n".join([f"v {name} {ports[name]}" for name in names]
                         + [" ".join(["e", "2" if int(l.split()[1]) > 1 else "1"] + l.split()[2:])
                            for l in lines]) + "\n"
        net = parse_network(text, name="hyp")
    return net
