"""
Network Fixtures

Builders for the worked example networks, the QSAT chains they are
checked against, and seeded random power-of-two networks.
"""

from typing import Optional, Sequence

from core.netgraph import Network, parse_network
from utils.seeding import rng_for


def _build(name: str, lines: Sequence[str]) -> Network:
    return parse_network("\n".join(lines) + "\n", name=name)


def passthrough(capacity: int, name: str = "") -> Network:
    """No vertices, one edge from S.1 to T.1."""
    return _build(name or f"wire{capacity}", [f"e {capacity} S.1 T.1"])


def three_vertex_network(top_in: int, mid_in: int, bottom_in: int, top_link: int,
                         bottom_link: int, top_out: int, bottom_out: int, name: str) -> Network:
    """
    The three-vertex graph shared by the rank-7 example and its generalizations.

    Inputs S.1, S.2, S.3 enter the top, middle and bottom vertices; the
    middle vertex links to both others; T.1 leaves the top and T.2 the
    bottom vertex.
    """
    return _build(name, [
        "v mid 3",
        "v top 3",
        "v bottom 3",
        f"e {top_in} S.1 top.1",
        f"e {mid_in} S.2 mid.1",
        f"e {bottom_in} S.3 bottom.1",
        f"e {top_link} mid.2 top.2",
        f"e {bottom_link} mid.3 bottom.2",
        f"e {top_out} top.3 T.1",
        f"e {bottom_out} bottom.3 T.2",
    ])


def fig3() -> Network:
    """Inputs 2,2,2; internal 2,2; outputs 3,3 (QMC 8, QMF 7)."""
    return three_vertex_network(2, 2, 2, 2, 2, 3, 3, name="fig3")


def fig4(p: int, q: int) -> Network:
    """fig3 with internal capacities q (middle-top) and p (middle-bottom)."""
    return three_vertex_network(2, 2, 2, q, p, 3, 3, name=f"fig4_p{p}_q{q}")


def fig7_family(n: int, j: int, k: int) -> Network:
    """Inputs n,2,n; internal 2,2; outputs 2n-k (top) and 2n-j (bottom)."""
    return three_vertex_network(n, 2, n, 2, 2, 2 * n - k, 2 * n - j, name=f"fig7_n{n}_j{j}_k{k}")


def square_l1() -> Network:
    """
    Four degree-3 vertices, all capacities 2, ordering L1.

    Left vertices: port 1 input, port 2 horizontal, port 3 diagonal.
    Right vertices: port 1 output, port 2 diagonal, port 3 horizontal.
    """
    return _build("fig5_L1", [
        "v BL 3", "v TL 3", "v BR 3", "v TR 3",
        "e 2 S.1 BL.1",
        "e 2 S.2 TL.1",
        "e 2 BR.1 T.1",
        "e 2 TR.1 T.2",
        "e 2 BL.2 BR.3",
        "e 2 TL.2 TR.3",
        "e 2 TL.3 BR.2",
        "e 2 BL.3 TR.2",
    ])


def square_l2() -> Network:
    """square_l1 with the horizontal and diagonal ports of the lower-left vertex exchanged."""
    return _build("fig6_L2", [
        "v BL 3", "v TL 3", "v BR 3", "v TR 3",
        "e 2 S.1 BL.1",
        "e 2 S.2 TL.1",
        "e 2 BR.1 T.1",
        "e 2 TR.1 T.2",
        "e 2 BL.3 BR.3",
        "e 2 TL.2 TR.3",
        "e 2 TL.3 BR.2",
        "e 2 BL.2 TR.2",
    ])


def hexagon_l3() -> Network:
    """
    Six degree-3 vertices in two columns of three, all capacities 2.

    Horizontals join L_i to R_i; diagonals join L1-R0, L2-R1 and L0-R2.
    Ports follow square_l1 on each side.
    """
    lines = ["v L0 3", "v L1 3", "v L2 3", "v R0 3", "v R1 3", "v R2 3"]
    for i in range(3):
        lines.append(f"e 2 S.{i + 1} L{i}.1")
    for i in range(3):
        lines.append(f"e 2 R{i}.1 T.{i + 1}")
    for i in range(3):
        lines.append(f"e 2 L{i}.2 R{i}.3")
    for left, right in ((1, 0), (2, 1), (0, 2)):
        lines.append(f"e 2 L{left}.3 R{right}.2")
    return _build("fig7_L3", lines)


def three_qudit_network(d1: int, d2: int, d3: int, r1: int, r2: int) -> Optional[Network]:
    """
    Network whose max flow matches the three-qudit chain.

    Inputs d1*d2-r1 and d3; internal d2; outputs d1 and r2. Returns None
    when a capacity would be zero (the map is then zero).
    """
    caps = (d1 * d2 - r1, d3, d2, d1, r2)
    if min(caps) < 1:
        return None
    return _build(f"claim3_{d1}_{d2}_{d3}_{r1}_{r2}", [
        "v A 3",
        "v B 3",
        f"e {d1 * d2 - r1} S.1 A.1",
        f"e {d3} S.2 B.1",
        f"e {d2} A.2 B.2",
        f"e {d1} A.3 T.1",
        f"e {r2} B.3 T.2",
    ])


def four_qudit_network(d1: int, d2: int, d3: int, d4: int,
                       r1: int, r2: int, r3: int) -> Optional[Network]:
    """
    Network whose max flow matches the four-qudit chain.

    Inputs d3*d4-r3 (vertex B) and d1*d2-r1 (vertex A); A sends d2 and B
    sends d3 to the middle vertex; outputs d1 (A), r2 (middle), d4 (B).
    Returns None when a capacity would be zero.
    """
    caps = (d3 * d4 - r3, d1 * d2 - r1, d1, d2, d3, d4, r2)
    if min(caps) < 1:
        return None
    return _build(f"claim4_{d1}_{d2}_{d3}_{d4}_{r1}_{r2}_{r3}", [
        "v A 3",
        "v M 3",
        "v B 3",
        f"e {d3 * d4 - r3} S.1 B.1",
        f"e {d1 * d2 - r1} S.2 A.1",
        f"e {d1} A.3 T.1",
        f"e {d2} A.2 M.1",
        f"e {d3} B.2 M.2",
        f"e {r2} M.3 T.2",
        f"e {d4} B.3 T.3",
    ])


def random_power_network(seed: int, max_vertices: int = 6, max_valence: int = 1 << 12) -> Network:
    """
    Seeded random connected network with capacities in {2, 4, 8}.

    Each vertex carries at most one input and one output terminal (capacity
    2 or 4), vertices are chained by a path, and extra edges are added
    while the product of port capacities at both ends stays within
    ``max_valence``.
    """
    rng = rng_for(seed, "random-power-network")
    n = int(rng.integers(2, max_vertices + 1))
    names = [f"v{i}" for i in range(n)]
    ports = {name: 0 for name in names}
    valence = {name: 1 for name in names}
    edges = []

    def attach(name: str, cap: int) -> str:
        ports[name] += 1
        valence[name] *= cap
        return f"{name}.{ports[name]}"

    n_in = int(rng.integers(1, min(3, n) + 1))
    n_out = int(rng.integers(1, min(3, n) + 1))
    for k, idx in enumerate(sorted(rng.choice(n, size=n_in, replace=False)), start=1):
        cap = int(rng.choice([2, 4]))
        edges.append(f"e {cap} S.{k} {attach(names[idx], cap)}")
    for k, idx in enumerate(sorted(rng.choice(n, size=n_out, replace=False)), start=1):
        cap = int(rng.choice([2, 4]))
        edges.append(f"e {cap} {attach(names[idx], cap)} T.{k}")

    order = [names[i] for i in rng.permutation(n)]
    for a, b in zip(order, order[1:]):
        cap = int(rng.choice([2, 4, 8]))
        edges.append(f"e {cap} {attach(a, cap)} {attach(b, cap)}")

    for _ in range(int(rng.integers(0, n + 1))):
        i, j = (int(x) for x in rng.choice(n, size=2, replace=False))
        cap = int(rng.choice([2, 4, 8]))
        a, b = names[i], names[j]
        if valence[a] * cap > max_valence or valence[b] * cap > max_valence:
            continue
        edges.append(f"e {cap} {attach(a, cap)} {attach(b, cap)}")

    lines = [f"v {name} {ports[name]}" for name in names] + edges
    return _build(f"power2_{seed}", lines)
