"""Flows, cuts, and disjoint paths on networks with vertex capacities.

Networks here bound how much flow may pass *through* each vertex rather
than along each edge. Every algorithm reduces the problem to ordinary
arc capacities by splitting each vertex ``v`` into an in-node and an
out-node joined by an arc of capacity ``c(v)``; original edges become
arcs of effectively unbounded capacity between out- and in-nodes.

Terminal vertices are exempt from their own capacity: a cut never
contains the source or the sink, so constraining them would make the
maximum flow smaller than the minimum cut.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    InvalidFlow,
    NoCutExists,
    SchemaError,
    UnsupportedCapacities,
)

Edge = tuple[int, int]

# Residual capacities below this are treated as exactly zero.
_ZERO = 1e-12


@dataclass
class VertexCapNetwork:
    """Directed network with a flow capacity at every vertex.

    Missing entries in ``vertex_capacity`` default to 1.0. ``source``
    and ``sink`` must be distinct member vertices; self-loops are
    rejected.
    """

    vertices: set[int]
    edges: set[Edge]
    vertex_capacity: dict[int, float] = field(default_factory=dict)
    source: int = 0
    sink: int = 1

    def __post_init__(self):
        self.vertices = set(self.vertices)
        self.edges = {(int(u), int(v)) for u, v in self.edges}
        self.vertex_capacity = {int(k): float(c) for k, c in self.vertex_capacity.items()}
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        if self.source not in self.vertices or self.sink not in self.vertices:
            raise ValueError("source and sink must be member vertices")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge ({u}, {v}) references unknown vertex")
        for v, c in self.vertex_capacity.items():
            if v not in self.vertices:
                raise ValueError(f"capacity given for unknown vertex {v}")
            if c < 0:
                raise ValueError(f"negative capacity at vertex {v}")

    def cap(self, v: int) -> float:
        return self.vertex_capacity.get(v, 1.0)

    def successors(self, u: int) -> list[int]:
        return sorted(v for (a, v) in self.edges if a == u)

    def predecessors(self, v: int) -> list[int]:
        return sorted(u for (u, b) in self.edges if b == v)


@dataclass
class Flow:
    """Edge flows plus the total amount shipped from source to sink."""

    edge_flow: dict[Edge, float]
    value: float


@dataclass
class VertexCut:
    """Partition [S, C, S_bar] where removing C blocks every s-t path."""

    S: set[int]
    C: set[int]
    S_bar: set[int]
    capacity: float


@dataclass
class SplitNetwork:
    """Arc-capacitated reduction of a vertex-capacitated network.

    Nodes are pairs ``(v, side)`` with side 0 for the in-node and 1 for
    the out-node. ``arc_capacity`` holds the capacity of every arc,
    ``big`` is the finite stand-in for unbounded edge capacity, and
    ``original_vertex`` maps split nodes back to the vertex they came
    from.
    """

    arc_capacity: dict[tuple, float]
    source: tuple
    sink: tuple
    big: float
    original_vertex: dict[tuple, int]


def _in(v: int) -> tuple:
    return (v, 0)


def _out(v: int) -> tuple:
    return (v, 1)


def split_vertices(net: VertexCapNetwork) -> SplitNetwork:
    """Split every vertex into an in/out node pair joined by a capacity arc.

    The in-out arc of an internal vertex carries the vertex capacity;
    terminal in-out arcs and all original edges carry a finite sentinel
    equal to ``1 + sum of all vertex capacities``, which no minimum cut
    can use.
    """
    big = 1.0 + sum(net.cap(v) for v in net.vertices)
    arcs: dict[tuple, float] = {}
    orig: dict[tuple, int] = {}
    for v in net.vertices:
        c = big if v in (net.source, net.sink) else net.cap(v)
        arcs[(_in(v), _out(v))] = c
        orig[_in(v)] = v
        orig[_out(v)] = v
    for u, v in net.edges:
        arcs[(_out(u), _in(v))] = big
    return SplitNetwork(
        arc_capacity=arcs,
        source=_in(net.source),
        sink=_out(net.sink),
        big=big,
        original_vertex=orig,
    )


def _residual_max_flow(split: SplitNetwork) -> tuple[float, dict, dict]:
    """Edmonds-Karp on the split network.

    Returns (value, flow-per-arc, residual adjacency). The residual
    adjacency maps node -> {node: remaining capacity} and includes
    reverse arcs, so reachability on it identifies the minimum cut.
    """
    residual: dict[tuple, dict[tuple, float]] = {}

    def add(u, v, c):
        residual.setdefault(u, {})[v] = residual.get(u, {}).get(v, 0.0) + c
        residual.setdefault(v, {}).setdefault(u, 0.0)

    for (u, v), c in split.arc_capacity.items():
        add(u, v, c)

    s, t = split.source, split.sink
    value = 0.0
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if u == t:
                break
            for v in sorted(residual.get(u, {})):
                if v not in parent and residual[u][v] > _ZERO:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            break
        bottleneck = math.inf
        node = t
        while parent[node] is not None:
            p = parent[node]
            bottleneck = min(bottleneck, residual[p][node])
            node = p
        node = t
        while parent[node] is not None:
            p = parent[node]
            residual[p][node] -= bottleneck
            residual[node][p] += bottleneck
            node = p
        value += bottleneck

    flow = {
        arc: split.arc_capacity[arc] - residual[arc[0]][arc[1]]
        for arc in split.arc_capacity
    }
    return value, flow, residual


def max_flow(net: VertexCapNetwork) -> Flow:
    """Maximum s-t flow honoring vertex capacities.

    Computed by shortest augmenting paths on the split network. A
    missing s-t path yields a flow of value 0. A direct source-sink
    edge is uninterceptable, so its contribution is only bounded by the
    internal sentinel capacity.
    """
    split = split_vertices(net)
    value, arc_flow, _ = _residual_max_flow(split)
    edge_flow = {}
    for u, v in net.edges:
        f = arc_flow[(_out(u), _in(v))]
        edge_flow[(u, v)] = 0.0 if abs(f) <= _ZERO else f
    return Flow(edge_flow=edge_flow, value=0.0 if abs(value) <= _ZERO else value)


def min_vertex_cut(net: VertexCapNetwork) -> VertexCut:
    """Minimum-capacity vertex cut separating source from sink.

    The returned partition is source-side minimal: S is the set of
    vertices still reachable in the residual network of a maximum flow,
    C its saturated frontier. Raises :class:`NoCutExists` when source
    and sink are adjacent (no internal vertex set can separate them).
    """
    s, t = net.source, net.sink
    if (s, t) in net.edges or (t, s) in net.edges:
        raise NoCutExists(f"source {s} and sink {t} are adjacent")
    split = split_vertices(net)
    _, _, residual = _residual_max_flow(split)

    reachable = {split.source}
    queue = deque([split.source])
    while queue:
        u = queue.popleft()
        for v, c in residual.get(u, {}).items():
            if c > _ZERO and v not in reachable:
                reachable.add(v)
                queue.append(v)

    C = {v for v in net.vertices if _in(v) in reachable and _out(v) not in reachable}
    S = {v for v in net.vertices if _in(v) in reachable} - C
    S_bar = net.vertices - S - C
    capacity = sum(net.cap(v) for v in C)
    return VertexCut(S=S, C=C, S_bar=S_bar, capacity=capacity)


def vertex_disjoint_paths(net: VertexCapNetwork) -> list[list[int]]:
    """Maximum set of s-t paths sharing no internal vertex.

    Requires unit capacity on every internal vertex; the count equals
    the minimum vertex-cut capacity. Paths are extracted by integral
    decomposition of a maximum flow on the split network.
    """
    for v in net.vertices:
        if v in (net.source, net.sink):
            continue
        if net.cap(v) != 1.0:
            raise UnsupportedCapacities(f"vertex {v} has capacity {net.cap(v)} != 1")
    split = split_vertices(net)
    value, arc_flow, _ = _residual_max_flow(split)
    count = round(value)

    live = {arc: f for arc, f in arc_flow.items() if f > 0.5}
    paths = []
    for _ in range(count):
        node = split.source
        path = [net.source]
        while node != split.sink:
            nxt = min(v for (u, v) in live if u == node)
            live[(node, nxt)] -= 1.0
            if live[(node, nxt)] < 0.5:
                del live[(node, nxt)]
            if nxt[1] == 0:  # an in-node: we just arrived at a new vertex
                path.append(nxt[0])
            node = nxt
        paths.append(path)
    return paths


def _peel_paths(
    edge_flow: dict[Edge, float], source: int, sink: int
) -> tuple[list[tuple[list[int], float]], dict[Edge, float]]:
    """Greedily peel s-t paths off an edge-flow map.

    Returns the peeled (path, weight) list and whatever flow remains
    (circulations, or nothing). Successors are visited in sorted order
    so the decomposition is deterministic.
    """
    residual = {e: f for e, f in edge_flow.items() if f > _ZERO}
    succ: dict[int, list[int]] = {}
    for u, v in residual:
        succ.setdefault(u, []).append(v)
    for u in succ:
        succ[u].sort()

    paths = []
    while True:
        parent: dict[int, int] = {source: source}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            if u == sink:
                break
            for v in succ.get(u, []):
                if residual.get((u, v), 0.0) > _ZERO and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        path = [sink]
        while path[-1] != source:
            path.append(parent[path[-1]])
        path.reverse()
        weight = min(residual[(path[i], path[i + 1])] for i in range(len(path) - 1))
        for i in range(len(path) - 1):
            e = (path[i], path[i + 1])
            residual[e] -= weight
            if residual[e] <= _ZERO:
                del residual[e]
        paths.append((path, weight))
    return paths, residual


def validate_flow(
    net: VertexCapNetwork, flow: Flow, tol: float = 1e-9, check_capacity: bool = True
) -> None:
    """Raise :class:`InvalidFlow` unless ``flow`` is feasible on ``net``.

    ``check_capacity=False`` skips the vertex-capacity bound, which is
    what strategy flows promise (conservation only).
    """
    for e, f in flow.edge_flow.items():
        if e not in net.edges:
            raise InvalidFlow(f"flow on unknown edge {e}")
        if f < -tol:
            raise InvalidFlow(f"negative flow on edge {e}")
    inflow = {v: 0.0 for v in net.vertices}
    outflow = {v: 0.0 for v in net.vertices}
    for (u, v), f in flow.edge_flow.items():
        outflow[u] += f
        inflow[v] += f
    for v in net.vertices:
        if v in (net.source, net.sink):
            continue
        if abs(inflow[v] - outflow[v]) > tol:
            raise InvalidFlow(f"conservation violated at vertex {v}")
        if check_capacity and inflow[v] > net.cap(v) + tol:
            raise InvalidFlow(f"capacity exceeded at vertex {v}")
    net_out = outflow[net.source] - inflow[net.source]
    net_in = inflow[net.sink] - outflow[net.sink]
    if abs(net_out - flow.value) > tol or abs(net_in - flow.value) > tol:
        raise InvalidFlow("flow value inconsistent with terminal balance")


def flow_decompose(
    net: VertexCapNetwork, flow: Flow, tol: float = 1e-9
) -> list[tuple[list[int], float]]:
    """Decompose a flow into weighted s-t paths.

    Weights sum to the flow value and the weighted superposition of the
    returned paths reproduces the edge flows. Flows containing
    circulation components cannot be written as a path mixture and are
    rejected.
    """
    validate_flow(net, flow, tol=tol)
    paths, residual = _peel_paths(flow.edge_flow, net.source, net.sink)
    leftover = sum(residual.values())
    if leftover > tol:
        raise InvalidFlow(
            f"flow contains a circulation component of size {leftover:.3g}"
        )
    return paths


def network_from_json(obj: dict) -> VertexCapNetwork:
    """Parse the network JSON schema into a :class:`VertexCapNetwork`.

    Schema: ``{"vertices": [ids], "edges": [[u, v], ...],
    "capacities": {id: real}, "source": id, "sink": id}`` with missing
    capacities defaulting to 1.0.
    """
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected a JSON object")
    for key in ("vertices", "edges", "source", "sink"):
        if key not in obj:
            raise SchemaError(key, "missing required field")
    try:
        vertices = {int(v) for v in obj["vertices"]}
    except (TypeError, ValueError):
        raise SchemaError("vertices", "expected a list of integer ids")
    edges = set()
    for i, pair in enumerate(obj["edges"]):
        try:
            u, v = pair
            edges.add((int(u), int(v)))
        except (TypeError, ValueError):
            raise SchemaError(f"edges[{i}]", "expected a [u, v] pair")
    capacities = {}
    for k, c in obj.get("capacities", {}).items():
        try:
            capacities[int(k)] = float(c)
        except (TypeError, ValueError):
            raise SchemaError(f"capacities.{k}", "expected vertex id -> real")
    try:
        net = VertexCapNetwork(
            vertices=vertices,
            edges=edges,
            vertex_capacity=capacities,
            source=int(obj["source"]),
            sink=int(obj["sink"]),
        )
    except ValueError as exc:
        raise SchemaError("network", str(exc))
    return net


def network_to_json(net: VertexCapNetwork) -> dict:
    return {
        "vertices": sorted(net.vertices),
        "edges": [[u, v] for u, v in sorted(net.edges)],
        "capacities": {str(v): net.vertex_capacity.get(v, 1.0) for v in sorted(net.vertices)},
        "source": net.source,
        "sink": net.sink,
    }
