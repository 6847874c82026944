"""Flow-based structural constraints: spanning trees and connected sub-graphs.

The spanning-tree builder uses a single-commodity flow.  The root sends
``n - 1`` units, every other vertex keeps one, and only selected edges may
carry flow.  Together with ``sum(y) = n - 1`` the selected edges are feasible
exactly when they form a spanning tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from logic2ilp.boolexpr import Literal, VarId
from logic2ilp.ilpcore import Model
from logic2ilp import recipes


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledGraph:
    """Vertices ``1..n``; undirected edges are stored with ``i < j``."""

    n: int
    edges: tuple[tuple[int, int, float], ...] = ()
    directed: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"a graph needs at least one vertex, got n={self.n}")
        norm, seen = [], set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 0.0
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise GraphError(f"edge ({i}, {j}) has an endpoint outside 1..{self.n}")
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not self.directed and i > j:
                i, j = j, i
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            norm.append((i, j, w))
        object.__setattr__(self, "edges", tuple(norm))

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.edges]

    def weights(self) -> dict[tuple[int, int], float]:
        return {(i, j): w for i, j, w in self.edges}

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "directed": self.directed, "edges": [list(e) for e in self.edges]}
        )

    @classmethod
    def from_json(cls, text: str) -> "LabeledGraph":
        data = json.loads(text)
        try:
            return cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]), bool(data.get("directed", False)))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"bad graph JSON: {exc}") from None

    @classmethod
    def complete(cls, n: int, weight: float = 0.0) -> "LabeledGraph":
        return cls(n, tuple((i, j, weight) for i in range(1, n + 1) for j in range(i + 1, n + 1)))


@dataclass
class FlowVars:
    flows: dict[tuple[int, int], VarId] = field(default_factory=dict)
    rows: list[int] = field(default_factory=list)


def edge_variables(model: Model, graph: LabeledGraph, prefix: str = "y") -> dict[tuple[int, int], VarId]:
    """One binary per edge, scored by the edge weight."""
    return {(i, j): model.binary(f"{prefix}_{i}_{j}", w) for i, j, w in graph.edges}


def spanning_tree(
    model: Model,
    graph: LabeledGraph,
    edge_vars: Mapping[tuple[int, int], VarId],
    root: int = 1,
    prefix: str = "f",
    tag: str = "spanning-tree",
) -> FlowVars:
    if graph.directed:
        raise GraphError("spanning_tree needs an undirected graph")
    n = graph.n
    if not 1 <= root <= n:
        raise GraphError(f"root {root} is not a vertex")
    missing = [p for p in graph.pairs() if p not in edge_vars]
    if missing:
        raise GraphError(f"edge_vars has no variable for edges {missing}")
    out = FlowVars()
    if n == 1:
        return out
    for i, j in graph.pairs():
        out.flows[(i, j)] = model.add_var("continuous", f"{prefix}_{i}_{j}", 0, n - 1, 0.0)
        out.flows[(j, i)] = model.add_var("continuous", f"{prefix}_{j}_{i}", 0, n - 1, 0.0)

    def balance(v: int):
        # incoming minus outgoing flow at v
        terms = []
        for (a, b), f in out.flows.items():
            if b == v:
                terms.append((1, f))
            elif a == v:
                terms.append((-1, f))
        return terms

    root_terms = [(-c, f) for c, f in balance(root)]
    out.rows.append(model.add_constraint(root_terms, "=", n - 1, tag))
    for v in range(1, n + 1):
        if v != root:
            out.rows.append(model.add_constraint(balance(v), "=", 1, tag))
    for i, j in graph.pairs():
        y = edge_vars[(i, j)]
        out.rows.append(model.add_constraint([(1, out.flows[(i, j)]), (-(n - 1), y)], "<=", 0, tag))
        out.rows.append(model.add_constraint([(1, out.flows[(j, i)]), (-(n - 1), y)], "<=", 0, tag))
    out.rows.append(
        model.add_constraint([(1, edge_vars[p]) for p in graph.pairs()], "=", n - 1, tag)
    )
    return out


@dataclass
class ConnectivityVars:
    z: dict[tuple[int, int], VarId] = field(default_factory=dict)
    flow: FlowVars = field(default_factory=FlowVars)
    rows: list[int] = field(default_factory=list)


def connected_subgraph(
    model: Model,
    graph: LabeledGraph,
    directed_edge_vars: Mapping[tuple[int, int], VarId | Sequence],
    root: int = 1,
    prefix: str = "z",
    tag: str = "connectivity",
) -> ConnectivityVars:
    """Selected directed edges must connect all vertices (ignoring direction).

    A value in ``directed_edge_vars`` may also be a list of literals, meaning
    the edge is present when any of them is true.
    """
    if not graph.directed:
        raise GraphError("connected_subgraph needs a directed graph")
    missing = [p for p in graph.pairs() if p not in directed_edge_vars]
    if missing:
        raise GraphError(f"directed_edge_vars has no variable for edges {missing}")
    out = ConnectivityVars()
    if graph.n == 1:
        return out
    undirected = sorted({(min(i, j), max(i, j)) for i, j in graph.pairs()})
    for i, j in undirected:
        out.z[(i, j)] = model.binary(f"{prefix}_{i}_{j}")
    tree = LabeledGraph(graph.n, tuple((i, j, 0.0) for i, j in undirected))
    out.flow = spanning_tree(model, tree, out.z, root=root, prefix=f"{prefix}f", tag=tag)
    for i, j in undirected:
        support = []
        for p in ((i, j), (j, i)):
            v = directed_edge_vars.get(p)
            if v is not None:
                support += [v] if isinstance(v, (VarId, Literal)) else list(v)
        out.rows += recipes.implication(model, [out.z[(i, j)]], support, tag=tag)
    return out


# Figure graph from the worked example: 5 vertices, 8 weighted edges.
FIGURE_GRAPH = LabeledGraph(
    5,
    (
        (1, 2, 10),
        (1, 3, 50),
        (1, 5, 5),
        (2, 3, 11),
        (2, 5, 15),
        (3, 4, -9),
        (3, 5, -7),
        (4, 5, -50),
    ),
)
