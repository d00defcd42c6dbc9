"""Traffic flows on a general road network driven by Markovian route choice.

Drivers at an intersection pick their next link according to a transition
matrix ``P`` over nodes. Moving the chain to the line graph (one state per
link, arcs between consecutive links) turns link flows into the fixed point

    f = L(P)' f + diag(p) O delta 1

where ``p`` holds each link's own choice probability, ``O`` marks link
origins and ``delta`` is the demand matrix. On an acyclic network ``L(P)'``
is nilpotent, so the Neumann series is finite and exact; a dense solve of
the same system cross-checks it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .exceptions import CyclicGraphError, DomainError, SolverError

DEMAND_FORMS = ("d", "dminus")


@dataclass(frozen=True, eq=False)
class RoadNetwork:
    """Directed road network with route-choice probabilities and demand.

    ``links`` are (origin, destination) node-index pairs; ``P[i, j]`` is the
    probability of taking link ``(i, j)`` when standing at node ``i``; ``D``
    is the origin-destination demand matrix. Rows of ``P`` at nodes with
    outgoing links must sum to 1; nodes without outgoing links (pure sinks)
    have zero rows. Self loops are rejected. Acyclicity is not required to
    build a network; operations that need it check for themselves.
    """

    n_nodes: int
    links: tuple[tuple[int, int], ...]
    P: np.ndarray
    D: np.ndarray
    node_names: tuple[str, ...] | None = None

    def __post_init__(self):
        links = tuple((int(i), int(j)) for i, j in self.links)
        object.__setattr__(self, "links", links)
        if self.node_names is None:
            object.__setattr__(
                self, "node_names", tuple(str(v) for v in range(self.n_nodes))
            )
        elif len(self.node_names) != self.n_nodes:
            raise DomainError("node_names length differs from n_nodes")
        if len(set(links)) != len(links):
            raise DomainError("duplicate links")
        P = np.asarray(self.P, dtype=float)
        D = np.asarray(self.D, dtype=float)
        n = self.n_nodes
        if P.shape != (n, n) or D.shape != (n, n):
            raise DomainError(f"P and D must be {n}x{n}")
        for i, j in links:
            if not (0 <= i < n and 0 <= j < n):
                raise DomainError(f"link ({i}, {j}) references a missing node")
            if i == j:
                raise DomainError(f"self loop at node {i}")
        support = np.zeros((n, n), dtype=bool)
        for i, j in links:
            support[i, j] = True
        if np.any((P > 0) & ~support):
            raise DomainError("P assigns probability to a non-link")
        if np.min(P) < 0 or np.min(D) < 0:
            raise DomainError("P and D must be nonnegative")
        out_nodes = {i for i, _ in links}
        rows = P.sum(axis=1)
        for v in range(n):
            want = 1.0 if v in out_nodes else 0.0
            if abs(rows[v] - want) > 1e-9:
                raise DomainError(
                    f"row {v} of P sums to {rows[v]!r}, expected {want:g}"
                )
        if np.trace(D) != 0:
            raise DomainError("demand from a node to itself")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "D", D)

    @property
    def n_links(self) -> int:
        return len(self.links)


def topological_order(net: RoadNetwork) -> list[int]:
    """Topological node order; raises ``CyclicGraphError`` on a cycle."""
    indeg = [0] * net.n_nodes
    succ: list[list[int]] = [[] for _ in range(net.n_nodes)]
    for i, j in net.links:
        succ[i].append(j)
        indeg[j] += 1
    ready = deque(v for v in range(net.n_nodes) if indeg[v] == 0)
    order = []
    while ready:
        v = ready.popleft()
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) != net.n_nodes:
        raise CyclicGraphError("road network contains a directed cycle")
    return order


@dataclass(frozen=True, eq=False)
class LineGraph:
    """Link-level view of a road network: one state per link."""

    parent: RoadNetwork
    LP: np.ndarray  # LP[l, m]: probability of continuing onto link m after link l
    p: np.ndarray  # p[l]: probability of choosing link l at its origin
    O: np.ndarray  # O[l, v] = 1 iff link l starts at node v


def line_graph(net: RoadNetwork) -> LineGraph:
    L = net.n_links
    LP = np.zeros((L, L))
    for l, (_, dest) in enumerate(net.links):
        for m, (orig, nxt) in enumerate(net.links):
            if orig == dest:
                LP[l, m] = net.P[dest, nxt]
    p = np.array([net.P[i, j] for i, j in net.links])
    O = np.zeros((L, net.n_nodes))
    for l, (i, _) in enumerate(net.links):
        O[l, i] = 1.0
    return LineGraph(parent=net, LP=LP, p=p, O=O)


def _source_term(lg: LineGraph, demand_form: str) -> np.ndarray:
    if demand_form not in DEMAND_FORMS:
        raise DomainError(f"demand form must be one of {DEMAND_FORMS}")
    D = lg.parent.D
    node_out = D @ np.ones(D.shape[0])
    if demand_form == "dminus":
        node_out = (D - D.T) @ np.ones(D.shape[0])
    return lg.p * (lg.O @ node_out)


def equilibrium_flow(net: RoadNetwork, *, demand_form: str = "d") -> np.ndarray:
    """Per-link equilibrium flows for the injected demand.

    Evaluated twice, by the finite Neumann series (valid because ``L(P)'``
    is nilpotent on an acyclic network) and by a dense linear solve; the two
    must agree to 1e-10 or the call fails rather than return a guess.
    """
    topological_order(net)  # acyclicity gate
    lg = line_graph(net)
    src = _source_term(lg, demand_form)
    Lt = lg.LP.T

    acc = src.copy()
    term = src.copy()
    for _ in range(net.n_links):
        term = Lt @ term
        acc = acc + term

    direct = np.linalg.solve(np.eye(net.n_links) - Lt, src)
    scale = max(1.0, float(np.max(np.abs(direct))))
    if float(np.max(np.abs(acc - direct), initial=0.0)) > 1e-10 * scale:
        raise SolverError("series and dense equilibrium solves disagree")
    if demand_form == "d" and direct.size and float(np.min(direct)) < -1e-12:
        raise SolverError("negative equilibrium flow from nonnegative demand")
    return direct


def _single_od(net: RoadNetwork) -> tuple[int, int, float]:
    nz = np.argwhere(net.D > 0)
    if nz.shape[0] != 1:
        raise DomainError("path operations need exactly one origin-destination demand")
    o, d = (int(v) for v in nz[0])
    return o, d, float(net.D[o, d])


def enumerate_paths(net: RoadNetwork, origin: int, destination: int) -> list[tuple[int, ...]]:
    """All origin-destination paths as tuples of link indices (DFS order)."""
    topological_order(net)
    by_origin: dict[int, list[int]] = {}
    for l, (i, _) in enumerate(net.links):
        by_origin.setdefault(i, []).append(l)
    paths: list[tuple[int, ...]] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(origin, ())]
    while stack:
        node, used = stack.pop()
        if node == destination:
            paths.append(used)
            continue
        for l in reversed(by_origin.get(node, [])):
            stack.append((net.links[l][1], used + (l,)))
    return paths


def path_probabilities(net: RoadNetwork) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Every OD path with its Markov-chain probability (product of link picks)."""
    o, d, _ = _single_od(net)
    lg = line_graph(net)
    paths = enumerate_paths(net, o, d)
    rho = np.array([np.prod(lg.p[list(path)]) if path else 1.0 for path in paths])
    return paths, rho


def expected_path_flows(net: RoadNetwork) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Expected flow on each OD path: demand times path probability."""
    o, d, demand = _single_od(net)
    paths, rho = path_probabilities(net)
    return paths, demand * rho


def aggregate_path_flows(net: RoadNetwork) -> np.ndarray:
    """Per-link flows obtained by summing expected path flows through each link."""
    paths, h = expected_path_flows(net)
    f = np.zeros(net.n_links)
    for path, flow in zip(paths, h):
        for l in path:
            f[l] += flow
    return f


def demand_balance_check(net: RoadNetwork) -> float:
    """Net demand injection measured through the choice probabilities.

    Equals ``1' diag(p) O (D - D') 1``; zero whenever every node carrying
    demand has unit outgoing probability (closed networks). On an acyclic
    network the destination is a sink, so the scalar instead reports the
    demand absorbed there.
    """
    lg = line_graph(net)
    diff = (net.D - net.D.T) @ np.ones(net.n_nodes)
    return float(np.ones(net.n_links) @ (lg.p * (lg.O @ diff)))


def nilpotency_index(net: RoadNetwork) -> int:
    """Smallest ``k`` with ``L(P)'^k = 0`` exactly; raises on cyclic networks."""
    topological_order(net)
    lg = line_graph(net)
    M = np.eye(net.n_links)
    for k in range(1, net.n_links + 2):
        M = lg.LP.T @ M
        if not M.any():
            return k
    raise CyclicGraphError("transition matrix is not nilpotent")
