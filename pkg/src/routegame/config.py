"""JSON run configuration parsing.

A run config is a single JSON object with blocks::

    {
      "network":  {"edges": [{"a": 1.0, "b": 0.0}, ...]},
      "dynamics": {"gamma": 0.5, "A": "identity" | "uniform" | [[...]],
                   "B": ...},
      "cost":     {"kind": "rosenthal" | "social_welfare"}
                  or {"kind": "custom", "Q": [[...]], "R": ..., "Qf": ...,
                      "linear": [...]},
      "horizon":  15,
      "x0":       [0.3, 0.5, 0.2],
      "mode":     "mpc",
      "learner":  {"eta": 0.1, "steps": 100},
      "tolerances": {"tol": 1e-3, "window": 3},
      "seed":     0
    }

Only the blocks a command actually needs are required; every block is
validated by the owning module's checks before any computation, and all
failures surface as ConfigError.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from .dynamics import GameDynamics, uniform_averaging
from .exceptions import ConfigError, DomainError
from .markov import RoadNetwork
from .network import (
    COST_KINDS,
    ParallelNetwork,
    QuadraticCost,
    cost_from_network,
    network_from_coefficients,
)
from .validation import check_simplex, check_symmetric_psd

__all__ = [
    "RunConfig",
    "load_json",
    "parse_run_config",
    "load_run_config",
    "parse_road_network",
    "load_road_network",
]

MODES = ("mpc", "explicit", "open-loop", "mirror-descent")


@dataclass(frozen=True)
class RunConfig:
    """Validated, constructed objects for one command invocation."""

    network: Optional[ParallelNetwork]
    dynamics: Optional[GameDynamics]
    cost: Optional[QuadraticCost]
    horizon: int
    x0: Optional[np.ndarray]
    mode: str
    eta: float
    steps: int
    tol: float
    window: int
    seed: int


def load_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path!r}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config root in {path!r} must be a JSON object")
    return raw


def _as_matrix(spec: Any, n: int, name: str) -> np.ndarray:
    if isinstance(spec, str):
        if spec == "identity":
            return np.eye(n)
        if spec == "uniform":
            return uniform_averaging(n)
        raise ConfigError(
            f"dynamics {name!r} shorthand must be 'identity' or 'uniform', got {spec!r}"
        )
    try:
        mat = np.asarray(spec, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"dynamics {name!r} is not numeric: {exc}") from exc
    if mat.shape != (n, n):
        raise ConfigError(f"dynamics {name!r} must be {n}x{n}, got shape {mat.shape}")
    return mat


def _parse_network(block: Any) -> ParallelNetwork:
    if not isinstance(block, Mapping) or "edges" not in block:
        raise ConfigError("network block must be an object with an 'edges' list")
    edges = block["edges"]
    if not isinstance(edges, Sequence) or isinstance(edges, (str, bytes)):
        raise ConfigError("network 'edges' must be a list")
    slopes = []
    offsets = []
    for i, edge in enumerate(edges):
        if not isinstance(edge, Mapping):
            raise ConfigError(f"network edge {i} must be an object with 'a' and 'b'")
        try:
            slopes.append(float(edge.get("a", 0.0)))
            offsets.append(float(edge.get("b", 0.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"network edge {i} has non-numeric coefficient") from exc
    try:
        return network_from_coefficients(slopes, offsets)
    except (DomainError, ValueError) as exc:
        raise ConfigError(f"invalid network block: {exc}") from exc


def _parse_dynamics(block: Any, n: int) -> GameDynamics:
    if not isinstance(block, Mapping) or "gamma" not in block:
        raise ConfigError("dynamics block must be an object with 'gamma', 'A', 'B'")
    try:
        gamma = float(block["gamma"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("dynamics 'gamma' must be a number") from exc
    A = _as_matrix(block.get("A", "identity"), n, "A")
    B = _as_matrix(block.get("B", "identity"), n, "B")
    try:
        return GameDynamics(gamma=gamma, A=A, B=B)
    except (DomainError, ValueError) as exc:
        raise ConfigError(f"invalid dynamics block: {exc}") from exc


def _parse_cost(block: Any, net: ParallelNetwork) -> QuadraticCost:
    if block is None:
        block = {"kind": "social_welfare"}
    if not isinstance(block, Mapping):
        raise ConfigError("cost block must be an object")
    kind = block.get("kind", "social_welfare")
    if kind not in COST_KINDS:
        raise ConfigError(f"cost 'kind' must be one of {COST_KINDS}, got {kind!r}")
    n = net.n_edges
    if kind != "custom":
        return cost_from_network(net, kind=kind)
    if "Q" not in block:
        raise ConfigError("custom cost requires an explicit 'Q' matrix")

    def _mat(key: str, default: Optional[np.ndarray]) -> np.ndarray:
        if key not in block:
            if default is None:
                raise ConfigError(f"custom cost missing {key!r}")
            return default
        try:
            mat = np.asarray(block[key], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cost {key!r} is not numeric") from exc
        if mat.shape != (n, n):
            raise ConfigError(f"cost {key!r} must be {n}x{n}, got shape {mat.shape}")
        return mat

    Q = _mat("Q", None)
    R = _mat("R", np.zeros((n, n)))
    Qf = _mat("Qf", Q.copy())
    linear = np.asarray(block.get("linear", np.zeros(n)), dtype=float)
    if linear.shape != (n,):
        raise ConfigError(f"cost 'linear' must have length {n}")
    try:
        for name, mat in (("Q", Q), ("R", R), ("Qf", Qf)):
            check_symmetric_psd(mat, name=name)
    except DomainError as exc:
        raise ConfigError(f"invalid cost block: {exc}") from exc
    return QuadraticCost(Q=Q, R=R, Qf=Qf, linear=linear, kind="custom")


def parse_run_config(raw: Mapping[str, Any]) -> RunConfig:
    """Construct validated model objects from a raw config dictionary."""
    if not isinstance(raw, Mapping):
        raise ConfigError("config root must be a JSON object")

    network = _parse_network(raw["network"]) if "network" in raw else None

    dynamics = None
    cost = None
    if "dynamics" in raw:
        if network is None:
            raise ConfigError("dynamics block requires a network block")
        dynamics = _parse_dynamics(raw["dynamics"], network.n_edges)
    if "cost" in raw or network is not None:
        if network is None:
            raise ConfigError("cost block requires a network block")
        cost = _parse_cost(raw.get("cost"), network)

    try:
        horizon = int(raw.get("horizon", 15))
    except (TypeError, ValueError) as exc:
        raise ConfigError("'horizon' must be an integer") from exc
    if horizon < 1:
        raise ConfigError(f"'horizon' must be >= 1, got {horizon}")

    x0 = None
    if raw.get("x0") is not None:
        try:
            x0 = np.asarray(raw["x0"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError("'x0' must be a numeric vector") from exc
        if network is not None and x0.shape != (network.n_edges,):
            raise ConfigError(f"'x0' must have length {network.n_edges}")
        try:
            x0 = check_simplex(x0, name="x0")
        except DomainError as exc:
            raise ConfigError(f"invalid 'x0': {exc}") from exc

    mode = raw.get("mode", "mpc")
    if mode not in MODES:
        raise ConfigError(f"'mode' must be one of {MODES}, got {mode!r}")

    learner = raw.get("learner", {})
    if not isinstance(learner, Mapping):
        raise ConfigError("'learner' block must be an object")
    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, Mapping):
        raise ConfigError("'tolerances' block must be an object")

    try:
        eta = float(learner.get("eta", 0.1))
        steps = int(learner.get("steps", 100))
        tol = float(tolerances.get("tol", 1e-3))
        window = int(tolerances.get("window", 3))
        seed = int(raw.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scalar option: {exc}") from exc
    if eta < 0:
        raise ConfigError(f"learner 'eta' must be >= 0, got {eta}")
    if steps < 1:
        raise ConfigError(f"learner 'steps' must be >= 1, got {steps}")
    if tol <= 0 or window < 1:
        raise ConfigError("'tolerances' requires tol > 0 and window >= 1")

    return RunConfig(
        network=network,
        dynamics=dynamics,
        cost=cost,
        horizon=horizon,
        x0=x0,
        mode=mode,
        eta=eta,
        steps=steps,
        tol=tol,
        window=window,
        seed=seed,
    )


def load_run_config(path: str) -> RunConfig:
    return parse_run_config(load_json(path))


def parse_road_network(raw: Mapping[str, Any]) -> RoadNetwork:
    """Build a RoadNetwork from its JSON form.

    Schema: {"nodes": [names], "links": [[orig, dest], ...],
    "P": {orig: {dest: prob}}, "D": {orig: {dest: demand}}}.
    Link endpoints and P/D keys are node names from the "nodes" list.
    """
    if not isinstance(raw, Mapping):
        raise ConfigError("road network config must be a JSON object")
    for key in ("nodes", "links"):
        if key not in raw:
            raise ConfigError(f"road network config missing {key!r}")
    nodes = raw["nodes"]
    if not isinstance(nodes, Sequence) or isinstance(nodes, (str, bytes)):
        raise ConfigError("'nodes' must be a list of names")
    names = [str(v) for v in nodes]
    if len(set(names)) != len(names):
        raise ConfigError("'nodes' contains duplicate names")
    index = {name: i for i, name in enumerate(names)}
    n = len(names)

    def _node(name: Any, where: str) -> int:
        key = str(name)
        if key not in index:
            raise ConfigError(f"unknown node {key!r} in {where}")
        return index[key]

    links = []
    for k, pair in enumerate(raw["links"]):
        if not isinstance(pair, Sequence) or len(pair) != 2:
            raise ConfigError(f"link {k} must be a [origin, dest] pair")
        links.append((_node(pair[0], f"link {k}"), _node(pair[1], f"link {k}")))

    def _dense(block: Any, what: str) -> np.ndarray:
        mat = np.zeros((n, n))
        if block is None:
            return mat
        if not isinstance(block, Mapping):
            raise ConfigError(f"{what!r} must be an object keyed by node names")
        for src, row in block.items():
            i = _node(src, what)
            if not isinstance(row, Mapping):
                raise ConfigError(f"{what!r}[{src!r}] must be an object")
            for dst, val in row.items():
                j = _node(dst, what)
                try:
                    mat[i, j] = float(val)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{what}[{src!r}][{dst!r}] not numeric") from exc
        return mat

    P = _dense(raw.get("P"), "P")
    D = _dense(raw.get("D"), "D")
    try:
        return RoadNetwork(n_nodes=n, links=tuple(links), P=P, D=D, node_names=tuple(names))
    except (DomainError, ValueError) as exc:
        raise ConfigError(f"invalid road network: {exc}") from exc


def load_road_network(path: str) -> RoadNetwork:
    return parse_road_network(load_json(path))
