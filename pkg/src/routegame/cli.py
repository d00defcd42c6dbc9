"""Command-line front end.

Subcommands:
    nash       Nash flow and latencies of a parallel network
    regions    critical regions of the explicit control law
    simulate   closed-loop control or mirror-descent learning
    markov     equilibrium link flows and path table of a road network
    verify     law-vs-solver agreement report plus Riccati gain summary

Exit codes: 0 success, 2 configuration error, 3 domain error, 4 solver
failure. Console floats print with 12 significant digits; file outputs
keep full precision so they round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Any, Dict, Optional

import numpy as np

from .config import MODES, RunConfig, load_json, load_road_network, parse_run_config
from .exceptions import ConfigError, DomainError, SolverError
from .markov import (
    DEMAND_FORMS,
    demand_balance_check,
    equilibrium_flow,
    expected_path_flows,
    line_graph,
    path_probabilities,
)
from .network import latency_vector, nash_equilibrium, rosenthal_potential, social_welfare
from .presets import PRESET_NAMES, get_preset
from .qp import DEFAULT_REG, HorizonProblem, condense, riccati_recursion
from .regions import enumerate_regions, export_regions, verify_law
from .simulate import (
    LearnerConfig,
    Trajectory,
    cumulative_regret,
    detect_convergence,
    run_closed_loop,
    run_mirror_descent,
)

__all__ = ["main", "build_parser"]


def _fmt(x: float) -> str:
    return "%.12g" % float(x)


def _fmt_vec(v) -> str:
    return "(" + ", ".join(_fmt(x) for x in np.asarray(v).ravel()) + ")"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument(
        "--preset",
        metavar="NAME",
        choices=PRESET_NAMES,
        help="built-in config: " + ", ".join(PRESET_NAMES),
    )
    common.add_argument("--out", metavar="DIR", help="directory for CSV/JSON outputs")
    common.add_argument(
        "--mode",
        choices=MODES,
        help="simulation mode (overrides the config's 'mode')",
    )
    common.add_argument(
        "--reg",
        metavar="RHO",
        type=float,
        default=None,
        help=f"ridge added to singular reduced Hessians (default {DEFAULT_REG:g})",
    )
    common.add_argument(
        "--dare-paper-variant",
        action="store_true",
        help="use the terminal-weight gain denominator in the Riccati recursion",
    )
    common.add_argument(
        "--net-demand",
        choices=DEMAND_FORMS,
        default="d",
        help="road-network source term: demand matrix only (d) or net of returns (dminus)",
    )

    parser = argparse.ArgumentParser(
        prog="routegame",
        description="Routing-game control: Nash flows, explicit MPC regions, simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("nash", parents=[common], help="print the Nash flow of the network")
    sub.add_parser("regions", parents=[common], help="enumerate critical regions")
    sub.add_parser("simulate", parents=[common], help="run the controlled game")
    sub.add_parser("markov", parents=[common], help="road-network equilibrium flows")
    sub.add_parser("verify", parents=[common], help="check the explicit law and gains")
    return parser


def _load_raw(args) -> Dict[str, Any]:
    if args.preset and args.config:
        raise ConfigError("pass either --config or --preset, not both")
    if args.preset:
        return get_preset(args.preset)
    if args.config:
        return load_json(args.config)
    raise ConfigError("one of --config or --preset is required")


def _run_config(args, *need: str) -> RunConfig:
    rc = parse_run_config(_load_raw(args))
    missing = [name for name in need if getattr(rc, name) is None]
    if missing:
        raise ConfigError("config is missing required block(s): " + ", ".join(missing))
    return rc


def _out_dir(args) -> Optional[str]:
    if not args.out:
        return None
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_json(path: str, data: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_trajectory_csv(path: str, traj: Trajectory) -> None:
    n = len(traj.states[0])
    header = ["t"]
    header += [f"x_{i}" for i in range(1, n + 1)]
    header += [f"u_{i}" for i in range(1, n + 1)]
    header += [f"l_{i}" for i in range(1, n + 1)]
    header += ["stage_cost"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t, u in enumerate(traj.controls):
            row: list = [t]
            row += [repr(float(v)) for v in traj.states[t]]
            row += [repr(float(v)) for v in u]
            if traj.latencies:
                row += [repr(float(v)) for v in traj.latencies[t]]
            else:
                row += [""] * n
            row += [repr(float(traj.stage_costs[t]))]
            writer.writerow(row)


def _condensed(rc: RunConfig, args):
    hp = HorizonProblem(rc.dynamics, rc.cost, rc.horizon)
    reg = args.reg if args.reg is not None else DEFAULT_REG
    return hp, condense(hp, reg=reg)


def cmd_nash(args) -> int:
    rc = _run_config(args, "network")
    net = rc.network
    flow = nash_equilibrium(net)
    lat = latency_vector(net, flow)
    print("flow: " + _fmt_vec(flow))
    print("latency: " + _fmt_vec(lat))
    print("potential: " + _fmt(rosenthal_potential(net, flow)))
    out = _out_dir(args)
    if out:
        _write_json(
            os.path.join(out, "nash.json"),
            {
                "flow": [float(v) for v in flow],
                "latency": [float(v) for v in lat],
                "potential": float(rosenthal_potential(net, flow)),
                "social_welfare": float(social_welfare(net, flow)),
            },
        )
    return 0


def cmd_regions(args) -> int:
    rc = _run_config(args, "network", "dynamics")
    _, qp = _condensed(rc, args)
    law = enumerate_regions(qp)
    n = law.n_regions
    print(f"{n} region" + ("" if n == 1 else "s"))
    out = _out_dir(args)
    if out:
        export_regions(
            law,
            os.path.join(out, "regions.json"),
            os.path.join(out, "region_vertices.csv"),
        )
    return 0


def cmd_simulate(args) -> int:
    rc = _run_config(args, "network", "x0")
    mode = args.mode if args.mode else rc.mode
    net = rc.network
    if mode == "mirror-descent":
        traj = run_mirror_descent(net, rc.x0, LearnerConfig(eta=rc.eta, steps=rc.steps))
    else:
        if rc.dynamics is None:
            raise ConfigError(f"mode {mode!r} requires a dynamics block")
        hp, qp = _condensed(rc, args)
        traj = run_closed_loop(hp, rc.x0, mode, qp=qp, net=net)

    final = traj.final_state
    converged = detect_convergence(traj, tol=rc.tol, window=rc.window)
    potential = rosenthal_potential(net, final)
    regret = cumulative_regret(traj) if traj.latencies else None

    print("mode: " + mode)
    print("steady state: " + _fmt_vec(final))
    print("converged_at: " + ("null" if converged is None else str(converged)))
    print("final potential: " + _fmt(potential))
    if regret is not None:
        print("regret: " + _fmt(regret))

    out = _out_dir(args)
    if out:
        _write_trajectory_csv(os.path.join(out, "trajectory.csv"), traj)
        _write_json(
            os.path.join(out, "summary.json"),
            {
                "mode": mode,
                "steady_state": [float(v) for v in final],
                "converged_at": converged,
                "final_potential": float(potential),
                "regret": None if regret is None else float(regret),
            },
        )
    return 0


def cmd_markov(args) -> int:
    if args.preset:
        raise ConfigError("road networks have no presets; pass --config")
    if not args.config:
        raise ConfigError("markov requires --config")
    net = load_road_network(args.config)
    flows = equilibrium_flow(net, demand_form=args.net_demand)
    print("link flows: " + _fmt_vec(flows))
    print("demand balance: " + _fmt(demand_balance_check(net)))

    # The path table only exists for a single origin-destination pair.
    try:
        paths, expected = expected_path_flows(net)
        _, rho = path_probabilities(net)
    except DomainError:
        paths, expected, rho = None, None, None
        print("paths: skipped (needs exactly one origin-destination demand)")
    if paths is not None:
        print(f"{len(paths)} path" + ("" if len(paths) == 1 else "s"))

    out = _out_dir(args)
    if out:
        names = net.node_names
        with open(os.path.join(out, "link_flows.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["link_id", "origin", "dest", "choice_prob", "flow"])
            lg = line_graph(net)
            for l, (i, j) in enumerate(net.links):
                writer.writerow(
                    [l, names[i], names[j], repr(float(lg.p[l])), repr(float(flows[l]))]
                )
        if paths is not None:
            with open(os.path.join(out, "paths.csv"), "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["path_id", "nodes", "probability", "expected_flow"])
                for k, path in enumerate(paths):
                    node_seq = [names[net.links[path[0]][0]]] if path else []
                    node_seq += [names[net.links[l][1]] for l in path]
                    writer.writerow(
                        [
                            k,
                            ">".join(node_seq),
                            repr(float(rho[k])),
                            repr(float(expected[k])),
                        ]
                    )
    return 0


def cmd_verify(args) -> int:
    rc = _run_config(args, "network", "dynamics")
    hp, qp = _condensed(rc, args)
    law = enumerate_regions(qp)
    report = verify_law(law, qp, seed=rc.seed)
    ric = riccati_recursion(hp, paper_variant=args.dare_paper_variant)
    gain_norm = float(np.linalg.norm(ric.K_seq[0], 2))

    n = law.n_regions
    print(f"{n} region" + ("" if n == 1 else "s"))
    print("max deviation: " + _fmt(report.max_deviation))
    print("coverage: " + _fmt(report.coverage))
    print("first gain spectral norm: " + _fmt(gain_norm))
    print("law: " + ("ok" if report.ok else "MISMATCH"))

    out = _out_dir(args)
    if out:
        _write_json(
            os.path.join(out, "verify.json"),
            {
                "n_regions": n,
                "degenerate": law.degenerate,
                "max_deviation": float(report.max_deviation),
                "coverage": float(report.coverage),
                "n_samples": report.n_samples,
                "gain_spectral_norm": gain_norm,
                "paper_variant": bool(args.dare_paper_variant),
                "ok": report.ok,
            },
        )
    return 0 if report.ok else 4


_HANDLERS = {
    "nash": cmd_nash,
    "regions": cmd_regions,
    "simulate": cmd_simulate,
    "markov": cmd_markov,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
