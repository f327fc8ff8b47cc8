"""Command line front end.

Subcommands: certify (ball certification of a named state), fractions
(Haar detection fractions over a delta grid), graph (edge-file
inspection and minimal stabilizer weight), constants (the quotable
constants report), nn-restricted (the 4-qubit chain-interaction study).

State specifications accepted by ``certify --state``:

* ``ring:<N>``     ring cluster state on N qubits
* ``ghz:<N>``      GHZ state on N qubits
* ``eta4``         the permuted linear cluster state on 4 qubits
* ``graph:<file>`` graph state from an edge file (one "u v" pair per line)
* ``file:<path>``  JSON amplitude list, entries either numbers or [re, im]

Exit codes: 0 on completion, 2 on resource limits, 3 on invalid input.
Progress and wall times go to stderr; stdout stays byte-reproducible
for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from .certify import certify_ball
from .errors import ResourceLimitError
from .experiments import (
    CSV_HEADER,
    ExperimentConfig,
    format_row,
    report_constants,
    run_fraction_experiment,
    run_nn_restricted_experiment,
)
from .graphs import (
    Graph,
    GraphState,
    min_stabilizer_weight,
    permuted_linear_cluster,
    ring_cluster,
)
from .states import PureState, ghz_state


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments; the contract here
    # reserves 2 for resource limits, so route parse errors to 3
    def error(self, message):
        raise _UsageError(message)


def parse_state(spec: str) -> PureState:
    kind, _, arg = spec.partition(":")
    if kind == "eta4":
        if arg:
            raise ValueError("eta4 takes no argument")
        return GraphState(permuted_linear_cluster()).state_vector()
    if kind == "ring":
        return GraphState(ring_cluster(int(arg))).state_vector()
    if kind == "ghz":
        return ghz_state(int(arg))
    if kind == "graph":
        if not arg:
            raise ValueError("graph: needs an edge-file path")
        return GraphState(Graph.from_edge_file(arg)).state_vector()
    if kind == "file":
        if not arg:
            raise ValueError("file: needs a JSON amplitude path")
        with open(arg) as fh:
            raw = json.load(fh)
        amps = []
        for entry in raw:
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise ValueError(f"amplitude entries are [re, im], got {entry!r}")
                amps.append(complex(float(entry[0]), float(entry[1])))
            elif isinstance(entry, (int, float)):
                amps.append(complex(entry))
            else:
                raise ValueError(f"amplitude entries are numbers or [re, im], got {entry!r}")
        return PureState.from_amplitudes(np.array(amps, dtype=complex))
    raise ValueError(f"unrecognized state spec {spec!r}")


def _cmd_certify(args) -> int:
    target = parse_state(args.state)
    result = certify_ball(
        target,
        args.k,
        args.delta,
        method=args.method,
        target_label=args.state,
    )
    print(result.to_json())
    return 0


def _parse_deltas(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"deltas must be comma-separated reals, got {text!r}")


def _cmd_fractions(args) -> int:
    config = ExperimentConfig(
        "fractions",
        args.n,
        args.k,
        _parse_deltas(args.deltas),
        args.samples,
        seed=args.seed,
        workers=args.workers,
        output_path=args.out,
        timing=args.timing,
    )
    rows = run_fraction_experiment(config)
    print(CSV_HEADER)
    for row in rows:
        print(format_row(row))
    return 0


def _cmd_graph(args) -> int:
    graph = Graph.from_edge_file(args.edges)
    print(f"vertices: {graph.n_vertices}")
    print("edges: " + " ".join(f"({u},{v})" for u, v in graph.edges))
    state = GraphState(graph)
    print("generators: " + " ".join(str(g) for g in state.generators))
    if args.min_weight:
        print(f"min stabilizer weight: {min_stabilizer_weight(graph)}")
    return 0


def _cmd_constants(args) -> int:
    print(report_constants(include_search=not args.no_search), end="")
    return 0


def _cmd_nn_restricted(args) -> int:
    result = run_nn_restricted_experiment(
        samples=args.samples,
        delta=args.delta,
        seed=args.seed,
        workers=args.workers,
        output_path=args.out,
        timing=args.timing,
    )
    print("nearest-neighbor scope:")
    print(CSV_HEADER)
    print(format_row(result.nearest))
    print("with next-nearest pairs:")
    print(CSV_HEADER)
    print(format_row(result.with_next_nearest))
    print("chain state certificate:")
    print(result.certificate.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermalcert", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", help="certify a ball around a named state")
    cert.add_argument("--state", required=True, help="state spec, e.g. ring:5 or eta4")
    cert.add_argument("--k", type=int, required=True, help="interaction weight cutoff")
    cert.add_argument("--delta", type=float, required=True, help="eigenvalue floor")
    cert.add_argument(
        "--method",
        choices=("sdp_ball", "rdm_maximally_mixed"),
        default="sdp_ball",
    )
    cert.set_defaults(func=_cmd_certify)

    frac = sub.add_parser("fractions", help="Haar detection fractions over a delta grid")
    frac.add_argument("--n", type=int, required=True, help="number of qubits")
    frac.add_argument("--k", type=int, required=True, help="interaction weight cutoff")
    frac.add_argument("--deltas", required=True, help="comma-separated floor levels")
    frac.add_argument("--samples", type=int, required=True)
    frac.add_argument("--seed", type=int, default=0)
    frac.add_argument("--out", default=None, help="also write the CSV here")
    frac.add_argument("--workers", type=int, default=1)
    frac.add_argument(
        "--timing",
        action="store_true",
        help="record wall times in the seconds column (breaks byte reproducibility)",
    )
    frac.set_defaults(func=_cmd_fractions)

    gr = sub.add_parser("graph", help="inspect a graph state from an edge file")
    gr.add_argument("--edges", required=True, help="edge file, one 'u v' pair per line")
    gr.add_argument(
        "--min-weight",
        action="store_true",
        help="also compute the minimal nonidentity stabilizer weight",
    )
    gr.set_defaults(func=_cmd_graph)

    const = sub.add_parser("constants", help="print the constants report")
    const.add_argument(
        "--no-search",
        action="store_true",
        help="skip the numeric-search rows (faster)",
    )
    const.set_defaults(func=_cmd_constants)

    nn = sub.add_parser("nn-restricted", help="4-qubit chain-interaction study")
    nn.add_argument("--samples", type=int, default=500)
    nn.add_argument("--delta", type=float, default=1e-6)
    nn.add_argument("--seed", type=int, default=0)
    nn.add_argument("--out", default=None, help="also write the CSV here")
    nn.add_argument("--workers", type=int, default=1)
    nn.add_argument("--timing", action="store_true")
    nn.set_defaults(func=_cmd_nn_restricted)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"thermalcert: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"thermalcert: resource limit: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"thermalcert: invalid input: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
