"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical precondition failure
(truncation, support, degenerate geometry).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import beam_splitter as bs
from . import criteria, dicke, experiments
from .errors import NumericalPreconditionError, ValidationError
from .fock import SingleModeState, state_from_spec
from .serialization import load_spec, spec_from_dict

COMMANDS = ("criteria", "bs-entangle", "schmidt", "potential", "dicke-sweep", "rank-eq", "verify")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hpnc", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--spec", help="state spec: inline JSON, @path or path")
    parser.add_argument("--config", help="JSON file with defaults for any flag")
    parser.add_argument("--dim", type=int)
    parser.add_argument("--N", dest="N", type=_int_list, help="comma-separated particle numbers")
    parser.add_argument("--t", type=float, help="amplitude transmission (r = sqrt(1 - t^2))")
    parser.add_argument("--phi", type=float)
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--mode", choices=("hz", "xi2", "fidelity"))
    parser.add_argument("--orders", type=_int_list, help="higher-order criteria, e.g. 3,4")
    parser.add_argument("--r", dest="r_values", type=_int_list, help="rank-eq component counts")
    parser.add_argument("--radius", type=float)
    parser.add_argument("--n-max", dest="n_max", type=_int_list)
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "table"), default=None)
    parser.add_argument("--timing", action="store_true", help="include runtime_ms columns")
    return parser


DEFAULTS = {
    "dim": 40, "t": 1 / math.sqrt(2), "phi": 0.0, "threshold": None, "mode": "hz",
    "orders": [3], "r_values": [1, 2, 3, 4], "radius": 2.0, "n_max": [6, 10, 20],
    "format": "csv",
}


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text())
        if not isinstance(config, dict):
            raise ValidationError("config file must hold a JSON object")
    aliases = {"r": "r_values", "n-max": "n_max"}
    for key, value in config.items():
        key = aliases.get(key, key)
        if getattr(args, key, None) is None:
            if key == "spec" and isinstance(value, dict):
                value = json.dumps(value)
            elif key in ("N", "r_values", "n_max", "orders") and isinstance(value, list):
                value = [int(v) for v in value]
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _spec(args):
    if args.spec is None:
        raise ValidationError(f"{args.command} needs --spec")
    if isinstance(args.spec, dict):
        return spec_from_dict(args.spec)
    return load_spec(args.spec)


def _params(args) -> bs.BSParams:
    return bs.BSParams.from_t(args.t, args.phi)


def _threshold(args, default):
    return default if args.threshold is None else args.threshold


def _table(header, rows, fmt) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    cells = [list(header)] + [list(r) for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    for c in cells:
        buf.write("  ".join(v.rjust(w) for v, w in zip(c, widths)).rstrip() + "\n")
    return buf.getvalue()


def _records_table(records, fmt, timing) -> str:
    buf = io.StringIO()
    experiments.write_records(records, buf, timing=timing)
    if fmt == "csv":
        return buf.getvalue()
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    return _table(rows[0], rows[1:], fmt) if rows else ""


num = experiments.format_number


def cmd_criteria(args) -> str:
    tol = _threshold(args, criteria.DEFAULT_TOLERANCE)
    state = state_from_spec(_spec(args), args.dim)
    reports = criteria.evaluate_all(state, orders=args.orders, tolerance=tol)
    rows = [[r.criterion, "" if r.order is None else str(r.order), num(r.value),
             num(r.nonclassical), num(r.tolerance)] for r in reports]
    return _table(["criterion", "order", "value", "nonclassical", "tolerance"], rows, args.format)


def _pure(args) -> SingleModeState:
    state = state_from_spec(_spec(args), args.dim)
    if not isinstance(state, SingleModeState):
        raise ValidationError(f"{args.command} needs a pure state")
    return state


def cmd_bs_entangle(args) -> str:
    state = state_from_spec(_spec(args), args.dim)
    params = _params(args)
    out = bs.apply_bs(bs.embed_with_vacuum(state), params)
    rows = [
        ["hz_two_mode_m1_n1", num(bs.hz_two_mode_violation(out, 1, 1))],
        ["bs_route_mandel", num(bs.bs_route_mandel(state, params))],
        ["mandel_violation", num(criteria.mandel_violation(state))],
    ]
    if isinstance(out, bs.TwoModeState):
        res = bs.schmidt_analysis(out, _threshold(args, bs.DEFAULT_SCHMIDT_THRESHOLD))
        rows += [["schmidt_rank", num(res.rank)], ["entropy_bits", num(res.entropy_bits)]]
    return _table(["quantity", "value"], rows, args.format)


def cmd_schmidt(args) -> str:
    state = _pure(args)
    params = _params(args)
    res = bs.schmidt_analysis(bs.apply_bs(bs.embed_with_vacuum(state), params),
                              _threshold(args, bs.DEFAULT_SCHMIDT_THRESHOLD))
    kept = ";".join(num(s) for s in res.singular_values[: res.rank])
    rows = [[num(params.t), num(params.r), num(params.phi), num(res.rank),
             num(res.entropy_bits), num(res.threshold), kept]]
    return _table(["t", "r", "phi", "rank", "entropy_bits", "threshold", "singular_values"],
                  rows, args.format)


def cmd_potential(args) -> str:
    state = _pure(args)
    search = bs.SearchConfig(threshold=_threshold(args, bs.DEFAULT_SCHMIDT_THRESHOLD))
    entropy, best = bs.entanglement_potential(state, search)
    rows = [[num(entropy), num(best.t), num(best.r), num(best.phi)]]
    return _table(["entropy_bits", "t", "r", "phi"], rows, args.format)


def cmd_dicke_sweep(args) -> str:
    if not args.N:
        raise ValidationError("dicke-sweep needs --N")
    spec = _spec(args)
    dim = args.dim if args.dim <= min(args.N) + 1 else min(args.N) + 1
    if args.mode == "hz":
        records = experiments.sweep_hz_to_mandel(spec, args.N, dim)
    elif args.mode == "xi2":
        records = experiments.sweep_xi2_to_squeezing(spec, args.N, dim)
    else:
        if spec.kind != "coherent":
            raise ValidationError("fidelity mode needs a coherent spec")
        records = experiments.acs_fidelity_sweep(spec.params["alpha"], args.N)
    return _records_table(records, args.format, args.timing)


def cmd_rank_eq(args) -> str:
    N = args.N[0] if args.N else 400
    thr = _threshold(args, bs.DEFAULT_SCHMIDT_THRESHOLD)
    records = [experiments.rank_equivalence(r, args.radius, _params(args), N, args.dim, thr)
               for r in args.r_values]
    return _records_table(records, args.format, args.timing)


def cmd_verify(args) -> str:
    params = _params(args)
    rows = []
    dev = bs.verify_mode_transform(params, min(args.dim, 12))
    rows.append(["mode_transform", str(min(args.dim, 12)), num(dev), num(dev < 1e-10)])
    for n_max in args.n_max:
        dev = dicke.schwinger_identity_check(n_max)
        rows.append(["schwinger_identity", str(n_max), num(dev), num(dev < 1e-12)])
    for N in args.N or [20]:
        for name, dev in dicke.spin_algebra_residuals(N).items():
            rows.append([f"spin_algebra_{name}", str(N), num(dev), num(dev < 1e-12)])
    return _table(["check", "size", "deviation", "pass"], rows, args.format)


HANDLERS = {
    "criteria": cmd_criteria, "bs-entangle": cmd_bs_entangle, "schmidt": cmd_schmidt,
    "potential": cmd_potential, "dicke-sweep": cmd_dicke_sweep, "rank-eq": cmd_rank_eq,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _resolve(args)
        text = HANDLERS[args.command](args)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    except (ValidationError, OSError, json.JSONDecodeError, argparse.ArgumentTypeError) as exc:
        print(f"hpnc: error: {exc}", file=sys.stderr)
        return 2
    except NumericalPreconditionError as exc:
        print(f"hpnc: numerical precondition failed: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
