"""Command-line interface.

Subcommands: ``verify`` runs a check suite and writes JSON/CSV reports;
``norm``, ``constant`` and ``op`` do ad-hoc single computations;
``calibrate`` regenerates the frozen fixtures file; ``suites`` lists the
available suites; ``serve`` starts the HTTP service.  With ``--server
URL`` the computation subcommands become thin clients of a running
service; otherwise everything runs in-process.

Exit codes: 0 all checks passed, 1 at least one check failed,
2 configuration or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from .config import ConfigError, config_from_mapping, load_config
from .harness import available_suites, run_calibration, run_suite
from .oneshot import (CONSTANT_KINDS, OPERATOR_NAMES, compute_constant,
                      compute_norm, compute_op, export_grid)

EXIT_PASS, EXIT_CHECK_FAIL, EXIT_CONFIG = 0, 1, 2


def _add_common(sub, with_out=False):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--seed", type=int, default=None,
                     help="override the run seed")
    sub.add_argument("--refine", action="store_true", default=None,
                     help="run at the refined grid/family resolution")
    sub.add_argument("--n", type=int, default=None,
                     help="complex dimension of the ball")
    sub.add_argument("--alpha", type=float, default=None,
                     help="radial measure parameter")
    sub.add_argument("--exponent", default=None,
                     help="exponent field name, e.g. const2 or '2+sin|z|'")
    sub.add_argument("--weight", default=None,
                     help="weight name, e.g. const1, power+0.5, angular0.5")
    sub.add_argument("--fixtures", default=None,
                     help="path to the frozen fixtures file")
    sub.add_argument("--server", default=None, metavar="URL",
                     help="send the computation to a running service")
    if with_out:
        sub.add_argument("--out", default=None,
                         help="directory for JSON/CSV reports")


def _experiment_config(args, **extra):
    mapping = load_config(args.config) if args.config else {}
    overrides = dict(seed=args.seed, refine=args.refine, n=args.n,
                     alpha=args.alpha, exponent=args.exponent,
                     weight=args.weight, fixtures_path=args.fixtures)
    overrides.update(extra)
    return config_from_mapping(mapping, **overrides)


def _client_payload(args, **extra):
    payload = {"config": load_config(args.config) if args.config else {}}
    for key in ("seed", "refine", "n", "alpha", "exponent", "weight"):
        value = getattr(args, key)
        if value is not None:
            payload[key] = value
    payload.update({k: v for k, v in extra.items() if v is not None})
    return payload


def _client_post(server, path, payload):
    import httpx

    resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=3600.0)
    if resp.status_code >= 400:
        ctype = resp.headers.get("content-type", "")
        detail = (resp.json().get("detail", resp.text)
                  if ctype.startswith("application/json") else resp.text)
        raise ConfigError(f"server {resp.status_code}: {detail}")
    return resp.json()


def _print_check_row(row):
    mark = "PASS" if row["passed"] else "FAIL"
    print(f"{mark} {row['check_id']:<40} statistic={row['statistic']:<13.6g}"
          f" bound={row['bound']:<11.6g} {row['polarity']:<2}"
          f" {row['runtime_ms']:8.1f}ms")


def cmd_verify(args):
    if args.server:
        doc = _client_post(args.server, "/verify",
                           _client_payload(args, suite=args.suite,
                                           out_dir=args.out))
        for row in doc["checks"]:
            _print_check_row(row)
        n_pass = sum(r["passed"] for r in doc["checks"])
        print(f"suite {doc['suite']}: {n_pass}/{len(doc['checks'])} checks"
              f" passed -> {doc['json_path']}")
        return doc["exit_code"]
    config = _experiment_config(args, suite=args.suite, out_dir=args.out)
    run = run_suite(args.suite, config=config)
    for r in run.results:
        _print_check_row({"passed": r.passed, "check_id": r.check_id,
                          "statistic": r.statistic, "bound": r.bound,
                          "polarity": r.polarity,
                          "runtime_ms": r.runtime_ms})
    n_pass = sum(r.passed for r in run.results)
    print(f"suite {run.suite}: {n_pass}/{len(run.results)} checks passed"
          f" -> {run.json_path}")
    return run.exit_code


def _print_json(doc):
    print(json.dumps(doc, indent=2, sort_keys=True))


def cmd_norm(args):
    if args.server:
        _print_json(_client_post(args.server, "/norm",
                                 _client_payload(args, field=args.field)))
        return EXIT_PASS
    _print_json(compute_norm(_experiment_config(args), field=args.field))
    return EXIT_PASS


def cmd_constant(args):
    if args.server:
        _print_json(_client_post(args.server, "/constant",
                                 _client_payload(args, constant=args.kind)))
        return EXIT_PASS
    _print_json(compute_constant(_experiment_config(args), args.kind))
    return EXIT_PASS


def cmd_op(args):
    if args.server:
        _print_json(_client_post(args.server, "/op",
                                 _client_payload(args, operator=args.name,
                                                 k=args.k)))
        return EXIT_PASS
    extra = {"op_k": args.k} if args.k is not None else {}
    _print_json(compute_op(_experiment_config(args, **extra), args.name,
                           dump=args.dump))
    return EXIT_PASS


def cmd_grid(args):
    _print_json(export_grid(_experiment_config(args), args.out))
    return EXIT_PASS


def cmd_suites(args):
    for name in available_suites():
        print(name)
    return EXIT_PASS


def cmd_calibrate(args):
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    path = run_calibration(out_path=args.out, quick=args.quick, log=log)
    print(path)
    return EXIT_PASS


def cmd_serve(args):
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_PASS


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varlp",
        description="Numerical verification laboratory for weighted "
                    "variable-exponent spaces on the complex unit ball.")
    subs = parser.add_subparsers(dest="command", required=True)

    sv = subs.add_parser("verify", help="run a check suite, write reports")
    sv.add_argument("--suite", required=True,
                    help="suite name (see `varlp suites`)")
    _add_common(sv, with_out=True)
    sv.set_defaults(func=cmd_verify)

    sn = subs.add_parser("norm", help="Luxemburg norm of one field")
    sn.add_argument("--field", default="power:0.5",
                    help="field selector: power:<beta>, harmonic:<k>, "
                         "bump, corpus:<i>, one")
    _add_common(sn)
    sn.set_defaults(func=cmd_norm)

    sc = subs.add_parser("constant", help="one weight-class constant")
    sc.add_argument("--kind", required=True, choices=CONSTANT_KINDS)
    _add_common(sc)
    sc.set_defaults(func=cmd_constant)

    so = subs.add_parser("op", help="one operator norm estimate")
    so.add_argument("--name", required=True, choices=OPERATOR_NAMES)
    so.add_argument("--k", type=float, default=None,
                    help="regularization radius fraction")
    so.add_argument("--dump", default=None, metavar="CSV",
                    help="write the worst-case operator output as CSV")
    _add_common(so)
    so.set_defaults(func=cmd_op)

    sg = subs.add_parser("grid", help="export the quadrature grid as CSV")
    sg.add_argument("--out", required=True, help="CSV output path")
    _add_common(sg)
    sg.set_defaults(func=cmd_grid)

    ss = subs.add_parser("suites", help="list available suites")
    ss.set_defaults(func=cmd_suites)

    sk = subs.add_parser("calibrate",
                         help="measure and freeze the reference fixtures")
    sk.add_argument("--out", default=None, help="fixtures output path")
    sk.add_argument("--quick", action="store_true",
                    help="reduced sampling (for smoke tests)")
    sk.add_argument("--quiet", action="store_true")
    sk.set_defaults(func=cmd_calibrate)

    sr = subs.add_parser("serve", help="start the HTTP service")
    sr.add_argument("--host", default="127.0.0.1")
    sr.add_argument("--port", type=int, default=8000)
    sr.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_CONFIG
    except Exception:
        traceback.print_exc()
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
