"""Command-line interface.

Exit codes: 0 success (Certified or Refuted, verified certificate), 3 an
honest Unknown / failed factorization, 2 any error. Errors are reported as a
single JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import formats
from .choi import ChoiMatrix, choi_from_kraus, from_block_form
from .classify import CpStatus, classify_channel
from .cpfact import FactorParams, factor_auto, verify_certificate
from .errors import CpdnnError, ParseError
from .graph import support_graph, to_dot, two_coloring
from .matcore import ToleranceConfig, sym_from_entries
from .sampler import (
    SampleParams,
    derive,
    sample_blockform_channel,
    sample_cp,
    sample_dnn,
    sample_forest_dnn,
    sample_kraus_channel,
)

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 2, 3


class UsageError(CpdnnError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(parser, defaults=ToleranceConfig()):
    parser.add_argument("--input", default="-", help="input path, '-' for stdin")
    parser.add_argument("--output", default="-", help="output path, '-' for stdout")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--verbose", action="store_true")
    for name in ("eps_sym", "eps_psd", "eps_nonneg", "eps_zero", "eps_residual"):
        parser.add_argument("--" + name.replace("_", "-"), dest=name, type=float,
                            default=getattr(defaults, name))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cpdnn", description="DNN / CP membership for quantum-channel Choi matrices")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify channels (Choi, Kraus or block form JSON)")
    _common(p)
    p.add_argument("--m", type=int, default=2, help="output dimension for CSV input")

    p = sub.add_parser("factorize", help="find a CP certificate for a matrix")
    _common(p)

    p = sub.add_parser("verify", help="check a certificate against a matrix")
    _common(p)
    p.add_argument("--certificate", help="certificate JSON path; otherwise input is "
                   "{\"matrix\": ..., \"certificate\": ...}")

    p = sub.add_parser("graph", help="support graph of a matrix in DOT format")
    _common(p)

    p = sub.add_parser("sample", help="generate random instances")
    _common(p)
    p.add_argument("--kind", default="channel",
                   choices=("channel", "blockform", "kraus", "cp", "dnn", "forest"))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--s", type=int, default=6)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--boundary-bias", type=float, default=0.0)
    p.add_argument("--real", action="store_true", help="real Kraus operators")
    return parser


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(args.eps_sym, args.eps_psd, args.eps_nonneg, args.eps_zero,
                           args.eps_residual)


def _matrix(args, tol, text):
    if args.format == "csv":
        return formats.matrix_from_csv(text, tol)
    return formats.matrix_from_json(formats.loads(text), tol)


def _batch(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def _cmd_classify(args, tol, params):
    text = _read(args.input)
    if args.format == "csv":
        S = formats.matrix_from_csv(text, tol)
        if S.r % args.m:
            raise ParseError(f"matrix size {S.r} is not a multiple of m={args.m}")
        items, single = [ChoiMatrix(S.r // args.m, args.m, S)], True
    else:
        data = formats.loads(text)
        single = not isinstance(data, list)
        items = [formats.channel_from_json(d, tol) for d in ([data] if single else data)]
    reports = _batch(lambda J: classify_channel(J, tol, params), items, args.jobs)
    payload = [formats.report_to_json(r) for r in reports]
    _write(args.output, formats.dumps(payload[0] if single else payload) + "\n")
    unknown = any(r.cp_status is CpStatus.UNKNOWN for r in reports)
    return EXIT_UNKNOWN if unknown else EXIT_OK


def _cmd_factorize(args, tol, params):
    text = _read(args.input)
    data = None if args.format == "csv" else formats.loads(text)
    if isinstance(data, list):
        mats = [formats.matrix_from_json(d, tol) for d in data]
    else:
        mats = [formats.matrix_from_csv(text, tol) if data is None
                else formats.matrix_from_json(data, tol)]
    outcomes = _batch(lambda S: factor_auto(S, tol, params), mats, args.jobs)
    payload = [formats.certificate_to_json(o.certificate) if o.certified
               else formats.outcome_to_json(o) for o in outcomes]
    _write(args.output, formats.dumps(payload if isinstance(data, list) else payload[0]) + "\n")
    return EXIT_OK if all(o.certified for o in outcomes) else EXIT_UNKNOWN


def _cmd_verify(args, tol, params):
    text = _read(args.input)
    if args.certificate:
        S = _matrix(args, tol, text)
        cert = formats.certificate_from_json(formats.loads(_read(args.certificate)))
    else:
        data = formats.loads(text)
        if not isinstance(data, dict) or "matrix" not in data or "certificate" not in data:
            raise ParseError("verify input must hold 'matrix' and 'certificate'")
        S = formats.matrix_from_json(data["matrix"], tol)
        cert = formats.certificate_from_json(data["certificate"])
    ok, residual = verify_certificate(S, cert, tol)
    min_entry = float(cert.vectors.min()) if cert.s else 0.0
    _write(args.output, formats.dumps(
        {"verified": ok, "residual": residual, "s": cert.s, "min_entry": min_entry}) + "\n")
    return EXIT_OK if ok else EXIT_UNKNOWN


def _cmd_graph(args, tol, params):
    S = _matrix(args, tol, _read(args.input))
    G = support_graph(S, tol.eps_zero)
    coloring, _ = two_coloring(G)
    _write(args.output, to_dot(G, coloring))
    return EXIT_OK


def _sample_one(args, p: SampleParams, tol):
    kind = args.kind
    if kind == "channel":
        return formats.channel_to_json(from_block_form(sample_blockform_channel(args.n, p), tol))
    if kind == "blockform":
        return formats.blockform_to_json(sample_blockform_channel(args.n, p))
    if kind == "kraus":
        kraus = sample_kraus_channel(args.n, args.m, args.k, p, complex_entries=not args.real)
        return formats.kraus_to_json(args.n, args.m, kraus)
    if kind == "cp":
        S, cert = sample_cp(args.r, args.s, p)
        return {"matrix": formats.matrix_to_json(S),
                "certificate": formats.certificate_to_json(cert)}
    if kind == "dnn":
        return formats.matrix_to_json(sample_dnn(args.r, p, tol))
    return formats.matrix_to_json(sample_forest_dnn(args.r, p))


def _cmd_sample(args, tol, params):
    base = SampleParams(args.seed, args.density, args.boundary_bias)
    if args.count == 1:
        payload = _sample_one(args, base, tol)
    else:
        payload = _batch(lambda i: _sample_one(args, derive(base, i), tol),
                         list(range(args.count)), args.jobs)
    _write(args.output, formats.dumps(payload) + "\n")
    return EXIT_OK


COMMANDS = {
    "classify": _cmd_classify,
    "factorize": _cmd_factorize,
    "verify": _cmd_verify,
    "graph": _cmd_graph,
    "sample": _cmd_sample,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        level = logging.ERROR if args.quiet else logging.DEBUG if args.verbose else logging.WARNING
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
        tol = _tol(args)
        params = FactorParams(seed=args.seed)
        return COMMANDS[args.command](args, tol, params)
    except (CpdnnError, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
