"""Command line driver: field -> lattice -> fan -> formula -> evaluation -> verification."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import data_path, linalg
from .errors import BudgetExceeded, ConeZetaError, IndexTooLight, InputError
from .field import embeddings
from .formula import assemble, symmetrize
from .lattice import dual_norm_polynomial, load_lattice
from .oracle import dedekind_zeta
from .shintani import decompose_quadratic, load_fan, trivial_fan, verify_cover
from .summation import BACKEND, default_threads, evaluate_combination

log = logging.getLogger("conezeta")

EXIT_PASS, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4
DEFAULT_HEIGHT = {1: 50, 2: 100, 3: 20}


def _stage(name):
    """Returns a caller that runs fn and tags any ConeZetaError with the stage name."""
    def run(fn, *args, **kw):
        try:
            return fn(*args, **kw)
        except ConeZetaError as exc:
            exc.stage = exc.stage or name
            raise
    return run


def resolve_field_file(path: str) -> str:
    """Accept a path, or the name of a bundled example (sqrt5, cubic, rationals)."""
    if os.path.exists(path):
        return path
    name = path if path.endswith(".json") else path + ".json"
    bundled = data_path(name)
    if os.path.exists(bundled):
        return bundled
    raise InputError(f"no such field file: {path}")


def _read(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_inputs(field_file, fan_file=None):
    """(lattice, fan, fan_source) from a field file; the fan may be named inside it."""
    path = resolve_field_file(field_file)
    data = _read(path)
    lat = _stage("lattice")(load_lattice, data)
    if fan_file is None and data.get("fan"):
        fan_file = os.path.join(os.path.dirname(path), data["fan"])
    if fan_file is not None:
        fan = _stage("fan")(load_fan, lat, _read(fan_file))
        return lat, fan, "file"
    if lat.n == 1:
        return lat, trivial_fan(1), "trivial"
    if lat.n == 2:
        return lat, _stage("decompose")(decompose_quadratic, lat), "constructed"
    raise InputError(f"degree {lat.n} needs a fan file (--fan)")


def _dump(obj):
    return json.dumps(obj, indent=1, sort_keys=False)


@dataclass
class RunReport:
    inputs: dict
    certificate: dict | None
    combination: dict
    rhs: dict | None
    oracle: dict | None
    verdict: str                  # "pass" | "fail" | "unchecked" | "formula-only"
    budget_exceeded: bool = False
    counts: dict = dc_field(default_factory=dict)
    timing: dict | None = None

    def to_json(self) -> dict:
        out = {
            "inputs": self.inputs,
            "certificate": self.certificate,
            "combination": self.combination,
            "rhs": self.rhs,
            "oracle": self.oracle,
            "verdict": self.verdict,
            "budget_exceeded": self.budget_exceeded,
            "counts": self.counts,
        }
        if self.timing is not None:
            out["timing"] = self.timing
        return out

    def summary(self) -> str:
        lines = [f"field      {self.inputs['min_poly']}  k={self.inputs['k']}"]
        if self.certificate:
            c = self.certificate
            lines.append(f"fan        {c['status']} at H={c['height']} V={c['unit_exponent_bound']} "
                         f"({c['points_checked']} points)")
        lines.append(f"terms      {len(self.combination['terms'])} (prefactor 1/sqrt({self.combination['prefactor_inv_sqrt_disc']}))")
        if self.rhs:
            lo, hi = self.rhs["enclosure"]
            lines.append(f"rhs        [{lo}, {hi}]")
        if self.oracle:
            lo, hi = self.oracle["enclosure"]
            lines.append(f"oracle     [{lo}, {hi}]")
        lines.append(f"verdict    {self.verdict}" + ("  (budget exceeded)" if self.budget_exceeded else ""))
        return "\n".join(lines)

    @property
    def exit_code(self) -> int:
        if self.verdict == "fail":
            return EXIT_MISMATCH
        if self.budget_exceeded:
            return EXIT_BUDGET
        return EXIT_PASS


def run_verify(field_file, k, fan_file=None, target_error=Fraction(1, 10**6), max_layer=None,
               threads=None, height=None, unit_window=None, dry_run=False, sym=True,
               oracle_error=None, timing=False) -> RunReport:
    if int(k) != k or k < 2:
        raise IndexTooLight(f"k = {k}: the identity needs an integer k >= 2")
    k = int(k)
    target = Fraction(str(target_error)) if not isinstance(target_error, Fraction) else target_error
    threads = threads or default_threads()
    clock = {}
    t0 = time.perf_counter()
    lat, fan, source = load_inputs(field_file, fan_file)
    H = height if height is not None else DEFAULT_HEIGHT.get(lat.n, 10)
    inputs = {
        "field_file": os.path.basename(resolve_field_file(field_file)),
        "min_poly": list(lat.field.min_poly),
        "k": k,
        "target_error": linalg.fraction_str(target),
        "max_layer": max_layer,
        "threads": threads,
        "fan_source": source,
        "backend": BACKEND,
    }
    clock["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cert = _stage("verify_cover")(verify_cover, lat, fan, H, unit_window, threads=threads)
    clock["verify_cover"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    comb = _stage("formula")(assemble, lat, fan, k)
    if sym:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            comb = symmetrize(comb)
    clock["formula"] = time.perf_counter() - t0
    counts = {"terms": len(comb.terms), "top_cones": len(fan.top), "cones": len(fan.cones)}
    if dry_run:
        return RunReport(inputs, cert.to_json(), comb.to_json(), None, None, "formula-only",
                         counts=counts, timing=clock if timing else None)

    budget = False
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BudgetExceeded)
        rhs = _stage("evaluate")(evaluate_combination, comb, target, max_layer, threads)
    budget |= any(issubclass(w.category, BudgetExceeded) for w in caught) or rhs.budget_exceeded
    clock["evaluate"] = time.perf_counter() - t0
    counts["points"] = rhs.points

    oracle = None
    verdict = "unchecked"
    t0 = time.perf_counter()
    if lat.monogenic:
        oe = Fraction(str(oracle_error)) if oracle_error is not None else target
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", BudgetExceeded)
            oracle = _stage("oracle")(dedekind_zeta, lat.field, k, oe, True)
        budget |= oracle.budget_exceeded
        verdict = "pass" if rhs.intersects(oracle) else "fail"
    clock["oracle"] = time.perf_counter() - t0
    if not cert.verified:
        verdict = "fail"
    return RunReport(inputs, cert.to_json(), comb.to_json(), rhs.to_json(),
                     oracle.to_json() if oracle else None, verdict, budget, counts,
                     {k_: round(v, 3) for k_, v in clock.items()} if timing else None)


# subcommands


def cmd_field(args):
    lat = load_lattice(_read(resolve_field_file(args.field)))
    f = lat.field
    out = {
        "min_poly": list(f.min_poly),
        "degree": f.degree,
        "disc_poly": f.disc_f,
        "disc_F": lat.disc_F,
        "ideal_norm": linalg.fraction_str(lat.ideal_norm),
        "embeddings_theta": [list(iv.decimal_strings(20)) for iv in embeddings(f.theta(), 80)],
        "w": [[linalg.fraction_str(c) for c in x.coords] for x in lat.w],
        "w_star": [[linalg.fraction_str(c) for c in x.coords] for x in lat.w_star],
        "dual_norm_polynomial": repr(dual_norm_polynomial(lat)),
        "units": [[linalg.fraction_str(c) for c in u.coords] for u in lat.units],
    }
    print(_dump(out))
    return EXIT_PASS


def cmd_decompose(args):
    lat, fan, source = load_inputs(args.field, args.fan)
    H = args.verify_height if args.verify_height is not None else DEFAULT_HEIGHT.get(lat.n, 10)
    cert = verify_cover(lat, fan, H, args.unit_window, threads=args.threads or default_threads())
    os.makedirs(args.out, exist_ok=True)
    fan.save(os.path.join(args.out, "fan.json"))
    with open(os.path.join(args.out, "certificate.json"), "w") as fh:
        fh.write(_dump(cert.to_json()) + "\n")
    print(_dump({"fan": fan.to_json(), "source": source, "certificate": cert.to_json()}))
    return EXIT_PASS if cert.verified else EXIT_MISMATCH


def cmd_formula(args):
    if args.k < 2:
        raise IndexTooLight(f"k = {args.k}: the identity needs k >= 2")
    lat, fan, _ = load_inputs(args.field, args.fan)
    comb = assemble(lat, fan, args.k)
    if args.symmetrize:
        comb = symmetrize(comb)
    print(comb.dumps())
    return EXIT_PASS


def cmd_evaluate(args):
    if args.k < 2:
        raise IndexTooLight(f"k = {args.k}: the identity needs k >= 2")
    lat, fan, _ = load_inputs(args.field, args.fan)
    comb = assemble(lat, fan, args.k)
    if args.symmetrize:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            comb = symmetrize(comb)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BudgetExceeded)
        rhs = evaluate_combination(comb, Fraction(args.target_error), args.max_layer, args.threads)
    oracle = None
    if lat.monogenic and not args.no_oracle:
        oracle = dedekind_zeta(lat.field, args.k, Fraction(args.target_error), True).to_json()
    out = rhs.to_json()
    per_term = out.pop("terms", [])
    out["oracle"] = oracle
    out["terms"] = per_term
    print(_dump(out))
    over = any(issubclass(w.category, BudgetExceeded) for w in caught)
    return EXIT_BUDGET if rhs.budget_exceeded or over else EXIT_PASS


def cmd_oracle(args):
    lat = load_lattice(_read(resolve_field_file(args.field)))
    if args.k < 2:
        raise IndexTooLight(f"k = {args.k}: needs k >= 2")
    e = dedekind_zeta(lat.field, args.k, Fraction(args.target_error), lat.monogenic,
                      cutoff=args.cutoff, method=args.method)
    print(_dump({"enclosure": list(e.interval.decimal_strings(20)), "cutoff": e.layers, "method": args.method}))
    return EXIT_BUDGET if e.budget_exceeded else EXIT_PASS


def cmd_verify(args):
    rep = run_verify(args.field, args.k, args.fan, Fraction(args.target_error), args.max_layer,
                     args.threads, args.verify_height, args.unit_window, args.dry_run,
                     not args.no_symmetrize, args.oracle_error, args.timing)
    text = _dump(rep.to_json())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
        print(rep.summary())
    else:
        print(text)
        print(rep.summary(), file=sys.stderr)
    return rep.exit_code


def _fraction(s):
    try:
        v = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {s}") from exc
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="conezeta", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("field", help="field, ideal basis, dual basis and dual norm form")
    s.add_argument("field")
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("decompose", help="build or load a fan and verify the cover")
    s.add_argument("field")
    s.add_argument("--fan")
    s.add_argument("--verify-height", type=int)
    s.add_argument("--unit-window", type=int)
    s.add_argument("--threads", type=int)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("formula", help="exact combination of conical zeta values")
    s.add_argument("field")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--fan")
    s.add_argument("--symmetrize", action="store_true")
    s.set_defaults(func=cmd_formula)

    for name, func in (("evaluate", cmd_evaluate), ("verify", cmd_verify)):
        s = sub.add_parser(name, help="certified evaluation" if name == "evaluate" else "end-to-end check against the oracle")
        s.add_argument("field")
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--fan")
        s.add_argument("--target-error", type=_fraction, default=Fraction(1, 10**6))
        s.add_argument("--max-layer", type=int)
        s.add_argument("--threads", type=int)
        s.set_defaults(func=func)
        if name == "evaluate":
            s.add_argument("--symmetrize", action="store_true")
            s.add_argument("--no-oracle", action="store_true")
        else:
            s.add_argument("--verify-height", type=int)
            s.add_argument("--unit-window", type=int)
            s.add_argument("--oracle-error", type=_fraction)
            s.add_argument("--no-symmetrize", action="store_true")
            s.add_argument("--dry-run", action="store_true", help="formula only, no numerics")
            s.add_argument("--timing", action="store_true", help="include wall-clock times in the report")
            s.add_argument("--json", help="write the report here and print the summary")

    s = sub.add_parser("oracle", help="Dedekind zeta enclosure")
    s.add_argument("field")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--target-error", type=_fraction, default=Fraction(1, 10**6))
    s.add_argument("--cutoff", type=int)
    s.add_argument("--method", choices=("euler", "dirichlet"), default="euler")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors; 2 means mismatch here
        return EXIT_PASS if exc.code in (0, None) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error [{exc.stage or args.command}]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConeZetaError as exc:
        print(f"error [{exc.stage or args.command}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, TypeError, ValueError) as exc:  # malformed input files
        print(f"input error [{args.command}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
