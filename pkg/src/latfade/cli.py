"""Command-line front end: ``latfade {lattice,invariants,carve,simulate,report}``.

Exit codes: 0 success, 2 invalid input, 3 search/overflow, 4 simulation error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import codebook, numfield
from .channels import model_from_label, model_to_dict, group_of
from .errors import LatfadeError, UncertifiedInvariant, ValidationError
from .forms import group_from_label, reduced_hermite_invariant
from .lattice import (
    Lattice, lattice_from_dict, lattice_to_dict, scale, shortest_vector_sq, to_real,
)
from .sim import (
    ExperimentConfig, certified_rh, gap_report, martinet_gap, results_row, rows_to_csv, read_results,
    run_experiment, rate_threshold,
)

GROUP_CHOICES = "identity | diagonal | block_diagonal:<b> | mimo2_block"


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def _load_lattice(path):
    d = _read_json(path)
    try:
        L = lattice_from_dict(d)
    except LatfadeError as exc:
        raise type(exc)(f"{path}: {exc}") from exc
    certs = {str(k): float(v) for k, v in d.get("certificates", {}).items()}
    return L, certs


def _normalized(L: Lattice, certs: dict):
    c = L.volume ** (-1.0 / L.dim)
    return scale(L, c), {g: v * c * c for g, v in certs.items()}


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_lattice(args):
    certs = {}
    if args.gens and args.gens.startswith("cyclotomic:"):
        args.cyclotomic, args.gens = int(args.gens.partition(":")[2]), None
    if args.cyclotomic is not None:
        spec = numfield.cyclotomic_field(args.cyclotomic)
        L = numfield.embed_ring(spec)
        certs = numfield.certificates(spec)
        label = spec.label
    elif args.field is not None:
        spec = numfield.field_from_file(args.field)
        ideal = numfield.ideal_from_file(args.ideal) if args.ideal else None
        L = numfield.embed_ideal(spec, ideal) if ideal else numfield.embed_ring(spec)
        certs = numfield.certificates(spec, ideal)
        label = spec.label
    elif args.golden:
        L, certs = numfield.golden_code_lattice()
        label = "golden code"
    else:
        L, certs = _load_lattice(args.gens)
        label = args.gens
    if args.normalize:
        L, certs = _normalized(L, certs)
    text = json.dumps(lattice_to_dict(L, certificates=certs, label=label), indent=1) + "\n"
    if args.output:
        _write(args.output, text)
    print(f"k={L.k} volume={L.volume:.12g} label={label}", file=sys.stderr if not args.output else sys.stdout)
    return 0


def cmd_invariants(args):
    L, certs = _load_lattice(args.lattice)
    if args.normalize:
        L, certs = _normalized(L, certs)
    k = L.k
    radius = args.radius if args.radius is not None else 2.0 * math.sqrt(k) * L.volume ** (1.0 / (2 * k))
    sv, sv_pt = shortest_vector_sq(L)
    h = sv / L.volume ** (1.0 / k)
    G = group_from_label(args.group, k)
    res = reduced_hermite_invariant(G, L, radius, lower_bound=certs.get(G.label))
    out = {
        "k": k, "volume": L.volume, "hermite": h, "hermite_certified": True,
        "shortest_vector": [float(v) for v in to_real(sv_pt.embedding)],
        "group": G.label, "rh": res.value, "rh_certified": res.certified,
        "achiever_coeffs": list(res.achiever.coeffs),
        "achiever": [float(v) for v in to_real(res.achiever.embedding)],
        "search_radius": radius,
    }
    if G.kind == "diagonal":
        out["nd_pmin"] = (res.value / k) ** (k / 2)
    text = json.dumps(out, indent=1) + "\n"
    if args.output:
        _write(args.output, text)
    print(f"hermite = {h:.12g} (certified)")
    print(f"rh[{G.label}] = {res.value:.12g} ({'certified' if res.certified else 'upper bound'})")
    if "nd_pmin" in out:
        print(f"Nd_p,min = {out['nd_pmin']:.12g}")
    print(f"achiever = {np.round(res.achiever.embedding, 9).tolist()}")
    return 0


def cmd_carve(args):
    L, certs = _load_lattice(args.lattice)
    if abs(L.volume - 1) > 1e-9:
        L, certs = _normalized(L, certs)
    search = codebook.find_shift(L, args.alpha, args.power, args.trials, args.seed, certificates=certs)
    code = search.code
    _write(args.output, json.dumps(codebook.code_to_dict(code)) + "\n")
    print(f"codewords={code.size} rate_bits={code.rate_bits:.12g} guarantee={search.guarantee:.12g} "
          f"guarantee_met={str(search.guarantee_met).lower()}")
    return 0


def cmd_simulate(args):
    d = _read_json(args.code)
    code = codebook.code_from_dict(d)
    model = model_from_label(args.model, code.k)
    G = group_of(model)
    rh = certified_rh(code, G)
    certified = rh is not None
    if rh is None and args.allow_upper_bound and code.base is not None:
        radius = 2.0 * math.sqrt(code.k)
        rh = reduced_hermite_invariant(G, code.base, radius).value
    cfg = ExperimentConfig(code, model, args.trials, args.seed, args.epsilon, rh if certified else None,
                           args.zero_noise, args.threads)
    agg = run_experiment(cfg)
    report = None
    if rh is not None and rh > 0:
        report = gap_report(code, model, agg.mu_hat, rh / (2 * code.k), certified=certified,
                            allow_upper_bound=args.allow_upper_bound,
                            capacity_samples=args.capacity_samples, seed=args.seed)
    config = {"code": d, "model": model_to_dict(model), "trials": args.trials, "seed": args.seed,
              "epsilon": args.epsilon, "zero_noise": args.zero_noise}
    row = results_row(cfg, agg, report, config)
    text = rows_to_csv([row])
    _write(args.output, text)
    print(f"error_rate={agg.error_rate:.6g} [{agg.ci_lo:.6g}, {agg.ci_hi:.6g}] mu_hat={agg.mu_hat:.6g} "
          f"violations={agg.violations}", file=sys.stderr)
    if agg.violations:
        print("distance bound violated", file=sys.stderr)
        return 4
    return 0


def cmd_report(args):
    lines = []
    if args.G is not None:
        lines.append(f"constant gap log2(2G/(pi e)) with G = {args.G:g}: {martinet_gap(args.G):.6f} bits")
    if args.threshold_c is not None:
        P = args.power if args.power is not None else 1.0
        thr = rate_threshold(P, args.threshold_c)
        lines.append(f"threshold log2 P - log2(2/(pi e c)) with P = {P:g}, c = {args.threshold_c:.12g}: "
                     f"{thr:.6f} bits (log2 P = {math.log2(P):.6f})")
    rows = []
    for path in args.results:
        rows.extend(read_results(path))
    uncertified = [r for r in rows if r.get("rh_certified", "1") != "1" or r["threshold_bits"] == ""]
    if uncertified and not args.allow_upper_bound:
        raise UncertifiedInvariant(
            f"{len(uncertified)} result row(s) lack a certified invariant; rerun with --allow-upper-bound"
        )
    if uncertified:
        lines.append("UPPER BOUND ONLY: some thresholds come from uncertified invariants")
    if rows:
        hdr = f"{'model':>9} {'k':>2} {'P':>9} {'alpha':>9} {'rate':>8} {'thresh':>8} {'capacity':>9} {'gap':>7} " \
              f"{'error_rate':>10} {'ci':>21} {'viol':>4}"
        lines.append(hdr)
        for r in rows:
            def f(key, width, prec=4):
                v = r.get(key, "")
                return f"{float(v):>{width}.{prec}f}" if v not in ("", None) else f"{'-':>{width}}"
            lines.append(
                f"{r['model']:>9} {r['k']:>2} {float(r['P']):>9.4g} {float(r['alpha']):>9.4g} {f('rate_bits', 8)} "
                f"{f('threshold_bits', 8)} {f('capacity_bits', 9)} {f('gap_bits', 7)} {float(r['error_rate']):>10.4g} "
                f"{'[%.4g, %.4g]' % (float(r['ci_lo']), float(r['ci_hi'])):>21} {r['violations']:>4}"
            )
    text = "\n".join(lines) + "\n"
    _write(args.output, text)
    if args.plot_data:
        cols = ("model", "k", "P", "alpha", "rate_bits", "threshold_bits", "error_rate", "ci_lo", "ci_hi")
        out = [",".join(cols)] + [",".join(str(r.get(c, "")) for c in cols) for r in rows]
        _write(args.plot_data, "\n".join(out) + "\n")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="latfade", description="Lattice codes for linear fading channels.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lattice", help="build and validate a lattice")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--gens", help="lattice JSON with 2k generator rows, or cyclotomic:N")
    src.add_argument("--cyclotomic", type=int, metavar="N", help="ring of integers of Q(zeta_N)")
    src.add_argument("--field", help="field JSON (embeddings of an integral basis)")
    src.add_argument("--golden", action="store_true", help="2x2 MIMO golden-code lattice")
    q.add_argument("--ideal", help="ideal JSON, used with --field")
    q.add_argument("--normalize", action="store_true", help="scale to unit volume")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_lattice)

    q = sub.add_parser("invariants", help="Hermite and reduced Hermite invariants")
    q.add_argument("lattice")
    q.add_argument("--group", default="diagonal", help=GROUP_CHOICES)
    q.add_argument("--radius", type=float)
    q.add_argument("--normalize", action="store_true")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_invariants)

    q = sub.add_parser("carve", help="carve a power-constrained code")
    q.add_argument("lattice")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--power", "-P", type=float, required=True)
    q.add_argument("--trials", type=int, default=64)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_carve)

    q = sub.add_parser("simulate", help="Monte Carlo ML decoding over a fading model")
    q.add_argument("--code", required=True)
    q.add_argument("--model", required=True, help="awgn | rayleigh | block<n> | mimo2 | mimo2i")
    q.add_argument("--trials", type=int, default=10_000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--epsilon", type=float, default=0.5)
    q.add_argument("--zero-noise", action="store_true")
    q.add_argument("--threads", type=int)
    q.add_argument("--capacity-samples", type=int, default=10**6)
    q.add_argument("--allow-upper-bound", action="store_true")
    q.add_argument("-o", "--output", required=True)
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("report", help="gap table from result CSVs")
    q.add_argument("results", nargs="*")
    q.add_argument("--G", type=float, help="root-discriminant constant for the tower gap line")
    q.add_argument("--threshold-c", type=float, help="print the AWGN threshold for this c")
    q.add_argument("--power", type=float)
    q.add_argument("--allow-upper-bound", action="store_true")
    q.add_argument("--plot-data")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LatfadeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, TypeError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4 if args.command == "simulate" else 2


if __name__ == "__main__":
    sys.exit(main())
