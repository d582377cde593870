"""Command-line interface.

Exit codes: 0 success, 1 usage or invalid input, 2 a violation of the
triangle inequality was found and re-verified, 3 I/O failure.
"""
import argparse
import json
import sys

import numpy as np

from . import distmat, harness, semimetrics, triangular, trig_lemma
from .io import (
    complex_from_json,
    complex_to_json,
    read_json,
    read_points_csv,
    read_vectors,
    rows_to_csv,
    write_text,
)
from .wedge import gram_schmidt, haar_unitary

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_to_json(obj)
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def _emit(args, payload, fmt_default="json", csv_rows=None):
    """Write ``payload`` as JSON, or as CSV (``csv_rows`` = (header, rows),
    else scalar fields of ``payload`` as key,value pairs)."""
    fmt = args.format or fmt_default
    if fmt == "csv":
        if csv_rows is not None:
            text = rows_to_csv(*csv_rows)
        elif isinstance(payload, dict):
            rows = [(k, _num(v)) for k, v in payload.items()
                    if not isinstance(v, (dict, list, tuple, np.ndarray))]
            text = rows_to_csv(["key", "value"], rows)
        else:
            text = _num(payload)
    elif isinstance(payload, dict) or isinstance(payload, list):
        text = json.dumps(_jsonable(payload), indent=2)
    else:
        text = _num(payload)
    write_text(text, args.out, sys.stdout)


def _load_dmat(path):
    obj = read_json(path)
    if "d" not in obj:
        raise UsageError(f"{path}: not a distance-matrix JSON object")
    return distmat.DistanceMatrix.from_json(obj)


def _load_op(path):
    """Operator JSON, or a distance-matrix JSON taken in the standard basis."""
    obj = read_json(path)
    if "form" in obj or "q" in obj:
        return semimetrics.WedgeOperatorQ.from_json(obj)
    if "d" in obj:
        return semimetrics.WedgeOperatorQ.from_dmat(distmat.DistanceMatrix.from_json(obj))
    raise UsageError(f"{path}: neither an operator nor a distance-matrix JSON object")


def _tol(args, default):
    return default if args.tol is None else args.tol


def _rng(args):
    return np.random.default_rng(args.seed)


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def cmd_dist(args):
    vs = read_vectors(args.vectors)
    if len(vs) != 2:
        raise UsageError("dist needs exactly two vectors")
    x, y = (v / np.linalg.norm(v) for v in vs)
    out = {"hs_distance": semimetrics.hs_distance(x, y)}
    if args.op:
        out["semidistance"] = semimetrics.semidistance(_load_op(args.op), x, y)
    _emit(args, out)
    return EXIT_OK


def _validity_payload(D):
    v = distmat.validate(D)
    out = {"n": D.n, "valid": v.ok}
    if not v.ok:
        out["witness"] = [i + 1 for i in v.witness]
        out["margin"] = v.margin
    return out, v


def cmd_validate(args):
    D = _load_dmat(args.dmat)
    out, v = _validity_payload(D)
    _emit(args, out)
    return EXIT_OK if v.ok else EXIT_VIOLATION


def cmd_from_points(args):
    pts = read_points_csv(args.points)
    p = np.inf if args.p in ("inf", "Inf", "infinity") else float(args.p)
    _emit(args, distmat.from_points(distmat.PointCloud(pts, p)).to_json())
    return EXIT_OK


def cmd_snowflake(args):
    D = distmat.hadamard_power(_load_dmat(args.dmat), args.power)
    out = D.to_json()
    out["valid"] = D.is_valid
    _emit(args, out)
    return EXIT_OK


def cmd_schoenberg(args):
    res = distmat.schoenberg_gram(_load_dmat(args.dmat))
    _emit(args, {"psd": res.psd, "rank": res.rank, "det": res.det,
                 "eigenvalues": res.eigenvalues, "gram": res.gram})
    return EXIT_OK


def cmd_embed(args):
    res = distmat.embed_points(_load_dmat(args.dmat))
    if isinstance(res, distmat.NotEmbeddable):
        _emit(args, {"embeddable": False, "min_eigenvalue": res.min_eigenvalue})
    else:
        _emit(args, {"embeddable": True, "dimension": res.points.shape[1],
                     "points": res.points})
    return EXIT_OK


def cmd_check_sufficient(args):
    op = _load_op(args.op)
    s = np.sqrt(np.clip(op.eigenvalues(), 0.0, None))[::-1]
    ok = triangular.certify_sufficient(op, _tol(args, triangular.CERT_TOL))
    _emit(args, {"certified": ok, "singular_values": s})
    return EXIT_OK


def cmd_check_3d(args):
    op = _load_op(args.op)
    tol = _tol(args, triangular.CERT_TOL)
    if args.vectors:
        vs = read_vectors(args.vectors)
        if len(vs) != 3:
            raise UsageError("check-3d needs exactly three vectors")
        ws = gram_schmidt(vs)
    else:
        ws = [u.copy() for u in np.eye(op.n, dtype=complex)[:3]]
    F = triangular.restriction(op, *ws)
    chk = triangular.check_3d_criterion(F, tol)
    out = {"ok": chk.ok, "eigenvalues": chk.eigenvalues, "margin": chk.margin}
    code = EXIT_OK
    if not chk.ok:
        x, y, z = triangular.criterion_witness(chk, *ws)
        value = triangular.deficit(op, x, y, z)
        out["witness"] = triangular.DeficitRecord(x, y, z, value).to_json()
        if value < -tol:
            code = EXIT_VIOLATION
    _emit(args, out)
    return code


def cmd_sample_triples(args):
    op = _load_op(args.op)
    rep = triangular.sample_triples_test(
        op, args.count, _rng(args), _tol(args, triangular.CERT_TOL), args.vector_mode
    )
    _emit(args, rep.to_json())
    return EXIT_VIOLATION if rep.verdict is triangular.Verdict.NOT_TRIANGULAR else EXIT_OK


def cmd_minimize(args):
    op = _load_op(args.op)
    tol = _tol(args, triangular.CERT_TOL)
    rec = triangular.minimize_deficit(op, args.restarts, args.steps, _rng(args), args.gtol)
    value = rec.recompute(op)
    out = rec.to_json()
    out["verified_deficit"] = value
    _emit(args, out)
    return EXIT_VIOLATION if value < -tol else EXIT_OK


def cmd_mu3(args):
    _emit(args, triangular.mu_closed_form_n3(args.d12, args.d13, args.d23))
    return EXIT_OK


def cmd_extreme_ray3(args):
    _emit(args, triangular.extreme_ray_n3(args.d12, args.d13, args.d23,
                                          _tol(args, triangular.CERT_TOL)))
    return EXIT_OK


def cmd_combine(args):
    _emit(args, triangular.cone_combine(_load_op(args.op1), _load_op(args.op2)).to_json())
    return EXIT_OK


def cmd_conjugate(args):
    op = _load_op(args.op)
    if args.unitary:
        U = complex_from_json(read_json(args.unitary))
    else:
        U = haar_unitary(op.n, _rng(args))
    _emit(args, triangular.conjugate_local(op, U).to_json())
    return EXIT_OK


def cmd_swap_basis(args):
    op = _load_op(args.op)
    i, j, k, l = (v - 1 for v in args.swap)
    _emit(args, triangular.permute_wedge_basis(op, ((i, j), (k, l))).to_json())
    return EXIT_OK


def cmd_lemma_a(args):
    res = trig_lemma.omega_min(args.a, args.b, args.t, args.grid, args.refine)
    _emit(args, {"omega": res.value, "theta": res.theta, "phi": res.phi,
                 "closed_form": trig_lemma.omega_closed_form(args.a, args.b, args.t)})
    return EXIT_OK


def cmd_search(args):
    cfg = harness.TrialConfig(
        args.dim, args.dmats, args.triples, args.mode, args.vector_mode,
        args.seed, _tol(args, harness.DEFAULT_TOL), args.threads, args.plant_violation,
    )
    rep = harness.run_search(cfg)
    _emit(args, rep.to_json(), "csv", (harness.SEARCH_HEADER, [rep.csv_row()]))
    return EXIT_VIOLATION if rep.min_deficit < -cfg.tol else EXIT_OK


def _parse_dims(text):
    dims = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            dims.extend(range(int(lo), int(hi) + 1))
        elif part:
            dims.append(int(part))
    if not dims or min(dims) < 3:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}")
    return dims


def cmd_reproduce_table(args):
    tol = _tol(args, harness.DEFAULT_TOL)
    rows, reports = harness.reproduce_table(
        args.dims, args.dmats, args.triples, args.seed, args.threads, tol
    )
    payload = [dict(zip(harness.TABLE_HEADER, r)) for r in rows]
    _emit(args, payload, "csv", (harness.TABLE_HEADER, rows))
    worst = min(r.min_deficit for r in reports)
    return EXIT_VIOLATION if worst < -tol else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="master RNG seed")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--tol", type=float, default=None,
                   help="violation tolerance (command-specific default)")
    g.add_argument("--format", choices=("json", "csv"), default=None)
    g.add_argument("--out", default=None, help="write output to FILE")

    p = _Parser(prog="cpdist", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("dist", cmd_dist, "Hilbert-Schmidt distance and semidistance of two states")
    sp.add_argument("vectors", help="JSON list of two complex vectors")
    sp.add_argument("--op", help="operator or distance-matrix JSON")

    sp = add("validate-dmat", cmd_validate, "check triangle inequalities of a matrix")
    sp.add_argument("dmat")

    sp = add("from-points", cmd_from_points, "distance matrix of a point cloud")
    sp.add_argument("points", help="CSV, one point per row")
    sp.add_argument("--p", default="2", help="norm exponent, or 'inf'")

    sp = add("snowflake", cmd_snowflake, "entrywise power of a distance matrix")
    sp.add_argument("dmat")
    sp.add_argument("--power", type=float, required=True)

    sp = add("schoenberg", cmd_schoenberg, "Schoenberg Gram matrix, PSD flag and rank")
    sp.add_argument("dmat")

    sp = add("embed", cmd_embed, "Euclidean embedding of a distance matrix")
    sp.add_argument("dmat")

    sp = add("check-sufficient", cmd_check_sufficient, "spectral sufficient condition")
    sp.add_argument("op")

    sp = add("check-3d", cmd_check_3d, "criterion on a 3-dimensional subspace")
    sp.add_argument("op")
    sp.add_argument("--vectors", help="JSON list of three vectors spanning the subspace")

    sp = add("sample-triples", cmd_sample_triples, "random-triple violation search")
    sp.add_argument("op")
    sp.add_argument("--count", type=int, default=10_000)
    sp.add_argument("--vector-mode", choices=harness.VECTOR_MODES, default="orthonormal")

    sp = add("minimize", cmd_minimize, "multi-start minimisation of the deficit")
    sp.add_argument("op")
    sp.add_argument("--restarts", type=int, default=triangular.DEFAULT_RESTARTS)
    sp.add_argument("--steps", type=int, default=triangular.DEFAULT_STEPS)
    sp.add_argument("--gtol", type=float, default=triangular.DEFAULT_GTOL)

    for name, func, help_ in (
        ("mu3", cmd_mu3, "closed-form minimum deficit for n = 3"),
        ("extreme-ray3", cmd_extreme_ray3, "extreme-ray test for n = 3"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("d12", type=float)
        sp.add_argument("d13", type=float)
        sp.add_argument("d23", type=float)

    sp = add("combine", cmd_combine, "operator with Q = Q1 + Q2")
    sp.add_argument("op1")
    sp.add_argument("op2")

    sp = add("conjugate", cmd_conjugate, "conjugate by a local unitary")
    sp.add_argument("op")
    sp.add_argument("--unitary", help="JSON n x n complex matrix (default: Haar random)")

    sp = add("swap-basis", cmd_swap_basis, "exchange two wedge-basis eigenvectors")
    sp.add_argument("op")
    sp.add_argument("--swap", type=int, nargs=4, required=True, metavar=("I", "J", "K", "L"),
                    help="1-based pairs (I,J) and (K,L)")

    sp = add("lemma-a", cmd_lemma_a, "numerical minimum of the two-angle function")
    sp.add_argument("a", type=float)
    sp.add_argument("b", type=float)
    sp.add_argument("t", type=float)
    sp.add_argument("--grid", type=int, default=400)
    sp.add_argument("--refine", type=int, default=200)

    sp = add("search", cmd_search, "seeded Monte Carlo violation search")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--dmats", type=int, default=100)
    sp.add_argument("--triples", type=int, default=1000)
    sp.add_argument("--mode", choices=harness.DMAT_MODES, default="random-uniform")
    sp.add_argument("--vector-mode", choices=harness.VECTOR_MODES, default="orthonormal")
    sp.add_argument("--plant-violation", action="store_true",
                    help="debug: replace the first matrix by a (1,1,3) triangle")

    sp = add("reproduce-table", cmd_reproduce_table, "dimension grid of searches")
    sp.add_argument("--dims", type=_parse_dims, default=list(range(3, 12)),
                    help="e.g. 3..8 or 3,5,7 (default 3..11)")
    sp.add_argument("--dmats", type=int, default=100)
    sp.add_argument("--triples", type=int, default=1000)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cpdist: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        print(f"cpdist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
