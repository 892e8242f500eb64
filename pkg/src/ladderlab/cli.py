"""Command-line interface.

Every subcommand writes machine-readable data (CSV or JSON) to stdout or to
``--output``; human-readable summaries go to stderr.  When ``--output`` is
given, run metadata is written next to it as ``<output>.meta.json`` so the
data file itself is byte-identical across runs.

Exit codes: 0 all checks within tolerance, 1 numerical failure, 2 usage or
parameter-constraint error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .models import MODEL_NAMES, ConstraintError, LevelRangeError, canonical_name, get_model

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# formatting


def fmt_float(v) -> str:
    return f"{float(v):.17g}"


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return json.dumps(str(v))


def to_json(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, list):
        return "[\n" + ",\n".join("  " + _json_value(r) for r in obj) + "\n]\n"
    return _json_value(obj) + "\n"


def _parse_cell(s: str):
    if s == "":
        return None
    if s in ("True", "False"):
        return s == "True"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def csv_to_records(text: str) -> list:
    return [{k: _parse_cell(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return v


# --------------------------------------------------------------------------
# configuration


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment; keys use dashes or underscores."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                k, v = line.split("=", 1)
                out[k.strip().replace("-", "_")] = v.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return out


def thread_count() -> int:
    raw = os.environ.get("LADDERLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"LADDERLAB_THREADS must be a positive integer, got {raw!r}")
    return n


MODEL_FLAGS = {"g": float, "h": float, "mu": float, "q": float, "a": "vector"}


def _convert(value, kind):
    if kind == "vector":
        parts = [p for p in str(value).split(",") if p.strip()]
        vals = tuple(float(p) for p in parts)
        return vals[0] if len(vals) == 1 else vals
    return kind(value)


def resolve(args, defaults: dict, config: dict):
    """Explicit flags override the config file, which overrides defaults."""
    out = {}
    for key, default in defaults.items():
        v = getattr(args, key, None)
        if v is None:
            v = config.get(key, default)
        out[key] = v
    return out


def build_model(args, config: dict):
    name = args.model or config.get("model")
    if not name:
        raise UsageError("--model is required")
    try:
        canon = canonical_name(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    params = {}
    for key, kind in MODEL_FLAGS.items():
        v = getattr(args, key, None)
        if v is None:
            v = config.get(key)
        if v is None:
            continue
        try:
            params[key] = _convert(v, kind)
        except ValueError as exc:
            raise UsageError(f"--{key}: {exc}") from exc
    if canon == "MeixnerPollaczek" and isinstance(params.get("a"), tuple):
        raise UsageError("MeixnerPollaczek takes a single parameter a")
    if canon != "MeixnerPollaczek" and "a" in params and not isinstance(params["a"], tuple):
        params["a"] = (params["a"],)
    return get_model(canon, params)


# --------------------------------------------------------------------------
# output


def emit(args, csv_text: str | None = None, obj=None, meta: dict | None = None):
    if args.format == "json":
        text = to_json(obj if obj is not None else csv_to_records(csv_text))
    else:
        text = csv_text if csv_text is not None else _obj_to_csv(obj)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        info = {
            "command": sys.argv[1:] if meta is None else meta.get("argv", sys.argv[1:]),
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "created_unix": time.time(),
        }
        if meta:
            info.update({k: v for k, v in meta.items() if k != "argv"})
        with open(args.output + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(to_json(info))
    else:
        sys.stdout.write(text)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _obj_to_csv(obj) -> str:
    return rows_csv(["key", "value"], list(_flatten(obj)))


def note(msg: str):
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# spectrum


def cmd_spectrum(args, config) -> int:
    from .matrix_heisenberg import closed_form_spectrum, heisenberg_pauli_spectrum

    spec = build_model(args, config)
    o = resolve(args, {"n_max": 10, "tol": 1e-10}, config)
    n_max, tol = int(o["n_max"]), float(o["tol"])
    cf = closed_form_spectrum(spec, n_max).energies
    it = heisenberg_pauli_spectrum(spec, n_max).energies
    if cf.size < n_max + 1:
        note(f"{spec.name} has {cf.size} bound levels; output truncated at n={cf.size - 1}")
    diffs = np.abs(cf - it)
    rows = [(n, c, i, d) for n, (c, i, d) in enumerate(zip(cf, it, diffs))]
    emit(args, rows_csv(["n", "E_closed", "E_iterated", "abs_diff"], rows))
    bad = diffs > tol * np.maximum(1.0, np.abs(cf))
    note(f"max |E_closed - E_iterated| = {float(np.max(diffs)):.3g} over {cf.size} levels")
    return EXIT_FAIL if np.any(bad) else EXIT_OK


# --------------------------------------------------------------------------
# verify


def verification_rows(spec, n_max: int = 12, threads: int = 1):
    """The full per-model check list as VerificationRow objects (ordered)."""
    from . import matrix_heisenberg as mh
    from . import operator_engine as oe
    from . import shape_invariance as si

    grid = oe.interior_grid(spec)
    top = int(min(n_max, spec.level_count - 1))
    jobs = []  # (n, name, tol, callable)

    for n in range(top + 1):
        jobs.append((n, "eigen_residual", 1e-8, lambda n=n: oe.eigen_residual(spec, n, grid)))
    for n in range(top + 1):
        for which in ("minus", "plus"):
            if which == "plus" and n + 1 >= spec.level_count:
                continue

            def ladder(n=n, which=which):
                rep = oe.apply_ladder(spec, which, n, grid)
                if which == "minus" and n == 0:
                    return rep.max_rel_residual
                return max(rep.max_rel_residual, rep.coefficient_error)

            tol = 1e-10 if (which == "minus" and n == 0) else 1e-9
            jobs.append((n, f"ladder_{which}", tol, ladder))
    for n in range(1, min(top + 1, int(min(1e9, spec.level_count - 1)))):
        jobs.append((n, "three_term", 1e-10, lambda n=n: oe.three_term_residual(spec, n, grid)))

    dim = int(min(40, spec.level_count))
    if dim >= 5:
        jobs.append((dim, "closure", 1e-8, lambda: mh.check_closure(spec, dim)))
        edim = min(20, dim)
        for t in (0.1, 1.0, 10.0):
            jobs.append((edim, f"heisenberg_evolution_t={t:g}", 1e-8, lambda t=t: mh.heisenberg_evolution_check(spec, edim, t)))
    jobs.append((top, "spectrum_iteration", 1e-10, lambda: _spectrum_error(spec, top)))

    herm_top = int(min(10, spec.level_count - 2))
    if herm_top >= 0:
        jobs.append((herm_top, "hermiticity_quadrature", 1e-6, lambda: oe.hermiticity_check(spec, herm_top)))
    ortho_top = int(min(4, spec.level_count - 1))
    for m in range(ortho_top + 1):
        for n in range(m + 1, ortho_top + 1):
            jobs.append((n, f"orthogonality_{m}", 1e-8, lambda m=m, n=n: _ortho(spec, m, n)))

    if spec.kind == "ordinary":
        jobs.append((0, "prepotential", 1e-10, lambda: si.prepotential_check(spec, grid)))
    else:
        jobs.append((min(20, n_max), "shape_energy_factorization", 1e-12, lambda: si.energy_factorization_check(spec, 20)))
        for n in range(1, top + 1):
            jobs.append((n, "shape_forward", 1e-9, lambda n=n: si.forward_shift_check(spec, n, grid)))
        for n in range(top):
            jobs.append((n, "shape_backward", 1e-9, lambda n=n: si.backward_shift_check(spec, n, grid)))
        if spec.name in si.COMPENSATED:
            for n in range(min(top, 6) + 1):
                jobs.append((n, "compensator", 1e-10, lambda n=n: max(si.compensator_check(spec, n, grid))))
        if spec.name != "AskeyWilson":
            jobs.append((0, "ground_shift_identity", 1e-9, lambda: si.ground_shift_identity_check(spec, grid)))

    def run(job):
        n, name, tol, fn = job
        try:
            val = float(fn())
        except (ArithmeticError, ValueError) as exc:
            note(f"{name} (n={n}) raised {type(exc).__name__}: {exc}")
            val = math.inf
        if not math.isfinite(val):
            val = math.inf
        return oe.VerificationRow(spec.name, oe.params_hash(spec), n, name, val, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(run, jobs))
    return [run(j) for j in jobs]


def _spectrum_error(spec, top):
    from .matrix_heisenberg import closed_form_spectrum, heisenberg_pauli_spectrum

    cf = closed_form_spectrum(spec, top).energies
    it = heisenberg_pauli_spectrum(spec, top).energies
    return float(np.max(np.abs(cf - it) / np.maximum(1.0, np.abs(cf))))


def _ortho(spec, m, n):
    from .operator_engine import norm_squared, orthogonality

    return abs(orthogonality(spec, m, n)) / math.sqrt(norm_squared(spec, m) * norm_squared(spec, n))


def cmd_verify(args, config) -> int:
    from .operator_engine import rows_to_csv

    spec = build_model(args, config)
    o = resolve(args, {"n_max": 12}, config)
    rows = verification_rows(spec, int(o["n_max"]), thread_count())
    emit(args, rows_to_csv(rows))
    failed = [r for r in rows if not r.passed]
    for r in failed:
        note(f"FAILED {r.check_name} n={r.n}: residual {r.residual:.3g} > {r.tolerance:.1g}")
    note(f"{spec.name}: {len(rows) - len(failed)}/{len(rows)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# classical


def cmd_classical(args, config) -> int:
    from . import classical as cl

    spec = build_model(args, config)
    x0d, p0d = cl.DEFAULT_INITIAL_DATA[spec.name]
    o = resolve(args, {"x0": x0d, "p0": p0d, "periods": 3.0, "steps": 100_000, "every": 100, "tol": 1e-6}, config)
    x0, p0 = float(o["x0"]), float(o["p0"])
    periods, steps, every, tol = float(o["periods"]), int(o["steps"]), int(o["every"]), float(o["tol"])
    try:
        T = cl.period(spec, x0, p0)
    except cl.ClosedFormError as exc:
        raise UsageError(f"initial data is not oscillatory: {exc}") from exc
    traj = cl.integrate(spec, x0, p0, periods * T, steps)
    dev = cl.compare(spec, x0, p0, periods * T, traj=traj)
    drift = traj.energy_drift / periods
    inv = cl.bound_invariant(spec, traj)
    emit(args, cl.trajectory_csv(spec, traj, x0, p0, every), meta={"max_eta_deviation": dev, "energy_drift_per_period": drift, "period": T})
    note(f"{spec.name}: period {T:.12g}, max |eta - closed form| = {dev:.3g}, energy drift/period = {drift:.3g}, invariant {'holds' if inv else 'FAILS'}")
    ok = dev <= tol and drift <= 1e-9 and inv
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# coherent


def _parse_complex(s) -> complex:
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse {s!r} as a complex number") from exc


def cmd_coherent(args, config) -> int:
    from . import coherent as co
    from .operator_engine import interior_grid

    spec = build_model(args, config)
    o = resolve(args, {"lam": "0.3", "variant": "a", "n_max": 60, "npts": 50, "tol": 1e-8}, config)
    lam = _parse_complex(o["lam"])
    variant = str(o["variant"]).replace("-", "_")
    if variant not in co.VARIANTS:
        raise UsageError("--variant must be 'a' or 'a-prime'")
    n_max, tol = int(o["n_max"]), float(o["tol"])
    x = interior_grid(spec, int(o["npts"]))
    try:
        ev = co.coherent_series(spec, variant, lam, x, n_max)
    except co.CoherentStateError as exc:
        raise UsageError(str(exc)) from exc
    try:
        closed = np.asarray(co.coherent_closed_form(spec, variant, lam, x), dtype=complex)
    except co.UnsupportedClosedFormError:
        closed = None
        note(f"{spec.name}: no closed form; reporting the series only")
    aocs = co.verify_aocs(spec, variant, lam, x, n_max)
    rows = []
    for k, xv in enumerate(x):
        s = ev.value[k]
        if closed is None:
            rows.append((xv, s.real, s.imag, None, None, None))
        else:
            c = closed[k]
            rows.append((xv, s.real, s.imag, c.real, c.imag, abs(s - c)))
    emit(args, rows_csv(["x", "series_re", "series_im", "closed_re", "closed_im", "abs_diff"], rows), meta={"aocs_residual": aocs})
    ok = aocs <= 1e-7
    msg = f"{spec.name} variant {variant} lambda={lam}: AOCS residual {aocs:.3g}"
    if closed is not None:
        diff = float(np.max(np.abs(ev.value - closed)) / max(np.max(np.abs(closed)), 1e-300))
        msg += f", series vs closed form {diff:.3g}"
        ok = ok and diff <= tol
    note(msg)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# classify

NEGATIVE_THRESHOLD = 1e-3
CONTROL_THRESHOLD = 1e-9


def cmd_classify(args, config) -> int:
    from . import classifier as cf

    neg = args.negative or config.get("negative")
    if neg:
        if neg not in cf.NEGATIVE_EXAMPLES:
            raise UsageError(f"unknown negative example {neg!r}; known: {', '.join(cf.NEGATIVE_EXAMPLES)}")
        overrides = {}
        for key in ("g", "mu"):
            v = getattr(args, key, None) or config.get(key)
            if v is not None:
                overrides[key] = float(v)
        if neg == "kepler-rational":
            overrides.pop("mu", None)
        res = cf.negative_example_suite(names=[neg], overrides=overrides, include_control=bool(args.control))
        rows = []
        for name, r in res:
            control = name.startswith("control")
            thr = CONTROL_THRESHOLD if control else NEGATIVE_THRESHOLD
            ok = r < thr if control else r > thr
            rows.append((name, r, thr, "below" if control else "above", ok))
            note(f"{name}: best-fit closure residual {r:.3g} ({'expected' if ok else 'UNEXPECTED'})")
        emit(args, rows_csv(["example", "best_fit_residual", "threshold", "expected_side", "pass"], rows))
        return EXIT_OK if all(r[-1] for r in rows) else EXIT_FAIL

    keys = {"r1": 0.0, "r0_0": 1.0, "rm1_1": 0.0, "rm1_0": 0.0, "c": 0.0, "c1": 1.0, "c2": 0.0, "tol": 1e-10}
    o = resolve(args, keys, config)
    params = cf.SinusoidalParams(**{k: float(o[k]) for k in keys if k != "tol"})
    if args.zero_ground:
        zp = cf.zero_ground_params(params)
        if zp is None:
            raise UsageError("r0_0 + r1^2/4 < 0: the prepotential coefficients are not real")
        params = zp
    try:
        con = cf.construct(params)
    except cf.DegenerateCoordinateError as exc:
        raise UsageError(str(exc)) from exc
    report = cf.classification_report(con)
    if args.zero_ground:
        report["residuals"]["prepotential"] = cf.prepotential_residual(con)
    emit(args, obj=report)
    worst = max(v for v in report["residuals"].values() if v == v)
    m = report["matched_model"]
    note(f"family {report['family']} ({report['subcase']}), matched {m['name'] if m else 'no registry model'}, worst residual {worst:.3g}")
    return EXIT_OK if worst <= float(o["tol"]) else EXIT_FAIL


# --------------------------------------------------------------------------
# describe


def cmd_describe(args, config) -> int:
    spec = build_model(args, config)
    o = resolve(args, {"n_max": 5}, config)
    top = int(min(int(o["n_max"]), spec.level_count - 1))
    levels = spec.level_count
    info = {
        "model": spec.name,
        "kind": spec.kind,
        "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in spec.params.items()},
        "domain": list(spec.domain),
        "level_count": levels if math.isfinite(levels) else "infinite",
        "R0": list(spec.R0),
        "R1": list(spec.R1),
        "Rm1": list(spec.Rm1),
        "energies": [spec.energy(n) for n in range(top + 1)],
    }
    emit(args, obj=info)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _model_options(p):
    g = p.add_argument_group("model")
    g.add_argument("--model", help=f"one of: {', '.join(MODEL_NAMES)} (kebab-case accepted)")
    g.add_argument("--g", help="coupling g (SymPoschlTeller, PoschlTeller, Soliton, Morse, RadialOscillator)")
    g.add_argument("--h", help="second coupling h (PoschlTeller)")
    g.add_argument("--mu", help="Morse scale mu")
    g.add_argument("--a", help="a or comma-separated a_j (discrete models)")
    g.add_argument("--q", help="q in (0, 1) (AskeyWilson)")


def _common(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    p.add_argument("--output", help="output file (default stdout); metadata goes to <output>.meta.json")
    p.add_argument("--config", help="key=value file supplying defaults for any long flag")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ladderlab", description="Ladder operators of solvable quantum mechanics: computations and checks.")
    ap.add_argument("--version", action="version", version=f"ladderlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="closed-form vs Heisenberg-Pauli iterated spectrum")
    _model_options(p)
    _common(p)
    p.add_argument("--n-max", dest="n_max", type=int, help="highest level (default 10)")
    p.add_argument("--tol", type=float, help="relative tolerance (default 1e-10)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run the full per-model verification suite")
    _model_options(p)
    _common(p)
    p.add_argument("--n-max", dest="n_max", type=int, help="highest level checked (default 12)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classical", help="RK4 trajectory against the closed-form sinusoid")
    _model_options(p)
    _common(p)
    p.add_argument("--x0", type=float, help="initial coordinate (model default)")
    p.add_argument("--p0", type=float, help="initial momentum (model default)")
    p.add_argument("--periods", type=float, help="integration time in periods (default 3)")
    p.add_argument("--steps", type=int, help="RK4 steps (default 100000)")
    p.add_argument("--every", type=int, help="write every k-th sample (default 100)")
    p.add_argument("--tol", type=float, help="max allowed eta deviation (default 1e-6)")
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("coherent", help="coherent-state series, closed form and eigen-residual")
    _model_options(p)
    _common(p)
    p.add_argument("--lambda", dest="lam", help="eigenvalue, e.g. 0.3 or 0.1+0.2j (default 0.3)")
    p.add_argument("--variant", help="a or a-prime (default a)")
    p.add_argument("--n-max", dest="n_max", type=int, help="series truncation (default 60)")
    p.add_argument("--npts", type=int, help="grid points (default 50)")
    p.add_argument("--tol", type=float, help="series vs closed form tolerance (default 1e-8)")
    p.set_defaults(func=cmd_coherent)

    p = sub.add_parser("classify", help="construct and classify potentials with a sinusoidal coordinate")
    _common(p)
    p.add_argument("--negative", help="run a negative example: kepler-rational, kepler-spherical, kepler-hyperbolic, rosen-morse")
    p.add_argument("--control", action="store_true", help="also run the positive control fit")
    p.add_argument("--g", help="g for the negative example")
    p.add_argument("--mu", help="mu for the negative example")
    for flag, dest in (("--r1", "r1"), ("--r0-0", "r0_0"), ("--rm1-1", "rm1_1"), ("--rm1-0", "rm1_0"), ("--c", "c"), ("--c1", "c1"), ("--c2", "c2")):
        p.add_argument(flag, dest=dest, type=float, help=f"closure parameter {dest}")
    p.add_argument("--zero-ground", action="store_true", help="choose c so the ground energy is zero and check the prepotential")
    p.add_argument("--tol", type=float, help="tolerance on the condition residuals (default 1e-10)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("describe", help="model summary: parameters, R coefficients, first energies")
    _model_options(p)
    _common(p)
    p.add_argument("--n-max", dest="n_max", type=int, help="number of energies listed (default 5)")
    p.set_defaults(func=cmd_describe)
    return ap


def _join_negative_values(argv):
    """Turn '--a -1,1' into '--a=-1,1' so argparse does not read a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt is not None and re.match(r"^-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = ap.parse_args(_join_negative_values(argv))
    try:
        config = read_config(args.config) if args.config else {}
        return args.func(args, config)
    except (UsageError, ConstraintError, LevelRangeError) as exc:
        note(f"error: {exc.args[0] if exc.args else exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
