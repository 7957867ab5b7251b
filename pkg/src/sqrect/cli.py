"""Command-line entry point: ``sqrect <command> ...``.

JSON goes to stdout (or ``--json PATH``); a short human summary goes to
stderr. Exit codes: 0 success, 1 check failed, 2 invalid input, 3 solver did
not converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import layout as lay
from . import phi as phimod
from .dumbbell import (
    Dumbbell,
    DumbbellError,
    check_virtually_bar_uniform,
    dumbbell_from_json,
    subdivide_dumbbell,
)
from .grid import ComplexError, GridComplex, subdivide
from .solver import MaxIterationsExceeded, SolverError, WeightFunction, solve_optimal
from .vectors import NotAPartition, vector

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NOCONV = 0, 1, 2, 3

log = logging.getLogger("sqrect")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    tol_feas: float = 1e-10
    tol_kkt: float = 1e-9
    tol_layout: float = 1e-9
    max_iter: int = 100
    normalization: str = "height-one"
    exact: bool = False
    level: int = 0
    seed: int = 0

    def __post_init__(self):
        if min(self.tol_feas, self.tol_kkt, self.tol_layout) <= 0:
            raise InputError("tolerances must be positive")
        if self.level < 0:
            raise InputError("--level must be nonnegative")
        if self.max_iter < 1:
            raise InputError("--max-iter must be positive")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            tol_feas=getattr(args, "tol_feas", cls.tol_feas),
            tol_kkt=getattr(args, "tol_kkt", cls.tol_kkt),
            tol_layout=getattr(args, "tol_layout", cls.tol_layout),
            max_iter=getattr(args, "max_iter", cls.max_iter),
            normalization=getattr(args, "normalize", cls.normalization),
            exact=getattr(args, "exact", cls.exact),
            level=getattr(args, "level", cls.level),
            seed=getattr(args, "seed", cls.seed),
        )


# ---------------------------------------------------------------------------
# I/O helpers


def _read_json(src: str):
    try:
        text = sys.stdin.read() if src == "-" else Path(src).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {src}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{src}: malformed JSON ({exc})") from exc


def load_shape(src: str):
    """A dumbbell if the document has a ``bar`` key, otherwise a plain complex."""
    doc = _read_json(src)
    if not isinstance(doc, dict):
        raise InputError("expected a JSON object")
    if "bar" in doc:
        return dumbbell_from_json(doc)
    return GridComplex.from_json(doc)


def _complex_of(shape) -> GridComplex:
    return shape.complex if isinstance(shape, Dumbbell) else shape


def _subdivided(shape, level: int):
    if isinstance(shape, Dumbbell):
        return subdivide_dumbbell(shape, level)
    return subdivide(shape, level)


def _emit(doc, path=None):
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_vector(arg: str):
    """``[1, "1/2", 0]`` JSON, a JSON file, or comma-separated rationals."""
    p = Path(arg)
    try:
        if p.is_file():
            data = json.loads(p.read_text())
        elif arg.lstrip().startswith("["):
            data = json.loads(arg)
        else:
            data = [s.strip() for s in arg.split(",") if s.strip()]
        return vector([Fraction(str(v)) for v in data])
    except (ValueError, TypeError, ZeroDivisionError, json.JSONDecodeError) as exc:
        raise InputError(f"bad weight vector {arg!r}: {exc}") from exc


def _vec_json(x):
    return [str(v) for v in x]


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    cfg = RunConfig.from_args(args)
    shape = _subdivided(load_shape(args.input), cfg.level)
    c = _complex_of(shape)
    try:
        r = solve_optimal(
            c, tol_feas=cfg.tol_feas, tol_kkt=cfg.tol_kkt, max_iter=cfg.max_iter,
            normalization=cfg.normalization, exact=cfg.exact,
        )
    except MaxIterationsExceeded as exc:
        log.error("%s", exc)
        if exc.best is not None:
            _emit({"converged": False, "result": exc.best.to_json()}, args.json)
        return EXIT_NOCONV
    doc = r.to_json()
    doc["converged"] = True
    doc["tiles"] = len(c)
    out = lay.layout_squares(c, r, validate=False, exact=None)
    report = lay.validate_layout(out, tol=cfg.tol_layout)
    doc["layout"] = lay.emit_json(out)
    doc["layout_report"] = report.to_json()
    if isinstance(shape, Dumbbell):
        doc["uniformity"] = check_virtually_bar_uniform(shape, r.rho).to_json()
    if args.svg:
        lay.emit_svg(out, args.svg, labels=args.labels)
    _emit(doc, args.json)
    print(
        f"{len(c)} tiles, modulus {r.modulus:.12g}, {r.iterations} iterations, "
        f"layout {'ok' if report.passed else 'FAILED'}",
        file=sys.stderr,
    )
    if not report.passed:
        log.error("layout validation failed: %s", report.summary())
        return EXIT_FAIL
    return EXIT_OK


def cmd_subdivide(args) -> int:
    cfg = RunConfig.from_args(args)
    shape = _subdivided(load_shape(args.input), cfg.level)
    _emit(shape.to_json(), args.json)
    print(f"{len(_complex_of(shape))} tiles after {cfg.level} subdivisions", file=sys.stderr)
    return EXIT_OK


def _weights_from_file(path, c: GridComplex) -> WeightFunction:
    doc = _read_json(path)
    try:
        entries = doc["weights"]
        table = {}
        for e in entries:
            w = e.get("w_exact", e["w"])
            table[tuple(e["tile"])] = Fraction(str(w))
        return WeightFunction.from_mapping(c, {t: float(table[t]) for t in c.tiles}, exact=False)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad weight document ({exc})") from exc


def cmd_verify_dumbbell(args) -> int:
    cfg = RunConfig.from_args(args)
    shape = load_shape(args.input)
    if not isinstance(shape, Dumbbell):
        raise InputError("verify-dumbbell needs a dumbbell document (with a 'bar' key)")
    d = subdivide_dumbbell(shape, cfg.level)
    if args.weights:
        rho = _weights_from_file(args.weights, d.complex)
        iterations = None
    else:
        try:
            r = solve_optimal(d.complex, tol_feas=cfg.tol_feas, tol_kkt=cfg.tol_kkt, max_iter=cfg.max_iter)
        except MaxIterationsExceeded as exc:
            log.error("%s", exc)
            return EXIT_NOCONV
        rho, iterations = r.rho, r.iterations
    rep = check_virtually_bar_uniform(d, rho, tol=args.tol)
    doc = rep.to_json()
    doc["bar_height"] = d.n
    doc["tiles"] = len(d.complex)
    doc["iterations"] = iterations
    _emit(doc, args.json)
    rel = float(rep.max_deviation) / float(rep.height)
    print(
        f"{len(rep.qualifying_tiles)} middle tiles, max relative deviation {rel:.3e}: "
        f"{'pass' if rep.passed else 'FAIL'}",
        file=sys.stderr,
    )
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_phi(args) -> int:
    x = _parse_vector(args.vector)
    op = args.op
    if op == "apply":
        res = phimod.phi(x)
        doc = {"y": _vec_json(res.y), "blocked_leaners": [list(b) for b in res.blocked_leaners]}
    elif op == "iterate":
        doc = {"y": _vec_json(phimod.iterate_phi(x, args.m)), "m": args.m}
    elif op == "mu":
        m = phimod.mu(x)
        doc = {"mu": m.mu, "per_index": list(m.per_index)}
    elif op == "preimage":
        try:
            doc = {"x": _vec_json(phimod.minimal_preimage(x))}
        except phimod.NotInImage as exc:
            _emit({"error": "NotInImage", "message": str(exc)}, args.json)
            print(f"not in the image: {exc}", file=sys.stderr)
            return EXIT_INVALID
    elif op == "extend":
        if args.m < 1:
            raise InputError("extend needs --m >= 1")
        doc = {"columns": [_vec_json(col) for col in phimod.extend_rectangle(x, args.m)]}
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(op)
    _emit(doc, args.json)
    return EXIT_OK


def cmd_fixture(args) -> int:
    from . import shapes

    name = args.name
    if name == "fig1":
        shape = shapes.fig1_dumbbell()
    elif name == "fig7":
        shape = shapes.fig7_tray()
    elif name == "d1":
        shape = shapes.d1_ell()
    elif name == "random-dumbbell":
        shape = shapes.random_dumbbell(random.Random(args.seed))
    else:
        shape = shapes.random_quadrilateral(random.Random(args.seed))
    shape = _subdivided(shape, args.level)
    _emit(shape.to_json(), args.json)
    return EXIT_OK


def cmd_gallery(args) -> int:
    """Solve and draw the fixture shapes at several subdivision levels."""
    from . import shapes

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    # the ell is drawn from level 0, the dumbbells from their first subdivision
    fixtures = {
        "d1": (shapes.d1_ell(), 0),
        "fig1": (shapes.fig1_dumbbell(), 1),
        "fig7": (shapes.fig7_tray(), 1),
    }
    summary = []
    status = EXIT_OK
    for name, (shape, first) in fixtures.items():
        for level in range(first, first + args.levels):
            c = _complex_of(_subdivided(shape, level))
            r = solve_optimal(c)
            l = lay.layout_squares(c, r, validate=False)
            rep = lay.validate_layout(l)
            target = out / f"{name}_level{level}.svg"
            lay.emit_svg(l, target)
            summary.append({"fixture": name, "level": level, "tiles": len(c), "modulus": r.modulus,
                            "svg": str(target), "layout_ok": rep.passed})
            if not rep.passed:
                status = EXIT_FAIL
            print(f"{target}: {len(c)} tiles, modulus {r.modulus:.10g}", file=sys.stderr)
    _emit(summary, args.json)
    return status


# ---------------------------------------------------------------------------


def _solver_flags(p):
    p.add_argument("--tol-feas", type=float, default=1e-10, help="allowed shortfall of the shortest path below height 1")
    p.add_argument("--tol-kkt", type=float, default=1e-9, help="optimality residual tolerance")
    p.add_argument("--max-iter", type=int, default=100, help="cutting-plane iteration limit")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sqrect", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal weight function and squared-rectangle layout")
    p.add_argument("input", help="complex or dumbbell JSON ('-' for stdin)")
    _solver_flags(p)
    p.add_argument("--normalize", choices=("height-one", "integer"), default="height-one")
    p.add_argument("--exact", action="store_true", help="also compute exact rational weights")
    p.add_argument("--level", type=int, default=0, help="binary subdivisions applied first")
    p.add_argument("--tol-layout", type=float, default=1e-9)
    p.add_argument("--svg", help="write the layout as SVG")
    p.add_argument("--labels", action="store_true", help="label squares with tile coordinates")
    p.add_argument("--json", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("subdivide", help="apply binary subdivision")
    p.add_argument("input")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--json")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("verify-dumbbell", help="check that the optimal weights are uniform on the middle of the bar")
    p.add_argument("input")
    _solver_flags(p)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-7, help="allowed deviation relative to the height")
    p.add_argument("--weights", help="check these weights (result JSON) instead of solving")
    p.add_argument("--json")
    p.set_defaults(func=cmd_verify_dumbbell)

    p = sub.add_parser("phi", help="skinny cut function on exact weight vectors")
    p.add_argument("op", choices=("apply", "iterate", "mu", "preimage", "extend"))
    p.add_argument("vector", help='e.g. "[1,0,0]", "1,1/2,0" or a JSON file')
    p.add_argument("--m", type=int, default=1, help="iterations (iterate) or columns (extend)")
    p.add_argument("--json")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("fixture", help="emit a built-in or random shape as JSON")
    p.add_argument("name", choices=("fig1", "fig7", "d1", "random-dumbbell", "random-quadrilateral"))
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("gallery", help="SVG layouts of the built-in shapes")
    p.add_argument("outdir")
    p.add_argument("--levels", type=int, default=3, help="subdivision levels drawn per shape")
    p.add_argument("--json")
    p.set_defaults(func=cmd_gallery)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ComplexError, DumbbellError, NotAPartition, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
