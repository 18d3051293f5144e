"""Command line entry point: ``polyheis <command> [options]``.

Validation failures exit with status 2 and one diagnostics line on stderr,
``error kind=<Kind> message=<text>``; failed verification exits with 1.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import InputError, PolyheisError
from .polygon import PolygonNormData, build_geometry, hexagon, square

log = logging.getLogger("polyheis")

BUILTIN = {"hexagon": hexagon, "square": square}


# ---------------------------------------------------------------- formatting


def fmt(x) -> str:
    """12 significant digits; integers and infinities spelled plainly."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x + 0.0:.12g}"
    return str(x)


def rounded(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt(x)
        return float(f"{x + 0.0:.12g}")
    return obj


def dump_json(obj, path=None) -> str:
    text = json.dumps(rounded(obj), indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def write_csv(rows: list, path) -> None:
    if not rows:
        Path(path).write_text("")
        return
    cols = list(rows[0].keys())
    for r in rows[1:]:
        cols.extend(k for k in r if k not in cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r[c]) if not isinstance(r.get(c), (dict, list))
                        else json.dumps(rounded(r[c]), sort_keys=True) for c in cols]
                       if all(c in r for c in cols) else
                       [fmt(r.get(c, "")) for c in cols])


# ---------------------------------------------------------------- parsing


def load_polygon(spec: str) -> PolygonNormData:
    if spec in BUILTIN:
        return BUILTIN[spec]()
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"polygon file {spec!r} does not exist")
    try:
        data = json.loads(path.read_text())
        verts = data["vertices"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"polygon file must be JSON with a 'vertices' list: {exc}") from None
    return build_geometry(verts)


def parse_floats(text: str, n: int | None, what: str) -> list:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"{what} must be comma separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{what} needs {n} values, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"{what} must be finite")
    return vals


def parse_grid(text: str | None):
    from .blowup import GridWindow

    if text is None:
        return None
    R, h = parse_floats(text, 2, "--grid")
    if not 0 < h < R:
        raise InputError("--grid needs 0 < spacing < R")
    return GridWindow(radius=R, spacing=h)


def parse_eps(text: str | None):
    if text is None:
        return None
    a, b = parse_floats(text, 2, "--eps-schedule")
    if not (a > 0 and b > 0 and a != b):
        raise InputError("--eps-schedule needs two distinct positive values")
    return (a, b)


def parse_horofunction(text: str, g: PolygonNormData):
    """``linear:a,b`` | ``norm:wx,wy`` | ``<family>:i,s,a`` with 1-based i."""
    from .horo import FAMILIES, linear, norm_type, two_piece

    kind, _, rest = text.partition(":")
    if kind == "linear":
        return linear(parse_floats(rest, 2, "linear covector"))
    if kind == "norm":
        return norm_type(parse_floats(rest, 2, "norm-type w"))
    if kind in FAMILIES:
        parts = rest.split(",")
        if len(parts) != 3:
            raise InputError(f"{kind} needs i,s,a")
        try:
            i = int(parts[0])
            s, a = float(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"bad two-piece parameters {rest!r}") from None
        return two_piece(g, i - 1, kind, s, a)
    raise InputError(f"unknown horofunction {text!r}")


# ---------------------------------------------------------------- commands


def cmd_geom(args, g: PolygonNormData) -> int:
    text = dump_json(g.report(), args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_dist(args, g: PolygonNormData) -> int:
    from .distance import d_e, geodesic

    if args.point is None:
        raise InputError("dist needs --point x,y,z")
    p = np.array(parse_floats(args.point, 3, "--point"))
    lam = d_e(g, p)
    print(fmt(lam))
    if args.path:
        if lam == 0.0:
            rows = [{"x": 0.0, "y": 0.0, "z": 0.0}]
        else:
            path = geodesic(g, p)
            rows = [{"x": q[0], "y": q[1], "z": q[2]} for q in path.lifted]
        write_csv(rows, args.path)
    if args.report:
        info = {"point": p, "distance": lam}
        if lam > 0:
            path = geodesic(g, p)
            info.update(kind=path.kind, length=path.length,
                        endpoint_error=float(np.max(np.abs(path.lifted[-1] - p))))
        dump_json(info, args.report)
    return 0


def cmd_sphere_mesh(args, g: PolygonNormData) -> int:
    from .mesh import sphere_mesh, write_mtl, write_obj

    out = Path(args.out or "sphere.obj")
    n = args.samples or 16
    if n < 2:
        raise InputError("--samples must be at least 2")
    mesh = sphere_mesh(g, n)
    mtl = out.with_suffix(".mtl")
    write_obj(mesh, out, mtl.name)
    write_mtl(mesh, mtl)
    zlo, zhi = mesh.z_range()
    summary = {"vertices": len(mesh.vertices), "faces": len(mesh.faces),
               "groups": len(set(mesh.groups)), "boundary_edges": len(mesh.boundary_edges()),
               "z_min": zlo, "z_max": zhi, "samples_per_panel": n}
    if args.report:
        from .render import plot_mesh

        dump_json(summary, args.report)
        plot_mesh(mesh, Path(args.report).with_suffix(".png"))
    sys.stdout.write(dump_json(summary))
    return 0


def cmd_horo(args, g: PolygonNormData) -> int:
    from .horo import act, evaluate, is_busemann, orbit_class, to_record

    if args.action == "atlas":
        from .render import render_atlas

        out = args.out or "atlas.svg"
        labels = render_atlas(g, out)
        sys.stdout.write(dump_json({"atlas": out, "charts": labels}))
        return 0
    if not args.horo:
        raise InputError(f"horo {args.action} needs --horo")
    h = parse_horofunction(args.horo, g)
    if args.point is None:
        raise InputError(f"horo {args.action} needs --point x,y,z")
    p = np.array(parse_floats(args.point, 3, "--point"))
    if args.action == "eval":
        print(fmt(evaluate(h, p, g)))
        return 0
    moved = act(p, h, g)
    report = {"input": to_record(h), "element": p, "image": to_record(moved),
              "orbit_class": list(orbit_class(h, g)), "busemann": is_busemann(h, g),
              "same_class": orbit_class(moved, g) == orbit_class(h, g)}
    text = dump_json(report, args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


def _suite_figure(res, path: Path) -> None:
    from .render import plot_histogram, plot_series

    rows = res.rows
    if res.name == "eikonal":
        plot_histogram(path, [r["dual_gauge"] - 1.0 for r in rows], "eikonal residual",
                       "dual gauge - 1")
    elif res.name == "pansu":
        plot_histogram(path, [r["error_0"] for r in rows], "difference quotient error",
                       "error at the first rung", threshold=1e-3)
    elif res.name == "vertical":
        ws = sorted({r["w_index"] for r in rows})
        s = [r["s"] for r in rows if r["w_index"] == 0]
        series = {f"w{k}": [r["deviation"] for r in rows if r["w_index"] == k] for k in ws}
        plot_series(path, s, series, "vertical sequences", "s", "sup deviation", threshold=1e-2)
    elif res.name == "blowup":
        keys = sorted({(r["class"], r["member"]) for r in rows})
        eps = [r["eps"] for r in rows if (r["class"], r["member"]) == keys[0]]
        series = {f"{c}#{m}": [r["deviation"] for r in rows if (r["class"], r["member"]) == (c, m)]
                  for c, m in keys}
        plot_series(path, eps, series, "blow-up sequences", "eps", "sup deviation",
                    threshold=1e-2)
    elif res.name == "action":
        plot_histogram(path, [max(r["act_residual"], 1e-18) for r in rows],
                       "action residuals", "residual", threshold=1e-9)


def cmd_verify(args, g: PolygonNormData) -> int:
    from .verify import SUITES, run_suite

    names = SUITES if args.suite == "all" else (args.suite,)
    grid, eps = parse_grid(args.grid), parse_eps(args.eps_schedule)
    summaries, ok = [], True
    for name in names:
        res = run_suite(name, g, samples=args.samples, seed=args.seed, grid=grid,
                        eps_schedule=eps)
        res.summary.pop("seconds", None)  # keep reports byte-stable
        summaries.append(res.summary)
        ok &= res.passed
        if args.out:
            out = Path(args.out)
            target = out if len(names) == 1 else out.with_name(f"{out.stem}_{name}{out.suffix}")
            write_csv(res.rows, target)
        if args.report:
            rep = Path(args.report)
            fig = rep.with_name(f"{rep.stem}_{name}.png")
            _suite_figure(res, fig)
        print(f"{name}: {'PASS' if res.passed else 'FAIL'}")
    if args.report:
        dump_json({"suites": summaries, "passed": ok}, args.report)
    return 0 if ok else 1


COMMANDS = {"geom": cmd_geom, "dist": cmd_dist, "sphere-mesh": cmd_sphere_mesh,
            "horo": cmd_horo, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--polygon", required=True,
                        help="JSON file {\"vertices\": [[x, y], ...]} or a builtin: hexagon, square")
    common.add_argument("--point", help="x,y,z")
    common.add_argument("--samples", type=int)
    common.add_argument("--grid", help="R,spacing")
    common.add_argument("--eps-schedule", help="a,b")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out")
    common.add_argument("--report")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="polyheis", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("geom", parents=[common], help="validate a polygon and print its geometry")
    d = sub.add_parser("dist", parents=[common], help="distance from the identity")
    d.add_argument("--path", help="write the lifted geodesic as CSV")
    sub.add_parser("sphere-mesh", parents=[common], help="export the unit sphere as OBJ/MTL")
    h = sub.add_parser("horo", parents=[common], help="horofunction tools")
    h.add_argument("action", choices=("eval", "atlas", "orbit"))
    h.add_argument("--horo", help="linear:a,b | norm:wx,wy | psi_vee:i,s,a (and the other families)")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", choices=("pansu", "vertical", "blowup", "eikonal", "action",
                                     "kuratowski", "all"))
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        g = load_polygon(args.polygon)
        return COMMANDS[args.command](args, g)
    except PolyheisError as exc:
        msg = " ".join(str(exc).split())
        print(f"error kind={exc.kind} message={msg}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error kind=InputError message={exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
