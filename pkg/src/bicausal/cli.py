"""Command-line interface: verify identities, tabulate surface data, export meshes.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .ambient import SpaceParams, Signature
from .catalog import CATALOG, build_surface, default_surfaces
from .errors import ConfigInvalid, GeometryError, UnsupportedFormat
from .identities import IDENTITIES, IDENTITY_NAMES, SampleSkip, curvature_suite
from .numdiff import FDSteps
from .suite import DEFAULT_PARAMS, SuiteConfig, run_suite
from .surfaces import DEGENERATE, frame_data


def _parse_params(values) -> tuple[tuple[float, float], ...]:
    if not values:
        return DEFAULT_PARAMS
    out = []
    for text in values:
        parts = text.split(",")
        if len(parts) != 2:
            raise ConfigInvalid(f"--params wants 'kappa,tau', got {text!r}")
        try:
            out.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ConfigInvalid(f"bad number in --params {text!r}: {exc}") from None
    return tuple(out)


def _parse_tols(values) -> dict:
    out = {}
    for text in values or ():
        if "=" not in text:
            raise ConfigInvalid(f"--tol wants IDENTITY=value, got {text!r}")
        name, value = text.split("=", 1)
        name = name.strip()
        if name not in IDENTITIES:
            raise ConfigInvalid(f"unknown identity {name!r} in --tol; known: {IDENTITY_NAMES}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigInvalid(f"bad tolerance value in --tol {text!r}") from None
        if out[name] <= 0:
            raise ConfigInvalid(f"tolerance must be positive in --tol {text!r}")
    return out


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ConfigInvalid(f"--grid wants NUxNV like 10x10, got {text!r}")
    try:
        nu, nv = int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigInvalid(f"--grid wants integers, got {text!r}") from None
    if nu < 2 or nv < 2:
        raise ConfigInvalid("--grid needs at least 2 points per axis")
    return nu, nv


def _grid_points(chart, nu: int, nv: int):
    (ulo, uhi), (vlo, vhi) = chart.domain
    us = np.linspace(ulo, uhi, nu)
    vs = np.linspace(vlo, vhi, nv)
    return us, vs


def cmd_verify(args) -> int:
    config = SuiteConfig(
        params=_parse_params(args.params),
        surfaces=tuple(args.surfaces) if args.surfaces else None,
        identities=tuple(args.identities.split(",")) if args.identities else None,
        samples=args.samples,
        seed=args.seed,
        tolerances=_parse_tols(args.tol),
    )
    report = run_suite(config)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")

    by_surface: dict[tuple[str, str], list] = {}
    for row in report["results"]:
        by_surface.setdefault((row["params"], row["surface"]), []).append(row)
    for (par, surf), rows in by_surface.items():
        fails = [r for r in rows if r["status"] == "fail"]
        n_skip = sum(1 for r in rows if r["status"] == "skipped")
        evaluated = [r for r in rows if r["max_residual"] is not None]
        if fails:
            print(f"FAIL  {surf} @ ({par})")
            for r in fails:
                print(
                    f"      {r['identity']}: max residual {r['max_residual']:.3e}"
                    f" > tolerance {r['tolerance']:.1e} over {r['samples']} samples"
                )
        else:
            worst = max(
                evaluated, key=lambda r: r["max_residual"] / r["tolerance"], default=None
            )
            note = (
                f"worst {worst['identity']} {worst['max_residual']:.2e}/{worst['tolerance']:.0e}"
                if worst
                else "no applicable identities"
            )
            skip_note = f", {n_skip} skipped" if n_skip else ""
            print(f"pass  {surf} @ ({par}): {len(rows)} identities, {note}{skip_note}")
    for row in report["skipped_surfaces"]:
        print(f"skip  {row['surface']} @ ({row['params']}): {row['reason']}")
    s = report["summary"]
    print(
        f"== {s['n_pass']} pass, {s['n_fail']} fail, {s['n_skipped']} skipped"
        f" ({'OK' if s['pass'] else 'FAILED'})"
    )
    return 0 if s["pass"] else 1


_REPORT_FIELDS = [
    "character",
    "eps",
    "omega_L",
    "angle_L",
    "angle_R",
    "H_R",
    "H_L",
    "K_e^R",
    "K_e^L",
    "K_R",
    "K_L",
    "flags",
]


def _report_row(built, uv, steps) -> dict:
    u, v = uv
    row: dict = {"u": f"{u:.12g}", "v": f"{v:.12g}"}
    point = built.chart.point(u, v)
    names = ("x", "y", "z", "w")[: len(point)]
    for name, value in zip(names, point):
        row[name] = f"{value:.12g}"
    try:
        data = frame_data(built.ambient, built.chart, uv, steps=steps, validate=False)
    except GeometryError as exc:
        row["character"] = DEGENERATE if exc.code == "DEGENERATE_INPUT" else ""
        row["flags"] = exc.code
        return row
    flags = list(data.flags)
    row.update(
        character=data.character,
        eps=f"{data.eps:.0f}",
        omega_L=f"{data.omega_l:.12g}",
        angle_L=f"{data.angle_l:.12g}",
        angle_R=f"{data.angle_r:.12g}",
    )
    try:
        curv = curvature_suite(data)
        row.update(
            H_R=f"{data.h_r:.12g}",
            H_L=f"{data.h_l:.12g}",
            **{
                "K_e^R": f"{curv['ke_R']:.12g}",
                "K_e^L": f"{curv['ke_L']:.12g}",
                "K_R": f"{curv['k_R']:.12g}",
                "K_L": f"{curv['k_L']:.12g}",
            },
        )
    except (SampleSkip, GeometryError) as exc:
        flags.append(getattr(exc, "reason", None) or getattr(exc, "code", "ERROR"))
    row["flags"] = ";".join(sorted(set(flags)))
    return row


def cmd_report(args) -> int:
    params = _parse_params([args.params])[0]
    space = SpaceParams(*params)
    steps = FDSteps.from_env()
    built = build_surface(args.surface, space, steps=steps)
    nu, nv = _parse_grid(args.grid)
    us, vs = _grid_points(built.chart, nu, nv)
    coord_names = ["x", "y", "z"] + (["w"] if built.group_model else [])
    fieldnames = ["u", "v"] + coord_names + _REPORT_FIELDS

    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames, restval="")
        writer.writeheader()
        for u in us:
            for v in vs:
                writer.writerow(_report_row(built, (float(u), float(v)), steps))
    finally:
        if args.csv:
            out.close()
    if args.csv:
        print(f"wrote {nu * nv} rows for {built.address} to {args.csv}")
    return 0


def cmd_mesh(args) -> int:
    params = _parse_params([args.params])[0]
    space = SpaceParams(*params)
    steps = FDSteps.from_env()
    built = build_surface(args.surface, space, steps=steps)
    nu, nv = _parse_grid(args.grid)
    if args.format == "obj" and built.group_model:
        raise UnsupportedFormat(
            "obj output needs 3 coordinates; "
            f"{built.address} lives in the 4-dimensional group model (use --format csv)"
        )
    us, vs = _grid_points(built.chart, nu, nv)
    with open(args.out, "w", newline="") as fh:
        if args.format == "obj":
            fh.write(f"# {built.address} at ({space.label()}), {nu}x{nv} grid\n")
            for u in us:
                for v in vs:
                    x, y, z = built.chart.point(float(u), float(v))
                    fh.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
            for iu in range(nu - 1):
                for iv in range(nv - 1):
                    a = iu * nv + iv + 1
                    b = a + nv
                    fh.write(f"f {a} {b} {b + 1} {a + 1}\n")
        else:
            names = ("x", "y", "z", "w") if built.group_model else ("x", "y", "z")
            writer = csv.writer(fh)
            writer.writerow(["u", "v", *names])
            for u in us:
                for v in vs:
                    point = built.chart.point(float(u), float(v))
                    writer.writerow(
                        [f"{u:.12g}", f"{v:.12g}", *(f"{c:.12g}" for c in point)]
                    )
    print(f"wrote {built.address} mesh ({nu}x{nv}, {args.format}) to {args.out}")
    return 0


def cmd_surfaces(args) -> int:
    if args.params:
        params = _parse_params([args.params])[0]
        for address in default_surfaces(SpaceParams(*params)):
            print(address)
        return 0
    for family, entry in CATALOG.items():
        labels = f" labels: {', '.join(entry.labels)}" if entry.labels else ""
        print(f"{family}: {entry.description} [{entry.validity}]{labels}")
    return 0


def cmd_identities(args) -> int:
    for name in IDENTITY_NAMES:
        print(f"{name}\t{IDENTITIES[name].tolerance:.0e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicausal",
        description=(
            "Numerical checks for surfaces measured simultaneously by the"
            " Riemannian and Lorentzian metrics of the twisted homogeneous spaces."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--params", action="append", metavar="K,T",
                   help="parameter pair kappa,tau (repeatable; default: built-in list)")
    p.add_argument("--surfaces", action="append", metavar="ADDRESS",
                   help="surface address (repeatable; default: catalog defaults per pair)")
    p.add_argument("--identities", metavar="A,B,...",
                   help="comma-separated identity names (default: all)")
    p.add_argument("--samples", type=int, default=8, metavar="N",
                   help="sample points per surface (default 8)")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.add_argument("--tol", action="append", metavar="IDENTITY=X",
                   help="tolerance override (repeatable)")
    p.add_argument("--json", metavar="FILE", help="write the full report as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="tabulate pointwise surface data as CSV")
    p.add_argument("surface", help="surface address, e.g. hopf:circle:r=0.8")
    p.add_argument("--params", required=True, metavar="K,T", help="parameter pair kappa,tau")
    p.add_argument("--grid", default="16x16", metavar="NUxNV", help="grid size (default 16x16)")
    p.add_argument("--csv", metavar="FILE", help="output path (default: stdout)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("mesh", help="export a surface mesh")
    p.add_argument("surface", help="surface address")
    p.add_argument("--params", required=True, metavar="K,T", help="parameter pair kappa,tau")
    p.add_argument("--grid", default="32x32", metavar="NUxNV", help="grid size (default 32x32)")
    p.add_argument("--format", choices=("obj", "csv"), default="obj")
    p.add_argument("--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("surfaces", help="list catalog families or default addresses")
    p.add_argument("--params", metavar="K,T",
                   help="print default addresses for this pair instead of the family list")
    p.set_defaults(func=cmd_surfaces)

    p = sub.add_parser("identities", help="list identity names and tolerances")
    p.set_defaults(func=cmd_identities)
    return parser


def _merge_params_values(argv: list[str]) -> list[str]:
    """Join ``--params -1,1`` into ``--params=-1,1`` so negative kappa parses."""
    out = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token == "--params" and i + 1 < len(argv):
            out.append(f"--params={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_merge_params_values(argv))
    try:
        return args.func(args)
    except (ConfigInvalid, UnsupportedFormat) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
