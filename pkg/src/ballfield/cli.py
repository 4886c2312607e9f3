"""Command-line front end.

    ballfield spectrum   --model matern_sphere --a 10 --sigma2 1 --nu 0.5 --lmax 10 --r 0.1:1:0.1
    ballfield covariance --model rho_matern --a 10 --sigma2 1 --nu 1 --grid -0.7:0.7:0.05
    ballfield simulate   --model matern_sphere --a 10 --sigma2 1 --nu 0.5 --n 2000 --estimate-spectrum
    ballfield validate   --suite all
    ballfield replay     out/manifest.json --check

Every run writes its tables (CSV, JSON, binary) plus manifest.json into
--out; report commands also draw PNG figures unless --no-plot is given.
Parameters may come from a flat key=value file (--config); flags win.
Exit codes: 0 success, 1 failed checks or replay mismatch, 2 usage error.
"""
import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import io as bio
from . import matern_sphere as ms
from . import rho_field as rf
from . import sampler as sm
from .errors import DomainError
from .specfun import cartesian_to_spherical
from .spin_field import SpinSpectrumBall, spin_spectrum_to_radial_cov

MODELS = ("matern_sphere", "spin_ball", "rho_matern", "custom")
SUITES = ("specfun", "matern", "spin", "rho", "montecarlo", "all")
DEFAULT_POINTS = "-0.5:0.5:0.25"


class UsageError(Exception):
    pass


def _floats(text):
    return [float(v) for v in str(text).split(",")]


def _bool(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# name -> (converter, default); None default means "no value"
PARAMS = {
    "model": (str, None),
    "a": (float, None),
    "sigma2": (float, None),
    "nu": (_floats, None),
    "lmax": (int, 10),
    "r": (str, None),
    "grid": (str, "-0.7:0.7:0.05"),
    "points": (str, None),
    "spectrum_file": (str, None),
    "r0": (float, 1.0),
    "C": (float, 1.0),
    "nmax": (int, None),
    "seed": (int, 0),
    "n": (int, 1),
    "routes": (str, "both"),
    "formats": (str, "csv,bin"),
    "geodesic": (_bool, False),
    "estimate_spectrum": (_bool, False),
    "no_plot": (_bool, False),
    "suite": (str, "all"),
}


def _add_common(p, names):
    flags = {
        "model": dict(choices=MODELS, help="model family"),
        "a": dict(help="Matern inverse length scale a > 0"),
        "sigma2": dict(help="variance sigma^2 > 0"),
        "nu": dict(help="smoothness nu > 0; spectrum accepts a comma list"),
        "lmax": dict(help="largest degree (default 10)"),
        "r": dict(help="radii as start:stop:step or a single value"),
        "grid": dict(help="y1 = y2 axis as start:stop:step (default -0.7:0.7:0.05)"),
        "points": dict(help="points 'x,y,z;x,y,z' or a CSV file with x, y, z columns"),
        "spectrum_file": dict(help="JSON spectrum for spin_ball or custom models"),
        "r0": dict(help="ball radius (default 1)"),
        "C": dict(help="scale of the rho distance (default 1)"),
        "nmax": dict(help="largest Zernike degree n for spin_ball"),
        "seed": dict(help="64-bit seed (default 0)"),
        "n": dict(help="number of realizations (default 1)"),
        "routes": dict(choices=("both", "closed"), help="tabulate the quadrature route too (default both)"),
        "formats": dict(help="realization formats, subset of csv,bin (default both)"),
    }
    for name in names:
        if name in flags:
            p.add_argument("--" + name.replace("_", "-"), dest=name, default=None, **flags[name])
    switches = {
        "geodesic": "use the covariance M(a rho) instead of the R^4 Matern restricted to S^3",
        "estimate_spectrum": "estimate C_l with standard errors from the realizations",
    }
    for name in names:
        if name in switches:
            p.add_argument("--" + name.replace("_", "-"), dest=name, action="store_const",
                           const=True, default=None, help=switches[name])
    p.add_argument("--config", help="flat key=value parameter file; flags override it")
    p.add_argument("--out", default="ballfield_out", help="output directory")
    p.add_argument("--no-plot", dest="no_plot", action="store_const", const=True, default=None,
                   help="skip PNG figures")


def build_parser():
    parser = argparse.ArgumentParser(prog="ballfield", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    base = ["model", "a", "sigma2", "nu", "lmax"]
    _add_common(sub.add_parser("spectrum", help="angular spectra C_l(r) or Chebyshev b_l"),
                base + ["r", "r0", "spectrum_file", "routes"])
    _add_common(sub.add_parser("covariance", help="covariance surfaces in the (y1, y2) plane"),
                base + ["grid", "r0", "C"])
    _add_common(sub.add_parser("simulate", help="Gaussian realizations"),
                base + ["r", "points", "spectrum_file", "r0", "C", "nmax", "seed", "n",
                        "formats", "geodesic", "estimate_spectrum"])
    pv = sub.add_parser("validate", help="run the invariant suites")
    pv.add_argument("--suite", default=None, help="one of " + ", ".join(SUITES))
    pv.add_argument("--config", help="flat key=value parameter file")
    pv.add_argument("--out", default=None, help="also write report.json and a manifest here")
    pv.add_argument("--quiet", action="store_true", help="no per-check progress on stderr")
    pr = sub.add_parser("replay", help="re-run a manifest")
    pr.add_argument("manifest")
    pr.add_argument("--out", default=None, help="output directory (default: the manifest's)")
    pr.add_argument("--check", action="store_true", help="exit 1 unless data outputs are byte-identical")
    return parser


def _resolve(args):
    """Flags over config file over defaults; values converted by PARAMS."""
    cfg = bio.read_config(args.config) if getattr(args, "config", None) else {}
    unknown = sorted(set(cfg) - set(PARAMS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    for name, (conv, default) in PARAMS.items():
        if not hasattr(args, name):
            continue
        value = getattr(args, name)
        if value is None:
            value = cfg.get(name)
        if value is None:
            out[name] = default
            continue
        try:
            out[name] = conv(value)
        except ValueError as exc:
            raise UsageError(f"--{name.replace('_', '-')}: {exc}") from None
    return out


def _require(opts, *names):
    for name in names:
        if opts.get(name) is None:
            raise UsageError(f"missing required flag --{name.replace('_', '-')}")


def _matern(opts, single_nu=True):
    _require(opts, "a", "sigma2", "nu")
    if single_nu and len(opts["nu"]) != 1:
        raise UsageError("--nu takes a single value for this command")
    return [ms.MaternParams(opts["sigma2"], opts["a"], nu) for nu in opts["nu"]]


def _radii(opts):
    _require(opts, "r")
    try:
        radii = bio.parse_range(opts["r"])
    except ValueError as exc:
        raise UsageError(f"--r: {exc}") from None
    if any(r <= 0 for r in radii):
        raise UsageError("--r: radii must be positive")
    return radii


def _argv(command, opts):
    """Resolved options as an argument list that reproduces the run."""
    argv = [command]
    for name, value in opts.items():
        if value is None or name == "suite" and command != "validate":
            continue
        flag = "--" + name.replace("_", "-")
        if PARAMS[name][0] is _bool:
            if value:
                argv.append(flag)
            continue
        if isinstance(value, list):
            value = ",".join(bio.fmt(v) for v in value)
        argv += [flag, bio.fmt(value)]
    return argv


def _relative(a, b):
    return abs(a - b) / abs(b) if b else abs(a - b)


def _spectrum_file(opts):
    _require(opts, "spectrum_file")
    path = Path(opts["spectrum_file"])
    if not path.is_file():
        raise UsageError(f"--spectrum-file: no such file {path}")
    return path.read_text()


# ---------------------------------------------------------------- commands

def cmd_spectrum(opts, out, manifest):
    model, lmax = opts["model"], opts["lmax"]
    ells = range(lmax + 1)
    quad = opts["routes"] == "both"
    if model == "matern_sphere":
        radii = _radii(opts)
        rows, spectra = [], []
        for p in _matern(opts, single_nu=False):
            dens = ms.SpectralDensity3D.matern(p)
            spec = ms.matern_angular_spectrum(p, radii, lmax)
            spectra.append(json.loads(spec.to_json()))
            table = np.empty((len(radii), lmax + 1))
            for i, r in enumerate(radii):
                for ell in ells:
                    c = spec(ell, r)
                    table[i, ell] = c
                    q = ms.angular_spectrum_numeric(ell, r, r, dens) if quad else math.nan
                    rows.append([p.nu, ell, r, c, q, _relative(q, c)])
            if not opts["no_plot"]:
                path = out / f"spectrum_nu{bio.fmt(p.nu)}.png"
                manifest.unhashed.append(_plot().sphere_spectrum(
                    path, radii, list(ells), table, f"C_l(r), a={p.a:g}, sigma2={p.sigma2:g}, nu={p.nu:g}").name)
        manifest.add_output(bio.write_csv(out / "spectrum.csv",
                                          ["nu", "ell", "r", "C_closed", "C_quadrature", "rel_diff"], rows))
        (out / "spectrum.json").write_text(json.dumps({"spectra": spectra}, sort_keys=True) + "\n")
        manifest.add_output(out / "spectrum.json")
    elif model == "rho_matern":
        rows, series, spectra = [], {}, []
        for p in _matern(opts, single_nu=False):
            f4 = (lambda q: lambda lam: rf.matern_density_4d(lam, q))(p)
            b = [rf.b_ell_matern_closed(ell, p) for ell in ells]
            for ell in ells:
                q = rf.b_ell_numeric_bessel(ell, f4) if quad else math.nan
                rows.append([p.nu, ell, b[ell], q, _relative(q, b[ell]), b[ell] / np.pi ** 2])
            series[f"nu={p.nu:g}"] = (list(ells), b)
            spectra.append(json.loads(rf.ChebyshevSpectrum(np.array(b) / np.pi ** 2,
                                                           model_tag=f"rho_matern(nu={p.nu})").to_json()))
        manifest.add_output(bio.write_csv(out / "spectrum.csv",
                                          ["nu", "ell", "b_closed", "b_quadrature", "rel_diff", "b_normalized"],
                                          rows))
        (out / "spectrum.json").write_text(json.dumps({"spectra": spectra}, sort_keys=True) + "\n")
        manifest.add_output(out / "spectrum.json")
        if not opts["no_plot"]:
            p0 = _matern(opts, single_nu=False)[0]
            manifest.unhashed.append(_plot().chebyshev_spectrum(
                out / "spectrum.png", series, f"b_l, a={p0.a:g}, sigma2={p0.sigma2:g}").name)
    elif model == "spin_ball":
        spec = SpinSpectrumBall.from_json(_spectrum_file(opts))
        radii = _radii(opts)
        rows = [[ell, r1, r2, spin_spectrum_to_radial_cov(spec, ell, r1, r2)]
                for ell in range(spec.spin, min(lmax, spec.lmax) + 1) for r1 in radii for r2 in radii]
        manifest.add_output(bio.write_csv(out / "spectrum.csv", ["ell", "r1", "r2", "C"], rows))
    else:
        spec = ms.AngularSpectrum.from_json(_spectrum_file(opts))
        rows = [[ell, r1, r2, c] for r1, r2, ell, c in spec.rows() if ell <= lmax]
        manifest.add_output(bio.write_csv(out / "spectrum.csv", ["ell", "r1", "r2", "C"], rows))


def _plane_grid(opts, r0):
    try:
        axis = bio.parse_range(opts["grid"])
    except ValueError as exc:
        raise UsageError(f"--grid: {exc}") from None
    y1, y2 = np.meshgrid(axis, axis, indexing="ij")
    norm = np.hypot(y1, y2)
    if np.any(norm >= r0):
        i, j = np.unravel_index(np.argmax(norm), norm.shape)
        raise DomainError(f"grid point ({axis[i]}, {axis[j]}, 0) lies outside the open ball of radius {r0}")
    return np.array(axis), y1, y2


def cmd_covariance(opts, out, manifest):
    model = opts["model"]
    (p,) = _matern(opts)
    axis, y1, y2 = _plane_grid(opts, opts["r0"])
    if model == "matern_sphere":
        value = ms.matern_covariance(np.hypot(y1, y2), p)
        rows = zip(y1.ravel(), y2.ravel(), value.ravel())
        manifest.add_output(bio.write_csv(out / "covariance.csv", ["y1", "y2", "value"], rows))
        if not opts["no_plot"]:
            manifest.unhashed.append(_plot().surface(out / "covariance.png", axis, axis, value,
                                                    f"Matern, a={p.a:g}, nu={p.nu:g}", "covariance").name)
    elif model == "rho_matern":
        params = rf.RhoMetricParams(opts["r0"], opts["C"])
        y = np.stack([y1, y2, np.zeros_like(y1)], axis=-1)
        rho = rf.rho_distance(np.zeros_like(y), y, params)
        euclid, ball, diff = rf.plane_difference(y1, y2, p, params)
        rows = zip(y1.ravel(), y2.ravel(), rho.ravel(), euclid.ravel(), ball.ravel(), diff.ravel())
        manifest.add_output(bio.write_csv(out / "covariance.csv",
                                          ["y1", "y2", "rho", "euclidean", "rho_matern", "difference"], rows))
        if not opts["no_plot"]:
            plot = _plot()
            manifest.unhashed.append(plot.surface(out / "covariance.png", axis, axis, ball,
                                                 f"rho-Matern, a={p.a:g}, nu={p.nu:g}", "covariance").name)
            manifest.unhashed.append(plot.surface(out / "difference.png", axis, axis, diff,
                                                 "Euclidean minus rho-Matern", "difference").name)
    else:
        raise UsageError(f"covariance supports matern_sphere and rho_matern, not {model}")


def _ball_points(opts, r0):
    text = opts["points"]
    if text is None:
        axis = bio.parse_range(DEFAULT_POINTS)
        g = np.meshgrid(axis, axis, axis, indexing="ij")
        return np.stack([c.ravel() for c in g], axis=1)
    try:
        pts = bio.parse_points(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"--points: {exc}") from None
    norm = np.linalg.norm(pts, axis=1)
    if np.any(norm >= r0):
        bad = pts[np.argmax(norm >= r0)]
        raise DomainError(f"point ({bad[0]}, {bad[1]}, {bad[2]}) lies outside the open ball of radius {r0}")
    return pts


def cmd_simulate(opts, out, manifest):
    model, lmax, seed, n = opts["model"], opts["lmax"], opts["seed"], opts["n"]
    formats = {f.strip() for f in opts["formats"].split(",") if f.strip()}
    if not formats <= {"csv", "bin"}:
        raise UsageError("--formats: choose from csv, bin")
    if opts["estimate_spectrum"] and model not in ("matern_sphere", "custom"):
        raise UsageError("--estimate-spectrum needs a sphere model (matern_sphere or custom)")
    if model in ("matern_sphere", "custom"):
        if model == "matern_sphere":
            (p,) = _matern(opts)
            radius = bio.parse_range(opts["r"] or "1")
            if len(radius) != 1:
                raise UsageError("--r: simulate takes a single radius")
            radius = radius[0]
            spec = ms.matern_angular_spectrum(p, [radius], lmax)
        else:
            spec = ms.AngularSpectrum.from_json(_spectrum_file(opts))
            radius = float(opts["r"]) if opts["r"] else None
        grid = sm.SphereGrid.for_degree(lmax, radius or 1.0)
        cfg = sm.SimulationConfig.on_sphere(seed, lmax, grid, n)
        real = sm.simulate_sphere_field(spec, cfg, r=radius)
        _, theta, phi = cartesian_to_spherical(real.points)
        uv = (phi, np.pi / 2 - theta, "longitude", "latitude")
    elif model == "rho_matern":
        (p,) = _matern(opts)
        bmap = rf.BallSphereMap(opts["r0"])
        pts = _ball_points(opts, opts["r0"])
        spec = rf.geodesic_matern_spectrum(p, lmax, C=opts["C"]) if opts["geodesic"] else rf.rho_matern_spectrum(p, lmax)
        real = sm.simulate_rho_field(spec, bmap, sm.SimulationConfig(seed, lmax, pts, n))
        uv = (pts[:, 0], pts[:, 1], "x", "y")
    else:
        spec = SpinSpectrumBall.from_json(_spectrum_file(opts))
        pts = _ball_points(opts, spec.r0)
        real = sm.simulate_ball_spin_field(spec, sm.SimulationConfig(seed, lmax, pts, n, opts["nmax"]))
        uv = (pts[:, 0], pts[:, 1], "x", "y")
    if "csv" in formats:
        with (out / "realizations.csv").open("w", newline="") as fh:
            real.to_csv(fh)
        manifest.add_output(out / "realizations.csv")
    if "bin" in formats:
        (out / "realizations.bin").write_bytes(real.to_bytes())
        manifest.add_output(out / "realizations.bin")
    if opts["estimate_spectrum"]:
        est = sm.estimate_angular_spectrum(real, real.lmax)
        theory = np.asarray(spec.get(radius))[:real.lmax + 1]
        z = (est.C - theory) / np.where(est.se > 0, est.se, np.inf)
        rows = zip(est.ells, est.C, est.se, theory, z)
        manifest.add_output(bio.write_csv(out / "spectrum_estimate.csv",
                                          ["ell", "C_hat", "se", "C_input", "z"], rows))
        if not opts["no_plot"]:
            manifest.unhashed.append(_plot().spectrum_estimate(
                out / "spectrum_estimate.png", est.ells, est.C, est.se, theory,
                f"{n} realizations").name)
    if not opts["no_plot"]:
        manifest.unhashed.append(_plot().realization_values(
            out / "realization.png", uv[0], uv[1], real.values, uv[2], uv[3], real.model_tag).name)


def cmd_validate(opts, out, quiet):
    from . import validation

    suite = opts["suite"]
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")

    def progress(res):
        if not quiet:
            print(f"{res.check:50s} {res.status:4s} {res.worst_error:.3e} (tol {res.tolerance:.0e})",
                  file=sys.stderr, flush=True)

    results = validation.run_suite(suite, progress)
    report = [{"check": r.check, "status": r.status, "worst_error": r.worst_error,
               "tolerance": r.tolerance, "seconds": round(r.seconds, 3), "detail": r.detail}
              for r in results]
    text = json.dumps(report, indent=2)
    print(text)
    if out is not None:
        (out / "report.json").write_text(text + "\n")
    return 0 if all(r.status == "pass" for r in results) else 1


def _plot():
    from . import plotting

    return plotting


def _threads():
    raw = os.environ.get("BALLFIELD_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"BALLFIELD_THREADS must be a positive integer, got {raw!r}")
    return n


def _replay(args):
    manifest = bio.RunManifest.read(args.manifest)
    out = Path(args.out) if args.out else Path(args.manifest).parent
    code = main(manifest.argv + ["--out", str(out)])
    if code != 0 or not args.check:
        return code
    mismatched = [name for name, digest in manifest.outputs.items()
                  if not (out / name).is_file() or bio.sha256(out / name) != digest]
    for name in mismatched:
        print(f"replay: {name} differs from the manifest", file=sys.stderr)
    return 1 if mismatched else 0


def run(args):
    if args.command == "replay":
        return _replay(args)
    opts = _resolve(args)
    if args.command == "validate":
        out = bio.ensure_dir(args.out) if args.out else None
        code = cmd_validate(opts, out, args.quiet)
        if out is not None:
            manifest = bio.RunManifest("validate", "custom", {"suite": opts["suite"]},
                                       _argv("validate", {"suite": opts["suite"]}))
            manifest.unhashed.append("report.json")
            manifest.write(out)
        return code
    _require(opts, "model")
    if opts["lmax"] < 0:
        raise UsageError("--lmax must be non-negative")
    if opts.get("n", 1) < 1:
        raise UsageError("--n must be at least 1")
    out = bio.ensure_dir(args.out)
    params = {k: v for k, v in opts.items() if v is not None and k != "suite"}
    manifest = bio.RunManifest(args.command, opts["model"], params, _argv(args.command, params),
                               seed=opts.get("seed"))
    {"spectrum": cmd_spectrum, "covariance": cmd_covariance, "simulate": cmd_simulate}[args.command](
        opts, out, manifest)
    path = manifest.write(out)
    print(f"wrote {', '.join(sorted(manifest.outputs) + manifest.unhashed)} and {path.name} to {out}")
    return 0


def _attach_negative(argv):
    # argparse takes "-0.7:0.7:0.05" for an option; bind such values to their flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok.startswith("--") and "=" not in tok:
            nxt = next(it, None)
            if nxt is not None and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_attach_negative(sys.argv[1:] if argv is None else list(argv)))
    try:
        with threadpool_limits(limits=_threads()):
            return run(args)
    except (UsageError, DomainError) as exc:
        print(f"ballfield: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
