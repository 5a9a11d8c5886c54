"""JSON-config CLI: experiment orchestration and deterministic CSV/manifest output."""

import csv
import json
import os
import sys
import time
import warnings
from importlib import resources

import click
import jsonschema
import numpy as np

from . import (
    __version__,
    asymptotics,
    cartan,
    flags,
    hilbert,
    matgroup,
    patterson,
    presets,
)
from .errors import ConfigInvalid, PslabError

COMMANDS = (
    "kappa", "orbit", "limit-set", "critical-exponent", "ps-measure",
    "quasi-invariance", "shadow-check", "conicality", "count-geodesics",
    "box-dim", "entropy-drop", "concavity", "limit-cone",
)

CSV_SCHEMA_VERSION = 1


def load_schema():
    with resources.files("pslab").joinpath("schema.json").open("rb") as fh:
        return json.load(fh)


def _fmt(x):
    """17 significant digits for floats; everything else verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return x


def validate_config(config):
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ConfigInvalid(path, exc.message) from exc


def build_presentation(config):
    if "preset" in config:
        name = config["preset"]
        if name not in presets.PRESETS:
            raise ConfigInvalid("preset", f"unknown preset {name!r}")
        return presets.PRESETS[name]()
    d = config["dimension"]
    gens = [np.array(g, dtype=float) for g in config["generators"]]
    for i, g in enumerate(gens):
        if g.shape != (d, d):
            raise ConfigInvalid(f"generators.{i}", f"expected a {d}x{d} matrix")
    try:
        return matgroup.GroupPresentation(d, gens, labels=config.get("labels"))
    except PslabError as exc:
        raise ConfigInvalid("generators", str(exc)) from exc


def build_theta(config, P):
    theta = config.get("theta")
    if theta is None:
        theta = cartan.full_theta(P.dimension)
    try:
        return cartan.validate_theta(theta, P.dimension)
    except PslabError as exc:
        raise ConfigInvalid("theta", str(exc)) from exc


def build_phi(spec, d, field="phi"):
    if spec is None:
        spec = {"alpha": 1}
    if not isinstance(spec, dict) and len(spec) > d - 1:
        raise ConfigInvalid(field, f"at most {d - 1} weight coefficients")
    try:
        if isinstance(spec, dict):
            if "alpha" in spec:
                return cartan.Functional.alpha(spec["alpha"], d)
            return cartan.Functional.omega(spec["omega"], d)
        return cartan.Functional(d, {k + 1: c for k, c in enumerate(spec)})
    except PslabError as exc:
        raise ConfigInvalid(field, str(exc)) from exc


def _positive(params, key, default):
    value = params.get(key, default)
    if not isinstance(value, (int, float)) or value <= 0:
        raise ConfigInvalid(f"params.{key}", "must be a positive number")
    return value


def _family(params, P):
    fam = params.get("family", "so" if P.dimension == 2 else "sym2")
    if fam not in hilbert.FAMILIES:
        raise ConfigInvalid("params.family", f"must be one of {hilbert.FAMILIES}")
    return fam


def _word(params, key):
    word = params.get(key)
    if not isinstance(word, list) or not all(
        isinstance(x, int) and x != 0 for x in word
    ):
        raise ConfigInvalid(f"params.{key}", "must be a list of nonzero integers")
    return tuple(word)


def run_kappa(P, theta, phi, params):
    n = int(_positive(params, "n", 4))
    proj = cartan.projection_matrix(P.dimension, theta)
    ball = matgroup.word_ball(P, n)
    ks = matgroup.batch_kappa(ball)
    header = ["word"] + [f"kappa_{i + 1}" for i in range(P.dimension)] + ["phi_kappa_theta"]
    rows = [
        [P.word_label(e.word), *k, phi(proj @ k)] for e, k in zip(ball, ks)
    ]
    return header, rows, {"ball_size": len(ball)}


def run_orbit(P, theta, phi, params):
    n = int(_positive(params, "n", 6))
    fam = hilbert.KleinFamily(P, _family(params, P))
    ball = matgroup.word_ball(P, n)
    pts = fam.orbit_points(ball)
    header = ["word", "x", "y"]
    rows = [[P.word_label(e.word), p[0], p[1]] for e, p in zip(ball, pts)]
    return header, rows, {"ball_size": len(ball)}


def run_limit_set(P, theta, phi, params):
    n = int(_positive(params, "n", 6))
    samples, skipped = flags.sample_limit_set(P, theta, n)
    d = P.dimension
    m = len(samples[0][0].frame[0]) if samples else 0
    header = ["word"] + [f"frame_{i + 1}_{j + 1}" for i in range(d) for j in range(m)]
    rows = [[P.word_label(w), *F.frame.ravel()] for F, w in samples]
    return header, rows, {"sample_size": len(samples), "skipped": skipped}


def run_critical_exponent(P, theta, phi, params):
    n_max = int(_positive(params, "n_max", 10))
    method = params.get("method", "both")
    ests = patterson.critical_exponent(P, phi, n_max, theta, method=method)
    if not isinstance(ests, tuple):
        ests = (ests,)
    header = ["method", "delta_hat", "window_lo", "window_hi", "residual", "samples"]
    rows = [
        [e.method, e.delta_hat, e.window[0], e.window[1], e.residual, e.sample_count]
        for e in ests
    ]
    return header, rows, {"delta_hat": ests[0].delta_hat}


def _measure(P, theta, phi, params):
    n = int(_positive(params, "n", 8))
    est = patterson.critical_exponent(P, phi, max(n, 4), theta)
    if "s" in params:
        s = _positive(params, "s", None)
    else:
        s = est.delta_hat * _positive(params, "s_factor", 1.05)
    mu = patterson.patterson_measure(
        P, phi, s, n, theta, delta_hat=est.delta_hat
    )
    return mu, est


def run_ps_measure(P, theta, phi, params):
    mu, est = _measure(P, theta, phi, params)
    header = ["word", "weight"]
    rows = [[P.word_label(word), w] for _, w, word in mu.atoms]
    depth = max(len(word) for _, _, word in mu.atoms)
    inner = sum(w for _, w, word in mu.atoms if len(word) <= depth // 2)
    return header, rows, {
        "s": mu.s, "delta_hat": est.delta_hat, "excluded": mu.excluded,
        "inner_half_mass": inner,
    }


def run_quasi_invariance(P, theta, phi, params):
    alpha = _word(params, "alpha")
    n = int(_positive(params, "n", 8))
    est = patterson.critical_exponent(P, phi, max(n, 4), theta)
    s = params.get("s", est.delta_hat * 1.05)
    stats = patterson.quasi_invariance_residual(P, phi, alpha, s, n, theta)
    header = ["sphere", "min", "median", "max", "count"]
    rows = [[st["sphere"], st["min"], st["median"], st["max"], st["count"]] for st in stats]
    return header, rows, {"s": s, "alpha": P.word_label(alpha)}


def run_shadow_check(P, theta, phi, params):
    fam = _family(params, P)
    n = int(_positive(params, "n", 8))
    mu_n = int(_positive(params, "mu_n", 12))
    est = patterson.critical_exponent(P, phi, mu_n, theta)
    s = est.delta_hat * _positive(params, "s_factor", 1.01)
    mu = patterson.patterson_measure(P, phi, s, mu_n, theta, delta_hat=est.delta_hat)
    if params.get("outer_sphere", True):
        mu = patterson.outer_sphere_restriction(mu)
    r0, eps0 = hilbert.shadow_constants(P, mu, min(n, 3), fam)
    r = params.get("r", 2.0 * r0)
    if r <= 0:
        raise ConfigInvalid("params.r", "must be a positive number")
    report = hilbert.shadow_measure_check(P, mu, phi, est.delta_hat, r, n, fam, theta)
    header = ["sphere", "count", "rho_min", "rho_max", "spread"]
    rows = [
        [row.sphere, row.count, row.rho_min, row.rho_max, row.spread]
        for row in report.rows
    ]
    return header, rows, {
        "delta_hat": est.delta_hat, "s": s, "r_0": r0, "eps_0": eps0, "r": r,
        "spread": report.spread,
        "bound": float(np.exp(2 * r * est.delta_hat) / eps0),
    }


def run_conicality(P, theta, phi, params):
    fam = _family(params, P)
    r = _positive(params, "r", 2.0)
    n = int(_positive(params, "n", 10))
    if "z" in params:
        z = params["z"]
        if not isinstance(z, list) or len(z) != 2:
            raise ConfigInvalid("params.z", "must be a 2-vector on the boundary circle")
    else:
        word = _word(params, "fixed_point_of")
        family = hilbert.KleinFamily(P, fam)
        F = flags.attracting_fixed_flag(P.word_matrix(word), (1, P.dimension - 1)
                                        if P.dimension > 2 else (1,))
        z = family.boundary_point(F)
    counts = hilbert.conicality_score(P, np.asarray(z, dtype=float), r, n, fam)
    header = ["sphere", "count"]
    rows = [[i + 1, c] for i, c in enumerate(counts)]
    return header, rows, {"r": r, "tail_count": counts[-1]}


def run_count_geodesics(P, theta, phi, params):
    t_max = _positive(params, "t_max", 25.0)
    n_max = int(_positive(params, "n_max", 10))
    table = asymptotics.count_closed_geodesics(
        P, phi, t_max, n_max=n_max, theta=theta,
        primitive_only=bool(params.get("primitive_only", False)),
        unoriented=bool(params.get("unoriented", False)),
    )
    header = ["T", "count", "prediction", "ratio", "certified"]
    rows = [
        [row.T, row.count, row.prediction, row.ratio, row.certified]
        for row in table.rows
    ]
    return header, rows, {
        "delta_hat": table.delta_hat,
        "t_certified": table.t_certified,
        "log_slope": asymptotics.count_log_slope(table),
    }


def run_box_dim(P, theta, phi, params):
    n_max = int(_positive(params, "n_max", 8))
    report = asymptotics.hausdorff_vs_exponent_experiment(
        P, n_max, theta=theta, scale_grid=params.get("scales"),
    )
    header = ["scale", "cover_count"]
    rows = [[s, int(c)] for s, c in zip(report["scales"], report["counts"])]
    summary = {k: v for k, v in report.items() if k not in ("scales", "counts")}
    return header, rows, summary


def run_entropy_drop(P, theta, phi, params):
    words = params.get("subgroup")
    if not isinstance(words, list) or not words:
        raise ConfigInvalid("params.subgroup", "must be a nonempty list of words")
    n_max = int(_positive(params, "n_max", 9))
    report = patterson.entropy_drop_experiment(P, words, phi, n_max, theta)
    header = ["delta_ambient", "delta_subgroup", "gap", "limit_set_separation"]
    rows = [[
        report["delta_ambient"].delta_hat,
        report["delta_subgroup"].delta_hat,
        report["gap"],
        report["limit_set_separation"],
    ]]
    return header, rows, {"gap": report["gap"]}


def run_concavity(P, theta, phi, params):
    phi2 = build_phi(params.get("phi2"), P.dimension, field="params.phi2")
    lambdas = params.get("lambdas", [round(0.1 * i, 1) for i in range(1, 10)])
    n_max = int(_positive(params, "n_max", 9))
    report = patterson.concavity_experiment(P, phi, phi2, lambdas, n_max, theta)
    header = ["lambda", "delta_hat", "residual"]
    rows = [[row["lambda"], row["delta_hat"], row["residual"]] for row in report["rows"]]
    return header, rows, {
        "delta_phi1": report["delta_phi1"], "delta_phi2": report["delta_phi2"],
        "max_delta": max(row["delta_hat"] for row in report["rows"]),
    }


def run_limit_cone(P, theta, phi, params):
    n = int(_positive(params, "n", 8))
    dirs = matgroup.limit_cone_sample(P, theta, n)
    header = [f"dir_{i + 1}" for i in range(dirs.shape[1])]
    rows = [list(v) for v in dirs]
    return header, rows, {"sample_size": len(rows)}


HANDLERS = {
    "kappa": run_kappa,
    "orbit": run_orbit,
    "limit-set": run_limit_set,
    "critical-exponent": run_critical_exponent,
    "ps-measure": run_ps_measure,
    "quasi-invariance": run_quasi_invariance,
    "shadow-check": run_shadow_check,
    "conicality": run_conicality,
    "count-geodesics": run_count_geodesics,
    "box-dim": run_box_dim,
    "entropy-drop": run_entropy_drop,
    "concavity": run_concavity,
    "limit-cone": run_limit_cone,
}


def execute(command, config, out_dir, workers=None):
    """Run one subcommand; returns the manifest dict after writing artifacts."""
    validate_config(config)
    if "command" in config and config["command"] != command:
        raise ConfigInvalid("command", f"config names {config['command']!r}, "
                                       f"invoked as {command!r}")
    P = build_presentation(config)
    theta = build_theta(config, P)
    phi = build_phi(config.get("phi"), P.dimension)
    params = config.get("params", {})
    workers = workers or config.get("workers") or int(os.environ.get("PSLAB_WORKERS", "1"))

    start = time.time()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        header, rows, results = HANDLERS[command](P, theta, phi, params)
    wall = time.time() - start

    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{command}.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])

    manifest = {
        "command": command,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "config": config,
        "workers": workers,
        "results": {k: _fmt(v) if isinstance(v, float) else v
                    for k, v in results.items()},
        "versions": {
            "pslab": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "wall_time_s": round(wall, 3),
        "warnings": sorted({str(w.message) for w in caught}),
        "artifacts": [os.path.basename(csv_path)],
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


@click.group()
def main():
    """pslab experiment runner: JSON config in, CSV + manifest out."""


def _make_command(name):
    @click.option("--config", "config_path", required=True,
                  type=click.Path(exists=True, dir_okay=False))
    @click.option("--out", "out_dir", default=".", type=click.Path(file_okay=False))
    @click.option("--workers", default=None, type=int)
    def _cmd(config_path, out_dir, workers):
        try:
            with open(config_path, encoding="utf-8") as fh:
                config = json.load(fh)
        except json.JSONDecodeError as exc:
            click.echo(json.dumps({"error": "ConfigInvalid", "path": "(root)",
                                   "message": str(exc)}), err=True)
            raise SystemExit(2)
        try:
            manifest = execute(name, config, out_dir, workers)
        except ConfigInvalid as exc:
            click.echo(json.dumps({"error": "ConfigInvalid", "path": exc.path,
                                   "message": exc.reason}), err=True)
            raise SystemExit(2)
        except PslabError as exc:
            click.echo(json.dumps({"error": type(exc).__name__,
                                   "message": str(exc)}), err=True)
            raise SystemExit(3)
        summary = {k: v for k, v in manifest["results"].items()
                   if not isinstance(v, (list, dict))}
        click.echo(json.dumps({"command": name, "results": summary}))

    _cmd.__name__ = name.replace("-", "_")
    return main.command(name=name)(_cmd)


for _name in COMMANDS:
    _make_command(_name)


if __name__ == "__main__":
    main()
