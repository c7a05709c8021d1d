"""Command-line experiment runner.

Every subcommand takes its parameters as ``--key value`` flags or from a
``key=value`` file given with ``--config`` (flags win).  Artifacts are CSV
files written atomically to the output directory, next to a
``manifest.json`` recording the resolved config and library versions.

Output directory: ``--out`` flag, else ``$COCYCLELAB_OUT``, else the config
value, else ``./cocyclelab_out/<subcommand>``.

Exit codes: 0 success, 2 bad input or precondition, 3 a numerical check failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import _jit
from .errors import CocycleLabError, NumericalError, ResourceError, TruncationError
from .io_utils import csv_text, write_atomic

OUT_ENV = "COCYCLELAB_OUT"
EXIT_OK, EXIT_PRECONDITION, EXIT_NUMERICAL = 0, 2, 3


class CheckFailed(Exception):
    """A computed check came out false; maps to exit status 3."""


@dataclass(frozen=True)
class Param:
    type: Callable[[str], Any]
    default: Any
    help: str = ""


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in str(text).split(",") if x.strip())


COMMON = {
    "seed": Param(int, 0, "seed for every random choice"),
    "out": Param(str, None, "output directory"),
}


# -- subcommand bodies ------------------------------------------------------------------------------
# each returns {filename: csv text} and a list of summary lines for stdout

def cmd_fox(cfg):
    from .acceptance import random_integer_element
    from .cocycles import CocycleSpec, evaluate_cocycle, free_group_regular
    from .fox import (build_vanishing_cocycle, fox_elements, residual_table,
                      vanishing_cocycle_single_generator, verify_fox_identity)
    from .freegroup import parse_word

    w = parse_word(cfg["word"], 2)
    pair = fox_elements(w)
    rng = np.random.default_rng(cfg["seed"])
    spec = CocycleSpec(2, (random_integer_element(rng, 2), random_integer_element(rng, 2)), free_group_regular(2))
    ident = verify_fox_identity(pair, spec)
    rows = [("s", str(g), c.real, c.imag) for g, c in pair.f_s.sorted_items()]
    rows += [("t", str(g), c.real, c.imag) for g, c in pair.f_t.sorted_items()]
    arts = {"fox_elements.csv": csv_text(["component", "word", "re", "im"], rows)}
    if w.generators_used() == {1, 2}:
        cocycle = build_vanishing_cocycle(w, cfg["radius"], seed=cfg["seed"])
        arts["residual.csv"] = residual_table([cocycle.meta["search"]])
    else:
        cocycle = vanishing_cocycle_single_generator(w)
        arts["residual.csv"] = csv_text(["radius", "residual", "norm1", "norm2"],
                                        [(0, cocycle.representation.norm(evaluate_cocycle(cocycle, w)),
                                          *(v.norm() for v in cocycle.generator_values))])
    b_s, b_t = cocycle.generator_values
    arts["b_s.csv"] = b_s.to_csv()
    arts["b_t.csv"] = b_t.to_csv()
    bw = cocycle.representation.norm(evaluate_cocycle(cocycle, w))
    if ident != 0.0:
        raise CheckFailed(f"Fox identity residual {ident!r}")
    return arts, [f"fox identity residual {ident!r}", f"||b(w)|| = {bw:.17g}"]


def cmd_nullpair(cfg):
    from .acceptance import null_pair

    if len(cfg["radii"]) < 2:
        raise ValueError("nullpair needs at least two radii to compare")
    res = null_pair(cfg["radii"], seed=cfg["seed"], word=cfg["word"])
    if not res.passed:
        return res.artifacts, [res.detail], CheckFailed("residual did not decrease with the radius: " + res.detail)
    return res.artifacts, [res.detail]


def cmd_amalgam(cfg):
    from .acceptance import amalgam

    res = amalgam(cfg["radius"], cfg["hmax"])
    if not res.passed:
        raise CheckFailed(res.detail)
    return res.artifacts, [res.detail]


def _glued_rows(glued, words):
    from .cocycles import evaluate_cocycle

    group = glued.meta["group"]
    rows = []
    for label, word in words:
        rows.append((label, glued.representation.norm(evaluate_cocycle(glued, word)), str(group.from_word(word))))
    return rows


def cmd_glue(cfg):
    from .cocycles import evaluate_cocycle
    from .fox import build_vanishing_cocycle, glue_amalgam_cocycle, vanishing_cocycle_single_generator
    from .freegroup import generator_names, parse_word

    w = parse_word(cfg["word"], 2)
    base = (build_vanishing_cocycle(w, cfg["radius"], seed=cfg["seed"]) if w.generators_used() == {1, 2}
            else vanishing_cocycle_single_generator(w))
    g_names = generator_names(max(cfg["g_rank"], 3))[: cfg["g_rank"]]
    g = parse_word(cfg["g_word"], cfg["g_rank"], g_names)
    glued = glue_amalgam_cocycle(base, w, g, tolerance=cfg["tolerance"])
    group = glued.meta["group"]
    lift_w, lift_g = group.lift(0, w), group.lift(1, g)
    words = [("w", lift_w), ("g_word", lift_g)]
    names = "st" + g_names
    for j in range(group.rank):
        words.append((f"gen_{names[j]}", parse_word(names[j], group.rank, names)))
    rows = _glued_rows(glued, words)
    same = group.from_word(lift_w) == group.from_word(lift_g)
    if not same:
        raise CheckFailed("w and g_word do not map to the same element")
    agree = glued.representation.norm(evaluate_cocycle(glued, lift_w) - evaluate_cocycle(glued, lift_g))
    arts = {"glued.csv": csv_text(["label", "norm", "normal_form"], rows)}
    return arts, [f"base residual {glued.meta['base_residual']:.17g}", f"||b(w) - b(g_word)|| = {agree:.17g}"]


def cmd_surface(cfg):
    from .cocycles import evaluate_cocycle
    from .fox import build_vanishing_cocycle, glue_amalgam_cocycle, surface_group_data

    data = surface_group_data(cfg["genus"])
    group = data.group()
    rel = group.from_word(data.relator_word())
    if rel != group.from_word(type(data.relator_word()).identity(group.rank)):
        raise CheckFailed("surface relator is not trivial in the amalgam")
    base = build_vanishing_cocycle(data.w, cfg["radius"], seed=cfg["seed"])
    glued = glue_amalgam_cocycle(base, data.w, data.v, tolerance=cfg["tolerance"])
    bw = glued.representation.norm(evaluate_cocycle(glued, group.lift(0, data.w)))
    bv = glued.representation.norm(evaluate_cocycle(glued, group.lift(1, data.v)))
    rows = [("genus", data.genus), ("w", str(data.w)), ("v", str(data.v)),
            ("base_residual", glued.meta["base_residual"]), ("norm_b_w", bw), ("norm_b_v", bv)]
    return {"surface.csv": csv_text(["quantity", "value"], rows)}, [f"||b(w)||={bw:.17g} ||b(v)||={bv:.17g}"]


def cmd_spectral(cfg):
    from . import spectral_z as sz

    ns = list(range(1, cfg["nmax"] + 1))
    kind = cfg["measure"]
    if kind == "atomic":
        mu = sz.random_atomic(np.random.default_rng(cfg["seed"]), cfg["atoms"])
        vals = sz.growth_curve(mu, ns)
        direct = sz.atomic_orbit_norm_sq(mu, cfg["nmax"])
    elif kind == "lebesgue":
        mu = sz.lebesgue()
        vals = sz.growth_curve(mu, ns)
        direct = np.array(ns, dtype=float)
    elif kind == "shift":
        f = {}
        for item in cfg["shift"].split(","):
            k, v = item.split(":")
            f[int(k)] = complex(v)
        mu = sz.measure_from_shift_vector(f)
        vals = sz.growth_curve(mu, ns)
        direct = np.array([sz.shift_orbit_norm_sq(f, n) for n in ns])
    else:
        raise ValueError(f"measure must be atomic, lebesgue or shift, not {kind!r}")
    gap = float(np.max(np.abs(vals - direct) / np.maximum(np.abs(direct), 1e-300)))
    arts = {"curve.csv": sz.curve_csv(ns, vals),
            "curve_vs_direct.csv": csv_text(["n", "c_n", "direct"], zip(ns, vals, direct))}
    return arts, [f"max relative gap spectral vs direct {gap:.3e}"]


def cmd_edelstein(cfg):
    from . import spectral_z as sz
    from .cocycles import classify_growth

    profile = sz.edelstein_profile(cfg["upto"], cfg["nmax"])
    verdict = classify_growth(profile)
    dips = [(n, sz.edelstein_orbit_norm_sq(math.factorial(n), cfg["nmax"]), sz.edelstein_dip_bound(n, cfg["nmax"]))
            for n in range(1, cfg["nmax"] + 1) if math.factorial(n) <= cfg["upto"]]
    return ({"profile.csv": profile.to_csv(), "dips.csv": csv_text(["n", "norm_sq", "bound"], dips)},
            [verdict.line()])


def cmd_cantor(cfg):
    from . import spectral_z as sz
    from .acceptance import cantor

    params = sz.CantorParams.power_law(cfg["N"], cfg["exponent"], cfg["k"], cfg["depth"] or None)
    res = cantor(params)
    if not res.passed:
        raise CheckFailed(res.detail)
    return res.artifacts, [res.detail]


def cmd_flow(cfg):
    from . import continuum_r as cr
    from .acceptance import r_extension

    res = r_extension(cfg["seed"], cfg["instances"], cfg["dim"])
    rng = np.random.default_rng(cfg["seed"])
    u = cr.DiagonalUnitary(rng.uniform(-np.pi, np.pi, cfg["dim"]))
    b = rng.standard_normal(cfg["dim"]) + 1j * rng.standard_normal(cfg["dim"])
    ts = np.linspace(0.0, cfg["tmax"], cfg["tsteps"] + 1)
    arts = dict(res.artifacts)
    arts["flow_profile.csv"] = cr.profile_csv(cr.extend_z_action(u, b, ts))
    if not res.passed:
        raise CheckFailed(res.detail)
    return arts, [res.detail]


def cmd_tree(cfg):
    from .walls_trees import tree_cocycle_growth

    tg = tree_cocycle_growth(cfg["rank"], cfg["radius"], cfg["p"])
    bad = sum(v != len(g) for g, v in zip(tg.elements, tg.pnorm_p))
    rows = [(str(g), len(g), str(v)) for g, v in zip(tg.elements, tg.pnorm_p)]
    if bad:
        raise CheckFailed(f"{bad} elements break the norm law")
    return {"tree.csv": csv_text(["word", "length", "norm_p_p"], rows)}, [f"{len(rows)} elements, norm law exact"]


def _wall_space(spec: str):
    from .walls_trees import WallSpace, cycle_wall_space, hypercube_wall_space

    kind, _, arg = spec.partition(":")
    if kind == "cycle":
        return cycle_wall_space(int(arg or 8))
    if kind == "hypercube":
        return hypercube_wall_space(arg.split(",") if arg else ["1", "1", "1"])
    if kind == "file":
        return WallSpace.load(arg)
    raise ValueError(f"space must be cycle:<m>, hypercube:<w1,w2,..> or file:<path>, not {spec!r}")


def cmd_walls(cfg):
    from itertools import product

    from .walls_trees import check_chasles, check_equivariance, wall_distance, wall_norm

    ws = _wall_space(cfg["space"])
    rows = []
    mismatch = 0
    for x, y in product(ws.points, repeat=2):
        d = wall_distance(ws, x, y)
        norms = [wall_norm(ws, x, y, p) for p in cfg["p"]]
        mismatch += any(n != d for n in norms)
        rows.append((x, y, str(d), *(str(n) for n in norms)))
    chasles, equi = check_chasles(ws), check_equivariance(ws)
    header = ["x", "y", "distance"] + [f"norm_p{p:g}" for p in cfg["p"]]
    if mismatch or not chasles or not equi:
        raise CheckFailed(f"mismatches={mismatch} chasles={chasles} equivariance={equi}")
    return {"walls.csv": csv_text(header, rows)}, [f"{len(rows)} pairs, chasles={chasles}, equivariance={equi}"]


def cmd_gradient(cfg):
    from .acceptance import random_reduced_word
    from .freegroup import enumerate_ball
    from .walls_trees import gradient_cocycle

    rng = np.random.default_rng(cfg["seed"])
    k, gmax = cfg["rank"], cfg["gmax"]
    ball = enumerate_ball(k, cfg["radius"])
    inner = ball.lengths <= cfg["radius"] - max(gmax, 1)
    rows = []
    for i in range(cfg["samples"]):
        f = rng.standard_normal(len(ball)) * inner
        g = random_reduced_word(rng, k, gmax)
        lhs, rhs = gradient_cocycle(k, f, g, cfg["p"], ball)
        rows.append((i, str(g), lhs, rhs))
    return {"gradient.csv": csv_text(["sample", "g", "lhs", "rhs"], rows)}, [f"{len(rows)} samples, lhs <= rhs"]


def cmd_classify(cfg):
    from .cocycles import GrowthProfile, GrowthThresholds, classify_growth

    if not cfg["input"]:
        raise ValueError("classify needs --input <profile.csv>")
    profile = GrowthProfile.from_csv_file(cfg["input"], scale=cfg["scale"])
    t = GrowthThresholds(bound_threshold=cfg["bound"], recurrence_threshold=cfg["recurrence"])
    verdict = classify_growth(profile, t)
    return {"verdict.csv": csv_text(["tag", "key", "value"], [(verdict.tag, k, v) for k, v in verdict.evidence.items()])}, \
        [verdict.line()]


def cmd_repro(cfg):
    from .acceptance import CRITERIA, run_all, run_criterion

    n = cfg["criterion"]
    if n and n not in CRITERIA and n != 11:
        raise ValueError(f"criterion must be 1..11 (0 runs all), not {n}")
    results = [run_criterion(n, cfg["seed"])] if n else run_all(cfg["seed"])
    rows = [(r.number, r.title, "pass" if r.passed else "fail", r.detail) for r in results]
    arts = {"acceptance.csv": csv_text(["criterion", "title", "status", "detail"], rows)}
    for r in results:
        for name, text in r.artifacts.items():
            arts[f"c{r.number:02d}_{name}"] = text
    lines = [r.line() for r in results]
    failed = [r.number for r in results if not r.passed]
    if failed:
        return arts, lines, CheckFailed(f"criteria {failed} failed")
    return arts, lines


COMMANDS: dict[str, tuple[Callable, dict[str, Param], str]] = {
    "fox": (cmd_fox, {"word": Param(str, "stST"), "radius": Param(int, 4)},
            "Fox elements, identity check and vanishing-cocycle build"),
    "nullpair": (cmd_nullpair, {"word": Param(str, "stST"), "radii": Param(_ints, (2, 3, 4, 5))},
                 "null-pair residual against radius"),
    "amalgam": (cmd_amalgam, {"radius": Param(int, 5), "hmax": Param(int, 5)}, "Z*C2 amalgam cocycle checks"),
    "glue": (cmd_glue, {"word": Param(str, "ss"), "g_word": Param(str, "aa"), "g_rank": Param(int, 1),
                        "radius": Param(int, 4), "tolerance": Param(float, 1e-6)},
             "glue a vanishing cocycle over Z"),
    "surface": (cmd_surface, {"genus": Param(int, 2), "radius": Param(int, 3), "tolerance": Param(float, 1.0)},
                "surface-group presentation and glued cocycle"),
    "spectral": (cmd_spectral, {"measure": Param(str, "atomic"), "atoms": Param(int, 8), "nmax": Param(int, 64),
                                "shift": Param(str, "0:1,1:-1")}, "c(n) curves"),
    "edelstein": (cmd_edelstein, {"nmax": Param(int, 12), "upto": Param(int, 720)}, "Edelstein orbit profile"),
    "cantor": (cmd_cantor, {"N": Param(_ints, (16, 16**7)), "exponent": Param(int, 5), "k": Param(_ints, (1, 2)),
                            "depth": Param(int, 0, "0 means all levels")}, "Cantor measure and its inequalities"),
    "flow": (cmd_flow, {"dim": Param(int, 64), "instances": Param(int, 100), "tmax": Param(float, 20.0),
                        "tsteps": Param(int, 200)}, "R-flow extension checks"),
    "tree": (cmd_tree, {"rank": Param(int, 2), "radius": Param(int, 6), "p": Param(float, 2.0)}, "tree cocycle norm law"),
    "walls": (cmd_walls, {"space": Param(str, "cycle:8"), "p": Param(_floats, (1.0, 1.5, 2.0, 4.0))},
              "measured walls cocycle"),
    "gradient": (cmd_gradient, {"rank": Param(int, 2), "radius": Param(int, 7), "gmax": Param(int, 4),
                                "samples": Param(int, 100), "p": Param(float, 2.0)}, "discrete gradient inequality"),
    "classify": (cmd_classify, {"input": Param(str, ""), "scale": Param(float, None), "bound": Param(float, None),
                                "recurrence": Param(float, None)}, "heuristic growth verdict for a label,norm CSV"),
    "repro": (cmd_repro, {"criterion": Param(int, 0, "run only this acceptance check; 0 runs all")},
              "run the acceptance checks"),
}


def read_config(path) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        out[key.strip()] = value.strip()
    return out


def resolve_config(name: str, cli: dict[str, Any], config_path: str | None) -> dict[str, Any]:
    params = {**COMMANDS[name][1], **COMMON}
    raw = read_config(config_path) if config_path else {}
    unknown = sorted(set(raw) - set(params))
    if unknown:
        raise ValueError(f"unknown config keys for {name}: {', '.join(unknown)}")
    cfg = {}
    for key, p in params.items():
        if cli.get(key) is not None:
            cfg[key] = p.type(cli[key])
        elif key in raw:
            cfg[key] = p.type(raw[key]) if raw[key] != "" else p.default
        else:
            cfg[key] = p.default
    if cli.get("out") is None and os.environ.get(OUT_ENV):
        cfg["out"] = os.environ[OUT_ENV]
    if cfg["out"] is None:
        cfg["out"] = str(Path("cocyclelab_out") / name)
    return cfg


def versions() -> dict[str, str]:
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "mpmath", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "absent"
    out["kernel_backend"] = _jit.backend()
    return out


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    return v


def write_outputs(outdir: Path, name: str, cfg: dict, artifacts: dict[str, str], status: str) -> None:
    files = {}
    for fname, text in sorted(artifacts.items()):
        write_atomic(outdir / fname, text)
        files[fname] = hashlib.sha256(text.encode()).hexdigest()
    manifest = {"subcommand": name, "status": status,
                "config": {k: _jsonable(v) for k, v in sorted(cfg.items())},
                "versions": versions(), "files": files}
    write_atomic(outdir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def error_line(kind: str, code: int, message: str) -> str:
    return json.dumps({"error": kind, "exit": code, "message": message}, sort_keys=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cocyclelab", description="Cocycle growth experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, params, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", help="key=value file; flags override it")
        for key, p in {**params, **COMMON}.items():
            default = ",".join(map(str, p.default)) if isinstance(p.default, tuple) else p.default
            sp.add_argument(f"--{key}", dest=key, default=None, help=f"{p.help} (default: {default})".strip())
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    name = args.command
    cli = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = resolve_config(name, cli, args.config)
        result = COMMANDS[name][0](cfg)
        arts, lines = result[0], result[1]
        failure = result[2] if len(result) > 2 else None
        outdir = Path(cfg["out"])
        write_outputs(outdir, name, cfg, arts, "fail" if failure else "ok")
        for line in lines:
            print(line)
        print(f"wrote {len(arts)} artifacts to {outdir}")
        if failure:
            raise failure
        return EXIT_OK
    except (CheckFailed, NumericalError) as exc:
        print(error_line(type(exc).__name__, EXIT_NUMERICAL, str(exc)), file=sys.stderr)
        return EXIT_NUMERICAL
    except (CocycleLabError, ValueError, KeyError, OSError, TruncationError, ResourceError) as exc:
        print(error_line(type(exc).__name__, EXIT_PRECONDITION, str(exc)), file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
