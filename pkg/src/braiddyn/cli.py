"""Batch command line front-end.

Subcommands: extract (one orbit braid with trace dump), theta (invariant
estimates), calabi, entropy-bound, invariance-check, and selftest (runs
the derived-oracle checks).  Every run is driven by a JSON config and a
mandatory seed; reruns with the same config are byte-identical.  Exit
codes: 0 success, 2 configuration or validation error, 3 degenerate input
(inadmissible configurations or non-stabilising extraction).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import ConfigError, ExperimentConfig, load_config

log = logging.getLogger("braiddyn")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def _setup_logging() -> None:
    level = os.environ.get("BRAIDDYN_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _common_kwargs(cfg: ExperimentConfig) -> dict:
    kwargs = dict(
        N_max=cfg.n_max,
        samples=cfg.samples,
        seed=cfg.seed,
        base_angle=cfg.base_angle,
        workers=cfg.workers,
        resolution=cfg.resolution,
    )
    if cfg.stretch_cap is not None:
        kwargs["stretch_cap"] = cfg.stretch_cap
    return kwargs


def _cmd_extract(cfg: ExperimentConfig, out: str, force: bool) -> int:
    import numpy as np

    from .diskmaps import Configuration
    from .extraction import orbit_braid_with_info
    from .normalform import normal_form
    from .braids import is_pure
    from .report import render_paths_figure

    atoms = []
    for ms in cfg.measures:
        if ms.kind != "dirac":
            log.error("extract needs dirac measures marking the orbit points")
            return EXIT_CONFIG
        atoms.append(ms.point)
    P = Configuration(tuple(atoms))
    word, info = orbit_braid_with_info(
        P, cfg.map, N=cfg.extract_N, resolution=cfg.extract_resolution, base_angle=cfg.base_angle
    )
    os.makedirs(out, exist_ok=True)
    targets = [os.path.join(out, "braid.json")]
    if cfg.extract_trace:
        targets += [os.path.join(out, "trace.csv"), os.path.join(out, "letters.csv"), os.path.join(out, "paths.png")]
    for t in targets:
        if os.path.exists(t) and not force:
            log.error("refusing to overwrite %s (use --force)", t)
            return EXIT_CONFIG
    power, factors = normal_form(word)
    doc = {
        "schema_version": 1,
        "strands": word.strands,
        "letters": list(word.letters),
        "pure": bool(is_pure(word)),
        "normal_form": {"half_twist_power": power, "factors": [list(f) for f in factors]},
        "resolution": info.resolution,
        "axis_angle": info.axis_angle,
        "N": cfg.extract_N,
    }
    with open(targets[0], "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if cfg.extract_trace:
        bundle = info.bundle
        with open(targets[1], "w") as fh:
            fh.write("time,strand,x,y,stage\n")
            for k, t in enumerate(bundle.times):
                for i in range(len(P)):
                    z = bundle.points[k, i]
                    stage = int(bundle.stages[k]) if bundle.stages is not None else 0
                    fh.write(f"{t!r},{i + 1},{z.real!r},{z.imag!r},{stage}\n")
        with open(targets[2], "w") as fh:
            fh.write("time,letter\n")
            for t, g in info.crossing_times:
                fh.write(f"{t!r},{g}\n")
        render_paths_figure(targets[3], np.asarray(bundle.times), bundle.points, info.crossing_times)
    print(f"extracted braid on {word.strands} strands: {list(word.letters)}")
    return EXIT_OK


def _cmd_theta(cfg: ExperimentConfig, out: str, force: bool) -> int:
    from .invariants import theta_estimate, theta_family_sup
    from .report import write_report

    kwargs = _common_kwargs(cfg)
    if cfg.measure_families:
        payload = theta_family_sup(cfg.map, cfg.measure_families, kind=cfg.kind, **kwargs)
        payload["kind"] = cfg.kind
        # figure and csv follow the winning family
        payload["estimate"] = payload["per_family"][payload["argmax_family"]]
    else:
        payload = theta_estimate(cfg.map, cfg.measures, kind=cfg.kind, **kwargs).to_dict()
    write_report(out, payload, f"{cfg.kind} estimate", force=force)
    print(f"{cfg.kind} point estimate: {payload.get('point_estimate', payload.get('family_sup'))}")
    return EXIT_OK


def _cmd_calabi(cfg: ExperimentConfig, out: str, force: bool) -> int:
    from .invariants import calabi_invariant
    from .report import write_report

    if len(cfg.measures) != 2:
        log.error("calabi needs exactly two measures")
        return EXIT_CONFIG
    est = calabi_invariant(
        cfg.map,
        cfg.measures[0],
        cfg.measures[1],
        samples=cfg.calabi_samples,
        N=cfg.calabi_N,
        seed=cfg.seed,
    )
    write_report(out, est.to_dict(), "calabi invariant", force=force)
    print(f"calabi estimate: {est.point_estimate} +- {est.per_N[0]['stderr']}")
    return EXIT_OK


def _cmd_entropy(cfg: ExperimentConfig, out: str, force: bool) -> int:
    from .invariants import entropy_report
    from .report import write_report

    payload = entropy_report(cfg.map, cfg.measures, **_common_kwargs(cfg))
    write_report(out, payload, "entropy lower bound", force=force)
    print(
        f"entropy lower bound: {payload['entropy_lower_bound']:.6f} "
        f"(line stretch {payload['line_stretch']['rate']:.6f})"
    )
    return EXIT_OK


def _cmd_invariance(cfg: ExperimentConfig, out: str, force: bool) -> int:
    from .invariants import invariance_experiment
    from .report import write_report

    if cfg.conjugator is None:
        log.error("invariance-check needs a conjugator map in the config")
        return EXIT_CONFIG
    payload = invariance_experiment(
        cfg.map, cfg.conjugator, cfg.measures, kind=cfg.kind, **_common_kwargs(cfg)
    )
    write_report(out, payload, "conjugation invariance", force=force)
    print(f"difference of rate estimates: {payload['difference_rate']:.6f}")
    return EXIT_OK


def _cmd_selftest() -> int:
    """Run the derived-value oracle checks inline and report per line."""
    import math

    import numpy as np

    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    from .braids import BraidWord, compose, free_cancel, geodesic_length, inverse, linking_matrix
    from .dynnikov import growth_rate
    from .freegroup import FreeWord, apply_braid, loop_stretch
    from .normalform import braid_equal

    B = BraidWord
    check("free action x1.s1^2", apply_braid(FreeWord.basis(2, 1), B(2, (1, 1))).letters == (1, 2, 1, -2, -1))
    check("free action x2.s1^2", apply_braid(FreeWord.basis(2, 2), B(2, (1, 1))).letters == (1, 2, -1))
    check("loop stretch log3", abs(loop_stretch(B(2, (1,))) - math.log(3)) < 1e-12)
    check("loop stretch log5", abs(loop_stretch(B(2, (1, 1))) - math.log(5)) < 1e-12)
    check("braid relation", braid_equal(B(3, (1, 2, 1)), B(3, (2, 1, 2))))
    check("far commutation", braid_equal(B(4, (1, 3)), B(4, (3, 1))))
    rng = np.random.default_rng(0)
    ok = True
    for _ in range(50):
        from .braids import random_word

        w = random_word(rng, int(rng.integers(2, 5)), int(rng.integers(0, 9)))
        ok = ok and braid_equal(free_cancel(compose(w, inverse(w))), B(w.strands, ()))
    check("inverse cancellation x50", ok)
    check("linking of full twist", linking_matrix(B(2, (1, 1)))[0][1] == 1)
    check("geodesic of s1 s2 s1", geodesic_length(B(3, (1, 2, 1))) == 3)
    lam = math.log((3 + math.sqrt(5)) / 2)
    check("pA growth rate", abs(growth_rate(B(3, (1, -2)), 60) - lam) < 1e-3)
    print(f"{'OK' if failures == 0 else 'FAILED'}: {10 - failures}/10 checks passed")
    return EXIT_OK if failures == 0 else 1


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(prog="braiddyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("extract", "theta", "calabi", "entropy-bound", "invariance-check"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--workers", type=int, default=None, help="override the worker count")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    sub.add_parser("selftest")
    args = parser.parse_args(argv)

    if args.command == "selftest":
        return _cmd_selftest()

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers

    from .extraction import DegenerateInput, NonStabilizing, OmegaViolation
    from .report import ReportExists

    handler = {
        "extract": _cmd_extract,
        "theta": _cmd_theta,
        "calabi": _cmd_calabi,
        "entropy-bound": _cmd_entropy,
        "invariance-check": _cmd_invariance,
    }[args.command]
    try:
        return handler(cfg, args.out, args.force)
    except ReportExists as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OmegaViolation, DegenerateInput, NonStabilizing) as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
