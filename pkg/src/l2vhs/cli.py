"""Command dispatch and report emission.

    l2vhs --input doc.json --command analyze [--format machine]

Exit codes: 0 success, 1 input error, 2 internal invariant failure,
3 model divergence when --strict is set.
"""
from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from .cohomology import (
    SkyscraperDatum,
    character_family,
    compare_models,
    global_h,
    parabolic_h1,
    riemann_hurwitz_check,
    skyscraper_summand,
)
from .config import Config
from .disk.estimates import frame_growth_fit, il_constant, unit_disk_il_constant, wirtinger_constant
from .disk.probe import local_vanishing_probe
from .disk.radial import DEFAULT_QUADRATURE
from .errors import CoveringError, InputError, InvariantFailure, L2Error
from .gamma import torsion_report
from .groups import AbelianRank
from .io import InputDocument, Report, parse_input
from .surface import validate_covering
from .weights import (
    LocalType,
    growth_exponents,
    lattice_dims,
    local_h0,
    local_type,
)

COMMANDS = ("analyze", "cover", "riemann-hurwitz", "weights", "lattices", "diskmode", "family", "selftest")

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_DIVERGENCE = 0, 1, 2, 3


def _need_system(doc: InputDocument, command: str):
    if doc.system is None:
        raise InputError(f"command '{command}' needs a local_system block")
    return doc.system


def _need_cover(doc: InputDocument, command: str):
    if doc.cover is None:
        raise InputError(f"command '{command}' needs a cover block")
    return doc.cover


def _cohomology_record(rep) -> dict:
    return {"h0": rep.h0, "h1": rep.h1, "h2": rep.h2, "chi": rep.chi,
            "normalization": rep.normalization, "model": rep.model}


def _local_types(doc: InputDocument, command: str) -> dict:
    system = _need_system(doc, command)
    cfg = doc.config
    names = system.surface.punctures
    return {name: local_type(t, cap=cfg.order_cap, cluster_tol=cfg.cluster_tol)
            for name, t in zip(names, system.meridians)}


def _local_type_record(t: LocalType) -> list:
    return [{"alpha": a, "blocks": list(b)} for a, b in t.parts]


# ---------------------------------------------------------------- commands

def _analyze(doc: InputDocument) -> tuple:
    system = _need_system(doc, "analyze")
    rep = global_h(system)
    results = {"global": _cohomology_record(rep)}
    verdicts = {}
    if system.surface.s:
        par = parabolic_h1(system)
        results["parabolic_h1"] = par
        verdicts["parabolic_matches_h1"] = par == rep.h1
    if doc.skyscraper is not None:
        results["skyscraper"] = _cohomology_record(skyscraper_summand(SkyscraperDatum(doc.skyscraper)))
    return results, verdicts, False


def _cover(doc: InputDocument) -> tuple:
    system = _need_system(doc, "cover")
    cover = _need_cover(doc, "cover")
    if not cover.finite:
        raise InputError("command 'cover' needs a finite group")
    inv = validate_covering(cover)
    cmp_ = compare_models(system, cover)
    results = {
        "group_order": cover.group.order,
        "cover_euler": inv.euler_tilde,
        "n_p": list(inv.n_p),
        "extension_of_pullback": _cohomology_record(cmp_.extension_of_pullback),
        "pullback_of_extension": _cohomology_record(cmp_.pullback_of_extension),
        "quotient_dims": list(cmp_.quotient_dims),
    }
    return results, {"models_diverge": cmp_.diverge}, cmp_.diverge


def _riemann_hurwitz(doc: InputDocument) -> tuple:
    system = _need_system(doc, "riemann-hurwitz")
    cover = _need_cover(doc, "riemann-hurwitz")
    rh = riemann_hurwitz_check(system, cover)
    if not rh.equal:
        raise InvariantFailure(f"Riemann-Hurwitz identity fails: lhs {rh.lhs} != rhs {rh.rhs}")
    results = {"lhs": rh.lhs, "rhs": rh.rhs, "chi_cover": rh.chi_cover, "chi_base": rh.chi_base,
               "n_p": list(rh.n_p)}
    return results, {"identity_holds": rh.equal}, False


def _weights(doc: InputDocument) -> tuple:
    results = {}
    for name, t in _local_types(doc, "weights").items():
        graded = {}
        for a, blocks in t.parts:
            dims = {}
            for m in blocks:
                for k in range(m - 1, -m, -2):
                    dims[k] = dims.get(k, 0) + 1
            graded[str(a)] = {str(k): dims[k] for k in sorted(dims, reverse=True)}
        results[name] = {
            "local_type": _local_type_record(t),
            "graded_dims": graded,
            "growth_exponents": [{"beta": g.beta, "k": g.k, "multiplicity": g.multiplicity}
                                 for g in growth_exponents(t)],
            "local_h0": local_h0(t),
        }
    return results, {}, False


def _lattices(doc: InputDocument) -> tuple:
    results = {}
    for name, t in _local_types(doc, "lattices").items():
        dims = lattice_dims(t)
        results[name] = {"n": dims.n, "d0": dims.d0, "d1": dims.d1}
    return results, {}, False


def _parse_local_type(spec, path: str) -> LocalType:
    if not isinstance(spec, dict) or not spec:
        raise InputError(f"{path}: local type must map rotation numbers to block lists")
    parts = []
    for key, blocks in spec.items():
        try:
            alpha = Fraction(key)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{path}.{key}: bad rotation number") from exc
        if not isinstance(blocks, list) or not all(isinstance(b, int) and b > 0 for b in blocks):
            raise InputError(f"{path}.{key}: blocks must be positive integers")
        parts.append((alpha, tuple(blocks)))
    return LocalType(tuple(parts))


def _real(value, path: str):
    if isinstance(value, bool) or value is None:
        raise InputError(f"{path}: expected a number")
    if isinstance(value, (int, float)):
        return value
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: expected a rational number") from exc


def _experiment(exp: dict, index: int, cfg: Config) -> dict:
    path = f"$.experiments[{index}]"
    kind = exp["kind"]
    if kind == "probe":
        t = _parse_local_type(exp.get("local_type"), path + ".local_type")
        trials = int(exp.get("trials", 50))
        rep = local_vanishing_probe(t, trials, int(exp.get("seed", cfg.seed)), R=float(exp.get("R", 0.5)),
                                    n_max=int(exp.get("n_max", cfg.n_max)), tol=cfg.tol)
        return {"kind": kind, "local_type": _local_type_record(t), "trials": trials, "R": rep.R,
                "n_max": rep.n_max, "quadrature_rtol": DEFAULT_QUADRATURE.rel_tol,
                "degree1_max_residual": rep.degree1_max_residual,
                "degree2_max_residual": rep.degree2_max_residual, "max_ratio": rep.max_ratio,
                "channels_used": list(rep.channels_used), "tolerance": rep.tolerance, "success": rep.success}
    if kind == "il_constant":
        if "diameter" in exp:
            diameter = _real(exp["diameter"], path + ".diameter")
            dist = _real(exp.get("dist_integral"), path + ".dist_integral")
            value = il_constant(diameter, dist, bool(exp.get("pi_units", False)))
        else:
            value = unit_disk_il_constant()
        return {"kind": kind, "constant": value}
    if kind == "wirtinger":
        est = wirtinger_constant(int(exp.get("max_mode", 4)), int(exp.get("degree", 6)),
                                 int(exp.get("trials", 200)), int(exp.get("seed", cfg.seed)))
        return {"kind": kind, "constant": est.constant, "sampled_max": est.sampled_max,
                "trial_space_dim": est.trial_space_dim, "max_mode": est.max_mode, "degree": est.degree,
                "certified": False}
    if kind == "growth_fit":
        t = _parse_local_type(exp.get("local_type"), path + ".local_type")
        index = int(exp.get("index", 0))
        if not 0 <= index < t.n:
            raise InputError(f"{path}.index: out of range for rank {t.n}")
        fit = frame_growth_fit(t, index, float(exp.get("r_min", 1e-8)), float(exp.get("r_max", 1e-2)),
                               int(exp.get("count", 64)), int(exp.get("seed", cfg.seed)))
        return {"kind": kind, "index": index, "two_beta": fit.two_beta, "k": fit.k,
                "intercept": fit.intercept, "rms_residual": fit.rms_residual, "samples": fit.samples}
    raise InputError(f"{path}.kind: unknown experiment kind {kind!r}")


def _diskmode(doc: InputDocument) -> tuple:
    cfg = doc.config
    experiments = list(doc.experiments)
    if not experiments:
        if doc.system is not None:
            for name, t in _local_types(doc, "diskmode").items():
                experiments.append({"kind": "probe", "puncture": name,
                                    "local_type": {str(a): list(b) for a, b in t.parts}})
        experiments += [{"kind": "il_constant"}, {"kind": "wirtinger"}]
    records = []
    for i, exp in enumerate(experiments):
        rec = _experiment(exp, i, cfg)
        if "puncture" in exp:
            rec["puncture"] = exp["puncture"]
        records.append(rec)
    probes = [r for r in records if r["kind"] == "probe"]
    verdicts = {"all_probes_solved": all(r["success"] for r in probes)} if probes else {}
    return {"experiments": records}, verdicts, False


def _family(doc: InputDocument) -> tuple:
    system = _need_system(doc, "family")
    cover = _need_cover(doc, "family")
    if not isinstance(cover.group, AbelianRank):
        raise CoveringError("command 'family' needs a free abelian cover")
    fam = character_family(system, cover, doc.config.samples, doc.config.seed)
    tor = torsion_report(fam)
    results = {
        "rank": fam.d,
        "generic": list(fam.generic),
        "von_neumann": list(fam.von_neumann),
        "samples": [{"angles": list(s.angles), "dims": list(s.dims)} for s in fam.samples],
        "torsion_locus": [list(a) for a in tor.locus],
        "jump_dims": [list(d) for d in tor.jump_dims],
    }
    return results, {"torsion_present": tor.torsion_present}, False


def _selftest(doc) -> tuple:
    from .acceptance import run_all

    verdicts = run_all()
    results = {f"criterion_{v.number}": {"title": v.title, "passed": v.passed, "detail": v.detail}
               for v in verdicts}
    failed = [v.number for v in verdicts if not v.passed]
    if failed:
        raise InvariantFailure(f"acceptance criteria failed: {failed}")
    return results, {"all_passed": True}, False


HANDLERS = {
    "analyze": _analyze,
    "cover": _cover,
    "riemann-hurwitz": _riemann_hurwitz,
    "weights": _weights,
    "lattices": _lattices,
    "diskmode": _diskmode,
    "family": _family,
    "selftest": _selftest,
}


def run(doc, command: str) -> tuple:
    """Report for ``command`` on ``doc`` and whether the model-divergence flag fired."""
    if command not in HANDLERS:
        raise InputError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    start = time.perf_counter()
    results, verdicts, diverged = HANDLERS[command](doc)
    config = doc.config if doc is not None else Config()
    report = Report(command, config, results, verdicts, time.perf_counter() - start)
    return report, diverged


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="l2vhs", description="L2 cohomology of local systems on punctured surfaces")
    p.add_argument("--input", help="JSON input document (not needed for selftest)")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--backend", choices=("exact", "float"))
    p.add_argument("--tolerance", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--strict", action="store_true", help="exit 3 when the stalk models diverge")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    return p


def _load(args) -> InputDocument:
    import json

    with open(args.input, encoding="utf-8") as fh:
        text = fh.read()
    overrides = {}
    if args.backend is not None:
        overrides["backend"] = args.backend
    if args.tolerance is not None:
        overrides["tolerance"] = args.tolerance
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["samples"] = args.samples
    if overrides:
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            return parse_input(text)  # reports the positioned syntax error
        if isinstance(data, dict):
            cfg = dict(data.get("config") or {})
            cfg.update(overrides)
            data["config"] = cfg
            text = json.dumps(data)
    return parse_input(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input is None:
            if args.command != "selftest":
                raise InputError(f"command '{args.command}' needs --input")
            doc = None
        else:
            doc = _load(args)
        report, diverged = run(doc, args.command)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except L2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = report.render_machine(args.timing) if args.format == "machine" else report.render_text(args.timing)
    print(out)
    if args.strict and diverged:
        return EXIT_DIVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
