"""Command-line frontend wiring configuration files to every module.

Design contract:
  * JSON for structured reports, CSV for scans.
  * Numbers are serialized as shortest round-trip decimals (repr); the
    values inf/-inf/nan, which strict JSON cannot carry, become the
    strings "inf"/"-inf"/"nan".
  * Log-space values carry an explicit log_ prefix in keys and columns.
  * Identical config + seed => byte-identical output.
  * Exit 0 on success; 2 on a verdict failure (an inequality violated,
    a series divergent, an invalid configuration); 1 on usage or I/O
    errors (including strict-schema rejections).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .basis import BasisElement, RationalCombination, standard_basis, tail_element
from .construction import (
    Construction,
    ConstructionParams,
    generate,
    majorant,
    ring,
    sandwich_scan,
    spacing_constant,
    verify_conditions,
)
from .distance import Path, completeness_probe, distance_upper, metric
from .domain import (
    CircularDomain,
    contains,
    domain_from_dict,
    domain_to_dict,
    validate_configuration,
)
from .hilbert import KernelEvaluator, gram_matrix
from .laurent import annulus_tail_norm_sq, inequality_suite, split

__all__ = ["main"]


class UsageError(Exception):
    """Bad flags or malformed configuration: exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# ---------------------------------------------------------------------------
# deterministic serialization helpers
# ---------------------------------------------------------------------------


def _num(x: float) -> Any:
    """A float made strict-JSON-safe; non-finite values become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def _fmt(x: float) -> str:
    """Shortest round-trip decimal for CSV cells."""
    x = float(x)
    if math.isfinite(x):
        return repr(x)
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def _json_text(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv_text(header: str, rows: List[List[str]]) -> str:
    lines = [header]
    lines.extend(",".join(cells) for cells in rows)
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# strict configuration parsing
# ---------------------------------------------------------------------------


def _reject_unknown(obj: Dict[str, Any], allowed: Sequence[str], where: str) -> None:
    unknown = set(obj) - set(allowed)
    if unknown:
        raise UsageError(f"unknown keys in {where}: {sorted(unknown)}")


def _load_config(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config document must be a JSON object")
    return data


def _complex_in(obj: Any, where: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) for v in obj)
    ):
        raise UsageError(f"{where} must be a [re, im] pair")
    return complex(float(obj[0]), float(obj[1]))


_PARAM_KEYS = (
    "n0",
    "n_max",
    "ring_exponent",
    "x_exponent",
    "r_exponent",
    "s_rate",
    "t_coefficient",
    "tame_overrides",
)


def _params_from_dict(obj: Dict[str, Any], where: str = "params") -> ConstructionParams:
    if not isinstance(obj, dict):
        raise UsageError(f"{where} must be a JSON object")
    _reject_unknown(obj, _PARAM_KEYS, where)
    if "n_max" not in obj:
        raise UsageError(f"{where}: missing required key 'n_max'")
    kwargs: Dict[str, Any] = {"n_max": int(obj["n_max"])}
    for key in ("n0", "ring_exponent", "x_exponent", "r_exponent"):
        if key in obj:
            kwargs[key] = int(obj[key])
    for key in ("s_rate", "t_coefficient"):
        if key in obj:
            kwargs[key] = float(obj[key])
    overrides_raw = obj.get("tame_overrides")
    if overrides_raw is not None:
        if not isinstance(overrides_raw, dict):
            raise UsageError(f"{where}.tame_overrides must be an object")
        overrides: Dict[int, Dict[str, float]] = {}
        for ns, entry in overrides_raw.items():
            if not isinstance(entry, dict):
                raise UsageError(f"{where}.tame_overrides[{ns}] must be an object")
            _reject_unknown(
                entry, ("log_r", "log_s", "log_t"), f"{where}.tame_overrides[{ns}]"
            )
            overrides[int(ns)] = {k: float(v) for k, v in entry.items()}
        kwargs["tame_overrides"] = overrides
    try:
        return ConstructionParams(**kwargs)
    except ValueError as exc:
        raise UsageError(f"{where}: {exc}") from exc


def _params_to_dict(p: ConstructionParams) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "n0": p.n0,
        "n_max": p.n_max,
        "ring_exponent": p.ring_exponent,
        "x_exponent": p.x_exponent,
        "r_exponent": p.r_exponent,
        "s_rate": _num(p.s_rate),
        "t_coefficient": _num(p.t_coefficient),
    }
    if p.tame_overrides:
        out["tame_overrides"] = {
            str(n): {k: _num(v) for k, v in sorted(entry.items())}
            for n, entry in sorted(p.tame_overrides.items())
        }
    return out


def _parse_rings(text: str) -> Tuple[int, int]:
    parts = text.split("..")
    if len(parts) != 2:
        raise UsageError("--rings expects the form A..B")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise UsageError("--rings expects integer endpoints") from exc
    if lo > hi:
        raise UsageError("--rings requires A <= B")
    return lo, hi


def _resolve_params(args: argparse.Namespace, cfg: Optional[Dict[str, Any]]) -> ConstructionParams:
    """Construction parameters from config and/or flags, flags winning."""
    base: Optional[Dict[str, Any]] = None
    if cfg is not None and "params" in cfg:
        raw = cfg["params"]
        if not isinstance(raw, dict):
            raise UsageError("'params' must be a JSON object")
        base = dict(raw)
    if args.exact_params:
        if base is not None:
            raise UsageError("--exact-params conflicts with a config 'params' section")
        base = {}
    if base is None:
        raise UsageError("no construction parameters: pass --config or --exact-params")
    if args.rings is not None:
        lo, hi = _parse_rings(args.rings)
        base["n0"], base["n_max"] = lo, hi
    if args.n_max is not None:
        base["n_max"] = args.n_max
    return _params_from_dict(base)


def _resolve_domain(args: argparse.Namespace, cfg: Dict[str, Any]) -> CircularDomain:
    """A domain from 'domain' (inline document) or 'params' (generated)."""
    if "domain" in cfg and "params" in cfg:
        raise UsageError("config must carry either 'domain' or 'params', not both")
    if "domain" in cfg:
        try:
            return domain_from_dict(cfg["domain"])
        except ValueError as exc:
            raise UsageError(f"bad domain document: {exc}") from exc
    if "params" in cfg or args.exact_params:
        return generate(_resolve_params(args, cfg)).domain
    raise UsageError("config needs a 'domain' or 'params' section")


_TERM_PLAIN = ("center", "power", "coeff")
_TERM_TAIL = ("hole", "order", "coeff")


def _function_from_config(
    obj: Any, d: CircularDomain, where: str = "function"
) -> RationalCombination:
    if not isinstance(obj, dict):
        raise UsageError(f"{where} must be a JSON object")
    _reject_unknown(obj, ("terms",), where)
    terms_raw = obj.get("terms")
    if not isinstance(terms_raw, list) or not terms_raw:
        raise UsageError(f"{where}.terms must be a nonempty list")
    elements: List[BasisElement] = []
    coeffs: List[complex] = []
    for i, term in enumerate(terms_raw):
        tw = f"{where}.terms[{i}]"
        if not isinstance(term, dict):
            raise UsageError(f"{tw} must be a JSON object")
        if "hole" in term:
            _reject_unknown(term, _TERM_TAIL, tw)
            j = int(term.get("hole", -1))
            if not 0 <= j < len(d.holes):
                raise UsageError(f"{tw}: hole index {j} out of range")
            order = int(term.get("order", 0))
            if order < 1:
                raise UsageError(f"{tw}: order must be >= 1")
            elements.append(tail_element(d.holes[j], order, j))
        else:
            _reject_unknown(term, _TERM_PLAIN, tw)
            if "center" not in term or "power" not in term:
                raise UsageError(f"{tw}: needs 'center' and 'power'")
            elements.append(
                BasisElement(_complex_in(term["center"], f"{tw}.center"), int(term["power"]), 0.0, None)
            )
        if "coeff" not in term:
            raise UsageError(f"{tw}: missing 'coeff'")
        coeffs.append(_complex_in(term["coeff"], f"{tw}.coeff"))
    return RationalCombination(elements, coeffs)


def _scan_points(
    cfg: Dict[str, Any],
    rng_seed: Optional[int],
    d: Optional[CircularDomain],
    params: Optional[ConstructionParams] = None,
) -> List[complex]:
    """Evaluation grid: explicit points, polar product, midpoint circles,
    or uniform random points inside the domain."""
    scan = cfg.get("scan")
    if not isinstance(scan, dict):
        raise UsageError("config needs a 'scan' object")
    _reject_unknown(
        scan, ("points", "radii", "angles", "y_rings", "angle", "random_points"), "scan"
    )
    pts: List[complex] = []
    if "points" in scan:
        for i, obj in enumerate(scan["points"]):
            pts.append(_complex_in(obj, f"scan.points[{i}]"))
    elif "radii" in scan or "angles" in scan:
        radii = scan.get("radii")
        angles = scan.get("angles")
        if not isinstance(radii, list) or not isinstance(angles, list):
            raise UsageError("scan needs both 'radii' and 'angles' lists")
        for rad in radii:
            for ang in angles:
                rr, aa = float(rad), float(ang)
                pts.append(complex(rr * math.cos(aa), rr * math.sin(aa)))
    elif "y_rings" in scan:
        if params is None:
            raise UsageError("'y_rings' scans need construction parameters")
        ang = float(scan.get("angle", 0.0))
        for m in scan["y_rings"]:
            rr = ring(params, int(m)).y
            pts.append(complex(rr * math.cos(ang), rr * math.sin(ang)))
    elif "random_points" in scan:
        if d is None:
            raise UsageError("'random_points' scans need a domain")
        count = int(scan["random_points"])
        rng = np.random.default_rng(0 if rng_seed is None else rng_seed)
        while len(pts) < count:
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            if contains(d, z):
                pts.append(z)
    else:
        raise UsageError("scan needs 'points', 'radii'+'angles', 'y_rings', or 'random_points'")
    if not pts:
        raise UsageError("scan produced no points")
    return pts


def _resolve_evaluator(args: argparse.Namespace, cfg: Dict[str, Any]) -> KernelEvaluator:
    """An evaluator from a saved bundle or built inline from basis sizes."""
    if "evaluator" in cfg:
        path = cfg["evaluator"]
        if not isinstance(path, str):
            raise UsageError("'evaluator' must be a file path")
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return KernelEvaluator.loads(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read evaluator: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad evaluator bundle: {exc}") from exc
    if "basis" not in cfg:
        raise UsageError("config needs an 'evaluator' path or a 'basis' section")
    d = _resolve_domain(args, cfg)
    build = _build_gram(args, cfg, d)
    return build.evaluator()


def _basis_sizes(cfg: Dict[str, Any]) -> Tuple[int, int]:
    basis_cfg = cfg.get("basis")
    if not isinstance(basis_cfg, dict):
        raise UsageError("config needs a 'basis' object")
    _reject_unknown(basis_cfg, ("max_degree", "max_tail_order"), "basis")
    if "max_degree" not in basis_cfg or "max_tail_order" not in basis_cfg:
        raise UsageError("basis needs 'max_degree' and 'max_tail_order'")
    return int(basis_cfg["max_degree"]), int(basis_cfg["max_tail_order"])


def _build_gram(args: argparse.Namespace, cfg: Dict[str, Any], d: CircularDomain):
    max_degree, max_tail_order = _basis_sizes(cfg)
    elements = standard_basis(d, max_degree, max_tail_order)
    backend = args.backend or "spectral"
    if backend == "both":
        build = gram_matrix(elements, d, backend="spectral")
        other = gram_matrix(elements, d, backend="quad2d")
        scale = max(float(np.max(np.abs(build.gram))), 1e-300)
        rel = float(np.max(np.abs(build.gram - other.gram))) / scale
        if rel > 1e-6:
            raise RuntimeError(
                f"backend disagreement: spectral and quad2d grams differ by {rel:.3e} relative"
            )
        return build
    return gram_matrix(elements, d, backend=backend)


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------


def _validation_dict(rep) -> Dict[str, Any]:
    return {
        "ok": rep.ok,
        "violations": list(rep.violations),
        "min_condition1_index": rep.min_condition1_index,
        "condition1_ok": list(rep.condition1_ok),
    }


def _conditions_dict(rep) -> Dict[str, Any]:
    return {
        "n0": rep.n0,
        "n_max": rep.n_max,
        "condition1_from_index": rep.condition1_from_index,
        "condition1_tail_monotone": rep.condition1_tail_monotone,
        "log_series3_partial": _num(rep.series3_partial.log),
        "log_series3_tail": _num(rep.series3_tail.log),
        "series3_converges": rep.series3_converges,
        "log_series4_partial": _num(rep.series4_partial.log),
        "log_series4_tail": _num(rep.series4_tail.log),
        "series4_converges": rep.series4_converges,
        "log_product_lower_bound": _num(rep.product_lower_bound.log),
        "beta_infimum": _num(rep.beta_infimum),
        "log_epsilon": _num(rep.epsilon.log),
        "log_axis_majorant_sum": None if rep.axis_majorant_sum is None else _num(rep.axis_majorant_sum.log),
        "axis_majorant_converges": rep.axis_majorant_converges,
        "log_ym_sup_bound": _num(rep.ym_sup_bound.log),
        "ym_tail_monotone": rep.ym_tail_monotone,
        "conditions_hold": rep.conditions_hold,
        "notes": list(rep.notes),
    }


def _spacing_dict(sp) -> Dict[str, Any]:
    finite_lower = [m for m in sp.lower_margins if not math.isnan(m)]
    return {
        "value": _num(sp.value),
        "n_lo": sp.rings[0] if sp.rings else None,
        "n_hi": sp.rings[-1] if sp.rings else None,
        "min_lower_margin": _num(min(finite_lower)) if finite_lower else None,
        "min_upper_margin": _num(min(sp.upper_margins)) if sp.upper_margins else None,
        "degenerate_rings": [n for n, deg in zip(sp.rings, sp.degenerate) if deg],
        "t_within_ok": sp.t_within_ok,
        "t_across_ok": sp.t_across_ok,
        "y_circles_clear": sp.y_circles_clear,
        "certified": sp.certified,
    }


def _sandwich_rows(rep) -> List[Dict[str, Any]]:
    return [
        {"kind": row.kind, "index": row.index, "value_log": _num(row.value_log)}
        for row in rep.rows
    ]


def _sandwich_dict(rep) -> Dict[str, Any]:
    return {
        "rows": _sandwich_rows(rep),
        "c": _num(rep.c),
        "m1_log": _num(rep.m1_log),
        "lower_logs": [_num(v) for v in rep.lower_logs],
        "lower_monotone": rep.lower_monotone,
        "n_star": rep.n_star,
        "verdict": rep.verdict,
    }


def _terms_list(comb: RationalCombination) -> List[Dict[str, Any]]:
    out = []
    for el, c in zip(comb.elements, comb.coeffs):
        out.append(
            {
                "center": [_num(el.center.real), _num(el.center.imag)],
                "power": el.power,
                "log_prescale": _num(el.log_prescale),
                "coeff": [_num(c.real), _num(c.imag)],
            }
        )
    return out


def _suite_dict(rep) -> Dict[str, Any]:
    steps = []
    for s in rep.steps:
        steps.append(
            {
                "hole": s.hole,
                "alpha": _num(s.alpha),
                "beta": _num(s.beta),
                "norm_f_next": _num(s.norm_f_next),
                "norm_f_cur": _num(s.norm_f_cur),
                "norm_g_cur": _num(s.norm_g_cur),
                "norm_g_annulus": _num(s.norm_g_annulus),
                "inner_fg": [_num(s.inner_fg.real), _num(s.inner_fg.imag)],
                "norm_total_cur": _num(s.norm_total_cur),
                "slack_disc_restriction": _num(s.slack_disc_restriction),
                "slack_tail_restriction": _num(s.slack_tail_restriction),
                "slack_cross_term": _num(s.slack_cross_term),
                "slack_combined": _num(s.slack_combined),
                "parseval_gap": _num(s.parseval_gap),
            }
        )
    return {
        "steps": steps,
        "epsilon": _num(rep.epsilon),
        "product_lower_bound": _num(rep.product_lower_bound),
        "beta_infimum": _num(rep.beta_infimum),
        "norm_total": _num(rep.norm_total),
        "part_norms_annulus": [_num(v) for v in rep.part_norms_annulus],
        "remainder_norm_disc": _num(rep.remainder_norm_disc),
        "slack_energy": [_num(v) for v in rep.slack_energy],
        "slack_energy_limit": _num(rep.slack_energy_limit),
        "min_slack": _num(rep.min_slack),
        "ok": rep.ok,
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cfg_or_empty(args: argparse.Namespace) -> Dict[str, Any]:
    return _load_config(args.config) if args.config else {}


def cmd_construct(args: argparse.Namespace) -> int:
    cfg = _cfg_or_empty(args)
    _reject_unknown(cfg, ("params",), "config")
    params = _resolve_params(args, cfg)
    con = generate(params)
    doc = {
        "params": _params_to_dict(params),
        "rings": [
            {
                "n": r.n,
                "count": r.count,
                "x": _num(r.x),
                "log_x": _num(r.log_x),
                "log_r": _num(r.log_r),
                "log_s": _num(r.log_s),
                "log_t": _num(r.log_t),
                "y": _num(r.y),
            }
            for r in con.rings
        ],
        "domain": domain_to_dict(con.domain),
    }
    _emit(_json_text(doc), args.out)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _cfg_or_empty(args)
    _reject_unknown(cfg, ("domain", "params"), "config")
    d = _resolve_domain(args, cfg)
    rep = validate_configuration(d)
    _emit(_json_text(_validation_dict(rep)), args.out)
    return 0 if rep.ok else 2


def cmd_verify_conditions(args: argparse.Namespace) -> int:
    cfg = _cfg_or_empty(args)
    _reject_unknown(cfg, ("params",), "config")
    params = _resolve_params(args, cfg)
    rep = verify_conditions(params)
    _emit(_json_text(_conditions_dict(rep)), args.out)
    return 0 if rep.conditions_hold else 2


def cmd_majorant_scan(args: argparse.Namespace) -> int:
    cfg = _cfg_or_empty(args)
    _reject_unknown(cfg, ("params", "c", "scan"), "config")
    params = _resolve_params(args, cfg)
    c = args.c if args.c is not None else float(cfg.get("c", 1.0))
    pts = _scan_points(cfg, args.seed, None, params)
    rows = []
    for z in pts:
        value = majorant(params, z, c)
        rows.append([_fmt(z.real), _fmt(z.imag), _fmt(value.log)])
    _emit(_csv_text("re,im,log_majorant", rows), args.out)
    return 0


def cmd_sandwich(args: argparse.Namespace) -> int:
    cfg = _cfg_or_empty(args)
    _reject_unknown(cfg, ("params", "c"), "config")
    params = _resolve_params(args, cfg)
    c = args.c if args.c is not None else float(cfg.get("c", 1.0))
    rep = sandwich_scan(params, c)
    _emit(_json_text(_sandwich_dict(rep)), args.out)
    return 0 if rep.verdict else 2


def cmd_gram(args: argparse.Namespace) -> int:
    if not args.config:
        raise UsageError("gram requires --config")
    cfg = _load_config(args.config)
    _reject_unknown(cfg, ("domain", "params", "basis"), "config")
    d = _resolve_domain(args, cfg)
    build = _build_gram(args, cfg, d)
    _emit(build.evaluator().dumps(), args.out)
    return 0


def cmd_kernel_scan(args: argparse.Namespace) -> int:
    if not args.config:
        raise UsageError("kernel-scan requires --config")
    cfg = _load_config(args.config)
    _reject_unknown(cfg, ("evaluator", "domain", "params", "basis", "scan"), "config")
    ke = _resolve_evaluator(args, cfg)
    pts = _scan_points(cfg, args.seed, ke.domain)
    for i, z in enumerate(pts):
        if not contains(ke.domain, z):
            raise UsageError(f"scan point {i} = {z} is outside the domain")
    values = ke.kernel_values(np.asarray(pts, dtype=np.complex128))
    rows = [
        [_fmt(z.real), _fmt(z.imag), _fmt(v)] for z, v in zip(pts, values)
    ]
    _emit(_csv_text("re,im,K", rows), args.out)
    return 0


def cmd_metric_scan(args: argparse.Namespace) -> int:
    if not args.config:
        raise UsageError("metric-scan requires --config")
    cfg = _load_config(args.config)
    _reject_unknown(cfg, ("evaluator", "domain", "params", "basis", "scan"), "config")
    ke = _resolve_evaluator(args, cfg)
    pts = _scan_points(cfg, args.seed, ke.domain)
    rows = []
    for i, z in enumerate(pts):
        if not contains(ke.domain, z):
            raise UsageError(f"scan point {i} = {z} is outside the domain")
        k = ke.kernel(z)
        rows.append([_fmt(z.real), _fmt(z.imag), _fmt(k), _fmt(metric(ke, z))])
    _emit(_csv_text("re,im,K,beta", rows), args.out)
    return 0


def cmd_distance(args: argparse.Namespace) -> int:
    if not args.config:
        raise UsageError("distance requires --config")
    cfg = _load_config(args.config)
    if "probe" in cfg:
        _reject_unknown(cfg, ("evaluator", "domain", "params", "basis", "probe"), "config")
        probe_cfg = cfg["probe"]
        if not isinstance(probe_cfg, dict):
            raise UsageError("'probe' must be a JSON object")
        _reject_unknown(probe_cfg, ("params", "approach", "c"), "probe")
        if "params" not in probe_cfg:
            raise UsageError("probe needs a 'params' section")
        params = _params_from_dict(probe_cfg["params"], "probe.params")
        con = generate(params)
        build_cfg = dict(cfg)
        build_cfg.pop("probe")
        if "evaluator" not in build_cfg:
            build_cfg.setdefault("domain", domain_to_dict(con.domain))
        ke = _resolve_evaluator(args, build_cfg)
        approach_raw = probe_cfg.get("approach")
        if not isinstance(approach_raw, list) or len(approach_raw) < 2:
            raise UsageError("probe.approach must list at least two [re, im] points")
        approach = Path(
            [_complex_in(p, f"probe.approach[{i}]") for i, p in enumerate(approach_raw)]
        )
        c = args.c if args.c is not None else float(probe_cfg.get("c", 1.0))
        rep = completeness_probe(con, ke, approach, c)
        rows = [
            [
                _fmt(row.t),
                _fmt(row.point.real),
                _fmt(row.point.imag),
                _fmt(row.k_lower),
                _fmt(row.beta),
                _fmt(row.cumulative_length),
            ]
            for row in rep.rows
        ]
        _emit(_csv_text("t,re,im,K_lower,beta,cumulative_length", rows), args.out)
        ok = rep.x_lower_monotone and rep.y_below_majorant and rep.x_crossings > 0
        return 0 if ok else 2
    _reject_unknown(cfg, ("evaluator", "domain", "params", "basis", "w", "z", "mesh_level"), "config")
    if "w" not in cfg or "z" not in cfg:
        raise UsageError("distance needs 'w' and 'z' points (or a 'probe' section)")
    ke = _resolve_evaluator(args, cfg)
    w = _complex_in(cfg["w"], "w")
    z = _complex_in(cfg["z"], "z")
    level = int(cfg.get("mesh_level", 3))
    res = distance_upper(ke, w, z, mesh_level=level)
    doc = {
        "value": _num(res.value),
        "refinement_level": res.refinement_level,
        "path": [[_num(p.real), _num(p.imag)] for p in res.path.points],
    }
    _emit(_json_text(doc), args.out)
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    if not args.config:
        raise UsageError("decompose requires --config")
    cfg = _load_config(args.config)
    _reject_unknown(cfg, ("domain", "params", "function", "upto"), "config")
    d = _resolve_domain(args, cfg)
    if "function" not in cfg:
        raise UsageError("config needs a 'function' section")
    F = _function_from_config(cfg["function"], d)
    upto = int(cfg["upto"]) if "upto" in cfg else None
    result = split(F, d, upto=upto)
    doc = {
        "residual": _num(result.residual),
        "parts": [
            {
                "hole": j,
                "terms": _terms_list(part),
                "norm_annulus": _num(annulus_tail_norm_sq(part, d.holes[j])),
            }
            for j, part in enumerate(result.parts)
        ],
        "remainder_terms": _terms_list(result.remainder),
    }
    _emit(_json_text(doc), args.out)
    return 0


def cmd_inequality_suite(args: argparse.Namespace) -> int:
    if not args.config:
        raise UsageError("inequality-suite requires --config")
    cfg = _load_config(args.config)
    _reject_unknown(cfg, ("domain", "params", "function"), "config")
    d = _resolve_domain(args, cfg)
    if "function" not in cfg:
        raise UsageError("config needs a 'function' section")
    F = _function_from_config(cfg["function"], d)
    backend = args.backend or "spectral"
    if backend == "both":
        raise UsageError("inequality-suite supports --backend spectral or quad2d")
    rep = inequality_suite(F, d, backend=backend)
    _emit(_json_text(_suite_dict(rep)), args.out)
    return 0 if rep.ok else 2


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _cfg_or_empty(args)
    _reject_unknown(cfg, ("params", "c"), "config")
    params = _resolve_params(args, cfg)
    c = args.c if args.c is not None else float(cfg.get("c", 1.0))
    conditions = verify_conditions(params)
    spacing = spacing_constant(params)
    sandwich = sandwich_scan(params, c)
    doc = {
        "conditions": _conditions_dict(conditions),
        "spacing": _spacing_dict(spacing),
        "sandwich": _sandwich_rows(sandwich),
    }
    _emit(_json_text(doc), args.out)
    ok = conditions.conditions_hold and spacing.certified and sandwich.verdict
    return 0 if ok else 2


_COMMANDS = {
    "construct": cmd_construct,
    "validate": cmd_validate,
    "verify-conditions": cmd_verify_conditions,
    "majorant-scan": cmd_majorant_scan,
    "sandwich": cmd_sandwich,
    "gram": cmd_gram,
    "kernel-scan": cmd_kernel_scan,
    "metric-scan": cmd_metric_scan,
    "distance": cmd_distance,
    "decompose": cmd_decompose,
    "inequality-suite": cmd_inequality_suite,
    "report": cmd_report,
}


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="bergman",
        description="Certified numerics for kernels, metrics, and distances on circular domains.",
    )
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument(
        "--exact-params",
        action="store_true",
        help="use the exact construction parameters (exponents 5/5/19, unit s-rate)",
    )
    common.add_argument("--n-max", type=int, metavar="N", help="ring truncation override")
    common.add_argument("--rings", metavar="A..B", help="ring range override (sets n0 and n_max)")
    common.add_argument("--c", type=float, metavar="VALUE", help="majorant constant")
    common.add_argument("--seed", type=int, metavar="N", help="RNG seed for random scans")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument(
        "--backend",
        choices=("spectral", "quad2d", "both"),
        help="inner-product backend",
    )
    sub = parser.add_subparsers(dest="command")
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing command")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
