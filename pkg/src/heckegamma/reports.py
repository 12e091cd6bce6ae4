"""Report assembly with a determinism contract.

Every command produces one JSON object: config in, results out, canonical
key order, no wall-clock data.  Identical configuration must give a
byte-identical report; timings go to stderr only.
"""

import json
import sys
import time

from .building import Building, ChamberGraph
from .gamma import gamma_at_radius
from .modules import (
    HModule,
    check_local_relation,
    distinction,
    gamma_fixed_dim,
    reconstruct_f,
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_TRUNCATED = 3

# tags pinning the choices a reader needs to interpret coefficients
CONVENTIONS = {
    "quadratic": "(e_s + 1) * (e_s - q) = 0 with q = q0^2",
    "panel_split": "minus counts chambers nearer the fixed subbuilding, plus farther",
    "contragredient": "transpose after the basis anti-involution e_w -> e_{w^-1}",
}


def _config_obj(cfg: dict) -> dict:
    return {k: cfg[k] for k in sorted(cfg)}


def _envelope(command: str, cfg: dict, payload: dict) -> dict:
    report = {"command": command, "config": _config_obj(cfg), "conventions": CONVENTIONS}
    report.update(payload)
    return report


class _Timer:
    def __init__(self, label: str):
        self.label = label

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        dt = time.perf_counter() - self.t0
        print(f"timing: {self.label} {dt:.3f}s", file=sys.stderr)


def _graph(cfg: dict) -> ChamberGraph:
    b = Building(cfg["n"], cfg["q0"], precision=cfg.get("precision"))
    return b.explore(cfg["radius"], cap_chambers=cfg["cap_chambers"])


def explore_report(cfg: dict) -> tuple[dict, int]:
    with _Timer("explore"):
        g = _graph(cfg)
    payload = {"census": g.census(), "truncated": bool(g.truncated)}
    return _envelope("explore", cfg, payload), EXIT_TRUNCATED if g.truncated else EXIT_OK


def courtes_report(cfg: dict) -> tuple[dict, int]:
    with _Timer("explore"):
        g = _graph(cfg)
    with _Timer("panel census"):
        census = g.panel_census()
    payload = {
        "panels": census.json_obj(),
        "two_value_law": not census.violations,
        "truncated": bool(g.truncated),
    }
    if census.violations:
        code = EXIT_VIOLATION
    elif g.truncated:
        code = EXIT_TRUNCATED
    else:
        code = EXIT_OK
    return _envelope("courtes", cfg, payload), code


def gamma_report(cfg: dict) -> tuple[dict, int]:
    b = Building(cfg["n"], cfg["q0"], precision=cfg.get("precision"))
    with _Timer("gamma"):
        rep, g = gamma_at_radius(
            b,
            cfg["radius"],
            cap_sigs=cfg["cap_galleries"],
            cap_chambers=cfg["cap_chambers"],
        )
    payload = {"gamma": rep.json_obj(g), "truncated": bool(g.truncated or rep.truncated)}
    code = EXIT_TRUNCATED if rep.status == "inconclusive" else EXIT_OK
    return _envelope("gamma", cfg, payload), code


def resolve_module(name: str, n: int, q0: int, seed: int) -> HModule:
    """Named one-dimensional modules, the seeded random family, or a file."""
    from .weyl import CoxeterSystem

    ws = CoxeterSystem(n)
    if name == "trivial":
        return HModule.trivial(ws, q0)
    if name == "sign":
        return HModule.sign(ws, q0)
    if name == "random":
        return HModule.random_two_dim(ws, q0, seed)
    mod = HModule.load(name)
    if mod.ws.n != n or mod.q0 != q0:
        raise ValueError(
            f"module file is for n={mod.ws.n}, q0={mod.q0}; "
            f"the session asks for n={n}, q0={q0}"
        )
    return mod


def distinguish_report(cfg: dict, mod: HModule, check: bool = False) -> tuple[dict, int]:
    b = Building(cfg["n"], cfg["q0"], precision=cfg.get("precision"))
    with _Timer("gamma"):
        rep, g = gamma_at_radius(
            b,
            cfg["radius"],
            cap_sigs=cfg["cap_galleries"],
            cap_chambers=cfg["cap_chambers"],
        )
    with _Timer("fixed space"):
        dec = distinction(mod, rep)
    payload = {
        "module": {"dim": mod.dim, "source": cfg["module"]},
        "gamma": rep.json_obj(),
        "distinction": dec.json_obj(),
        "caveat": f"upper bound at radius {cfg['radius']}",
        "truncated": bool(g.truncated or rep.truncated),
    }
    violations = 0
    if check:
        with _Timer("distribution check"):
            _, basis = gamma_fixed_dim(mod, rep)
            checks = []
            for vec in basis:
                f = reconstruct_f(mod, g, vec)
                viol = check_local_relation(mod, g, f)
                violations += len(viol)
                checks.append(
                    {
                        "vector": [str(x) for x in vec],
                        "chambers": len(f),
                        "violations": viol,
                    }
                )
        payload["distribution_check"] = checks
    if violations:
        code = EXIT_VIOLATION
    elif rep.status == "inconclusive":
        code = EXIT_TRUNCATED
    else:
        code = EXIT_OK
    return _envelope("distinguish", cfg, payload), code


# -- emission ----------------------------------------------------------------


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_table(report: dict) -> str:
    """Flat key-path table of the same payload, for eyeballing."""
    lines: list[str] = []

    def walk(prefix: str, value):
        if isinstance(value, dict):
            if not value:
                lines.append(f"{prefix}  {{}}")
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, list):
            if all(not isinstance(x, (dict, list)) for x in value):
                lines.append(f"{prefix}  {value}")
            else:
                for i, x in enumerate(value):
                    walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}  {value}")

    walk("", report)
    width = max((len(l.split("  ")[0]) for l in lines), default=0)
    out = []
    for l in lines:
        key, _, rest = l.partition("  ")
        out.append(f"{key.ljust(width)}  {rest}")
    return "\n".join(out) + "\n"


def emit(report: dict, fmt: str, out: str | None) -> None:
    text = render_json(report) if fmt == "json" else render_table(report)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
