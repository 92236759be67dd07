"""Command-line front end.

Exit codes: 0 success, 1 validation failure (bad input or arguments),
2 resource cap exceeded, 3 unsupported input.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .algebra import UnsupportedGroupError, ValidationError, cartan_matrix, find_symmetrizing_form, radical_layers
from .analysis import (
    INAPPLICABLE,
    build_tilts,
    cartan_recurrence_audit,
    cartan_table,
    check_claimed_recurrence,
    resolution_growth,
    theorem_main_verdict,
)
from .data import BUILTINS, LoadedInput, load
from .endo import endomorphism_algebra, hom_as_E_module
from .formats import ParseError
from .homotopy import CapExceeded, verify_tilting
from .modules import DEFAULT_CAP, ProjectiveModule, head_dims, loewy_layers, socle_dim
from .report import ReportDoc, new_report

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_UNSUPPORTED = 0, 1, 2, 3
DEFAULT_STEPS = 12
DEFAULT_TILT = 4

# take / target used by `demo`
DEMOS = {
    "ex1": (["k"], "eps"),
    "ex2": (["k"], "eps"),
    "a4": (["k"], "s1"),
    "kx2": (["1"], None),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    take: list[str] = field(default_factory=list)
    target: str | None = None
    steps: int = DEFAULT_STEPS
    tilt_t: int = DEFAULT_TILT
    cap: int = DEFAULT_CAP
    output: str | None = None
    format: str = "text"
    verify: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors count as validation failures, keeping 2 for the cap
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tiltbench", description="Iterated tilting complexes, Cartan growth and syzygy growth for symmetric algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, take=False, target=False, steps=False):
        p.add_argument("input", help=f"format A/B file or builtin ({', '.join(BUILTINS)})")
        if take:
            p.add_argument("--take", required=True, help="comma-separated simple labels forming I_0")
        if target:
            p.add_argument("--target", help="simple label j outside I_0 (default: first simple outside I_0)")
        if steps:
            p.add_argument("--steps", type=_nonneg, default=DEFAULT_STEPS, help="resolution length s_max")
        p.add_argument("--cap", type=_nonneg, default=None, help="per-term dimension cap (default $TILTBENCH_CAP or 10^4)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--json", dest="output", metavar="OUT", help="also write the JSON report to OUT")

    common(sub.add_parser("validate", help="check an input file"))
    common(sub.add_parser("info", help="dimensions, Cartan matrix, Loewy layers"))
    common(sub.add_parser("endo", help="E = End(Q_0) and the modules Hom(Q_0, P_j)"), take=True)
    common(sub.add_parser("resolve", help="minimal resolution of Hom(Q_0, P_j) over E"), take=True, target=True, steps=True)
    p = sub.add_parser("tilt", help="tilting complexes T^(t) and their Cartan matrices")
    common(p, take=True)
    p.add_argument("--t", dest="tilt_t", type=_nonneg, default=DEFAULT_TILT)
    p.add_argument("--verify", action="store_true", help="check shifted self-homs vanish and certify generation")
    p = sub.add_parser("analyze", help="growth verdict, Cartan table and recurrence audit")
    common(p, take=True, target=True, steps=True)
    p.add_argument("--tilt-t", dest="tilt_t", type=_nonneg, default=DEFAULT_TILT)
    p.add_argument("--verify", action="store_true")
    p = sub.add_parser("demo", help="analyze a builtin with its standard I_0 and target")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--steps", type=_nonneg, default=DEFAULT_STEPS)
    p.add_argument("--tilt-t", dest="tilt_t", type=_nonneg, default=DEFAULT_TILT)
    p.add_argument("--cap", type=_nonneg, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--json", dest="output", metavar="OUT")
    return ap


def resolve_cap(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("TILTBENCH_CAP")
    if env:
        try:
            v = int(env)
        except ValueError:
            raise UsageError(f"TILTBENCH_CAP must be an integer, got {env!r}") from None
        if v < 0:
            raise UsageError("TILTBENCH_CAP must be >= 0")
        return v
    return DEFAULT_CAP


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(ns.command, getattr(ns, "input", None) or getattr(ns, "name", None))
    if ns.command == "demo":
        take, target = DEMOS[ns.name]
        cfg.command, cfg.take, cfg.target = "analyze", list(take), target
    else:
        cfg.take = [s.strip() for s in (getattr(ns, "take", "") or "").split(",") if s.strip()]
        cfg.target = getattr(ns, "target", None)
    cfg.steps = getattr(ns, "steps", DEFAULT_STEPS)
    cfg.tilt_t = getattr(ns, "tilt_t", DEFAULT_TILT)
    cfg.cap = resolve_cap(ns.cap)
    cfg.output = ns.output
    cfg.format = ns.format
    cfg.verify = getattr(ns, "verify", False)
    return cfg


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _indices(loaded: LoadedInput, cfg: RunConfig) -> tuple[list[int], int | None]:
    a = loaded.algebra
    try:
        take = sorted({a.simple_index(s) for s in cfg.take})
        target = a.simple_index(cfg.target) if cfg.target else None
    except KeyError as e:
        raise UsageError(e.args[0]) from None
    if not take and cfg.command != "info":
        raise UsageError("--take needs at least one simple label")
    if target is None:
        target = next((j for j in range(len(a.simples)) if j not in take), None)
    return take, target


def cmd_validate(cfg: RunConfig) -> tuple[ReportDoc | None, int]:
    loaded = load(cfg.input)
    doc = new_report("validate", loaded)
    doc.add("validation", {"valid": True, "kind": loaded.kind, "diagnostics": []})
    return doc, EXIT_OK


def cmd_info(cfg: RunConfig) -> tuple[ReportDoc, int]:
    return new_report("info", load(cfg.input)), EXIT_OK


def _endo_payload(t, targets) -> dict:
    a, E = t.algebra, t.E
    mods = []
    for j in targets:
        Pj = ProjectiveModule(a, [1 if k == j else 0 for k in range(len(a.idem))])
        M = hom_as_E_module(t, Pj, name=f"Hom(Q0,P_{a.simples[j]})")
        mods.append(
            {
                "name": M.name,
                "dim": M.dim,
                "head": int(sum(head_dims(M))),
                "socle": socle_dim(M),
                "loewy_layers": loewy_layers(M),
            }
        )
    return {
        "name": E.name,
        "dim": E.dim,
        "simples": E.simples,
        "commutative": E.is_commutative(),
        "local": E.is_local(),
        "radical_layers": radical_layers(E),
        "cartan": cartan_matrix(E),
        "symmetric_form": find_symmetrizing_form(E).status(),
        "modules": mods,
    }


def cmd_endo(cfg: RunConfig) -> tuple[ReportDoc, int]:
    loaded = load(cfg.input)
    take, _ = _indices(loaded, cfg)
    a = loaded.algebra
    t = endomorphism_algebra(a, take)
    doc = new_report("endo", loaded)
    doc.add("endomorphism_algebra", _endo_payload(t, [j for j in range(len(a.idem)) if j not in take]))
    return doc, EXIT_OK


def _claim_warnings(loaded: LoadedInput, take_labels: list[str], target_label: str | None, socles: list[int]) -> list[str]:
    claims = loaded.claims
    ctx = claims.get("context")
    if not claims or ctx is None or (sorted(take_labels), target_label) != (sorted(ctx["take"]), ctx["target"]):
        return []
    out = []
    rec = claims.get("socle_recurrence")
    if rec:
        holds, bad = check_claimed_recurrence(socles, rec)
        if not holds:
            predicted = sum(c * socles[bad - 1 - k] for k, c in enumerate(rec["coefficients"])) + rec.get("constant", 0)
            out.append(
                f"reference recurrence {rec['text']} conflicts with the computed socle dimensions "
                f"{socles}: it predicts a_{bad} = {predicted} but a_{bad} = {socles[bad]}"
            )
    closed = claims.get("closed_form_recurrence")
    if closed:
        holds, bad = check_claimed_recurrence(socles, closed)
        state = "agrees with every computed term" if holds else f"fails first at a_{bad}"
        out.append(f"reference closed form ({closed['text']}) {state}")
    return out


def cmd_resolve(cfg: RunConfig) -> tuple[ReportDoc, int]:
    loaded = load(cfg.input)
    take, target = _indices(loaded, cfg)
    a = loaded.algebra
    if target is None or target in take:
        raise UsageError("target must be a simple outside I_0")
    t = endomorphism_algebra(a, take)
    g = resolution_growth(t, target, cfg.steps, cfg.cap)
    doc = new_report("resolve", loaded)
    doc.add("growth", g.to_dict())
    if g.truncated:
        doc.warnings.append(f"resolution stopped early: {g.note}")
    doc.warnings += _claim_warnings(loaded, [a.simples[i] for i in take], a.simples[target], g.socles)
    return doc, EXIT_OK


def _tilting_payloads(doc: ReportDoc, a, t, t_max: int, cap: int, verify: bool, take: list[int]):
    tilts = build_tilts(a, t, t_max, cap)
    doc.add(
        "tilting",
        {"t": t_max, "complexes": [{"name": c.name, "description": c.describe(), "resolution_mults": c.meta["resolution_mults"]} for c in tilts[-1]]},
    )
    table = cartan_table(tilts, take, cartan_matrix(a))
    doc.add("cartan_table", table.to_dict())
    if not all(table.symmetric):
        doc.warnings.append("a Cartan matrix of a tilted algebra is not symmetric")
    if len(set(table.determinants)) > 1:
        doc.warnings.append(f"Cartan determinants vary with t: {table.determinants}")
    if verify:
        reports = [verify_tilting(tilts[s], take, s) for s in range(1, t_max + 1)]
        doc.add("tilting_verification", [asdict(r) for r in reports])
        if not all(r.passed for r in reports):
            doc.warnings.append("tilting verification failed; see tilting_verification")
    return tilts, table


def cmd_tilt(cfg: RunConfig) -> tuple[ReportDoc, int]:
    loaded = load(cfg.input)
    take, _ = _indices(loaded, cfg)
    a = loaded.algebra
    t = endomorphism_algebra(a, take)
    doc = new_report("tilt", loaded)
    _tilting_payloads(doc, a, t, cfg.tilt_t, cfg.cap, cfg.verify, take)
    return doc, EXIT_OK


def cmd_analyze(cfg: RunConfig) -> tuple[ReportDoc, int]:
    loaded = load(cfg.input)
    take, target = _indices(loaded, cfg)
    a = loaded.algebra
    doc = new_report("analyze", loaded)
    if target is not None and len(take) < len(a.idem):
        t = endomorphism_algebra(a, take)
        doc.add("endomorphism_algebra", _endo_payload(t, [target]))
    else:
        t = None
    v = theorem_main_verdict(a, take, take[0] if target is None else target, cfg.steps, cfg.cap, transport=t)
    doc.add("verdict", v.to_dict())
    if v.kind == INAPPLICABLE:
        return doc, EXIT_OK
    g = v.growth
    if g is not None and g.truncated:
        doc.warnings.append(f"resolution stopped early: {g.note}")
    if g is not None:
        doc.warnings += _claim_warnings(loaded, [a.simples[i] for i in take], a.simples[target], g.socles)
    if cfg.tilt_t >= 1:
        tilts, table = _tilting_payloads(doc, a, t, cfg.tilt_t, cfg.cap, cfg.verify, take)
        audit = cartan_recurrence_audit(a, t, cfg.tilt_t, tilts, table)
        doc.add("recurrence_audit", audit.to_dict(a.simples))
        if not audit.all_pass:
            doc.warnings.append("Cartan recurrence audit failed; see recurrence_audit rows")
    return doc, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "endo": cmd_endo,
    "resolve": cmd_resolve,
    "tilt": cmd_tilt,
    "analyze": cmd_analyze,
}


def run(cfg: RunConfig) -> tuple[ReportDoc | None, int, list[str]]:
    """Execute a configuration; returns (report, exit code, diagnostics)."""
    try:
        doc, code = COMMANDS[cfg.command](cfg)
        return doc, code, []
    except ParseError as e:
        return None, EXIT_INVALID, [str(e)]
    except ValidationError as e:
        return None, EXIT_INVALID, list(e.diagnostics)
    except UsageError as e:
        return None, EXIT_INVALID, [str(e)]
    except (FileNotFoundError, IsADirectoryError) as e:
        return None, EXIT_INVALID, [f"cannot read {cfg.input}: {e.strerror}"]
    except UnsupportedGroupError as e:
        return None, EXIT_UNSUPPORTED, [f"unsupported input: {e}"]
    except CapExceeded as e:
        return None, EXIT_CAP, [f"dimension cap exceeded: {e}"]


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except UsageError as e:
        print(f"tiltbench: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    doc, code, diags = run(cfg)
    for d in diags:
        print(d, file=sys.stderr)
    if cfg.command == "validate" and code == EXIT_INVALID:
        print("invalid", file=sys.stdout)
    if doc is not None:
        if cfg.output:
            Path(cfg.output).write_text(doc.to_json())
        sys.stdout.write(doc.to_json() if cfg.format == "json" else doc.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
