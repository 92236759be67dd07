"""Report documents: JSON serialisation and plain-text rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import PartitionedAlgebra, cartan_matrix, find_symmetrizing_form, radical_layers
from .modules import projective_data

VERSION = "0.1.0"
SAFE_INT = 2**53


def jsonable(x):
    """Plain JSON data; integers beyond 2^53 become decimal strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        v = int(x)
        return str(v) if abs(v) > SAFE_INT else v
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, Fraction):
        return str(x)
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    raise TypeError(f"cannot serialise {type(x).__name__}")


def loewy_diagram(a: PartitionedAlgebra, i: int) -> list[list[str]]:
    """Composition factors of each radical layer of P_i, as simple labels."""
    pd = projective_data(a)[i]
    rows = []
    for k in range(int(pd.layer.max()) + 1 if len(pd.layer) else 0):
        here = pd.idem[pd.layer == k]
        rows.append([a.simples[l] for l in sorted(here.tolist())])
    return rows


def algebra_summary(a: PartitionedAlgebra) -> dict:
    return {
        "name": a.name,
        "dim": a.dim,
        "simples": a.simples,
        "num_simples": len(a.simples),
        "cartan": cartan_matrix(a).tolist(),
        "radical_layers": radical_layers(a),
        "projectives": [
            {"simple": a.simples[i], "dim": int(len(pd.layer)), "loewy": loewy_diagram(a, i)}
            for i, pd in enumerate(projective_data(a))
        ],
    }


@dataclass
class ReportDoc:
    command: str
    source: str
    input_digest: str
    field: str
    algebra: dict
    symmetric_form: str
    payloads: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    version: str = VERSION

    def __post_init__(self):
        self.algebra = jsonable(self.algebra)
        self.payloads = jsonable(self.payloads)
        self.warnings = [str(w) for w in self.warnings]

    def add(self, name: str, payload) -> None:
        self.payloads[name] = jsonable(payload)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "command": self.command,
            "source": self.source,
            "input_digest": self.input_digest,
            "field": self.field,
            "algebra": self.algebra,
            "symmetric_form": self.symmetric_form,
            "payloads": self.payloads,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDoc":
        return cls(
            command=d["command"],
            source=d["source"],
            input_digest=d["input_digest"],
            field=d["field"],
            algebra=d["algebra"],
            symmetric_form=d["symmetric_form"],
            payloads=d.get("payloads", {}),
            warnings=d.get("warnings", []),
            version=d.get("version", VERSION),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDoc":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        return render_text(self)


def new_report(command: str, loaded, check_form: bool = True) -> ReportDoc:
    a = loaded.algebra
    status = find_symmetrizing_form(a).status() if check_form else "not checked"
    return ReportDoc(command, loaded.source, loaded.digest, a.field_spec.describe(), algebra_summary(a), status)


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------


def _centred(rows: list[list[str]]) -> list[str]:
    lines = ["  ".join(r) for r in rows]
    width = max((len(s) for s in lines), default=0)
    return [s.center(width).rstrip() for s in lines]


def _matrix(m) -> list[str]:
    cells = [[str(v) for v in row] for row in m]
    w = max((len(c) for row in cells for c in row), default=1)
    return ["[" + " ".join(c.rjust(w) for c in row) + "]" for row in cells]


def _section(title: str) -> list[str]:
    return ["", title, "-" * len(title)]


def _render_growth(g: dict) -> list[str]:
    out = []
    cols = [("s", None), ("dim", "dims"), ("head", "heads"), ("socle", "socles"), ("LL", "loewy_lengths"), ("term", "term_dims")]
    n = len(g["dims"])
    table = [[c for c, _ in cols]] + [[str(s)] + [str(g[k][s]) for _, k in cols[1:]] for s in range(n)]
    widths = [max(len(r[c]) for r in table) for c in range(len(cols))]
    for r in table:
        out.append("  ".join(v.rjust(w) for v, w in zip(r, widths)))
    if g.get("truncated"):
        out.append(f"truncated: {g['note']}")
    out.append(f"exact sequences consistent: {g['exact_sequences_consistent']}")
    return out


def _render_fit(label: str, fit: dict | None) -> list[str]:
    if not fit:
        return [f"{label}: none"]
    line = f"{label}: {fit['equation']} (verified on terms {fit['verified_range'][0]}..{fit['verified_range'][1]})"
    if fit.get("dominant_root_decimal"):
        lo, hi = fit["dominant_root_decimal"]
        line += f", dominant root in ({lo}, {hi}]"
    return [line]


def _render_payload(name: str, p) -> list[str]:
    out = _section(name)
    if name == "validation":
        out.append("valid" if p["valid"] else "invalid")
        out += [f"  {d}" for d in p.get("diagnostics", [])]
    elif name == "endomorphism_algebra":
        out.append(f"E = {p['name']}: dim {p['dim']}, simples {', '.join(p['simples'])}")
        out.append(f"commutative: {p['commutative']}, local: {p['local']}, radical layers {p['radical_layers']}")
        out.append(f"symmetrizing form: {p['symmetric_form']}")
        out.append("Cartan matrix of E:")
        out += ["  " + s for s in _matrix(p["cartan"])]
        for m in p.get("modules", []):
            out.append(f"{m['name']}: dim {m['dim']}, head {m['head']}, socle {m['socle']}, Loewy layers {m['loewy_layers']}")
    elif name in ("growth",):
        out += _render_growth(p)
    elif name == "verdict":
        out.append(f"{p['kind']}: {p['reason']}")
        if p.get("periodicity"):
            per = p["periodicity"]
            out.append(f"period {per['period']} (Omega^{per['s']} M ~ Omega^{per['s_prime']} M)")
        out += _render_fit("term-dimension recurrence", p.get("term_recurrence"))
        out += _render_fit("socle-dimension recurrence", p.get("socle_recurrence"))
        out += [f"note: {n}" for n in p.get("notes", [])]
        if p.get("growth"):
            out.append("")
            out += _render_growth(p["growth"])
    elif name == "tilting":
        for t in p["complexes"]:
            out.append(f"{t['name']}: {t['description']}")
    elif name == "cartan_table":
        for t, m in enumerate(p["matrices"]):
            flags = f"det {p['determinants'][t]}, symmetric {p['symmetric'][t]}, I0 block stable {p['I0_block_stable'][t]}"
            rows = _matrix(m)
            out.append(f"t = {t}: {rows[0]}  ({flags})")
            out += [" " * len(f"t = {t}: ") + r for r in rows[1:]]
    elif name == "recurrence_audit":
        out.append(f"all pass: {p['all_pass']}")
        for r in p["rows"]:
            out.append(
                f"t = {r['t']} ({r['i']},{r['j']}): {r['c_t']} + {r['c_t_plus_1']} = {r['c_t'] + r['c_t_plus_1']}"
                f" vs dim Hom(P_{r['i']}, R^({r['t']})_{r['j']}) = {r['dim_Hom_P_i_R_j']}  {'ok' if r['pass'] else 'FAIL'}"
            )
    elif name == "tilting_verification":
        for v in p:
            out.append(
                f"t = {v['t']}: {'pass' if v['passed'] else 'FAIL'} ({v['checked']} shifted hom spaces in window "
                f"[{v['window'][0]}, {v['window'][1]}], generation certificate {v['certificate_ok']})"
            )
            for f in v["failures"]:
                out.append(f"  Hom({f[0]}, {f[1]}[{f[2]}]) has dimension {f[3]}")
    else:
        out.append(json.dumps(p, indent=2, sort_keys=True))
    return out


def render_text(doc: ReportDoc) -> str:
    a = doc.algebra
    out = [f"tiltbench {doc.version}: {doc.command} {doc.source}", f"input sha256 {doc.input_digest}"]
    out.append(f"algebra {a['name']} over {doc.field}: dim {a['dim']}, {a['num_simples']} simples ({', '.join(a['simples'])})")
    out.append(f"radical layers {a['radical_layers']}")
    out.append(f"symmetric form: {doc.symmetric_form}")
    out.append("Cartan matrix:")
    out += ["  " + s for s in _matrix(a["cartan"])]
    for p in a["projectives"]:
        out += _section(f"P_{p['simple']} (dim {p['dim']})")
        out += ["  " + s for s in _centred(p["loewy"])]
    for name, p in doc.payloads.items():
        out += _render_payload(name, p)
    if doc.warnings:
        out += _section("warnings")
        out += [f"* {w}" for w in doc.warnings]
    return "\n".join(out) + "\n"
