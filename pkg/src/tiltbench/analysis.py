"""Growth sequences, recurrence fitting, verdicts and the Cartan recurrence audit."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import PartitionedAlgebra
from .endo import TransportData, endomorphism_algebra, hom_as_E_module
from .homotopy import Complex, cartan_of_tilt, or_tilting, stalk
from .modules import DEFAULT_CAP, ProjectiveModule, is_isomorphic, minimal_resolution
from . import linalg as la

ROOT_WIDTH = Fraction(1, 10**7)


# ---------------------------------------------------------------------------
# Growth sequences
# ---------------------------------------------------------------------------


@dataclass
class GrowthSequence:
    dims: list[int]
    heads: list[int]
    socles: list[int]
    loewy: list[int]
    term_dims: list[int]
    term_mults: list[list[int]]
    truncated: bool
    note: str = ""
    trace: object = None  # the underlying ResolutionTrace (not serialised)

    def exactness_ok(self) -> bool:
        return all(self.term_dims[s] == self.dims[s] + self.dims[s + 1] for s in range(len(self.dims) - 1))

    def socle_head_mismatches(self) -> list[int]:
        """Steps s where dim soc Omega^{s+1} differs from dim hd Omega^s."""
        return [s for s in range(len(self.dims) - 1) if self.socles[s + 1] != self.heads[s]]

    def to_dict(self) -> dict:
        return {
            "dims": self.dims,
            "heads": self.heads,
            "socles": self.socles,
            "loewy_lengths": self.loewy,
            "term_dims": self.term_dims,
            "term_mults": self.term_mults,
            "truncated": self.truncated,
            "note": self.note,
            "exact_sequences_consistent": self.exactness_ok(),
            "socle_head_mismatch_steps": self.socle_head_mismatches(),
        }


def resolution_growth(t: TransportData, j: int, s_max: int, cap: int = DEFAULT_CAP) -> GrowthSequence:
    """Minimal resolution of Hom_A(Q_0, P_j) over E, recorded step by step."""
    if j in t.take:
        raise ValueError("target must lie outside I_0")
    a = t.algebra
    Pj = ProjectiveModule(a, [1 if k == j else 0 for k in range(len(a.idem))], name=f"P_{a.simples[j]}")
    M = hom_as_E_module(t, Pj, name=f"Hom(Q0,P_{a.simples[j]})")
    tr = minimal_resolution(M, s_max, cap)
    return GrowthSequence(
        dims=tr.column("dim"),
        heads=tr.column("head"),
        socles=tr.column("socle"),
        loewy=tr.column("loewy_length"),
        term_dims=tr.column("term_dim"),
        term_mults=[list(m) for m in tr.column("term_mults")],
        truncated=tr.truncated,
        note=tr.note,
        trace=tr,
    )


# ---------------------------------------------------------------------------
# Recurrences
# ---------------------------------------------------------------------------


@dataclass
class RecurrenceFit:
    order: int
    coefficients: list[Fraction]  # s_n = sum_k coefficients[k] s_{n-1-k}
    verified_range: tuple[int, int]
    root_bracket: tuple[Fraction, Fraction] | None  # lo < root <= hi

    @property
    def characteristic(self) -> list[Fraction]:
        """Monic characteristic polynomial, highest degree first."""
        return [Fraction(1)] + [-c for c in self.coefficients]

    def describe(self) -> str:
        if self.order == 0:
            return "zero sequence"
        parts = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            power = self.order - 1 - k
            mono = {0: "", 1: "x"}.get(power, f"x^{power}")
            mag = abs(c)
            body = mono if mag == 1 and mono else (f"{mag}{mono}" if mono else f"{mag}")
            parts.append(("-" if c < 0 else "+", body))
        rhs = " ".join(f"{sign} {body}" for sign, body in parts)
        rhs = rhs[2:] if rhs.startswith("+ ") else rhs.replace("- ", "-", 1)
        lhs = "x" if self.order == 1 else f"x^{self.order}"
        return f"{lhs} = {rhs or '0'}"

    def to_dict(self) -> dict:
        out = {
            "order": self.order,
            "coefficients": [str(c) for c in self.coefficients],
            "equation": self.describe(),
            "verified_range": list(self.verified_range),
            "dominant_root_bracket": None,
        }
        if self.root_bracket:
            lo, hi = self.root_bracket
            out["dominant_root_bracket"] = [str(lo), str(hi)]
            out["dominant_root_decimal"] = [_decimal(lo, 9), _decimal(hi, 9)]
        return out


def _decimal(x: Fraction, digits: int) -> str:
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole = x.numerator // x.denominator
    frac = (x - whole) * 10**digits
    return f"{sign}{whole}.{int(frac):0{digits}d}"


def berlekamp_massey(seq: list) -> list[Fraction]:
    """Connection polynomial [1, c_1, ..., c_L] with sum_k c_k s_{n-k} = 0, over the rationals."""
    s = [Fraction(x) for x in seq]
    C, B = [Fraction(1)], [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n] + sum(C[k] * s[n - k] for k in range(1, L + 1))
        if d == 0:
            m += 1
            continue
        coef = d / b
        T = list(C)
        C = C + [Fraction(0)] * max(0, len(B) + m - len(C))
        for k, bk in enumerate(B):
            C[k + m] -= coef * bk
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    return (C + [Fraction(0)] * (L + 1))[: L + 1]


def fit_recurrence(seq: list[int]) -> RecurrenceFit | None:
    """Minimal exact linear recurrence of order <= len/2 - 1, with a dominant-root bracket."""
    if len(seq) < 6:
        raise ValueError("need at least 6 terms")
    conn = berlekamp_massey(seq)
    L = len(conn) - 1
    if L > len(seq) / 2 - 1:
        return None
    coeffs = [-c for c in conn[1:]]
    for n in range(L, len(seq)):
        if sum(coeffs[k] * seq[n - 1 - k] for k in range(L)) != seq[n]:
            return None
    bracket = dominant_root([Fraction(1)] + [-c for c in coeffs]) if L else None
    return RecurrenceFit(L, coeffs, (0, len(seq) - 1), bracket)


def _poly_eval(p: list[Fraction], x: Fraction) -> Fraction:
    v = Fraction(0)
    for c in p:
        v = v * x + c
    return v


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and a:
        if a[0] == 0:
            a.pop(0)
            continue
        f = a[0] / b[0]
        for k in range(len(b)):
            a[k] -= f * b[k]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def _derivative(p):
    n = len(p) - 1
    return [c * (n - k) for k, c in enumerate(p[:-1])]


def _gcd(a, b):
    while b:
        a, b = b, _poly_rem(a, b)
    return [c / a[0] for c in a]


def _sturm(p):
    seq = [p, _derivative(p)]
    while True:
        r = _poly_rem(seq[-2], seq[-1])
        if not r:
            return seq
        seq.append([-c for c in r])


def _sign_changes(seq, x):
    vals = [v for v in (_poly_eval(p, x) for p in seq) if v != 0]
    return sum(1 for u, v in zip(vals, vals[1:]) if (u < 0) != (v < 0))


def dominant_root(p: list[Fraction]) -> tuple[Fraction, Fraction] | None:
    """Exact bracket (lo, hi] of the largest real root, width < ROOT_WIDTH."""
    if len(p) < 2:
        return None
    g = _gcd(p, _derivative(p)) if len(p) > 2 else [Fraction(1)]
    sq = p
    if len(g) > 1:  # strip repeated roots
        q, sq = list(p), []
        while len(q) >= len(g):
            f = q[0] / g[0]
            sq.append(f)
            for k in range(len(g)):
                q[k] -= f * g[k]
            q.pop(0)
    if len(sq) < 2:
        return None
    seq = _sturm(sq) if len(sq) > 2 else [sq, _derivative(sq)]
    bound = 1 + max(abs(c / sq[0]) for c in sq[1:])
    lo, hi = -bound, bound

    def count(x, y):  # distinct roots in (x, y]
        return _sign_changes(seq, x) - _sign_changes(seq, y)

    if count(lo, hi) == 0:
        return None
    while hi - lo >= ROOT_WIDTH:
        mid = (lo + hi) / 2
        if count(mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass
class Periodicity:
    s: int
    s2: int
    witness: np.ndarray

    def to_dict(self):
        return {"s": self.s, "s_prime": self.s2, "period": self.s2 - self.s, "witness": self.witness.tolist()}


def detect_periodicity(g: GrowthSequence) -> Periodicity | None:
    """First pair s < s' with Omega^s M isomorphic to Omega^s' M, confirmed by an explicit isomorphism."""
    mods = g.trace.syzygies if g.trace is not None else []
    for s2 in range(len(mods)):
        for s in range(s2):
            if g.dims[s] != g.dims[s2] or mods[s] is None or mods[s2] is None:
                continue
            res = is_isomorphic(mods[s].dense(), mods[s2].dense())
            if res.status == "YES":
                return Periodicity(s, s2, res.witness)
    return None


INAPPLICABLE, PERIODIC, GROWTH_OBSERVED, INCONCLUSIVE = "INAPPLICABLE", "PERIODIC", "GROWTH_OBSERVED", "INCONCLUSIVE"

GROWTH_CAVEAT = (
    "finite computation cannot prove the unboundedness hypothesis; "
    "the fitted recurrence is evidence, not a certificate"
)


@dataclass
class Verdict:
    kind: str
    reason: str
    growth: GrowthSequence | None = None
    periodicity: Periodicity | None = None
    fit: RecurrenceFit | None = None
    socle_fit: RecurrenceFit | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "reason": self.reason,
            "periodicity": self.periodicity.to_dict() if self.periodicity else None,
            "term_recurrence": self.fit.to_dict() if self.fit else None,
            "socle_recurrence": self.socle_fit.to_dict() if self.socle_fit else None,
            "growth": self.growth.to_dict() if self.growth else None,
            "notes": self.notes,
        }


def _strictly_increasing_tail(xs: list[int]) -> bool:
    tail = xs[-max(3, len(xs) // 2) :]
    return len(tail) >= 3 and all(u < v for u, v in zip(tail, tail[1:]))


def theorem_main_verdict(
    a: PartitionedAlgebra, take: list[int], j: int, s_max: int, cap: int = DEFAULT_CAP, transport=None
) -> Verdict:
    r = len(a.idem)
    take = sorted(set(take))
    if not take:
        return Verdict(INAPPLICABLE, "I_0 is empty")
    if len(take) == r:
        return Verdict(INAPPLICABLE, "I_0 = I: Q_0 is a progenerator and E is Morita equivalent to A")
    if j in take:
        return Verdict(INAPPLICABLE, f"target {a.simples[j]} lies in I_0")
    t = transport or endomorphism_algebra(a, take)
    g = resolution_growth(t, j, s_max, cap)
    notes = []
    if not g.exactness_ok():
        notes.append("exact-sequence dimension check failed")
    mism = g.socle_head_mismatches()
    notes.append(
        "dim soc Omega^{s+1} = dim hd Omega^s at every computed step"
        if not mism
        else f"dim soc Omega^(s+1) != dim hd Omega^s at steps {mism}"
    )
    if g.truncated:
        notes.append(f"resolution truncated: {g.note}")
    per = detect_periodicity(g)
    if per is not None:
        return Verdict(
            PERIODIC,
            f"Omega^{per.s} M is isomorphic to Omega^{per.s2} M (explicit isomorphism); term dimensions are bounded",
            g,
            per,
            notes=notes,
        )
    fit = fit_recurrence(g.term_dims) if len(g.term_dims) >= 6 else None
    socle_fit = fit_recurrence(g.socles) if len(g.socles) >= 6 else None
    if fit and fit.root_bracket and fit.root_bracket[0] >= 1 and _strictly_increasing_tail(g.term_dims):
        notes.append(GROWTH_CAVEAT)
        lo, hi = fit.root_bracket
        return Verdict(
            GROWTH_OBSERVED,
            f"term dimensions strictly increase and satisfy {fit.describe()} with dominant root in ({_decimal(lo, 6)}, {_decimal(hi, 6)}]",
            g,
            None,
            fit,
            socle_fit,
            notes,
        )
    if len(g.term_dims) < 6:
        notes.append("fewer than 6 resolution terms; no recurrence fitted")
    return Verdict(INCONCLUSIVE, f"no periodicity or fitted growth within s_max = {s_max}", g, None, fit, socle_fit, notes)


def check_claimed_recurrence(seq: list[int], claim: dict) -> tuple[bool, int | None]:
    """Does ``s_{n+d} = sum c_k s_{n+d-1-k} + constant`` hold?  Returns (holds, first failing index)."""
    coeffs = claim.get("coefficients", [])
    const = claim.get("constant", 0)
    init = claim.get("initial")
    d = len(coeffs)
    if init is not None and list(seq[: len(init)]) != list(init):
        return False, next(k for k, (u, v) in enumerate(zip(seq, init)) if u != v)
    for n in range(d, len(seq)):
        if sum(c * seq[n - 1 - k] for k, c in enumerate(coeffs)) + const != seq[n]:
            return False, n
    return True, None


# ---------------------------------------------------------------------------
# Cartan tables and the recurrence audit
# ---------------------------------------------------------------------------


def truncate(c: Complex, t: int) -> Complex:
    """The summand of T^(t) obtained from a T^(t') summand with t' >= t."""
    a = c.algebra
    (j,) = [k for k, m in enumerate(c.terms[-1]) if m]
    if not c.meta.get("resolution_mults"):
        out = stalk(a, j, -t)
        out.meta["resolution_mults"] = []
    else:
        keep = t + 1
        diffs = c.diffs[len(c.diffs) - t :] if t else []
        out = Complex(a, -t, c.terms[-keep:], diffs)
        out.meta["resolution_mults"] = c.meta["resolution_mults"][:t]
    out.name = f"T{t}_{a.simples[j]}"
    return out


@dataclass
class CartanTable:
    matrices: list[np.ndarray]
    determinants: list[int]
    symmetric: list[bool]
    block_stable: list[bool]

    def to_dict(self):
        return {
            "matrices": [m.tolist() for m in self.matrices],
            "determinants": self.determinants,
            "symmetric": self.symmetric,
            "I0_block_stable": self.block_stable,
        }


def _det(M: np.ndarray) -> int:
    """Exact integer determinant by fraction-free elimination."""
    A = [[Fraction(int(x)) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for k in range(c, n):
                A[r][k] -= f * A[c][k]
    return int(det)


def cartan_table(tilts: list[list[Complex]], take: list[int], base: np.ndarray) -> CartanTable:
    mats = [cartan_of_tilt(ts) for ts in tilts]
    idx = np.array(take)
    return CartanTable(
        mats,
        [_det(m) for m in mats],
        [bool(np.array_equal(m, m.T)) for m in mats],
        [bool(np.array_equal(m[np.ix_(idx, idx)], base[np.ix_(idx, idx)])) for m in mats],
    )


@dataclass
class AuditRow:
    t: int
    i: int
    j: int
    c_t: int
    c_next: int
    hom_dim: int

    @property
    def passed(self) -> bool:
        return self.c_t + self.c_next == self.hom_dim


@dataclass
class RecurrenceAudit:
    rows: list[AuditRow]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self, simples):
        return {
            "all_pass": self.all_pass,
            "rows": [
                {
                    "t": r.t,
                    "i": simples[r.i],
                    "j": simples[r.j],
                    "c_t": r.c_t,
                    "c_t_plus_1": r.c_next,
                    "dim_Hom_P_i_R_j": r.hom_dim,
                    "pass": r.passed,
                }
                for r in self.rows
            ],
        }


def build_tilts(a: PartitionedAlgebra, t: TransportData, t_max: int, cap: int = DEFAULT_CAP) -> list[list[Complex]]:
    """T^(0), ..., T^(t_max), built once at t_max and truncated."""
    top = or_tilting(a, t, t_max, cap)
    return [[truncate(c, s) for c in top] for s in range(t_max)] + [top]


def cartan_recurrence_audit(a: PartitionedAlgebra, t: TransportData, t_max: int, tilts=None, table=None) -> RecurrenceAudit:
    """c^(t)_ij + c^(t+1)_ij against dim Hom_A(P_i, R_j^(t)) for i in I_0, j outside, t < t_max."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    tilts = tilts or build_tilts(a, t, t_max)
    mats = table.matrices if table is not None else [cartan_of_tilt(ts) for ts in tilts]
    F, r = a.F, len(a.idem)
    rows = []
    for s in range(t_max):
        for j in range(r):
            if j in t.take:
                continue
            R = ProjectiveModule(a, tilts[t_max][j].meta["resolution_mults"][s])
            for i in t.take:
                # Hom_A(P_i, R) = R e_i, measured on the realised module
                dim = la.rank(F, R.act(None, a.idem[i]))
                rows.append(AuditRow(s, i, j, int(mats[s][i, j]), int(mats[s + 1][i, j]), dim))
    return RecurrenceAudit(rows)
