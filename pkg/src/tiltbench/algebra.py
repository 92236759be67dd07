"""Finite-dimensional basic algebras with a designated idempotent/radical basis.

An algebra is stored by dense structure constants ``mult[a, b, :]`` giving the
coordinates of ``b_a * b_b``.  The basis is partitioned into primitive
orthogonal idempotents (one per simple module) and a basis of the Jacobson
radical, so ``A/J`` is the split semisimple algebra ``k^I``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from . import linalg as la
from .linalg import Field

# Exhaustive search budget shared by symmetric-form and isomorphism searches.
EXHAUSTIVE_LIMIT = 10**6


class ValidationError(ValueError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class UnsupportedGroupError(ValueError):
    """Group algebra outside the normal-Sylow / abelian-quotient / split case."""


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int = 1
    modulus: tuple[int, ...] | None = None

    def build(self) -> Field:
        return la.field(self.p, self.e, self.modulus)

    def describe(self) -> str:
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}) mod {list(self.modulus or ())}"


class PartitionedAlgebra:
    """A validated basic algebra.  Construct through :func:`validate_algebra`."""

    def __init__(self, name, F, labels, one, idem, rad, mult, form=None, field_spec=None):
        self.name = name
        self.F = F
        self.labels = list(labels)
        self.one = np.asarray(one, dtype=np.int64)
        self.idem = list(idem)
        self.rad = list(rad)
        self.mult = np.asarray(mult, dtype=np.int64)
        self.form = None if form is None else np.asarray(form, dtype=np.int64)
        self.field_spec = field_spec or FieldSpec(F.p, F.e, F.modulus)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def simples(self) -> list[str]:
        """Labels of the simple modules (the idempotent basis labels)."""
        return [self.labels[i] for i in self.idem]

    def simple_index(self, label: str) -> int:
        try:
            return self.simples.index(label)
        except ValueError:
            raise KeyError(f"unknown simple {label!r}; known: {', '.join(self.simples)}") from None

    def __repr__(self):
        return f"PartitionedAlgebra({self.name!r}, dim={self.dim}, simples={self.simples}, {self.F!r})"

    # -- arithmetic -----------------------------------------------------------

    def unit(self, a: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[a] = 1
        return v

    def idempotent(self, i: int) -> np.ndarray:
        return self.unit(self.idem[i])

    def mul(self, x, y) -> np.ndarray:
        """Product of two elements given by coordinate vectors."""
        n = self.dim
        Lx = self.F.matmul(np.asarray(x)[None, :], self.mult.reshape(n, n * n)).reshape(n, n)
        return self.F.matmul(np.asarray(y)[None, :], Lx)[0]

    def right_action(self, b: int) -> np.ndarray:
        """Matrix of ``v -> v * b_b`` on the regular module."""
        return self.mult[:, b, :]

    def right_mult_matrix(self, x) -> np.ndarray:
        """Matrix of ``v -> v * x`` for an arbitrary element ``x``."""
        n = self.dim
        M = self.F.matmul(np.asarray(x)[None, :], self.mult.transpose(1, 0, 2).reshape(n, n * n))
        return M.reshape(n, n)

    def left_mult_matrix(self, x) -> np.ndarray:
        """Matrix of ``v -> x * v``."""
        n = self.dim
        return self.F.matmul(np.asarray(x)[None, :], self.mult.reshape(n, n * n)).reshape(n, n)

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.transpose(1, 0, 2)))

    def is_local(self) -> bool:
        return len(self.idem) == 1

    # -- radical --------------------------------------------------------------

    @cached_property
    def radical_powers(self) -> list[tuple[np.ndarray, list[int]]]:
        """Echelon bases of J, J^2, ... down to 0 (inclusive)."""
        F, n = self.F, self.dim
        J = np.eye(n, dtype=np.int64)[self.rad]
        powers = [la.row_basis(F, J)]
        while powers[-1][0].shape[0]:
            cur = powers[-1][0]
            blocks = [F.matmul(cur, self.right_action(r)) for r in self.rad]
            powers.append(la.span(F, blocks, n))
            if len(powers) > n + 1:
                raise ValidationError(["radical span is not nilpotent"])
        return powers

    @cached_property
    def rad_gens(self) -> list[int]:
        """Radical basis indices whose images span J/J^2."""
        F = self.F
        J2, piv2 = self.radical_powers[1]
        rows = np.eye(self.dim, dtype=np.int64)[self.rad]
        if piv2:
            rows = F.sub(rows, F.matmul(rows[:, piv2], J2))
        return [self.rad[k] for k in la.independent_rows(F, rows)]


@dataclass
class RawAlgebra:
    """Parsed but unvalidated algebra data (format A or builder output)."""

    name: str
    field: FieldSpec
    labels: list[str]
    one: list[int]
    idempotents: list[str]
    radical: list[str]
    products: dict[tuple[str, str], dict[str, int]] = dc_field(default_factory=dict)


def check_algebra(F: Field, labels, one, idem, rad, mult) -> list[str]:
    """Every violated axiom, each with a witness."""
    diags: list[str] = []
    n = len(labels)
    one = np.asarray(one, dtype=np.int64)
    mult = np.asarray(mult, dtype=np.int64)
    if sorted(list(idem) + list(rad)) != list(range(n)):
        diags.append("idempotent and radical labels must partition the basis")
        return diags
    if not idem:
        diags.append("no idempotents given")
        return diags

    left = F.matmul(mult.reshape(n * n, n), mult.reshape(n, n * n)).reshape(n, n, n, n)
    right = F.matmul(mult.reshape(n * n, n), mult.transpose(1, 0, 2).reshape(n, n * n))
    right = right.reshape(n, n, n, n).transpose(2, 0, 1, 3)
    bad = np.argwhere(np.any(left != right, axis=3))
    if bad.size:
        a, b, c = (labels[k] for k in bad[0])
        diags.append(f"non-associative triple ({a}, {b}, {c}): ({a}*{b})*{c} != {a}*({b}*{c})")

    lo = F.matmul(one[None, :], mult.reshape(n, n * n)).reshape(n, n)
    ro = F.matmul(one[None, :], mult.transpose(1, 0, 2).reshape(n, n * n)).reshape(n, n)
    eye = np.eye(n, dtype=np.int64)
    for name, M in (("left", lo), ("right", ro)):
        rows = np.nonzero(np.any(M != eye, axis=1))[0]
        if rows.size:
            diags.append(f"ONE is not a {name} unit: fails on {labels[rows[0]]}")

    for x in idem:
        for y in idem:
            expect = eye[x] if x == y else np.zeros(n, dtype=np.int64)
            if not np.array_equal(mult[x, y], expect):
                if x == y:
                    diags.append(f"idempotent {labels[x]} is not idempotent")
                else:
                    diags.append(f"idempotents not orthogonal: {labels[x]}*{labels[y]} != 0")
    total = np.zeros(n, dtype=np.int64)
    total[list(idem)] = 1
    if not np.array_equal(total, one):
        diags.append("idempotents do not sum to ONE")

    rad_mask = np.zeros(n, dtype=bool)
    rad_mask[list(rad)] = True
    escapes = np.argwhere(np.any(mult[:, :, ~rad_mask] != 0, axis=2) & (rad_mask[:, None] | rad_mask[None, :]))
    if escapes.size:
        x, y = escapes[0]
        diags.append(f"radical span is not an ideal: {labels[x]}*{labels[y]} leaves it")

    if not any(d.startswith("radical span is not an ideal") for d in diags):
        cur, _ = la.row_basis(F, eye[list(rad)])
        steps = 0
        while cur.shape[0] and steps <= n:
            cur, _ = la.span(F, [F.matmul(cur, mult[:, r, :]) for r in rad], n)
            steps += 1
        if cur.shape[0]:
            diags.append("radical span is not nilpotent")

    for i in idem:
        for j in idem:
            for b in range(n):
                v = F.matmul(F.matmul(eye[i][None, :], _right(F, mult, b)), _right(F, mult, j))[0]
                off = v[list(idem)]
                if i != j and np.any(off):
                    diags.append(
                        f"quotient not split basic: {labels[i]}*{labels[b]}*{labels[j]} has idempotent part"
                    )
                    break
                if i == j:
                    others = [k for k, x in enumerate(idem) if x != i]
                    if np.any(off[others]):
                        diags.append(
                            f"quotient not split basic: {labels[i]}*{labels[b]}*{labels[i]} not in span({labels[i]}) + J"
                        )
                        break
    return diags


def _right(F, mult, b):
    return mult[:, b, :]


def validate_algebra(raw: RawAlgebra) -> PartitionedAlgebra:
    """Build and check an algebra; raises :class:`ValidationError` listing every violation."""
    F = raw.field.build()
    labels = list(raw.labels)
    diags = []
    if len(set(labels)) != len(labels):
        diags.append("duplicate basis labels")
    index = {lab: k for k, lab in enumerate(labels)}
    n = len(labels)
    if len(raw.one) != n:
        diags.append(f"ONE has {len(raw.one)} entries, expected {n}")
    unknown = [x for x in list(raw.idempotents) + list(raw.radical) if x not in index]
    if unknown:
        diags.append(f"unknown labels: {', '.join(unknown)}")
    mult = np.zeros((n, n, n), dtype=np.int64)
    for (a, b), terms in raw.products.items():
        for lab in (a, b, *terms):
            if lab not in index:
                diags.append(f"unknown label {lab!r} in MULT")
                break
        else:
            for lab, c in terms.items():
                mult[index[a], index[b], index[lab]] = F.add(mult[index[a], index[b], index[lab]], c)
    if diags:
        raise ValidationError(diags)
    idem = [index[x] for x in raw.idempotents]
    rad = [index[x] for x in raw.radical]
    diags = check_algebra(F, labels, raw.one, idem, rad, mult)
    if diags:
        raise ValidationError(diags)
    return PartitionedAlgebra(raw.name, F, labels, raw.one, idem, rad, mult, field_spec=raw.field)


def make_algebra(name, F, labels, one, idem, rad, mult, form=None, field_spec=None) -> PartitionedAlgebra:
    diags = check_algebra(F, labels, one, idem, rad, mult)
    if diags:
        raise ValidationError(diags)
    return PartitionedAlgebra(name, F, labels, one, idem, rad, mult, form=form, field_spec=field_spec)


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def radical_layers(a: PartitionedAlgebra) -> list[int]:
    """Dimensions of J^s / J^{s+1}, starting from A/J."""
    dims = [a.dim] + [basis.shape[0] for basis, _ in a.radical_powers]
    return [dims[s] - dims[s + 1] for s in range(len(dims) - 1)]


def corner_dim(a: PartitionedAlgebra, j: int, i: int) -> int:
    """dim e_j A e_i, which is dim Hom(P_i, P_j)."""
    F = a.F
    ej, ei = a.idempotent(j), a.idempotent(i)
    space = F.matmul(a.left_mult_matrix(ej), a.right_mult_matrix(ei))
    return la.rank(F, space)


def cartan_matrix(a: PartitionedAlgebra) -> np.ndarray:
    """c[i, j] = dim Hom(P_i, P_j), cross-checked against composition counts."""
    r = len(a.idem)
    C = np.array([[corner_dim(a, j, i) for j in range(r)] for i in range(r)], dtype=np.int64)
    counts = composition_counts(a)
    if not np.array_equal(C, counts):
        raise AssertionError(f"Cartan matrix {C.tolist()} disagrees with layer counts {counts.tolist()}")
    return C


def composition_counts(a: PartitionedAlgebra) -> np.ndarray:
    """[P_j : S_i] summed over the radical layers of P_j = e_j A."""
    F, n = a.F, a.dim
    r = len(a.idem)
    out = np.zeros((r, r), dtype=np.int64)
    for j in range(r):
        ej = a.idempotent(j)
        layer = la.row_basis(F, a.left_mult_matrix(ej))[0]
        while layer.shape[0]:
            nxt = la.span(F, [F.matmul(layer, a.right_action(g)) for g in a.rad], n)[0]
            for i in range(r):
                ei = a.right_mult_matrix(a.idempotent(i))
                out[i, j] += la.rank(F, F.matmul(layer, ei)) - la.rank(F, F.matmul(nxt, ei))
            layer = nxt
    return out


# ---------------------------------------------------------------------------
# Symmetrizing forms
# ---------------------------------------------------------------------------


@dataclass
class FormSearch:
    form: np.ndarray | None
    method: str
    points_tried: int

    @property
    def found(self) -> bool:
        return self.form is not None

    def status(self) -> str:
        if self.found:
            return "verified symmetric"
        return "not verified symmetric (search is one-sided; absence is not a proof)"


def gram_matrix(a: PartitionedAlgebra, form) -> np.ndarray:
    n = a.dim
    return a.F.matmul(a.mult.reshape(n * n, n), np.asarray(form)[:, None]).reshape(n, n)


def is_symmetrizing(a: PartitionedAlgebra, form) -> bool:
    G = gram_matrix(a, form)
    return bool(np.array_equal(G, G.T)) and la.rank(a.F, G) == a.dim


def find_symmetrizing_form(a: PartitionedAlgebra, seed: int = 0) -> FormSearch:
    """Search for a nondegenerate trace form; a miss is not a non-symmetry proof."""
    F, n = a.F, a.dim
    if a.form is not None and is_symmetrizing(a, a.form):
        return FormSearch(a.form.copy(), "attached", 1)
    # constraints lambda(b_a b_b - b_b b_a) = 0
    comm = F.sub(a.mult, a.mult.transpose(1, 0, 2)).reshape(n * n, n)
    sol = la.kernel_basis(F, comm, side="right")
    d = sol.shape[0]
    if d == 0:
        return FormSearch(None, "no trace-like functional", 0)
    grams = np.stack([gram_matrix(a, s) for s in sol])
    total = F.q**d
    tried = 0

    def scan(coeffs):
        nonlocal tried
        tried += coeffs.shape[0]
        batch = la.combine(F, coeffs, grams)
        ranks = la.batch_rank(F, batch)
        hit = np.nonzero(ranks == n)[0]
        if hit.size:
            return F.matmul(coeffs[hit[0]][None, :], sol)[0]
        return None

    if total <= EXHAUSTIVE_LIMIT:
        chunk = 4096
        for start in range(1, total, chunk):
            form = scan(la.enumerate_coefficients(F.q, d, start, min(chunk, total - start)))
            if form is not None:
                return FormSearch(form, "exhaustive", tried)
        return FormSearch(None, "exhaustive", tried)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        form = scan(F.random(rng, (100, d)))
        if form is not None:
            return FormSearch(form, "sampled", tried)
    return FormSearch(None, "sampled", tried)


# ---------------------------------------------------------------------------
# Group algebras
# ---------------------------------------------------------------------------


@dataclass
class GroupTable:
    name: str
    labels: list[str]
    table: np.ndarray  # table[i, j] = index of g_i g_j
    identity: int = 0

    @property
    def order(self) -> int:
        return len(self.labels)

    def check(self) -> list[str]:
        T = np.asarray(self.table)
        n = self.order
        diags = []
        if T.shape != (n, n):
            return [f"table has shape {T.shape}, expected ({n}, {n})"]
        if T.min() < 0 or T.max() >= n:
            return ["table entries out of range"]
        full = np.arange(n)
        for k in range(n):
            if not np.array_equal(np.sort(T[k]), full):
                diags.append(f"not a Latin square: row {self.labels[k]}")
                break
            if not np.array_equal(np.sort(T[:, k]), full):
                diags.append(f"not a Latin square: column {self.labels[k]}")
                break
        e = self.identity
        if not (np.array_equal(T[e], full) and np.array_equal(T[:, e], full)):
            diags.append(f"{self.labels[e]} is not an identity")
        lhs = T[T[:, :, None], full[None, None, :]]  # (ab)c
        rhs = T[full[:, None, None], T[None, :, :]]  # a(bc)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            a, b, c = (self.labels[k] for k in bad[0])
            diags.append(f"non-associative triple ({a}, {b}, {c})")
        return diags

    def inverse(self, g: int) -> int:
        return int(np.nonzero(self.table[g] == self.identity)[0][0])

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x, g]
            k += 1
        return k


def _min_poly(F: Field, M: np.ndarray) -> list[int]:
    """Monic minimal polynomial of a square matrix, low degree first."""
    n = M.shape[0]
    powers = [np.eye(n, dtype=np.int64).ravel()]
    cur = np.eye(n, dtype=np.int64)
    while True:
        cur = F.matmul(cur, M)
        stack = np.stack(powers)
        sol = la.solve(F, stack, cur.ravel())
        if sol is not None:
            return [int(x) for x in F.neg(sol)] + [1]
        powers.append(cur.ravel())


def _poly_roots(F: Field, coeffs: list[int]) -> list[int]:
    xs = F.elements()
    val = np.zeros_like(xs)
    for c in reversed(coeffs):
        val = F.add(F.mul(val, xs), c)
    return [int(x) for x in xs[val == 0]]


def _format_poly(F: Field, coeffs: list[int]) -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if c == 1 and k:
            terms.append(mono)
        else:
            terms.append(f"{c}{'*' + mono if mono else ''}")
    return " + ".join(terms) or "0"


def build_group_algebra(g: GroupTable, spec: FieldSpec, simple_labels: list[str] | None = None) -> PartitionedAlgebra:
    """kG in a partitioned basis, for G with a normal Sylow p-subgroup and abelian p'-quotient."""
    diags = g.check()
    if diags:
        raise ValidationError(diags)
    F = spec.build()
    p, n, T = F.p, g.order, np.asarray(g.table)

    def is_p_power(k):
        while k % p == 0:
            k //= p
        return k == 1

    P = [x for x in range(n) if is_p_power(g.element_order(x))]
    pset = set(P)
    sylow = 1
    m = n
    while m % p == 0:
        m //= p
        sylow *= p
    if len(P) != sylow or any(T[x, y] not in pset for x in P for y in P):
        raise UnsupportedGroupError("unsupported group, supply partitioned form (p-elements do not form a normal Sylow subgroup)")
    inv = [g.inverse(x) for x in range(n)]
    if any(T[T[h, x], inv[h]] not in pset for h in range(n) for x in P):
        raise UnsupportedGroupError("unsupported group, supply partitioned form (Sylow p-subgroup not normal)")

    # cosets of P, represented by their first element
    coset_of = [-1] * n
    reps: list[int] = []
    for x in range(n):
        if coset_of[x] < 0:
            for y in P:
                coset_of[T[x, y]] = len(reps)
            reps.append(x)
    m = len(reps)
    qtab = np.array([[coset_of[T[reps[a], reps[b]]] for b in range(m)] for a in range(m)])
    if not np.array_equal(qtab, qtab.T):
        raise UnsupportedGroupError("unsupported group, supply partitioned form (quotient by Sylow subgroup is not abelian)")

    # regular representation of the commutative quotient algebra k[G/P]
    ops = []
    for c in range(m):
        M = np.zeros((m, m), dtype=np.int64)
        M[np.arange(m), qtab[:, c]] = 1
        ops.append(M)
    roots_of = []
    for c, M in enumerate(ops):
        mp = _min_poly(F, M)
        roots = _poly_roots(F, mp)
        if len(roots) != len(mp) - 1:
            raise UnsupportedGroupError(
                f"extend field: minimal polynomial {_format_poly(F, mp)} of the coset {g.labels[reps[c]]}P "
                f"does not split into distinct linear factors over {spec.describe()}"
            )
        roots_of.append(roots)

    spaces = [np.eye(m, dtype=np.int64)]
    for M, roots in zip(ops, roots_of):
        refined = []
        for S in spaces:
            for lam in roots:
                shifted = F.sub(F.matmul(S, M), F.mul(lam, S))
                ker = la.kernel_basis(F, shifted, side="left")
                if ker.shape[0]:
                    refined.append(la.row_basis(F, F.matmul(ker, S))[0])
        spaces = refined
    if any(S.shape[0] != 1 for S in spaces) or len(spaces) != m:
        raise UnsupportedGroupError("extend field: quotient algebra did not split into characters")

    # v*v = c v for a common eigenvector; v/c is the primitive idempotent
    qmult = np.zeros((m, m, m), dtype=np.int64)
    qmult[np.arange(m)[:, None], np.arange(m)[None, :], qtab] = 1
    idems_q = []
    for S in spaces:
        v = S[0]
        vv = F.matmul(v[None, :], F.matmul(v[None, :], qmult.reshape(m, m * m)).reshape(m, m))[0]
        k = int(np.nonzero(v)[0][0])
        c = F.div(vv[k], v[k])
        idems_q.append(F.mul(v, F.inv(c)))
    trivial = [k for k, e in enumerate(idems_q) if np.all(e == e[0])]
    # characters ordered: trivial first, then by eigenvalue signature
    signature = [tuple(int(x) for x in F.mul(e, F.inv(e[0]))) for e in idems_q]
    order = sorted(range(m), key=lambda k: (k not in trivial, signature[k]))
    idems_q = [idems_q[k] for k in order]

    gm = np.zeros((n, n, n), dtype=np.int64)
    gm[np.arange(n)[:, None], np.arange(n)[None, :], T] = 1

    def gmul(x, y):
        Lx = F.matmul(np.asarray(x)[None, :], gm.reshape(n, n * n)).reshape(n, n)
        return F.matmul(np.asarray(y)[None, :], Lx)[0]

    def lift(x):
        for _ in range(n + 1):
            x2 = gmul(x, x)
            if np.array_equal(x2, x):
                return x
            x3 = gmul(x2, x)
            x = F.sub(F.mul(3 % p, x2), F.mul(2 % p, x3))
        raise AssertionError("idempotent lifting did not converge")

    one = np.zeros(n, dtype=np.int64)
    one[g.identity] = 1
    lifted = []
    f = np.zeros(n, dtype=np.int64)
    for k, eq in enumerate(idems_q):
        if k == m - 1:
            lifted.append(F.sub(one, f))
            break
        pre = np.zeros(n, dtype=np.int64)
        for c in range(m):
            pre[reps[c]] = eq[c]
        comp = F.sub(one, f)
        x = lift(gmul(gmul(comp, pre), comp))
        lifted.append(x)
        f = F.add(f, x)

    # radical: augmentation ideal of kP times kG
    gens = []
    for x in P:
        if x == g.identity:
            continue
        for y in range(n):
            v = np.zeros(n, dtype=np.int64)
            v[T[x, y]] = F.add(v[T[x, y]], 1)
            v[y] = F.sub(v[y], 1)
            gens.append(v)
    J = la.row_basis(F, np.array(gens, dtype=np.int64))[0] if gens else np.zeros((0, n), dtype=np.int64)
    if J.shape[0] != n - m:
        raise AssertionError("radical of kG has unexpected dimension")

    S = np.concatenate([np.array(lifted), J], axis=0)
    Sinv = la.solve(F, S, np.eye(n, dtype=np.int64))
    # structure constants in the new basis: (u_a u_b) S^{-1}
    prod = np.zeros((n, n, n), dtype=np.int64)
    for a_ in range(n):
        La = F.matmul(S[a_][None, :], gm.reshape(n, n * n)).reshape(n, n)
        prod[a_] = F.matmul(F.matmul(S, La), Sinv)
    new_one = F.matmul(one[None, :], Sinv)[0]
    form = S[:, g.identity].copy()

    if simple_labels is None:
        simple_labels = ["k", "eps"] if m == 2 else ["k"] + [f"s{k}" for k in range(1, m)]
    labels = list(simple_labels) + [f"r{k}" for k in range(1, n - m + 1)]
    alg = make_algebra(g.name, F, labels, new_one, list(range(m)), list(range(m, n)), prod, form=form, field_spec=spec)
    alg.group_basis = S
    return alg
