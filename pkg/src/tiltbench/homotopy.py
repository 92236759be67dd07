"""Bounded complexes of projectives and their hom spaces in K^b(proj A).

A :class:`ProjMap` between formal sums ``X = sum P_i^{m_i}`` and
``Y = sum P_j^{n_j}`` stores, for each pair ``(i, j)``, an array of shape
``(m_i, n_j, c_ij)`` holding coordinates in the corner basis of
Hom(P_i, P_j).  Composition uses precomputed structure constants; every map
can also be realised as a matrix between the corresponding projective
modules, which the tests use as an independent check.

Degrees are cohomological: the differential raises degree and ``X[n]`` has
``X[n]^d = X^{d+n}`` with differential ``(-1)^n d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .algebra import PartitionedAlgebra, find_symmetrizing_form
from .endo import TransportData, composition_constants
from .modules import (
    DEFAULT_CAP,
    ProjectiveModule,
    SubModule,
    corner_basis,
    cover_matrix,
    head_generators,
    projective_data,
    realize_hom,
    trace_rows,
)


class CapExceeded(RuntimeError):
    pass


ProjSum = tuple  # multiplicities, one per simple


def proj_dim(a: PartitionedAlgebra, X: ProjSum) -> int:
    return sum(m * P.dim for m, P in zip(X, projective_data(a)))


def hom_dim(a: PartitionedAlgebra, X: ProjSum, Y: ProjSum) -> int:
    """dim Hom_A(X, Y) = sum m_i n_j c_ij."""
    r = len(a.idem)
    return sum(X[i] * Y[j] * corner_basis(a, i, j)[0].shape[0] for i in range(r) for j in range(r))


def _cdim(a, i, j) -> int:
    return corner_basis(a, i, j)[0].shape[0]


@dataclass
class ProjMap:
    algebra: PartitionedAlgebra
    source: ProjSum
    target: ProjSum
    blocks: dict = field(default_factory=dict)

    def __post_init__(self):
        a = self.algebra
        self.source, self.target = tuple(self.source), tuple(self.target)
        r = len(a.idem)
        for i in range(r):
            for j in range(r):
                shape = (self.source[i], self.target[j], _cdim(a, i, j))
                if (i, j) not in self.blocks:
                    self.blocks[(i, j)] = np.zeros(shape, dtype=np.int64)
                elif self.blocks[(i, j)].shape != shape:
                    raise ValueError(f"block {(i, j)} has shape {self.blocks[(i, j)].shape}, expected {shape}")

    @classmethod
    def zero(cls, a, X, Y):
        return cls(a, X, Y)

    @classmethod
    def from_vector(cls, a, X, Y, v):
        blocks, off = {}, 0
        for (i, j), shape in _layout(a, X, Y):
            size = int(np.prod(shape))
            blocks[(i, j)] = np.asarray(v[off : off + size], dtype=np.int64).reshape(shape)
            off += size
        return cls(a, X, Y, blocks)

    def vector(self) -> np.ndarray:
        parts = [self.blocks[key].ravel() for key, _ in _layout(self.algebra, self.source, self.target)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def is_zero(self) -> bool:
        return not any(b.any() for b in self.blocks.values())

    def then(self, g: "ProjMap") -> "ProjMap":
        """The composite g o self (self applied first)."""
        a, F = self.algebra, self.algebra.F
        if self.target != g.source:
            raise ValueError("composition of incompatible maps")
        comp = composition_constants(a)
        r = len(a.idem)
        out = {}
        for i in range(r):
            for k in range(r):
                acc = np.zeros((self.source[i], g.target[k], _cdim(a, i, k)), dtype=np.int64)
                for j in range(r):
                    f, h = self.blocks[(i, j)], g.blocks[(j, k)]
                    if f.size == 0 or h.size == 0 or acc.size == 0:
                        continue
                    # T[b, v, c, w] = sum_u h[b, c, u] C[u, v, w]
                    C = comp[(i, j, k)]
                    nj, ok, cjk = h.shape
                    cij, cik = C.shape[1], C.shape[2]
                    T = F.matmul(h.reshape(nj * ok, cjk), C.reshape(cjk, cij * cik)).reshape(nj, ok, cij, cik)
                    T = T.transpose(0, 2, 1, 3).reshape(nj * cij, ok * cik)
                    acc = F.add(acc, F.matmul(f.reshape(f.shape[0], nj * cij), T).reshape(acc.shape))
                out[(i, k)] = acc
        return ProjMap(a, self.source, g.target, out)

    def __add__(self, other):
        F = self.algebra.F
        return ProjMap(self.algebra, self.source, self.target, {k: F.add(v, other.blocks[k]) for k, v in self.blocks.items()})

    def scale(self, c: int) -> "ProjMap":
        F = self.algebra.F
        return ProjMap(self.algebra, self.source, self.target, {k: F.mul(c, v) for k, v in self.blocks.items()})

    def realize(self) -> np.ndarray:
        """Matrix from the realised source projective to the realised target (row vectors)."""
        a, F = self.algebra, self.algebra.F
        data = projective_data(a)
        X, Y = ProjectiveModule(a, self.source), ProjectiveModule(a, self.target)
        out = np.zeros((X.dim, Y.dim), dtype=np.int64)
        for i, xo, m, di in X.groups:
            for j, yo, n, dj in Y.groups:
                blk = self.blocks[(i, j)]
                if blk.size == 0:
                    continue
                R = _realized_basis(a, i, j)
                c = R.shape[0]
                W = F.matmul(blk.reshape(m * n, c), R.reshape(c, di * dj)).reshape(m, n, di, dj)
                out[xo : xo + m * di, yo : yo + n * dj] = W.transpose(0, 2, 1, 3).reshape(m * di, n * dj)
        return out


def _realized_basis(a, i, j) -> np.ndarray:
    cache = a.__dict__.setdefault("_realized_corner", {})
    if (i, j) not in cache:
        B, _ = corner_basis(a, i, j)
        d_i, d_j = projective_data(a)[i].dim, projective_data(a)[j].dim
        cache[(i, j)] = np.stack([realize_hom(a, i, j, y) for y in B]) if B.shape[0] else np.zeros((0, d_i, d_j), np.int64)
    return cache[(i, j)]


def _layout(a, X, Y):
    r = len(a.idem)
    return [((i, j), (X[i], Y[j], _cdim(a, i, j))) for i in range(r) for j in range(r)]


def postcompose_matrix(a, X, Y, Z, g: ProjMap) -> np.ndarray:
    """Matrix of f -> g o f from Hom(X, Y) to Hom(X, Z) on coefficient vectors."""
    F, r = a.F, len(a.idem)
    comp = composition_constants(a)
    src, tgt = _offsets(a, X, Y), _offsets(a, X, Z)
    M = np.zeros((src[1], tgt[1]), dtype=np.int64)
    for i in range(r):
        if X[i] == 0:
            continue
        for j in range(r):
            for k in range(r):
                h = g.blocks[(j, k)]
                C = comp[(i, j, k)]
                if h.size == 0 or C.size == 0:
                    continue
                nj, ok, cjk = h.shape
                cij, cik = C.shape[1], C.shape[2]
                T = F.matmul(h.reshape(nj * ok, cjk), C.reshape(cjk, cij * cik)).reshape(nj, ok, cij, cik)
                T = T.transpose(0, 2, 1, 3).reshape(nj * cij, ok * cik)
                blk = np.kron(np.eye(X[i], dtype=np.int64), T)
                r0, c0 = src[0][(i, j)], tgt[0][(i, k)]
                sub = M[r0 : r0 + blk.shape[0], c0 : c0 + blk.shape[1]]
                M[r0 : r0 + blk.shape[0], c0 : c0 + blk.shape[1]] = F.add(sub, blk)
    return M


def precompose_matrix(a, W, X, Y, h: ProjMap) -> np.ndarray:
    """Matrix of f -> f o h from Hom(X, Y) to Hom(W, Y) on coefficient vectors."""
    F, r = a.F, len(a.idem)
    comp = composition_constants(a)
    src, tgt = _offsets(a, X, Y), _offsets(a, W, Y)
    M = np.zeros((src[1], tgt[1]), dtype=np.int64)
    for j in range(r):
        if Y[j] == 0:
            continue
        eye = np.eye(Y[j], dtype=np.int64)
        for i in range(r):
            for l in range(r):
                hb = h.blocks[(l, i)]
                C = comp[(l, i, j)]
                if hb.size == 0 or C.size == 0:
                    continue
                pl, mi, cli = hb.shape
                cij, clj = C.shape[0], C.shape[2]
                # S[b, u, a, w] = sum_v h[a, b, v] C[u, v, w]
                S = F.matmul(hb.transpose(1, 0, 2).reshape(mi * pl, cli), C.transpose(1, 0, 2).reshape(cli, cij * clj))
                S = S.reshape(mi, pl, cij, clj).transpose(0, 2, 1, 3)
                blk = np.einsum("buaw,cd->bcuadw", S, eye).reshape(mi * Y[j] * cij, pl * Y[j] * clj)
                r0, c0 = src[0][(i, j)], tgt[0][(l, j)]
                sub = M[r0 : r0 + blk.shape[0], c0 : c0 + blk.shape[1]]
                M[r0 : r0 + blk.shape[0], c0 : c0 + blk.shape[1]] = F.add(sub, blk)
    return M


def _offsets(a, X, Y):
    offs, off = {}, 0
    for key, shape in _layout(a, X, Y):
        offs[key] = off
        off += int(np.prod(shape))
    return offs, off


# ---------------------------------------------------------------------------
# Complexes
# ---------------------------------------------------------------------------


@dataclass
class Complex:
    algebra: PartitionedAlgebra
    bottom: int
    terms: list  # ProjSums for degrees bottom, bottom+1, ...
    diffs: list  # diffs[k]: terms[k] -> terms[k+1]
    name: str = "X"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = [tuple(t) for t in self.terms]
        if len(self.diffs) != max(len(self.terms) - 1, 0):
            raise ValueError("need one differential between consecutive terms")

    @property
    def top(self) -> int:
        return self.bottom + len(self.terms) - 1

    @property
    def zero_sum(self) -> ProjSum:
        return (0,) * len(self.algebra.idem)

    def term(self, d: int) -> ProjSum:
        k = d - self.bottom
        return self.terms[k] if 0 <= k < len(self.terms) else self.zero_sum

    def diff(self, d: int) -> ProjMap:
        k = d - self.bottom
        if 0 <= k < len(self.diffs):
            return self.diffs[k]
        return ProjMap.zero(self.algebra, self.term(d), self.term(d + 1))

    def degrees(self) -> range:
        return range(self.bottom, self.top + 1)

    def is_zero(self) -> bool:
        return all(sum(t) == 0 for t in self.terms)

    def shift(self, n: int) -> "Complex":
        if n == 0:
            return self
        sign = 1 if n % 2 == 0 else self.algebra.F.neg(1)
        diffs = [d.scale(int(sign)) for d in self.diffs]
        return Complex(self.algebra, self.bottom - n, list(self.terms), diffs, f"{self.name}[{n}]", dict(self.meta))

    def check_d2(self) -> list[int]:
        """Degrees d where d^{d+1} o d^d is nonzero."""
        return [d for d in range(self.bottom, self.top - 1) if not self.diff(d).then(self.diff(d + 1)).is_zero()]

    def describe(self) -> str:
        simples = self.algebra.simples
        parts = []
        for d in self.degrees():
            t = self.term(d)
            s = " + ".join(f"P_{simples[i]}" + (f"^{m}" if m > 1 else "") for i, m in enumerate(t) if m) or "0"
            parts.append(f"{s} @{d}")
        return " -> ".join(parts)


def stalk(a: PartitionedAlgebra, i: int, degree: int = 0, mult: int = 1) -> Complex:
    t = tuple(mult if k == i else 0 for k in range(len(a.idem)))
    return Complex(a, degree, [t], [], name=f"P_{a.simples[i]}[{-degree}]")


def zero_complex(a: PartitionedAlgebra) -> Complex:
    return Complex(a, 0, [(0,) * len(a.idem)], [], name="0")


# ---------------------------------------------------------------------------
# Hom complexes
# ---------------------------------------------------------------------------


def _hom_terms(x: Complex, y: Complex, n: int):
    return [d for d in x.degrees() if y.bottom <= d + n <= y.top]


def hom_cochain_dim(x: Complex, y: Complex, n: int) -> int:
    a = x.algebra
    return sum(hom_dim(a, x.term(d), y.term(d + n)) for d in _hom_terms(x, y, n))


def differential_matrix(x: Complex, y: Complex, n: int) -> np.ndarray:
    """delta: Hom^n(x, y) -> Hom^{n+1}(x, y), delta f = d_y f - (-1)^n f d_x."""
    a, F = x.algebra, x.algebra.F
    src = {}
    off = 0
    for d in _hom_terms(x, y, n):
        src[d] = off
        off += hom_dim(a, x.term(d), y.term(d + n))
    tgt = {}
    off2 = 0
    for d in _hom_terms(x, y, n + 1):
        tgt[d] = off2
        off2 += hom_dim(a, x.term(d), y.term(d + n + 1))
    M = np.zeros((off, off2), dtype=np.int64)
    minus_sign = 1 if n % 2 else F.neg(1)  # -(-1)^n
    for d, r0 in src.items():
        X, Y = x.term(d), y.term(d + n)
        rows = hom_dim(a, X, Y)
        if rows == 0:
            continue
        if d in tgt:
            P = postcompose_matrix(a, X, Y, y.term(d + n + 1), y.diff(d + n))
            c0 = tgt[d]
            M[r0 : r0 + rows, c0 : c0 + P.shape[1]] = F.add(M[r0 : r0 + rows, c0 : c0 + P.shape[1]], P)
        if d - 1 in tgt:
            Q = precompose_matrix(a, x.term(d - 1), X, Y, x.diff(d - 1))
            Q = F.mul(int(minus_sign), Q)
            c0 = tgt[d - 1]
            M[r0 : r0 + rows, c0 : c0 + Q.shape[1]] = F.add(M[r0 : r0 + rows, c0 : c0 + Q.shape[1]], Q)
    return M


def _realized_differential_rank(x: Complex, y: Complex, n: int) -> int:
    """rank of delta^n computed from realised matrices of each basis cochain."""
    a, F = x.algebra, x.algebra.F
    degs = _hom_terms(x, y, n)
    dims = [hom_dim(a, x.term(d), y.term(d + n)) for d in degs]
    total = sum(dims)
    if total == 0:
        return 0
    rows = []
    sign = 1 if n % 2 else F.neg(1)
    for d, size in zip(degs, dims):
        for k in range(size):
            v = np.zeros(size, dtype=np.int64)
            v[k] = 1
            f = ProjMap.from_vector(a, x.term(d), y.term(d + n), v).realize()
            parts = []
            for e in _hom_terms(x, y, n + 1):
                # component X^e -> Y^{e+n+1}
                shape = (proj_dim(a, x.term(e)), proj_dim(a, y.term(e + n + 1)))
                acc = np.zeros(shape, dtype=np.int64)
                if e == d:
                    acc = F.add(acc, F.matmul(f, y.diff(e + n).realize()))
                if e == d - 1:
                    acc = F.add(acc, F.mul(int(sign), F.matmul(x.diff(e).realize(), f)))
                parts.append(acc.ravel())
            rows.append(np.concatenate(parts) if parts else np.zeros(0, np.int64))
    R = np.array(rows, dtype=np.int64)
    return la.rank(F, R) if R.size else 0


@dataclass
class HomDims:
    chain_maps: int
    null_homotopic: int
    hom: int


def hom_complex_dims(x: Complex, y: Complex, n: int, method: str = "coefficients") -> HomDims:
    """(chain maps x -> y[n], null-homotopic ones, dim Hom_K(x, y[n]))."""
    if x.algebra is not y.algebra:
        raise ValueError("complexes over different algebras")
    F = x.algebra.F
    dim_c = hom_cochain_dim(x, y, n)
    if method == "coefficients":
        rank_n = la.rank(F, differential_matrix(x, y, n)) if dim_c else 0
        rank_prev = la.rank(F, differential_matrix(x, y, n - 1)) if hom_cochain_dim(x, y, n - 1) else 0
    elif method == "realized":
        rank_n = _realized_differential_rank(x, y, n)
        rank_prev = _realized_differential_rank(x, y, n - 1)
    else:
        raise ValueError(f"unknown method {method!r}")
    chain = dim_c - rank_n
    return HomDims(chain, rank_prev, chain - rank_prev)


def duality_check(x: Complex, y: Complex, window: range) -> list[tuple[int, int, int, bool]]:
    """Rows (n, dim Hom(x, y[n]), dim Hom(y, x[-n]), agree)."""
    a = x.algebra
    if not find_symmetrizing_form(a).found:
        raise ValueError("duality check needs a verified symmetrizing form")
    out = []
    for n in window:
        left = hom_complex_dims(x, y, n).hom
        right = hom_complex_dims(y, x, -n).hom
        out.append((n, left, right, left == right))
    return out


# ---------------------------------------------------------------------------
# iterated tilting complexes T^(t)
# ---------------------------------------------------------------------------


def _generator_map(a, amb: ProjectiveModule, rows: np.ndarray, types: list[int]) -> ProjMap:
    """Coefficients of the map sum P_{types[k]} -> amb sending e_{types[k]} to rows[k]."""
    F = a.F
    data = projective_data(a)
    r = len(a.idem)
    src = tuple(types.count(l) for l in range(r))
    blocks = {}
    copy = {}
    seen = [0] * r
    for k, l in enumerate(types):
        copy[k] = seen[l]
        seen[l] += 1
    for l in range(r):
        for i, off, m, d in amb.groups:
            blocks[(l, i)] = np.zeros((src[l], m, _cdim(a, l, i)), dtype=np.int64)
    for k, l in enumerate(types):
        for i, off, m, d in amb.groups:
            if m == 0:
                continue
            _, piv = corner_basis(a, l, i)
            comps = rows[k, off : off + m * d].reshape(m, d)
            W = F.matmul(comps, data[i].basis)  # algebra coordinates, in e_i A e_l
            blocks[(l, i)][copy[k]] = W[:, piv]
    return ProjMap(a, src, amb.mults, blocks)


def or_summand(a: PartitionedAlgebra, transport: TransportData, j: int, t: int, cap: int = DEFAULT_CAP) -> Complex:
    """T^(t)_j: the stalk P_j[t] for j in I_0, else R^(t-1) -> ... -> R^(0) -> P_j with P_j in degree 0."""
    take = transport.take
    r = len(a.idem)
    if j in take:
        c = stalk(a, j, -t)
        c.name = f"T{t}_{a.simples[j]}"
        c.meta["resolution_mults"] = []
        return c
    amb = ProjectiveModule(a, [1 if k == j else 0 for k in range(r)])
    K = None  # None: the kernel is all of amb
    terms = [amb.mults]
    diffs = []
    for s in range(t):
        rows = trace_rows(amb if K is None else K, take)
        if K is not None and rows.shape[0]:
            rows = K.lift(rows)
        T = SubModule.from_rows(amb, rows)
        G, types = head_generators(T)
        if any(l not in take for l in types):
            raise AssertionError("trace head contains a simple outside I_0")
        mults = tuple(types.count(l) for l in range(r))
        dim = proj_dim(a, mults)
        if dim > cap:
            raise CapExceeded(f"R^({s}) for P_{a.simples[j]} has dimension {dim} > cap {cap}")
        diffs.insert(0, _generator_map(a, amb, T.lift(G), types))
        terms.insert(0, mults)
        R = ProjectiveModule(a, mults)
        if s < t - 1:
            Kb, free = la.nullspace(a.F, cover_matrix(T, G, types).T)
            K = SubModule(R, Kb, free)
        amb = R
    c = Complex(a, -t, terms, diffs, name=f"T{t}_{a.simples[j]}")
    c.meta["resolution_mults"] = [list(m) for m in reversed(terms[:-1])]
    return c


def or_tilting(a: PartitionedAlgebra, transport: TransportData, t: int, cap: int = DEFAULT_CAP) -> list[Complex]:
    return [or_summand(a, transport, j, t, cap) for j in range(len(a.idem))]


def cartan_of_tilt(ts: list[Complex]) -> np.ndarray:
    r = len(ts)
    return np.array([[hom_complex_dims(ts[i], ts[j], 0).hom for j in range(r)] for i in range(r)], dtype=np.int64)


@dataclass
class Triangle:
    first: str
    second: str
    third: str
    note: str


@dataclass
class TiltingReport:
    t: int
    window: tuple[int, int]
    passed: bool
    failures: list[tuple[str, str, int, int]]  # (T_i, T_j, n, dim)
    checked: int
    d2_failures: list[str]
    triangles: list[Triangle]
    certificate_ok: bool


def generation_certificate(ts: list[Complex], take: list[int], t: int) -> tuple[list[Triangle], bool]:
    """Triangles placing every stalk P_i in the triangulated closure of add(T)."""
    a = ts[0].algebra
    simples = a.simples
    tri: list[Triangle] = []
    ok = True
    for i in take:
        tri.append(Triangle(f"P_{simples[i]}", f"T_{simples[i]}[{-t}]", "0", "stalk summand shifted back to degree 0"))
    for j, c in enumerate(ts):
        if j in take:
            continue
        for d in c.degrees():
            if d != 0 and any(m and i not in take for i, m in enumerate(c.term(d))):
                ok = False
        if c.term(0) != tuple(1 if k == j else 0 for k in range(len(simples))):
            ok = False
        name = f"R_{simples[j]}"
        for s in range(1, t):
            tri.append(
                Triangle(
                    f"{name}[<={s - 1}]",
                    f"{name}[<={s}]",
                    f"R^({s})_{simples[j]}[{s + 1}]",
                    "brutal truncation; the third term is a sum of I_0 stalks, shifted",
                )
            )
        tri.append(
            Triangle(
                f"{name}[<={t - 1}][-1]" if t else "0",
                f"P_{simples[j]}",
                f"T_{simples[j]}",
                "cone of the degree -1 differential into P_j",
            )
        )
    return tri, ok


def verify_tilting(ts: list[Complex], take: list[int], t: int, window: tuple[int, int] | None = None) -> TiltingReport:
    lo, hi = window if window is not None else (-(t + 1), t + 1)
    failures = []
    checked = 0
    d2 = [f"{c.name} at degree {d}" for c in ts for d in c.check_d2()]
    for x in ts:
        for y in ts:
            for n in range(lo, hi + 1):
                if n == 0:
                    continue
                checked += 1
                h = hom_complex_dims(x, y, n).hom
                if h:
                    failures.append((x.name, y.name, n, h))
    triangles, cert_ok = generation_certificate(ts, take, t)
    passed = not failures and not d2 and cert_ok
    return TiltingReport(t, (lo, hi), passed, failures, checked, d2, triangles, cert_ok)


def random_complex(a: PartitionedAlgebra, rng: np.random.Generator, max_len: int = 3, max_mult: int = 2, degree_range=(-2, 2)) -> Complex:
    """A small random complex with d o d = 0, built degree by degree from kernels of precomposition."""
    F, r = a.F, len(a.idem)
    length = int(rng.integers(1, max_len + 1))
    bottom = int(rng.integers(degree_range[0], degree_range[1] + 1))
    terms = []
    for _ in range(length):
        t = tuple(int(x) for x in rng.integers(0, max_mult + 1, size=r))
        if sum(t) == 0:
            t = tuple(1 if k == int(rng.integers(r)) else 0 for k in range(r))
        terms.append(t)
    diffs = []
    for k in range(length - 1):
        X, Y = terms[k], terms[k + 1]
        size = hom_dim(a, X, Y)
        if k == 0:
            basis = np.eye(size, dtype=np.int64)
        else:
            # d^k o d^{k-1} = 0 is linear in d^k
            P = precompose_matrix(a, terms[k - 1], X, Y, diffs[-1])
            basis = la.kernel_basis(F, P, side="left") if size else np.zeros((0, 0), np.int64)
        if basis.shape[0]:
            coeffs = F.random(rng, (1, basis.shape[0]))
            v = F.matmul(coeffs, basis)[0]
        else:
            v = np.zeros(size, dtype=np.int64)
        diffs.append(ProjMap.from_vector(a, X, Y, v))
    return Complex(a, bottom, terms, diffs, name="random")
