"""Right modules over a :class:`PartitionedAlgebra`.

Module elements are row vectors and ``act(V, b)`` returns ``V @ rho(b)``.
Three concrete classes share that interface:

* :class:`Representation` stores every action matrix densely;
* :class:`ProjectiveModule` is a formal sum of the ``P_i = e_i A`` and acts
  block-diagonally;
* :class:`SubModule` is the row space of a basis ``B`` inside another module,
  with ``B[:, cols] = I`` so coordinates are read off ``cols``.

Syzygies live as submodules of their projective covers, which keeps the
resolution steps at the cost of a few matrix products per generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg as la
from .algebra import EXHAUSTIVE_LIMIT, PartitionedAlgebra

DEFAULT_CAP = 10**4
RANDOM_ISO_SAMPLES = 10**5
# syzygies above this dimension are not retained for periodicity checks
KEEP_LIMIT = 2000


class AlgebraMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Indecomposable projectives
# ---------------------------------------------------------------------------


@dataclass
class ProjectiveData:
    """``P_i = e_i A`` in a basis adapted to radical layers and idempotents."""

    index: int
    basis: np.ndarray  # (d, n), rows in algebra coordinates
    layer: np.ndarray  # basis vector k lies in e_i J^layer[k]
    idem: np.ndarray  # basis vector k lies in e_i A e_idem[k]
    action: np.ndarray  # (n, d, d)
    cols: list[int]
    inv: np.ndarray
    socle: np.ndarray  # basis of soc P_i in P_i coordinates

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coords(self, F, W) -> np.ndarray:
        """P_i coordinates of rows of ``W`` (algebra coordinates, assumed in e_i A)."""
        return F.matmul(np.asarray(W)[:, self.cols], self.inv)

    def rho(self, F, x) -> np.ndarray:
        n, d = self.action.shape[0], self.dim
        return F.matmul(np.asarray(x)[None, :], self.action.reshape(n, d * d)).reshape(d, d)


def projective_data(a: PartitionedAlgebra) -> list[ProjectiveData]:
    cached = a.__dict__.get("_projective_data")
    if cached is None:
        cached = [_build_projective(a, i) for i in range(len(a.idem))]
        a.__dict__["_projective_data"] = cached
    return cached


def _build_projective(a: PartitionedAlgebra, i: int) -> ProjectiveData:
    F, n, r = a.F, a.dim, len(a.idem)
    ei = a.idempotent(i)
    Le = a.left_mult_matrix(ei)
    right_e = [a.right_mult_matrix(a.idempotent(l)) for l in range(r)]
    layers = [la.row_basis(F, Le)[0]] + [la.row_basis(F, F.matmul(Js, Le))[0] for Js, _ in a.radical_powers]

    pieces = []
    below = {l: np.zeros((0, n), dtype=np.int64) for l in range(r)}
    for s in range(len(layers) - 2, -1, -1):
        for l in range(r):
            if s == 0 and l == i:
                new = ei[None, :]
            else:
                cur = la.row_basis(F, F.matmul(layers[s], right_e[l]))[0]
                stack = np.concatenate([below[l], cur])
                k0 = below[l].shape[0]
                new = stack[[k for k in la.independent_rows(F, stack) if k >= k0]]
            if new.shape[0]:
                pieces.append((s, l, new))
                below[l] = np.concatenate([below[l], new])
    pieces.sort(key=lambda t: (t[0], t[1]))
    U = np.concatenate([p[2] for p in pieces])
    layer = np.concatenate([np.full(p[2].shape[0], p[0]) for p in pieces])
    idem = np.concatenate([np.full(p[2].shape[0], p[1]) for p in pieces])
    d = U.shape[0]
    _, cols, rk = la.rref(F, U)
    if rk != d:
        raise AssertionError("adapted basis of e_i A is not independent")
    inv = la.solve(F, U[:, cols], np.eye(d, dtype=np.int64))
    W = F.matmul(U, a.mult.reshape(n, n * n)).reshape(d, n, n).transpose(1, 0, 2).reshape(n * d, n)
    action = F.matmul(W[:, cols], inv).reshape(n, d, d)
    gens = a.rad_gens
    if gens:
        soc = la.kernel_basis(F, np.concatenate([action[g] for g in gens], axis=1), side="left")
    else:
        soc = np.eye(d, dtype=np.int64)
    return ProjectiveData(i, U, layer, idem, action, list(cols), inv, soc)


# ---------------------------------------------------------------------------
# Module classes
# ---------------------------------------------------------------------------


class Module:
    algebra: PartitionedAlgebra
    name: str = "module"

    @property
    def F(self):
        return self.algebra.F

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def act(self, V, b: int) -> np.ndarray:
        raise NotImplementedError

    def act_elem(self, V, x) -> np.ndarray:
        F = self.F
        x = np.asarray(x)
        out = None
        for b in np.nonzero(x)[0]:
            term = F.mul(int(x[b]), self.act(V, int(b)))
            out = term if out is None else F.add(out, term)
        if out is None:
            k = self.dim if V is None else np.asarray(V).shape[0]
            return np.zeros((k, self.dim), dtype=np.int64)
        return out

    def act_many(self, V, bs) -> list[np.ndarray]:
        return [self.act(V, b) for b in bs]

    def action_matrix(self, b: int) -> np.ndarray:
        return self.act(None, b)

    @property
    def coord_idem(self) -> np.ndarray | None:
        """Idempotent index of each coordinate, when every basis vector lies in some M e_l."""
        return None

    def dense(self) -> "Representation":
        n = self.algebra.dim
        action = np.stack([self.action_matrix(b) for b in range(n)]) if self.dim else np.zeros((n, 0, 0), np.int64)
        return Representation(self.algebra, action, name=self.name, check=False, coord_idem=self.coord_idem)

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, dim={self.dim})"


def check_representation(a: PartitionedAlgebra, action: np.ndarray) -> list[str]:
    """Violations of rho(b)rho(b') = sum c rho(b'') and rho(1) = I."""
    F, n = a.F, a.dim
    action = np.asarray(action, dtype=np.int64)
    m = action.shape[1]
    diags = []
    if action.shape != (n, m, m):
        return [f"action has shape {action.shape}, expected ({n}, m, m)"]
    flat = action.reshape(n, m * m)
    expect = F.matmul(a.mult.reshape(n * n, n), flat).reshape(n, n, m, m)
    for x in range(n):
        got = F.matmul(action[x], action.transpose(1, 0, 2).reshape(m, n * m)).reshape(m, n, m).transpose(1, 0, 2)
        bad = np.nonzero(np.any(got != expect[x], axis=(1, 2)))[0]
        if bad.size:
            diags.append(f"action not multiplicative on ({a.labels[x]}, {a.labels[bad[0]]})")
            break
    one = F.matmul(a.one[None, :], flat).reshape(m, m)
    if not np.array_equal(one, np.eye(m, dtype=np.int64)):
        diags.append("unit does not act as the identity")
    return diags


class Representation(Module):
    """Dense right module: one m x m matrix per algebra basis element."""

    def __init__(self, algebra, action, name="M", check=True, coord_idem=None):
        self.algebra = algebra
        self.action = np.asarray(action, dtype=np.int64)
        self.name = name
        self._coord_idem = None if coord_idem is None else np.asarray(coord_idem)
        if check:
            diags = check_representation(algebra, self.action)
            if diags:
                raise ValueError("; ".join(diags))

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    @property
    def coord_idem(self):
        return self._coord_idem

    def act(self, V, b):
        if V is None:
            return self.action[b].copy()
        return self.F.matmul(V, self.action[b])

    def act_elem(self, V, x):
        m, n = self.dim, self.algebra.dim
        rho = self.F.matmul(np.asarray(x)[None, :], self.action.reshape(n, m * m)).reshape(m, m)
        return rho if V is None else self.F.matmul(V, rho)

    def dense(self):
        return self


class ProjectiveModule(Module):
    """Formal sum of P_i^{m_i}, coordinates grouped by i then by copy."""

    def __init__(self, algebra, mults, name=None):
        self.algebra = algebra
        self.mults = tuple(int(m) for m in mults)
        if len(self.mults) != len(algebra.idem):
            raise ValueError("one multiplicity per simple module expected")
        self.data = projective_data(algebra)
        self.groups = []
        off = 0
        for i, m in enumerate(self.mults):
            d = self.data[i].dim
            self.groups.append((i, off, m, d))
            off += m * d
        self._dim = off
        self.name = name or " + ".join(f"P_{algebra.simples[i]}^{m}" for i, m in enumerate(self.mults) if m) or "0"

    @property
    def dim(self):
        return self._dim

    @cached_property
    def coord_layer(self) -> np.ndarray:
        return np.concatenate([np.tile(self.data[i].layer, m) for i, _, m, _ in self.groups] or [np.zeros(0, int)])

    @cached_property
    def _coord_idem(self) -> np.ndarray:
        return np.concatenate([np.tile(self.data[i].idem, m) for i, _, m, _ in self.groups] or [np.zeros(0, int)])

    @property
    def coord_idem(self):
        return self._coord_idem

    @cached_property
    def coord_block(self) -> np.ndarray:
        """Simple index of the summand each coordinate belongs to."""
        return np.concatenate([np.full(m * d, i) for i, _, m, d in self.groups] or [np.zeros(0, int)])

    def _apply(self, V, mats):
        F = self.F
        if V is None:
            V = np.eye(self.dim, dtype=np.int64)
        V = np.asarray(V)
        out = np.zeros((V.shape[0], self.dim), dtype=np.int64)
        for i, off, m, d in self.groups:
            if m == 0:
                continue
            blk = V[:, off : off + m * d].reshape(-1, d)
            out[:, off : off + m * d] = F.matmul(blk, mats(i)).reshape(V.shape[0], m * d)
        return out

    def act(self, V, b):
        return self._apply(V, lambda i: self.data[i].action[b])

    def act_elem(self, V, x):
        cache = {}
        return self._apply(V, lambda i: cache.setdefault(i, self.data[i].rho(self.F, x)))

    def socle_rows(self) -> np.ndarray:
        rows = []
        for i, off, m, d in self.groups:
            soc = self.data[i].socle
            for c in range(m):
                R = np.zeros((soc.shape[0], self.dim), dtype=np.int64)
                R[:, off + c * d : off + (c + 1) * d] = soc
                rows.append(R)
        return np.concatenate(rows) if rows else np.zeros((0, self.dim), dtype=np.int64)


class SubModule(Module):
    """Row space of ``basis`` inside ``ambient``; ``basis[:, cols]`` is the identity."""

    def __init__(self, ambient: Module, basis, cols, name="sub"):
        self.ambient = ambient
        self.algebra = ambient.algebra
        self.basis = np.asarray(basis, dtype=np.int64)
        self.cols = list(cols)
        self.name = name

    @classmethod
    def from_rows(cls, ambient: Module, rows, name="sub") -> "SubModule":
        B, piv = la.row_basis(ambient.F, np.asarray(rows, dtype=np.int64).reshape(-1, ambient.dim))
        return cls(ambient, B, piv, name)

    @property
    def dim(self):
        return self.basis.shape[0]

    def lift(self, V) -> np.ndarray:
        """Ambient coordinates of rows given in submodule coordinates."""
        if V is None:
            return self.basis
        V = np.asarray(V)
        nz = V != 0
        if V.size and np.all(nz.sum(axis=1) == 1) and np.all(V[nz] == 1):
            return self.basis[np.argmax(nz, axis=1)]
        return self.F.matmul(V, self.basis)

    def act(self, V, b):
        return self.ambient.act(self.lift(V), b)[:, self.cols]

    def act_elem(self, V, x):
        return self.ambient.act_elem(self.lift(V), x)[:, self.cols]

    def act_many(self, V, bs):
        L = self.lift(V)
        return [self.ambient.act(L, b)[:, self.cols] for b in bs]

    @cached_property
    def _coord_idem(self):
        ci = self.ambient.coord_idem
        if ci is None or not self.dim:
            return None
        own = ci[self.cols]
        if np.any((self.basis != 0) & (ci[None, :] != own[:, None])):
            return None
        return own

    @property
    def coord_idem(self):
        return self._coord_idem

    @cached_property
    def radical_ambient(self) -> np.ndarray:
        """Echelon basis of (this submodule) * J, in ambient coordinates."""
        return _power_step(self.ambient, self.basis, self.algebra.rad_gens)


def _power_step(amb: Module, X: np.ndarray, gens) -> np.ndarray:
    """Basis of X * J inside ``amb``; uses layer support when ``amb`` is projective."""
    F = amb.F
    if X.shape[0] == 0 or not gens:
        return np.zeros((0, amb.dim), dtype=np.int64)
    if isinstance(amb, ProjectiveModule):
        used = np.any(X != 0, axis=0)
        k = int(amb.coord_layer[used].min()) if used.any() else 0
        sup = np.nonzero(amb.coord_layer >= k + 1)[0]
        if sup.size == 0:
            return np.zeros((0, amb.dim), dtype=np.int64)
        R, _ = la.span(F, (amb.act(X, g)[:, sup] for g in gens), sup.size)
        out = np.zeros((R.shape[0], amb.dim), dtype=np.int64)
        out[:, sup] = R
        return out
    return la.span(F, (amb.act(X, g) for g in gens), amb.dim)[0]


def simple_module(a: PartitionedAlgebra, i: int) -> Representation:
    action = np.zeros((a.dim, 1, 1), dtype=np.int64)
    action[a.idem[i], 0, 0] = 1
    return Representation(a, action, name=f"S_{a.simples[i]}", coord_idem=[i])


def regular_module(a: PartitionedAlgebra) -> Representation:
    return Representation(a, a.mult.transpose(1, 0, 2), name="A_A", check=False)


def indecomposable_projectives(a: PartitionedAlgebra) -> list[ProjectiveModule]:
    """The modules e_i A; each endomorphism ring is checked to be local."""
    out = []
    for i in range(len(a.idem)):
        P = ProjectiveModule(a, [1 if k == i else 0 for k in range(len(a.idem))], name=f"P_{a.simples[i]}")
        if not endomorphism_ring_is_local(P):
            raise AssertionError(f"End(P_{a.simples[i]}) is not local")
        out.append(P)
    return out


def corner_basis(a: PartitionedAlgebra, i: int, j: int) -> tuple[np.ndarray, list[int]]:
    """Echelon basis of e_j A e_i, i.e. of Hom(P_i, P_j) via f <-> f(e_i).

    For i == j the identity e_i comes first, followed by the rref basis of e_i J e_i.
    """
    cache = a.__dict__.setdefault("_corner_cache", {})
    if (i, j) not in cache:
        F = a.F
        space = F.matmul(a.left_mult_matrix(a.idempotent(j)), a.right_mult_matrix(a.idempotent(i)))
        if i == j:
            rad = F.matmul(np.eye(a.dim, dtype=np.int64)[a.rad], space)
            R, piv = la.row_basis(F, rad)
            B = np.concatenate([a.idempotent(i)[None, :], R])
            cache[(i, j)] = (B, [a.idem[i]] + list(piv))
        else:
            cache[(i, j)] = la.row_basis(F, space)
    return cache[(i, j)]


def realize_hom(a: PartitionedAlgebra, i: int, j: int, y) -> np.ndarray:
    """Matrix of u -> y u from P_i to P_j, for y in e_j A e_i."""
    data = projective_data(a)
    W = a.F.matmul(data[i].basis, a.left_mult_matrix(y))
    return data[j].coords(a.F, W)


def endomorphism_ring_is_local(P: ProjectiveModule, seed: int = 0) -> bool:
    """Every non-invertible endomorphism is nilpotent (exhaustive or sampled search)."""
    a, F = P.algebra, P.algebra.F
    (i,) = [k for k, m in enumerate(P.mults) if m]
    if P.mults[i] != 1:
        return False
    B, _ = corner_basis(a, i, i)
    mats = np.stack([realize_hom(a, i, i, y) for y in B])
    h, d = mats.shape[0], P.dim
    total = F.q**h
    if total <= EXHAUSTIVE_LIMIT:
        coeffs = la.enumerate_coefficients(F.q, h, 0, total)
    else:
        coeffs = F.random(np.random.default_rng(seed), (RANDOM_ISO_SAMPLES, h))
    for start in range(0, coeffs.shape[0], 4096):
        batch = la.combine(F, coeffs[start : start + 4096], mats)
        ranks = la.batch_rank(F, batch)
        for k in np.nonzero(ranks < d)[0]:
            X = batch[k]
            Y = X
            for _ in range(d):
                Y = F.matmul(Y, X)
                if not Y.any():
                    break
            if Y.any():
                return False
    return True


# ---------------------------------------------------------------------------
# Structure: radical, socle, head, Loewy layers
# ---------------------------------------------------------------------------


def radical_basis(M: Module) -> tuple[np.ndarray, list[int]]:
    """Echelon basis of M J in the coordinates of M, with pivots."""
    F, gens = M.F, M.algebra.rad_gens
    if isinstance(M, ProjectiveModule):
        idx = np.nonzero(M.coord_layer >= 1)[0]
        R = np.zeros((idx.size, M.dim), dtype=np.int64)
        R[np.arange(idx.size), idx] = 1
        return R, list(idx)
    if isinstance(M, SubModule):
        X = M.radical_ambient[:, M.cols]
        return la.row_basis(F, X)
    if not gens or M.dim == 0:
        return np.zeros((0, M.dim), dtype=np.int64), []
    return la.span(F, (M.act(None, g) for g in gens), M.dim)


def loewy_layers(M: Module) -> list[int]:
    """dim M J^s / M J^{s+1} for s = 0, 1, ... until the radical power vanishes."""
    if M.dim == 0:
        return []
    gens = M.algebra.rad_gens
    if isinstance(M, ProjectiveModule):
        counts = np.bincount(M.coord_layer)
        return [int(c) for c in counts]
    if isinstance(M, SubModule):
        amb, X = M.ambient, M.radical_ambient
    else:
        amb, X = M, la.span(M.F, (M.act(None, g) for g in gens), M.dim)[0] if gens else np.zeros((0, M.dim), np.int64)
    dims = [M.dim]
    while X.shape[0]:
        dims.append(X.shape[0])
        X = _power_step(amb, X, gens)
    dims.append(0)
    return [dims[s] - dims[s + 1] for s in range(len(dims) - 1)]


def socle_dim(M: Module) -> int:
    F = M.F
    if isinstance(M, ProjectiveModule):
        return sum(m * M.data[i].socle.shape[0] for i, _, m, _ in M.groups)
    if isinstance(M, SubModule) and isinstance(M.ambient, ProjectiveModule):
        # soc M = M cap soc(ambient)
        S = M.ambient.socle_rows()
        if S.shape[0] == 0 or M.dim == 0:
            return 0
        res = F.sub(S, F.matmul(S[:, M.cols], M.basis))
        return S.shape[0] - la.rank(F, res)
    return socle(M).shape[0]


def socle(M: Module) -> np.ndarray:
    """Basis of the joint left kernel of the radical generators (M coordinates)."""
    gens = M.algebra.rad_gens
    if M.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if not gens:
        return np.eye(M.dim, dtype=np.int64)
    return la.kernel_basis(M.F, np.concatenate([M.act(None, g) for g in gens], axis=1), side="left")


def head_generators(M: Module) -> tuple[np.ndarray, list[int]]:
    """Rows of M (own coordinates) lifting a basis of M/MJ, each in some M e_l, sorted by l."""
    F, a = M.F, M.algebra
    R, piv = radical_basis(M)
    ci = M.coord_idem
    if ci is not None:
        pset = set(piv)
        free = sorted((c for c in range(M.dim) if c not in pset), key=lambda c: (ci[c], c))
        G = np.zeros((len(free), M.dim), dtype=np.int64)
        G[np.arange(len(free)), free] = 1
        return G, [int(ci[c]) for c in free]
    rows, types = [], []
    for l in range(len(a.idem)):
        V = la.row_basis(F, M.act(None, a.idem[l]))[0]
        if V.shape[0] == 0:
            continue
        res = F.sub(V, F.matmul(V[:, piv], R)) if piv else V
        for k in la.independent_rows(F, res):
            rows.append(V[k])
            types.append(l)
    G = np.array(rows, dtype=np.int64).reshape(len(rows), M.dim)
    return G, types


def head_dims(M: Module) -> list[int]:
    """Multiplicity of each simple in the head of M."""
    _, types = head_generators(M)
    return [types.count(l) for l in range(len(M.algebra.idem))]


# ---------------------------------------------------------------------------
# Projective covers and resolutions
# ---------------------------------------------------------------------------


@dataclass
class Cover:
    module: Module
    projective: ProjectiveModule
    generators: np.ndarray  # rows of the covered module, one per summand
    types: list[int]
    matrix: np.ndarray  # (dim projective, dim module)

    def kernel(self, name="kernel") -> SubModule:
        K, free = la.nullspace(self.module.F, self.matrix.T)
        return SubModule(self.projective, K, free, name=name)


def cover_matrix(M: Module, G: np.ndarray, types: list[int]) -> np.ndarray:
    """Matrix of the map sum P_{types[k]} -> M sending e_{types[k]} to G[k]."""
    F, a = M.F, M.algebra
    n = a.dim
    data = projective_data(a)
    blocks = []
    types = np.asarray(types, dtype=int)
    for l in range(len(a.idem)):
        Gl = G[types == l]
        if Gl.shape[0] == 0:
            continue
        acts = np.stack(M.act_many(Gl, range(n)))  # (n, h, m)
        h, m = Gl.shape[0], M.dim
        blk = F.matmul(data[l].basis, acts.reshape(n, h * m)).reshape(data[l].dim, h, m)
        blocks.append(blk.transpose(1, 0, 2).reshape(h * data[l].dim, m))
    return np.concatenate(blocks) if blocks else np.zeros((0, M.dim), dtype=np.int64)


def projective_cover(M: Module, generators=None) -> Cover:
    G, types = generators if generators is not None else head_generators(M)
    r = len(M.algebra.idem)
    P = ProjectiveModule(M.algebra, [list(types).count(l) for l in range(r)])
    return Cover(M, P, G, list(types), cover_matrix(M, G, types))


def syzygy(M: Module) -> SubModule:
    return projective_cover(M).kernel(name=f"Omega({M.name})")


@dataclass
class StepStats:
    s: int
    dim: int
    head: int
    socle: int
    loewy_length: int
    term_dim: int
    term_mults: tuple[int, ...]
    built: bool = True


@dataclass
class ResolutionTrace:
    base: Module
    steps: list[StepStats] = field(default_factory=list)
    syzygies: list[Module | None] = field(default_factory=list)
    covers: list[Cover | None] = field(default_factory=list)
    truncated: bool = False
    cap: int = DEFAULT_CAP
    note: str = ""

    def column(self, attr: str) -> list[int]:
        return [getattr(st, attr) for st in self.steps]

    def exactness_ok(self) -> bool:
        """dim term s = dim Omega^s + dim Omega^{s+1} wherever both are known."""
        return all(
            self.steps[s].term_dim == self.steps[s].dim + self.steps[s + 1].dim for s in range(len(self.steps) - 1)
        )


def minimal_resolution(M: Module, s_max: int, cap: int = DEFAULT_CAP, keep_covers: bool = False) -> ResolutionTrace:
    """Minimal projective resolution to Omega^{s_max}, stopping before any term exceeds ``cap``."""
    if s_max < 0:
        raise ValueError("s_max must be non-negative")
    a = M.algebra
    dims = [P.dim for P in projective_data(a)]
    trace = ResolutionTrace(M, cap=cap)
    cur: Module = M
    for s in range(s_max + 1):
        G, types = head_generators(cur)
        mults = tuple(types.count(l) for l in range(len(a.idem)))
        term_dim = sum(m * d for m, d in zip(mults, dims))
        layers = loewy_layers(cur)
        st = StepStats(s, cur.dim, len(types), socle_dim(cur), len(layers), term_dim, mults)
        trace.steps.append(st)
        trace.syzygies.append(cur if cur.dim <= KEEP_LIMIT else None)
        if s == s_max:
            st.built = False
            break
        if term_dim > cap:
            st.built = False
            trace.truncated = True
            trace.note = f"term {s} has dimension {term_dim} > cap {cap}"
            break
        cover = projective_cover(cur, (G, types))
        trace.covers.append(cover if keep_covers else None)
        cur = cover.kernel(name=f"Omega^{s + 1}")
    return trace


# ---------------------------------------------------------------------------
# Homomorphisms and isomorphism
# ---------------------------------------------------------------------------


@dataclass
class HomSpace:
    source: Module
    target: Module
    basis: np.ndarray  # (h, m, n), canonical: rref of the flattened matrices

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def element(self, coeffs) -> np.ndarray:
        F = self.source.F
        h, m, n = self.basis.shape
        return F.matmul(np.asarray(coeffs)[None, :], self.basis.reshape(h, m * n)).reshape(m, n)


def hom_space(M: Module, N: Module, method: str = "basis") -> HomSpace:
    """Solutions f of rho_M(b) f = f rho_N(b); ``method`` picks all basis elements or algebra generators."""
    if M.algebra is not N.algebra:
        raise AlgebraMismatch("modules over different algebras")
    a, F = M.algebra, M.F
    m, n = M.dim, N.dim
    if method == "basis":
        bs = list(range(a.dim))
    elif method == "generators":
        bs = list(a.idem) + list(a.rad_gens)
    else:
        raise ValueError(f"unknown method {method!r}")
    K = np.eye(m * n, dtype=np.int64)
    Im, In = np.eye(m, dtype=np.int64), np.eye(n, dtype=np.int64)
    for b in bs:
        if K.shape[0] == 0:
            break
        C = F.sub(np.kron(M.action_matrix(b).T, In), np.kron(Im, N.action_matrix(b)))
        sol = la.kernel_basis(F, F.matmul(K, C), side="left")
        K = F.matmul(sol, K) if sol.shape[0] else np.zeros((0, m * n), dtype=np.int64)
    K = la.row_basis(F, K)[0] if K.shape[0] else K
    return HomSpace(M, N, K.reshape(-1, m, n))


def is_homomorphism(M: Module, N: Module, f) -> bool:
    F = M.F
    return all(
        np.array_equal(F.matmul(M.action_matrix(b), f), F.matmul(f, N.action_matrix(b))) for b in range(M.algebra.dim)
    )


@dataclass
class IsoResult:
    status: str  # YES | NO | UNDECIDED
    reason: str
    witness: np.ndarray | None = None
    points_tried: int = 0

    def __bool__(self):
        return self.status == "YES"


def is_isomorphic(M: Module, N: Module, seed: int = 0) -> IsoResult:
    if M.dim != N.dim:
        return IsoResult("NO", f"dimensions differ ({M.dim} vs {N.dim})")
    if M.dim == 0:
        return IsoResult("YES", "both zero", np.zeros((0, 0), dtype=np.int64))
    F = M.F
    H = hom_space(M, N)
    h = H.dim
    if h != hom_space(M, M).dim:
        return IsoResult("NO", f"dim Hom(M,N) = {h} differs from dim End(M)")
    if h == 0:
        return IsoResult("NO", "no nonzero homomorphisms")
    m = M.dim
    total = F.q**h
    flat = H.basis
    tried = 0

    def scan(coeffs):
        nonlocal tried
        tried += coeffs.shape[0]
        batch = la.combine(F, coeffs, flat)
        hit = np.nonzero(la.batch_rank(F, batch) == m)[0]
        return batch[hit[0]] if hit.size else None

    # a handful of random points finds an isomorphism quickly when one exists
    rng = np.random.default_rng(seed)
    found = scan(F.random(rng, (min(64, total), h)))
    if found is None and total <= EXHAUSTIVE_LIMIT:
        for start in range(0, total, 4096):
            found = scan(la.enumerate_coefficients(F.q, h, start, min(4096, total - start)))
            if found is not None:
                break
        if found is None:
            return IsoResult("NO", f"exhaustive search of {total} homomorphisms found no bijection", None, tried)
    elif found is None:
        for _ in range(RANDOM_ISO_SAMPLES // 4096 + 1):
            found = scan(F.random(rng, (4096, h)))
            if found is not None or tried >= RANDOM_ISO_SAMPLES:
                break
        if found is None:
            return IsoResult("UNDECIDED", f"{tried} random homomorphisms were all singular", None, tried)
    if not is_homomorphism(M, N, found):
        raise AssertionError("isomorphism witness fails to intertwine")
    return IsoResult("YES", "invertible homomorphism found", found, tried)


# ---------------------------------------------------------------------------
# Trace submodules
# ---------------------------------------------------------------------------


def trace_rows(M: Module, idems) -> np.ndarray:
    """Echelon basis of sum_{i in idems} M e_i A, the trace of those P_i in M."""
    F, a = M.F, M.algebra
    blocks = []
    for i in idems:
        V = la.row_basis(F, M.act(None, a.idem[i]))[0]
        if V.shape[0]:
            blocks.extend(M.act_many(V, range(a.dim)))
    return la.span(F, blocks, M.dim)[0]


def trace_submodule(sources: list[Module], M: Module) -> SubModule:
    """Sum of the images of all homomorphisms from ``sources`` into ``M``."""
    F = M.F
    blocks = []
    for S in sources:
        if isinstance(S, ProjectiveModule):
            blocks.append(trace_rows(M, [i for i, m in enumerate(S.mults) if m]))
        else:
            H = hom_space(S, M)
            if H.dim:
                blocks.append(H.basis.reshape(-1, M.dim))
    B, piv = la.span(F, blocks, M.dim)
    return SubModule(M, B, piv, name=f"trace in {M.name}")
