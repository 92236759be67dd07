"""Endomorphism algebras of sums of indecomposable projectives.

A homomorphism f: P_i -> P_j is determined by y = f(e_i) in e_j A e_i, and
f(u) = y u.  Composition g o f then corresponds to the product y_g y_f, so
End(Q_0) for Q_0 = sum_{i in I_0} P_i is the corner algebra eAe with
e = sum_{i in I_0} e_i.  With the product f.g = f o g (g applied first),
Hom(Q_0, X) = X e is a right E-module under precomposition and
Hom(Q_0, P_i) = e_i E.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .algebra import PartitionedAlgebra, make_algebra
from .modules import Module, Representation, corner_basis, realize_hom


@dataclass
class TransportData:
    algebra: PartitionedAlgebra  # the base algebra A
    take: list[int]  # I_0 as simple indices of A
    E: PartitionedAlgebra
    elements: np.ndarray  # row k: the element of A realising basis vector k of E
    source: list[int]  # E basis vector k is a map P_source[k] -> P_target[k]
    target: list[int]

    def matrix(self, k: int) -> np.ndarray:
        """Realised homomorphism P_source -> P_target for basis vector k of E."""
        return realize_hom(self.algebra, self.source[k], self.target[k], self.elements[k])

    def e_index(self, i: int) -> int:
        """Simple index in E of the simple index i in I_0."""
        return self.take.index(i)


def endomorphism_algebra(a: PartitionedAlgebra, take: list[int]) -> TransportData:
    """E = End_A(sum_{i in take} P_i) with basis drawn from the corner bases."""
    take = sorted(set(int(i) for i in take))
    if not take:
        raise ValueError("I_0 must be nonempty")
    F = a.F
    ids, rads = [], []
    for i in take:
        for j in take:
            B, _ = corner_basis(a, i, j)
            for k, y in enumerate(B):
                entry = (y, i, j, k)
                (ids if i == j and k == 0 else rads).append(entry)
    entries = ids + rads
    elements = np.array([e[0] for e in entries], dtype=np.int64)
    source = [e[1] for e in entries]
    target = [e[2] for e in entries]
    labels = [a.simples[i] for i in take] + [f"{a.simples[i]}>{a.simples[j]}.{k}" for _, i, j, k in rads]
    index = {(i, j, k): pos for pos, (_, i, j, k) in enumerate(entries)}
    d = len(entries)
    mult = np.zeros((d, d, d), dtype=np.int64)
    for x in range(d):
        for y in range(d):
            # f.g = f o g: g: P_s -> P_t then f: P_t -> P_u, realised by y_f y_g
            if source[x] != target[y]:
                continue
            s_, u = source[y], target[x]
            B, piv = corner_basis(a, s_, u)
            c = a.mul(elements[x], elements[y])[piv]
            for k in np.nonzero(c)[0]:
                mult[x, y, index[(s_, u, int(k))]] = c[k]
    one = np.zeros(d, dtype=np.int64)
    one[: len(ids)] = 1
    form = None
    if a.form is not None:
        form = F.matmul(elements, a.form[:, None])[:, 0]
    E = make_algebra(
        f"End({'+'.join('P_' + a.simples[i] for i in take)})",
        F,
        labels,
        one,
        list(range(len(ids))),
        list(range(len(ids), d)),
        mult,
        form=form,
        field_spec=a.field_spec,
    )
    return TransportData(a, take, E, elements, source, target)


def hom_as_E_module(t: TransportData, X: Module, name: str | None = None) -> Representation:
    """Hom_A(Q_0, X) = X e as a right E-module (precomposition)."""
    a, F, E = t.algebra, t.algebra.F, t.E
    bases = []
    for i in t.take:
        V = la.row_basis(F, X.act(None, a.idem[i]))[0]
        bases.append(V)
    offs = np.cumsum([0] + [V.shape[0] for V in bases])
    m = int(offs[-1])
    action = np.zeros((E.dim, m, m), dtype=np.int64)
    for k in range(E.dim):
        # y in e_target A e_source maps X e_target into X e_source
        src, tgt = t.take.index(t.source[k]), t.take.index(t.target[k])
        V = bases[tgt]
        if V.shape[0] == 0 or bases[src].shape[0] == 0:
            continue
        img = X.act_elem(V, t.elements[k])
        coords = la.solve(F, bases[src], img)
        if coords is None:
            raise AssertionError("precomposition left Hom(Q_0, X)")
        action[k][offs[tgt] : offs[tgt + 1], offs[src] : offs[src + 1]] = coords
    coord_idem = np.concatenate([np.full(V.shape[0], l) for l, V in enumerate(bases)]) if m else np.zeros(0, int)
    return Representation(E, action, name=name or f"Hom(Q0,{X.name})", check=True, coord_idem=coord_idem)


def composition_constants(a: PartitionedAlgebra):
    """comp[(i, j, k)][u, v] = coordinates of (basis u of Hom(P_j,P_k)) o (basis v of Hom(P_i,P_j))."""
    cache = a.__dict__.get("_comp_constants")
    if cache is not None:
        return cache
    F, r = a.F, len(a.idem)
    bases = {(i, j): corner_basis(a, i, j) for i in range(r) for j in range(r)}
    comp = {}
    for i in range(r):
        for j in range(r):
            Bij, _ = bases[(i, j)]
            for k in range(r):
                Bjk, _ = bases[(j, k)]
                Bik, piv = bases[(i, k)]
                out = np.zeros((Bjk.shape[0], Bij.shape[0], Bik.shape[0]), dtype=np.int64)
                for u, yu in enumerate(Bjk):
                    prods = F.matmul(Bij, a.left_mult_matrix(yu))
                    out[u] = prods[:, piv]
                comp[(i, j, k)] = out
    a.__dict__["_comp_constants"] = comp
    return comp


def cartan_from_corners(a: PartitionedAlgebra) -> np.ndarray:
    r = len(a.idem)
    return np.array([[corner_basis(a, i, j)[0].shape[0] for j in range(r)] for i in range(r)], dtype=np.int64)
