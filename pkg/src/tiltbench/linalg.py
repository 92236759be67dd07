"""Exact arithmetic over GF(p^e) and dense matrix primitives.

Scalars are plain integers in ``[0, q)``.  For ``e > 1`` the integer encodes
the residue polynomial ``c0 + c1 x + ... + c_{e-1} x^{e-1}`` in base ``p``,
so that equality of canonical forms is equality of integers.

Matrices are ``numpy.int64`` arrays holding canonical scalars.  Vectors are
rows and matrices act on the right (``v -> v @ M``) throughout the package.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

MAX_FIELD_SIZE = 2**16

# Column panel width for blocked elimination.
_PANEL = 64


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of ``a`` by monic ``m`` over GF(p); coefficient lists, low degree first."""
    a = [c % p for c in a]
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * c) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(coeffs: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    e = len(coeffs) - 1
    if e < 1 or coeffs[-1] % p != 1:
        return False
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _polymod(coeffs, list(low) + [1], p):
                return False
    return True


def first_irreducible(p: int, e: int) -> list[int]:
    for low in product(range(p), repeat=e):
        cand = list(reversed(low)) + [1]
        if is_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {e} over GF({p})")


class Field:
    """GF(p^e) with vectorised elementwise arithmetic and exact matmul.

    All arithmetic methods accept Python ints or integer numpy arrays and
    broadcast like numpy operators.
    """

    def __init__(self, p: int, e: int = 1, modulus: list[int] | tuple[int, ...] | None = None):
        if not _is_prime(p):
            raise FieldError(f"p={p} is not prime")
        if e < 1:
            raise FieldError("extension degree must be >= 1")
        if p**e > MAX_FIELD_SIZE:
            raise FieldError(f"field size {p}^{e} exceeds {MAX_FIELD_SIZE}")
        self.p = p
        self.e = e
        self.q = p**e
        if e == 1:
            if modulus is not None and len(modulus) != 2:
                raise FieldError("prime field takes no modulus of degree > 1")
            self.modulus = None
            return
        if modulus is None:
            modulus = first_irreducible(p, e)
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != e + 1:
            raise FieldError(f"modulus must have degree {e}")
        if not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is not irreducible over GF({p})")
        self.modulus = tuple(modulus)
        self._powers = p ** np.arange(e, dtype=np.int64)
        # x^m mod modulus for m < 2e - 1, used to fold matmul partial products
        self._fold = []
        for m in range(2 * e - 1):
            r = _polymod([0] * m + [1], list(modulus), p)
            self._fold.append(r + [0] * (e - len(r)))
        self._build_log_tables()

    # -- construction helpers -------------------------------------------------

    def _mul_slow(self, a: int, b: int) -> int:
        da, db = self.to_poly(a), self.to_poly(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] += x * y
        return self.from_poly(_polymod(prod, list(self.modulus), self.p))

    def _build_log_tables(self) -> None:
        q = self.q
        for g in range(2, q):
            exp = np.zeros(q - 1, dtype=np.int64)
            x = 1
            ok = True
            for k in range(q - 1):
                exp[k] = x
                x = self._mul_slow(x, g)
                if x == 1 and k < q - 2:
                    ok = False
                    break
            if ok:
                break
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self._exp = exp
        self._log = log
        self.generator = int(g)

    # -- canonical forms ------------------------------------------------------

    def to_poly(self, a: int) -> list[int]:
        a = int(a)
        return [(a // self.p**k) % self.p for k in range(self.e)]

    def from_poly(self, coeffs) -> int:
        coeffs = list(coeffs)
        if self.e > 1:
            coeffs = _polymod(coeffs, list(self.modulus), self.p)
        elif len(coeffs) > 1 and any(c % self.p for c in coeffs[1:]):
            raise FieldError("prime field element must be a constant polynomial")
        return sum((int(c) % self.p) * self.p**k for k, c in enumerate(coeffs))

    def __call__(self, value: int) -> int:
        """Canonical scalar from an integer (reduced mod p into the prime subfield)."""
        return int(value) % self.p

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # -- elementwise arithmetic ----------------------------------------------

    def _digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._powers) % self.p

    def add(self, a, b):
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), b)
        s = (self._digits(a) + self._digits(b)) % self.p
        return s @ self._powers

    def neg(self, a):
        if self.e == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        if self.p == 2:
            return np.asarray(a, dtype=np.int64).copy()
        return ((-self._digits(a)) % self.p) @ self._powers

    def sub(self, a, b):
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.e == 1:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("division by zero")
        if self.e == 1:
            return np.asarray(pow_mod_array(a, self.p - 2, self.p))
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def scal(self, value) -> int:
        return int(np.asarray(value))

    # -- matrices --------------------------------------------------------------

    def matmul(self, A, B) -> np.ndarray:
        """Exact product over the field; supports numpy broadcasting of stacks."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[-1] == 0 or (A.size == 0 or B.size == 0):
            shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (A.shape[-2], B.shape[-1])
            return np.zeros(shape, dtype=np.int64)
        if self.e == 1:
            return _matmul_mod(A, B, self.p)
        p, e = self.p, self.e
        da = [(A // p**k) % p for k in range(e)]
        db = [(B // p**k) % p for k in range(e)]
        partial = [None] * (2 * e - 1)
        for i in range(e):
            for j in range(e):
                c = _matmul_mod(da[i], db[j], p)
                partial[i + j] = c if partial[i + j] is None else partial[i + j] + c
        out = 0
        for k in range(e):
            coeff = 0
            for m in range(2 * e - 1):
                f = self._fold[m][k]
                if f:
                    coeff = coeff + f * partial[m]
            out = out + (coeff % p) * p**k
        return np.asarray(out, dtype=np.int64)

    def zeros(self, *shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)


def pow_mod_array(a, k: int, p: int):
    a = np.asarray(a, dtype=np.int64) % p
    result = np.ones_like(a)
    base = a.copy()
    while k:
        if k & 1:
            result = (result * base) % p
        base = (base * base) % p
        k >>= 1
    return result


def _fmod(x: np.ndarray, p: int) -> np.ndarray:
    """Exact residue of an integer-valued float array, as int64."""
    # fmod is exact on integer-valued floats, so remainder lands in [0, p)
    return np.remainder(x, p, out=x if x.flags.writeable else None).astype(np.int64)


def _matmul_mod(A: np.ndarray, B: np.ndarray, p: int, minus_from: np.ndarray | None = None) -> np.ndarray:
    # float64 products are exact while inner * (p-1)^2 < 2^53
    inner = A.shape[-1]
    chunk = max(1, (2**52) // max(1, (p - 1) ** 2))
    if inner <= chunk:
        C = np.matmul(A.astype(np.float64), B.astype(np.float64))
        if minus_from is not None:
            C = minus_from - C
        return _fmod(C, p)
    if minus_from is not None:
        return (minus_from - _matmul_mod(A, B, p)) % p
    out = None
    for s in range(0, inner, chunk):
        part = _matmul_mod(A[..., s:s + chunk], B[..., s:s + chunk, :], p)
        out = part if out is None else (out + part) % p
    return out


@lru_cache(maxsize=None)
def field(p: int, e: int = 1, modulus: tuple[int, ...] | None = None) -> Field:
    return Field(p, e, list(modulus) if modulus is not None else None)


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------


def _panel_pivots(F: Field, panel: np.ndarray) -> tuple[list[int], list[int]]:
    """Echelon pass over a narrow panel; returns (pivot rows, pivot cols) local to it."""
    W = panel.copy()
    nrows, ncols = W.shape
    alive = np.ones(nrows, dtype=bool)
    prow: list[int] = []
    pcol: list[int] = []
    for c in range(ncols):
        cand = np.nonzero(alive & (W[:, c] != 0))[0]
        if cand.size == 0:
            continue
        r = int(cand[0])
        alive[r] = False
        prow.append(r)
        pcol.append(c)
        rest = np.nonzero(alive & (W[:, c] != 0))[0]
        if rest.size:
            factor = F.div(W[rest, c], W[r, c])
            W[rest, c:] = F.sub(W[rest, c:], F.mul(factor[:, None], W[r, c:][None, :]))
    return prow, pcol


def _small_inverse(F: Field, M: np.ndarray) -> np.ndarray:
    k = M.shape[0]
    W = np.concatenate([M.astype(np.int64), F.eye(k)], axis=1)
    for c in range(k):
        nz = np.nonzero(W[c:, c])[0]
        r = c + int(nz[0])
        if r != c:
            W[[c, r]] = W[[r, c]]
        W[c] = F.mul(W[c], F.inv(W[c, c]))
        col = W[:, c].copy()
        col[c] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            W[rows] = F.sub(W[rows], F.mul(col[rows, None], W[c][None, :]))
    return W[:, k:]


def rref(F: Field, M) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form.

    Returns ``(R, pivots, rank)`` where ``R`` has the shape of ``M`` with the
    zero rows at the bottom.  Uses a blocked Gauss-Jordan sweep whose trailing
    updates are exact matrix products.
    """
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    nrows, ncols = R.shape
    r = 0
    c0 = 0
    pivots: list[int] = []
    while c0 < ncols and r < nrows:
        c1 = min(ncols, c0 + _PANEL)
        prow, pcol = _panel_pivots(F, R[r:, c0:c1])
        if not pcol:
            c0 = c1
            continue
        k = len(pcol)
        chosen = [r + x for x in prow]
        taken = set(chosen)
        others = [x for x in range(r, nrows) if x not in taken]
        order = list(range(r)) + chosen + others
        R = R[order]
        pc = [c0 + x for x in pcol]
        P = R[r:r + k, c0:]
        Pinv = _small_inverse(F, R[r:r + k][:, pc])
        newP = F.matmul(Pinv, P)
        R[r:r + k, c0:] = newP
        for lo, hi in ((0, r), (r + k, nrows)):
            if hi > lo:
                coef = R[lo:hi][:, pc]
                if not np.any(coef):
                    continue
                if F.e == 1:
                    R[lo:hi, c0:] = _matmul_mod(coef, newP, F.p, minus_from=R[lo:hi, c0:])
                else:
                    R[lo:hi, c0:] = F.sub(R[lo:hi, c0:], F.matmul(coef, newP))
        pivots.extend(pc)
        r += k
        c0 = c1
    return R, pivots, r


def rank(F: Field, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    # eliminate along the shorter side
    if M.shape[0] > M.shape[1]:
        M = M.T
    return rref(F, M)[2]


def row_basis(F: Field, M) -> tuple[np.ndarray, list[int]]:
    """Echelon basis of the row space and its pivot columns."""
    M = np.asarray(M, dtype=np.int64)
    if M.shape[0] == 0:
        return M.reshape(0, M.shape[1]), []
    R, piv, rk = rref(F, M)
    return R[:rk], piv


def nullspace(F: Field, M) -> tuple[np.ndarray, list[int]]:
    """Basis of ``{x : M x^T = 0}`` as rows, with its free columns.

    Row ``k`` has a 1 in free column ``free[k]`` and 0 in every other free
    column, so coordinates of a kernel vector are read off the free columns.
    """
    M = np.asarray(M, dtype=np.int64)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64), list(range(ncols))
    R, piv, rk = rref(F, M)
    pset = set(piv)
    free = [c for c in range(ncols) if c not in pset]
    K = np.zeros((len(free), ncols), dtype=np.int64)
    if free:
        K[np.arange(len(free)), free] = 1
        if rk:
            K[:, piv] = F.neg(R[:rk][:, free].T)
    return K, free


def kernel_basis(F: Field, M, side: str = "left") -> np.ndarray:
    """Independent vectors annihilated by ``M``.

    ``side="left"`` gives rows ``v`` with ``v @ M == 0`` (the module-theory
    convention); ``side="right"`` gives rows ``x`` with ``M @ x == 0``.
    """
    M = np.asarray(M, dtype=np.int64)
    if side == "left":
        return nullspace(F, M.T)[0]
    if side == "right":
        return nullspace(F, M)[0]
    raise ValueError(f"unknown side {side!r}")


def left_kernel(F: Field, M) -> tuple[np.ndarray, list[int]]:
    M = np.asarray(M, dtype=np.int64)
    return nullspace(F, M.T)


def solve(F: Field, M, target):
    """A solution ``X`` of ``X @ M == target`` or ``None`` when inconsistent.

    ``target`` may be a single vector or a matrix of row targets.
    """
    M = np.asarray(M, dtype=np.int64)
    T = np.asarray(target, dtype=np.int64)
    single = T.ndim == 1
    if single:
        T = T[None, :]
    if T.shape[1] != M.shape[1]:
        raise ValueError(f"shape mismatch: target width {T.shape[1]} vs matrix width {M.shape[1]}")
    n = M.shape[0]
    aug = np.concatenate([M.T, T.T], axis=1)
    R, piv, rk = rref(F, aug)
    if any(c >= n for c in piv):
        return None
    X = np.zeros((T.shape[0], n), dtype=np.int64)
    for r, c in enumerate(piv):
        X[:, c] = R[r, n:]
    return X[0] if single else X


def independent_rows(F: Field, M) -> list[int]:
    """Indices of the greedy (first-come) maximal independent set of rows."""
    M = np.asarray(M, dtype=np.int64)
    if M.shape[0] == 0:
        return []
    return rref(F, M.T)[1]


def span(F: Field, blocks, width: int) -> tuple[np.ndarray, list[int]]:
    """Echelon basis of the span of several row blocks, merged incrementally."""
    basis = np.zeros((0, width), dtype=np.int64)
    piv: list[int] = []
    for block in blocks:
        block = np.asarray(block, dtype=np.int64)
        if block.shape[0] == 0:
            continue
        if piv:
            block = F.sub(block, F.matmul(block[:, piv], basis))
        if not np.any(block):
            continue
        basis, piv = row_basis(F, np.concatenate([basis, block], axis=0))
    return basis, piv


def coords(basis_piv: list[int], V: np.ndarray) -> np.ndarray:
    """Coordinates of rows of ``V`` in an echelon-like basis (trusted membership)."""
    return np.asarray(V, dtype=np.int64)[..., basis_piv]


# ---------------------------------------------------------------------------
# Batched helpers for exhaustive / sampled searches over small hom spaces
# ---------------------------------------------------------------------------


def batch_rank(F: Field, stack: np.ndarray) -> np.ndarray:
    """Ranks of a stack of square-or-rectangular matrices, shape (B, m, n)."""
    W = np.array(stack, dtype=np.int64, copy=True)
    B, m, n = W.shape
    ranks = np.zeros(B, dtype=np.int64)
    active_row = np.zeros(B, dtype=np.int64)
    idx = np.arange(B)
    for c in range(n):
        rows = np.arange(m)
        below = rows[None, :] >= active_row[:, None]
        nz = (W[:, :, c] != 0) & below
        has = nz.any(axis=1)
        if not has.any():
            continue
        pr = np.argmax(nz, axis=1)
        sel = idx[has]
        ar = active_row[sel]
        pr = pr[sel]
        # swap pivot row into position
        tmp = W[sel, ar].copy()
        W[sel, ar] = W[sel, pr]
        W[sel, pr] = tmp
        piv_rows = W[sel, ar]
        inv = F.inv(piv_rows[:, c])
        piv_rows = F.mul(piv_rows, inv[:, None])
        W[sel, ar] = piv_rows
        factors = W[sel, :, c].copy()
        factors[np.arange(sel.size), ar] = 0
        factors = np.where(rows[None, :] > ar[:, None], factors, 0)
        W[sel] = F.sub(W[sel], F.mul(factors[:, :, None], piv_rows[:, None, :]))
        active_row[sel] += 1
        ranks[sel] += 1
        if (active_row >= m).all():
            break
    return ranks


def enumerate_coefficients(q: int, d: int, start: int, count: int) -> np.ndarray:
    """Rows ``start .. start+count-1`` of the lexicographic listing of F_q^d."""
    idx = np.arange(start, start + count, dtype=np.int64)
    out = np.zeros((count, d), dtype=np.int64)
    for k in range(d - 1, -1, -1):
        out[:, k] = idx % q
        idx //= q
    return out


def combine(F: Field, coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Linear combinations ``sum_k coeffs[b, k] * basis[k]`` for a batch."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    basis = np.asarray(basis, dtype=np.int64)
    flat = basis.reshape(basis.shape[0], -1)
    return F.matmul(coeffs, flat).reshape((coeffs.shape[0],) + basis.shape[1:])
