"""A quasi-invariant product measure on (Z2 x Z2)^n and its modular theory.

Each site carries two bits ``x = (x0, x1)`` with law ``p[x0, x1]``.  In the
orthonormal basis ``e_kl = chi_kl / sqrt(p_kl)`` (flat index ``2k + l``) a
function becomes a 2x2 matrix, the constant function becomes
``X = sqrt(p)`` and the first factor of G x G acts on rows, the second on
columns.  With n sites a vector is a ``2^n x 2^n`` matrix whose row index
collects the x0 bits and whose column index collects the x1 bits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .finite_group import build_group
from .wreath import GammaTuple, Permutation, WreathElement

Z2 = build_group("cyclic 2")


class TypeIIIError(ValueError):
    pass


@dataclass(frozen=True)
class ProbMatrix:
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, 2):
            raise TypeIIIError(f"p must be 2x2, got shape {p.shape}")
        if np.any(p < 0):
            raise TypeIIIError("p has a negative entry")
        if abs(p.sum() - 1.0) > 1e-12:
            raise TypeIIIError(f"entries of p sum to {p.sum()!r}, not 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def of(cls, p00: float, p01: float, p10: float, p11: float) -> "ProbMatrix":
        return cls(np.array([[p00, p01], [p10, p11]]))

    @classmethod
    def random(cls, rng: np.random.Generator, floor: float = 0.02) -> "ProbMatrix":
        w = rng.dirichlet(np.ones(4)) * (1 - 4 * floor) + floor
        return cls(w.reshape(2, 2))

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.p > 0))

    @property
    def X(self) -> np.ndarray:
        """The constant function in matrix form."""
        return np.sqrt(self.p)

    @property
    def det_X(self) -> float:
        return float(np.linalg.det(self.X))

    @property
    def nonzero_det(self) -> bool:
        return abs(float(np.linalg.det(self.p))) > 1e-14

    def flat(self) -> np.ndarray:
        return self.p.reshape(4)


@dataclass(frozen=True)
class SiteOperators:
    O0: np.ndarray
    O1: np.ndarray

    @staticmethod
    def gamma0(b: int) -> np.ndarray:
        s = -1.0 if b % 2 else 1.0
        return np.diag([1.0, 1.0, s, s])

    @staticmethod
    def gamma1(b: int) -> np.ndarray:
        s = -1.0 if b % 2 else 1.0
        return np.diag([1.0, s, 1.0, s])


def site_operators(p: ProbMatrix, strict: bool = True) -> SiteOperators:
    """Single-site Cesaro limits, written entry by entry in the (00,01,10,11) basis."""
    if strict and not p.strictly_positive:
        raise TypeIIIError("p has a zero entry: the measure is not quasi-invariant")
    (p00, p01), (p10, p11) = p.p
    b0 = np.sqrt(p00 * p10) + np.sqrt(p01 * p11)
    b1 = np.sqrt(p00 * p01) + np.sqrt(p10 * p11)
    r0, r1 = p00 + p01, p10 + p11
    c0, c1 = p00 + p10, p01 + p11
    O0 = np.array([[r0, 0, b0, 0],
                   [0, r0, 0, b0],
                   [b0, 0, r1, 0],
                   [0, b0, 0, r1]])
    O1 = np.array([[c0, b1, 0, 0],
                   [b1, c1, 0, 0],
                   [0, 0, c0, b1],
                   [0, 0, b1, c1]])
    assert np.array_equal(O0, O0.T) and np.array_equal(O1, O1.T)
    return SiteOperators(O0, O1)


@dataclass(frozen=True)
class LRReport:
    J: np.ndarray            # coefficient vector -> flattened matrix
    L: np.ndarray
    R: np.ndarray
    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def ok(self) -> bool:
        return self.max_residual <= 1e-12


def l_form(p: ProbMatrix) -> np.ndarray:
    (p00, p01), (p10, p11) = p.p
    b = np.sqrt(p00 * p10) + np.sqrt(p01 * p11)
    return np.array([[p00 + p01, b], [b, p10 + p11]])


def r_form(p: ProbMatrix) -> np.ndarray:
    (p00, p01), (p10, p11) = p.p
    b = np.sqrt(p00 * p01) + np.sqrt(p10 * p11)
    return np.array([[p00 + p10, b], [b, p01 + p11]])


def iso_and_lr(p: ProbMatrix) -> LRReport:
    """Transport the site operators to M_2 and compare with left/right multiplication."""
    ops = site_operators(p, strict=False)
    J = np.eye(4)   # e_kl -> matrix unit E_kl under row-major flattening
    Jinv = J.T
    L, R = l_form(p), r_form(p)
    Z = np.diag([1.0, -1.0])
    res = {"O0 = left L": 0.0, "O1 = right R": 0.0, "gamma0 = left Z": 0.0, "gamma1 = right Z": 0.0}
    for k in range(4):
        a = np.zeros(4)
        a[k] = 1.0
        A = a.reshape(2, 2)
        img = lambda op: (J @ op @ Jinv @ a).reshape(2, 2)
        res["O0 = left L"] = max(res["O0 = left L"], np.abs(img(ops.O0) - L @ A).max())
        res["O1 = right R"] = max(res["O1 = right R"], np.abs(img(ops.O1) - A @ R).max())
        res["gamma0 = left Z"] = max(res["gamma0 = left Z"], np.abs(img(ops.gamma0(1)) - Z @ A).max())
        res["gamma1 = right Z"] = max(res["gamma1 = right Z"], np.abs(img(ops.gamma1(1)) - A @ Z).max())
    # the left form is X X^T, the fact behind the modular formula
    res["L = X X^T"] = float(np.abs(L - p.X @ p.X.T).max())
    res["R = X^T X"] = float(np.abs(R - p.X.T @ p.X).max())
    return LRReport(J, L, R, {k: float(v) for k, v in res.items()})


# ---------------------------------------------------------------------------
# the representation on n sites


def _configs(n: int) -> np.ndarray:
    """All configurations as an array (4^n, n, 2) of bits, site 1 most significant."""
    idx = np.arange(4 ** n)
    digits = (idx[:, None] // 4 ** np.arange(n - 1, -1, -1)[None, :]) % 4
    return np.stack([digits // 2, digits % 2], axis=-1)


def _encode(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    digits = 2 * bits[..., 0] + bits[..., 1]
    return (digits * 4 ** np.arange(n - 1, -1, -1)[None, :]).sum(axis=1)


@dataclass(frozen=True)
class PiOperator:
    """``(U c)[x] = sign[x] * c[index[x]]`` on coefficient vectors of length 4^n."""

    n: int
    index: np.ndarray
    sign: np.ndarray

    def apply(self, c: np.ndarray) -> np.ndarray:
        return self.sign * c[self.index]

    def dense(self) -> np.ndarray:
        d = 4 ** self.n
        U = np.zeros((d, d))
        U[np.arange(d), self.index] = self.sign
        return U

    def __matmul__(self, other: "PiOperator") -> "PiOperator":
        # (A B c)[x] = sA[x] * sB[iA[x]] * c[iB[iA[x]]]
        return PiOperator(self.n, other.index[self.index], self.sign * other.sign[self.index])


def _check_pair(pair, n: int):
    for g in pair:
        if g.group.order != 2:
            raise TypeIIIError("the measure model needs Gamma = Z2")
        if g.max_point > n:
            raise TypeIIIError(f"element {g} is supported beyond n = {n}")


def rep_pi_mu(pair: tuple[WreathElement, WreathElement], n: int) -> PiOperator:
    """pi_mu(g0, g1) in the orthonormal product basis.

    The Radon-Nikodym factor cancels against the basis normalisation, so a
    permutation acts by relabelling coordinates: ``c -> c o a_g`` with
    ``(a_g x)_i^(k) = x^(k)_{s_k(i)}``.  Tuples act by the sign character.
    """
    _check_pair(pair, n)
    bits = _configs(n)
    moved = bits.copy()
    sign = np.ones(4 ** n)
    for k, g in enumerate(pair):
        src = np.array([g.perm(i) - 1 for i in range(1, n + 1)])
        moved[:, :, k] = bits[:, src, k]
        flips = np.array([g.entry(i) != g.group.identity for i in range(1, n + 1)], dtype=int)
        sign *= (-1.0) ** (bits[:, :, k] @ flips)
    # pi(s gamma) = pi(s) pi(gamma)
    return PiOperator(n, _encode(moved), sign[_encode(moved)])


def pi0(g: WreathElement, n: int) -> PiOperator:
    return rep_pi_mu((g, WreathElement.identity(g.group)), n)


def pi1(g: WreathElement, n: int) -> PiOperator:
    return rep_pi_mu((WreathElement.identity(g.group), g), n)


def xi_vector(p: ProbMatrix, n: int) -> np.ndarray:
    """The constant function as a coefficient vector."""
    v = np.ones(1)
    for _ in range(n):
        v = np.kron(v, p.X.reshape(4))
    return v


def embed_site(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """I x .. x op (at ``site``, 1-based) x .. x I on (C^4)^n."""
    out = np.ones((1, 1))
    for i in range(1, n + 1):
        out = np.kron(out, op if i == site else np.eye(4))
    return out


def cesaro_gap(p: ProbMatrix, n: int, k: int = 1, rng: np.random.Generator | None = None,
               samples: int = 4) -> float:
    """max over sampled site-k vectors v of |(1/n) sum_l pi0((k,l)) v - (O0 at k) v|,
    with the remaining sites in the constant state."""
    rng = np.random.default_rng(0) if rng is None else rng
    ops = site_operators(p)
    X = p.X.reshape(4)
    worst = 0.0
    for _ in range(samples):
        a = rng.normal(size=4)
        a /= np.linalg.norm(a)
        v = np.ones(1)
        for i in range(1, n + 1):
            v = np.kron(v, a if i == k else X)
        avg = np.zeros_like(v)
        for l in range(1, n + 1):
            s = WreathElement.make(Z2, Permutation.transposition(k, l) if l != k else None)
            avg += pi0(s, n).apply(v)
        avg /= n
        target = np.ones(1)
        for i in range(1, n + 1):
            target = np.kron(target, ops.O0 @ a if i == k else X)
        worst = max(worst, float(np.linalg.norm(avg - target)))
    return worst


# ---------------------------------------------------------------------------
# cyclicity and the modular operator


def _as_matrix(v: np.ndarray, n: int) -> np.ndarray:
    """Coefficient vector -> 2^n x 2^n matrix (rows: x0 bits, columns: x1 bits)."""
    return v.reshape((2, 2) * n).transpose(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))).reshape(2 ** n, 2 ** n)


def _from_matrix(A: np.ndarray, n: int) -> np.ndarray:
    T = A.reshape((2,) * (2 * n))
    order = [x for i in range(n) for x in (i, n + i)]
    return T.transpose(order).reshape(4 ** n)


def _left(a: np.ndarray, site: int, n: int) -> np.ndarray:
    return embed_site(np.kron(a, np.eye(2)), site, n)


def _right(a: np.ndarray, site: int, n: int) -> np.ndarray:
    return embed_site(np.kron(np.eye(2), a.T), site, n)


def _span_dim(generators: list[np.ndarray], start: np.ndarray, tol: float = 1e-10) -> int:
    basis = np.zeros((start.size, 0))
    frontier = [start]
    while frontier:
        new = []
        for v in frontier:
            w = v - basis @ (basis.T @ v)
            w = w - basis @ (basis.T @ w)
            nrm = np.linalg.norm(w)
            if nrm > tol * max(1.0, np.linalg.norm(v)):
                w = w / nrm
                basis = np.hstack([basis, w[:, None]])
                new.append(w)
        frontier = [g @ w for w in new for g in generators]
    return basis.shape[1]


@dataclass(frozen=True)
class CyclicReport:
    n: int
    left_dim: int
    right_dim: int
    full_dim: int
    det_X: float

    @property
    def cyclic(self) -> bool:
        return self.left_dim == self.full_dim and self.right_dim == self.full_dim

    @property
    def matches_det(self) -> bool:
        return self.cyclic == (abs(self.det_X) > 1e-12)


def cyclic_separating_check(p: ProbMatrix, n: int) -> CyclicReport:
    if n > 3:
        raise TypeIIIError("cyclicity is checked only for n <= 3")
    L, R = l_form(p), r_form(p)
    Z = np.diag([1.0, -1.0])
    left = [_left(a, i, n) for i in range(1, n + 1) for a in (L, Z)]
    right = [_right(a, i, n) for i in range(1, n + 1) for a in (R, Z)]
    xi = xi_vector(p, n)
    return CyclicReport(n, _span_dim(left, xi), _span_dim(right, xi), 4 ** n, p.det_X)


@dataclass
class ModularReport:
    n: int
    delta: np.ndarray
    modular_residual: float       # max over matrix units a of |Delta(a xi) - M a M^-1 xi|
    fixes_xi: float
    inverse_residual: float
    adjoint_residual: float       # |F(xi a') - xi a'^*| over matrix units a'
    residuals: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return max(self.modular_residual, self.fixes_xi, self.adjoint_residual, self.inverse_residual) <= 1e-10


def _tensor_power(A: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, A)
    return out


def _inv2(A):
    """Inverse of a 2x2 array by the adjugate formula (works for object dtype)."""
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    return np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=A.dtype) / det


def _site_forms(p: ProbMatrix, precision: int | None):
    """sqrt(p) and the left form, in float64 or as mpmath numbers."""
    if precision is None:
        return p.X, l_form(p), float
    mp = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.mp
    mp.dps = precision
    X = np.array([[mp.sqrt(mp.mpf(float(v))) for v in row] for row in p.p], dtype=object)
    return X, X @ X.T, mp.mpf


def modular_operator(p: ProbMatrix, n: int, precision: int | None = 50) -> ModularReport:
    """Delta = F S for S(a xi) = a^* xi, built as a matrix on C^(4^n) and checked
    against conjugation by the n-fold tensor power of the left form.

    All entries are real, so conjugation is the identity on coordinates.  The
    residuals scale like eps * cond(L)^n, which is why the construction runs in
    ``precision`` decimal digits by default; ``precision=None`` uses float64.
    """
    if n > 3:
        raise TypeIIIError("the modular operator is built only for n <= 3")
    if abs(p.det_X) <= 1e-12:
        raise TypeIIIError("vector not separating: det sqrt(p) = 0")
    with mpmath.workdps(precision or 15):
        X, L, num = _site_forms(p, precision)
        dtype = float if precision is None else object
        zero, one = num(0), num(1)
        Xi = _tensor_power(X, n)                     # the constant function, 2^n x 2^n
        Xi_inv = _tensor_power(_inv2(X), n)
        d, m = 4 ** n, 2 ** n
        # S = T o conj with T(phi) = Xi^{-*} phi^T Xi
        T = np.empty((d, d), dtype=dtype)
        for j in range(d):
            e = np.full(d, zero, dtype=dtype)
            e[j] = one
            T[:, j] = _from_matrix(Xi_inv.T @ _as_matrix(e, n).T @ Xi, n)
        delta = T.T @ T                              # F S with F = T^T o conj
        M = _tensor_power(L, n)
        Minv = _tensor_power(_inv2(L), n)
        worst, adj, per = 0.0, 0.0, []
        for i, j in itertools.product(range(m), range(m)):
            a = np.full((m, m), zero, dtype=dtype)
            a[i, j] = one
            lhs = delta @ _from_matrix(a @ Xi, n)
            rhs = _from_matrix(M @ a @ Minv @ Xi, n)
            r = float(max(abs(x) for x in (lhs - rhs)))
            per.append(((i, j), r))
            worst = max(worst, r)
            fa = T.T @ _from_matrix(Xi @ a, n) - _from_matrix(Xi @ a.T, n)
            adj = max(adj, float(max(abs(x) for x in fa)))
        xi = _from_matrix(Xi, n)
        fix = float(max(abs(x) for x in (delta @ xi - xi)))
        # S is an involution, so T T = 1 and Delta^{-1} = S F = T T^T
        inv_res = float(max(abs(x) for x in (delta @ (T @ T.T) - np.eye(d)).ravel()))
        delta_f = delta.astype(float)
    return ModularReport(n, delta_f, worst, fix, inv_res, adj, per)


def left_form_power(p: ProbMatrix, n: int) -> np.ndarray:
    return _tensor_power(l_form(p), n)


# ---------------------------------------------------------------------------
# the state phi(g) = <pi0(g) 1, 1>


def state_value(p: ProbMatrix, g: WreathElement, n: int) -> float:
    xi = xi_vector(p, n)
    return float(xi @ pi0(g, n).apply(xi))


def kms_trace_check(p: ProbMatrix, n: int, s: Permutation, g: WreathElement) -> float:
    """|phi(s g) - phi(g s)| for a pure permutation s."""
    sw = WreathElement(s, GammaTuple(), g.group)
    return abs(state_value(p, sw * g, n) - state_value(p, g * sw, n))


@dataclass(frozen=True)
class CentralityWitness:
    g: WreathElement
    h: WreathElement
    gap: float


def centrality_counterexample(p: ProbMatrix, n: int = 3, tol: float = 1e-6) -> CentralityWitness | None:
    """Smallest-first search for g, h in Z2 wr S_n with phi(gh) != phi(hg)."""
    perms = [Permutation.from_dict({i + 1: q[i] + 1 for i in range(n)})
             for q in itertools.permutations(range(n))]
    tuples = [dict(enumerate(bits, start=1)) for bits in itertools.product((0, 1), repeat=n)]
    elements = [WreathElement.make(Z2, s, t) for s in perms for t in tuples]
    elements.sort(key=lambda x: (len(x.support), str(x)))
    for g in elements:
        for h in elements:
            gap = abs(state_value(p, g * h, n) - state_value(p, h * g, n))
            if gap > tol:
                return CentralityWitness(g, h, gap)
    return None


def tracial_defect(p: ProbMatrix) -> float:
    """Distance of X X^* from the nearest multiple of the identity."""
    M = p.X @ p.X.T
    return float(np.linalg.norm(M - np.trace(M) / 2 * np.eye(2)))
