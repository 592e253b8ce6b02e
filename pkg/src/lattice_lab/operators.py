"""Dense operators on tensor powers of a local space.

An :class:`Operator` is a (d^n) x (d^n) matrix acting on the n-fold tensor
power of C^d.  The basis is fixed once and for all as lexicographic
row-major: the product state e_{a_1} x ... x e_{a_n} sits at index
sum_i a_i * d^(n-i).  Every module in this package relies on that choice.

Two storage backends share one interface: complex128 numpy arrays for
numerical work, and object arrays of exact scalars (:mod:`.scalars`) for
algebraic identities.  Values are immutable after construction and all
operations are pure, so operators can be fanned out across workers freely.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Iterable

import numpy as np

from .scalars import Exact, LaurentPoly, QQi, QuadExt, exact

__all__ = [
    "CapExceededError", "DomainError", "PoleError",
    "Operator", "flip_operator", "embed_two_site", "commutator_residual",
    "max_sites", "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10

HARD_SITE_CAP = 16
_DEFAULT_SITE_CAP = 14


class DomainError(ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """An evaluation point hits a pole (e.g. the six-vertex prefactor)."""


class CapExceededError(ValueError):
    """A requested computation exceeds the configured dense-size caps."""


def max_sites() -> int:
    """Site cap for d=2 chains; LATTICE_LAB_MAX_SITES overrides, hard cap 16."""
    raw = os.environ.get("LATTICE_LAB_MAX_SITES")
    if raw is None:
        return _DEFAULT_SITE_CAP
    try:
        n = int(raw)
    except ValueError as err:
        raise CapExceededError(f"LATTICE_LAB_MAX_SITES={raw!r} is not an integer") from err
    return min(n, HARD_SITE_CAP)


def check_dims(d: int, n: int) -> None:
    if d < 1 or n < 1:
        raise DomainError(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    cap = max_sites()
    if d ** n > 2 ** cap:
        raise CapExceededError(
            f"dense operator on {n} sites of dimension {d} exceeds the cap "
            f"d^n <= 2^{cap} (set LATTICE_LAB_MAX_SITES to raise it, hard cap {HARD_SITE_CAP})")


def _is_exact_scalar(x) -> bool:
    return isinstance(x, (Exact, QuadExt, int, Fraction, QQi))


def _object_matrix(rows) -> np.ndarray:
    mat = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            mat[i, j] = v
    return mat


class Operator:
    """A dense square matrix on the n-fold tensor power of C^d.

    ``field`` is ``"complex"`` (complex128 storage) or ``"exact"`` (object
    storage holding :class:`Exact` / :class:`QuadExt` / Fraction entries).
    Addition and multiplication require matching (d, n) and field.
    """

    __slots__ = ("d", "n", "mat", "field")

    def __init__(self, d: int, n: int, mat: np.ndarray, field: str):
        check_dims(d, n)
        dim = d ** n
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} != ({dim}, {dim}) for d={d}, n={n}")
        if field not in ("complex", "exact"):
            raise ValueError(f"unknown field {field!r}")
        self.d, self.n, self.field = d, n, field
        self.mat = mat
        mat.setflags(write=False)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_rows(rows, d: int, n: int) -> "Operator":
        """Build from nested lists, inferring the field from the entries."""
        flat = [v for row in rows for v in row]
        if all(isinstance(v, (int, float, complex)) and not isinstance(v, bool) for v in flat):
            return Operator(d, n, np.array(rows, dtype=complex), "complex")
        entries = [[exact(v) if isinstance(v, (int, Fraction, QQi)) else v for v in row]
                   for row in rows]
        for row in entries:
            for v in row:
                if not isinstance(v, (Exact, QuadExt)):
                    raise TypeError(f"entry {v!r} is not an exact scalar")
        return Operator(d, n, _object_matrix(entries), "exact")

    @staticmethod
    def identity(d: int, n: int, field: str = "complex") -> "Operator":
        dim = d ** n
        if field == "complex":
            return Operator(d, n, np.eye(dim, dtype=complex), "complex")
        # plain ints interoperate with every exact scalar type
        mat = np.empty((dim, dim), dtype=object)
        mat[:] = 0
        for i in range(dim):
            mat[i, i] = 1
        return Operator(d, n, mat, "exact")

    @staticmethod
    def zeros(d: int, n: int, field: str = "complex") -> "Operator":
        dim = d ** n
        if field == "complex":
            return Operator(d, n, np.zeros((dim, dim), dtype=complex), "complex")
        mat = np.empty((dim, dim), dtype=object)
        mat[:] = 0
        return Operator(d, n, mat, "exact")

    # -- bookkeeping ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def _check_compatible(self, other: "Operator") -> None:
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError(
                f"shape mismatch: (d={self.d}, n={self.n}) vs (d={other.d}, n={other.n})")
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def with_mat(self, mat: np.ndarray) -> "Operator":
        return Operator(self.d, self.n, mat, self.field)

    # -- arithmetic ----------------------------------------------------------

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_compatible(other)
        if self.field == "complex":
            return self.with_mat(np.dot(self.mat, other.mat))
        return self.with_mat(_exact_matmul(self.mat, other.mat))

    def __add__(self, other: "Operator") -> "Operator":
        self._check_compatible(other)
        return self.with_mat(self.mat + other.mat)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_compatible(other)
        return self.with_mat(self.mat - other.mat)

    def __neg__(self) -> "Operator":
        return self.with_mat(-self.mat)

    def scale(self, c) -> "Operator":
        if self.field == "complex":
            return self.with_mat(self.mat * complex(c))
        out = np.empty(self.mat.shape, dtype=object)
        for i in range(self.mat.shape[0]):
            for j in range(self.mat.shape[1]):
                out[i, j] = self.mat[i, j] * c
        return self.with_mat(out)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return np.dot(self.mat, vec)

    def power(self, k: int) -> "Operator":
        if k < 0:
            return self.inverse().power(-k)
        out = Operator.identity(self.d, self.n, self.field)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def inverse(self) -> "Operator":
        if self.field != "complex":
            raise NotImplementedError("exact inversion is only provided for 'complex' operators")
        return self.with_mat(np.linalg.inv(self.mat))

    def dagger(self) -> "Operator":
        """Conjugate transpose; exact entries conjugate coefficient-wise."""
        if self.field == "complex":
            return self.with_mat(self.mat.conj().T.copy())
        out = np.empty(self.mat.shape, dtype=object)
        for i in range(self.mat.shape[0]):
            for j in range(self.mat.shape[1]):
                v = self.mat[j, i]
                out[i, j] = v.conjugate() if hasattr(v, "conjugate") else v
        return self.with_mat(out)

    def trace(self):
        if self.field == "complex":
            return complex(np.trace(self.mat))
        t = 0
        for i in range(self.dim):
            t = t + self.mat[i, i]
        return t

    def tensor(self, other: "Operator") -> "Operator":
        """Kronecker product; the left factor acts on the leading sites."""
        if self.d != other.d or self.field != other.field:
            raise ValueError("tensor factors need a common local dimension and field")
        return Operator(self.d, self.n + other.n, np.kron(self.mat, other.mat), self.field)

    # -- comparisons ---------------------------------------------------------

    def max_abs_diff(self, other: "Operator") -> float:
        self._check_compatible(other)
        if self.field == "complex":
            return float(np.abs(self.mat - other.mat).max())
        return _exact_norm(self - other)

    def equals(self, other: "Operator", tol: float | None = None) -> bool:
        """Exact equality on the exact field, tolerance comparison on complex.

        The complex tolerance is relative to the largest entry magnitude,
        defaulting to DEFAULT_TOL.
        """
        self._check_compatible(other)
        if self.field == "exact":
            for i in range(self.dim):
                for j in range(self.dim):
                    if not _entry_is_zero(self.mat[i, j] - other.mat[i, j]):
                        return False
            return True
        tol = DEFAULT_TOL if tol is None else tol
        scale = max(np.abs(self.mat).max(), np.abs(other.mat).max(), 1.0)
        return bool(np.abs(self.mat - other.mat).max() <= tol * scale)

    def is_zero(self, tol: float | None = None) -> bool:
        if self.field == "exact":
            return all(_entry_is_zero(self.mat[i, j])
                       for i in range(self.dim) for j in range(self.dim))
        tol = DEFAULT_TOL if tol is None else tol
        return bool(np.abs(self.mat).max() <= tol)

    def to_complex(self, values: dict[str, complex] | None = None) -> "Operator":
        """Evaluate an exact operator numerically (substituting variables)."""
        if self.field == "complex":
            return self
        values = values or {}
        out = np.empty(self.mat.shape, dtype=complex)
        for i in range(self.dim):
            for j in range(self.dim):
                v = self.mat[i, j]
                out[i, j] = v.evaluate(values) if isinstance(v, Exact) else complex(v)
        return Operator(self.d, self.n, out, "complex")

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True, separators=(",", ":"))

    def to_jsonable(self) -> dict:
        if self.field == "complex":
            rows = [[[z.real, z.imag] for z in row] for row in self.mat]
        else:
            rows = [[scalar_to_jsonable(v) for v in row] for row in self.mat]
        return {"schema": "lattice-lab/1", "d": self.d, "n": self.n,
                "field": self.field, "rows": rows}

    @staticmethod
    def from_json(text: str) -> "Operator":
        data = json.loads(text)
        d, n, field = data["d"], data["n"], data["field"]
        if field == "complex":
            mat = np.array([[complex(re, im) for re, im in row] for row in data["rows"]])
            return Operator(d, n, mat, "complex")
        rows = [[scalar_from_jsonable(v) for v in row] for row in data["rows"]]
        return Operator(d, n, _object_matrix(rows), "exact")

    def __repr__(self) -> str:
        return f"Operator(d={self.d}, n={self.n}, field={self.field!r})"


def _entry_is_zero(v) -> bool:
    return v.is_zero() if hasattr(v, "is_zero") else v == 0


def _exact_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Object-matrix product that skips structural zeros.

    The exact representations (Potts generators, embedded two-site maps)
    are mostly zero, so a zero-skipping row loop beats the dense cubic
    product by orders of magnitude there while matching it on dense input.
    """
    dim_i, dim_k = A.shape
    dim_j = B.shape[1]
    out = np.empty((dim_i, dim_j), dtype=object)
    out[:] = 0
    b_rows: list[list[tuple[int, object]] | None] = [None] * dim_k
    for i in range(dim_i):
        arow = A[i]
        orow = out[i]
        for k in range(dim_k):
            a = arow[k]
            if _entry_is_zero(a):
                continue
            brow = b_rows[k]
            if brow is None:
                brow = [(j, v) for j, v in enumerate(B[k]) if not _entry_is_zero(v)]
                b_rows[k] = brow
            for j, b in brow:
                orow[j] = orow[j] + a * b
    return out


def _has_numeric(x) -> bool:
    try:
        _to_complex(x)
        return True
    except Exception:
        return False


def _to_complex(x) -> complex:
    if isinstance(x, Exact):
        return x.evaluate({})
    if isinstance(x, Fraction):
        return complex(x)
    return complex(x)


def scalar_to_jsonable(v):
    """JSON encoding for exact scalars (Fractions as strings)."""
    if isinstance(v, (int, Fraction)):
        v = exact(v)
    if isinstance(v, QuadExt):
        return {"kind": "quad", "a": str(v.a), "b": str(v.b), "d": v.d}
    if isinstance(v, Exact):
        return {"kind": "laurent", "num": _poly_to_jsonable(v.num),
                "den": _poly_to_jsonable(v.den)}
    raise TypeError(f"cannot serialize scalar {v!r}")


def _poly_to_jsonable(p: LaurentPoly) -> dict:
    return {"vars": list(p.vars),
            "terms": [[list(e), str(c.re), str(c.im)] for e, c in p.sorted_terms()]}


def _poly_from_jsonable(data) -> LaurentPoly:
    vars = tuple(data["vars"])
    terms = {tuple(e): QQi(Fraction(re), Fraction(im)) for e, re, im in data["terms"]}
    return LaurentPoly(vars, terms)


def scalar_from_jsonable(data):
    if data["kind"] == "quad":
        return QuadExt(Fraction(data["a"]), Fraction(data["b"]), data["d"])
    if data["kind"] == "laurent":
        return Exact(_poly_from_jsonable(data["num"]), _poly_from_jsonable(data["den"]))
    raise ValueError(f"unknown scalar kind {data['kind']!r}")


# -- the tensor-power primitives ---------------------------------------------

def flip_operator(d: int, field: str = "complex") -> Operator:
    """The flip v (x) w -> w (x) v on C^d (x) C^d; an involutive permutation."""
    if d < 1:
        raise DomainError("local dimension must be >= 1")
    dim = d * d
    if field == "complex":
        mat = np.zeros((dim, dim), dtype=complex)
        for a in range(d):
            for b in range(d):
                mat[b * d + a, a * d + b] = 1.0
        return Operator(d, 2, mat, "complex")
    mat = np.empty((dim, dim), dtype=object)
    zero, one = exact(0), exact(1)
    mat[:] = zero
    for a in range(d):
        for b in range(d):
            mat[b * d + a, a * d + b] = one
    return Operator(d, 2, mat, "exact")


def embed_two_site(R: Operator, i: int, n: int) -> Operator:
    """Embed a two-site operator at sites (i, i+1) of an n-site chain.

    Sites are numbered 1..n; everything off sites i, i+1 is the identity.
    """
    if R.n != 2:
        raise ValueError(f"embed_two_site needs a two-site operator, got n={R.n}")
    if not 1 <= i <= n - 1:
        raise IndexError(f"site index {i} out of range 1..{n - 1}")
    check_dims(R.d, n)
    d = R.d
    left, right = d ** (i - 1), d ** (n - i - 1)
    if R.field == "complex":
        mat = np.kron(np.kron(np.eye(left, dtype=complex), R.mat),
                      np.eye(right, dtype=complex))
        return Operator(d, n, mat, "complex")
    mat = R.mat
    if i > 1:
        mat = np.kron(Operator.identity(d, i - 1, "exact").mat, mat)
    if i < n - 1:
        mat = np.kron(mat, Operator.identity(d, n - i - 1, "exact").mat)
    return Operator(d, n, mat.copy(), "exact")


def commutator_residual(A: Operator, B: Operator) -> float:
    """Largest entry magnitude of AB - BA; exactly 0.0 on the exact field."""
    A._check_compatible(B)
    comm = (A @ B) - (B @ A)
    if A.field == "exact":
        return 0.0 if comm.is_zero() else _exact_norm(comm)
    return float(np.abs(comm.mat).max())


def _exact_norm(X: Operator) -> float:
    worst = 0.0
    for i in range(X.dim):
        for j in range(X.dim):
            v = X.mat[i, j]
            if not _entry_is_zero(v):
                worst = max(worst, abs(_to_complex(v))) if _has_numeric(v) else float("inf")
    return worst


# Pauli matrices, used by the spin-chain module and tests.

def pauli(which: str, field: str = "complex") -> Operator:
    """sigma_x, sigma_y, sigma_z or the 2x2 identity as a 1-site operator."""
    from .scalars import EXACT_I
    one, zero, i_ = exact(1), exact(0), EXACT_I
    exact_rows = {
        "x": [[zero, one], [one, zero]],
        "y": [[zero, -i_], [i_, zero]],
        "z": [[one, zero], [zero, -one]],
        "i": [[one, zero], [zero, one]],
    }
    if which not in exact_rows:
        raise ValueError(f"unknown Pauli label {which!r}")
    if field == "exact":
        return Operator(2, 1, _object_matrix(exact_rows[which]), "exact")
    num = {"x": [[0, 1], [1, 0]], "y": [[0, -1j], [1j, 0]],
           "z": [[1, 0], [0, -1]], "i": [[1, 0], [0, 1]]}
    return Operator(2, 1, np.array(num[which], dtype=complex), "complex")
