"""Vertex and spin models on rectangular windows of the square lattice.

A vertex model assigns a Boltzmann weight R(a,b|c,d) to every configuration
of the four edges around a vertex; a spin model (Potts-type) weights every
edge by a symmetric w(s, s').  The partition function is the state sum over
all edge (resp. site) labelings compatible with the boundary conditions.

Index convention, fixed once: at a vertex, a = west, b = east (the
horizontal indices, summed cyclically in the row transfer matrix), c =
south, d = north.  The six-vertex weight tensor is wired to the R-matrix by

    R(a,b|c,d) = <(d,b)| M |(a,c)>,

i.e. the 4x4 matrix M = R_q(x) maps (west, south) to (north, east).  With
this wiring the row transfer matrices at a common q commute for different
spectral parameters, and the logarithmic derivative of T at x = 1
reproduces the nearest-neighbour Hamiltonian of :mod:`.spin_chain`.

Row transfer matrix (periodic horizontal boundary):

    T[y_1..y_n, x_1..x_n] = sum_{a_1..a_n} prod_i R(a_{i-1}, a_i | x_i, y_i)

with a_0 = a_n.  The partition function is then trace(T^m) for a periodic
vertical boundary, a full sum for a free one, and a single entry for fixed
boundary rows; the brute-force state sums below serve as the independent
oracle for all of it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .operators import (CapExceededError, DomainError, Operator,
                        commutator_residual)
from .scalars import Exact, QuadExt
from .temperley_lieb import potts_representation

__all__ = [
    "Boundary", "LatticeWindow", "VertexModelSpec", "SpinModelSpec",
    "six_vertex_weights", "partition_bruteforce_vertex", "row_transfer_matrix",
    "partition_via_transfer", "commuting_transfer_check", "TransferCommuteReport",
    "partition_bruteforce_spin", "potts_transfer_tl", "potts_transfer_direct",
    "potts_coupling_weights", "free_energy_estimate", "FreeEnergyPoint",
    "chain_partition",
]

_STATE_CAP = 2 ** 26
_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class Boundary:
    """Boundary condition along one lattice direction."""

    kind: str
    values: tuple = ()

    PERIODIC = "periodic"
    FREE = "free"
    FIXED = "fixed"

    def __post_init__(self):
        if self.kind not in (self.PERIODIC, self.FREE, self.FIXED):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind != self.FIXED and self.values:
            raise ValueError("only fixed boundaries carry values")

    @staticmethod
    def periodic() -> "Boundary":
        return Boundary(Boundary.PERIODIC)

    @staticmethod
    def free() -> "Boundary":
        return Boundary(Boundary.FREE)

    @staticmethod
    def fixed(values) -> "Boundary":
        return Boundary(Boundary.FIXED, tuple(tuple(v) for v in values))


@dataclass(frozen=True)
class LatticeWindow:
    """A width x height window with per-direction boundary conditions.

    Fixed horizontal values are (west, east) pairs, one per row; fixed
    vertical values are (bottom_row, top_row), each a tuple of width edge
    labels.
    """

    width: int
    height: int
    horizontal: Boundary = field(default_factory=Boundary.periodic)
    vertical: Boundary = field(default_factory=Boundary.periodic)

    def __post_init__(self):
        if self.width < 1 or self.height < 0:
            raise DomainError("window needs width >= 1 and height >= 0")
        if self.height == 0 and self.vertical.kind != Boundary.PERIODIC:
            raise DomainError("a zero-height window only makes sense with periodic vertical boundary")
        if self.horizontal.kind == Boundary.FIXED:
            vals = self.horizontal.values
            if len(vals) != self.height or any(len(v) != 2 for v in vals):
                raise ValueError("fixed horizontal boundary needs one (west, east) pair per row")
        if self.vertical.kind == Boundary.FIXED:
            vals = self.vertical.values
            if len(vals) != 2 or any(len(v) != self.width for v in vals):
                raise ValueError("fixed vertical boundary needs (bottom_row, top_row) of window width")


def _weights_array(weights, d: int, rank: int) -> np.ndarray:
    arr = np.asarray(weights, dtype=object)
    shape = (d,) * rank
    if arr.size != d ** rank:
        raise ValueError(f"need exactly {d ** rank} weights, got {arr.size}")
    flat = [v.item() if isinstance(v, np.generic) else v for v in arr.reshape(-1)]
    if any(isinstance(v, (float, complex)) for v in flat):
        if not all(isinstance(v, (int, float, complex)) for v in flat):
            raise TypeError("cannot mix floating and exact weight entries")
        return np.array(flat, dtype=complex).reshape(shape)
    # all-integer and exact-scalar data stays exact
    out = np.empty(shape, dtype=object)
    out.reshape(-1)[:] = [_coerce_exact_weight(v) for v in flat]
    return out


def _coerce_exact_weight(v):
    if isinstance(v, (int, Fraction, Exact, QuadExt)):
        return v
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"unsupported weight entry {v!r}")


@dataclass(frozen=True)
class VertexModelSpec:
    """Local Boltzmann data of a vertex model: a rank-4 tensor R(a,b|c,d)."""

    d: int
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _weights_array(self.weights, self.d, 4))
        self.weights.setflags(write=False)

    @property
    def exact(self) -> bool:
        return self.weights.dtype == object

    @staticmethod
    def from_jsonable(data) -> "VertexModelSpec":
        return VertexModelSpec(int(data["d"]), _decode_weights(data["weights"]))


@dataclass(frozen=True)
class SpinModelSpec:
    """Local Boltzmann data of a spin model: a symmetric Q x Q matrix w."""

    Q: int
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _weights_array(self.w, self.Q, 2))
        for s in range(self.Q):
            for t in range(s):
                ws, wt = self.w[s, t], self.w[t, s]
                if not _weights_equal(ws, wt):
                    raise ValueError("spin-model weight matrix must be symmetric")
        self.w.setflags(write=False)

    @property
    def exact(self) -> bool:
        return self.w.dtype == object

    @staticmethod
    def from_jsonable(data) -> "SpinModelSpec":
        return SpinModelSpec(int(data["Q"]), _decode_weights(data["w"]))


def _weights_equal(a, b) -> bool:
    if isinstance(a, (Exact, QuadExt)) or isinstance(b, (Exact, QuadExt)):
        return a == b
    return a == b


def _decode_weights(data):
    def dec(v):
        if isinstance(v, list):
            if len(v) == 2 and all(isinstance(u, (int, float)) for u in v):
                return complex(v[0], v[1])
            return [dec(u) for u in v]
        return v
    return dec(data)


def six_vertex_weights(q, x, field: str | None = None) -> VertexModelSpec:
    """The six-vertex weight tensor from R_q(x), in the module wiring.

    Exactly six of the sixteen local configurations carry nonzero weight
    (the ice rule); they are the nonzero entries of R_q(x).
    """
    from .yang_baxter import six_vertex_r
    M = six_vertex_r(q, x, field).mat
    if M.dtype == object:
        W = np.empty((2, 2, 2, 2), dtype=object)
    else:
        W = np.zeros((2, 2, 2, 2), dtype=complex)
    for a, b, c, d_ in itertools.product(range(2), repeat=4):
        W[a, b, c, d_] = M[2 * d_ + b, 2 * a + c]
    return VertexModelSpec(2, W)


# -- brute-force state sums ----------------------------------------------------


def _vertex_edge_slots(window: LatticeWindow):
    """Map every vertex to its four edge slots (variable index or fixed value).

    Returns (slots, num_vars): slots[vertex] = tuple of 4 entries, each
    ('v', idx) or ('f', value), ordered (west, east, south, north).
    """
    n, m = window.width, window.height
    if m == 0:
        raise DomainError("brute force needs at least one lattice row")
    counter = itertools.count()
    hvar: dict[tuple[int, int], tuple] = {}
    # horizontal slots: periodic -> n edges per row; else n+1 per row
    for y in range(m):
        if window.horizontal.kind == Boundary.PERIODIC:
            for i in range(n):
                hvar[(y, i)] = ("v", next(counter))
        else:
            for i in range(n + 1):
                if i in (0, n) and window.horizontal.kind == Boundary.FIXED:
                    west, east = window.horizontal.values[y]
                    hvar[(y, i)] = ("f", west if i == 0 else east)
                else:
                    hvar[(y, i)] = ("v", next(counter))
    vvar: dict[tuple[int, int], tuple] = {}
    for i in range(n):
        if window.vertical.kind == Boundary.PERIODIC:
            for y in range(m):
                vvar[(y, i)] = ("v", next(counter))
        else:
            for y in range(m + 1):
                if y in (0, m) and window.vertical.kind == Boundary.FIXED:
                    bottom, top = window.vertical.values
                    vvar[(y, i)] = ("f", bottom[i] if y == 0 else top[i])
                else:
                    vvar[(y, i)] = ("v", next(counter))
    slots = []
    for y in range(m):
        for i in range(n):
            if window.horizontal.kind == Boundary.PERIODIC:
                west, east = hvar[(y, (i - 1) % n)], hvar[(y, i)]
            else:
                west, east = hvar[(y, i)], hvar[(y, i + 1)]
            if window.vertical.kind == Boundary.PERIODIC:
                south, north = vvar[((y - 1) % m, i)], vvar[(y, i)]
            else:
                south, north = vvar[(y, i)], vvar[(y + 1, i)]
            slots.append((west, east, south, north))
    return slots, next(counter)


def _check_state_cap(d: int, num_vars: int) -> None:
    if num_vars * math.log(d) > math.log(_STATE_CAP):
        raise CapExceededError(
            f"brute force over {d}^{num_vars} states exceeds the cap of 2^26")


def _bruteforce_numeric(slot_lists, num_vars: int, d: int, weights: np.ndarray,
                        dtype) -> complex | int:
    """Vectorised state sum, chunked over the d^num_vars assignments."""
    flat = weights.reshape(-1).astype(dtype)
    total = dtype(0) if dtype is not object else 0
    nstates = d ** num_vars
    chunk = min(nstates, 1 << 20)
    acc = 0
    for start in range(0, nstates, chunk):
        idx = np.arange(start, min(start + chunk, nstates), dtype=np.int64)
        values = []
        for v in range(num_vars):
            values.append((idx // (d ** v)) % d)
        prod = None
        for slots in slot_lists:
            fi = 0
            for kind, val in slots:
                fi = fi * d + (values[val] if kind == "v" else val)
            wvals = flat[fi]
            prod = wvals if prod is None else prod * wvals
        acc = acc + prod.sum()
    return acc


def _bruteforce_object(slot_lists, num_vars: int, d: int, weights: np.ndarray):
    total = None
    for state in itertools.product(range(d), repeat=num_vars):
        prod = None
        for slots in slot_lists:
            idx = tuple(state[val] if kind == "v" else val for kind, val in slots)
            w = weights[idx]
            prod = w if prod is None else prod * w
        total = prod if total is None else total + prod
    return 0 if total is None else total


def partition_bruteforce_vertex(spec: VertexModelSpec, window: LatticeWindow):
    """Exact state sum over all edge labelings consistent with the boundary.

    This is the oracle the transfer-matrix route is checked against.  Integer
    weights are summed by vectorised int64 arithmetic when provably free of
    overflow, otherwise by exact object arithmetic.
    """
    slots, num_vars = _vertex_edge_slots(window)
    _check_state_cap(spec.d, num_vars)
    W = spec.weights
    if not spec.exact:
        return complex(_bruteforce_numeric(slots, num_vars, spec.d, W, np.complex128))
    flat = list(W.reshape(-1))
    if all(isinstance(v, int) for v in flat):
        biggest = max((abs(v) for v in flat), default=0)
        if biggest > 0 and (len(slots) * math.log(max(biggest, 2))
                            + num_vars * math.log(spec.d)) < math.log(_INT64_SAFE):
            return int(_bruteforce_numeric(slots, num_vars, spec.d, W, np.int64))
    return _bruteforce_object(slots, num_vars, spec.d, W)


def _spin_edges(window: LatticeWindow) -> list[tuple[int, int]]:
    n, m = window.width, window.height
    if window.horizontal.kind == Boundary.FIXED or window.vertical.kind == Boundary.FIXED:
        raise DomainError("fixed boundaries are not supported for spin models")
    site = lambda x, y: y * n + x
    edges = []
    for y in range(m):
        rng = range(n) if window.horizontal.kind == Boundary.PERIODIC else range(n - 1)
        for x in rng:
            edges.append((site(x, y), site((x + 1) % n, y)))
    for x in range(n):
        rng = range(m) if window.vertical.kind == Boundary.PERIODIC else range(m - 1)
        for y in rng:
            edges.append((site(x, y), site(x, (y + 1) % m)))
    return edges


def partition_bruteforce_spin(spec: SpinModelSpec, window: LatticeWindow):
    """Exact state sum of a nearest-neighbour spin model on the window."""
    edges = _spin_edges(window)
    nsites = window.width * window.height
    _check_state_cap(spec.Q, nsites)
    slot_lists = [(("v", u), ("v", v)) for u, v in edges]
    if not spec.exact:
        return complex(_bruteforce_numeric(slot_lists, nsites, spec.Q, spec.w, np.complex128))
    flat = list(spec.w.reshape(-1))
    if all(isinstance(v, int) for v in flat):
        biggest = max((abs(v) for v in flat), default=0)
        if biggest > 0 and (len(edges) * math.log(max(biggest, 2))
                            + nsites * math.log(spec.Q)) < math.log(_INT64_SAFE):
            return int(_bruteforce_numeric(slot_lists, nsites, spec.Q, spec.w, np.int64))
    return _bruteforce_object(slot_lists, nsites, spec.Q, spec.w)


# -- transfer matrices ---------------------------------------------------------


def row_transfer_matrix(spec: VertexModelSpec, n: int) -> Operator:
    """The periodic-horizontal row transfer matrix on n sites.

    Entries are the cyclic contraction of n weight tensors over the
    horizontal indices, exactly as drawn in the row diagram.
    """
    d = spec.d
    field = "exact" if spec.exact else "complex"
    W = spec.weights
    # site block S[a, b] = d x d matrix with [y, x] entry W[a, b, x, y]
    if spec.exact:
        S = np.empty((d, d), dtype=object)
        for a in range(d):
            for b in range(d):
                blk = np.empty((d, d), dtype=object)
                for yy in range(d):
                    for xx in range(d):
                        blk[yy, xx] = W[a, b, xx, yy]
                S[a, b] = blk
    else:
        S = np.empty((d, d), dtype=object)
        for a in range(d):
            for b in range(d):
                S[a, b] = W[a, b].T.copy()
    # chain the blocks: M_k[a0, ak] is a d^k x d^k matrix
    M = {(a0, a1): S[a0, a1] for a0 in range(d) for a1 in range(d)}
    for _ in range(n - 1):
        nxt = {}
        for (a0, b), blk in M.items():
            for c in range(d):
                piece = np.kron(blk, S[b, c])
                key = (a0, c)
                nxt[key] = piece if key not in nxt else nxt[key] + piece
        M = nxt
    dim = d ** n
    total = None
    for a in range(d):
        total = M[(a, a)] if total is None else total + M[(a, a)]
    if field == "complex":
        return Operator(d, n, np.asarray(total, dtype=complex), "complex")
    out = np.empty((dim, dim), dtype=object)
    out[:, :] = total
    return Operator(d, n, out, "exact")


def partition_via_transfer(spec: VertexModelSpec, window: LatticeWindow):
    """Partition function through powers of the row transfer matrix.

    Requires a periodic horizontal boundary.  Vertical boundary: periodic
    gives trace(T^m), free sums all entries of T^m, fixed picks the single
    entry indexed by the bottom and top edge rows.
    """
    if window.horizontal.kind != Boundary.PERIODIC:
        raise DomainError("the transfer route needs a periodic horizontal boundary")
    n, m = window.width, window.height
    T = row_transfer_matrix(spec, n)
    Tm = T.power(m)
    if window.vertical.kind == Boundary.PERIODIC:
        return Tm.trace()
    if window.vertical.kind == Boundary.FREE:
        total = None
        for i in range(Tm.dim):
            for j in range(Tm.dim):
                v = Tm.mat[i, j]
                total = v if total is None else total + v
        return total
    bottom, top = window.vertical.values
    d = spec.d
    idx_bottom = sum(int(v) * d ** (n - 1 - i) for i, v in enumerate(bottom))
    idx_top = sum(int(v) * d ** (n - 1 - i) for i, v in enumerate(top))
    return Tm.mat[idx_top, idx_bottom]


def chain_partition(R, length: int, ends: tuple[int, int] | None = None):
    """One-dimensional vertex chain: (R^length)[x, y] for fixed ends, else trace."""
    R = np.asarray(R)
    P = np.linalg.matrix_power(R.astype(complex), length) if R.dtype != object \
        else _object_power(R, length)
    if ends is None:
        return P.trace()
    x, y = ends
    return P[x, y]


def _object_power(M: np.ndarray, k: int) -> np.ndarray:
    from .operators import _exact_matmul
    out = np.empty(M.shape, dtype=object)
    out[:] = 0
    for i in range(M.shape[0]):
        out[i, i] = 1
    base = M
    while k:
        if k & 1:
            out = _exact_matmul(out, base)
        base = _exact_matmul(base, base)
        k >>= 1
    return out


@dataclass(frozen=True)
class TransferCommuteReport:
    q: complex
    x: complex
    y: complex
    n: int
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


def commuting_transfer_check(q, x, y, n: int, tol: float = 1e-8) -> TransferCommuteReport:
    """Max-entry norm of [T(x), T(y)] for the six-vertex family at fixed q."""
    if n > 10:
        raise CapExceededError("commuting_transfer_check supports n <= 10")
    Tx = row_transfer_matrix(six_vertex_weights(q, x), n)
    Ty = row_transfer_matrix(six_vertex_weights(q, y), n)
    residual = commutator_residual(Tx, Ty)
    return TransferCommuteReport(q=complex(q), x=complex(x), y=complex(y),
                                 n=n, residual=residual, tol=tol)


# -- the Potts model and its Temperley-Lieb transfer matrix ---------------------


def potts_transfer_tl(sites: int, Q: int, a, b, field: str = "exact") -> Operator:
    """The Temperley-Lieb product transfer matrix

        prod_{i=1}^{sites-1} (a E_{2i} + 1) * prod_{i=1}^{sites} (b E_{2i-1} + 1)

    in the Potts representation; proportional to the directly constructed
    free-horizontal-boundary Potts row transfer matrix.
    """
    gens = potts_representation(sites, Q, field)
    ident = Operator.identity(Q, sites, field)
    factors = []
    for i in range(1, sites):
        factors.append(gens[2 * i - 1].scale(a) + ident)   # E_{2i}: even, horizontal
    for i in range(1, sites + 1):
        factors.append(gens[2 * i - 2].scale(b) + ident)   # E_{2i-1}: odd, vertical
    acc = ident
    for f in reversed(factors):
        acc = f @ acc
    return acc


def potts_transfer_direct(sites: int, wv: np.ndarray, wh: np.ndarray) -> Operator:
    """Row transfer matrix of a spin model built directly from its weights.

    Adding one row with free horizontal boundary: vertical bonds w_v connect
    the old row to the new one site by site, then horizontal bonds w_h
    couple neighbours inside the new row:

        T[s', s] = prod_i w_v(s_i, s'_i) * prod_{i<sites} w_h(s'_i, s'_{i+1})
    """
    wv = _weights_array(wv, len(wv), 2)
    wh = _weights_array(wh, len(wh), 2)
    Q = wv.shape[0]
    field = "exact" if wv.dtype == object or wh.dtype == object else "complex"
    dim = Q ** sites
    mat = np.empty((dim, dim), dtype=object if field == "exact" else complex)
    configs = list(itertools.product(range(Q), repeat=sites))
    for r, sp in enumerate(configs):
        hweight = None
        for i in range(sites - 1):
            w = wh[sp[i], sp[i + 1]]
            hweight = w if hweight is None else hweight * w
        for cidx, s in enumerate(configs):
            val = hweight
            for i in range(sites):
                w = wv[s[i], sp[i]]
                val = w if val is None else val * w
            mat[r, cidx] = val
    return Operator(Q, sites, mat, field)


def potts_coupling_weights(Q: int, x_h, x_v):
    """Spin weights for Potts couplings: w(s,t) = x if s = t else 1.

    Returns (wh, wv) matrices for horizontal and vertical bonds; with
    a = (x_h - 1)/sqrt(Q) and b = sqrt(Q)/(x_v - 1) the TL-product transfer
    matrix is proportional to the direct one by (x_v - 1)^sites.
    """
    def mk(x):
        w = [[x if s == t else 1 for t in range(Q)] for s in range(Q)]
        return w
    return mk(x_h), mk(x_v)


# -- free energy ----------------------------------------------------------------


@dataclass(frozen=True)
class FreeEnergyPoint:
    n: int
    sites: int
    log_z_per_site: float
    eigenvalue_estimate: float


def free_energy_estimate(spec: VertexModelSpec, n_list: Sequence[int]) -> list[FreeEnergyPoint]:
    """(1/N) log Z on doubly periodic n x n windows, with the dominant-
    eigenvalue estimate log(lambda_max(T_n))/n alongside.

    A non-positive partition function (possible for non-positive weights)
    is reported as a DomainError.
    """
    out = []
    for n in n_list:
        window = LatticeWindow(n, n)
        z = partition_via_transfer(spec, window)
        z = complex(z)
        if abs(z.imag) > 1e-9 * max(1.0, abs(z.real)) or z.real <= 0:
            raise DomainError(f"partition function {z} is not positive; free energy undefined")
        T = row_transfer_matrix(spec, n).to_complex()
        lam = np.abs(np.linalg.eigvals(T.mat)).max()
        out.append(FreeEnergyPoint(n=n, sites=n * n,
                                   log_z_per_site=math.log(z.real) / (n * n),
                                   eigenvalue_estimate=math.log(lam) / n))
    return out
