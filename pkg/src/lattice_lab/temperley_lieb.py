"""The Temperley-Lieb algebra as a planar-diagram algebra.

A diagram on n strands is a non-crossing perfect matching of 2n boundary
points of a rectangle.  Points are numbered counterclockwise: 0..n-1 along
the bottom from left to right, then n..2n-1 along the top from *right to
left*.  In this circular order a matching is non-crossing exactly when the
corresponding bracket sequence is balanced, which makes both validation and
enumeration one-pass.

Composition stacks diagrams; every closed loop produced is worth one factor
of the loop parameter delta.  The defining relations

    E_i^2         = delta E_i,
    E_i E_{i+-1} E_i = E_i,
    E_i E_j       = E_j E_i          (|i-j| >= 2)

hold in the diagram algebra and in its two concrete representations built
here: the Potts spin representation on (C^Q)^(x sites) with delta = sqrt(Q)
(note its doubled generator indexing E_1..E_{2*sites-1}), and the six-vertex
representation on (C^2)^(x n) with delta = q + 1/q.

The Markov trace closes a diagram around the side (top point k glued to the
bottom point below it), each loop contributing delta, normalised by
delta^-n so that tr(1) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .operators import (CapExceededError, DomainError, Operator,
                        embed_two_site, flip_operator)
from .scalars import Exact, QuadExt, exact, var

__all__ = [
    "PlanarPairing", "TLElement", "BratteliDiagram", "JonesProjectionReport",
    "catalan", "enumerate_pairings", "compose_pairings", "markov_trace",
    "gram_matrix", "gram_positivity", "jones_projection_check",
    "potts_representation", "vertex_representation", "vertex_e_matrix",
    "six_vertex_e_decomposition", "bratteli",
]

Scalar = Union[complex, Exact, QuadExt]

_PAIRING_CAP = 12


def catalan(n: int) -> int:
    """The n-th Catalan number, C_n = binom(2n, n)/(n+1)."""
    return math.comb(2 * n, n) // (n + 1)


def _is_zero_scalar(c) -> bool:
    if isinstance(c, (Exact, QuadExt)):
        return c.is_zero()
    return c == 0


@dataclass(frozen=True)
class PlanarPairing:
    """A non-crossing perfect matching of the 2n boundary points.

    ``seq`` is the fixed-point-free involution: point i is matched to
    seq[i].  Bottom points are 0..n-1 left to right; top points are
    n..2n-1 right to left (counterclockwise convention).
    """

    seq: tuple[int, ...]

    def __post_init__(self):
        seq = self.seq
        m = len(seq)
        if m == 0 or m % 2:
            raise ValueError("a pairing needs a positive even number of points")
        for i, j in enumerate(seq):
            if not (0 <= j < m) or j == i or seq[j] != i:
                raise ValueError(f"{seq} is not a fixed-point-free involution")
        depth = 0
        opens: list[int] = []
        for i in range(m):
            if seq[i] > i:
                opens.append(i)
            else:
                if not opens or opens.pop() != seq[i]:
                    raise ValueError(f"{seq} has crossing chords")

    @property
    def n(self) -> int:
        return len(self.seq) // 2

    @staticmethod
    def identity(n: int) -> "PlanarPairing":
        return PlanarPairing(tuple(2 * n - 1 - i for i in range(2 * n)))

    @staticmethod
    def cup_cap(i: int, n: int) -> "PlanarPairing":
        """The diagram of the generator E_i (1 <= i <= n-1)."""
        if not 1 <= i <= n - 1:
            raise IndexError(f"generator index {i} out of range 1..{n - 1}")
        seq = [2 * n - 1 - k for k in range(2 * n)]
        a, b = i - 1, i
        seq[a], seq[b] = b, a
        ta, tb = 2 * n - 1 - a, 2 * n - 1 - b
        seq[ta], seq[tb] = tb, ta
        return PlanarPairing(tuple(seq))

    def reflect(self) -> "PlanarPairing":
        """Top-bottom mirror image (the diagrammatic * involution)."""
        m = len(self.seq)
        out = [0] * m
        for i, j in enumerate(self.seq):
            out[m - 1 - i] = m - 1 - j
        return PlanarPairing(tuple(out))

    def closure_loops(self) -> int:
        """Number of loops when top point above column c is glued to bottom c."""
        m = len(self.seq)
        seen = [False] * m
        loops = 0
        for start in range(m):
            if seen[start]:
                continue
            loops += 1
            p = start
            while not seen[p]:
                seen[p] = True
                q = self.seq[p]        # travel along the chord
                seen[q] = True
                p = m - 1 - q          # hop along the closure arc
        return loops

    def __repr__(self) -> str:
        return f"PlanarPairing({self.seq})"


def enumerate_pairings(n: int) -> list[PlanarPairing]:
    """All non-crossing pairings on 2n points; the count is Catalan(n)."""
    if not 1 <= n <= _PAIRING_CAP:
        raise CapExceededError(f"pairing enumeration supports 1 <= n <= {_PAIRING_CAP}")
    out: list[PlanarPairing] = []
    seq = [0] * (2 * n)

    def place(i: int, size: int) -> Iterator[None]:
        # balanced-bracket recursion: open a chord at i, put `left` pairs
        # inside it and the rest after it
        if size == 0:
            yield
            return
        for left in range(size):
            j = i + 1 + 2 * left
            seq[i], seq[j] = j, i
            for _ in place(i + 1, left):
                yield from place(j + 1, size - left - 1)

    for _ in place(0, n):
        out.append(PlanarPairing(tuple(seq)))
    return out


def compose_pairings(a: PlanarPairing, b: PlanarPairing) -> tuple[PlanarPairing, int]:
    """The product diagram a.b: b is applied first, a is stacked on top.

    b's top row is glued to a's bottom row; the result keeps b's bottom and
    a's top as its boundary.  Returns (diagram, closed_loops) where loops
    counts the circles trapped in the middle, each worth a factor delta.
    """
    if a.n != b.n:
        raise ValueError(f"strand mismatch: {a.n} vs {b.n}")
    n, m = a.n, 2 * a.n
    # nodes ('a', p) / ('b', p); glue edges join b-top (m-1-c) to a-bottom (c)
    seq_of = {"a": a.seq, "b": b.seq}

    def is_boundary(node: tuple[str, int]) -> bool:
        layer, p = node
        return p < n if layer == "b" else p >= n

    def glue(node: tuple[str, int]) -> tuple[str, int]:
        layer, p = node
        return ("a", m - 1 - p) if layer == "b" else ("b", m - 1 - p)

    result = [-1] * m
    visited: set[tuple[str, int]] = set()
    starts = [("b", i) for i in range(n)] + [("a", j) for j in range(n, m)]
    for start in starts:
        if result[start[1]] != -1:
            continue
        node = start
        visited.add(node)
        while True:
            layer, p = node
            node = (layer, seq_of[layer][p])  # travel along a chord
            visited.add(node)
            if is_boundary(node):
                result[start[1]] = node[1]
                result[node[1]] = start[1]
                break
            node = glue(node)                 # cross the middle seam
            visited.add(node)
    loops = 0
    for c in range(n):                        # every middle loop visits a b-top point
        node = ("b", m - 1 - c)
        if node in visited:
            continue
        loops += 1
        while node not in visited:
            visited.add(node)
            layer, p = node
            node = (layer, seq_of[layer][p])
            visited.add(node)
            node = glue(node)
    return PlanarPairing(tuple(result)), loops


@dataclass
class TLElement:
    """A formal linear combination of planar pairings with loop weight delta."""

    n: int
    delta: Scalar
    terms: dict[PlanarPairing, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        for diag in self.terms:
            if diag.n != self.n:
                raise ValueError("all diagrams must share the strand count")
        self.terms = {d: c for d, c in self.terms.items() if not _is_zero_scalar(c)}

    # -- constructors --------------------------------------------------------

    @staticmethod
    def identity(n: int, delta: Scalar) -> "TLElement":
        return TLElement(n, delta, {PlanarPairing.identity(n): _one_like(delta)})

    @staticmethod
    def generator(i: int, n: int, delta: Scalar) -> "TLElement":
        return TLElement(n, delta, {PlanarPairing.cup_cap(i, n): _one_like(delta)})

    @staticmethod
    def from_pairing(diag: PlanarPairing, delta: Scalar) -> "TLElement":
        return TLElement(diag.n, delta, {diag: _one_like(delta)})

    # -- linear structure ----------------------------------------------------

    def _check(self, other: "TLElement") -> None:
        if self.n != other.n:
            raise ValueError(f"strand mismatch: {self.n} vs {other.n}")
        if not _same_delta(self.delta, other.delta):
            raise ValueError("loop parameters differ")

    def __add__(self, other: "TLElement") -> "TLElement":
        self._check(other)
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms[d] + c if d in terms else c
        return TLElement(self.n, self.delta, terms)

    def __neg__(self) -> "TLElement":
        return TLElement(self.n, self.delta, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: "TLElement") -> "TLElement":
        return self + (-other)

    def scale(self, c: Scalar) -> "TLElement":
        return TLElement(self.n, self.delta, {d: k * c for d, k in self.terms.items()})

    def __mul__(self, other: "TLElement") -> "TLElement":
        """Algebra product; closed loops contribute powers of delta."""
        self._check(other)
        terms: dict[PlanarPairing, Scalar] = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                diag, loops = compose_pairings(d1, d2)
                c = c1 * c2 * _power(self.delta, loops)
                terms[diag] = terms[diag] + c if diag in terms else c
        return TLElement(self.n, self.delta, terms)

    def star(self) -> "TLElement":
        """The * involution: reflect diagrams, conjugate coefficients."""
        return TLElement(self.n, self.delta,
                         {d.reflect(): _conj(c) for d, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TLElement):
            return NotImplemented
        self._check(other)
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if not self.terms:
            return "TLElement(0)"
        bits = ", ".join(f"{c!r}*{d.seq}" for d, c in sorted(self.terms.items(),
                                                            key=lambda t: t[0].seq))
        return f"TLElement[{self.n}]({bits})"


def _one_like(delta: Scalar) -> Scalar:
    if isinstance(delta, Exact):
        return exact(1)
    if isinstance(delta, QuadExt):
        return QuadExt(1, 0, delta.d)
    return 1.0 + 0j


def _same_delta(a: Scalar, b: Scalar) -> bool:
    if isinstance(a, (Exact, QuadExt)) or isinstance(b, (Exact, QuadExt)):
        return a == b
    return a == b


def _power(base: Scalar, k: int) -> Scalar:
    if isinstance(base, (Exact, QuadExt)):
        return base ** k
    return base ** k


def _conj(c: Scalar) -> Scalar:
    if isinstance(c, (Exact, QuadExt)):
        return c.conjugate()
    return complex(c).conjugate()


def markov_trace(x: TLElement) -> Scalar:
    """The normalised Markov trace: close around the side, tr(1) = 1.

    Each basis diagram closes to delta^(loops) and the whole functional is
    scaled by delta^(-n); the result satisfies tr(ab) = tr(ba).
    """
    total = None
    for diag, c in x.terms.items():
        contrib = c * _power(x.delta, diag.closure_loops() - x.n)
        total = contrib if total is None else total + contrib
    if total is None:
        if isinstance(x.delta, (Exact, QuadExt)):
            return x.delta * 0
        return 0j
    return total


def gram_matrix(n: int, delta: complex) -> np.ndarray:
    """The trace Gram matrix G[a, b] = tr(a* b) over the pairing basis."""
    basis = enumerate_pairings(n)
    refl = [d.reflect() for d in basis]
    G = np.empty((len(basis), len(basis)), dtype=complex)
    for i, a in enumerate(refl):
        for j, b in enumerate(basis):
            diag, loops = compose_pairings(a, b)
            G[i, j] = delta ** (loops + diag.closure_loops() - n)
    return G


def gram_positivity(n: int, delta: float) -> float:
    """Minimum eigenvalue of the trace Gram matrix at a real loop weight.

    For delta = 2 cos(pi/k), k >= 3, and for delta >= 2, the form is
    positive semidefinite; generic delta < 2 eventually produces negative
    eigenvalues as n grows, which is the quantized-index restriction in
    numerical form.
    """
    G = gram_matrix(n, complex(delta))
    vals = np.linalg.eigvalsh((G + G.conj().T) / 2)
    return float(vals[0].real)


@dataclass(frozen=True)
class JonesProjectionReport:
    pairs: int
    words_checked: int
    all_proportional: bool
    phi: dict[tuple[int, ...], Scalar]


def jones_projection_check(pairs: int, max_len: int = 6,
                           delta: Scalar | None = None) -> JonesProjectionReport:
    """Verify P x P = phi(x) P for all words x on the E_i of length <= max_len.

    P = E_1 E_3 ... E_{2*pairs-1} on n = 2*pairs strands.  Words run over all
    generators E_1..E_{n-1}.  phi(x) is returned for every word; the check is
    exact when delta is exact (default: the formal variable 'delta').
    """
    if delta is None:
        delta = var("delta")
    n = 2 * pairs
    gens = [TLElement.generator(i, n, delta) for i in range(1, n)]
    P = TLElement.identity(n, delta)
    for i in range(1, n, 2):
        P = P * TLElement.generator(i, n, delta)
    (p_diag, p_coeff), = P.terms.items()
    phi: dict[tuple[int, ...], Scalar] = {}
    ok = True
    count = 0

    def visit(word: tuple[int, ...], elem: TLElement) -> None:
        nonlocal ok, count
        count += 1
        pxp = (P * elem) * P
        (d, c), = pxp.terms.items()
        if d != p_diag:
            ok = False
        phi[word] = c * (p_coeff.inv() if isinstance(p_coeff, (Exact, QuadExt))
                         else 1 / p_coeff)
        if len(word) < max_len:
            for g_idx in range(1, n):
                visit(word + (g_idx,), elem * gens[g_idx - 1])

    visit((), TLElement.identity(n, delta))
    return JonesProjectionReport(pairs=pairs, words_checked=count,
                                 all_proportional=ok, phi=phi)


# -- concrete representations -------------------------------------------------

def _potts_p_matrix(Q: int, field: str):
    """The one-site map with all entries 1/sqrt(Q)."""
    if field == "exact":
        inv_root = QuadExt.root(Q).inv()
        mat = np.empty((Q, Q), dtype=object)
        mat[:] = inv_root
        return mat
    return np.full((Q, Q), 1.0 / math.sqrt(Q), dtype=complex)


def _potts_d_matrix(Q: int, field: str):
    """The two-site diagonal map d(v_s (x) v_t) = delta_st v_s (x) v_s."""
    dim = Q * Q
    if field == "exact":
        mat = np.empty((dim, dim), dtype=object)
        zero, one = QuadExt(0, 0, Q), QuadExt(1, 0, Q)
        mat[:] = zero
        for s in range(Q):
            mat[s * Q + s, s * Q + s] = one
        return mat
    mat = np.zeros((dim, dim), dtype=complex)
    for s in range(Q):
        mat[s * Q + s, s * Q + s] = 1.0
    return mat


def potts_representation(sites: int, Q: int, field: str = "exact") -> list[Operator]:
    """The Potts-model TL generators E_1..E_{2*sites-1} on (C^Q)^(x sites).

    Doubled indexing: E_{2i-1} acts as the all-entries-1/sqrt(Q) map on site
    i, and E_{2i} = sqrt(Q) d_{i,i+1}.  All satisfy the TL relations with
    delta = sqrt(Q); ``sites`` spins correspond to 2*sites TL strands.
    """
    if Q < 2 or int(Q) != Q:
        raise DomainError("the Potts representation needs an integer Q >= 2")
    gens: list[Operator] = []
    p1 = Operator(Q, 1, _potts_p_matrix(Q, field), field)
    d2 = Operator(Q, 2, _potts_d_matrix(Q, field), field)
    root = QuadExt.root(Q) if field == "exact" else math.sqrt(Q)
    for k in range(1, 2 * sites):
        if k % 2 == 1:
            i = (k + 1) // 2
            op = _embed_one_site(p1, i, sites)
        else:
            i = k // 2
            op = embed_two_site(d2, i, sites).scale(root)
        gens.append(op)
    return gens


def _embed_one_site(A: Operator, i: int, n: int) -> Operator:
    """Identity everywhere except site i (1-based), where A acts."""
    if A.n != 1:
        raise ValueError("one-site operator expected")
    if not 1 <= i <= n:
        raise IndexError(f"site index {i} out of range 1..{n}")
    d = A.d
    mat = A.mat
    if i > 1:
        mat = np.kron(Operator.identity(d, i - 1, A.field).mat, mat)
    if i < n:
        mat = np.kron(mat, Operator.identity(d, n - i, A.field).mat)
    return Operator(d, n, mat.copy(), A.field)


def vertex_e_matrix(q: Scalar, field: str | None = None, sign: int = 1) -> Operator:
    """The six-vertex TL generator on C^2 (x) C^2 with middle block [[1/q, s], [s, q]].

    sign=+1 is the displayed generator; sign=-1 is its conjugate under the
    one-site gauge 1 (x) sigma_z, which is the combination actually appearing
    in R_q(x) = alpha Id + beta E~.  Both satisfy E^2 = (q + 1/q) E.
    """
    exact_field = field == "exact" or (field is None and isinstance(q, Exact))
    if exact_field:
        q = Exact.from_scalar(q) if not isinstance(q, Exact) else q
        z, s = exact(0), exact(sign)
        rows = [[z, z, z, z],
                [z, q.inv(), s, z],
                [z, s, q, z],
                [z, z, z, z]]
        return Operator.from_rows(rows, 2, 2)
    mat = np.zeros((4, 4), dtype=complex)
    mat[1, 1], mat[2, 2] = 1 / q, q
    mat[1, 2] = mat[2, 1] = sign
    return Operator(2, 2, mat, "complex")


def vertex_representation(n: int, q: Scalar, field: str | None = None) -> list[Operator]:
    """The six-vertex TL generators E_1..E_{n-1} on (C^2)^(x n), delta = q + 1/q."""
    E = vertex_e_matrix(q, field)
    return [embed_two_site(E, i, n) for i in range(1, n)]


def six_vertex_e_decomposition(q: Scalar, x: Scalar) -> tuple[Scalar, Scalar]:
    """Scalars (alpha, beta) with R_q(x) = alpha Id + beta E~ (sign-gauged E).

    Solved from two matrix entries; tests verify the remaining entries are
    reproduced exactly.  The displayed-sign generator enters only through
    its gauge conjugate E~ = (1 (x) sigma_z) E (1 (x) sigma_z).
    """
    from .yang_baxter import six_vertex_r
    R = six_vertex_r(q, x)
    alpha = R.mat[0, 0]
    beta = -R.mat[1, 2]
    return alpha, beta


# -- Bratteli / path counting --------------------------------------------------

@dataclass(frozen=True)
class BratteliDiagram:
    """Level-by-level simple-component sizes of the TL tower.

    Level k lists (endpoint, size) pairs: ``size`` is the number of length-k
    paths on the half-line graph A_inf that start at the marked end vertex
    and finish at ``endpoint``.  The inclusion matrix between consecutive
    levels is the A_inf adjacency restricted to the occurring endpoints.
    """

    levels: tuple[tuple[tuple[int, int], ...], ...]
    inclusions: tuple[np.ndarray, ...]

    def sizes(self, k: int) -> list[int]:
        return [s for _, s in self.levels[k]]

    def dimension(self, k: int) -> int:
        return sum(s * s for s in self.sizes(k))


def bratteli(n_max: int) -> BratteliDiagram:
    """Path counts on A_inf from the end vertex, for levels 0..n_max.

    The level-k component sizes square-sum to Catalan(k), which is the
    dimension of the k-strand diagram algebra.
    """
    if not 0 <= n_max <= 20:
        raise CapExceededError("bratteli supports n_max <= 20")
    counts = {0: 1}
    levels = []
    inclusions = []
    prev_endpoints: list[int] | None = None
    for k in range(n_max + 1):
        endpoints = sorted(v for v, c in counts.items() if c > 0)
        levels.append(tuple((v, counts[v]) for v in endpoints))
        if prev_endpoints is not None:
            M = np.zeros((len(prev_endpoints), len(endpoints)), dtype=int)
            for a, u in enumerate(prev_endpoints):
                for b, w in enumerate(endpoints):
                    M[a, b] = 1 if abs(u - w) == 1 else 0
            inclusions.append(M)
        prev_endpoints = endpoints
        nxt: dict[int, int] = {}
        for v, c in counts.items():
            for w in (v - 1, v + 1):
                if w >= 0:
                    nxt[w] = nxt.get(w, 0) + c
        counts = nxt
    return BratteliDiagram(levels=tuple(levels), inclusions=tuple(inclusions))
