"""The six-vertex R-matrix family, the Yang-Baxter equation, and Baxterization.

The central object is the one-parameter family of 4x4 matrices

                1          | x/q - q/x                           |
    R_q(x) = -------- *    |   (1/q - q)/x      x - 1/x          |
             xq - 1/(xq)   |   x - 1/x          x(1/q - q)       |
                           |                           x/q - q/x |

acting on C^2 (x) C^2, which satisfies the spectral Yang-Baxter equation in
multiplicative form,

    R_12(x) R_23(xy) R_12(y) = R_23(y) R_12(xy) R_23(x),

along with four structural properties: R at q=1 is the flip, R at x=1 is
minus the identity, R_q(x)^-1 = R_q(1/x), and the x -> 0 limit satisfies the
braid relation.  The same family is reconstructed from Hecke-algebra
generators by Baxterization, R_i(x) = x G_i + x^-1 G_i^-1.

A note on the two q conventions: the Hecke relation g^2 = (qH - 1) g + qH
uses a parameter qH equal to the *square* of the R-matrix q.  Every function
below that takes ``q`` means the R-matrix q; the Hecke parameter is derived
as q**2 where needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .operators import (DomainError, Operator, PoleError, embed_two_site,
                        flip_operator)
from .scalars import EXACT_I, Exact, exact

__all__ = [
    "SpectralRMatrix", "HeckeGenerators", "YbeReport",
    "six_vertex_r", "six_vertex_family", "braid_limit",
    "check_ybe", "hecke_from_tl", "hecke_six_vertex",
    "baxterize", "check_baxter_condition",
]

Scalar = Union[complex, Exact]


def _is_exact(*vals) -> bool:
    return any(isinstance(v, Exact) for v in vals)


def _inv(v: Scalar) -> Scalar:
    return v.inv() if isinstance(v, Exact) else 1.0 / v


def _zero_like(exact_field: bool) -> Scalar:
    return exact(0) if exact_field else 0j


def six_vertex_r(q: Scalar, x: Scalar, field: str | None = None) -> Operator:
    """The six-vertex R-matrix R_q(x), prefactor included.

    ``q`` and ``x`` may be complex numbers or exact scalars (symbolic
    variables included); the evaluation point must avoid the prefactor pole
    xq = 1/(xq), which is reported as a :class:`PoleError`.
    """
    exact_field = field == "exact" or (field is None and _is_exact(q, x))
    if exact_field:
        q, x = Exact.from_scalar(q) if not isinstance(q, Exact) else q, \
               Exact.from_scalar(x) if not isinstance(x, Exact) else x
    qi, xi = _inv(q), _inv(x)
    denom = x * q - xi * qi
    if isinstance(denom, Exact):
        if denom.is_zero():
            raise PoleError("six-vertex prefactor pole: xq = 1/(xq)")
        pref = denom.inv()
    else:
        if q == 0 or x == 0:
            raise DomainError("six_vertex_r needs q != 0 and x != 0")
        if abs(denom) < 1e-12:
            raise PoleError(f"six-vertex prefactor pole at q={q}, x={x}")
        pref = 1.0 / denom
    corner = (x * qi - xi * q) * pref
    mid_a = xi * (qi - q) * pref
    mid_d = x * (qi - q) * pref
    off = (x - xi) * pref
    z = _zero_like(exact_field)
    rows = [[corner, z, z, z],
            [z, mid_a, off, z],
            [z, off, mid_d, z],
            [z, z, z, corner]]
    if exact_field:
        return Operator.from_rows(rows, 2, 2)
    return Operator(2, 2, np.array(rows, dtype=complex), "complex")


@dataclass(frozen=True)
class SpectralRMatrix:
    """A spectral-parameter family x -> R(x) of two-site operators."""

    q: Scalar
    evaluate: Callable[[Scalar], Operator]

    def __call__(self, x: Scalar) -> Operator:
        return self.evaluate(x)


def six_vertex_family(q: Scalar, field: str | None = None) -> SpectralRMatrix:
    """The six-vertex family at fixed q, as a SpectralRMatrix."""
    return SpectralRMatrix(q=q, evaluate=lambda x: six_vertex_r(q, x, field))


def braid_limit(q: Scalar, field: str | None = None) -> Operator:
    """The x -> 0 limit of R_q(x), taken analytically.

    The limit matrix has entries q^2, q^2 - 1 and q; it satisfies the braid
    relation R_12 R_23 R_12 = R_23 R_12 R_23 and the Hecke quadratic
    R^2 = (q^2 - 1) R + q^2 (Hecke parameter qH = q^2).
    """
    exact_field = field == "exact" or (field is None and _is_exact(q))
    if exact_field:
        q = Exact.from_scalar(q) if not isinstance(q, Exact) else q
    if not exact_field and q == 0:
        raise DomainError("braid_limit needs q != 0")
    z = _zero_like(exact_field)
    one = exact(1) if exact_field else 1.0
    rows = [[q * q, z, z, z],
            [z, q * q - one, q, z],
            [z, q, z, z],
            [z, z, z, q * q]]
    if exact_field:
        return Operator.from_rows(rows, 2, 2)
    return Operator(2, 2, np.array(rows, dtype=complex), "complex")


@dataclass(frozen=True)
class YbeReport:
    x: complex
    y: complex
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


def check_ybe(R: SpectralRMatrix | Callable[[Scalar], Operator],
              x: Scalar, y: Scalar, tol: float = 1e-10) -> YbeReport:
    """Residual of R_12(x) R_23(xy) R_12(y) = R_23(y) R_12(xy) R_23(x).

    The check runs on the three-site space; a pole at any of the three
    evaluation points x, y, xy propagates as a PoleError.
    """
    xy = x * y
    r_x, r_y, r_xy = R(x), R(y), R(xy)
    n3 = 3
    lhs = (embed_two_site(r_x, 1, n3) @ embed_two_site(r_xy, 2, n3)
           @ embed_two_site(r_y, 1, n3))
    rhs = (embed_two_site(r_y, 2, n3) @ embed_two_site(r_xy, 1, n3)
           @ embed_two_site(r_x, 2, n3))
    residual = lhs.max_abs_diff(rhs)
    def _num(v):
        return complex(v.evaluate({})) if isinstance(v, Exact) else complex(v)
    return YbeReport(x=_num(x), y=_num(y), residual=residual, tol=tol)


def hecke_from_tl(E: Operator, q: Scalar) -> Operator:
    """Build the Hecke generator g = q E - 1 from a Temperley-Lieb generator.

    Here ``q`` is the R-matrix q and E is assumed to satisfy E^2 = delta E
    with delta = q + 1/q.  The result satisfies the Hecke quadratic with
    parameter qH = q^2:

        g^2 = (qH - 1) g + qH.
    """
    ident = Operator.identity(E.d, E.n, E.field)
    return E.scale(q) - ident


@dataclass(frozen=True)
class HeckeGenerators:
    """Normalized Hecke generators G_1..G_{n-1} with G_i + G_i^-1 = k Id.

    Inverses are carried explicitly so that exact-field Baxterization never
    needs numerical inversion.
    """

    n: int
    k: Scalar
    gens: tuple[Operator, ...]
    inverses: tuple[Operator, ...]

    def __post_init__(self):
        if len(self.gens) != self.n - 1 or len(self.inverses) != self.n - 1:
            raise ValueError("need exactly n-1 generators and inverses")


def hecke_six_vertex(q: Scalar, n: int, field: str | None = None) -> HeckeGenerators:
    """Step-1 normalization of the six-vertex braid limit on n sites.

    With R the braid-limit matrix, G = (i/q) R satisfies
    G + G^-1 = i (q - 1/q) Id, using R^-1 = (R - (q^2 - 1)) / q^2.
    """
    exact_field = field == "exact" or (field is None and _is_exact(q))
    R = braid_limit(q, "exact" if exact_field else "complex")
    if exact_field:
        q = Exact.from_scalar(q) if not isinstance(q, Exact) else q
        i_unit = EXACT_I
        ident = Operator.identity(2, 2, "exact")
    else:
        i_unit = 1j
        ident = Operator.identity(2, 2, "complex")
    qi = _inv(q)
    G = R.scale(i_unit * qi)
    # R^{-1} = (R - (q^2-1) Id)/q^2, hence G^{-1} = (q/i) R^{-1}
    R_inv = (R - ident.scale(q * q - 1)).scale(qi * qi)
    G_inv = R_inv.scale(q * _inv(i_unit))
    k = i_unit * (q - qi)
    gens = tuple(embed_two_site(G, i, n) for i in range(1, n))
    invs = tuple(embed_two_site(G_inv, i, n) for i in range(1, n))
    return HeckeGenerators(n=n, k=k, gens=gens, inverses=invs)


def baxterize(G: HeckeGenerators, x: Scalar, i: int) -> Operator:
    """The Baxterized family R_i(x) = x G_i + x^-1 G_i^-1.

    At x = 1 this is G + G^-1 = k Id by the Step-1 normalization.  For the
    normalized six-vertex braid limit the family reproduces R_q(1/x) up to
    an overall scalar.
    """
    if not 1 <= i <= G.n - 1:
        raise IndexError(f"generator index {i} out of range 1..{G.n - 1}")
    if isinstance(x, Exact):
        if x.is_zero():
            raise DomainError("baxterize needs x != 0")
    elif x == 0:
        raise DomainError("baxterize needs x != 0")
    return G.gens[i - 1].scale(x) + G.inverses[i - 1].scale(_inv(x))


def check_baxter_condition(G1: Operator, G2: Operator, tol: float = 1e-10,
                           G1_inv: Operator | None = None,
                           G2_inv: Operator | None = None) -> float:
    """Residual of G1 G2^-1 G1 + G1^-1 G2 G1^-1 = G2 G1^-1 G2 + G2^-1 G1 G2^-1.

    Together with the braid relations, a zero residual is equivalent to the
    YBE for the Baxterized family.  Inverses are computed numerically unless
    supplied (mandatory for the exact field).
    """
    if G1_inv is None or G2_inv is None:
        if G1.field != "complex":
            raise ValueError("exact-field check needs explicit inverses")
        G1_inv = G1.inverse() if G1_inv is None else G1_inv
        G2_inv = G2.inverse() if G2_inv is None else G2_inv
    lhs = (G1 @ G2_inv @ G1) + (G1_inv @ G2 @ G1_inv)
    rhs = (G2 @ G1_inv @ G2) + (G2_inv @ G1 @ G2_inv)
    return lhs.max_abs_diff(rhs)
