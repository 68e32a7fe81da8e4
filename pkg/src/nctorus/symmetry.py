"""The integer-lattice conjugation action on field data, gauge-orbit
comparisons, and the scalar-current monomial detector.

Conjugating by w = U^m V^n is an inner automorphism; on coefficients it is
the closed-form phase map

    x_{a,b}  ->  exp(2 pi i theta (m b - n a)) x_{a,b},

kept here both in closed form (production) and as the two-sided twisted
product (test oracle).
"""

from __future__ import annotations

import cmath
import math

from .algebra import (
    DEFAULT_TOL,
    Tolerance,
    TorusElement,
    adjoint,
    delta,
    is_scalar,
    l1_norm,
    monomial,
    mul,
    one,
    sub,
    trace,
)
from .models import CoerciveQuadruple, EndoPair, unitary_defect

LatticePoint = tuple[int, int]


def _ad_phase(theta: float, m: int, n: int, a: int, b: int) -> complex:
    arg = m * b - n * a
    if arg == 0:
        return 1.0 + 0.0j
    return cmath.exp(2j * math.pi * theta * arg)


def ad(w_index: LatticePoint, x: TorusElement) -> TorusElement:
    """w x w* for w = U^m V^n, as the closed-form phase map on coefficients."""
    m, n = w_index
    if m == 0 and n == 0:
        return x
    out = {
        (a, b): c * _ad_phase(x.theta, m, n, a, b)
        for (a, b), c in x.coeffs.items()
    }
    return TorusElement(x.theta, out, tail_l1=x.tail_l1)


def ad_via_products(w_index: LatticePoint, x: TorusElement) -> TorusElement:
    """The same automorphism as two twisted products; oracle for ad()."""
    m, n = w_index
    w = monomial(x.theta, m, n)
    return mul(mul(w, x), adjoint(w))


def ad_on_endo(w_index: LatticePoint, phi: EndoPair) -> EndoPair:
    return EndoPair(ad(w_index, phi.phiU), ad(w_index, phi.phiV))


def ad_on_coercive(w_index: LatticePoint, phi: CoerciveQuadruple) -> CoerciveQuadruple:
    return CoerciveQuadruple(phi.mu, phi.nu, ad(w_index, phi.u), ad(w_index, phi.v))


def monomial_detector(w: TorusElement, tol: Tolerance = DEFAULT_TOL
                      ) -> tuple[bool, LatticePoint | None]:
    """Classify w as a scalar multiple of U^m V^n via its logarithmic currents.

    w* delta_1(w) and w* delta_2(w) are both scalar exactly on monomials, in
    which case the scalars are 2 pi i m |c|^2 and 2 pi i n |c|^2 and the
    witness (m, n) is recovered; the recovered currents must be purely
    imaginary within tolerance.
    """
    defect = unitary_defect(w)
    if defect > tol.truncation_eps:
        raise ValueError(f"monomial_detector needs a unitary input (defect {defect:.3e})")
    ws = adjoint(w)
    norm_sq = trace(mul(ws, w)).real
    witness = []
    for j in (1, 2):
        cur = mul(ws, delta(j, w))
        if not is_scalar(cur, tol):
            return False, None
        s = trace(cur)
        if abs(s.real) > math.sqrt(tol.algebraic_eps) * max(1.0, abs(s)):
            return False, None
        k = s.imag / (2.0 * math.pi * norm_sq)
        if abs(k - round(k)) > 1e-6:
            return False, None
        witness.append(round(k))
    return True, (witness[0], witness[1])


def projective_equal(u: TorusElement, v: TorusElement,
                     tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff v = lambda u for a unit-modulus scalar, within tolerance."""
    w = mul(adjoint(u), v)
    s = trace(w)
    off = l1_norm(sub(w, s * one(u.theta)))
    scale_ = max(1.0, l1_norm(w))
    return off <= 1e3 * tol.algebraic_eps * scale_ and abs(abs(s) - 1.0) <= 1e3 * tol.algebraic_eps
