"""Numerical q-series layer: Siegel functions, Klein forms, their
transformation behaviour, and the sign character of the bucket products.

Siegel values come from the classical q-product: for 0 <= a1 < 1,

    g_a(tau) = -q^(B2(a1)/2) e^(pi i a2 (a1 - 1)) (1 - q_z)
               prod_{n>=1} (1 - q^n q_z)(1 - q^n / q_z),

with q = e^(2 pi i tau) and q_z = e^(2 pi i (a1 tau + a2)).  Klein forms are
recovered as g_a / eta2 with eta2(tau) = q^(1/12) prod (1 - q^n)^2; any
constant in a classical discriminant normalization is dropped, because every
check here is a modulus or a ratio carrying equally many eta2 factors, so a
global constant cancels identically.

Identities that hold only up to a root of unity after index reduction are
never tested pointwise: checks are formulated on moduli, or on ratios whose
ambiguity is pinned to +-1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import bernoulli2, frac_part
from .cartan import (
    CartanContext,
    find_norm_minus_one_element,
    find_norm_one_generator,
    norm_class_partition,
)
from .errors import InvariantViolation

TRUNCATION_TARGET = 1e-12
DEFAULT_TERMS = 200

Matrix = Sequence[Sequence[int]]


@dataclass(frozen=True)
class QSeriesParams:
    """Evaluation parameters; terms must push |q|^terms below the target."""

    tau: complex
    terms: int = DEFAULT_TERMS
    a: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def __post_init__(self):
        _require_convergent(self.tau, self.terms)


def required_terms(tau: complex, target: float = TRUNCATION_TARGET) -> int:
    """Smallest truncation with |q|^terms < target at this tau."""
    y = complex(tau).imag
    if y <= 0:
        raise ValueError("tau must lie in the upper half plane")
    return max(1, math.ceil(-math.log(target) / (2 * math.pi * y)) + 1)


def _require_convergent(tau: complex, terms: int, target: float = TRUNCATION_TARGET):
    y = complex(tau).imag
    if y <= 0:
        raise ValueError("tau must lie in the upper half plane")
    if math.exp(-2 * math.pi * y * terms) >= target:
        raise ValueError(
            f"Im tau = {y:.4f} too small for target {target} at {terms} terms; "
            f"need at least {required_terms(tau, target)}"
        )


def eta_sq(tau: complex, terms: int = DEFAULT_TERMS) -> complex:
    """q^(1/12) prod_{n<=terms} (1 - q^n)^2 (constant normalization dropped)."""
    tau = complex(tau)
    _require_convergent(tau, terms)
    q = cmath.exp(2j * math.pi * tau)
    out = cmath.exp(2j * math.pi * tau / 12)
    qn = 1.0 + 0j
    for _ in range(terms):
        qn *= q
        f = 1 - qn
        out *= f * f
    return out


def _siegel_reduced(a1: Fraction, a2: Fraction, tau: complex, terms: int) -> complex:
    if not 0 <= a1 < 1:
        raise ValueError("first index must already lie in [0, 1)")
    _require_convergent(tau, terms)
    q = cmath.exp(2j * math.pi * tau)
    qz = cmath.exp(2j * math.pi * (float(a1) * tau + float(a2)))
    lead = -cmath.exp(1j * math.pi * tau * float(bernoulli2(a1)))
    lead *= cmath.exp(1j * math.pi * float(a2 * (a1 - 1)))
    out = lead * (1 - qz)
    qn = 1.0 + 0j
    for _ in range(terms):
        qn *= q
        out *= (1 - qn * qz) * (1 - qn / qz)
    return out


def siegel_eval(a, tau: complex, terms: int = DEFAULT_TERMS) -> complex:
    """Siegel q-product with the first index reduced into [0, 1).

    The reduction makes the value exact only up to a root of unity relative
    to an unreduced index; downstream checks are modulus- or ratio-based."""
    a1, a2 = Fraction(a[0]), Fraction(a[1])
    r1 = frac_part(a1)
    if r1 == 0 and a2.denominator == 1:
        raise ValueError("index must not lie in Z^2")
    return _siegel_reduced(r1, a2, complex(tau), terms)


def _translation_multiplier(r1: Fraction, r2: Fraction, b1: int, b2: int) -> complex:
    """epsilon((r1, r2), (b1, b2)) = (-1)^(b1 b2 + b1 + b2) e^(-pi i (b1 r2 - b2 r1))."""
    sign = -1.0 if (b1 * b2 + b1 + b2) % 2 else 1.0
    # reduce the rational phase mod 2 before going to floats
    x = 2 * frac_part((Fraction(b1) * r2 - Fraction(b2) * r1) / 2)
    return sign * cmath.exp(-1j * math.pi * float(x))


def klein_eval(a, tau: complex, terms: int = DEFAULT_TERMS) -> complex:
    """Klein form at any index outside Z^2, up to one global constant.

    The index is reduced into [0,1)^2 and the exact translation multiplier
    is applied, so integer translation and the modular law hold as written
    (the single unknown constant divides out of every ratio)."""
    a1, a2 = Fraction(a[0]), Fraction(a[1])
    r1, r2 = frac_part(a1), frac_part(a2)
    if r1 == 0 and r2 == 0:
        raise ValueError("index must not lie in Z^2")
    b1, b2 = int(a1 - r1), int(a2 - r2)
    tau = complex(tau)
    value = _siegel_reduced(r1, r2, tau, terms) / eta_sq(tau, terms)
    if (b1, b2) != (0, 0):
        value *= _translation_multiplier(r1, r2, b1, b2)
    return value


# ---------------------------------------------------------------------------
# transformation-law residuals

def _moebius(gamma: Matrix, tau: complex) -> complex:
    (a, b), (c, d) = gamma
    return (a * tau + b) / (c * tau + d)


def _index_times_matrix(a, gamma: Matrix) -> tuple[Fraction, Fraction]:
    (p, q), (r, s) = gamma
    a1, a2 = Fraction(a[0]), Fraction(a[1])
    return (a1 * p + a2 * r, a1 * q + a2 * s)


def klein_negation_residual(a, tau: complex, terms: int = DEFAULT_TERMS) -> float:
    """|k(-a) + k(a)| / |k(a)|: the negation law, exact complex form."""
    k = klein_eval(a, tau, terms)
    k_neg = klein_eval((-Fraction(a[0]), -Fraction(a[1])), tau, terms)
    return abs(k_neg + k) / abs(k)


def klein_translation_residual(
    a, b: tuple[int, int], tau: complex, terms: int = DEFAULT_TERMS
) -> float:
    """| |k(a+b)| - |k(a)| | / |k(a)| for integer b (multiplier has modulus 1)."""
    k = klein_eval(a, tau, terms)
    shifted = (Fraction(a[0]) + b[0], Fraction(a[1]) + b[1])
    return abs(abs(klein_eval(shifted, tau, terms)) - abs(k)) / abs(k)


def klein_modular_residual(
    a,
    gamma: Matrix,
    tau: complex,
    terms: int = DEFAULT_TERMS,
    *,
    complex_form: bool = False,
) -> float:
    """Modular law: k_a(gamma tau) (r tau + s) against k_(a gamma)(tau).

    Default compares moduli (the contract); complex_form checks the full
    identity, which the reduced evaluator also satisfies exactly."""
    (p, q), (r, s) = gamma
    if p * s - q * r != 1:
        raise ValueError("gamma must have determinant 1")
    gt = _moebius(gamma, tau)
    lhs = klein_eval(a, gt, max(terms, required_terms(gt))) * (r * tau + s)
    rhs = klein_eval(_index_times_matrix(a, gamma), tau, terms)
    if complex_form:
        return abs(lhs - rhs) / abs(rhs)
    return abs(abs(lhs) - abs(rhs)) / abs(rhs)


def infinity_order_slope(
    a, ys: Sequence[float] = (8.0, 10.0, 12.0), terms: int | None = None
) -> float:
    """Least-squares slope of log|g_a(iy)| against -2 pi y.

    Converges to B2(<a1>)/2 as the sample points grow; subleading factors
    decay like e^(-2 pi y <a1>), so small <a1> needs y well beyond the strip
    where the product is merely convergent."""
    xs, ls = [], []
    for y in ys:
        tau = complex(0.0, y)
        t = terms if terms is not None else required_terms(tau) + 8
        ls.append(math.log(abs(siegel_eval(a, tau, t))))
        xs.append(-2 * math.pi * y)
    n = len(xs)
    mean_x = sum(xs) / n
    mean_l = sum(ls) / n
    num = sum((x - mean_x) * (l - mean_l) for x, l in zip(xs, ls))
    den = sum((x - mean_x) ** 2 for x in xs)
    return num / den


# ---------------------------------------------------------------------------
# integer lifts of level-p^k matrices

def lift_to_sl2(m: Matrix, modulus: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """An integer matrix of determinant 1 congruent to m mod modulus.

    Requires det(m) = 1 mod modulus.  Construction: make the bottom row
    coprime over Z, complete it to SL2(Z) by Bezout, then fix the top row
    with a unipotent correction."""
    (a, b), (c, d) = [[x % modulus for x in row] for row in m]
    if (a * d - b * c) % modulus != 1:
        raise ValueError("matrix must have determinant 1 mod modulus")
    c0 = c if c else modulus
    d0 = d
    for t in range(c0 + 1):
        if math.gcd(c0, d + t * modulus) == 1:
            d0 = d + t * modulus
            break
    else:
        raise InvariantViolation("no coprime lift of the bottom row exists")
    # u*d0 + v*c0 = 1  ->  det [[u, -v], [c0, d0]] = 1
    u, v = _bezout(d0, c0)
    a0, b0 = u, -v
    # m * B^(-1) is unipotent upper-triangular mod modulus; read off its y
    y = (a * -b0 + b * a0) % modulus
    top = (a0 + y * c0, b0 + y * d0)
    lift = (top, (c0, d0))
    if top[0] * d0 - top[1] * c0 != 1:
        raise InvariantViolation("lift lost determinant 1")
    if any(
        (lift[i][j] - (m[i][j] % modulus)) % modulus for i in range(2) for j in range(2)
    ):
        raise InvariantViolation("lift is not congruent to the target")
    return lift


def _bezout(x: int, y: int) -> tuple[int, int]:
    """(u, v) with u*x + v*y = gcd(x, y)."""
    old_r, r = x, y
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    return old_u, old_v


def cartan_group_lift(ctx: CartanContext) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer lift of the multiplication matrix of a norm-one generator:
    an element of the arithmetic group fixing the non-split structure."""
    r = find_norm_one_generator(ctx)
    m = ctx.modulus
    target = ((r.a1, r.a2), (ctx.epsilon * r.a2 % m, r.a1))
    return lift_to_sl2(target, m)


def normalizer_coset_lift(ctx: CartanContext) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer lift of M_s C for a unit s of norm -1: lands in the
    normalizer coset outside the Cartan part."""
    s = find_norm_minus_one_element(ctx)
    m = ctx.modulus
    target = ((s.a1, -s.a2 % m), (ctx.epsilon * s.a2 % m, -s.a1 % m))
    return lift_to_sl2(target, m)


def classify_in_normalizer(ctx: CartanContext, gamma: Matrix) -> bool:
    """True if gamma mod p^k has Cartan shape [[a, b], [eps b, a]]; False if
    it has coset shape [[a, -b], [eps b, -a]]; ValueError otherwise."""
    m = ctx.modulus
    (a, b), (c, d) = [[x % m for x in row] for row in gamma]
    if d == a and c == ctx.epsilon * b % m:
        return True
    if d == (-a) % m and c == ctx.epsilon * (-b) % m:
        return False
    raise ValueError("matrix does not reduce into the normalizer")


def dihedral_sign(p: int, in_cartan_part: bool) -> int:
    """Predicted character value: -1 exactly when p = 1 mod 4 and the
    element lies outside the Cartan part of the normalizer."""
    return -1 if (p % 4 == 1 and not in_cartan_part) else 1


def t_plus_eval(
    ctx: CartanContext, h_index: int, tau: complex, terms: int | None = None
) -> complex:
    """Product of Klein forms over the norm bucket of w^h_index, at the
    canonical scaled indices (a1 / p^k, a2 / p^k)."""
    tau = complex(tau)
    t = terms if terms is not None else required_terms(tau) + 8
    m = ctx.modulus
    out = 1.0 + 0j
    for cls in norm_class_partition(ctx)[h_index]:
        out *= klein_eval((Fraction(cls.a1, m), Fraction(cls.a2, m)), tau, t)
    return out


def dihedral_transformation_ratio(
    ctx: CartanContext, h_index: int, gamma: Matrix, tau: complex
) -> complex:
    """T_h(gamma tau) / (J_gamma(tau) T_h(tau)) with the automorphy factor
    J_gamma(tau) = (c tau + d)^(-(p+1) p^(k-1)); equals +-1 exactly."""
    tau = complex(tau)
    (_, _), (c, d) = gamma
    weight = (ctx.p + 1) * ctx.p ** (ctx.k - 1)
    gt = _moebius(gamma, tau)
    lhs = t_plus_eval(ctx, h_index, gt)
    rhs = (c * tau + d) ** (-weight) * t_plus_eval(ctx, h_index, tau)
    return lhs / rhs


def check_Th_weight(
    ctx: CartanContext,
    h_index: int,
    gamma: Matrix,
    tau: complex,
    tol: float = 1e-6,
) -> bool:
    """Verify the weight law for the bucket product under gamma.

    The ratio against the automorphy factor must be real up to tol with
    modulus 1, and its sign must match the dihedral character prediction."""
    in_cartan = classify_in_normalizer(ctx, gamma)
    ratio = dihedral_transformation_ratio(ctx, h_index, gamma, tau)
    if abs(abs(ratio) - 1) > tol or abs(ratio.imag) > tol:
        return False
    sign = 1 if ratio.real > 0 else -1
    return sign == dihedral_sign(ctx.p, in_cartan)
