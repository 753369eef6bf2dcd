"""Named invariant suites surfaced by the command line.

Each function returns a list of Check results; a suite passes when every
check does.  The algebraic suite covers the group-ring identities, the
structure suite the cross-route order equality, and the analytic suite the
desk-scale q-series verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import bernoulli2
from .cartan import CartanContext, norm_class_partition, valid_epsilons
from .classgroup import (
    bernoulli_formula_k1,
    float_crosscheck,
    generator_matrix,
    order,
    structure,
)
from .errors import InvariantViolation
from .siegel import (
    cartan_group_lift,
    check_Th_weight,
    infinity_order_slope,
    klein_modular_residual,
    klein_negation_residual,
    klein_translation_residual,
    normalizer_coset_lift,
)
from .stickelberger import somme_identities_check, stickelberger_data, theta


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def _check(name: str, fn) -> Check:
    try:
        passed, detail = fn()
    except (InvariantViolation, ValueError) as exc:
        return Check(name, False, str(exc))
    return Check(name, passed, detail)


def algebraic_checks(p: int, k: int = 1) -> list[Check]:
    ctx = CartanContext.create(p, k)
    data = stickelberger_data(ctx)
    out = []

    out.append(
        _check("sum of a_i vanishes", lambda: (sum(data.a) == 0, f"n = {ctx.n}"))
    )

    expected_deg = -Fraction((p * p - 1) * p ** (3 * k - 2), 24)
    out.append(
        _check(
            "degree of theta'",
            lambda: (
                data.theta_prime.degree() == expected_deg,
                f"deg = {data.theta_prime.degree()}",
            ),
        )
    )

    denom = math.lcm(*(ai.denominator for ai in data.a))
    out.append(
        _check(
            "d * a_i integral",
            lambda: (
                all((data.d * ai).denominator == 1 for ai in data.a),
                f"d = {data.d}, observed a_i denominator lcm = {denom}",
            ),
        )
    )

    def lattice_rows():
        rows = generator_matrix(ctx)
        return len(rows) == ctx.n, f"{len(rows)} integral generator rows"

    out.append(_check("unit-divisor lattice rows integral", lattice_rows))

    def somme_all():
        units = [h for h in range(1, (ctx.modulus + 1) // 2) if h % p]
        bad = [h for h in units if not somme_identities_check(ctx, h)]
        return not bad, f"{len(units)} classes checked" + (
            f"; failing: {bad}" if bad else ""
        )

    out.append(_check("quadratic bucket sums (all h)", somme_all))

    def buckets():
        part = norm_class_partition(ctx)
        sizes = {len(b) for b in part.values()}
        return sizes == {ctx.bucket_size()}, f"{ctx.n} buckets of {ctx.bucket_size()}"

    out.append(_check("norm buckets uniform", buckets))
    out.append(
        _check(
            "eigenvalue/determinant float crosscheck",
            lambda: (float_crosscheck(ctx, tol=1e-9), "relative 1e-9"),
        )
    )
    return out


def eps_independence_checks(p: int, k: int = 1) -> list[Check]:
    gen = valid_epsilons(p)
    eps1 = next(gen)
    eps2 = next(gen)

    def same_theta():
        t1 = theta(CartanContext.create(p, k, eps1))
        t2 = theta(CartanContext.create(p, k, eps2))
        return t1 == t2, f"eps in {{{eps1}, {eps2}}}"

    return [_check("theta independent of eps", same_theta)]


def structure_checks(p: int, k: int = 1) -> list[Check]:
    ctx = CartanContext.create(p, k)
    out = []

    def snf_route():
        o = order(ctx)
        s = structure(ctx)
        return math.prod(s) == o, f"invariant factors {list(s)}"

    out.append(_check("order equals product of invariant factors", snf_route))

    if k == 1:
        def bernoulli_route():
            value = bernoulli_formula_k1(p, check=False)
            return value == order(ctx), f"Bernoulli-number route = {value}"

        out.append(_check("order equals Bernoulli-number formula", bernoulli_route))
    return out


ANALYTIC_TAUS = (1j, 0.3 + 1j, 2j)
ANALYTIC_MATRICES = (((1, 1), (0, 1)), ((0, -1), (1, 0)))


def _grid(den: int):
    for i in range(den):
        for j in range(den):
            if i or j:
                yield (Fraction(i, den), Fraction(j, den))


def analytic_checks(p: int, tol: float = 1e-8) -> list[Check]:
    """Klein-form laws on the level-p index grid, the order-at-infinity
    slope, and (for p = 5, 7) the dihedral sign of the bucket products."""
    out = []

    def negation():
        worst = max(
            klein_negation_residual(a, tau) for a in _grid(p) for tau in ANALYTIC_TAUS
        )
        return worst < tol, f"worst residual {worst:.2e}"

    def translation():
        worst = max(
            klein_translation_residual(a, b, tau)
            for a in _grid(p)
            for b in ((1, 0), (0, 1), (1, 1))
            for tau in ANALYTIC_TAUS
        )
        return worst < tol, f"worst residual {worst:.2e}"

    def modular():
        worst = max(
            klein_modular_residual(a, g, tau)
            for a in _grid(p)
            for g in ANALYTIC_MATRICES
            for tau in ANALYTIC_TAUS
        )
        return worst < tol, f"worst residual {worst:.2e}"

    def slope():
        # subleading terms decay like e^(-2 pi y / p): scale samples with p
        ys = tuple(c * p / 5 for c in (8.0, 10.0, 12.0))
        worst = 0.0
        for a in _grid(p):
            target = float(bernoulli2(Fraction(a[0]))) / 2
            got = infinity_order_slope(a, ys=ys)
            worst = max(worst, abs(got - target) / abs(target))
        return worst <= 0.01, f"worst relative error {worst:.2%}"

    out.append(_check("Klein negation law", negation))
    out.append(_check("Klein translation law (moduli)", translation))
    out.append(_check("Klein modular law (moduli)", modular))
    out.append(_check("order at infinity slope within 1%", slope))

    if p in (5, 7):
        def dihedral():
            ctx = CartanContext.create(p)
            tau = 0.3 + 1j
            gr = cartan_group_lift(ctx)
            gc = normalizer_coset_lift(ctx)
            ok = all(
                check_Th_weight(ctx, h, g, tau, tol=1e-6)
                for h in range(1, ctx.n + 1)
                for g in (gr, gc)
            )
            expected = "+1" if p % 4 == 3 else "-1"
            return ok, f"coset sign {expected} confirmed on every bucket"

        out.append(_check("dihedral sign of bucket products", dihedral))
    return out
