"""Finite-check certification of arithmetic-progression congruence families.

A family sum over left residues = sum over right residues (mod ell^N) on the
progression delta*n + r is verified for every n below period/delta; the
decomposition plus the periodicity of the head A then extend the result to
all n.  The coefficient sequence used for checking always comes from the
original unreduced product, so rewrite bugs cannot leak into the verdict.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .decompose import GFKind, build_spec, split_AB
from .errors import (
    CertificateFailed,
    EmptyMultiset,
    InvalidParameter,
    SplitFailed,
)
from .periods import PartMultiset, kwong_period
from .series import ModSeries, Modulus, series_from_spec

PROVED = "PROVED"
COUNTEREXAMPLE = "COUNTEREXAMPLE"
INAPPLICABLE = "INAPPLICABLE"


@dataclass(frozen=True)
class CongruenceFamily:
    """sum of lambda(delta*n + a) over left == sum over right, mod ell^N.

    Construction canonicalizes: residues sorted, entries common to both sides
    cancelled, and the lexicographically smaller side stored on the left
    (an empty right side stays right; it encodes "== 0")."""

    delta: int
    left: tuple
    right: tuple
    modulus: Modulus

    def __post_init__(self):
        if self.delta < 1:
            raise InvalidParameter("delta must be >= 1")
        left = sorted(int(a) for a in self.left)
        right = sorted(int(b) for b in self.right)
        for r in left + right:
            if not 0 <= r < self.delta:
                raise InvalidParameter(f"residue {r} outside [0, {self.delta})")
        left, right = _cancel_common(left, right)
        if not left and not right:
            raise InvalidParameter("family is trivial after cancellation")
        if right and (not left or tuple(right) < tuple(left)):
            left, right = right, left
        object.__setattr__(self, "left", tuple(left))
        object.__setattr__(self, "right", tuple(right))

    def __str__(self):
        lhs = "{" + ",".join(str(a) for a in self.left) + "}"
        rhs = "{" + ",".join(str(b) for b in self.right) + "}" if self.right else "0"
        return f"{lhs} == {rhs}"


def _cancel_common(left, right):
    cl, cr = Counter(left), Counter(right)
    common = cl & cr
    return sorted((cl - common).elements()), sorted((cr - common).elements())


@dataclass(frozen=True)
class Certificate:
    """Outcome of a finite-check certification run."""

    family: CongruenceFamily
    target: GFKind
    status: str
    a_multiset: PartMultiset | None = None
    period_used: int | None = None
    check_bound: int | None = None
    witness: tuple | None = None  # (n, left_sum, right_sum) for a counterexample
    reason: str | None = None
    derivation: tuple = ()

    def proved(self) -> bool:
        return self.status == PROVED


def _progression_sums(series: ModSeries, delta: int, residues, count: int) -> np.ndarray:
    """Vector of sum over residues of lambda(delta*n + r), n = 0..count-1."""
    m = series.modulus.value
    data = series.array()
    total = np.zeros(count, dtype=np.int64)
    base = delta * np.arange(count, dtype=np.int64)
    for r in residues:
        total += data[base + r]
    return total % m


def certify(
    target: GFKind,
    family: CongruenceFamily,
    validation_length: int | None = None,
) -> Certificate:
    """Verify the family for all n below period/delta and certify it for all n.

    Pipeline: build the product, split it into A*B at the family's modulus and
    delta, take the minimal period of A's multiset, lift it to a multiple of
    delta, expand the original product that far, and compare the progression
    sums on the finite range.  A failed split or an empty head yields status
    INAPPLICABLE; a failed comparison yields the first counterexample.
    """
    spec = build_spec(target)
    modulus, delta = family.modulus, family.delta
    try:
        dec = split_AB(spec, modulus, delta, validation_length)
        info = kwong_period(dec.a_multiset, modulus.prime, modulus.exponent)
    except (SplitFailed, CertificateFailed, EmptyMultiset) as exc:
        return Certificate(
            family=family,
            target=target,
            status=INAPPLICABLE,
            reason=f"{type(exc).__name__}: {exc}",
        )
    period = math.lcm(info.period, delta)
    bound = period // delta
    lam = series_from_spec(spec, modulus, period + delta)
    left = _progression_sums(lam, delta, family.left, bound)
    right = _progression_sums(lam, delta, family.right, bound)
    mismatch = np.nonzero(left != right)[0]
    if mismatch.size:
        n = int(mismatch[0])
        return Certificate(
            family=family,
            target=target,
            status=COUNTEREXAMPLE,
            a_multiset=dec.a_multiset,
            period_used=period,
            check_bound=bound,
            witness=(n, int(left[n]), int(right[n])),
            derivation=dec.derivation,
        )
    return Certificate(
        family=family,
        target=target,
        status=PROVED,
        a_multiset=dec.a_multiset,
        period_used=period,
        check_bound=bound,
        derivation=dec.derivation,
    )


@dataclass(frozen=True)
class SpotCheckResult:
    family: CongruenceFamily
    target: GFKind
    n_max: int
    failure: tuple | None  # (n, left_sum, right_sum) or None

    @property
    def ok(self) -> bool:
        return self.failure is None


def spot_check(target: GFKind, family: CongruenceFamily, n_max: int) -> SpotCheckResult:
    """Test the congruence directly for every n <= n_max, with no periodicity
    reasoning at all.  An independent sanity check beyond the certified bound."""
    if n_max < 1:
        raise InvalidParameter("n_max must be >= 1")
    spec = build_spec(target)
    delta = family.delta
    lam = series_from_spec(spec, family.modulus, delta * n_max + delta)
    count = n_max + 1
    left = _progression_sums(lam, delta, family.left, count)
    right = _progression_sums(lam, delta, family.right, count)
    mismatch = np.nonzero(left != right)[0]
    if mismatch.size:
        n = int(mismatch[0])
        return SpotCheckResult(family, target, n_max, (n, int(left[n]), int(right[n])))
    return SpotCheckResult(family, target, n_max, None)
