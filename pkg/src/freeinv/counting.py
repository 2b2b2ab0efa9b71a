"""Generating-function counts for superorthogonal bases of invariant rings.

f_n is the dimension of the invariant homogeneous polynomials of degree n,
computed from character power sums; g_n is the number of degree-n basis
generators.  The two series satisfy f = 1/(1-g), i.e. g = (f-1)/f, because
every invariant decomposes uniquely as a word in the generators.  A closed
rational form for g(z) comes from clearing denominators in the character sum

    f(z) = (1/|G|) sum_classes #C_t / (1 - chi(t) z).

Once the f_n pass the integrality guard, the recursions run in exact integer
arithmetic; the closed form stays in complex coefficients (characters may be
irrational) and is compared only through its series expansion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import Character

# f_n farther than this from a nonnegative integer signals bad character data.
INTEGRALITY_TOL = 1e-6
# Agreement required between the closed-form series and the integer recursion.
SERIES_TOL = 1e-8


class CountingError(ValueError):
    """Character data produced impossible (non-integral or negative) counts."""


@dataclass(frozen=True)
class CountReport:
    """Counts through degree N plus the rational closed form of g(z)."""

    n_max: int
    f: tuple  # f_0..f_N, exact ints
    g: tuple  # g_0..g_N, exact ints
    closed_num: tuple  # complex numerator coefficients of g(z)
    closed_den: tuple  # complex denominator coefficients, den[0] = 1

    def to_json_dict(self) -> dict:
        return {
            "f": list(self.f),
            "g": list(self.g),
            "closed_form": {
                "num": [[c.real, c.imag] for c in self.closed_num],
                "den": [[c.real, c.imag] for c in self.closed_den],
            },
        }


def f_coefficients(char: Character, n_max: int) -> list[int]:
    """Invariant dimensions f_0..f_N from character power sums."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    sizes = np.asarray(char.class_sizes, dtype=float)
    values = np.asarray(char.values, dtype=complex)
    out = []
    powers = np.ones_like(values)
    for _ in range(n_max + 1):
        total = np.sum(sizes * powers) / char.group_order
        nearest = round(total.real)
        if abs(total - nearest) > INTEGRALITY_TOL or nearest < 0:
            raise CountingError(
                f"character sum {total} is not a nonnegative integer; "
                "the data does not describe a unitary representation"
            )
        out.append(int(nearest))
        powers = powers * values
    return out


def g_from_f(f: list[int]) -> list[int]:
    """Generator counts from invariant dimensions via
    g_n = f_n - sum_{k=1}^{n-1} g_k f_{n-k}."""
    if not f or f[0] != 1:
        raise CountingError(f"f_0 must be 1, got {f[:1]}")
    g = [0] * len(f)
    for n in range(1, len(f)):
        conv = sum(g[k] * f[n - k] for k in range(1, n))
        g[n] = f[n] - conv
        if g[n] < 0:
            raise CountingError(f"g_{n} = {g[n]} is negative; inconsistent f sequence")
    return g


def _poly_mul(a: list[complex], b: list[complex]) -> list[complex]:
    out = [0j] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return out


def closed_form(char: Character) -> tuple[list[complex], list[complex]]:
    """Numerator and denominator coefficients of the rational function

        g(z) = 1 - |G| * prod_s (1 - chi(s) z)
                     / sum_t #C_t prod_{s != t} (1 - chi(s) z)

    with one factor per conjugacy class, normalized so den[0] = 1.  Repeated
    character values are kept as-is (the denominator may have repeated roots).
    """
    values = list(char.values)
    sizes = list(char.class_sizes)
    product = [1 + 0j]
    for chi in values:
        product = _poly_mul(product, [1 + 0j, -chi])
    den = [0j] * len(product)
    for t, size in enumerate(sizes):
        partial = [1 + 0j]
        for s, chi in enumerate(values):
            if s != t:
                partial = _poly_mul(partial, [1 + 0j, -chi])
        for i, c in enumerate(partial):
            den[i] += size * c
    num = [d - char.group_order * p for d, p in zip(den, product)]
    lead = den[0]  # equals |G| exactly
    num = [c / lead for c in num]
    den = [c / lead for c in den]
    while len(num) > 1 and abs(num[-1]) < SERIES_TOL:
        num.pop()
    while len(den) > 1 and abs(den[-1]) < SERIES_TOL:
        den.pop()
    return num, den


def series_coefficients(num: list[complex], den: list[complex], n_max: int) -> list[complex]:
    """Taylor coefficients of num/den through degree n_max."""
    if abs(den[0]) == 0:
        raise CountingError("denominator has zero constant term")
    out = []
    for n in range(n_max + 1):
        total = num[n] if n < len(num) else 0j
        for k in range(1, min(n, len(den) - 1) + 1):
            total -= den[k] * out[n - k]
        out.append(total / den[0])
    return out


def count_report(char: Character, n_max: int) -> CountReport:
    """Full consistency-checked report: integer f and g sequences plus the
    closed form, whose expansion must match g to SERIES_TOL."""
    f = f_coefficients(char, n_max)
    g = g_from_f(f)
    num, den = closed_form(char)
    series = series_coefficients(num, den, n_max)
    for n, (exact, approx) in enumerate(zip(g, series)):
        if abs(approx - exact) > SERIES_TOL:
            raise CountingError(
                f"closed-form series term {n} is {approx}, expected {exact}"
            )
    return CountReport(
        n_max=n_max,
        f=tuple(f),
        g=tuple(g),
        closed_num=tuple(num),
        closed_den=tuple(den),
    )
