"""Exact expected payoffs from heuristic payoff tables.

Given a mixed profile, the probability of landing in a table row conditioned
on the focal player's strategy uses the co-player arrangement count, with the
focal player's own draw cancelled symbolically: instead of dividing the joint
probability by x_i, the focal strategy's exponent is reduced by one.  This
keeps the fitness defined on the whole simplex (including faces where
x_i = 0), which replicator dynamics relies on.
"""

from __future__ import annotations

from weakref import WeakSet

import numpy as np

from .tables import (
    AsymmetricHpt,
    Hpt,
    InvalidTableError,
    SymmetricHpt,
    co_player_multinomial,
    multinomial,
    validate_hpt,
)

_validated: WeakSet = WeakSet()


def ensure_valid(table: Hpt) -> None:
    """Validate a table once per object; re-raise violations as InvalidTableError."""
    if table in _validated:
        return
    report = validate_hpt(table)
    if not report.ok:
        raise InvalidTableError("; ".join(report.violations))
    _validated.add(table)


def _power_product(base: np.ndarray, exponents) -> float:
    out = 1.0
    for b, e in zip(base, exponents):
        e = int(e)
        if e:
            out *= float(b) ** e
    return out


def row_probability_symmetric(table: SymmetricHpt, row: int, x: np.ndarray, strategy: int) -> float:
    """P(row | profile x, focal player on `strategy`).

    Zero when the row has no player on the focal strategy; otherwise the
    co-player arrangement count times the product of profile weights with the
    focal strategy's exponent reduced by one.
    """
    counts = table.counts[row]
    if counts[strategy] == 0:
        return 0.0
    coeff = co_player_multinomial(counts, strategy, table.players)
    exponents = counts.copy()
    exponents[strategy] -= 1
    return coeff * _power_product(x, exponents)


def expected_payoff_symmetric(table: SymmetricHpt, x) -> np.ndarray:
    """Fitness vector f with f[i] = sum_j P(row j | x, i) * payoff[j, i].

    Defined for boundary profiles as well; rows are accumulated in index
    order so results are bit-stable per platform.
    """
    ensure_valid(table)
    x = np.asarray(x, dtype=float)
    f = np.zeros(table.strategies)
    for i in range(table.strategies):
        acc = 0.0
        for j in range(table.num_rows):
            if table.counts[j, i] == 0:
                continue
            acc += row_probability_symmetric(table, j, x, i) * table.payoffs[j, i]
        f[i] = acc
    return f


def row_probability_asymmetric(table: AsymmetricHpt, row: int, x: np.ndarray, y: np.ndarray,
                               strategy: int, population: int) -> float:
    """P(row | x, y, focal player of `population` on `strategy`).

    The focal population contributes its co-player arrangement count with the
    focal exponent reduced; the other population contributes a plain
    multinomial over its full composition.
    """
    if population == 1:
        own_counts, other_counts = table.counts1[row], table.counts2[row]
        own_profile, other_profile = x, y
        own_total, other_total = table.pop1_players, table.pop2_players
    elif population == 2:
        own_counts, other_counts = table.counts2[row], table.counts1[row]
        own_profile, other_profile = y, x
        own_total, other_total = table.pop2_players, table.pop1_players
    else:
        raise ValueError(f"population must be 1 or 2, got {population}")
    if own_counts[strategy] == 0:
        return 0.0
    coeff = (co_player_multinomial(own_counts, strategy, own_total)
             * multinomial(other_counts, other_total))
    exponents = own_counts.copy()
    exponents[strategy] -= 1
    return (coeff
            * _power_product(own_profile, exponents)
            * _power_product(other_profile, other_counts))


def expected_payoff_asymmetric(table: AsymmetricHpt, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Fitness vectors (f1, f2) for the two populations at joint profile (x, y)."""
    ensure_valid(table)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = table.strategies
    f1 = np.zeros(k)
    f2 = np.zeros(k)
    for i in range(k):
        acc = 0.0
        for j in range(table.num_rows):
            if table.counts1[j, i] == 0:
                continue
            acc += row_probability_asymmetric(table, j, x, y, i, 1) * table.payoffs1[j, i]
        f1[i] = acc
        acc = 0.0
        for j in range(table.num_rows):
            if table.counts2[j, i] == 0:
                continue
            acc += row_probability_asymmetric(table, j, x, y, i, 2) * table.payoffs2[j, i]
        f2[i] = acc
    return f1, f2


def expected_payoff(table: Hpt, x, y=None):
    """Dispatch on table shape: returns f for symmetric, (f1, f2) for asymmetric."""
    if isinstance(table, SymmetricHpt):
        if y is not None:
            raise ValueError("symmetric tables take a single profile")
        return expected_payoff_symmetric(table, x)
    if isinstance(table, AsymmetricHpt):
        if y is None:
            raise ValueError("asymmetric tables need profiles for both populations")
        return expected_payoff_asymmetric(table, x, y)
    raise TypeError(f"not an HPT: {type(table)!r}")
