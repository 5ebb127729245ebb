"""Prior-art payoff formulas, kept verbatim for side-by-side error comparison.

The older pipeline draws *all* players of a symmetric table from the mixed
profile (plain multinomial row probabilities) and rescales each strategy's
payoff sum by 1 - (1 - x_i)^n, the probability that at least one player
landed on strategy i.  For 1-vs-1 two-population tables it first splits the
table into two symmetric counterpart tables, one per population, and runs
each population's dynamics on its own table.  Both steps lose accuracy on
general tables; that gap is exactly what the comparison reports quantify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .payoff import ensure_valid, expected_payoff_asymmetric, expected_payoff_symmetric
from .tables import (
    AsymmetricHpt,
    SymmetricHpt,
    UnsupportedShapeError,
    enumerate_rows_symmetric,
    multinomial,
)


@dataclass(frozen=True)
class LegacyPayoff:
    """Legacy fitness vector plus flags for components with a zero denominator."""

    values: np.ndarray
    degenerate: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "degenerate", np.asarray(self.degenerate, dtype=bool))


class DecomposedPair(NamedTuple):
    pop1_table: SymmetricHpt
    pop2_table: SymmetricHpt


def legacy_expected_payoff(table: SymmetricHpt, x) -> LegacyPayoff:
    """Prior-art fitness: multinomial row probabilities over all n players,
    normalized per strategy by 1 - (1 - x_i)^n.

    The normalization exponent follows the table's player count; the original
    write-up fixes n = 2.  Components with x_i = 0 have a zero denominator:
    they are reported as 0 and flagged degenerate.
    """
    ensure_valid(table)
    x = np.asarray(x, dtype=float)
    n = table.players
    row_probs = np.empty(table.num_rows)
    for j in range(table.num_rows):
        prob = float(multinomial(table.counts[j], n))
        for b, e in zip(x, table.counts[j]):
            e = int(e)
            if e:
                prob *= float(b) ** e
        row_probs[j] = prob
    values = np.zeros(table.strategies)
    degenerate = np.zeros(table.strategies, dtype=bool)
    for i in range(table.strategies):
        numerator = 0.0
        for j in range(table.num_rows):
            numerator += row_probs[j] * table.payoffs[j, i]
        denominator = 1.0 - (1.0 - x[i]) ** n
        if denominator == 0.0:
            degenerate[i] = True
            values[i] = 0.0
        else:
            values[i] = numerator / denominator
    return LegacyPayoff(values, degenerate)


def _counterpart_table(matrix: np.ndarray) -> SymmetricHpt:
    """2-player symmetric HPT of a single-population payoff matrix.

    Row (2 e_i) pays matrix[i, i]; row (e_i + e_j) pays matrix[i, j] to the
    player on i and matrix[j, i] to the player on j.
    """
    k = matrix.shape[0]
    counts = enumerate_rows_symmetric(2, k)
    payoffs = np.zeros(counts.shape)
    for r, comp in enumerate(counts):
        support = [i for i in range(k) if comp[i]]
        if len(support) == 1:
            i = support[0]
            payoffs[r, i] = matrix[i, i]
        else:
            i, j = support
            payoffs[r, i] = matrix[i, j]
            payoffs[r, j] = matrix[j, i]
    return SymmetricHpt(2, k, counts, payoffs)


def decompose_asymmetric(table: AsymmetricHpt) -> DecomposedPair:
    """Split a 1-vs-1 two-population table into the two symmetric counterparts.

    Population 1 keeps its own payoff matrix A as a 2-player symmetric table;
    population 2 keeps B transposed.  Only defined for m = n = 1: the prior
    art gives no recipe for multiplayer two-population tables, which is the
    gap the exact formulas close.
    """
    ensure_valid(table)
    if table.pop1_players != 1 or table.pop2_players != 1:
        raise UnsupportedShapeError(
            "legacy decomposition is defined only for 1-vs-1 tables; "
            f"got {table.pop1_players} vs {table.pop2_players} players")
    k = table.strategies
    a = np.zeros((k, k))
    b = np.zeros((k, k))
    for j in range(table.num_rows):
        s1 = int(np.argmax(table.counts1[j]))
        s2 = int(np.argmax(table.counts2[j]))
        a[s1, s2] = table.payoffs1[j, s1]
        b[s1, s2] = table.payoffs2[j, s2]
    return DecomposedPair(_counterpart_table(a), _counterpart_table(b.T))


@dataclass
class ComparisonEntry:
    profile: tuple
    exact: tuple
    legacy: tuple
    abs_error: tuple
    degenerate: tuple


def legacy_error_report(table, profiles: Sequence) -> list[ComparisonEntry]:
    """Per profile: exact fitness, legacy fitness, and componentwise |error|.

    For symmetric tables `profiles` holds single profiles; for 1-vs-1
    asymmetric tables it holds (x, y) pairs and both populations are compared
    (the legacy side evaluates each counterpart table at its own population's
    profile).
    """
    entries: list[ComparisonEntry] = []
    if isinstance(table, SymmetricHpt):
        for x in profiles:
            x = np.asarray(x, dtype=float)
            exact = expected_payoff_symmetric(table, x)
            old = legacy_expected_payoff(table, x)
            entries.append(ComparisonEntry(
                profile=(tuple(x.tolist()),),
                exact=(tuple(exact.tolist()),),
                legacy=(tuple(old.values.tolist()),),
                abs_error=(tuple(np.abs(exact - old.values).tolist()),),
                degenerate=(tuple(old.degenerate.tolist()),),
            ))
        return entries
    if isinstance(table, AsymmetricHpt):
        pair = decompose_asymmetric(table)
        for x, y in profiles:
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            f1, f2 = expected_payoff_asymmetric(table, x, y)
            old1 = legacy_expected_payoff(pair.pop1_table, x)
            old2 = legacy_expected_payoff(pair.pop2_table, y)
            entries.append(ComparisonEntry(
                profile=(tuple(x.tolist()), tuple(y.tolist())),
                exact=(tuple(f1.tolist()), tuple(f2.tolist())),
                legacy=(tuple(old1.values.tolist()), tuple(old2.values.tolist())),
                abs_error=(tuple(np.abs(f1 - old1.values).tolist()),
                           tuple(np.abs(f2 - old2.values).tolist())),
                degenerate=(tuple(old1.degenerate.tolist()), tuple(old2.degenerate.tolist())),
            ))
        return entries
    raise TypeError(f"not an HPT: {type(table)!r}")
