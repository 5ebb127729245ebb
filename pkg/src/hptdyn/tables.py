"""Heuristic payoff tables: count-row enumeration, combinatorics, validation.

A heuristic payoff table (HPT) compresses the payoff tensor of a game with
interchangeable players: each row is a composition of the player count over
the strategy set, paired with the per-strategy payoffs realized under that
composition.  Two table shapes are supported: a single homogeneous population
(symmetric games) and two homogeneous populations of sizes m and n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

# Enumeration / coefficient guards.  Coefficients are exact integers but the
# artifact promises 64-bit results; tables anywhere near these bounds are not
# representable downstream (float payoff sums, row storage), so refuse early.
MAX_ROWS = 2_000_000
MAX_COEFFICIENT = 2**63 - 1

PROFILE_TOL = 1e-9


class CapacityError(OverflowError):
    """A combinatorial quantity exceeds the supported integer/storage range."""


class UnsupportedShapeError(ValueError):
    """The operation is not defined for tables of this shape."""


class InvalidTableError(ValueError):
    """Raised when a computation is asked to run on a table that fails validation."""


def compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """All compositions of `total` into `parts` non-negative integers.

    Ordered reverse-lexicographically: first (total, 0, ..., 0), last
    (0, ..., 0, total).  The ordering is the canonical row order used
    throughout so that files round-trip bit-stably.
    """
    if total < 0 or parts < 1:
        raise ValueError(f"need total >= 0 and parts >= 1, got {total}, {parts}")
    if parts == 1:
        return [(total,)]
    out: list[tuple[int, ...]] = []
    for head in range(total, -1, -1):
        for tail in compositions(total - head, parts - 1):
            out.append((head,) + tail)
    return out


def num_compositions(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1)


def _checked(value: int) -> int:
    if value > MAX_COEFFICIENT:
        raise CapacityError(f"coefficient {value} exceeds 64-bit range")
    return value


def multinomial(counts: Sequence[int], total: int | None = None) -> int:
    """Multinomial coefficient total! / prod(counts_l!).

    `total` defaults to sum(counts) and is cross-checked when given.
    """
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise ValueError(f"negative count in {counts}")
    s = sum(counts)
    if total is not None and s != total:
        raise ValueError(f"counts {counts} sum to {s}, expected {total}")
    result = 1
    running = 0
    for c in counts:
        running += c
        result = _checked(result * math.comb(running, c))
    return result


def co_player_multinomial(counts: Sequence[int], focal: int, total: int | None = None) -> int:
    """Arrangements of the total-1 co-players once one player is pinned to `focal`.

    Equals (total-1)! / (N_1! ... (N_focal - 1)! ... N_k!).  Requires
    counts[focal] >= 1; a row with no player on the focal strategy has no
    such arrangement and callers must branch to the zero-probability case.
    """
    counts = [int(c) for c in counts]
    if not 0 <= focal < len(counts):
        raise IndexError(f"focal index {focal} out of range for {len(counts)} strategies")
    if counts[focal] < 1:
        raise ValueError(f"counts[{focal}] = 0: no arrangement pins a player there")
    reduced = list(counts)
    reduced[focal] -= 1
    if total is not None and sum(counts) != total:
        raise ValueError(f"counts {counts} sum to {sum(counts)}, expected {total}")
    return multinomial(reduced)


def as_profile(values: Sequence[float], strategies: int | None = None, *, tol: float = PROFILE_TOL) -> np.ndarray:
    """Validate a point on the probability simplex and return it read-only.

    Raises ValueError if entries leave [0, 1] or the sum drifts from 1 by
    more than `tol`.  The vector is returned unnormalized.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"profile must be a vector, got shape {x.shape}")
    if strategies is not None and x.shape[0] != strategies:
        raise ValueError(f"profile has {x.shape[0]} weights, expected {strategies}")
    if not np.all(np.isfinite(x)):
        raise ValueError("profile has non-finite weights")
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise ValueError(f"profile weights outside [0, 1]: {x.tolist()}")
    drift = abs(float(x.sum()) - 1.0)
    if drift > tol:
        raise ValueError(f"profile sums to {x.sum()}, off by {drift:.3e} (> {tol:.0e})")
    x = x.copy()
    x.flags.writeable = False
    return x


def _frozen_int_matrix(value, rows: int, cols: int, name: str) -> np.ndarray:
    m = np.asarray(value)
    if m.shape != (rows, cols):
        raise ValueError(f"{name} must have shape {(rows, cols)}, got {m.shape}")
    if not np.issubdtype(m.dtype, np.integer):
        rounded = np.rint(m)
        if not np.array_equal(rounded, m):
            raise ValueError(f"{name} must hold integers")
        m = rounded
    m = m.astype(np.int64)
    if np.any(m < 0):
        raise ValueError(f"{name} must be non-negative")
    m.flags.writeable = False
    return m


def _frozen_float_matrix(value, rows: int, cols: int, name: str) -> np.ndarray:
    m = np.asarray(value, dtype=float)
    if m.shape != (rows, cols):
        raise ValueError(f"{name} must have shape {(rows, cols)}, got {m.shape}")
    m = m.copy()
    m.flags.writeable = False
    return m


@dataclass(frozen=True, eq=False)
class SymmetricHpt:
    """HPT of an n-player k-strategy symmetric game.

    `counts[j]` is the composition of the n players over the k strategies in
    row j; `payoffs[j, i]` is the payoff a player on strategy i receives
    under that composition (exactly 0 where counts[j, i] == 0).
    """

    players: int
    strategies: int
    counts: np.ndarray
    payoffs: np.ndarray
    strategy_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.players < 2:
            raise ValueError(f"symmetric table needs players >= 2, got {self.players}")
        if self.strategies < 2:
            raise ValueError(f"symmetric table needs strategies >= 2, got {self.strategies}")
        rows = np.asarray(self.counts).shape[0]
        object.__setattr__(self, "counts", _frozen_int_matrix(self.counts, rows, self.strategies, "counts"))
        object.__setattr__(self, "payoffs", _frozen_float_matrix(self.payoffs, rows, self.strategies, "payoffs"))
        if self.strategy_names is not None:
            names = tuple(self.strategy_names)
            if len(names) != self.strategies:
                raise ValueError("strategy_names length mismatch")
            object.__setattr__(self, "strategy_names", names)

    @property
    def num_rows(self) -> int:
        return self.counts.shape[0]

    def iter_rows(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for j in range(self.num_rows):
            yield self.counts[j], self.payoffs[j]


@dataclass(frozen=True, eq=False)
class AsymmetricHpt:
    """HPT of a 2-population game: m players in population 1, n in population 2.

    Rows pair one composition of population 1 with one of population 2;
    `payoffs1`/`payoffs2` hold each population's per-strategy payoffs.
    `padded` records strategy columns that were added by the loader to
    equalize unequal strategy-set sizes (never played, payoff 0).
    """

    pop1_players: int
    pop2_players: int
    strategies: int
    counts1: np.ndarray
    counts2: np.ndarray
    payoffs1: np.ndarray
    payoffs2: np.ndarray
    strategy_names: tuple[tuple[str, ...], tuple[str, ...]] | None = None
    padded: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())

    def __post_init__(self):
        if self.pop1_players < 1 or self.pop2_players < 1:
            raise ValueError("both populations need at least one player")
        if self.strategies < 2:
            raise ValueError(f"asymmetric table needs strategies >= 2, got {self.strategies}")
        rows = np.asarray(self.counts1).shape[0]
        k = self.strategies
        object.__setattr__(self, "counts1", _frozen_int_matrix(self.counts1, rows, k, "counts1"))
        object.__setattr__(self, "counts2", _frozen_int_matrix(self.counts2, rows, k, "counts2"))
        object.__setattr__(self, "payoffs1", _frozen_float_matrix(self.payoffs1, rows, k, "payoffs1"))
        object.__setattr__(self, "payoffs2", _frozen_float_matrix(self.payoffs2, rows, k, "payoffs2"))
        if self.strategy_names is not None:
            names = tuple(tuple(ns) for ns in self.strategy_names)
            if len(names) != 2 or any(len(ns) != k for ns in names):
                raise ValueError("strategy_names must give one name per strategy per population")
            object.__setattr__(self, "strategy_names", names)
        object.__setattr__(self, "padded", tuple(tuple(int(c) for c in cols) for cols in self.padded))

    @property
    def num_rows(self) -> int:
        return self.counts1.shape[0]


Hpt = SymmetricHpt | AsymmetricHpt


def enumerate_rows_symmetric(players: int, strategies: int) -> np.ndarray:
    """Canonical count rows of an n-player k-strategy symmetric HPT.

    Reverse-lexicographic compositions of `players` into `strategies` parts;
    C(n+k-1, k-1) rows.
    """
    if players < 1 or strategies < 1:
        raise ValueError("need players >= 1 and strategies >= 1")
    expected = num_compositions(players, strategies)
    if expected > MAX_ROWS:
        raise CapacityError(f"{expected} rows exceed the supported table size ({MAX_ROWS})")
    rows = np.array(compositions(players, strategies), dtype=np.int64)
    rows.flags.writeable = False
    return rows


def enumerate_rows_asymmetric(pop1_players: int, pop2_players: int, strategies: int) -> tuple[np.ndarray, np.ndarray]:
    """Canonical count rows for a 2-population HPT, as aligned (pop1, pop2) arrays.

    The cartesian product of the two composition lists: population 1 varies
    in the outer (slower) position, population 2 in the inner; each list in
    reverse-lexicographic order.  C(m+k-1, m) * C(n+k-1, n) rows.
    """
    if pop1_players < 1 or pop2_players < 1 or strategies < 1:
        raise ValueError("need both player counts >= 1 and strategies >= 1")
    r1 = num_compositions(pop1_players, strategies)
    r2 = num_compositions(pop2_players, strategies)
    if r1 * r2 > MAX_ROWS:
        raise CapacityError(f"{r1 * r2} rows exceed the supported table size ({MAX_ROWS})")
    comps1 = compositions(pop1_players, strategies)
    comps2 = compositions(pop2_players, strategies)
    counts1 = np.array([c1 for c1 in comps1 for _ in comps2], dtype=np.int64)
    counts2 = np.array([c2 for _ in comps1 for c2 in comps2], dtype=np.int64)
    counts1.flags.writeable = False
    counts2.flags.writeable = False
    return counts1, counts2


def make_symmetric_hpt(players: int, payoff_rows, strategy_names=None) -> SymmetricHpt:
    """Build a SymmetricHpt with canonical row order from per-row payoff vectors."""
    payoffs = np.asarray(payoff_rows, dtype=float)
    strategies = payoffs.shape[1]
    counts = enumerate_rows_symmetric(players, strategies)
    if payoffs.shape[0] != counts.shape[0]:
        raise ValueError(f"expected {counts.shape[0]} payoff rows, got {payoffs.shape[0]}")
    return SymmetricHpt(players, strategies, counts, payoffs, strategy_names)


def make_asymmetric_hpt(pop1_players: int, pop2_players: int, payoff_rows1, payoff_rows2,
                        strategy_names=None) -> AsymmetricHpt:
    """Build an AsymmetricHpt with canonical row order from per-row payoff vectors."""
    payoffs1 = np.asarray(payoff_rows1, dtype=float)
    payoffs2 = np.asarray(payoff_rows2, dtype=float)
    strategies = payoffs1.shape[1]
    counts1, counts2 = enumerate_rows_asymmetric(pop1_players, pop2_players, strategies)
    if payoffs1.shape != counts1.shape or payoffs2.shape != counts2.shape:
        raise ValueError("payoff row shapes do not match the enumerated rows")
    return AsymmetricHpt(pop1_players, pop2_players, strategies,
                         counts1, counts2, payoffs1, payoffs2, strategy_names)


@dataclass
class ValidationReport:
    """Outcome of validate_hpt: violations break the table contract, warnings do not."""

    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok and not self.warnings:
            return "valid"
        lines = [f"violation: {v}" for v in self.violations]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _check_composition_set(counts: np.ndarray, total: int, report: ValidationReport, label: str) -> None:
    k = counts.shape[1]
    seen: dict[tuple[int, ...], int] = {}
    for j, row in enumerate(counts):
        tup = tuple(int(c) for c in row)
        if sum(tup) != total:
            report.violations.append(f"{label}row {j}: counts {tup} sum to {sum(tup)}, expected {total}")
        if tup in seen:
            report.violations.append(f"{label}row {j}: duplicate composition {tup} (first at row {seen[tup]})")
        else:
            seen[tup] = j
    expected = compositions(total, k)
    for comp in expected:
        if comp not in seen:
            report.violations.append(f"{label}missing composition {comp}")
    expected_set = set(expected)
    for tup, j in seen.items():
        if tup not in expected_set:
            report.violations.append(f"{label}row {j}: unexpected composition {tup}")
    if len(seen) == len(expected) and not report.violations:
        canonical = [tuple(int(c) for c in row) for row in counts]
        if canonical != expected:
            report.warnings.append(f"{label}rows not in canonical reverse-lexicographic order")


def embedded_compositions(total: int, columns: Sequence[int], width: int) -> list[tuple[int, ...]]:
    """Compositions of `total` over the given columns, zero elsewhere."""
    columns = list(columns)
    out = []
    for comp in compositions(total, len(columns)):
        row = [0] * width
        for col, value in zip(columns, comp):
            row[col] = value
        out.append(tuple(row))
    return out


def validate_hpt(table: Hpt) -> ValidationReport:
    """Check every table invariant; the report lists each violation with its row.

    An empty report (no violations) means the table is valid.  Violations are
    data, not exceptions: a broken table still produces a full report.
    """
    report = ValidationReport()
    if isinstance(table, SymmetricHpt):
        expected_rows = num_compositions(table.players, table.strategies)
        if table.num_rows != expected_rows:
            report.violations.append(
                f"table has {table.num_rows} rows, expected C({table.players}+{table.strategies}-1,"
                f" {table.strategies}-1) = {expected_rows}")
        _check_composition_set(table.counts, table.players, report, "")
        for j in range(table.num_rows):
            for i in range(table.strategies):
                if table.counts[j, i] == 0 and table.payoffs[j, i] != 0.0:
                    report.violations.append(
                        f"row {j}: zero-support payoff must be 0, got {table.payoffs[j, i]}"
                        f" at strategy {i}")
        if not np.all(np.isfinite(table.payoffs)):
            report.violations.append("payoffs contain non-finite entries")
        return report

    if isinstance(table, AsymmetricHpt):
        m, n, k = table.pop1_players, table.pop2_players, table.strategies
        cols1 = [i for i in range(k) if i not in table.padded[0]]
        cols2 = [i for i in range(k) if i not in table.padded[1]]
        comps1 = embedded_compositions(m, cols1, k)
        comps2 = embedded_compositions(n, cols2, k)
        expected_rows = len(comps1) * len(comps2)
        if table.num_rows != expected_rows:
            report.violations.append(
                f"table has {table.num_rows} rows, expected"
                f" C({m}+{len(cols1)}-1,{m})*C({n}+{len(cols2)}-1,{n}) = {expected_rows}")
        seen: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
        for j in range(table.num_rows):
            c1 = tuple(int(c) for c in table.counts1[j])
            c2 = tuple(int(c) for c in table.counts2[j])
            if sum(c1) != m:
                report.violations.append(f"row {j}: population-1 counts {c1} sum to {sum(c1)}, expected {m}")
            if sum(c2) != n:
                report.violations.append(f"row {j}: population-2 counts {c2} sum to {sum(c2)}, expected {n}")
            if (c1, c2) in seen:
                report.violations.append(f"row {j}: duplicate composition pair ({c1}, {c2})")
            else:
                seen[(c1, c2)] = j
        expected = [(a, b) for a in comps1 for b in comps2]
        for pair in expected:
            if pair not in seen:
                report.violations.append(f"missing composition {pair}")
        expected_set = set(expected)
        for pair, j in seen.items():
            if pair not in expected_set:
                report.violations.append(f"row {j}: unexpected composition {pair}")
        for j in range(table.num_rows):
            for i in range(k):
                if table.counts1[j, i] == 0 and table.payoffs1[j, i] != 0.0:
                    report.violations.append(
                        f"row {j}: zero-support payoff must be 0 for population 1"
                        f" at strategy {i}, got {table.payoffs1[j, i]}")
                if table.counts2[j, i] == 0 and table.payoffs2[j, i] != 0.0:
                    report.violations.append(
                        f"row {j}: zero-support payoff must be 0 for population 2"
                        f" at strategy {i}, got {table.payoffs2[j, i]}")
        if not (np.all(np.isfinite(table.payoffs1)) and np.all(np.isfinite(table.payoffs2))):
            report.violations.append("payoffs contain non-finite entries")
        if len(seen) == len(expected) and not report.violations:
            order = [(tuple(int(c) for c in table.counts1[j]), tuple(int(c) for c in table.counts2[j]))
                     for j in range(table.num_rows)]
            if order != expected:
                report.warnings.append("rows not in canonical reverse-lexicographic order")
        for pop, cols in enumerate(table.padded, start=1):
            for col in cols:
                report.warnings.append(f"population {pop}: strategy column {col} was padded (never played)")
        return report

    raise TypeError(f"not an HPT: {type(table)!r}")
