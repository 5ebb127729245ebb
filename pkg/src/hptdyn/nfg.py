"""Normal-form games, NFG<->HPT conversion, and the brute-force payoff oracle.

The oracle shares no code with the table-based payoff formulas: it enumerates
every joint pure assignment of the co-players, weights each by independent
draws from the mixed profiles, and looks rows up by counting.  Agreement
between the two paths is evidence, not construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .tables import (
    AsymmetricHpt,
    CapacityError,
    Hpt,
    SymmetricHpt,
    compositions,
    enumerate_rows_symmetric,
)

ORACLE_MAX_ASSIGNMENTS = 10_000_000
EXACT_PERMUTATION_LIMIT = 20_000


class SymmetryError(ValueError):
    """The game is not invariant under the required player permutation.

    Carries a witness: two (assignment, player) pairs that should earn the
    same payoff but do not, plus the player permutation mapping one onto the
    other.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class NormalFormGame:
    """Payoff tensor of an n-player game, keyed by joint pure assignments."""

    strategy_counts: tuple[int, ...]
    payoffs: dict

    def __post_init__(self):
        counts = tuple(int(c) for c in self.strategy_counts)
        if any(c < 1 for c in counts):
            raise ValueError("every player needs at least one strategy")
        object.__setattr__(self, "strategy_counts", counts)
        table = {}
        for assignment in itertools.product(*(range(c) for c in counts)):
            if assignment not in self.payoffs:
                raise ValueError(f"payoff tensor incomplete: missing {assignment}")
            rewards = tuple(float(r) for r in self.payoffs[assignment])
            if len(rewards) != len(counts):
                raise ValueError(f"assignment {assignment}: expected {len(counts)} rewards")
            table[assignment] = rewards
        if len(self.payoffs) != len(table):
            extra = set(self.payoffs) - set(table)
            raise ValueError(f"payoff tensor has spurious assignments: {sorted(extra)[:3]}")
        object.__setattr__(self, "payoffs", table)

    @property
    def players(self) -> int:
        return len(self.strategy_counts)

    def reward(self, assignment, player: int) -> float:
        return self.payoffs[tuple(assignment)][player]


def from_bimatrix(a, b) -> NormalFormGame:
    """2-player game from the row player's matrix `a` and column player's `b`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("payoff matrices must have the same shape")
    payoffs = {(i, j): (a[i, j], b[i, j]) for i in range(a.shape[0]) for j in range(a.shape[1])}
    return NormalFormGame((a.shape[0], a.shape[1]), payoffs)


def _permutation_witness(game: NormalFormGame, groups: list[list[int]]) -> tuple | None:
    """Search for a within-group permutation under which payoffs change.

    Exhaustive over assignments when the space is small, sampled otherwise.
    Returns (assignment, permutation, player, expected, got) or None.
    """
    total = 1
    for c in game.strategy_counts:
        total *= c

    def check(assignment, perm):
        permuted = tuple(assignment[perm[p]] for p in range(game.players))
        for p in range(game.players):
            expected = game.reward(assignment, perm[p])
            got = game.reward(permuted, p)
            if expected != got:
                return (assignment, tuple(perm), p, expected, got)
        return None

    transpositions = []
    for group in groups:
        for a_idx in range(len(group)):
            for b_idx in range(a_idx + 1, len(group)):
                perm = list(range(game.players))
                perm[group[a_idx]], perm[group[b_idx]] = perm[group[b_idx]], perm[group[a_idx]]
                transpositions.append(perm)
    if not transpositions:
        return None

    if total * len(transpositions) <= EXACT_PERMUTATION_LIMIT:
        assignments = itertools.product(*(range(c) for c in game.strategy_counts))
        for assignment in assignments:
            for perm in transpositions:
                bad = check(assignment, perm)
                if bad:
                    return bad
        return None

    rng = np.random.default_rng(0)
    for _ in range(100):
        assignment = tuple(int(rng.integers(c)) for c in game.strategy_counts)
        perm = transpositions[int(rng.integers(len(transpositions)))]
        bad = check(assignment, perm)
        if bad:
            return bad
    return None


def check_symmetric(game: NormalFormGame) -> None:
    """Raise SymmetryError unless all players are interchangeable."""
    if len(set(game.strategy_counts)) != 1:
        raise SymmetryError("players have different strategy-set sizes")
    witness = _permutation_witness(game, [list(range(game.players))])
    if witness:
        assignment, perm, player, expected, got = witness
        raise SymmetryError(
            f"not symmetric: permuting players by {perm} changes player {player}'s payoff"
            f" at assignment {assignment} from {expected} to {got}", witness)


def check_population_interchangeable(game: NormalFormGame, pop1_players: int, pop2_players: int) -> None:
    """Raise SymmetryError unless players are interchangeable within each population."""
    if pop1_players + pop2_players != game.players:
        raise ValueError(f"population split {pop1_players}+{pop2_players} != {game.players} players")
    pop1 = list(range(pop1_players))
    pop2 = list(range(pop1_players, game.players))
    for pop in (pop1, pop2):
        if len({game.strategy_counts[p] for p in pop}) > 1:
            raise SymmetryError("players within a population have different strategy-set sizes")
    witness = _permutation_witness(game, [pop1, pop2])
    if witness:
        assignment, perm, player, expected, got = witness
        raise SymmetryError(
            f"population members not interchangeable: permutation {perm} changes player"
            f" {player}'s payoff at {assignment} from {expected} to {got}", witness)


def _expand_composition(composition) -> list[int]:
    out: list[int] = []
    for strategy, count in enumerate(composition):
        out.extend([strategy] * int(count))
    return out


def nfg_to_hpt_symmetric(game: NormalFormGame, players: int | None = None) -> SymmetricHpt:
    """Compress a symmetric NFG into its heuristic payoff table."""
    if players is None:
        players = game.players
    if players != game.players:
        raise ValueError(f"game has {game.players} players, asked for {players}")
    check_symmetric(game)
    k = game.strategy_counts[0]
    counts = enumerate_rows_symmetric(players, k)
    payoffs = np.zeros(counts.shape)
    for j, comp in enumerate(counts):
        assignment = tuple(_expand_composition(comp))
        for i in range(k):
            if comp[i] == 0:
                continue
            player = assignment.index(i)
            payoffs[j, i] = game.reward(assignment, player)
    return SymmetricHpt(players, k, counts, payoffs)


def nfg_to_hpt_asymmetric(game: NormalFormGame, pop1_players: int, pop2_players: int) -> AsymmetricHpt:
    """Compress a 2-population NFG (players interchangeable within each) into an HPT.

    Per-population payoffs are averaged over the population members playing
    the strategy; interchangeability makes the averaged values identical to
    each member's payoff.  When the populations have different strategy-set
    sizes, the smaller side's missing strategies become padded (never-played)
    columns.
    """
    check_population_interchangeable(game, pop1_players, pop2_players)
    k1 = game.strategy_counts[0]
    k2 = game.strategy_counts[pop1_players]
    k = max(k1, k2)
    comps1 = [tuple(c) + (0,) * (k - k1) for c in compositions(pop1_players, k1)]
    comps2 = [tuple(c) + (0,) * (k - k2) for c in compositions(pop2_players, k2)]
    counts1 = np.array([c1 for c1 in comps1 for _ in comps2], dtype=np.int64)
    counts2 = np.array([c2 for _ in comps1 for c2 in comps2], dtype=np.int64)
    payoffs1 = np.zeros(counts1.shape)
    payoffs2 = np.zeros(counts2.shape)
    for j in range(counts1.shape[0]):
        part1 = _expand_composition(counts1[j])
        part2 = _expand_composition(counts2[j])
        assignment = tuple(part1 + part2)
        for i in range(k):
            if counts1[j, i]:
                members = [p for p in range(pop1_players) if assignment[p] == i]
                payoffs1[j, i] = sum(game.reward(assignment, p) for p in members) / len(members)
            if counts2[j, i]:
                members = [p for p in range(pop1_players, game.players) if assignment[p] == i]
                payoffs2[j, i] = sum(game.reward(assignment, p) for p in members) / len(members)
    return AsymmetricHpt(pop1_players, pop2_players, k, counts1, counts2, payoffs1, payoffs2,
                         padded=(tuple(range(k1, k)), tuple(range(k2, k))))


def brute_force_expected_payoff(table: Hpt, x, y=None, *, strategy: int,
                                population: int | None = None) -> float:
    """Expected payoff of a focal player by direct enumeration of co-players.

    Every joint pure assignment of the co-players is enumerated, weighted by
    the product of independent draws from the mixed profile(s), mapped to its
    table row by counting, and the focal player's payoff summed.  No
    combinatorial coefficients anywhere; deliberately independent of the
    closed-form path.
    """
    if isinstance(table, SymmetricHpt):
        if y is not None or population is not None:
            raise ValueError("symmetric oracle takes one profile and no population")
        x = np.asarray(x, dtype=float)
        n, k = table.players, table.strategies
        if k ** (n - 1) > ORACLE_MAX_ASSIGNMENTS:
            raise CapacityError(f"{k}^{n - 1} co-player assignments exceed the oracle budget")
        row_index = {tuple(int(c) for c in table.counts[j]): j for j in range(table.num_rows)}
        total = 0.0
        for co in itertools.product(range(k), repeat=n - 1):
            prob = 1.0
            for s in co:
                prob *= x[s]
            counts = [0] * k
            counts[strategy] += 1
            for s in co:
                counts[s] += 1
            j = row_index[tuple(counts)]
            total += prob * table.payoffs[j, strategy]
        return total

    if isinstance(table, AsymmetricHpt):
        if y is None or population not in (1, 2):
            raise ValueError("asymmetric oracle needs both profiles and population 1 or 2")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        m, n, k = table.pop1_players, table.pop2_players, table.strategies
        own_co = (m - 1) if population == 1 else m
        other = n if population == 1 else (n - 1)
        if k ** (own_co + other) > ORACLE_MAX_ASSIGNMENTS:
            raise CapacityError("co-player assignment space exceeds the oracle budget")
        row_index = {
            (tuple(int(c) for c in table.counts1[j]), tuple(int(c) for c in table.counts2[j])): j
            for j in range(table.num_rows)
        }
        pop1_extra = own_co if population == 1 else m
        pop2_extra = other if population == 1 else n - 1
        total = 0.0
        for co1 in itertools.product(range(k), repeat=pop1_extra):
            prob1 = 1.0
            for s in co1:
                prob1 *= x[s]
            c1 = [0] * k
            for s in co1:
                c1[s] += 1
            if population == 1:
                c1[strategy] += 1
            for co2 in itertools.product(range(k), repeat=pop2_extra):
                prob = prob1
                for s in co2:
                    prob *= y[s]
                c2 = [0] * k
                for s in co2:
                    c2[s] += 1
                if population == 2:
                    c2[strategy] += 1
                j = row_index[(tuple(c1), tuple(c2))]
                payoff = table.payoffs1[j, strategy] if population == 1 else table.payoffs2[j, strategy]
                total += prob * payoff
        return total

    raise TypeError(f"not an HPT: {type(table)!r}")
