"""Empirical estimation of a heuristic payoff table from simulated episodes.

The bundled environment is a scripted predator-prey grid world: two wolves
chase a randomly walking sheep.  Whoever reaches a cell adjacent to the sheep
captures it; a capture pays both wolves the team reward when both are within
the team threshold (Manhattan distance), otherwise the capturer alone earns
the lone reward and the straggler gets nothing.  Wolves follow one of two
scripted meta-strategies: a defector heads straight for the sheep, a
cooperator advances only while its partner is within the team threshold of
the sheep and waits otherwise.

The estimator consumes episode records (from this simulator, a replayed log,
or any synthetic source) and maintains per-cell running means grouped by
count row until the table converges.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .tables import AsymmetricHpt, enumerate_rows_asymmetric

COOPERATE = 0
DEFECT = 1
WOLF_STRATEGY_NAMES = ("cooperate", "defect")

_MOVES = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class WolfpackConfig:
    """Environment parameters; defaults target the 4-row two-wolf table."""

    grid_size: int = 10
    capture_radius: int = 1
    team_threshold: int = 6
    r_lone: float = 1.0
    r_team: float = 1.5
    max_steps: int = 200
    rng_seed: int = 0
    sheep_start: tuple[int, int] | None = None
    wolf_starts: tuple[tuple[int, int], tuple[int, int]] | None = None

    def __post_init__(self):
        if self.grid_size < 4:
            raise ValueError(f"grid_size must be >= 4, got {self.grid_size}")
        if self.team_threshold < 1:
            raise ValueError(f"team_threshold must be >= 1, got {self.team_threshold}")
        if not 0.0 <= self.r_lone <= self.r_team:
            raise ValueError("need r_team >= r_lone >= 0")
        if self.capture_radius < 1:
            raise ValueError("capture_radius must be >= 1")

    def initial_positions(self) -> tuple[tuple[int, int], tuple[tuple[int, int], tuple[int, int]]]:
        g = self.grid_size
        sheep = self.sheep_start if self.sheep_start is not None else (g // 2, g // 2)
        wolves = self.wolf_starts if self.wolf_starts is not None else ((0, 0), (g - 1, g - 1))
        for pos in (sheep, *wolves):
            if not (0 <= pos[0] < g and 0 <= pos[1] < g):
                raise ValueError(f"position {pos} outside the {g}x{g} grid")
        return sheep, wolves


@dataclass(frozen=True)
class EpisodeRecord:
    """One simulated episode: who played what, what everyone earned."""

    assignment: tuple[tuple[int, ...], tuple[int, ...]]
    rewards: tuple[tuple[float, ...], tuple[float, ...]]
    seed: int
    captured: bool = True
    steps: int = 0

    def to_json(self) -> str:
        return json.dumps({
            "assignment": [list(a) for a in self.assignment],
            "rewards": [list(r) for r in self.rewards],
            "seed": self.seed,
            "captured": self.captured,
            "steps": self.steps,
        }, sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "EpisodeRecord":
        doc = json.loads(line)
        return EpisodeRecord(
            assignment=tuple(tuple(int(s) for s in pop) for pop in doc["assignment"]),
            rewards=tuple(tuple(float(r) for r in pop) for pop in doc["rewards"]),
            seed=int(doc["seed"]),
            captured=bool(doc.get("captured", True)),
            steps=int(doc.get("steps", 0)),
        )


def _manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _greedy_step(wolf: tuple[int, int], sheep: tuple[int, int]) -> tuple[int, int]:
    # One cell toward the sheep; row movement before column on ties.
    if wolf[0] != sheep[0]:
        return (wolf[0] + (1 if sheep[0] > wolf[0] else -1), wolf[1])
    if wolf[1] != sheep[1]:
        return (wolf[0], wolf[1] + (1 if sheep[1] > wolf[1] else -1))
    return wolf


def _normalize_strategy(value) -> int:
    if isinstance(value, str):
        key = value.strip().lower()
        if key in ("c", "cooperate", "cooperative"):
            return COOPERATE
        if key in ("d", "defect", "defective"):
            return DEFECT
        raise ValueError(f"unknown wolf strategy {value!r}")
    strategy = int(value)
    if strategy not in (COOPERATE, DEFECT):
        raise ValueError(f"wolf strategy index must be 0 or 1, got {strategy}")
    return strategy


def simulate_wolfpack_episode(config: WolfpackConfig, strategies, seed: int) -> EpisodeRecord:
    """Run one episode; deterministic given (config, strategies, seed).

    The sheep takes a seeded uniform random walk over {stay, N, S, E, W},
    clipped at the walls.  Capture triggers as soon as any wolf is within
    `capture_radius` of the sheep (checked at t=0 too).  Timeouts pay zero to
    both wolves.
    """
    wolf_strategies = tuple(_normalize_strategy(s) for s in strategies)
    if len(wolf_strategies) != 2:
        raise ValueError("wolfpack episodes take exactly two wolf strategies")
    rng = random.Random(seed)
    sheep, wolves = config.initial_positions()
    wolves = list(wolves)

    def capture_rewards() -> tuple[float, float] | None:
        distances = [_manhattan(w, sheep) for w in wolves]
        capturers = [i for i, d in enumerate(distances) if d <= config.capture_radius]
        if not capturers:
            return None
        if all(d <= config.team_threshold for d in distances):
            return (config.r_team, config.r_team)
        rewards = [0.0, 0.0]
        for i in capturers:
            rewards[i] = config.r_lone
        return (rewards[0], rewards[1])

    steps = 0
    outcome = capture_rewards()
    while outcome is None and steps < config.max_steps:
        steps += 1
        targets = []
        for i, strategy in enumerate(wolf_strategies):
            if strategy == DEFECT:
                targets.append(_greedy_step(wolves[i], sheep))
            else:
                partner = wolves[1 - i]
                if _manhattan(partner, sheep) <= config.team_threshold:
                    targets.append(_greedy_step(wolves[i], sheep))
                else:
                    targets.append(wolves[i])
        wolves = targets
        outcome = capture_rewards()
        if outcome is not None:
            break
        move = _MOVES[rng.randrange(len(_MOVES))]
        sheep = (
            min(max(sheep[0] + move[0], 0), config.grid_size - 1),
            min(max(sheep[1] + move[1], 0), config.grid_size - 1),
        )
        outcome = capture_rewards()

    captured = outcome is not None
    rewards = outcome if captured else (0.0, 0.0)
    return EpisodeRecord(
        assignment=((wolf_strategies[0],), (wolf_strategies[1],)),
        rewards=((rewards[0],), (rewards[1],)),
        seed=seed,
        captured=captured,
        steps=steps,
    )


def sample_policy_assignment(policy_sets: Sequence[Sequence[int]], members: Sequence[int],
                             rng: random.Random) -> tuple[tuple[int, ...], ...]:
    """Uniform independent strategy draw for every member of every population."""
    if any(len(s) == 0 for s in policy_sets):
        raise ValueError("policy sets must be non-empty")
    if len(policy_sets) != len(members):
        raise ValueError("one policy set per population required")
    return tuple(
        tuple(options[rng.randrange(len(options))] for _ in range(count))
        for options, count in zip([list(s) for s in policy_sets], members)
    )


def wolfpack_episode_source(config: WolfpackConfig, episodes: int,
                            policy_sets: Sequence[Sequence[int]] = ((COOPERATE, DEFECT),) * 2,
                            ) -> Iterator[EpisodeRecord]:
    """Yield episodes with uniformly sampled strategy pairs, in seed order.

    Episode i uses seed rng_seed + i, so the stream is reproducible and
    already sorted by episode seed.
    """
    assignment_rng = random.Random(config.rng_seed ^ 0x5DEECE66D)
    for i in range(episodes):
        assignment = sample_policy_assignment(policy_sets, (1, 1), assignment_rng)
        strategies = (assignment[0][0], assignment[1][0])
        yield simulate_wolfpack_episode(config, strategies, config.rng_seed + i)


def write_episode_log(records: Iterable[EpisodeRecord], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.to_json())
            handle.write("\n")
            count += 1
    return count


def read_episode_log(path) -> list[EpisodeRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(EpisodeRecord.from_json(line))
    return records


@dataclass
class HptEstimate:
    """Running-mean table estimate plus convergence diagnostics."""

    table: AsymmetricHpt
    counts_per_row: np.ndarray
    cell_visits: tuple[np.ndarray, np.ndarray]
    history: dict
    converged: bool
    episodes_used: int
    timeouts_seen: int = 0
    timeouts_discarded: int = 0

    @property
    def unestimated_rows(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.counts_per_row == 0)]


def estimate_hpt(episode_source: Iterable[EpisodeRecord], shape: tuple[int, int, int],
                 min_visits: int = 50, window: int = 50, tolerance: float = 1e-3,
                 max_episodes: int | None = None, discard_timeouts: bool = False) -> HptEstimate:
    """Average episode rewards into an HPT until every cell settles.

    Each record's policy assignment is counted into a row; every player's
    reward updates the running mean of its (row, population, strategy) cell.
    Estimation stops once every row has at least `min_visits` episodes and no
    estimated cell moved by `tolerance` or more within its last `window`
    updates, or when the source is exhausted (then rows never visited are
    flagged).  Lists are processed in episode-seed order; generators are
    consumed as produced and should already yield in seed order.
    """
    m, n, k = shape
    counts1, counts2 = enumerate_rows_asymmetric(m, n, k)
    row_index = {
        (tuple(int(c) for c in counts1[j]), tuple(int(c) for c in counts2[j])): j
        for j in range(counts1.shape[0])
    }
    rows = counts1.shape[0]
    # Incremental sample mean: mean += (x - mean) / count.  A constant stream
    # reproduces the constant bit-exactly, which sum/count would not.
    means = (np.zeros((rows, k)), np.zeros((rows, k)))
    visits = (np.zeros((rows, k), dtype=np.int64), np.zeros((rows, k), dtype=np.int64))
    row_visits = np.zeros(rows, dtype=np.int64)
    history: dict[tuple[int, int, int], deque] = {}

    if isinstance(episode_source, (list, tuple)):
        episode_source = sorted(episode_source, key=lambda r: r.seed)

    def settled() -> bool:
        if np.any(row_visits < min_visits):
            return False
        for key, deltas in history.items():
            if len(deltas) < window or max(deltas) >= tolerance:
                return False
        return True

    episodes_used = 0
    timeouts_seen = 0
    timeouts_discarded = 0
    if max_episodes is not None:
        episode_source = itertools.islice(episode_source, max_episodes)
    for record in episode_source:
        if not record.captured:
            timeouts_seen += 1
            if discard_timeouts:
                timeouts_discarded += 1
                continue
        episodes_used += 1
        c1 = [0] * k
        for s in record.assignment[0]:
            c1[s] += 1
        c2 = [0] * k
        for s in record.assignment[1]:
            c2[s] += 1
        j = row_index.get((tuple(c1), tuple(c2)))
        if j is None:
            raise ValueError(f"assignment {record.assignment} does not fit shape {shape}")
        row_visits[j] += 1
        for pop in (0, 1):
            for member, strategy in enumerate(record.assignment[pop]):
                reward = record.rewards[pop][member]
                old = means[pop][j, strategy]
                visits[pop][j, strategy] += 1
                new = old + (reward - old) / visits[pop][j, strategy]
                means[pop][j, strategy] = new
                history.setdefault((pop, j, strategy), deque(maxlen=window)).append(abs(new - old))
        if settled():
            break

    payoffs1 = np.where(visits[0] > 0, means[0], 0.0)
    payoffs2 = np.where(visits[1] > 0, means[1], 0.0)
    table = AsymmetricHpt(m, n, k, counts1, counts2, payoffs1, payoffs2)
    return HptEstimate(
        table=table,
        counts_per_row=row_visits,
        cell_visits=visits,
        history={key: list(values) for key, values in history.items()},
        converged=settled(),
        episodes_used=episodes_used,
        timeouts_seen=timeouts_seen,
        timeouts_discarded=timeouts_discarded,
    )
