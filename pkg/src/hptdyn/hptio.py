"""File formats: HPT documents, NFG tensors, CSV export, stable JSON output.

All numeric output is rounded to 12 significant digits before serialization
so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .nfg import NormalFormGame
from .tables import AsymmetricHpt, Hpt, SymmetricHpt


class HptFileError(ValueError):
    """Malformed document: bad JSON or a structure the schema does not allow."""


def round12(value: float) -> float:
    return float(f"{float(value):.12g}")


def round_doc(doc):
    """Recursively round every float in a JSON-ready structure to 12 significant digits."""
    if isinstance(doc, float):
        return round12(doc)
    if isinstance(doc, dict):
        return {key: round_doc(value) for key, value in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [round_doc(value) for value in doc]
    return doc


def dump_json(doc, path=None) -> str:
    text = json.dumps(round_doc(doc), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _require(condition: bool, message: str):
    if not condition:
        raise HptFileError(message)


def hpt_to_doc(table: Hpt) -> dict:
    if isinstance(table, SymmetricHpt):
        doc = {
            "type": "symmetric",
            "players": table.players,
            "strategies": table.strategies,
        }
        if table.strategy_names:
            doc["strategy_names"] = list(table.strategy_names)
        doc["rows"] = [
            {"counts": [int(c) for c in table.counts[j]],
             "payoffs": [float(u) for u in table.payoffs[j]]}
            for j in range(table.num_rows)
        ]
        return doc
    if isinstance(table, AsymmetricHpt):
        doc = {
            "type": "asymmetric",
            "players": [table.pop1_players, table.pop2_players],
            "strategies": table.strategies,
        }
        if table.strategy_names:
            doc["strategy_names"] = [list(ns) for ns in table.strategy_names]
        doc["rows"] = [
            {"counts": [[int(table.counts1[j, i]), int(table.counts2[j, i])]
                        for i in range(table.strategies)],
             "payoffs": [[float(table.payoffs1[j, i]), float(table.payoffs2[j, i])]
                         for i in range(table.strategies)]}
            for j in range(table.num_rows)
        ]
        return doc
    raise TypeError(f"not an HPT: {type(table)!r}")


def hpt_from_doc(doc: dict) -> Hpt:
    _require(isinstance(doc, dict), "HPT document must be a JSON object")
    kind = doc.get("type")
    _require(kind in ("symmetric", "asymmetric"), f"unknown table type {kind!r}")
    rows = doc.get("rows")
    _require(isinstance(rows, list) and rows, "HPT document needs a non-empty 'rows' list")

    if kind == "symmetric":
        players = doc.get("players")
        _require(isinstance(players, int), "'players' must be an integer for symmetric tables")
        strategies = doc.get("strategies")
        _require(isinstance(strategies, int), "'strategies' must be an integer")
        counts = []
        payoffs = []
        for j, row in enumerate(rows):
            _require(isinstance(row, dict) and "counts" in row and "payoffs" in row,
                     f"row {j} needs 'counts' and 'payoffs'")
            _require(len(row["counts"]) == strategies and len(row["payoffs"]) == strategies,
                     f"row {j} must list {strategies} counts and payoffs")
            counts.append(row["counts"])
            payoffs.append(row["payoffs"])
        names = doc.get("strategy_names")
        try:
            return SymmetricHpt(players, strategies, np.array(counts), np.array(payoffs),
                                tuple(names) if names else None)
        except ValueError as exc:
            raise HptFileError(str(exc)) from exc

    players = doc.get("players")
    _require(isinstance(players, list) and len(players) == 2
             and all(isinstance(p, int) for p in players),
             "'players' must be [m, n] for asymmetric tables")
    strategies = doc.get("strategies")
    if isinstance(strategies, int):
        k1 = k2 = strategies
    else:
        _require(isinstance(strategies, list) and len(strategies) == 2
                 and all(isinstance(s, int) for s in strategies),
                 "'strategies' must be an integer or [k1, k2]")
        k1, k2 = strategies
    k = max(k1, k2)
    padded = (tuple(range(k1, k)), tuple(range(k2, k)))
    counts1, counts2, payoffs1, payoffs2 = [], [], [], []
    for j, row in enumerate(rows):
        _require(isinstance(row, dict) and "counts" in row and "payoffs" in row,
                 f"row {j} needs 'counts' and 'payoffs'")
        _require(len(row["counts"]) == k and len(row["payoffs"]) == k,
                 f"row {j} must list {k} count pairs and payoff pairs")
        for cell in list(row["counts"]) + list(row["payoffs"]):
            _require(isinstance(cell, (list, tuple)) and len(cell) == 2,
                     f"row {j}: asymmetric cells are [pop1, pop2] pairs")
        counts1.append([pair[0] for pair in row["counts"]])
        counts2.append([pair[1] for pair in row["counts"]])
        payoffs1.append([pair[0] for pair in row["payoffs"]])
        payoffs2.append([pair[1] for pair in row["payoffs"]])
    names = doc.get("strategy_names")
    if names:
        _require(isinstance(names, list) and len(names) == 2, "'strategy_names' must be two lists")
        names = tuple(tuple(list(ns) + [f"pad{i}" for i in range(k - len(ns))]) for ns in names)
    try:
        return AsymmetricHpt(players[0], players[1], k,
                             np.array(counts1), np.array(counts2),
                             np.array(payoffs1), np.array(payoffs2),
                             names, padded)
    except ValueError as exc:
        raise HptFileError(str(exc)) from exc


def load_hpt(path) -> Hpt:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise HptFileError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HptFileError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}:"
                           f" {exc.msg}") from exc
    return hpt_from_doc(doc)


def save_hpt(table: Hpt, path) -> None:
    dump_json(hpt_to_doc(table), path)


def nfg_to_doc(game: NormalFormGame) -> dict:
    entries = [
        {"assignment": list(assignment), "rewards": [float(r) for r in rewards]}
        for assignment, rewards in sorted(game.payoffs.items())
    ]
    return {
        "players": game.players,
        "strategy_counts": list(game.strategy_counts),
        "entries": entries,
    }


def nfg_from_doc(doc: dict) -> NormalFormGame:
    _require(isinstance(doc, dict), "NFG document must be a JSON object")
    counts = doc.get("strategy_counts")
    _require(isinstance(counts, list) and counts, "'strategy_counts' must be a non-empty list")
    entries = doc.get("entries")
    _require(isinstance(entries, list) and entries, "'entries' must be a non-empty list")
    payoffs = {}
    for entry in entries:
        _require(isinstance(entry, dict) and "assignment" in entry and "rewards" in entry,
                 "each entry needs 'assignment' and 'rewards'")
        payoffs[tuple(int(s) for s in entry["assignment"])] = tuple(
            float(r) for r in entry["rewards"])
    try:
        return NormalFormGame(tuple(int(c) for c in counts), payoffs)
    except ValueError as exc:
        raise HptFileError(str(exc)) from exc


def load_nfg(path) -> NormalFormGame:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise HptFileError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HptFileError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}:"
                           f" {exc.msg}") from exc
    return nfg_from_doc(doc)


def hpt_to_csv(table: Hpt) -> str:
    """Flat spreadsheet view; asymmetric pair cells become _p1/_p2 column pairs."""
    lines = []
    if isinstance(table, SymmetricHpt):
        k = table.strategies
        header = [f"N{i + 1}" for i in range(k)] + [f"U{i + 1}" for i in range(k)]
        lines.append(",".join(header))
        for j in range(table.num_rows):
            cells = [str(int(c)) for c in table.counts[j]]
            cells += [f"{round12(u):.12g}" for u in table.payoffs[j]]
            lines.append(",".join(cells))
    elif isinstance(table, AsymmetricHpt):
        k = table.strategies
        header = []
        for i in range(k):
            header += [f"N{i + 1}_p1", f"N{i + 1}_p2"]
        for i in range(k):
            header += [f"U{i + 1}_p1", f"U{i + 1}_p2"]
        lines.append(",".join(header))
        for j in range(table.num_rows):
            cells = []
            for i in range(k):
                cells += [str(int(table.counts1[j, i])), str(int(table.counts2[j, i]))]
            for i in range(k):
                cells += [f"{round12(table.payoffs1[j, i]):.12g}",
                          f"{round12(table.payoffs2[j, i]):.12g}"]
            lines.append(",".join(cells))
    else:
        raise TypeError(f"not an HPT: {type(table)!r}")
    return "\n".join(lines) + "\n"
