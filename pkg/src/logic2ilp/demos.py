"""Model builders for the two structured-prediction demos.

* Sequence labeling: emission decisions ``y[i, l]`` and transition decisions
  ``t[i, a, b]`` tied together so that the ILP optimum is the best label
  sequence, optionally with an extra "at least one verb" row.
* Event relations: a Cause/Prevent/None label for every ordered event pair,
  with antisymmetric causality and connectivity of the non-None edges.

Each builder has a decoder, a validator that is independent of the
encoding, and an exhaustive reference optimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from logic2ilp import graphs, oracles, recipes
from logic2ilp.boolexpr import VarId
from logic2ilp.ilpcore import Model, Solution

SEQ_LABELS = ("noun", "verb", "other")
VERB = SEQ_LABELS.index("verb")
RELATIONS = ("cause", "prevent", "none")
NONE = RELATIONS.index("none")


def random_scores(rng: np.random.Generator, shape, decimals: int = 3) -> np.ndarray:
    """Uniform scores in [-1, 1], rounded so sums compare cleanly."""
    return np.round(rng.uniform(-1.0, 1.0, size=shape), decimals)


# -- sequence labeling --------------------------------------------------------


@dataclass
class SequenceModel:
    model: Model
    emit: list[list[VarId]]
    trans: dict[tuple[int, int, int], VarId] = field(default_factory=dict)
    n_labels: int = 0


def build_sequence_model(emission, transition, extra: str = "none", verb: int = VERB) -> SequenceModel:
    """ILP whose optimum is the best-scoring label sequence.

    Rows: one ``exactly_one`` per slot, and for every adjacent pair of slots
    and label pair ``(a, b)`` the two rows of ``t[i,a,b] <-> y[i,a] & y[i+1,b]``.
    """
    E = np.asarray(emission, dtype=float)
    T = np.asarray(transition, dtype=float)
    n, L = E.shape
    if T.shape != (L, L):
        raise ValueError(f"transition table must be {L}x{L}, got {T.shape}")
    if extra not in ("none", "at-least-one-verb"):
        raise ValueError(f"unknown extra constraint {extra!r}")
    m = Model()
    emit = [recipes.multiclass_block(m, E[i], prefix=f"y_{i}") for i in range(n)]
    out = SequenceModel(m, emit, n_labels=L)
    for i in range(n - 1):
        for a, b in itertools.product(range(L), repeat=2):
            t = m.binary(f"t_{i}_{a}_{b}", T[a, b])
            out.trans[(i, a, b)] = t
            recipes.iff_conj(m, [emit[i][a], emit[i + 1][b]], t, tag="consistency")
    if extra == "at-least-one-verb":
        recipes.disjunction(m, [emit[i][verb] for i in range(n)], tag="at-least-one-verb")
    return out


def decode_sequence(sm: SequenceModel, sol: Solution) -> list[int]:
    seq = []
    for row in sm.emit:
        on = [k for k, v in enumerate(row) if sol.is_true(v)]
        if len(on) != 1:
            raise ValueError(f"slot has {len(on)} labels switched on")
        seq.append(on[0])
    return seq


def sequence_score(emission, transition, seq) -> float:
    E = np.asarray(emission, dtype=float)
    T = np.asarray(transition, dtype=float)
    s = float(sum(E[i, l] for i, l in enumerate(seq)))
    return s + float(sum(T[a, b] for a, b in zip(seq, seq[1:])))


def validate_sequence(sm: SequenceModel, sol: Solution) -> list[str]:
    """Problems with ``sol`` as a label sequence (empty when valid)."""
    problems = []
    try:
        seq = decode_sequence(sm, sol)
    except ValueError as exc:
        return [str(exc)]
    for (i, a, b), t in sm.trans.items():
        if sol.is_true(t) != (seq[i] == a and seq[i + 1] == b):
            problems.append(f"transition {i}:{a}->{b} disagrees with the emissions")
    return problems


# -- event relations ----------------------------------------------------------


@dataclass
class EventsModel:
    model: Model
    n: int
    y: dict[tuple[int, int, int], VarId]
    conn: graphs.ConnectivityVars | None = None


def event_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


def build_events_model(scores) -> EventsModel:
    """``scores[i-1, j-1, r]`` is the score for labeling edge ``i -> j`` with ``RELATIONS[r]``."""
    S = np.asarray(scores, dtype=float)
    n = S.shape[0]
    if S.shape != (n, n, len(RELATIONS)):
        raise ValueError(f"scores must have shape (n, n, {len(RELATIONS)}), got {S.shape}")
    m = Model()
    y = {}
    for i, j in event_pairs(n):
        for r, name in enumerate(RELATIONS):
            y[(i, j, r)] = m.binary(f"y_{i}_{j}_{name}", S[i - 1, j - 1, r])
    for i, j in event_pairs(n):
        recipes.exactly_one(m, [y[(i, j, r)] for r in range(len(RELATIONS))], tag="edge-label")
        # an event pair can neither cause nor prevent in both directions
        recipes.disjunctive_implication(
            m, [y[(i, j, r)] for r in range(len(RELATIONS)) if r != NONE], [y[(j, i, NONE)]],
            tag="antisymmetry",
        )
    out = EventsModel(m, n, y)
    if n > 1:
        digraph = graphs.LabeledGraph(n, tuple((i, j, 0.0) for i, j in event_pairs(n)), directed=True)
        support = {
            (i, j): [y[(i, j, r)] for r in range(len(RELATIONS)) if r != NONE]
            for i, j in event_pairs(n)
        }
        out.conn = graphs.connected_subgraph(m, digraph, support)
    return out


def decode_events(em: EventsModel, sol: Solution) -> dict[tuple[int, int], int]:
    labels = {}
    for i, j in event_pairs(em.n):
        on = [r for r in range(len(RELATIONS)) if sol.is_true(em.y[(i, j, r)])]
        if len(on) != 1:
            raise ValueError(f"edge {i}->{j} has {len(on)} labels switched on")
        labels[(i, j)] = on[0]
    return labels


def validate_events(n: int, labels: dict[tuple[int, int], int]) -> list[str]:
    problems = []
    for i, j in event_pairs(n):
        if labels[(i, j)] != NONE and labels[(j, i)] != NONE:
            problems.append(f"events {i} and {j} are related in both directions")
    edges = [p for p, r in labels.items() if r != NONE]
    if not oracles.is_connected(n, edges):
        problems.append("non-None edges do not connect all events")
    return problems


def events_score(scores, labels: dict[tuple[int, int], int]) -> float:
    S = np.asarray(scores, dtype=float)
    return float(sum(S[i - 1, j - 1, r] for (i, j), r in labels.items()))


def brute_force_events(scores) -> tuple[dict[tuple[int, int], int] | None, float]:
    """Best labeling over all ``3**(n(n-1))`` assignments that pass the validator."""
    S = np.asarray(scores, dtype=float)
    n = S.shape[0]
    pairs = event_pairs(n)
    k, R = len(pairs), len(RELATIONS)
    if R**k > 2_000_000:
        raise ValueError("too many labelings to enumerate")
    idx = np.arange(R**k, dtype=np.int64)
    lab = np.stack([(idx // R ** (k - 1 - p)) % R for p in range(k)], axis=1)
    col = {p: c for c, p in enumerate(pairs)}
    score = np.zeros(idx.size)
    for c, (i, j) in enumerate(pairs):
        score += S[i - 1, j - 1][lab[:, c]]
    ok = np.ones(idx.size, dtype=bool)
    undirected = [(i, j) for i, j in pairs if i < j]
    pattern = np.zeros(idx.size, dtype=np.int64)
    for bit, (i, j) in enumerate(undirected):
        fwd = lab[:, col[(i, j)]] != NONE
        bwd = lab[:, col[(j, i)]] != NONE
        ok &= ~(fwd & bwd)
        pattern |= (fwd | bwd).astype(np.int64) << bit
    connected = np.array(
        [
            oracles.is_connected(n, [e for bit, e in enumerate(undirected) if code >> bit & 1])
            for code in range(1 << len(undirected))
        ]
    )
    ok &= connected[pattern]
    if not ok.any():
        return None, -math.inf
    score = np.where(ok, score, -np.inf)
    best = int(np.argmax(score))
    return {p: int(lab[best, c]) for c, p in enumerate(pairs)}, float(score[best])
