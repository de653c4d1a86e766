"""Agent-based SBI1I2R dissemination on a preferential-attachment network.

Every node carries one of the five compartment labels.  Updates are
synchronous: all transitions of a tick are drawn from the state at the start
of the tick.  Per tick and node:

* ``S`` becomes ``R`` with probability ``theta``; otherwise it becomes ``B``
  with probability ``1 - (1 - sigma)**j`` where ``j`` is its number of
  ``I1``/``I2`` neighbours.
* ``B`` becomes ``I1`` or ``I2`` with the branch probabilities of
  :func:`branch_probabilities`.
* ``I1`` becomes ``R`` with probability ``min(1, k(m1 + n1))``.
* ``I2`` becomes ``R`` with probability ``min(1, k(m1 + n2))``, otherwise it
  falls back to ``B`` with probability ``min(1, k m2)``.
* ``R`` is absorbing.
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import InvalidConfig
from .opinion import COMPARTMENTS, OpinionParams

S, B, I1, I2, R = range(5)


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected simple graph stored as a sorted ``(E, 2)`` edge array with ``u < v``."""

    n: int
    edges: np.ndarray
    attachment: int | None = None
    seed: int | None = None

    @classmethod
    def from_edges(cls, n, edges, attachment=None, seed=None) -> "Network":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if len(e) and (np.any(e < 0) or np.any(e >= n)):
            raise InvalidConfig("edge endpoint outside node range")
        if np.any(e[:, 0] == e[:, 1]):
            raise InvalidConfig("self-loops are not allowed")
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        e.flags.writeable = False
        return cls(int(n), e, attachment, seed)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        u, v = self.edges[:, 0], self.edges[:, 1]
        ones = np.ones(2 * len(u))
        return sp.csr_matrix((ones, (np.r_[u, v], np.r_[v, u])), shape=(self.n, self.n))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def is_connected(self) -> bool:
        return connected_components(self.adjacency, directed=False)[0] == 1

    def edge_set(self) -> set:
        return set(map(tuple, self.edges.tolist()))

    def grow(self, count: int, rng: np.random.Generator, attachment: int | None = None) -> "Network":
        """Add ``count`` nodes, each linked to distinct existing nodes chosen by degree."""
        m = attachment or self.attachment or 1
        n = self.n
        deg = self.degrees.astype(float)
        new_edges = []
        for _ in range(count):
            w = deg + (deg.sum() == 0)
            targets = rng.choice(n, size=min(m, n), replace=False, p=w / w.sum())
            new_edges.extend((int(t), n) for t in targets)
            deg[targets] += 1
            deg = np.append(deg, len(targets))
            n += 1
        edges = np.vstack([self.edges, np.array(new_edges, dtype=np.int64).reshape(-1, 2)])
        return Network.from_edges(n, edges, self.attachment, self.seed)


@functools.lru_cache(maxsize=256)
def generate_scale_free(n: int, attachment: int = 3, seed: int | None = 0) -> Network:
    """Preferential-attachment graph grown from a complete seed graph on ``attachment + 1`` nodes.

    Results are cached; the returned network is immutable.
    """
    if not (isinstance(n, (int, np.integer)) and isinstance(attachment, (int, np.integer))):
        raise InvalidConfig("n and attachment must be integers")
    if attachment < 1 or n <= attachment:
        raise InvalidConfig(f"need n > attachment >= 1, got n={n}, attachment={attachment}")
    g = nx.barabasi_albert_graph(n, attachment, seed=seed, initial_graph=nx.complete_graph(attachment + 1))
    return Network.from_edges(n, g.edges(), attachment, seed)


def random_network(n: int, edge_prob: float, seed: int | None = 0) -> Network:
    """Erdos-Renyi graph, used as a well-mixed reference."""
    g = nx.fast_gnp_random_graph(n, edge_prob, seed=seed)
    return Network.from_edges(n, g.edges(), None, seed)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def seed_states(network: Network, counts, seed) -> np.ndarray:
    """Assign compartment labels uniformly at random with the exact ``counts`` (S, B, I1, I2, R)."""
    counts = [int(c) for c in counts]
    if len(counts) != 5 or any(c < 0 for c in counts):
        raise InvalidConfig("counts must be five non-negative integers")
    if sum(counts) != network.n:
        raise InvalidConfig(f"initial counts sum to {sum(counts)}, network has {network.n} nodes")
    labels = np.repeat(np.arange(5, dtype=np.int8), counts)
    return _rng(seed).permutation(labels)


def branch_probabilities(params: OpinionParams) -> tuple[float, float]:
    """Per-tick probabilities that a bystander turns ``I1`` / ``I2``.

    ``z1 + a1`` and ``z2 + a2`` are each clamped to [0, 1]; if the clamped
    pair sums past 1 it is rescaled proportionally so that every bystander
    converts.
    """
    p1 = min(max(float(params.to_I1), 0.0), 1.0)
    p2 = min(max(float(params.to_I2), 0.0), 1.0)
    total = p1 + p2
    if total > 1.0:
        p1, p2 = p1 / total, p2 / total
    return p1, p2


def step(network: Network, states: np.ndarray, params: OpinionParams, rng) -> np.ndarray:
    """One synchronous tick; returns a new label array."""
    rng = _rng(rng)
    st = np.asarray(states)
    n = len(st)
    infected = ((st == I1) | (st == I2)).astype(float)
    exposures = network.adjacency @ infected
    u = rng.random(n)
    v = rng.random(n)
    new = st.copy()

    s_mask = st == S
    to_r = s_mask & (u < params.theta)
    p_exposed = 1.0 - (1.0 - params.sigma) ** exposures
    new[s_mask & ~to_r & (v < p_exposed)] = B
    new[to_r] = R

    p1, p2 = branch_probabilities(params)
    b_mask = st == B
    new[b_mask & (u < p1)] = I1
    new[b_mask & (u >= p1) & (u < p1 + p2)] = I2

    new[(st == I1) & (u < min(1.0, params.recover_I1))] = R

    i2_mask = st == I2
    r2 = min(1.0, params.recover_I2)
    leaves = i2_mask & (u < r2)
    new[leaves] = R
    new[i2_mask & ~leaves & (v < min(1.0, params.backflow))] = B
    return new


@dataclass(frozen=True)
class AbmConfig:
    n: int = 1000
    attachment: int = 3
    initial: tuple = (800, 100, 50, 50, 0)
    ticks: int = 100
    runs: int = 50
    base_seed: int = 0
    inflow: int = 0  # new S nodes per tick; 0 keeps the population closed

    def __post_init__(self):
        object.__setattr__(self, "initial", tuple(int(c) for c in self.initial))
        for name in ("n", "attachment", "ticks", "runs", "base_seed", "inflow"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvalidConfig(f"{name}: expected an integer, got {v!r}")
        if len(self.initial) != 5 or any(c < 0 for c in self.initial):
            raise InvalidConfig("initial: five non-negative counts (S, B, I1, I2, R) required")
        if sum(self.initial) != self.n:
            raise InvalidConfig(f"initial counts sum to {sum(self.initial)}, expected n={self.n}")
        if self.runs < 1:
            raise InvalidConfig("runs must be >= 1")
        if self.ticks < 1:
            raise InvalidConfig("ticks must be >= 1")
        if self.attachment < 1 or self.n <= self.attachment:
            raise InvalidConfig("need n > attachment >= 1")
        if self.inflow < 0:
            raise InvalidConfig("inflow must be >= 0")
        if self.base_seed < 0:
            raise InvalidConfig("base_seed must be >= 0")


@dataclass(frozen=True)
class RunSummary:
    mean_counts: np.ndarray  # (ticks + 1, 5)
    population: np.ndarray  # (ticks + 1,)
    peak_density: np.ndarray  # per replication
    time_to_peak: np.ndarray
    extinction_tick: np.ndarray  # NaN where I2 never died out
    runs: int = field(default=0)

    @property
    def mean_peak_density(self) -> float:
        return float(np.mean(self.peak_density))

    @property
    def mean_time_to_peak(self) -> float:
        return float(np.mean(self.time_to_peak))

    @property
    def mean_extinction_tick(self) -> float | None:
        done = self.extinction_tick[~np.isnan(self.extinction_tick)]
        return float(done.mean()) if done.size else None

    @property
    def extinct_runs(self) -> int:
        return int(np.sum(~np.isnan(self.extinction_tick)))

    def metrics(self) -> dict:
        return {
            "runs": self.runs,
            "mean_peak_I2_density": self.mean_peak_density,
            "mean_time_to_peak": self.mean_time_to_peak,
            "mean_extinction_tick": self.mean_extinction_tick,
            "extinct_runs": self.extinct_runs,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tick", *COMPARTMENTS])
        for tick, row in enumerate(self.mean_counts):
            w.writerow([tick, *(repr(float(v)) for v in row)])
        return buf.getvalue()


def simulate_once(config: AbmConfig, params: OpinionParams, seed: int, network_factory=None) -> np.ndarray:
    """Counts per tick, shape ``(ticks + 1, 5)``, for one replication."""
    net = network_factory(seed) if network_factory else generate_scale_free(config.n, config.attachment, seed)
    rng = np.random.default_rng(seed)
    states = seed_states(net, config.initial, rng)
    counts = np.empty((config.ticks + 1, 5), dtype=np.int64)
    counts[0] = np.bincount(states, minlength=5)
    for t in range(1, config.ticks + 1):
        states = step(net, states, params, rng)
        if config.inflow:
            net = net.grow(config.inflow, rng, config.attachment)
            states = np.append(states, np.full(config.inflow, S, dtype=states.dtype))
        counts[t] = np.bincount(states, minlength=5)
    return counts


def run(config: AbmConfig, params: OpinionParams, network_factory=None) -> RunSummary:
    """Average ``config.runs`` replications; replication ``r`` is seeded with ``base_seed + r``.

    ``network_factory(seed)`` replaces the default scale-free generator.
    """
    all_counts = []
    peaks, tpeak, ext = [], [], []
    for r in range(config.runs):
        counts = simulate_once(config, params, config.base_seed + r, network_factory)
        pop = counts.sum(axis=1)
        density = counts[:, I2] / pop
        ip = int(np.argmax(density))
        gone = np.nonzero(counts[ip:, I2] == 0)[0]
        all_counts.append(counts)
        peaks.append(density[ip])
        tpeak.append(ip)
        ext.append(ip + gone[0] if len(gone) else np.nan)
    stack = np.stack(all_counts).astype(float)
    return RunSummary(
        mean_counts=stack.mean(axis=0),
        population=stack.sum(axis=2).mean(axis=0),
        peak_density=np.asarray(peaks),
        time_to_peak=np.asarray(tpeak, dtype=float),
        extinction_tick=np.asarray(ext, dtype=float),
        runs=config.runs,
    )
