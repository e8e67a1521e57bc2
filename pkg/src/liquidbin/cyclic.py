"""Cyclic order of cursor jumps in the stationary regime.

Over one period every cursor jumps exactly once; reading the jumps
clockwise gives a total cyclic order on [1, N].  The order determines the
stationary graph: beta(i) is the largest m such that (i, i+1, ..., m)
appears clockwise, and the edges are the pairs (i, j) with j <= beta(i).
Conversely each connected DC graph carries a partial cyclic order (three
chain families per maximal edge) whose circular extensions form exactly
the fiber of that map, a fact this module checks by double enumeration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combinatorics import DCGraph, b_map, connected_component_of_one
from .dynamics import step_cars
from .params import Number, Params
from .regions import classify, find_region, solve_system
from .stationary import StationaryProfile, canonical_configuration


class DisconnectedRegionError(ValueError):
    """Stationary graph not connected: the jump-order map is undefined."""

    def __init__(self, graph: DCGraph):
        super().__init__(
            f"stationary graph with edges {sorted(graph.edges)} is not connected"
        )
        self.graph = graph


class WallTieError(ValueError):
    """Two cursors jump simultaneously: the parameters sit on a wall."""


@dataclass(frozen=True)
class CyclicOrder:
    """Cyclic permutation of [1, N], stored as the rotation starting at 1."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        seq = tuple(self.order)
        n = len(seq)
        if sorted(seq) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {seq}")
        k = seq.index(1)
        object.__setattr__(self, "order", seq[k:] + seq[:k])

    @property
    def n(self) -> int:
        return len(self.order)

    def contains(self, x: int, y: int, z: int) -> bool:
        """Triple test: y lies strictly between x and z clockwise."""
        pos = {v: k for k, v in enumerate(self.order)}
        dy = (pos[y] - pos[x]) % self.n
        dz = (pos[z] - pos[x]) % self.n
        return 0 < dy < dz

    def is_chain(self, entries: Sequence[int]) -> bool:
        """(i_1, ..., i_m) appears in clockwise order (vacuous for m <= 2)."""
        if len(entries) <= 2:
            return True
        return all(
            self.contains(entries[0], entries[k], entries[k + 1])
            for k in range(1, len(entries) - 1)
        )


@dataclass(frozen=True)
class ChainConstraint:
    """A tuple of distinct cursors required to appear clockwise."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) < 3:
            raise ValueError("chains of length < 3 are vacuous")
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("chain entries must be distinct")


def _require_connected(g: DCGraph) -> None:
    if connected_component_of_one(g).n != g.n:
        raise DisconnectedRegionError(g)


def f_map(z: CyclicOrder) -> DCGraph:
    """Graph of a jump order: edges (i, j) with j <= beta(i), where
    beta(i) extends while (i, m-1, m) keeps appearing clockwise."""
    n = z.n
    edges = set()
    for i in range(1, n + 1):
        beta = min(i + 1, n)
        for m in range(i + 2, n + 1):
            if z.contains(i, m - 1, m):
                beta = m
            else:
                break
        for j in range(i + 1, beta + 1):
            edges.add((i, j))
    return DCGraph(n, frozenset(edges))


def zprime_chains(g: DCGraph) -> tuple[ChainConstraint, ...]:
    """Chain families of the partial cyclic order of a connected graph.

    For every vertex i with farthest neighbour j = b(i): the run
    (i, i+1, ..., j), the stop (j, i, j+1) forcing j+1 to fall outside
    i's window, and the wedge (i, i-1, j) when vertex i-1 does not reach
    j.  On a maximal edge these are the familiar three tuples; emitting
    them for every vertex (not only maximal edges) is what makes the
    circular extensions coincide exactly with the fiber of f_map, which
    circular_extensions double-checks.  Vacuous or out-of-range tuples
    are dropped.
    """
    _require_connected(g)
    out: list[ChainConstraint] = []
    seen = set()
    for i in range(1, g.n):
        j = b_map(g, i)
        candidates = [tuple(range(i, j + 1))]
        if i - 1 >= 1 and b_map(g, i - 1) < j:
            candidates.append((i, i - 1, j))
        if j + 1 <= g.n:
            candidates.append((j, i, j + 1))
        for tup in candidates:
            if len(tup) >= 3 and tup not in seen:
                seen.add(tup)
                out.append(ChainConstraint(tup))
    return tuple(out)


def all_cyclic_orders(n: int) -> tuple[CyclicOrder, ...]:
    return tuple(
        CyclicOrder((1,) + perm) for perm in itertools.permutations(range(2, n + 1))
    )


def circular_extensions(g: DCGraph, n_cap: int = 9) -> tuple[CyclicOrder, ...]:
    """All total cyclic orders extending the partial order of g.

    Two filters are run and must agree: satisfaction of every chain
    constraint, and membership in the fiber of f_map.
    """
    _require_connected(g)
    if g.n > n_cap:
        raise ValueError(f"refusing factorial enumeration for n = {g.n} > {n_cap}")
    chains = zprime_chains(g)
    orders = all_cyclic_orders(g.n)
    by_chains = [z for z in orders if all(z.is_chain(c.entries) for c in chains)]
    by_fiber = [z for z in orders if f_map(z) == g]
    if by_chains != by_fiber:
        raise AssertionError(
            f"chain filter and fiber filter disagree for edges {sorted(g.edges)}"
        )
    return tuple(by_chains)


def _phases(z: tuple[Number, ...]) -> list[Number]:
    """Jump phase of each cursor within one period: the breakpoint times
    reduced mod the period (cursor 1 at phase 0)."""
    period = z[0]
    phases = []
    acc = 0 * period
    for zi in z:
        acc = acc + zi
        phases.append(acc % period)
    return phases


def _order_from_times(
    times: list[tuple[Number, int]], period: Number, exact: bool
) -> CyclicOrder:
    times = sorted(times)
    tol = 0 if exact else 1e-9 * float(period)
    for (t1, s1), (t2, s2) in zip(times, times[1:]):
        if abs(t2 - t1) <= tol:
            raise WallTieError(f"cursors {s1} and {s2} jump simultaneously (wall parameters)")
    wrap = period - (times[-1][0] - times[0][0])
    if len(times) > 1 and abs(wrap) <= tol:
        raise WallTieError(
            f"cursors {times[0][1]} and {times[-1][1]} jump simultaneously (wall parameters)"
        )
    return CyclicOrder(tuple(s for _, s in times))


def jump_order(
    params: Params,
    tol: Number = 1e-9,
    method: str = "simulate",
    graph: DCGraph | None = None,
    z: tuple[Number, ...] | None = None,
) -> CyclicOrder:
    """Cyclic order in which the cursors jump in the stationary regime.

    "simulate" builds the canonical stationary configuration and replays
    one full period, reading the sign crossings off the event log;
    "phases" reduces the stationary breakpoint times mod the period.
    Both raise WallTieError on simultaneous jumps and reject parameters
    whose stationary graph is disconnected (the graph rides the error).
    """
    if graph is None:
        report = classify(params, tol=tol)
        graph, z = report.graph, report.z
    elif z is None:
        z = solve_system(graph, params)
    _require_connected(graph)
    exact = params.is_exact
    if method == "phases":
        return _order_from_times(
            [(u, i + 1) for i, u in enumerate(_phases(z))], z[0], exact
        )
    if method != "simulate":
        raise ValueError(f"unknown method {method!r}")
    profile = StationaryProfile(z)
    y0 = canonical_configuration(profile, params)
    horizon = profile.period if exact else profile.period * (1 + 1e-9)
    _, log = step_cars(y0, params, horizon)
    first: dict[int, Number] = {}
    for ev in log:
        if ev.index in first:
            if not exact and abs(ev.time - first[ev.index]) > 1e-9 * float(profile.period):
                continue  # next period's crossing caught by the float overshoot
            raise WallTieError(f"cursor {ev.index} recorded two jumps in one period")
        first[ev.index] = ev.time
    if set(first) != set(range(1, params.n + 1)):
        raise WallTieError(f"period replay saw jumps {sorted(first)} instead of all cursors")
    return _order_from_times([(t, i) for i, t in first.items()], profile.period, exact)


@dataclass(frozen=True)
class ProbeReport:
    graph: DCGraph
    extensions: tuple[CyclicOrder, ...]
    realized: tuple[CyclicOrder, ...]
    missing: tuple[CyclicOrder, ...]
    counts: dict
    samples: int
    hits: int
    skipped: int
    seed: int
    method: str = "stationary-phases"
    rng: str = "numpy-pcg64"

    @property
    def covered(self) -> bool:
        return not self.missing

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "extensions": [list(z.order) for z in self.extensions],
            "realized": [list(z.order) for z in self.realized],
            "missing": [list(z.order) for z in self.missing],
            "counts": {"-".join(map(str, z.order)): c for z, c in self.counts.items()},
            "samples": self.samples,
            "hits": self.hits,
            "skipped": self.skipped,
            "seed": self.seed,
            "method": self.method,
            "rng": self.rng,
            "covered": self.covered,
        }


def sample_params(rng: np.random.Generator, n: int) -> Params:
    """Log-uniform gaps and rates over [1e-2, 1e2]."""
    d = 10.0 ** rng.uniform(-2.0, 2.0, size=n)
    p = 10.0 ** rng.uniform(-2.0, 2.0, size=n)
    return Params(tuple(np.cumsum(d).tolist()), tuple(p.tolist()))


def conjecture_probe(g: DCGraph, budget: int, seed: int, tol: Number = 1e-9) -> ProbeReport:
    """Sample parameters, keep those landing in the region of g, and
    record which circular extensions occur as jump orders.

    Stops early once every extension is realized.  Unrealized extensions
    are reported as not found within the budget, never as refutations.
    """
    _require_connected(g)
    extensions = circular_extensions(g)
    counts: dict[CyclicOrder, int] = {z: 0 for z in extensions}
    rng = np.random.default_rng(seed)
    hits = skipped = used = 0
    remaining = set(extensions)
    for used in range(1, budget + 1):
        params = sample_params(rng, g.n)
        found = find_region(params, tol=tol)
        if found is None or found[1]:
            skipped += 1  # within tolerance of a wall: never guess
            continue
        if found[0] != g:
            continue
        hits += 1
        try:
            order = jump_order(params, tol=tol, method="phases", graph=g)
        except WallTieError:
            skipped += 1
            continue
        if order not in counts:
            raise AssertionError(
                f"jump order {order.order} is not an extension of the region graph"
            )
        counts[order] += 1
        remaining.discard(order)
        if not remaining:
            break
    realized = tuple(o for o in extensions if counts[o] > 0)
    missing = tuple(o for o in extensions if counts[o] == 0)
    return ProbeReport(
        graph=g,
        extensions=extensions,
        realized=realized,
        missing=missing,
        counts=counts,
        samples=used,
        hits=hits,
        skipped=skipped,
        seed=seed,
    )
