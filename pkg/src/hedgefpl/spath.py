"""Online shortest path: perturbed-leader routing driven by a shortest-path oracle.

Each round a path is chosen between a fixed source and sink using the
cumulative edge times plus one fresh noise draw per edge; then the round's
times on all edges are revealed and paid along the chosen path. Because path
cost is linear over edges, no per-path weights are kept anywhere: a plain
shortest-path computation is the only optimization primitive needed. A
brute-force enumerator over simple paths provides the best-fixed-path oracle
for small graphs.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .core import RngLike, RngStream
from .errors import CapacityError, ConfigurationError, DataError, GraphError
from .perturbation import Family, PerturbationSpec, Sign, sample_array

MAX_ENUMERATED_PATHS = 1_000_000


class EdgeGraph:
    """Directed graph with per-edge cumulative costs and a fixed source/sink pair."""

    def __init__(
        self,
        num_nodes: int,
        edges: Sequence[tuple[int, int]],
        source: int,
        sink: int,
        cumulative: Sequence[float] | None = None,
    ):
        if source == sink:
            raise ConfigurationError("source and sink must differ")
        edges = [(int(u), int(v)) for u, v in edges]
        for u, v in edges:
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise GraphError(f"edge ({u},{v}) outside node range [0,{num_nodes})")
        if not (0 <= source < num_nodes and 0 <= sink < num_nodes):
            raise GraphError("source or sink outside node range")
        self.num_nodes = num_nodes
        self.edges = edges
        self.source = source
        self.sink = sink
        if cumulative is None:
            cumulative = np.zeros(len(edges))
        self.cumulative = np.asarray(cumulative, dtype=float).copy()
        if self.cumulative.shape != (len(edges),):
            raise ConfigurationError("cumulative costs must have one entry per edge")
        if not np.all(np.isfinite(self.cumulative)):
            raise DataError("edge costs must be finite")

        # out_edges[v]: edge ids leaving v, ascending (drives lexicographic tie-breaks)
        self.out_edges: list[list[int]] = [[] for _ in range(num_nodes)]
        for e, (u, _) in enumerate(edges):
            self.out_edges[u].append(e)
        self._topo: list[int] | None = None
        self._acyclic: bool | None = None

        if not self._reaches_sink(source):
            raise GraphError(f"no path from source {source} to sink {sink}")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def _reaches_sink(self, start: int) -> bool:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            if v == self.sink:
                return True
            for e in self.out_edges[v]:
                w = self.edges[e][1]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    @property
    def is_acyclic(self) -> bool:
        if self._acyclic is None:
            self._compute_topo()
        return self._acyclic

    def _compute_topo(self):
        indeg = [0] * self.num_nodes
        for _, v in self.edges:
            indeg[v] += 1
        queue = [v for v in range(self.num_nodes) if indeg[v] == 0]
        order = []
        while queue:
            v = queue.pop()
            order.append(v)
            for e in self.out_edges[v]:
                w = self.edges[e][1]
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        self._acyclic = len(order) == self.num_nodes
        self._topo = order if self._acyclic else None

    def with_costs(self, cumulative: np.ndarray) -> "EdgeGraph":
        return EdgeGraph(self.num_nodes, self.edges, self.source, self.sink, cumulative)

    def path_nodes(self, edge_seq: Sequence[int]) -> list[int]:
        """Node sequence of an edge path; raises GraphError unless it is a simple source-sink chain."""
        nodes = [self.source]
        for e in edge_seq:
            u, v = self.edges[e]
            if u != nodes[-1]:
                raise GraphError(f"edge {e} does not continue the path at node {nodes[-1]}")
            nodes.append(v)
        if nodes[-1] != self.sink:
            raise GraphError("path does not end at the sink")
        if len(set(nodes)) != len(nodes):
            raise GraphError("path repeats a node")
        return nodes

    @classmethod
    def from_edge_list_text(cls, text: str) -> "EdgeGraph":
        """Parse the edge-list format: 's <node>', 't <node>', then 'u v [cost]' lines."""
        source = sink = None
        edges: list[tuple[int, int]] = []
        costs: list[float] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                if tokens[0] == "s" and len(tokens) == 2:
                    source = int(tokens[1])
                elif tokens[0] == "t" and len(tokens) == 2:
                    sink = int(tokens[1])
                elif len(tokens) in (2, 3):
                    edges.append((int(tokens[0]), int(tokens[1])))
                    costs.append(float(tokens[2]) if len(tokens) == 3 else 0.0)
                else:
                    raise ValueError("expected 'u v [cost]'")
            except ValueError as exc:
                raise ConfigurationError(f"graph file line {lineno}: cannot parse {raw!r} ({exc})") from None
        if source is None or sink is None:
            raise ConfigurationError("graph file must contain 's <node>' and 't <node>' lines")
        if not edges:
            raise ConfigurationError("graph file contains no edges")
        num_nodes = 1 + max(max(u, v) for u, v in edges + [(source, sink)])
        return cls(num_nodes, edges, source, sink, np.asarray(costs))

    @classmethod
    def from_file(cls, path: str | Path) -> "EdgeGraph":
        return cls.from_edge_list_text(Path(path).read_text())


def parallel_edge_graph(k: int, cumulative: Sequence[float] | None = None) -> EdgeGraph:
    """k parallel edges from node 0 to node 1; edge i plays the role of expert i."""
    return EdgeGraph(2, [(0, 1)] * k, 0, 1, cumulative)


def ftl_killer_edge_times(g: EdgeGraph):
    """Leader-flipping edge times for a two-parallel-edge graph.

    Maps the two-expert alternating loss sequence onto the two edges, turning
    the graph game into the textbook instance where unperturbed leader
    following pays almost every round.
    """
    from .adversary import ftl_killer_losses

    if g.num_edges != 2:
        raise ConfigurationError("the alternating edge-time source needs exactly 2 edges")
    return lambda t: ftl_killer_losses(t)


@dataclass(frozen=True)
class PathChoice:
    """A simple source-sink path as an edge-id sequence plus its total weight."""

    edges: tuple[int, ...]
    total_weight: float


def _distances_to_sink(g: EdgeGraph, weights: list[float]) -> list[float]:
    """Shortest distance from every node to the sink under the given edge weights.

    Uses reverse topological relaxation on DAGs (any weight sign) and reverse
    Dijkstra otherwise (requires nonnegative weights). Plain Python floats
    throughout; the tight-edge walk relies on exact equality with these values.
    """
    inf = math.inf
    dist = [inf] * g.num_nodes
    dist[g.sink] = 0.0
    heads = [v for _, v in g.edges]
    if g.is_acyclic:
        for v in reversed(g._topo):
            if v == g.sink:
                continue
            best = inf
            for e in g.out_edges[v]:
                cand = weights[e] + dist[heads[e]]
                if cand < best:
                    best = cand
            dist[v] = best
        return dist
    if min(weights, default=0.0) < 0:
        raise ConfigurationError("negative edge weights on a cyclic graph are not supported")
    in_edges: list[list[int]] = [[] for _ in range(g.num_nodes)]
    for e, (_, v) in enumerate(g.edges):
        in_edges[v].append(e)
    done = [False] * g.num_nodes
    heap = [(0.0, g.sink)]
    while heap:
        d, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        for e in in_edges[v]:
            u = g.edges[e][0]
            cand = weights[e] + d
            if cand < dist[u]:
                dist[u] = cand
                heapq.heappush(heap, (cand, u))
    return dist


def _lex_shortest_path(g: EdgeGraph, weights: list[float]) -> tuple[int, ...]:
    """Lexicographically smallest edge-id sequence among minimum-weight simple paths.

    Walks tight edges (weight + remaining distance equals the node's distance,
    exact float comparison) smallest id first, backtracking when the simple-path
    constraint blocks every tight continuation.
    """
    dist = _distances_to_sink(g, weights)
    if not math.isfinite(dist[g.source]):
        raise GraphError("sink unreachable under the given weights")
    heads = [v for _, v in g.edges]

    path: list[int] = []
    on_path = {g.source}

    def extend(v: int) -> bool:
        if v == g.sink:
            return True
        target = dist[v]
        for e in g.out_edges[v]:
            w = heads[e]
            if w in on_path or weights[e] + dist[w] != target:
                continue
            path.append(e)
            on_path.add(w)
            if extend(w):
                return True
            path.pop()
            on_path.remove(w)
        return False

    if not extend(g.source):
        raise GraphError("no simple tight path found (degenerate weight ties)")
    return tuple(path)


def perturbed_shortest_path(g: EdgeGraph, spec: PerturbationSpec, rng: RngLike) -> PathChoice:
    """Minimum-weight source-sink path under cumulative costs plus one noise draw per edge.

    Signed noise families (Gumbel) require an acyclic graph, where topological
    relaxation handles negative weights exactly; clamping the noise instead
    would silently change the selection law.
    """
    if spec.sign is not Sign.ADD:
        raise ConfigurationError("path perturbation adds noise to edge weights; use sign='add'")
    if spec.family is Family.GUMBEL and not g.is_acyclic:
        raise ConfigurationError("Gumbel noise is signed; it needs an acyclic graph")
    noise = sample_array(spec, g.num_edges, rng)
    weights = (g.cumulative + noise).tolist()
    edges = _lex_shortest_path(g, weights)
    return PathChoice(edges=edges, total_weight=float(sum(weights[e] for e in edges)))


def brute_force_best_path(g: EdgeGraph) -> PathChoice:
    """Enumerate all simple source-sink paths and return the cheapest.

    Enumeration is in lexicographic edge-id order, so the first path attaining
    the minimum is the deterministic tie-break winner. Guards against graphs
    with more than MAX_ENUMERATED_PATHS simple paths.
    """
    best_cost = math.inf
    best_path: tuple[int, ...] | None = None
    count = 0
    path: list[int] = []
    on_path = {g.source}
    costs = g.cumulative.tolist()

    def visit(v: int, cost: float):
        nonlocal best_cost, best_path, count
        if v == g.sink:
            count += 1
            if count > MAX_ENUMERATED_PATHS:
                raise CapacityError(
                    f"more than {MAX_ENUMERATED_PATHS} simple paths; use the structured oracle instead"
                )
            if cost < best_cost:
                best_cost = cost
                best_path = tuple(path)
            return
        for e in g.out_edges[v]:
            w = g.edges[e][1]
            if w in on_path:
                continue
            path.append(e)
            on_path.add(w)
            visit(w, cost + costs[e])
            path.pop()
            on_path.remove(w)

    visit(g.source, 0.0)
    if best_path is None:
        raise GraphError("no source-sink path")
    return PathChoice(edges=best_path, total_weight=float(best_cost))


EdgeTimeSource = Union[np.ndarray, Callable[[int], Sequence[float]]]


@dataclass(frozen=True)
class PathRound:
    t: int
    edges: tuple[int, ...]
    paid: float
    times: np.ndarray


@dataclass(frozen=True)
class PathGameReport:
    """Outcome of an online path game, scored against the best fixed path in hindsight."""

    total_paid: float
    best_path_cost: float
    best_path: tuple[int, ...]
    regret: float
    regret_trajectory: np.ndarray
    rounds: list[PathRound] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "total_paid": self.total_paid,
            "best_path_cost": self.best_path_cost,
            "best_path": list(self.best_path),
            "regret": self.regret,
            "regret_trajectory": [float(x) for x in self.regret_trajectory],
        }


def run_online_path_game(
    g: EdgeGraph, spec: PerturbationSpec, edge_time_source: EdgeTimeSource, T: int, rng: RngStream
) -> PathGameReport:
    """Play T rounds: route with perturbed cumulative costs, pay the revealed times.

    Each round's revealed times are added into the cumulative edge costs after
    paying. The trajectory entry for round t is the total paid so far minus
    the cost of the best fixed path under the times revealed up to t.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    current = g
    total_paid = 0.0
    trajectory = np.zeros(T)
    rounds: list[PathRound] = []
    for t in range(1, T + 1):
        times = np.asarray(
            edge_time_source[t - 1] if isinstance(edge_time_source, np.ndarray) else edge_time_source(t),
            dtype=float,
        )
        if times.shape != (g.num_edges,):
            raise DataError(f"round {t}: expected {g.num_edges} edge times, got shape {times.shape}")
        if not np.all(np.isfinite(times)) or np.any(times < 0):
            raise DataError(f"round {t}: edge times must be finite and nonnegative")
        choice = perturbed_shortest_path(current, spec, rng.child(t))
        paid = float(times[list(choice.edges)].sum())
        total_paid += paid
        rounds.append(PathRound(t=t, edges=choice.edges, paid=paid, times=times))
        current = current.with_costs(current.cumulative + times)
        trajectory[t - 1] = total_paid - brute_force_best_path(current).total_weight
    best = brute_force_best_path(current)
    return PathGameReport(
        total_paid=total_paid,
        best_path_cost=best.total_weight,
        best_path=best.edges,
        regret=total_paid - best.total_weight,
        regret_trajectory=trajectory,
        rounds=rounds,
    )


def edge_times_from_csv(text: str, num_edges: int) -> np.ndarray:
    """Read per-round edge times from CSV with one edge_<id> column per edge."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty edge-time CSV") from None
    cols = {}
    for i, name in enumerate(header):
        if name.startswith("edge_") and name[5:].isdigit():
            cols[int(name[5:])] = i
    if sorted(cols) != list(range(num_edges)):
        raise DataError(f"edge-time CSV must have columns edge_0..edge_{num_edges - 1}")
    rows = [[float(row[cols[e]]) for e in range(num_edges)] for row in reader if row]
    if not rows:
        raise DataError("edge-time CSV has no data rows")
    return np.asarray(rows)


def edge_times_to_csv(times: np.ndarray) -> str:
    times = np.asarray(times, dtype=float)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"edge_{e}" for e in range(times.shape[1])])
    for row in times:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()
