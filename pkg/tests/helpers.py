"""Shared test utilities: independent oracles and random instance generators."""

import numpy as np

from hedgefpl import EdgeGraph
from hedgefpl.adversary import ftl_killer_losses
from hedgefpl.errors import GraphError


def ftl_cost_by_hand(T: int) -> float:
    """Leader simulation on the alternating sequence, independent of the game loop."""
    cum = [0.0, 0.0]
    cost = 0.0
    for t in range(1, T + 1):
        leader = 0 if cum[0] <= cum[1] else 1
        losses = ftl_killer_losses(t)
        cost += losses[leader]
        cum[0] += losses[0]
        cum[1] += losses[1]
    return cost


def random_dag(gen: np.random.Generator, max_nodes: int = 8, max_edges: int = 14) -> EdgeGraph:
    """Random DAG over a shuffled topological order with a guaranteed source-sink path."""
    while True:
        V = int(gen.integers(3, max_nodes + 1))
        order = gen.permutation(V)
        rank = {int(v): i for i, v in enumerate(order)}
        edges = []
        for _ in range(int(gen.integers(V, max_edges + 1))):
            u, v = gen.choice(V, size=2, replace=False)
            if rank[int(u)] > rank[int(v)]:
                u, v = v, u
            edges.append((int(u), int(v)))
        s, t = int(order[0]), int(order[-1])
        costs = gen.random(len(edges)) * 5
        try:
            return EdgeGraph(V, edges, s, t, costs)
        except GraphError:
            continue  # no s->t path this time; redraw
