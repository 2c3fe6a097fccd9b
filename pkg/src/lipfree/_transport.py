"""Transportation simplex (MODI / stepping-stone) on a dense cost matrix.

Balanced problem: ``sum(supply) == sum(demand)``. The basis is a spanning
tree of the bipartite source/sink graph with ``m + k - 1`` cells, started
from the northwest corner rule. Entering and leaving cells follow Bland's
rule on the row-major cell index.
"""

from collections import deque

import numpy as np


class TransportError(RuntimeError):
    pass


def _northwest(supply, demand):
    m, k = len(supply), len(demand)
    s, d = list(supply), list(demand)
    flow = {}
    i = j = 0
    while True:
        q = min(s[i], d[j])
        if q < 0:
            q = 0 * q
        flow[(i, j)] = q
        s[i] -= q
        d[j] -= q
        if i == m - 1 and j == k - 1:
            break
        if i == m - 1:
            j += 1
        elif j == k - 1:
            i += 1
        elif s[i] <= d[j]:
            i += 1
        else:
            j += 1
    return flow


def _potentials(basis, cost, m, k):
    adj = {}
    for i, j in basis:
        adj.setdefault(("r", i), []).append(("c", j))
        adj.setdefault(("c", j), []).append(("r", i))
    u = [None] * m
    v = [None] * k
    u[0] = 0 * cost[0, 0]
    queue = deque([("r", 0)])
    while queue:
        node = queue.popleft()
        for other in adj.get(node, ()):
            if node[0] == "r":
                i, j = node[1], other[1]
                if v[j] is None:
                    v[j] = cost[i, j] - u[i]
                    queue.append(other)
            else:
                i, j = other[1], node[1]
                if u[i] is None:
                    u[i] = cost[i, j] - v[j]
                    queue.append(other)
    if any(x is None for x in u) or any(x is None for x in v):
        raise TransportError("basis is not a spanning tree")
    return u, v


def _tree_path(basis, start, goal):
    """Cells on the unique tree path from row node ``start`` to column node ``goal``."""
    adj = {}
    for i, j in basis:
        adj.setdefault(("r", i), []).append(("c", j))
        adj.setdefault(("c", j), []).append(("r", i))
    src, dst = ("r", start), ("c", goal)
    parent = {src: None}
    queue = deque([src])
    while queue:
        node = queue.popleft()
        if node == dst:
            break
        for other in adj.get(node, ()):
            if other not in parent:
                parent[other] = node
                queue.append(other)
    if dst not in parent:
        raise TransportError("entering cell does not close a cycle")
    cells = []
    node = dst
    while parent[node] is not None:
        prev = parent[node]
        cells.append((prev[1], node[1]) if prev[0] == "r" else (node[1], prev[1]))
        node = prev
    return cells  # ordered from the goal column back to the start row


def solve(supply, demand, cost, *, eps=1e-12, max_iter=None):
    """Minimize ``sum(flow * cost)`` subject to row sums ``supply`` and column sums ``demand``.

    Returns ``(flow_matrix, total_cost, (u, v), iterations)``.
    """
    cost = np.asarray(cost)
    exact = cost.dtype == object
    if exact:
        eps = 0
    m, k = len(supply), len(demand)
    if m == 0 or k == 0:
        raise TransportError("empty supply or demand")
    flow = _northwest(supply, demand)
    basis = list(flow)
    if max_iter is None:
        max_iter = 20 * m * k + 100

    it = 0
    while True:
        u, v = _potentials(basis, cost, m, k)
        in_basis = set(basis)
        entering = None
        for i in range(m):
            for j in range(k):
                if (i, j) not in in_basis and cost[i, j] - u[i] - v[j] < -eps:
                    entering = (i, j)
                    break
            if entering:
                break
        if entering is None:
            break
        it += 1
        if it > max_iter:
            raise TransportError(f"no convergence after {max_iter} pivots")
        path = _tree_path(basis, entering[0], entering[1])
        minus = path[0::2]
        plus = path[1::2]
        theta = min(flow[c] for c in minus)
        tol = 0 if exact else eps * max(1.0, abs(theta))
        leaving = min((c for c in minus if flow[c] <= theta + tol), key=lambda c: c[0] * k + c[1])
        flow[entering] = theta
        for c in minus:
            flow[c] -= theta
        for c in plus:
            flow[c] += theta
        if not exact:
            for c in minus:
                if flow[c] < 0:
                    flow[c] = 0.0
        del flow[leaving]
        basis[basis.index(leaving)] = entering

    out = np.zeros((m, k), dtype=object if exact else np.float64)
    for (i, j), q in flow.items():
        out[i, j] = q
    total = sum((out[i, j] * cost[i, j] for i in range(m) for j in range(k)), 0 * cost[0, 0])
    return out, total, (u, v), it
