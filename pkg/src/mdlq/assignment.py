"""Exact minimum-cost bipartite assignment (Hungarian algorithm).

Runs on exact numeric types (ints or Fractions) so that optimality
comparisons in the labeling construction are never subject to float noise.
The O(n^3) potentials formulation is deterministic for a fixed input order;
orbit matrices here never exceed a few dozen rows.
"""

from __future__ import annotations


def min_cost_assignment(cost):
    """Solve the square assignment problem exactly.

    ``cost`` is an n x n matrix (sequence of sequences) of ints or Fractions.
    Returns ``(cols, total)`` where ``cols[i]`` is the column assigned to row
    ``i`` and ``total`` is the exact optimal cost.
    """
    n = len(cost)
    if n == 0:
        return [], 0
    if any(len(row) != n for row in cost):
        raise ValueError("cost matrix must be square")
    inf = sum(abs(c) for row in cost for c in row) + 1

    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j] = row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    cols = [0] * n
    for j in range(1, n + 1):
        cols[p[j] - 1] = j - 1
    total = sum(cost[i][cols[i]] for i in range(n))
    return cols, total
