"""Brute-force reference computations, independent of the library internals."""

from itertools import product

import numpy as np


def brute_walks(G, m):
    """All (m+1)-tuples of ids with (x_{i+1}, x_i) in G, by exhaustive product."""
    ids = G.space.ids
    return {t for t in product(ids, repeat=m + 1)
            if all((t[i + 1], t[i]) in G.pairs for i in range(m))}


def matrix_power_count(G, m):
    """Entry sum of the m-th power of the 0/1 adjacency matrix, in Python integers."""
    ids = G.space.ids
    n = len(ids)
    A = [[1 if (ids[j], ids[i]) in G.pairs else 0 for j in range(n)] for i in range(n)]
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(m):
        P = [[sum(P[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return sum(map(sum, P))


def spectral_entropy(G):
    """log of the spectral radius via numpy eigenvalues (float reference)."""
    ids = G.space.ids
    n = len(ids)
    if n == 0:
        return 0.0
    A = np.array([[1.0 if (b, a) in G.pairs else 0.0 for b in ids] for a in ids])
    r = max(abs(np.linalg.eigvals(A))) if n else 0.0
    return float(np.log(r)) if r > 1 + 1e-9 else 0.0


def brute_return_exists(G, A, k, eps):
    """Every a in A has two walks of common length <= k ending in A, > eps apart somewhere after 1."""
    A = set(A)
    sp = G.space
    for a in A:
        found = False
        for j in range(2, k + 1):
            walks = [w for w in brute_walks(G, j - 1) if w[0] == a and w[-1] in A]
            for x in walks:
                for y in walks:
                    if any(sp.distance(x[i], y[i]) > eps for i in range(1, j)):
                        found = True
                        break
                if found:
                    break
            if found:
                break
        if not found:
            return False
    return True
