"""Independent reference implementations used only by the tests."""
from nilmetric.core import Word, order_key


def literal_collect(w: Word):
    """Leftmost collection on an explicit list of unit letters.

    Scans for the leftmost reducible adjacent pair (free cancellation, or an
    out-of-order pair) and acts on it, one step at a time.  Quadratic per
    step; only for short words.  Returns (exponents, peak counts, swaps,
    first-diagonal count after every step).
    """
    seq = [(tuple(g), s) for g, s in w.units()]
    counts = {}
    for g, _ in seq:
        counts[g] = counts.get(g, 0) + 1
    peak = dict(counts)
    swaps = 0
    first_history = [sum(c for g, c in counts.items() if g[1] - g[0] == 1)]
    while True:
        for p in range(len(seq) - 1):
            (g, s), (h, t) = seq[p], seq[p + 1]
            if g == h and s == -t:
                del seq[p:p + 2]
                counts[g] -= 2
                break
            if order_key(g) < order_key(h):
                swaps += 1
                seq[p], seq[p + 1] = seq[p + 1], seq[p]
                (a, b), (c, d) = g, h
                corr = None
                if b == c:
                    corr = ((a, d), s * t)
                elif a == d:
                    corr = ((c, b), -s * t)
                if corr:
                    seq.insert(p + 2, corr)
                    counts[corr[0]] = counts.get(corr[0], 0) + 1
                    peak[corr[0]] = max(peak.get(corr[0], 0), counts[corr[0]])
                break
        else:
            break
        first_history.append(sum(c for g, c in counts.items() if g[1] - g[0] == 1))
    exps = {}
    for g, s in seq:
        exps[g] = exps.get(g, 0) + s
    return exps, peak, swaps, first_history


def dense_matmul(a, b):
    """Plain list-of-lists integer matrix product."""
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def dense_generator(n, i, j, e=1):
    m = [[int(r == c) for c in range(n)] for r in range(n)]
    m[i - 1][j - 1] += e
    return m


def dense_word(w, n):
    m = [[int(r == c) for c in range(n)] for r in range(n)]
    for g, e in w:
        m = dense_matmul(m, dense_generator(n, g.i, g.j, e))
    return m


def dense_identity(n):
    return [[int(r == c) for c in range(n)] for r in range(n)]


def dense_from_entries(n, entries):
    m = dense_identity(n)
    for (i, j), v in entries.items():
        m[i - 1][j - 1] = v
    return m


def dense_entries(m):
    n = len(m)
    return {(i + 1, j + 1): m[i][j] for i in range(n) for j in range(i + 1, n) if m[i][j]}


def naive_ball(n, gens, radius):
    """Plain BFS over dense matrices; maps frozen matrices to lengths."""
    key = lambda m: tuple(tuple(r) for r in m)  # noqa: E731
    start = dense_identity(n)
    seen = {key(start): 0}
    frontier = [start]
    steps = [dense_generator(n, i, j, s) for i, j in gens for s in (1, -1)]
    for r in range(1, radius + 1):
        nxt = []
        for m in frontier:
            for g in steps:
                y = dense_matmul(m, g)
                k = key(y)
                if k not in seen:
                    seen[k] = r
                    nxt.append(y)
        frontier = nxt
    return seen


def brute_min_powers(m, k):
    """Fewest k-th powers (of positive integers) summing to m, by plain recursion."""
    best = {0: 0}
    for n in range(1, m + 1):
        q, cand = 1, n
        while q ** k <= n:
            cand = min(cand, best[n - q ** k] + 1)
            q += 1
        best[n] = cand
    return best[m]


def brute_kth_root(m, k):
    r = 0
    while (r + 1) ** k <= m:
        r += 1
    return r
