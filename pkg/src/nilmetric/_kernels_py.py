"""Pure-Python versions of the hot kernels.

Same signatures and results as the compiled ``_kernels`` extension; used when
the extension is not built or when ``NILMETRIC_PURE_PYTHON=1``.
"""
import numpy as np

from .errors import ResourceLimit

RUN = 0
PAT = 1


def collect_units(n_gens, corr, csign, letters):
    """Leftmost collection of ``letters`` (list of ``(rank, exp)``).

    Generators are identified by rank in the generator order (0 = smallest).
    ``corr[g * n_gens + h]`` is the rank of ``[a_g, a_h]`` or -1 when the two
    commute, and ``csign`` its sign.  The word is kept as a sorted, freely
    reduced prefix (one signed block per generator, ``ex``) followed by a
    stack of pending entries; runs of commuting swaps are done in bulk since
    they never change instance counts.

    Returns ``(ex, peak, swaps)``: final exponents by rank, peak instance
    count per rank, and the number of unit transpositions performed.
    """
    N = n_gens
    ex = [0] * N
    counts = [0] * N
    for r, e in letters:
        counts[r] += abs(e)
    peak = list(counts)
    swaps = 0
    stack = [(RUN, r, e, 0, 0, 0) for r, e in reversed(letters) if e]

    def merge(g, e):
        cur = ex[g]
        if cur and (cur > 0) != (e > 0):
            counts[g] -= 2 * min(abs(cur), abs(e))
        ex[g] = cur + e

    while stack:
        kind, y, e, c, sc, m = stack.pop()
        if kind == RUN:
            t = 1 if e > 0 else -1
            commuting = True
            passed = 0
            for g in range(y):
                if ex[g]:
                    if corr[g * N + y] >= 0:
                        commuting = False
                        break
                    passed += abs(ex[g])
            if commuting:
                swaps += abs(e) * passed
                merge(y, e)
                continue
            if e != t:
                stack.append((RUN, y, e - t, 0, 0, 0))
            # one unit of y bubbles left past every smaller block
            for g in range(y):
                b = ex[g]
                if not b:
                    continue
                ex[g] = 0
                swaps += abs(b)
                h = corr[g * N + y]
                if h < 0:
                    stack.append((RUN, g, b, 0, 0, 0))
                else:
                    sx = 1 if b > 0 else -1
                    counts[h] += abs(b)
                    if counts[h] > peak[h]:
                        peak[h] = counts[h]
                    stack.append((PAT, g, sx, h, csign[g * N + y] * sx * t, abs(b)))
            merge(y, t)
        else:
            # pattern (x^sx c^sc)^m with x = y, sx = e
            x, sx = y, e
            commuting = True
            passed = 0
            for g in range(c):
                if ex[g] and g != x:
                    if corr[g * N + c] >= 0:
                        commuting = False
                        break
                    passed += abs(ex[g])
            if commuting:
                u0 = abs(ex[x])
                swaps += m * passed + m * u0 + m * (m + 1) // 2
                merge(x, sx * m)
                merge(c, sc * m)
                continue
            if m > 1:
                stack.append((PAT, x, sx, c, sc, m - 1))
            stack.append((RUN, c, sc, 0, 0, 0))
            merge(x, sx)
    return ex, peak, swaps


def bfs_ball(n_entries, moves, radius, budget):
    """Breadth-first search of the Cayley graph from the identity.

    ``moves`` is a list of ``(pairs, direct, s)``: right multiplication by the
    move adds ``s * v[src]`` to ``v[dst]`` for each ``(dst, src)`` in
    ``pairs`` and ``s`` to ``v[direct]``.  Returns ``(states, dist, parent,
    via, spheres)`` in discovery order.  Raises ``ResourceLimit`` once more
    than ``budget`` states would be stored; ``partial`` is the last complete
    radius.
    """
    start = (0,) * n_entries
    index = {start: 0}
    states = [start]
    dist = [0]
    parent = [-1]
    via = [-1]
    spheres = [1]
    lo, hi = 0, 1
    for r in range(1, radius + 1):
        found = 0
        for s_idx in range(lo, hi):
            v0 = states[s_idx]
            for m_idx, (pairs, direct, s) in enumerate(moves):
                v = list(v0)
                for dst, src in pairs:
                    a = v0[src]
                    if a:
                        v[dst] += s * a
                v[direct] += s
                key = tuple(v)
                if key in index:
                    continue
                if len(states) >= budget:
                    raise ResourceLimit(
                        f"ball exceeds budget of {budget} elements at radius {r}", partial=r - 1
                    )
                index[key] = len(states)
                states.append(key)
                dist.append(r)
                parent.append(s_idx)
                via.append(m_idx)
                found += 1
        spheres.append(found)
        lo, hi = hi, len(states)
        if found == 0:
            break
    return states, dist, parent, via, spheres


def min_power_parts(k, size):
    """``dp[n]`` = fewest k-th powers summing to n, for ``0 <= n < size``.

    Unbounded knapsack one base at a time; along each residue class mod
    ``s = q^k`` the update is ``new[t] = t + cummin(old[u] - u)``.
    """
    dp = np.arange(size, dtype=np.int64)
    q = 2
    while q ** k < size:
        s = q ** k
        rows = -(-size // s)
        padded = np.full(rows * s, np.iinfo(np.int64).max // 2, dtype=np.int64)
        padded[:size] = dp
        t = np.arange(rows, dtype=np.int64)[:, None]
        block = np.minimum.accumulate(padded.reshape(rows, s) - t, axis=0) + t
        dp = block.reshape(-1)[:size].copy()
        q += 1
    return dp
