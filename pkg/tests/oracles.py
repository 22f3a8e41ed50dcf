"""Independent brute-force reference implementations used by the tests.

Everything here is written directly from first principles (nested loops,
explicit formulas) and deliberately shares no code with the library.
"""

import math


# --- rating construction ----------------------------------------------------

def raw_scores_bruteforce(plays, n_users, latest, window=24):
    """Nested-loop evaluation of the recency-weighted TF x IDF sum.

    plays: list of (user, song, (year, month)) tuples, one per play event.
    Returns {(user, song): score}.
    """
    months = sorted({m for (_, _, m) in plays})
    users = sorted({u for (u, _, _) in plays})
    songs = sorted({s for (_, s, _) in plays})

    scores = {}
    for u in users:
        for s in songs:
            total = 0.0
            seen = False
            for m in months:
                count = sum(1 for (pu, ps, pm) in plays if pu == u and ps == s and pm == m)
                if count == 0:
                    continue
                seen = True
                df = len({pu for (pu, ps, pm) in plays if ps == s and pm == m})
                k = (latest[0] - m[0]) * 12 + (latest[1] - m[1])
                weight = (window - k) / window if k < window else 0.0
                idf = math.log(n_users / (1 + df))
                if idf < 0.0:
                    idf = 0.0
                total += weight * count * idf
            if seen:
                scores[(u, s)] = total
    return scores


# --- collaborative filtering ------------------------------------------------

def cf_pearson_bruteforce(ratings_u, ratings_v):
    """Pearson over the co-rated songs of two {song: rating} dicts.

    Returns (similarity, overlap) or (None, overlap) when undefined.
    """
    common = sorted(set(ratings_u) & set(ratings_v))
    n = len(common)
    if n == 0:
        return None, 0
    a = [ratings_u[s] for s in common]
    b = [ratings_v[s] for s in common]
    ma = sum(a) / n
    mb = sum(b) / n
    num = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    if va == 0.0 or vb == 0.0:
        return None, n
    r = num / math.sqrt(va * vb)
    return max(-1.0, min(1.0, r)), n


def cf_neighbors_bruteforce(rows, target, k, min_overlap=3,
                            significance_cap=50, drop_negative=False):
    """All-pairs neighbor ranking. rows: list of {song: rating} per user.

    Returns a list of (user, similarity, overlap) sorted by |sim| desc then
    user index asc, truncated to k.
    """
    out = []
    for v in range(len(rows)):
        if v == target:
            continue
        sim, overlap = cf_pearson_bruteforce(rows[target], rows[v])
        if overlap < min_overlap or sim is None:
            continue
        if significance_cap:
            sim = sim * min(overlap, significance_cap) / significance_cap
        if drop_negative and sim < 0:
            continue
        out.append((v, sim, overlap))
    out.sort(key=lambda t: (-abs(t[1]), t[0]))
    return out[:k]


def cf_predict_bruteforce(rows, means, target, song, neighbor_list):
    """Mean-centered weighted prediction; None when no neighbor rated song."""
    num = 0.0
    den = 0.0
    support = 0
    for (v, sim, _) in neighbor_list:
        if song not in rows[v]:
            continue
        support += 1
        num += sim * (rows[v][song] - means[v])
        den += abs(sim)
    if support == 0:
        return None
    value = means[target] + (num / den if den > 0.0 else 0.0)
    return max(1.0, min(5.0, value)), support


def cf_recommend_bruteforce(rows, means, n_songs, target, n, k,
                            exclude_rated=True, min_overlap=3,
                            significance_cap=50):
    neighbor_list = cf_neighbors_bruteforce(
        rows, target, k, min_overlap, significance_cap
    )
    if not neighbor_list:
        return None
    scored = []
    for song in range(n_songs):
        if exclude_rated and song in rows[target]:
            continue
        pred = cf_predict_bruteforce(rows, means, target, song, neighbor_list)
        if pred is None:
            continue
        scored.append((song, pred[0]))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:n]


# --- ranking metrics --------------------------------------------------------

def ap_at_k_bruteforce(ranked, relevant, k):
    """Average precision by direct evaluation of the defining sum."""
    top = ranked[:k]
    rel_flags = [1 if item in relevant else 0 for item in top]
    r_k = sum(rel_flags)
    if r_k == 0:
        return 0.0
    total = 0.0
    for pos in range(1, len(top) + 1):
        s_pos = sum(rel_flags[:pos])
        total += (s_pos / pos) * rel_flags[pos - 1]
    return total / r_k


def ndcg_at_k_bruteforce(gains, k):
    """NDCG by direct evaluation: DCG over gains / DCG over sorted gains."""
    def dcg(values):
        total = 0.0
        for i, g in enumerate(values[:k], start=1):
            total += g / math.log2(i + 1)
        return total

    ideal = dcg(sorted(gains, reverse=True))
    if ideal == 0.0:
        return 0.0
    return dcg(gains) / ideal
