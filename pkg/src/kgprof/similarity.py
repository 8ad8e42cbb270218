"""String similarity measures used by the label linker.

All measures take normalized strings and return a value in [0, 1]; two
identical strings always score 1.0.
"""

from __future__ import annotations

from functools import partial

__all__ = [
    "MEASURES",
    "equality",
    "levenshtein_distance",
    "scaled_levenshtein",
    "jaccard",
    "jaro",
    "jaro_winkler",
    "monge_elkan",
    "get_measure",
    "similarity",
    "tokens",
]


def tokens(text):
    return text.split()


def equality(a, b):
    return 1.0 if a == b else 0.0


def levenshtein_distance(a, b):
    """Unit-cost edit distance (insert, delete, substitute)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def scaled_levenshtein(a, b):
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest


def jaccard(a, b):
    """Jaccard coefficient of the whitespace token sets."""
    ta, tb = set(a.split()), set(b.split())
    union = ta | tb
    if not union:
        return 1.0
    return len(ta & tb) / len(union)


def jaro(a, b):
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if not la or not lb:
        return 0.0
    window = max(0, max(la, lb) // 2 - 1)
    b_used = [False] * lb
    a_matched = []
    for i, ca in enumerate(a):
        lo, hi = max(0, i - window), min(lb, i + window + 1)
        for j in range(lo, hi):
            if not b_used[j] and b[j] == ca:
                b_used[j] = True
                a_matched.append(ca)
                break
    m = len(a_matched)
    if not m:
        return 0.0
    b_matched = [cb for cb, used in zip(b, b_used) if used]
    half_transpositions = sum(x != y for x, y in zip(a_matched, b_matched))
    t = half_transpositions // 2
    return (m / la + m / lb + (m - t) / m) / 3.0


def jaro_winkler(a, b, prefix_scale=0.1, max_prefix=4, boost_threshold=0.7):
    """Jaro with Winkler's common-prefix boost, applied above ``boost_threshold``."""
    sim = jaro(a, b)
    if sim <= boost_threshold:
        return sim
    prefix = 0
    for ca, cb in zip(a[:max_prefix], b[:max_prefix]):
        if ca != cb:
            break
        prefix += 1
    return sim + prefix * prefix_scale * (1.0 - sim)


def _monge_elkan_directed(ta, tb, inner):
    return sum(max(inner(x, y) for y in tb) for x in ta) / len(ta)


def monge_elkan(a, b, inner=jaro_winkler):
    """Symmetrized Monge-Elkan: max of both directions of the token-wise best-match mean."""
    ta, tb = a.split(), b.split()
    if not ta or not tb:
        return 1.0 if not ta and not tb else 0.0
    return max(_monge_elkan_directed(ta, tb, inner), _monge_elkan_directed(tb, ta, inner))


MEASURES = {
    "equality": equality,
    "scaledLevenshtein": scaled_levenshtein,
    "jaccard": jaccard,
    "jaro": jaro,
    "jaroWinkler": jaro_winkler,
    "mongeElkan": monge_elkan,
}


def get_measure(name, inner=None):
    try:
        fn = MEASURES[name]
    except KeyError:
        raise ValueError(f"unknown similarity measure {name!r}; choose from {sorted(MEASURES)}") from None
    if name == "mongeElkan" and inner is not None:
        return partial(monge_elkan, inner=get_measure(inner))
    return fn


def similarity(measure, a, b):
    return get_measure(measure)(a, b)
