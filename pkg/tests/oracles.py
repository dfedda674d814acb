"""Brute-force reference implementations used only by the tests.

Each one is deliberately naive and shares no code with the package, so
agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
from collections import deque


def letters(k):
    out = []
    for i in range(1, k + 1):
        out += [i, -i]
    return out


def all_words(k, n):
    """Every word of length exactly n, as tuples, in product order."""
    return list(itertools.product(letters(k), repeat=n))


def naive_reduce(w):
    """Free reduction by repeated deletion of adjacent inverse pairs."""
    w = list(w)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i] == -w[i + 1]:
                del w[i:i + 2]
                changed = True
                break
    return tuple(w)


def exponent_vector(w, k):
    v = [0] * k
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def inv(w):
    return tuple(-x for x in reversed(w))


def subgroup_elements(gens, cap):
    """Reduced words of length <= cap in <gens>, via BFS over products.

    Complete for Nielsen-reduced generating sets, where the prefixes of a
    reduced product are never longer than the product itself.  Every set
    used in the tests is of that kind.
    """
    moves = [naive_reduce(g) for g in gens] + [inv(naive_reduce(g)) for g in gens]
    seen = {()}
    queue = deque([()])
    while queue:
        w = queue.popleft()
        for g in moves:
            u = naive_reduce(w + g)
            if len(u) <= cap and u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


def cyclic_conjugates(r):
    out = set()
    for rr in (tuple(r), inv(r)):
        for i in range(len(rr)):
            out.add(rr[i:] + rr[:i])
    return out


def trivial_words_by_insertion(relators, cap):
    """Reduced words of length <= cap obtained from the empty word by
    inserting relator conjugates and freely reducing, never exceeding cap."""
    rels = set()
    for r in relators:
        rels |= cyclic_conjugates(r)
    seen = {()}
    queue = deque([()])
    while queue:
        w = queue.popleft()
        for i in range(len(w) + 1):
            for r in rels:
                u = naive_reduce(w[:i] + r + w[i:])
                if len(u) <= cap and u not in seen:
                    seen.add(u)
                    queue.append(u)
    return seen


def free_conjugate_naive(u, v):
    """Conjugate in F_k iff some cyclic rotation of the cyclic reduction matches."""
    def cyc(w):
        w = naive_reduce(w)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return w
    a, b = cyc(u), cyc(v)
    if len(a) != len(b):
        return False
    return any(a[i:] + a[:i] == b for i in range(max(len(a), 1)))


def cayley_closed_walks(k, n, image):
    """Number of words of length n whose image (a hashable computed by
    ``image``) equals image(()); brute force over all (2k)^n words."""
    e = image(())
    return sum(1 for w in all_words(k, n) if image(w) == e)


def reduced_closed(k, n, image):
    e = image(())
    return sum(1 for w in all_words(k, n) if naive_reduce(w) == w and image(w) == e)
