"""Independent reference implementations used only by tests."""

import math


def coverage_bruteforce(counts, target):
    """Smallest k whose top-k share reaches ``target`` percent, by linear scan."""
    counts = sorted(counts, reverse=True)
    total = sum(counts)
    running = 0
    for k, c in enumerate(counts, 1):
        running += c
        if running * 100 >= target * total:
            return k
    return len(counts)


def average_ranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def spearman_rho(x, y):
    return pearson(average_ranks(x), average_ranks(y))
