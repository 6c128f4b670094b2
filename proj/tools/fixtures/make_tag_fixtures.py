#!/usr/bin/env python3
"""Generate the SDG tag databases under fixtures/tags/.

Each dataset is a list of talks with a set of goal tags. A local search toggles
single (talk, goal) memberships until the published aggregates hold exactly:
per-goal talk counts, the reported pair counts, the reported zero pairs, and an
upper bound on every other pair so the reported top pairs stay on top.

Usage: make_tag_fixtures.py OUT_DIR
"""
import random
import sys
from itertools import combinations

GOALS = range(1, 18)

PRELIMINARY = dict(
    label="preliminary",
    talks=269,
    diag={1: 20, 2: 12, 3: 70, 4: 102, 5: 25, 6: 8, 7: 60, 8: 75, 9: 55, 10: 115,
          11: 50, 12: 48, 13: 65, 14: 15, 15: 16, 16: 99, 17: 60},
    pairs={(10, 16): 71, (4, 10): 57, (4, 16): 47},
    zeros=[],
    cap=40,
    seed=2023,
)

FORMAL = dict(
    label="formal",
    talks=1127,
    diag={1: 120, 2: 60, 3: 353, 4: 346, 5: 147, 6: 12, 7: 107, 8: 306, 9: 250,
          10: 521, 11: 230, 12: 220, 13: 280, 14: 51, 15: 100, 16: 427, 17: 200},
    pairs={(10, 16): 298, (4, 10): 199, (8, 10): 189},
    zeros=[(4, 14), (5, 7), (5, 14), (6, 8)],
    cap=170,
    seed=2024,
)


def penalty_terms(spec):
    pairs = dict(spec["pairs"])
    for z in spec["zeros"]:
        pairs[z] = 0
    return pairs


def solve(spec):
    rng = random.Random(spec["seed"])
    n = spec["talks"]
    diag = spec["diag"]
    exact = penalty_terms(spec)
    cap = spec["cap"]
    talks = [set() for _ in range(n)]

    # Seed the exact pairs so the search starts near a solution.
    order = list(range(n))
    rng.shuffle(order)
    cursor = 0
    for (a, b), count in spec["pairs"].items():
        for _ in range(count):
            talks[order[cursor % n]].update((a, b))
            cursor += 1

    count = {g: 0 for g in GOALS}
    pair = {p: 0 for p in combinations(GOALS, 2)}
    for s in talks:
        for g in s:
            count[g] += 1
        for p in combinations(sorted(s), 2):
            pair[p] += 1

    def pair_cost(p, v):
        if p in exact:
            return abs(v - exact[p]) * 4
        return max(0, v - cap) * 4

    def talk_cost(s):
        return 10 if not s else 0

    def total():
        c = sum(abs(count[g] - diag[g]) for g in GOALS)
        c += sum(pair_cost(p, v) for p, v in pair.items())
        c += sum(talk_cost(s) for s in talks)
        return c

    cost = total()
    steps = 0
    while cost > 0:
        steps += 1
        if steps > 5_000_000:
            raise SystemExit(f"{spec['label']}: no solution, residual {cost}")
        t = rng.randrange(n)
        g = rng.choice(list(GOALS))
        s = talks[t]
        adding = g not in s
        delta = 0
        old_c = abs(count[g] - diag[g])
        new_c = abs(count[g] + (1 if adding else -1) - diag[g])
        delta += new_c - old_c
        for h in s:
            if h == g:
                continue
            p = (min(g, h), max(g, h))
            v = pair[p]
            delta += pair_cost(p, v + (1 if adding else -1)) - pair_cost(p, v)
        size_after = len(s) + (1 if adding else -1)
        delta += (10 if size_after == 0 else 0) - talk_cost(s)
        if delta <= 0 or rng.random() < 0.001:
            for h in s:
                if h == g:
                    continue
                p = (min(g, h), max(g, h))
                pair[p] += 1 if adding else -1
            count[g] += 1 if adding else -1
            if adding:
                s.add(g)
            else:
                s.discard(g)
            cost = total() if steps % 1000 == 0 else cost + delta
    assert total() == 0
    return talks


def verify(spec, talks):
    assert len(talks) == spec["talks"]
    assert all(talks)
    for g in GOALS:
        assert sum(g in s for s in talks) == spec["diag"][g], g
    for (a, b), v in penalty_terms(spec).items():
        assert sum(a in s and b in s for s in talks) == v, (a, b)
    top = max(spec["pairs"].values())
    for a, b in combinations(GOALS, 2):
        if (a, b) not in spec["pairs"]:
            assert sum(a in s and b in s for s in talks) <= spec["cap"]
    return sum(len(s) for s in talks)


def main():
    out = sys.argv[1]
    for spec in (PRELIMINARY, FORMAL):
        talks = solve(spec)
        tags = verify(spec, talks)
        path = f"{out}/{spec['label']}.tsv"
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# goalforge-tags\tversion=1\tdataset={spec['label']}\n")
            f.write("video_id\tsdg_types\n")
            for i, s in enumerate(talks, 1):
                f.write(f"{spec['label'][:4]}-{i:04d}\t{','.join(str(g) for g in sorted(s))}\n")
        print(spec["label"], len(talks), "talks", tags, "tags")


if __name__ == "__main__":
    main()
