#!/usr/bin/env python3
"""Generate knowledge-graph fixtures whose structure mirrors the per-goal
observation table (initial / most connected / final node, colour variety,
arrow direction trend, node and link totals) for both datasets.

Writes OUT_DIR/<dataset>/goal-NN.json (nodes/links documents) and
OUT_DIR/reference.tsv with the row each graph was built to match.

Usage: make_graph_fixtures.py OUT_DIR
"""
import json
import os
import random
import sys

PALETTE = 8

# trend classes: (direction, mixed)  mixed => |outward - inward| <= 2
IN, OUT = "Inward", "Outward"

# goal: (initial, [most connected], final, colors, direction, mixed, nodes, links)
PRELIMINARY = {
    1: ("Eradicating Poverty", ["Eradicating Poverty", "Girls' Success and Empowerment"], "Ethical Implementation", 3, OUT, True, 24, 18),
    2: ("Zero Hunger", ["Zero Hunger", "Sustainable Rice Farming"], "Target Interventions and Humanitarian Assistance", 3, IN, False, 16, 15),
    3: ("Goal 3: Good Health and Well-being", ["Goal 3: Good Health and Well-being"], "Environmental Issues", 3, IN, False, 11, 10),
    4: ("SDG 4 - Quality Education", ["SDG 4 - Quality Education"], "Social-emotional learning", 3, IN, False, 16, 15),
    5: ("SDG Goal 5", ["SDG Goal 5"], "Data and Evidence", 3, OUT, False, 16, 16),
    6: ("SDG 6: Clean Water and Sanitation", ["Sustainable Living"], "Decision-making Processes", 6, OUT, True, 26, 25),
    7: ("AI Impacts (kg_box)", ["AI Impacts (kg_box)"], "Explainable AI Solutions", 3, OUT, False, 14, 9),
    8: ("Decent Work and Economic Growth", ["Decent Work and Economic Growth", "Data Ownership", "Boredom", "AGI"], "Problem-Solving", 5, IN, True, 30, 29),
    9: ("Goal 9", ["Goal 9"], "Inclusive Innovation Policies", 2, IN, False, 14, 13),
    10: ("SDGs Goal 10: Reduced Inequalities", ["SDGs Goal 10: Reduced Inequalities"], "International Cooperation", 3, IN, False, 22, 21),
    11: ("SDGs Goal 11: Sustainable Cities and Communities", ["SDGs Goal 11: Sustainable Cities and Communities"], "Promoting Social Equality in Urban Development", 2, IN, False, 14, 13),
    12: ("SDGs Goal 12", ["SDGs Goal 12"], "International Cooperation", 2, IN, False, 14, 13),
    13: ("SDGs Goal 13: Climate Action", ["SDGs Goal 13: Climate Action"], "Circular Food System", 3, OUT, False, 15, 14),
    14: ("SDG 14 - Life Below Water", ["SDG 14 - Life Below Water"], "Regenerative Ocean Farming", 5, IN, False, 16, 16),
    15: ("SDG 15: Life on Land", ["SDG 15: Life on Land"], "Global collaboration", 2, IN, False, 20, 19),
    16: ("SDG 16 - Peace, Justice, and Strong Institutions", ["SDG 16 - Peace, Justice, and Strong Institutions"], "Citizen Diplomacy", 4, IN, False, 17, 16),
    17: ("SDG 17 - Partnerships for the Goals", ["SDG 17 - Partnerships for the Goals", "Online Communities"], "Global Collaboration on Mechanisms", 3, IN, True, 16, 14),
}

FORMAL = {
    1: ("No Poverty", ["No Poverty"], "Philanthropic Organizations", 3, IN, False, 14, 16),
    2: ("Zero Hunger", ["Zero Hunger"], "Cultural Food Traditions", 4, OUT, False, 19, 18),
    3: ("Goal 3: Good Health and Well-being", ["Goal 3: Good Health and Well-being"], "Stress Reduction Techniques", 4, IN, False, 15, 14),
    4: ("SDGs Goal4: Quality Education", ["White Paper"], "Transparency and Accountability in AI", 5, OUT, True, 22, 21),
    5: ("SDGs Goal 5", ["Implementation Strategies"], "International Development", 3, OUT, False, 15, 14),
    6: ("SDG6", ["White Paper"], "Roles and Responsibilities", 4, OUT, False, 13, 7),
    7: ("Goal 7: Affordable and Clean Energy", ["Goal 7: Affordable and Clean Energy", "Progress Measurement"], "Global Challenges", 6, OUT, False, 31, 30),
    8: ("Decent Work and Economic Growth", ["Decent Work and Economic Growth"], "Well-being and Sustainability", 4, IN, False, 18, 17),
    9: ("Innovation", ["Innovation", "Holistic Approach", "Ethical Imperative"], "Environmental Stewardship", 3, OUT, False, 17, 15),
    10: ("Equitable Access to Quality Education", ["Individual Action"], "Philanthropy and Impact Investing", 3, OUT, False, 12, 6),
    11: ("Sustainable Cities and Communities", ["Sustainable Cities and Communities"], "Global Collaboration", 3, IN, False, 10, 9),
    12: ("SDG 12", ["SDG 12"], "Collaboration and Partnerships", 2, OUT, False, 11, 10),
    13: ("Climate Change", ["Climate Change"], "Vision", 4, OUT, False, 40, 39),
    14: ("Goal 14: Life Below Water", ["Goal 14: Life Below Water"], "Harmony with the Ocean", 4, OUT, False, 14, 13),
    15: ("SDG 15", ["SDG 15"], "Education and Awareness", 2, IN, False, 9, 8),
    16: ("SDG 16", ["Disinformation"], "White Paper", 6, OUT, True, 42, 29),
    17: ("Partnerships for the Goals", ["Partnerships for the Goals"], "Technology Serving Humanity", 7, IN, True, 41, 37),
}

# Most-connected nodes that sit in the outer (later) layers.
OUTER_HUBS = {("formal", 7), ("formal", 9), ("formal", 10), ("preliminary", 1)}

GENERIC = [
    "Community Engagement", "Public-Private Partnerships", "Data Transparency", "Policy Reform",
    "Youth Leadership", "Local Knowledge", "Capacity Building", "Digital Inclusion", "Impact Measurement",
    "Behavioural Change", "Open Data", "Grassroots Movements", "Financing Mechanisms", "Accountability",
    "Systems Thinking", "Indigenous Knowledge", "Social Innovation", "Ethical AI", "Storytelling",
    "Cross-sector Collaboration", "Education Campaigns", "Resilience Planning", "Citizen Science",
    "Circular Design", "Fair Trade", "Microfinance", "Mental Health Support", "Urban Farming",
    "Renewable Microgrids", "Early Warning Systems", "Inclusive Governance", "Women's Leadership",
    "Supply Chain Transparency", "Technology Transfer", "Participatory Budgeting", "Nature-based Solutions",
    "Peer Learning Networks", "Social Protection", "Green Jobs", "Evidence-based Policy", "Cultural Heritage",
    "Volunteer Networks", "Regulatory Sandboxes", "Long-term Thinking", "Global Solidarity",
    "Knowledge Sharing", "Empathy", "Trust Building", "Pilot Programs", "Scaling Success",
    "Monitoring Frameworks", "Human Rights", "Civic Technology", "Shared Responsibility", "Local Ownership",
]

RELATIONS = ["requires", "enables", "supports", "strengthens", "depends on", "is measured by", "informs",
             "drives", "is part of", "addresses", "builds on", "funds"]


def degrees(n, edges):
    d = [0] * (n + 1)
    for u, v, _ in edges:
        d[u] += 1
        if v != u:
            d[v] += 1
    return d


def variety(deg):
    lo, hi = min(deg[1:]), max(deg[1:])
    span = max(1, hi - lo + 1)
    return len({(x - lo) * PALETTE // span for x in deg[1:]})


def direction_counts(edges):
    inward = sum(1 for s, t, _ in edges if s > t)
    outward = sum(1 for s, t, _ in edges if s < t)
    return inward, outward


def cost(n, edges, hubs, direction, mixed, colors):
    deg = degrees(n, edges)
    top = max(deg[1:])
    c = 0
    hub_min = min(deg[h] for h in hubs)
    c += sum(top - deg[h] for h in hubs) * 3
    c += sum(max(0, deg[v] - (hub_min - 1)) for v in range(1, n + 1) if v not in hubs) * 3
    inward, outward = direction_counts(edges)
    lead, lag = (outward, inward) if direction == OUT else (inward, outward)
    diff = lead - lag
    if mixed:
        c += max(0, 1 - diff) * 2 + max(0, diff - 2) * 2
    else:
        c += max(0, 3 - diff) * 2
    if colors is not None:
        c += abs(variety(deg) - colors) * 4
    return c


def build(n, m, hubs, direction, mixed, colors, rng):
    pairs = set()
    edges = []
    # Start from a hub-centred forest, then extra edges.
    for v in range(2, n + 1):
        if len(edges) >= m:
            break
        u = rng.choice(sorted(hubs)) if rng.random() < 0.7 else rng.randrange(1, v)
        if u == v or (min(u, v), max(u, v)) in pairs:
            continue
        pairs.add((min(u, v), max(u, v)))
        edges.append((u, v, 0) if rng.random() < 0.5 else (v, u, 0))
    while len(edges) < m:
        u, v = rng.sample(range(1, n + 1), 2)
        if (min(u, v), max(u, v)) in pairs:
            continue
        pairs.add((min(u, v), max(u, v)))
        edges.append((u, v, 0))
    best = cost(n, edges, hubs, direction, mixed, colors)
    for _ in range(60000):
        if best == 0:
            return edges
        i = rng.randrange(m)
        s, t, r = edges[i]
        kind = rng.random()
        if kind < 0.3:
            cand = (t, s, r)
        else:
            keep = s if rng.random() < 0.5 else t
            other = rng.choice(sorted(hubs)) if rng.random() < 0.3 else rng.randrange(1, n + 1)
            if other == keep:
                continue
            cand = (keep, other, r) if rng.random() < 0.5 else (other, keep, r)
            key = (min(cand[0], cand[1]), max(cand[0], cand[1]))
            if key in {(min(a, b), max(a, b)) for j, (a, b, _) in enumerate(edges) if j != i}:
                continue
        trial = edges[:i] + [cand] + edges[i + 1:]
        c = cost(n, trial, hubs, direction, mixed, colors)
        if c <= best:
            edges, best = trial, c
    return edges if best == 0 else None


def hub_orders(dataset, goal, n, initial, hubs_labels, final, rng):
    orders = {}
    taken = {1, n}
    for label in hubs_labels:
        if label == initial:
            orders[label] = 1
            continue
        lo, hi = ((int(n * 0.6), n - 1) if (dataset, goal) in OUTER_HUBS else (2, max(2, int(n * 0.45))))
        while True:
            o = rng.randint(lo, hi)
            if o not in taken:
                taken.add(o)
                orders[label] = o
                break
    return orders


def make(dataset, goal, row, rng):
    initial, hub_labels, final, colors, direction, mixed, n, m = row
    orders = hub_orders(dataset, goal, n, initial, hub_labels, final, rng)
    labels = {1: initial, n: final}
    for label, o in orders.items():
        labels[o] = label
    pool = [g for g in GENERIC if g not in labels.values()]
    rng.shuffle(pool)
    for o in range(1, n + 1):
        if o not in labels:
            labels[o] = pool.pop()
    hubs = {orders[label] for label in hub_labels}
    attempts = 0
    reproduced = True
    while True:
        attempts += 1
        edges = build(n, m, hubs, direction, mixed, colors if reproduced else None, rng)
        if edges is not None:
            break
        if attempts >= 40:
            reproduced = False
    edges = [(s, t, rng.choice(RELATIONS)) for s, t, _ in edges]
    nodes = [{"id": labels[o], "order": o,
              "details": f"Concept raised in the Goal {goal} roundtable: {labels[o]}."} for o in range(1, n + 1)]
    links = [{"source": labels[s], "target": labels[t], "relation": r} for s, t, r in edges]
    return {"nodes": nodes, "links": links}, reproduced


def main():
    out = sys.argv[1]
    rows = []
    for dataset, table in (("preliminary", PRELIMINARY), ("formal", FORMAL)):
        os.makedirs(f"{out}/{dataset}", exist_ok=True)
        for goal, row in table.items():
            rng = random.Random(f"{dataset}-{goal}")
            doc, reproduced = make(dataset, goal, row, rng)
            with open(f"{out}/{dataset}/goal-{goal:02d}.json", "w", encoding="utf-8") as f:
                json.dump(doc, f, indent=2, ensure_ascii=False)
                f.write("\n")
            initial, hubs, final, colors, direction, mixed, n, m = row
            rows.append((dataset, goal, initial, "|".join(hubs), final, colors, int(reproduced), direction,
                         int(mixed), n, m))
            print(dataset, goal, "color reproduced" if reproduced else "color NOT reproduced")
    with open(f"{out}/reference.tsv", "w", encoding="utf-8") as f:
        f.write("# goalforge-kg-reference\tversion=1\n")
        f.write("dataset\tgoal\tinitial_node\tmost_connected\tfinal_node\tcolor_variety\tcolor_reproduced"
                "\tdirection_trend\tmixed_direction\tn_nodes\tn_links\n")
        for r in rows:
            f.write("\t".join(str(x) for x in r) + "\n")


if __name__ == "__main__":
    main()
