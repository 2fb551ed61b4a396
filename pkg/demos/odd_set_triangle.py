"""Why the matching LP is stronger than the configuration LP.

Three near-half items fit pairwise but not all together. The configuration
LP packs them at 1.5 by putting weight 1/2 on every pair; that edge vector
is not a convex combination of matchings, and the matching LP must pay 2.
"""

from vbplab.config_lp import solve_config_lp
from vbplab.core import Instance
from vbplab.matching import build_matching_graph, decompose, mlp_column_generation
from vbplab.oracle import exact_opt

DELTA = 0.1


def main():
    inst = Instance.from_items([[0.5, 0.45], [0.45, 0.5], [0.48, 0.48]])
    graph = build_matching_graph(inst, DELTA)
    print("edges:", graph.edges)

    x, z = solve_config_lp(inst, None, DELTA)
    print(f"configuration LP {z:.3f}:", {c: round(w, 3) for c, w in x.weights})
    p = x.edge_projection(graph.edges)
    print("edge projection", p.round(3), "->", decompose(graph, p))

    res = mlp_column_generation(inst, DELTA)
    print(f"matching LP {res.value:.3f} ({res.status}):", {c: round(w, 3) for c, w in res.x.weights})
    print("cuts added:", res.cuts)
    dec = res.decomposition
    print("matchings:", [(m, round(float(w), 3)) for m, w in zip(dec.matchings, dec.weights)])
    print("OPT", exact_opt(inst)[0])


if __name__ == "__main__":
    main()
