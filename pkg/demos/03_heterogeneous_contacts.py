"""Degree-dependent infection pressure on a concrete topology.

The contact graph is the documented fixture family: a ring over nodes 1..n-1
plus node 0 joined to everything.  The tagged node (2, degree 3) sees much
weaker infection pressure than under well-mixed contacts, so the transient
phase stretches out and the stationary regime arrives later.  Both closure
variants of the infected-neighbor term are shown.
"""

import numpy as np

import retrialsi as rs

graph = rs.ring_with_hub(10)
print("fixture graph ring_with_hub(10):")
print("  degrees:", graph.degrees.tolist(), f" edges: {graph.edge_count}")

base = dict(N=10, c=5, alpha=5.0, mu=0.4, theta=2.0)
hom = rs.ModelConfig(**base)
mean_field = rs.ModelConfig(**base, mode="heterogeneous", tagged_node=2,
                            closure=rs.Closure.MEAN_FIELD)
full = rs.ModelConfig(**base, mode="heterogeneous", tagged_node=2,
                      closure=rs.Closure.FULL_NEIGHBOR)

print("\narrival rates seen at a few states (tagged node 2, degree 3):")
print(f"{'state':>8} {'well-mixed':>11} {'mean-field':>11} {'full-neighbor':>14}")
for state in [(0, 0), (2, 1), (5, 2), (5, 5)]:
    print(f"{str(state):>8} {rs.arrival_rate_hom(hom, *state):11.4f} "
          f"{rs.arrival_rate_het(mean_field, graph, *state):11.4f} "
          f"{rs.arrival_rate_het(full, graph, *state):14.4f}")

grid = np.round(np.arange(0.5, 40.01, 0.5), 10)
print(f"\n{'model':>14} {'E[I](2)':>9} {'E[I](14)':>9} {'E[R](14)':>9} {'1%-settle':>10}")
for label, cfg, g in [("well-mixed", hom, None),
                      ("mean-field", mean_field, graph),
                      ("full-neighbor", full, graph)]:
    gen = rs.build_generator(cfg, rs.rate_function(cfg, g))
    p0 = rs.delta_vector(cfg.space, cfg.initial_state)
    pi = rs.stationary_nullspace(gen)
    sol = rs.transient_grid(gen, p0, grid)
    settle = next((float(t) for t, v in zip(sol.times, sol.vectors)
                   if np.abs(v.values - pi.values).sum() <= 0.01), float("inf"))
    print(f"{label:>14} {rs.moment_recovering(sol.at(2.0)):9.4f} "
          f"{rs.moment_recovering(sol.at(14.0)):9.4f} "
          f"{rs.moment_orbit(sol.at(14.0)):9.4f} {settle:10.1f}")

print("\nthe degree-bounded rates slow the spread: the heterogeneous variants"
      "\ntake noticeably longer to reach stationarity than the well-mixed model")
