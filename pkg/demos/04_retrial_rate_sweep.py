"""How the retrial rate shapes the two occupancy processes.

Sweeps theta over the service-heavy setup (20 nodes, 8 units, recovery rate
1).  Faster retrials drain the orbit almost completely; with no retrials at
all (theta = 0) the orbit becomes a one-way trap that fills on a very slow
time scale.  Note the expected-busy-units curves land close together, with
theta = 0 slightly LOWER at t = 20: retrials recycle orbit nodes back to
susceptibility, which keeps arrivals (and hence occupancy) marginally higher.
"""

import numpy as np

import retrialsi as rs

thetas = [0.0, 1.0, 5.0]
times = np.round(np.arange(1.0, 20.01, 1.0), 10)

print(f"{'t':>5}" + "".join(f"  EI(th={th:g}) ER(th={th:g})" for th in thetas))
columns = {}
for th in thetas:
    cfg = rs.ModelConfig(N=20, c=8, alpha=5.0, mu=1.0, theta=th)
    gen = rs.build_generator(cfg, rs.rate_function(cfg))
    sol = rs.transient_grid(gen, rs.delta_vector(cfg.space, (0, 0)), times)
    columns[th] = [(rs.moment_recovering(v), rs.moment_orbit(v)) for v in sol.vectors]

for row, t in enumerate(times):
    cells = "".join(f"  {columns[th][row][0]:8.4f} {columns[th][row][1]:8.4f}"
                    for th in thetas)
    print(f"{t:5.1f}{cells}")

print("\nat t = 20:")
for th in thetas:
    ei, er = columns[th][-1]
    print(f"  theta = {th:g}: E[I] = {ei:.4f}, E[R] = {er:.4f}")

print("\ntrue stationary values (theta = 0 converges far beyond t = 20):")
for th in thetas:
    cfg = rs.ModelConfig(N=20, c=8, alpha=5.0, mu=1.0, theta=th)
    gen = rs.build_generator(cfg, rs.rate_function(cfg))
    pi = rs.stationary_nullspace(gen)
    print(f"  theta = {th:g}: E[I] = {rs.moment_recovering(pi):.4f}, "
          f"E[R] = {rs.moment_orbit(pi):.4f}")
