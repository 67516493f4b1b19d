"""Transient behavior of the well-mixed model.

Builds the reference configuration (10 nodes, 5 recovery units, contact rate
5, recovery rate 0.4, retrial rate 2, everything susceptible at t = 0) and
tracks how the marginal distributions and first moments evolve.  The idle
probability collapses quickly; saturation (all units busy) dominates in the
long run while the orbit fills only after the units saturate.
"""

import numpy as np

import retrialsi as rs

cfg = rs.ModelConfig(N=10, c=5, alpha=5.0, mu=0.4, theta=2.0)
gen = rs.build_generator(cfg, rs.rate_function(cfg))
print(rs.validate_generator(gen).summary())

p0 = rs.delta_vector(cfg.space, cfg.initial_state)
times = np.round(np.arange(0.5, 9.01, 0.5), 10)
solution = rs.transient_grid(gen, p0, times)

print(f"\n{'t':>5} {'E[I]':>8} {'E[R]':>8} {'p_idle':>8} {'p_full':>8} {'q_empty':>8}")
for t, vec in zip(solution.times, solution.vectors):
    report = rs.marginal_report(vec)
    print(f"{t:5.1f} {report.mean_recovering:8.4f} {report.mean_orbit:8.4f} "
          f"{report.server_marginal[0]:8.4f} {report.server_marginal[-1]:8.4f} "
          f"{report.orbit_marginal[0]:8.4f}")

pi = rs.stationary_nullspace(gen)
print(f"\nstationary: E[I] = {rs.moment_recovering(pi):.4f}, "
      f"E[R] = {rs.moment_orbit(pi):.4f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for i in range(cfg.c + 1):
        ax1.plot(solution.times, [rs.marginal_recovering(v)[i] for v in solution.vectors],
                 label=f"i={i}")
    for j in range(cfg.N - cfg.c + 1):
        ax2.plot(solution.times, [rs.marginal_orbit(v)[j] for v in solution.vectors],
                 label=f"j={j}")
    ax1.set(title="units busy", xlabel="t", ylabel="probability")
    ax2.set(title="orbit occupancy", xlabel="t")
    ax1.legend(fontsize=7)
    ax2.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig("wellmixed_transient.png", dpi=120)
    print("\nwrote wellmixed_transient.png")
except ImportError:
    pass
