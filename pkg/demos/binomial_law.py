"""Surplus histograms over symmetry points on the three standard graphs.

Run: python3 demos/binomial_law.py
"""
from math import comb

from nodalsurplus import (
    GeneratorConfig,
    analyze_cycles,
    lattice_map,
    random_gsc_instance,
    signing_orbits,
    surplus_distribution,
)
from nodalsurplus.instances import STANDARD_GRAPHS

for name in ("a", "b", "c"):
    g = STANDARD_GRAPHS[name]()
    cs = analyze_cycles(g)
    h = random_gsc_instance(g, GeneratorConfig(seed=1))
    orbit = signing_orbits(g, cs).orbit_size
    print(f"graph ({name}): n={g.n}, |E|={g.m}, beta={cs.beta}, gauge orbit size {orbit}")
    print("  binomial row:", [comb(cs.beta, j) for j in range(cs.beta + 1)])
    for k in range(1, g.n + 1):
        d = surplus_distribution(h, k, cs, orbit_size=orbit)
        print(f"  k={k:2d}  counts={d.counts}  per-signing={d.per_signing_counts}")

# The surplus at a symmetry point is the number of cycle directions in which
# lambda_k goes down; the map eps -> J_-(eps) hits every subset exactly once.
g = STANDARD_GRAPHS["b"]()
h = random_gsc_instance(g, GeneratorConfig(seed=1))
rep = lattice_map(h, 3, with_morse=True)
print("\ngraph (b), k=3")
for e in rep.entries:
    print(f"  eps={e.eps:02b}  lambda={e.lam:+.6f}  J_-={e.jminus:02b}  index={e.index}  surplus={e.surplus}")
print("  bijective:", rep.bijective)
