"""Schur complements and inertia at one symmetry point of graph (b).

Run: python3 demos/local_global.py
"""
import numpy as np

from nodalsurplus import GeneratorConfig, random_gsc_instance
from nodalsurplus.instances import two_triangles_bridge
from nodalsurplus.local_global import build_certificate, haynsworth_check, schur_complements
from nodalsurplus.magnetic import fd_derivatives

g = two_triangles_bridge()
h = random_gsc_instance(g, GeneratorConfig(seed=7))
k = 4
cert = build_certificate(h, k, (0, 1))
over_h, over_omega = schur_complements(cert)
hess = fd_derivatives(h, np.zeros(2), k)["hessian"]

print(f"lambda_{k} = {cert.lam:.6f}, Omega diagonal = {np.diag(cert.omega)}, m = {cert.m_count}")
print("M/(h - lambda) =\n", over_h)
print("half FD Hessian =\n", 0.5 * hess)
print("|M/Omega - (S - lambda)| =", np.abs(over_omega - (cert.s_matrix - cert.lam * np.eye(g.n))).max())
for c in haynsworth_check(cert):
    print(f"  {c.name}: {c.verdict}")
print("inertias:", cert.inertias)
