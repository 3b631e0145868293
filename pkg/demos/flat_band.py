"""An eigenvector vanishing at a cycle vertex of degree three pins an eigenvalue.

Run: python3 demos/flat_band.py
"""
import numpy as np

from nodalsurplus import check_gsc, edge_scan, flat_band_instance, torus_action
from nodalsurplus.spectra import eig_herm

fb = flat_band_instance()
print("h =\n", fb.h.dense())
print("phi =", np.round(fb.phi, 6), " (zero at vertex 0)")
for t in np.linspace(0, np.pi, 7):
    vals = eig_herm(torus_action(fb.h, [t])).values
    print(f"  flux {t:.3f}: spectrum {np.round(vals, 6)}")

sc = edge_scan(fb.h, 0, 0, fb.k, samples=32)
print(f"scan of lambda_{fb.k}: {sc.verdict}")
print("GSC:", check_gsc(fb.h).verdict, "-", check_gsc(fb.h).reason)
