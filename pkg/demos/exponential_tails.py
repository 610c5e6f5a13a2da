"""The exact packet is not a Gaussian in space.

Its amplitude decays like exp(-r)/r^{3/2} in Compton wavelengths, while the
paraxial model keeps a Gaussian tail whatever its width.
"""

import numpy as np

from vortexwave import figures

curves = figures.falloff_curves(r_max=40.0, points=401)

# %% log amplitude along a radius
print(f"{'r':>6} " + " ".join(f"{k:>14}" for k in curves.columns))
for i in range(0, len(curves.x), 40):
    print(f"{curves.x[i]:6.1f} " + " ".join(f"{c[i]:14.4f}" for c in curves.columns.values()))

# %% slope of ln|psi| + 1.5 ln r on the far tail
slope = figures.log_slope(curves.x, curves.columns["exact"], 20.0, 40.0, power=1.5)
print(f"exact tail slope: {slope:.4f} (an exp(-r) tail gives -1)")

# %% the Gaussian one curves downward instead: its second difference stays negative
g = curves.columns["paraxial_10"]
print("paraxial_10 curvature:", np.round(np.diff(g, 2)[::80], 6))
