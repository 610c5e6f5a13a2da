"""How heavy does a twisted electron look?

A 300 keV electron with l = 1000 focused to a 0.4 nm waist, then the same
packet swept over l and over the focal width.
"""

import numpy as np

from vortexwave import ELECTRON, PacketSpec
from vortexwave import observables as obs
from vortexwave import oracle

# %% the headline packet
sigma = ELECTRON.sigma_from_width(0.4)
pbar = ELECTRON.momentum_from_kinetic(300.0)
spec = PacketSpec(sigma, pbar, 1000)
print(f"sigma/m = {sigma:.4e}, pbar/m = {pbar:.6f}")

dm = obs.mass_excess(spec)
print(f"delta m / m      = {dm.value:.6e}")
print(f"l sigma^2 / 2    = {dm.expansion:.6e}")
print(f"in keV           = {dm.value * ELECTRON.energy_to_kev(1.0):.4f}")

# %% the excess is set by l sigma^2, not by how fast the packet moves
for p in (0.0, 0.5, pbar, 5.0):
    print(f"pbar = {p:5.2f}: delta m / m = {obs.mass_excess(spec.replace(pbar=p)).value:.6e}")

# %% linear in l at fixed width
ells = np.array([10, 100, 1000, 5000])
excess = [obs.mass_excess(spec.replace(ell=int(l))).value for l in ells]
for l, e in zip(ells, excess):
    print(f"l = {l:5d}: delta m / m = {e:.4e}   ratio to l sigma^2/2 = {e / (l * sigma**2 / 2):.6f}")

# %% cross-check against direct momentum-space quadrature on a wider packet
wide = PacketSpec(0.05, 0.5, 5)
quad = oracle.expectations(wide, ["one", "energy", "p_z"])
eps, pz = quad.value[1] / quad.value[0], quad.value[2] / quad.value[0]
print(f"quadrature mass  = {np.sqrt(eps**2 - pz**2):.12f}")
print(f"closed form mass = {obs.invariant_mass(wide).value:.12f}")
