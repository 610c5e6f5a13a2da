"""Radial structure and spreading of paraxial Laguerre-Gaussian packets."""

from vortexwave import PacketSpec, figures
from vortexwave import observables as obs
from vortexwave import oracle

# %% the (n, l) mode has n + 1 bright rings
rings = figures.lg_profile_curves(ells=(3, 50), ns=(0, 1, 3))
for name, y in rings.columns.items():
    print(f"{name:8s}: {figures.count_maxima(y)} rings")

# %% radial moments grow with n and |l|
for n, ell in ((0, 0), (0, 3), (1, 3), (3, 3), (0, 50)):
    spec = PacketSpec(1e-3, 0.0, ell, n=n, regime="paraxial")
    m = obs.lg_moments(spec)
    d_rho_p, d_x_p = obs.uncertainty_products(spec)
    print(
        f"n={n} l={ell:2d}: <rho> sigma = {m.mean_rho * 1e-3:.4f}  "
        f"<rho^2> sigma^2 = {m.mean_rho2 * 1e-6:.1f}  "
        f"drho dp = {d_rho_p:.4f}  dx dpx = {d_x_p:.4f}"
    )

# %% spreading: width and Gouy phase over a few diffraction times
spec = PacketSpec(0.02, 0.5, 2, n=1, sigma_z=0.005, regime="paraxial")
for tau in (0.0, 0.5, 1.0, 2.0, 5.0):
    g = obs.beam_geometry(spec, tau * spec.diffraction_time_perp)
    print(f"t/t_d = {tau:3.1f}: sigma_perp(t) = {g.sigma_perp_t:8.2f}  gouy = {g.gouy_phase:.4f}")

# %% the width law checked by position-space quadrature
spec = PacketSpec(0.05, 0.5, 3, n=1, regime="paraxial")
t = spec.diffraction_time_perp
quad = oracle.position_moment(spec, "rho2", t).value
print(f"<rho^2> at t_d: quadrature {quad:.6f}, closed form {obs.lg_moments(spec, t).mean_rho2:.6f}")
print(f"ratio to t = 0: {quad / obs.lg_moments(spec).mean_rho2:.6f} (1 + (t/t_d)^2 = 2)")
