"""Physical constants (CODATA 2018) and reference coupling magnitudes."""

from typing import Dict, Tuple

ELEMENTARY_CHARGE = 1.602176634e-19  # C
ELECTRON_MASS = 9.1093837015e-31  # kg
HBAR = 1.054571817e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m/s

# m_e c^2 in eV
ELECTRON_REST_ENERGY_EV = 510998.95

# Tabulated |g_qu|, |g_qu2|, |g_p| per photonic structure
REFERENCE_COUPLINGS: Dict[str, Tuple[float, float, float]] = {
    "prism": (0.0028, 7.2e-15, 7.2e-15),
    "microsphere_cavity": (0.0008, 3.2e-14, 3.2e-14),
    "photonic_crystal": (0.0004, 8.0e-14, 8.0e-14),
    "dielectric_laser_accelerator": (0.016, 5.0e-13, 5.0e-13),
    "ring_cavity": (0.03, 3.9e-12, 3.9e-12),
    "multilayer_structure": (0.99, 1.7e-9, 1.7e-9),
    "quasi_bic_metasurface": (0.041, 0.099, 0.099),
}
