"""
Physical constants used for bath occupancies.

hbar and k_B are exact in the 2019 SI, so every CODATA release shipped with
scipy.constants agrees on them.
"""

import scipy
from scipy import constants

HBAR = constants.hbar
K_B = constants.k
CODATA_RELEASE = "SI 2019 exact (scipy.constants)"


def constants_metadata() -> dict:
    """Constants as recorded in artifact metadata."""
    return {"hbar": HBAR, "k_B": K_B, "release": CODATA_RELEASE, "scipy": scipy.__version__}
