"""Fixed point of the moment transformation T(a)_n = 1/(a_0 + ... + a_n).

The package computes the fixed-point moment sequence, the dynamics of
psi(z) = z - 1/z, the Bernstein transform f and Mellin transform F of the
fixed-point measure, and the zero/residue spectrum of f.
"""

from . import errors
from .seqcore import (
    MomentSequence,
    LambdaSeed,
    AsymptoticReport,
    fixed_point_moments,
    lambda_sequence,
    lambda_seeded,
    g_iterate,
    asymptotic_report,
)
from .psidyn import LevelSet, psi, psi_iter, preimage_pair, level_set, residue_index, psi_prime
from .specfun import digamma, trigamma, harmonic, hurwitz_zeta_shifted, bernstein_uniform, EULER_GAMMA

__version__ = "0.1.0"

__all__ = [
    "errors",
    "MomentSequence",
    "LambdaSeed",
    "AsymptoticReport",
    "fixed_point_moments",
    "lambda_sequence",
    "lambda_seeded",
    "g_iterate",
    "asymptotic_report",
    "LevelSet",
    "psi",
    "psi_iter",
    "preimage_pair",
    "level_set",
    "residue_index",
    "psi_prime",
    "digamma",
    "trigamma",
    "harmonic",
    "hurwitz_zeta_shifted",
    "bernstein_uniform",
    "EULER_GAMMA",
]
