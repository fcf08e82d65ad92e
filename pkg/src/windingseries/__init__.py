"""Twisted traces of cycle integrals of dlog(j - 1728), their generating
series and the theta lifts that complete them to harmonic Maass forms."""
from .cycles import L0, cycle_integral, generating_series, trace, winding_index
from .hyperbolic import PrecisionError, bernoulli1, cusp_classes, geodesic, split_real_part
from .lattice import (DiscriminantForm, MetaplecticElement, gamma0_discriminant_form, rho_S, rho_T,
                      twist_map, twisted_discriminant_form)
from .mock import (Cusp, Point, Sig21Lattice, eichler_integral, mock_theta_f, mock_theta_omega,
                   shimura_block, zwegers_theta)
from .modfun import JLOG, ThirdKindForm, eval_j
from .qforms import GenusCharContext, QuadForm, enumerate_classes, genus_character, is_fundamental
from .theta import periodic_G, psi_tilde0, siegel_theta_Delta, theta_lower, theta_star, unary_theta_eval

__version__ = "0.1.0"

__all__ = [
    "L0", "cycle_integral", "generating_series", "trace", "winding_index",
    "PrecisionError", "bernoulli1", "cusp_classes", "geodesic", "split_real_part",
    "DiscriminantForm", "MetaplecticElement", "gamma0_discriminant_form", "rho_S", "rho_T",
    "twist_map", "twisted_discriminant_form",
    "Cusp", "Point", "Sig21Lattice", "eichler_integral", "mock_theta_f", "mock_theta_omega",
    "shimura_block", "zwegers_theta",
    "JLOG", "ThirdKindForm", "eval_j",
    "GenusCharContext", "QuadForm", "enumerate_classes", "genus_character", "is_fundamental",
    "periodic_G", "psi_tilde0", "siegel_theta_Delta", "theta_lower", "theta_star", "unary_theta_eval",
]
