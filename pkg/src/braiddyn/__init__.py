"""Braid cocycles of measure-preserving disk maps.

Extracts the pure braid of an n-tuple of orbits of a composed-twist disk
diffeomorphism and estimates the asymptotic invariants attached to it:
generator word length and fundamental-group loop stretch per iterate, the
Calabi invariant via pair windings, and topological entropy lower bounds.
"""

from .braids import (
    BraidWord,
    BraidError,
    Exhausted,
    compose,
    exponent_sum,
    free_cancel,
    geodesic_length,
    inverse,
    is_pure,
    linking_matrix,
    permutation,
    word_length_bounds,
)
from .diskmaps import (
    Configuration,
    MapSpec,
    MeasureSpec,
    TwistSpec,
    base_config,
    evaluate,
    isotopy_path,
    jacobian_check,
    omega_check,
    sample,
)
from .dynnikov import DynnikovCoords, curve_norm, growth_rate, initial_coords, update
from .extraction import (
    DegenerateInput,
    NonStabilizing,
    OmegaViolation,
    PathBundle,
    crossings_to_braid,
    orbit_braid,
    orbit_braid_with_info,
)
from .freegroup import FreeWord, apply_braid, apply_generator, loop_stretch, reduce_letters
from .invariants import (
    InvariantEstimate,
    calabi_invariant,
    calabi_quadrature,
    entropy_report,
    invariance_experiment,
    line_stretch_rate,
    orbit_winding_sum,
    pair_winding,
    theta_estimate,
    theta_family_sup,
)
from .normalform import braid_equal, normal_form

__version__ = "0.1.0"
