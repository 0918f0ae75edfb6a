"""Support-function toolkit for planar convex bodies.

Shapes are encoded by their support functions (needles, polygons, Fourier
series, grid samples), normalized to perimeter 2pi with the Steiner point at
the origin.  The package maximizes quadratic integral functionals over that
class, classifies the maximizers as needles or triangles, and computes the
farthest needle from a given body in the Hausdorff and L2 metrics.
"""

from ._kernel import G4_MIN, KERNEL_SCALE, g4, green_kernel, green_kernel_prime
from .farthest import (FarthestResult, farthest_hausdorff, farthest_l2,
                       farthest_l2_max_distance, g_profile, rotate,
                       sharp_inequality_report)
from .quad_functional import (BumpCoeff, ConeSolution, ConstCoeff, FuncCoeff, GridCoeff,
                              InvalidCoefficientsError, QuadCoeffs, closure_identities,
                              critical_triangle, eval_J, maximize_over_cone,
                              maximize_over_triangles, remark_bump_coeffs,
                              triangle_criticality)
from .shapes import (AngleGrid, ConvexityError, CurvatureMeasure, FourierForm, GridFn,
                     InvalidMeasureError, InvalidShapeError, Polygon, Segment, SupportFn,
                     shape_from_dict, shape_to_dict)
from .support_core import (boundary_points, class_a_residuals, evaluate,
                           hausdorff_distance, l2_distance, min_max_h, minkowski,
                           normalize_to_class_A, perimeter, random_class_A, steiner,
                           translate)
from .weingarten import (TriangleSpec, curvature_of, polygon_support, solve,
                         triangle_from_angles, triangle_length_partials,
                         triangle_lengths, triangle_support)

__version__ = "0.1.0"
