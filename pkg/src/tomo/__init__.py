"""Section functions of convex bodies and numerical tests of their
polynomial, algebraic and asymptotic structure."""

from .bodies import (BodyError, BodySpecError, Ellipsoid, LpBall, OracleBody, Polytope, ball, body_from_dict,
                     body_to_dict, load_body, membership, minkowski_functional, normalize, outward_normal, random_ellipsoid,
                     support, support_interval, translate)
from .sections import (QuadratureConfig, QuadratureError, SectionProfile, cutoff_volume, fourier_slice,
                       invert_radon_3d, local_section_profile, section_function, section_profile, section_values,
                       volume)
from .polyalg import (AlgebraicEquation, PolyFitReport, derivative_at_zero, discriminant_in_w, fit_polynomial,
                      has_real_singularities, hilbert_transform, test_hilbert_polynomiality,
                      test_polynomial_integrability, test_power_polynomiality)
from .moments import (MomentTable, TangentMeasure, detect_ellipsoid, fit_homogeneous, geometric_series_check,
                      moment, recover_support_product, support_product_quadratic_test, tangent_moments)
from .asymptotics import boundary_exponent, finite_expansion_test, oscillatory_integral
from .harmonics import harmonic_coefficients, test_coefficient_polynomiality
from .reports import DetectionReport

__all__ = [
    "BodyError",
    "BodySpecError",
    "Ellipsoid",
    "LpBall",
    "OracleBody",
    "Polytope",
    "ball",
    "body_from_dict",
    "body_to_dict",
    "load_body",
    "membership",
    "minkowski_functional",
    "normalize",
    "outward_normal",
    "random_ellipsoid",
    "support",
    "support_interval",
    "translate",
    "QuadratureConfig",
    "QuadratureError",
    "SectionProfile",
    "cutoff_volume",
    "fourier_slice",
    "invert_radon_3d",
    "local_section_profile",
    "section_function",
    "section_profile",
    "section_values",
    "volume",
    "AlgebraicEquation",
    "PolyFitReport",
    "derivative_at_zero",
    "discriminant_in_w",
    "fit_polynomial",
    "has_real_singularities",
    "hilbert_transform",
    "test_hilbert_polynomiality",
    "test_polynomial_integrability",
    "test_power_polynomiality",
    "MomentTable",
    "TangentMeasure",
    "detect_ellipsoid",
    "fit_homogeneous",
    "geometric_series_check",
    "moment",
    "recover_support_product",
    "support_product_quadratic_test",
    "tangent_moments",
    "boundary_exponent",
    "finite_expansion_test",
    "oscillatory_integral",
    "harmonic_coefficients",
    "test_coefficient_polynomiality",
    "DetectionReport",
]

__version__ = "0.1.0"
