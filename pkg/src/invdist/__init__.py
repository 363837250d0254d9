"""Invariant distances and boundary estimators on model domains."""
from types import ModuleType as _ModuleType

from .ball import (DiscMap, bergman_ball, complex_geodesic_ball, kobayashi_ball,
                   real_geodesic_ball, royden_ball)
from .bounds import (BRACKET_AUDIT, EstimatorConstants, IntervalValue, comparison_gap,
                     dini_upper_estimator, kobayashi_interval, kobayashi_lower,
                     kobayashi_upper_path, ma_estimator, royden_interval)
from .curves import SampledCurve
from .domains import (DomainSpec, Ellipsoid, LocalModelS9, PerturbedBall, UnitBall,
                      defining_value, load_domain)
from .errors import InvdistError
from .estimators import (a_quantity, cc_proxy, g_balogh_bonk, h_quantities, sandwich,
                         slc_ratio_scan)
from .geodesics import (DiscInvariants, disc_invariants, length_ratios,
                        reparametrize_max_delta, theorem5_balance)
from .geometry import BoundaryFrame, boundary_frame, levi_minimum, normal_components, slc_lambda
from .harness import CalibrationReport, calibrate_theorem1, verify_suite
from .quality import GeodesicQuality, quasi_geodesic_quality
from .sampling import SampleRegime, sample_pairs
from .transforms import (ball_automorphism, curve_kobayashi_length_upper, mobius,
                         normal_ray_curve, normalize_boundary, scaling_hausdorff_defect)

__all__ = [name for name, obj in list(globals().items())
           if not name.startswith("_") and not isinstance(obj, _ModuleType)]
