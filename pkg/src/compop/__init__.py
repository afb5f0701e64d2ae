"""Essential-norm diagnostics for composition operators on the Hardy space H^2."""
from .carleson import (
    CarlesonWindow,
    EmpiricalMeasure,
    carleson_ratio_profile,
    induced_measure,
    poisson_of_measure,
    window_mass,
)
from .diskzeros import PreimageSet, solve_preimages, solve_preimages_batch, winding_count
from .errors import *  # noqa: F401,F403
from .essnorm import (
    COMPACT,
    INCONCLUSIVE,
    NONCOMPACT,
    EssNormReport,
    default_schedule,
    essential_norm_report,
    identity_check,
    integral_profile,
    report_from_json,
    report_to_csv,
    report_to_json,
    verdict_from_profiles,
)
from .estimator import CompactnessClassifier, EssNormTransformer
from .hardy import (
    BoundarySamples,
    change_of_variables_check,
    h2_power_norm,
    inner_transform,
    littlewood_paley_check,
    poisson_transform,
    poisson_transform_batch,
    poisson_transform_series,
    power_series_chain,
    power_sum_tail,
)
from .mapspec import CATALOG, GRAMMAR, SelfMap, as_selfmap, parse_map, taylor_coefficients, validate_self_map
from .nevanlinna import (
    AngleBudget,
    counting_function,
    counting_profile,
    counting_transform_check,
    littlewood_bound,
    subaveraging_check,
)
from .quad import QuadConfig, circle_integral, disk_integral, energy_series_closed_form, energy_series_value, moebius_energy

__version__ = "0.1.0"
