"""frspace: Finsleroid-regular spaces — metric, Cartan tensor, spray and
Landsberg/Berwald checks on pointwise 1-jets, with analytic fields and
geodesics on top."""

__version__ = "0.1.0"

from .jets import (  # noqa: E402
    PointJet,
    berwald_jet,
    build_point_jet,
    exact_form_jet,
    landsberg_candidate_jet,
    load_jet,
    random_jet,
    save_jet,
)

__all__ = [
    "PointJet",
    "__version__",
    "berwald_jet",
    "build_point_jet",
    "exact_form_jet",
    "landsberg_candidate_jet",
    "load_jet",
    "random_jet",
    "save_jet",
]
