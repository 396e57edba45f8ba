"""
Riesz module for turning trained score models into Riesz representers.

This module contains the trapezoid quadrature of time scores, the ATE, AME and
APE representers, and the training recipes used by cross fitting.
"""

from .quadrature import (
    Quadrature,
    RieszError,
    integrate_time_score,
    integrate_along_treatment
)

from .representers import (
    RieszEstimate,
    RieszMethod,
    DegenerateArmError,
    RieszOverflowError,
    riesz_ate_direct,
    riesz_ate_logistic,
    logistic_propensity,
    riesz_ame_bridge,
    riesz_ame_dsm,
    riesz_ape,
    riesz_ape_from_ame,
    ame_ape_bridge_check,
    export_representer
)

from .pipelines import (
    fit_ate_score,
    ate_representer,
    ame_bridge_representer,
    ame_dsm_representer,
    ape_representer
)

__all__ = [
    "Quadrature",
    "RieszError",
    "integrate_time_score",
    "integrate_along_treatment",
    "RieszEstimate",
    "RieszMethod",
    "DegenerateArmError",
    "RieszOverflowError",
    "riesz_ate_direct",
    "riesz_ate_logistic",
    "logistic_propensity",
    "riesz_ame_bridge",
    "riesz_ame_dsm",
    "riesz_ape",
    "riesz_ape_from_ame",
    "ame_ape_bridge_check",
    "export_representer",
    "fit_ate_score",
    "ate_representer",
    "ame_bridge_representer",
    "ame_dsm_representer",
    "ape_representer"
]
