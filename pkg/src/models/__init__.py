"""
Data models for the symbiotic branching lab.

All models are frozen Pydantic models; sampled curves hold read-only numpy
arrays.

Models:
    kernel: Kernel, ReturnCurve, TailCoefficients, GreenValues
    curves: MomentCurve, GrowthAsymptote, AsymptoticRate, LyapunovReport
    moments: ModelParams, IntermittencyResult, MomentReport
    aging: AgingQuery, AgingRow, AgingReport
    simulation: SimConfig, ObservableEstimate, SimResult
"""

from src.models.aging import (
    AgingQuery,
    AgingReport,
    AgingRow,
    DiffusionModel,
    EvaluationPath,
    NoiseRegime,
    ScalingKind,
)
from src.models.curves import (
    AsymptoticRate,
    GrowthAsymptote,
    LyapunovPoint,
    LyapunovRegime,
    LyapunovReport,
    MomentCurve,
    PropertyCheck,
)
from src.models.kernel import (
    CurveProvenance,
    GreenValues,
    Kernel,
    KernelVariant,
    ReturnCurve,
    TailCoefficients,
    TailSource,
)
from src.models.moments import (
    IntermittencyResult,
    IntermittencyVerdict,
    ModelParams,
    MomentReport,
)
from src.models.simulation import (
    EstimateFlag,
    Observable,
    ObservableEstimate,
    SimConfig,
    SimResult,
    StartType,
)

__all__: list[str] = [
    # Kernel
    "Kernel",
    "KernelVariant",
    "ReturnCurve",
    "CurveProvenance",
    "TailCoefficients",
    "TailSource",
    "GreenValues",
    # Curves
    "MomentCurve",
    "GrowthAsymptote",
    "AsymptoticRate",
    "LyapunovPoint",
    "LyapunovRegime",
    "LyapunovReport",
    "PropertyCheck",
    # Moments
    "ModelParams",
    "IntermittencyResult",
    "IntermittencyVerdict",
    "MomentReport",
    # Aging
    "AgingQuery",
    "AgingReport",
    "AgingRow",
    "DiffusionModel",
    "EvaluationPath",
    "NoiseRegime",
    "ScalingKind",
    # Simulation
    "SimConfig",
    "SimResult",
    "ObservableEstimate",
    "Observable",
    "StartType",
    "EstimateFlag",
]
