"""Gromov-Hausdorff distances of finite spaces, the Euclidean variant for
point clouds, and covering-radius / cone-annulus probes of point sets."""

from types import ModuleType as _ModuleType

from .errors import (
    DimensionError,
    EmptyRelationError,
    GHNetError,
    MalformedInputError,
    MetricAxiomError,
    NotACorrespondenceError,
    PreconditionError,
    SizeLimitError,
    TheoremViolation,
    UnsupportedDimensionError,
)
from .euclidean import (
    EHResult,
    RigidMotion,
    SandwichReport,
    apply_motion,
    best_rigid_alignment,
    eh_oracle_planar,
    eh_upper,
    hausdorff_distance,
    sandwich_check,
)
from .experiments import ExperimentConfig, ReportRecord, Tolerances, run_net_probe_campaign, run_sandwich_experiment
from .gh import (
    GHResult,
    gh_distance,
    gh_exact_bnb,
    gh_exact_bruteforce,
    gh_lower_diam,
    gh_upper_from_correspondence,
)
from .io import ingest, read_metric, read_point_cloud, read_relation, write_point_cloud
from .metric import Ball, FiniteMetricSpace, PointCloud, diameter, induced_metric, validate_metric
from .nets import (
    BoxRegion,
    ConeSpec,
    ConstantSchedule,
    annulus_cone_probe,
    cone_contains,
    constant_schedule,
    covering_radius_in_box,
    empty_ball_cone_cover_check,
    is_epsilon_net_in_box,
)
from .relations import (
    Correspondence,
    Relation,
    compose,
    distortion,
    image,
    is_correspondence,
    preimage,
    proximity_correspondence,
    restrict,
)

__version__ = "0.1.0"

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and not isinstance(obj, _ModuleType)]
