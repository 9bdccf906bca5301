"""Horofunction boundaries, stars and the star metric for sup metrics on R^n,
with model checks in a product of hyperbolic horoballs and sticky-geodesic probes."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .sup import (
    DimensionError,
    DirectionalType,
    NormalFormGeodesic,
    PiecewiseLinearPath,
    classify_directional,
    interpolate_to_geodesic,
    is_geodesic_chain,
    normal_form_geodesic,
    sup_dist,
)
from .horo import (
    AffineSequence,
    Horofunction,
    LimitReport,
    UnnormalizedError,
    busemann_of_geodesic,
    eval_horofunction,
    horo_param_distance,
    limit_of_affine_sequence,
    limit_of_numeric_sequence,
    psi_gap,
)
from .stars import (
    CertificateNotFound,
    DivergenceEvidence,
    FaceClass,
    HalfspaceSpec,
    NonConvergentError,
    StarCertificate,
    certificate_search,
    divergence_evidence,
    enumerate_classes,
    export_class_graph_csv,
    halfspace_contains,
    minimal_face,
    semicontinuity_check,
    star_distance,
    star_membership,
    star_of,
)
from .product import (
    HoroballPoint,
    MulticurveSpec,
    ProductPoint,
    h2_distance,
    pinching_pair,
    prod_distance,
    verify_multicurve_star,
)
from .sticky import (
    HalfPlane,
    StickyProbeConfig,
    SupSpace,
    separation_lower_bound,
    sg1_probe,
    sg2_probe,
)
from .suites import SuiteSpec, run_suite
from .report import export_report
from .svg import render_boundary_svg
