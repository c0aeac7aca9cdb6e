"""geofreq: geometric/complex frequency of dynamical-system trajectories.

The eigenvalues of a diagonalizable LTI system are the complex frequencies of
its velocities after the (non-isometric) real block-modal transformation
zeta = W u.  This package provides the Clifford-algebra primitives, the
W/G construction, trajectory integration for the example circuits, and the
along-trajectory analytics tying them together.
"""

from .geomalg import (
    Bivector,
    GeomFreqSample,
    Multivector2,
    complex_frequency,
    geometric_frequency,
    geometric_product_2d,
    inner,
    wedge,
)
from .modal import (
    BlockDesc,
    CMatrix2,
    NonDiagonalizableError,
    RealModalForm,
    Spectrum,
    block_complex_frequency,
    classify_spectrum,
    dq_split,
    phi,
    real_modal_form,
    verify_xi_dynamics,
)
from .dynsys import (
    DivergedError,
    NoEquilibriumError,
    SystemModel,
    Trajectory,
    equilibrium_find,
    integrate,
    jacobian_fd,
)
from .circuits import (
    DEFAULT_DIODE_POLY,
    RcParams,
    RlcParams,
    ThirdOrderParams,
    TunnelDiodeParams,
    build_rc,
    build_rlc,
    build_third_order,
    build_tunnel_diode,
)
from .analysis import (
    AmbiguousDominanceError,
    AnalysisSeries,
    AsymptoteForecast,
    InsufficientTailError,
    LimitCycleReport,
    ModalProjection,
    TailReport,
    analyze_trajectory,
    compare_tail,
    detect_limit_cycle,
    modal_projection,
    predict_asymptote,
    reconstruct,
)

__version__ = "0.1.0"
