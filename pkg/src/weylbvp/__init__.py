"""weylbvp: elliptic boundary value problems with spectral-parameter-dependent
boundary conditions, solved through boundary triples, Weyl functions and a
selfadjoint linearization in a product space (finite-dimensional, dense
linear algebra).
"""

__version__ = "1.0.0"

from .errors import (
    BetaOneSingular,
    ConfigError,
    CouplingRankDeficient,
    DimensionMismatch,
    InsufficientSamples,
    MathDomainError,
    NonAdjointBlocks,
    NonInvertibleTrace,
    NonPositiveCoefficient,
    NotStrict,
    OutsideU,
    PoleOrSpectrum,
    RankDeficientCoupling,
    RealTheta,
    SingularSystem,
    SpectrumPoint,
    WeylbvpError,
)
from .krein import (
    KreinSpace,
    LinearRelation,
    Subspace,
    column_space,
    intersect,
    nullspace,
    orthonormal_columns,
)
from .triple import BoundaryTriple, WeylData, verify_triple_identities
from .opfunc import (
    ConstantFunction,
    RationalNevanlinna,
    RepresentationForm,
    check_minimality,
    decompose,
    negative_squares,
    strict_kernel,
)
from .realize import (
    couple,
    realize,
    realize_constant,
    realize_rational,
    realize_strict,
    verify_realization,
)
from .elliptic import (
    DiscreteElliptic,
    EllipticTriple,
    build_1d,
    build_2d,
    direct_solve,
    elliptic_triple,
)
from .solver import (
    Linearization,
    ScanResult,
    SolveReport,
    build_linearization,
    build_linearization_rational,
    compressed_resolvent,
    eigen_correspondence,
    homogeneous_scan,
    in_solvable_set,
    krein_resolve,
    solvability_margin,
)

__all__ = [name for name in dir() if not name.startswith("_")]
