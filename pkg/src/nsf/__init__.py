"""Prime plus non-squarefree representations: exact counting, range
verification and explicit analytic criteria."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("nsf")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .arith_core import (  # noqa: E402
    Factorization,
    SieveSegment,
    factorize,
    is_prime,
    is_squarefree,
    mobius,
    nth_prime,
    phi_of_square,
    primorial,
    sieve_segment,
)
from .errors import (  # noqa: E402
    CapacityExceeded,
    DomainError,
    FactorizationFailed,
    InvalidRange,
    NotPrime,
    OutOfSupportedRange,
    UnsupportedEBound,
)
from .range_verifier import VerificationReport, VerifierConfig, verify_range  # noqa: E402
from .representations import (  # noqa: E402
    R,
    RepresentationWitness,
    T,
    deficit,
    exceptions,
    find_witness,
    g,
    theta,
    theta_ap,
)
