from .base import BaseCheck, CheckOutcome
from .chebyshev_checks import AlternatingSineSums, ChebyshevIdentities
from .sequence_checks import AffineRoundTrip, EnvelopeReconstruction, SineSequenceExactness
from .mean_checks import ArithmeticWitness, CosineBound, GeometricWitness, PowerBoundF
from .contraction_checks import FixedPointUniqueness, LipschitzBound

ALL_CHECKS = [
    ChebyshevIdentities,
    AlternatingSineSums,
    AffineRoundTrip,
    SineSequenceExactness,
    ArithmeticWitness,
    GeometricWitness,
    PowerBoundF,
    CosineBound,
    LipschitzBound,
    FixedPointUniqueness,
    EnvelopeReconstruction,
]
