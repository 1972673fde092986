#pragma once

#include <stdexcept>
#include <string>

namespace nldp {

// Base class for every domain error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generic guard for violated call preconditions that have no dedicated type.
struct PreconditionViolation : Error { using Error::Error; };

// exponent / hypothesis validation
struct OrderViolation : Error { using Error::Error; };
struct ConjugateRequired : Error { using Error::Error; };
struct DegenerateKappa : Error { using Error::Error; };
struct MissingHolderData : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };

// grid construction and geometry
struct ResolutionTooFine : Error { using Error::Error; };
struct DomainTouchesBoundary : Error { using Error::Error; };
struct DiagonalPair : Error { using Error::Error; };
struct NonconstantExteriorBeyondBox : Error { using Error::Error; };
struct BallOutsideBox : Error { using Error::Error; };
struct BallOutsideDomain : Error { using Error::Error; };
struct EmptyBall : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };

// energy evaluation
struct CoincidentPoints : Error { using Error::Error; };
struct TestFunctionNotCompactlySupported : Error { using Error::Error; };
struct NonfiniteEncountered : Error { using Error::Error; };

// solver
struct NotQuadratic : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };

// estimate checkers
struct CutoffUnsupported : Error { using Error::Error; };
struct NegativeInBall : Error { using Error::Error; };
struct BadRadii : Error { using Error::Error; };
struct BadXi : Error { using Error::Error; };
struct TooFewLevels : Error { using Error::Error; };
struct DegenerateOrder : Error { using Error::Error; };
struct AssumptionViolated : Error { using Error::Error; };
struct RadiiOutOfRange : Error { using Error::Error; };

// configuration files
struct ConfigError : Error { using Error::Error; };

} // namespace nldp
