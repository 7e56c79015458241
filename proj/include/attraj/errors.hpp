#pragma once

#include <stdexcept>
#include <string>

namespace attraj {

/// Base class for all recoverable solver errors. Drivers (Newton line
/// search, continuation) catch this type and treat the offending point as
/// infeasible; anything else propagates as a genuine bug.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteRhs : Error {
    explicit NonFiniteRhs(const std::string& msg) : Error(msg) {}
};
struct StepUnderflow : Error {
    explicit StepUnderflow(const std::string& msg) : Error(msg) {}
};
struct MaxStepsExceeded : Error {
    explicit MaxStepsExceeded(const std::string& msg) : Error(msg) {}
};
struct NonFiniteEvaluation : Error {
    explicit NonFiniteEvaluation(const std::string& msg) : Error(msg) {}
};
struct PropagationError : Error {
    int segment;
    PropagationError(int seg, const std::string& msg)
        : Error("segment " + std::to_string(seg) + ": " + msg), segment(seg) {}
};
struct InfeasibleGuess : Error {
    explicit InfeasibleGuess(const std::string& msg) : Error(msg) {}
};
struct BadSeed : Error {
    explicit BadSeed(const std::string& msg) : Error(msg) {}
};
struct DegeneratePoints : Error {
    explicit DegeneratePoints(const std::string& msg) : Error(msg) {}
};
struct SingularityBand : Error {
    explicit SingularityBand(const std::string& msg) : Error(msg) {}
};
struct NonPositiveRadius : Error {
    explicit NonPositiveRadius(const std::string& msg) : Error(msg) {}
};
struct ZeroVelocity : Error {
    explicit ZeroVelocity(const std::string& msg) : Error(msg) {}
};
struct DegenerateTransfer : Error {
    explicit DegenerateTransfer(const std::string& msg) : Error(msg) {}
};
struct NegativeDiscriminant : Error {
    explicit NegativeDiscriminant(const std::string& msg) : Error(msg) {}
};
struct WeakThrust : Error {
    explicit WeakThrust(const std::string& msg) : Error(msg) {}
};
struct VanishingDenominator : Error {
    explicit VanishingDenominator(const std::string& msg) : Error(msg) {}
};
struct AtOrigin : Error {
    explicit AtOrigin(const std::string& msg) : Error(msg) {}
};
struct MaxSwitchesExceeded : Error {
    explicit MaxSwitchesExceeded(const std::string& msg) : Error(msg) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace attraj
