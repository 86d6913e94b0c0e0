#pragma once

#include <stdexcept>
#include <string>

namespace rsep {

enum class Errc {
    DisconnectedGraph,
    NonpositiveConductance,
    DuplicateEdge,
    SelfLoop,
    BudgetExceeded,
    UnknownVertex,
    BadRadiusSequence,
    MissingValue,
    EmptyBoundary,
    EmptySet,
    OverlappingSets,
    ComplementEmpty,
    SameVertex,
    BoundaryEdgePresent,
    RateNonpositive,
    InconsistentSolutions,
    StateSpaceTooLarge,
    NotIrreducible,
    DegenerateMarginal,
    KOutOfRange,
    UnequalSizes,
    NotAPartition,
    BallTooLarge,
    BallTooSmall,
    TooFewLevels,
    InconsistentPartition,
    InsufficientTrajectories,
    NonSymmetrizable,
    ParseError,
    ValidationError,
    IoError,
    Internal,
};

const char* errc_name(Errc code) noexcept;

/// All library failures are reported through this exception; `code()` is
/// stable and intended for programmatic matching, `what()` is for humans.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace rsep
