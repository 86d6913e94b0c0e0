#include "rsep/errors.hpp"

namespace rsep {

const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::NonpositiveConductance: return "NonpositiveConductance";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::BadRadiusSequence: return "BadRadiusSequence";
    case Errc::MissingValue: return "MissingValue";
    case Errc::EmptyBoundary: return "EmptyBoundary";
    case Errc::EmptySet: return "EmptySet";
    case Errc::OverlappingSets: return "OverlappingSets";
    case Errc::ComplementEmpty: return "ComplementEmpty";
    case Errc::SameVertex: return "SameVertex";
    case Errc::BoundaryEdgePresent: return "BoundaryEdgePresent";
    case Errc::RateNonpositive: return "RateNonpositive";
    case Errc::InconsistentSolutions: return "InconsistentSolutions";
    case Errc::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case Errc::NotIrreducible: return "NotIrreducible";
    case Errc::DegenerateMarginal: return "DegenerateMarginal";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::UnequalSizes: return "UnequalSizes";
    case Errc::NotAPartition: return "NotAPartition";
    case Errc::BallTooLarge: return "BallTooLarge";
    case Errc::BallTooSmall: return "BallTooSmall";
    case Errc::TooFewLevels: return "TooFewLevels";
    case Errc::InconsistentPartition: return "InconsistentPartition";
    case Errc::InsufficientTrajectories: return "InsufficientTrajectories";
    case Errc::NonSymmetrizable: return "NonSymmetrizable";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
    case Errc::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace rsep
