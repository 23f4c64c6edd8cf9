#include "glif/error.hpp"

namespace glif {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NonSymmetric: return "NonSymmetric";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::NonOrthonormalBasis: return "NonOrthonormalBasis";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DegenerateDegree: return "DegenerateDegree";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::InvalidSimplexRow: return "InvalidSimplexRow";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::NoLabels: return "NoLabels";
        case ErrorCode::EmptyPairs: return "EmptyPairs";
        case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::NotConverged:
        case ErrorCode::ZeroDenominator:
        case ErrorCode::DegenerateDegree:
            return true;
        default:
            return false;
    }
}

}  // namespace glif
