#include "moped/error.hpp"
#include "moped/types.hpp"

namespace moped {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidData: return "InvalidData";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::RankTooLarge: return "RankTooLarge";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::SegmentTooShort: return "SegmentTooShort";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyResults: return "EmptyResults";
        case ErrorCode::MalformedCsv: return "MalformedCsv";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::EmptyData: return "EmptyData";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::vector<std::size_t> locations(const ChangePointSet& set) {
    std::vector<std::size_t> out;
    out.reserve(set.size());
    for (const auto& cp : set) {
        out.push_back(cp.tau);
    }
    return out;
}

}  // namespace moped
