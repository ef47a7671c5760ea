#include "lpsub/common.hpp"

namespace lpsub {

Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kGeodesicNotUnique: return "GeodesicNotUnique";
    case ErrorCode::kInvalidNoise: return "InvalidNoise";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSingularPoint: return "SingularPoint";
    case ErrorCode::kNonsmoothPoint: return "NonsmoothPoint";
    case ErrorCode::kConfigRejected: return "ConfigRejected";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace lpsub
