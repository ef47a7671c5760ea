#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lpsub {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Point sets are stored row-wise: one point per row, N x D.
using PointsRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

/// Caller-owned random stream. Every sampler takes one explicitly.
using Rng = std::mt19937_64;

/// Independent stream for (seed, index). Used to give every trial,
/// restart or worker its own reproducible generator.
Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

enum class ErrorCode {
  kRankDeficient,
  kDimensionMismatch,
  kGeodesicNotUnique,
  kInvalidNoise,
  kInvalidArgument,
  kSingularPoint,
  kNonsmoothPoint,
  kConfigRejected,
  kIoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Sum in pairwise order. The result depends only on the input order,
/// never on how the terms were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace lpsub
