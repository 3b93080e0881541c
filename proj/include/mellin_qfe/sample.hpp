#pragma once

#include "errors.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mellin_qfe {

//! Where a simulated sample came from.
struct SeedProvenance
{
  std::string generator;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

//! Immutable vector of strictly positive observations Y_1..Y_n together with
//! their logarithms.
class Sample
{
public:
  Sample() = default;

  explicit Sample(std::vector<double> values,
                  std::optional<SeedProvenance> provenance = std::nullopt)
    : values_(std::move(values))
    , provenance_(std::move(provenance))
  {
    logs_.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double y = values_[i];
      if (!(y > 0.0) || !std::isfinite(y))
        throw argument_error("observation " + std::to_string(i + 1) +
                             " is not a finite positive number");
      logs_.push_back(std::log(y));
    }
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> logs() const { return logs_; }
  const std::optional<SeedProvenance>& provenance() const { return provenance_; }

private:
  std::vector<double> values_;
  std::vector<double> logs_;
  std::optional<SeedProvenance> provenance_;
};

} // namespace mellin_qfe
