#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reuse/core.hpp"
#include "reuse/random.hpp"

namespace reuse {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct WorkloadSpec {
  std::size_t num_tasks = 100;
  double redundancy_rate = 0.8;
  double arrival_rate = 6.0;  // tasks per second
  std::string service = "object-detection";
  Range input_size{4.0, 12.0};   // Mb
  Range output_size{0.1, 0.5};   // Mb
  Range complexity{15.0, 45.0};  // compute-units
  Eigen::Index dimension = 32;
  double noise_sigma = 0.05;
  std::uint64_t seed = 1;
};

void validate(const WorkloadSpec& spec);

/// Object model: one base vector per label, uniform on the sphere of radius
/// 10, drawn from a stream keyed by the label's mint index. Observations add
/// i.i.d. Gaussian noise per coordinate.
class ObjectCatalog {
 public:
  static constexpr double kBaseRadius = 10.0;

  ObjectCatalog(Eigen::Index dimension, double noise_sigma, std::uint64_t seed);

  FeatureVector base(std::size_t object) const;
  FeatureVector observe(std::size_t object, Rng& noise) const;
  static std::string label(std::size_t object);

  Eigen::Index dimension() const noexcept { return dimension_; }
  double noise_sigma() const noexcept { return sigma_; }

 private:
  Eigen::Index dimension_;
  double sigma_;
  std::uint64_t seed_;
};

/// Synthetic task stream. Task i repeats a uniformly chosen seen object with
/// probability `redundancy_rate` (the first task always mints), otherwise it
/// mints a new object. Every decision draws from its own stream with a fixed
/// number of draws per task, so two specs differing only in redundancy see
/// the same arrivals, sizes and noise.
std::vector<Task> generate(const WorkloadSpec& spec);

/// Redundancy for a task count: linear from 10% at n = 10 to 80% at n = 100,
/// clamped outside that range.
double ramp_redundancy(std::size_t num_tasks);

/// One WorkloadSpec per task count, with the ramped redundancy. `n_values` must be
/// non-empty and strictly ascending.
std::vector<WorkloadSpec> redundancy_ramp(std::span<const std::size_t> n_values, const WorkloadSpec& base = {});

class IngestError : public std::runtime_error {
 public:
  IngestError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads a feature dump (`label,v1,...,vd` per line, optional header
/// `label,f1,...`). Labels and features come from the file; arrivals and
/// sizes are drawn as in generate(). Dimension must equal spec.dimension.
std::vector<Task> ingest(std::istream& in, const WorkloadSpec& spec);
std::vector<Task> ingest(const std::filesystem::path& path, const WorkloadSpec& spec);

/// Order-sensitive fingerprint of a task list (all fields).
std::uint64_t fingerprint(std::span<const Task> tasks);

}  // namespace reuse
