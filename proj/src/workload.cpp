#include "reuse/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>

namespace reuse {

namespace {

void validate_range(const Range& r, const char* name) {
  if (!(r.lo > 0.0 && r.hi >= r.lo && std::isfinite(r.hi)))
    throw std::invalid_argument(std::string("workload ") + name + " range must satisfy 0 < lo <= hi");
}

/// Arrival and size draws shared by generate() and ingest().
class TaskShapeStreams {
 public:
  explicit TaskShapeStreams(const WorkloadSpec& spec)
      : spec_(spec),
        arrivals_(derive_seed(spec.seed, "arrivals")),
        sizes_(derive_seed(spec.seed, "sizes")) {}

  void shape(Task& t) {
    clock_ += arrivals_.exponential(spec_.arrival_rate);
    t.arrival_time = clock_;
    t.input_size = sizes_.uniform(spec_.input_size.lo, spec_.input_size.hi);
    t.output_size = sizes_.uniform(spec_.output_size.lo, spec_.output_size.hi);
    t.complexity = sizes_.uniform(spec_.complexity.lo, spec_.complexity.hi);
  }

 private:
  const WorkloadSpec& spec_;
  Rng arrivals_;
  Rng sizes_;
  double clock_ = 0.0;
};

}  // namespace

void validate(const WorkloadSpec& spec) {
  if (!(spec.redundancy_rate >= 0.0 && spec.redundancy_rate <= 1.0))
    throw std::invalid_argument("workload redundancy_rate must lie in [0, 1]");
  if (!(spec.arrival_rate > 0.0 && std::isfinite(spec.arrival_rate)))
    throw std::invalid_argument("workload arrival_rate must be > 0");
  if (spec.service.empty()) throw std::invalid_argument("workload service must be non-empty");
  validate_range(spec.input_size, "input_size");
  validate_range(spec.output_size, "output_size");
  validate_range(spec.complexity, "complexity");
  if (spec.dimension < 1) throw std::invalid_argument("workload dimension must be >= 1");
  if (!(spec.noise_sigma >= 0.0 && std::isfinite(spec.noise_sigma)))
    throw std::invalid_argument("workload noise_sigma must be >= 0");
}

ObjectCatalog::ObjectCatalog(Eigen::Index dimension, double noise_sigma, std::uint64_t seed)
    : dimension_(dimension), sigma_(noise_sigma), seed_(seed) {}

FeatureVector ObjectCatalog::base(std::size_t object) const {
  Rng rng(derive_seed(seed_, "object", object));
  FeatureVector v(dimension_);
  do {
    for (Eigen::Index i = 0; i < dimension_; ++i) v(i) = rng.normal();
  } while (v.norm() == 0.0);
  return kBaseRadius * v.normalized();
}

FeatureVector ObjectCatalog::observe(std::size_t object, Rng& noise) const {
  FeatureVector v = base(object);
  for (Eigen::Index i = 0; i < dimension_; ++i) v(i) += sigma_ * noise.normal();
  return v;
}

std::string ObjectCatalog::label(std::size_t object) { return "obj-" + std::to_string(object); }

std::vector<Task> generate(const WorkloadSpec& spec) {
  validate(spec);
  const ObjectCatalog catalog(spec.dimension, spec.noise_sigma, derive_seed(spec.seed, "catalog"));
  Rng repeat(derive_seed(spec.seed, "repeat"));
  Rng pick(derive_seed(spec.seed, "pick"));
  Rng noise(derive_seed(spec.seed, "noise"));
  TaskShapeStreams shapes(spec);

  std::vector<Task> tasks;
  tasks.reserve(spec.num_tasks);
  std::size_t minted = 0;
  for (std::size_t i = 0; i < spec.num_tasks; ++i) {
    const double u_repeat = repeat.uniform();
    const double u_pick = pick.uniform();
    std::size_t object;
    if (minted > 0 && u_repeat < spec.redundancy_rate) {
      object = std::min(minted - 1, static_cast<std::size_t>(u_pick * double(minted)));
    } else {
      object = minted++;
    }
    Task t;
    t.id = i;
    t.service = spec.service;
    t.object_label = ObjectCatalog::label(object);
    t.features = catalog.observe(object, noise);
    shapes.shape(t);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

double ramp_redundancy(std::size_t num_tasks) {
  const double r = 0.1 + 0.7 * (double(num_tasks) - 10.0) / 90.0;
  return std::clamp(r, 0.1, 0.8);
}

std::vector<WorkloadSpec> redundancy_ramp(std::span<const std::size_t> n_values, const WorkloadSpec& base) {
  if (n_values.empty()) throw std::invalid_argument("redundancy_ramp: empty task-count list");
  if (!std::is_sorted(n_values.begin(), n_values.end()) ||
      std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end())
    throw std::invalid_argument("redundancy_ramp: task counts must be strictly ascending");
  std::vector<WorkloadSpec> specs;
  for (std::size_t n : n_values) {
    WorkloadSpec s = base;
    s.num_tasks = n;
    s.redundancy_rate = ramp_redundancy(n);
    specs.push_back(s);
  }
  return specs;
}

IngestError::IngestError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<Task> ingest(std::istream& in, const WorkloadSpec& spec) {
  validate(spec);
  TaskShapeStreams shapes(spec);
  std::vector<Task> tasks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    {
      std::istringstream fs(line);
      std::string f;
      while (std::getline(fs, f, ',')) fields.push_back(f);
      if (line.back() == ',') fields.emplace_back();
    }
    if (tasks.empty() && line_no == 1 && fields.front() == "label") continue;
    if (fields.front().empty()) throw IngestError(line_no, "empty label");

    const std::size_t values = fields.size() - 1;
    if (values != std::size_t(spec.dimension))
      throw IngestError(line_no, "expected " + std::to_string(spec.dimension) + " feature values, got " +
                                     std::to_string(values));
    Task t;
    t.id = tasks.size();
    t.service = spec.service;
    t.object_label = fields.front();
    t.features.resize(spec.dimension);
    for (std::size_t i = 0; i < values; ++i) {
      const std::string& f = fields[i + 1];
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size() || !std::isfinite(v))
        throw IngestError(line_no, "bad feature value '" + f + "'");
      t.features(Eigen::Index(i)) = v;
    }
    shapes.shape(t);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<Task> ingest(const std::filesystem::path& path, const WorkloadSpec& spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature dump " + path.string());
  return ingest(in, spec);
}

std::uint64_t fingerprint(std::span<const Task> tasks) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const Task& t : tasks) {
    mix(&t.id, sizeof t.id);
    mix(t.service.data(), t.service.size());
    mix(t.object_label.data(), t.object_label.size());
    mix(t.features.data(), sizeof(double) * std::size_t(t.features.size()));
    mix(&t.input_size, sizeof(double));
    mix(&t.output_size, sizeof(double));
    mix(&t.complexity, sizeof(double));
    mix(&t.arrival_time, sizeof(double));
  }
  return h;
}

}  // namespace reuse
