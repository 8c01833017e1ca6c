#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadfit/kernel.hpp"
#include "quadfit/measure.hpp"
#include "quadfit/model.hpp"

namespace quadfit::cli {

// Grammar:
//   kernels:  normal:h2=<f> | poisson:rho=<f>[,lo=<f>,hi=<f>] | cvm | pearson | identity
//   measures: uniform01 | circle | uniform:lo=<f>,hi=<f> | normal:mu=<f>,sigma2=<f>
//             | exponential:rate=<f> | pmf:<path> | sample:<path>
//   models:   normal | exponential | independence:rows=<n>,cols=<n>
Kernel parse_kernel(const std::string& text);
BaselineMeasure parse_measure(const std::string& text);
ModelPtr parse_model(const std::string& text);

/// One observation per line; blank lines ignored; the first nonblank line
/// may be a header. NaN/Inf and malformed lines raise ParseError with the
/// line number.
std::vector<double> ingest(const std::filesystem::path& path);
std::vector<double> ingest(std::istream& in);

/// Lines "value prob" or "value,prob"; header allowed.
BaselineMeasure ingest_pmf(const std::filesystem::path& path);

struct RunConfig {
  std::string command = "test";  // test | spectrum | dof
  std::string data;
  std::string kernel;
  std::string null_text;
  std::string model;
  std::string estimator = "v";
  std::vector<std::string> pvalues = {"spectral", "satterthwaite"};
  std::size_t draws = 200000;
  std::size_t boot = 500;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool full_spectrum = false;
  bool centered = false;
  std::size_t max_terms = 512;
  std::string spectrum_route = "auto";
  std::size_t nystrom_points = 2000;

  /// Throws InvalidArgument when the combination of fields is unusable.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

struct HeuristicRange {
  double lower = 0.0;
  double upper = 0.0;
  bool inverted = false;
  std::string warning;
  bool operator==(const HeuristicRange&) const = default;
};

struct SpectrumHead {
  std::vector<double> eigenvalues;  // first 20 unless the full spectrum was requested
  std::size_t total_terms = 0;
  double tail_bound = 0.0;
  std::string method;
  bool operator==(const SpectrumHead&) const = default;
};

struct MehlerEcho {
  double r = 0.0, w = 0.0, a = 0.0, b = 0.0, alpha = 0.0, beta = 0.0;
  double printed_a = 0.0, printed_alpha = 0.0;
  bool operator==(const MehlerEcho&) const = default;
};

struct SpectralP {
  double p = 0.0;
  double se = 0.0;
  std::size_t draws = 0;
  bool operator==(const SpectralP&) const = default;
};

struct BootstrapP {
  double p = 0.0;
  double se = 0.0;
  std::size_t replicates = 0;
  std::size_t discarded = 0;
  bool operator==(const BootstrapP&) const = default;
};

struct PValues {
  std::optional<SpectralP> spectral;
  std::optional<double> satterthwaite;
  std::optional<BootstrapP> bootstrap;
  bool normal_reference = false;
  bool operator==(const PValues&) const = default;
};

struct Report {
  std::string command;
  RunConfig config;
  std::optional<std::size_t> n;
  std::optional<std::string> estimator;
  std::optional<double> statistic;
  std::optional<double> v_stat;
  std::optional<double> u_stat;
  std::vector<double> theta;
  std::optional<double> trace;
  std::optional<double> trace_sq;
  std::optional<double> scale;
  std::optional<double> dof;
  std::string trace_method;
  std::optional<HeuristicRange> heuristic_dof_range;
  std::optional<SpectrumHead> spectrum;
  std::optional<MehlerEcho> mehler;
  std::optional<PValues> pvalues;
  double wall_time_seconds = 0.0;

  bool operator==(const Report&) const = default;
};

nlohmann::json to_json(const Report& r);
/// Strict: every field must be present and no other field is accepted.
Report report_from_json(const nlohmann::json& j);
std::string dump(const Report& r);

/// Executes a validated configuration. Statistical-route refusals propagate
/// as quadfit::RouteRefused.
Report run(const RunConfig& config);

/// Exit status for an exception escaping run(): 2 for route refusal, 1 otherwise.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace quadfit::cli
