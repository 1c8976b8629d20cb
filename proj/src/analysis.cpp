#include "hlat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "hlat/dynamics.hpp"
#include "hlat/errors.hpp"

namespace hlat {

namespace {

constexpr double kExponentiallySmall = 1e-8;
constexpr double kOrderOne = 0.1;

// Plain least-squares slope/intercept of log(value) against log(time); the
// preconditions (positivity, ordering) are the caller's responsibility here.
struct LogLogLine {
  double slope = 0.0;
  double intercept = 0.0;
};

LogLogLine log_log_line(const std::vector<double>& times,
                        const std::vector<double>& values) {
  const double n = static_cast<double>(times.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double x = std::log(times[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LogLogLine line;
  line.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  line.intercept = (sy - line.slope * sx) / n;
  return line;
}

void check_time_samples(const std::vector<double>& t_samples) {
  if (t_samples.empty()) throw InvalidArgument("no time samples given");
  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    if (!(t_samples[i] >= 1.0)) {
      throw InvalidArgument("time samples must lie in [1, inf), got " +
                            std::to_string(t_samples[i]));
    }
    if (i > 0 && !(t_samples[i] > t_samples[i - 1])) {
      throw InvalidArgument("time samples must be strictly increasing");
    }
  }
}

}  // namespace

WeightSpec::WeightSpec(int dimension) : WeightSpec(dimension, dimension + 3) {}

WeightSpec::WeightSpec(int dimension, int exponent_)
    : d(dimension), exponent(exponent_) {
  if (d < 1) throw InvalidArgument("weight dimension must be >= 1");
  if (exponent < 0) throw InvalidArgument("weight exponent must be >= 0");
}

double weighted_l1_norm(const LatticeFunction& f, const WeightSpec& spec) {
  if (f.dimension() != spec.d) {
    throw DimensionMismatch("function has dimension " +
                            std::to_string(f.dimension()) + ", weight has " +
                            std::to_string(spec.d));
  }
  double acc = 0.0;
  for (const auto& [site, amp] : f.entries()) {
    long long l1 = 0;
    for (int c : site) l1 += std::llabs(c);
    acc += std::abs(amp) * std::pow(1.0 + static_cast<double>(l1), spec.exponent);
  }
  return acc;
}

DecayFit fit_decay(const std::vector<double>& times,
                   const std::vector<double>& values) {
  if (times.size() != values.size()) {
    throw InvalidArgument("times and values have different lengths");
  }
  if (times.size() < 5) {
    throw TooFewPoints("power-law fit needs at least 5 points, got " +
                       std::to_string(times.size()));
  }
  check_time_samples(times);
  for (double v : values) {
    if (!(v > 0.0)) {
      throw NonPositiveValue("power-law fit needs positive values, got " +
                             std::to_string(v));
    }
  }

  const LogLogLine line = log_log_line(times, values);
  DecayFit fit;
  fit.exponent = line.slope;
  fit.amplitude = std::exp(line.intercept);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double predicted = line.intercept + line.slope * std::log(times[i]);
    fit.residual = std::max(fit.residual, std::abs(std::log(values[i]) - predicted));
  }
  fit.t_min = times.front();
  fit.t_max = times.back();
  fit.n_points = static_cast<int>(times.size());
  return fit;
}

std::pair<std::vector<double>, std::vector<double>> envelope_maxima(
    const std::vector<double>& times, const std::vector<double>& values,
    int window) {
  if (times.size() != values.size()) {
    throw InvalidArgument("times and values have different lengths");
  }
  if (times.empty()) throw InvalidArgument("empty series");
  if (window < 1) throw InvalidArgument("window must be >= 1");

  const std::size_t n = times.size();
  const std::size_t w = std::min<std::size_t>(window, n);
  std::vector<double> out_t, out_v;
  std::size_t last = n;  // sentinel: no sample emitted yet
  for (std::size_t start = 0; start + w <= n; ++start) {
    std::size_t arg = start;
    for (std::size_t i = start; i < start + w; ++i) {
      if (std::abs(values[i]) > std::abs(values[arg])) arg = i;
    }
    if (arg != last) {
      out_t.push_back(times[arg]);
      out_v.push_back(std::abs(values[arg]));
      last = arg;
    }
  }
  return {std::move(out_t), std::move(out_v)};
}

std::vector<double> geometric_times(double t_min, double t_max, int n) {
  if (!(t_min > 0.0)) throw InvalidArgument("t_min must be > 0");
  if (!(t_max > t_min)) throw InvalidArgument("t_max must exceed t_min");
  if (n < 2) throw InvalidArgument("need at least 2 samples");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    t[i] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n - 1));
  }
  t.front() = t_min;
  t.back() = t_max;
  return t;
}

UniformDecayReport verify_uniform_decay(const ModelParams& params,
                                        const std::vector<double>& t_samples,
                                        const QuadratureSpec& spec) {
  params.validate();
  // Dead axes contribute a bare point-mass factor; drop them so the box and
  // the rescaling power describe the dimensions that actually disperse.
  ModelParams effective = params;
  if (std::any_of(params.lambdas.begin(), params.lambdas.end(),
                  [](double l) { return l == 0.0; })) {
    effective = reduce_degenerate(params).first;
  }
  effective.validate_strict();
  if (t_samples.size() < 2) {
    throw TooFewPoints("uniform decay needs at least 2 time samples");
  }
  check_time_samples(t_samples);
  spec.validate();

  UniformDecayReport report;
  report.times = t_samples;
  report.effective_dimension = effective.d;
  report.rescale_power = effective.d == 1 ? 1.0 / 3.0 : 0.5;

  for (double t : t_samples) {
    const int radius =
        static_cast<int>(std::ceil(2.0 * t * effective.lambda_sum() /
                                   effective.omega)) + 16;
    const KernelTable table = kernel_table(effective, t, radius, spec);
    double sup = 0.0;
    for (std::size_t i = 0; i < table.values[0].size(); ++i) {
      const double total = std::abs(table.values[0][i]) +
                           std::abs(table.values[1][i]) +
                           std::abs(table.values[2][i]);
      sup = std::max(sup, total);
    }
    report.sup_values.push_back(sup);
    report.rescaled.push_back(sup * std::pow(t, report.rescale_power));
  }

  report.slope = log_log_line(report.times, report.rescaled).slope;
  report.max_rescaled =
      *std::max_element(report.rescaled.begin(), report.rescaled.end());
  report.pass = report.slope <= report.slope_threshold;
  return report;
}

DecayFit verify_fixed_x_decay(const ModelParams& params,
                              const std::vector<int>& x,
                              const std::vector<double>& t_samples,
                              const QuadratureSpec& spec,
                              DecayFit* kernel_fit) {
  params.validate_strict();
  if (static_cast<int>(x.size()) != params.d) {
    throw DimensionMismatch("site has rank " + std::to_string(x.size()) +
                            ", model has dimension " + std::to_string(params.d));
  }
  check_time_samples(t_samples);
  if (t_samples.size() < 2 ||
      t_samples.back() < 10.0 * t_samples.front() * (1.0 - 1e-12)) {
    throw InvalidArgument("time samples must span at least one decade");
  }
  spec.validate();

  std::vector<double> commutator(t_samples.size());
  std::vector<double> kernel(t_samples.size());
  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    // One quadrature pass per time gives the phase sigma = H^(-1)(x) of the
    // pair (delta_0, delta_x) and the weight-0 kernel together.
    const std::array<double, 3> k = kernel_values_at(params, t_samples[i], x, spec);
    commutator[i] = 2.0 * std::abs(std::sin(0.5 * k[0]));
    kernel[i] = k[1];
  }

  if (kernel_fit != nullptr) {
    const auto [kt, kv] = envelope_maxima(t_samples, kernel);
    *kernel_fit = fit_decay(kt, kv);
  }
  const auto [ct, cv] = envelope_maxima(t_samples, commutator);
  return fit_decay(ct, cv);
}

Region region_of(double value) {
  if (value < kExponentiallySmall) return Region::ExponentiallySmall;
  if (value > kOrderOne) return Region::OrderOne;
  return Region::PowerLaw;
}

ConeScan cone_scan(const ModelParams& params,
                   const std::vector<double>& t_samples, int x_max,
                   const QuadratureSpec& spec) {
  params.validate_strict();
  if (t_samples.empty()) throw InvalidArgument("no time samples given");
  if (x_max < 0) throw InvalidArgument("x_max must be >= 0");
  spec.validate();

  const LatticeFunction origin = LatticeFunction::delta(params.d, std::vector<int>(params.d, 0));

  ConeScan scan;
  scan.model = params;
  scan.times = t_samples;
  scan.x_max = x_max;
  scan.values.resize(t_samples.size());

  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    // One truncated evolution serves the whole probe column.
    const EvolutionResult evolved =
        evolve_covering(params, origin, t_samples[i], spec, x_max);
    auto& row = scan.values[i];
    row.resize(static_cast<std::size_t>(x_max) + 1);
    for (int n = 0; n <= x_max; ++n) {
      std::vector<int> site(static_cast<std::size_t>(params.d), 0);
      site[0] = n;
      const double sigma =
          symplectic_form(evolved.function, LatticeFunction::delta(params.d, site));
      row[static_cast<std::size_t>(n)] = 2.0 * std::abs(std::sin(0.5 * sigma));
    }
  }
  return scan;
}

}  // namespace hlat
