#include <algorithm>
#include <cmath>

#include "spectral_embed/charts.hpp"
#include "spectral_embed/error.hpp"

namespace spectral_embed {

namespace {

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace

ChartStudyResult run_chart_study(const ChartStudyConfig& config) {
  if (config.bump != "gaussian") throw InvalidArgument("unknown bump shape '" + config.bump + "' (expected gaussian)");
  if (config.spacings.size() < 2 || config.q_minus_one.size() < 2) {
    throw InvalidArgument("chart study needs at least two spacings and two ellipticity levels");
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(config.n);
  ChartStudyResult result;

  // Grid convergence for a = I against the Euclidean kernel.
  const ChartSpec identity = identity_chart(config.n, config.half_width);
  for (double h : config.spacings) {
    const Grid grid(config.n, config.half_width, h);
    FdParams fd;
    fd.t_max = config.t_compare;
    fd.steps = config.steps;
    fd.record_every = config.steps;
    const GridKernel numeric = solve_fd_kernel(identity, grid, y, fd);
    const GridKernel exact = euclidean_kernel(grid, y, numeric.times);
    result.convergence_errors.push_back((numeric.values.back() - exact.values.back()).cwiseAbs().maxCoeff());
  }
  result.convergence_pass = true;
  for (std::size_t i = 1; i < result.convergence_errors.size(); ++i) {
    const double ratio = result.convergence_errors[i - 1] / result.convergence_errors[i];
    result.convergence_ratios.push_back(ratio);
    result.convergence_pass = result.convergence_pass && ratio >= 3.0 && ratio <= 5.0;
  }

  // Ellipticity sweep outside the parabolic cylinder P_{1/2,1/4}(y).
  const Grid sweep_grid(config.n, config.half_width, config.sweep_spacing);
  FdParams fd;
  fd.t_max = config.t_max;
  fd.steps = config.steps;
  fd.record_every = std::max(1, config.steps / 64);
  ClosenessRegion region;
  region.t_min = config.window_min;
  region.t_max = config.t_max;
  for (std::size_t i = 0; i < config.q_minus_one.size(); ++i) {
    const ChartSpec chart = bump_chart(config.n, config.q_minus_one[i], config.bump_width, config.alpha, y, config.half_width);
    validate_chart(chart, sweep_grid);
    const GridKernel numeric = solve_fd_kernel(chart, sweep_grid, y, fd);
    const GridKernel exact = euclidean_kernel(sweep_grid, y, numeric.times);
    const Closeness c = closeness_report(numeric, exact, region);
    result.sweep_value_sups.push_back(c.value_sup);
    result.sweep_gradient_sups.push_back(c.gradient_sup);
    if (i + 1 == config.q_minus_one.size()) {
      result.gradient_sup_excluded = c.gradient_sup;
      ClosenessRegion full = region;
      full.t_min = 0.0;
      full.exclude_parabolic = false;
      result.gradient_sup_included = closeness_report(numeric, exact, full).gradient_sup;
      result.decay_constant = decay_constant(numeric, config.decay_tol);
    }
  }
  result.slope = log_log_slope(config.q_minus_one, result.sweep_value_sups);
  result.gradient_slope = log_log_slope(config.q_minus_one, result.sweep_gradient_sups);
  result.slope_pass = result.slope >= 0.7 && result.slope <= 1.3;

  // First parametrix correction against the frozen kernel, both measured
  // against the FD solution.
  const Grid pgrid(config.n, config.half_width, config.parametrix_spacing);
  const ChartSpec chart =
      bump_chart(config.n, config.parametrix_q_minus_one, config.bump_width, config.alpha, y, config.half_width);
  FdParams pfd;
  pfd.t_max = config.parametrix_t;
  pfd.steps = config.steps;
  pfd.record_every = config.steps;
  const GridKernel numeric = solve_fd_kernel(chart, pgrid, y, pfd);
  ParametrixParams pp;
  pp.depth = config.depth;
  pp.time_steps = config.parametrix_time_steps;
  const Eigen::VectorXd corrected = parametrix_kernel(chart, pgrid, y, config.parametrix_t, pp);
  pp.depth = 0;
  const Eigen::VectorXd frozen = parametrix_kernel(chart, pgrid, y, config.parametrix_t, pp);
  for (Eigen::Index i = 0; i < pgrid.size(); ++i) {
    if (pgrid.is_boundary(i)) continue;
    result.parametrix_error = std::max(result.parametrix_error, std::abs(corrected[i] - numeric.values.back()[i]));
    result.frozen_error = std::max(result.frozen_error, std::abs(frozen[i] - numeric.values.back()[i]));
  }
  result.parametrix_pass = config.depth == 0 || result.parametrix_error < result.frozen_error;
  return result;
}

KeyValueReport ChartStudyResult::summary() const {
  KeyValueReport r;
  r.add("convergence_errors", join(convergence_errors));
  r.add("convergence_ratios", join(convergence_ratios));
  r.add("convergence_pass", convergence_pass);
  r.add("sweep_value_sups", join(sweep_value_sups));
  r.add("sweep_gradient_sups", join(sweep_gradient_sups));
  r.add("slope", slope);
  r.add("gradient_slope", gradient_slope);
  r.add("slope_pass", slope_pass);
  r.add("parametrix_error", parametrix_error);
  r.add("frozen_error", frozen_error);
  r.add("parametrix_pass", parametrix_pass);
  r.add("gradient_sup_excluded", gradient_sup_excluded);
  r.add("gradient_sup_included", gradient_sup_included);
  r.add("decay_constant", decay_constant);
  r.add("pass", pass());
  return r;
}

std::string ChartStudyResult::sweep_csv(const ChartStudyConfig& config) const {
  CsvTable table({"q_minus_one", "value_sup", "gradient_sup"});
  for (std::size_t i = 0; i < sweep_value_sups.size(); ++i) {
    table.add_row({format_double(config.q_minus_one[i]), format_double(sweep_value_sups[i]),
                   format_double(sweep_gradient_sups[i])});
  }
  return table.str();
}

}  // namespace spectral_embed
