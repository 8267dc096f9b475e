#include "tstab/signal_reference.hpp"

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tstab/error.hpp"

namespace tstab::signal::reference {

std::vector<double> sg_filter(std::span<const double> series, const SgSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  const std::ptrdiff_t w = spec.window;
  const std::ptrdiff_t h = w / 2;
  if (n < w) throw Error(Errc::SeriesTooShort, "series shorter than the SG window");

  const int m = spec.order + 1;
  std::vector<double> out(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t start = std::clamp<std::ptrdiff_t>(i - h, 0, n - w);
    // Fit around the evaluation point so the fitted value is the constant term.
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::ptrdiff_t k = start; k < start + w; ++k) {
      const double x = static_cast<double>(k - i) / static_cast<double>(w);
      Eigen::VectorXd row(m);
      double p = 1.0;
      for (int c = 0; c < m; ++c) {
        row(c) = p;
        p *= x;
      }
      normal += row * row.transpose();
      rhs += row * series[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i)] = normal.ldlt().solve(rhs)(0);
  }
  return out;
}

}  // namespace tstab::signal::reference
