#include "adacomp/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "adacomp/errors.hpp"

namespace adacomp {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints, double abs_tol) {
  if (!(b > a)) return {};
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  QuadratureResult total;
  const double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double lo = cuts[j];
    const double hi = cuts[j + 1];
    if (!(hi > lo)) continue;
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, lo, hi, 30, 1e-13, &err, &l1);
    if (!std::isfinite(v) || !std::isfinite(err))
      throw NumericError("quadrature: integrand is not finite on the interval");
    if (err > piece_tol && err > 1e-12 * l1)
      throw NumericError("quadrature: tolerance not reached (integrand not integrable?)");
    total.value += v;
    total.error += err;
  }
  return total;
}

}  // namespace adacomp
