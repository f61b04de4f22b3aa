#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mmt/math.hpp"

namespace mmt {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           unsigned max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  double l1 = 0.0;
  // boost interprets tolerance relative to the L1 norm; convert the absolute target.
  double rel = abs_tol;
  out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &out.error, &l1);
  if (out.error > abs_tol && l1 > 0.0) {
    rel = std::max(abs_tol / l1, 4.0 * std::numeric_limits<double>::epsilon());
    out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, rel, &out.error, &l1);
  }
  return out;
}

}  // namespace mmt
