#include "sntl/numerics/bessel.hpp"

#include "sntl/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sntl {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTerms = 10000;

double k1_series(double x) {
  const double q = 0.25 * x * x;
  // term_k = q^k / (k! (k+1)!)
  double term = 1.0;
  double psi_sum = -2.0 * std::numbers::egamma + 1.0;  // psi(1) + psi(2)
  double i1_sum = 0.0;
  double psi_weighted = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    i1_sum += term;
    psi_weighted += psi_sum * term;
    const double next = term * q / ((k + 1.0) * (k + 2.0));
    if (next < kEps * i1_sum && std::abs(next * psi_sum) < kEps * std::abs(psi_weighted)) {
      break;
    }
    psi_sum += 1.0 / (k + 1.0) + 1.0 / (k + 2.0);
    term = next;
  }
  const double i1 = 0.5 * x * i1_sum;
  return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * psi_weighted;
}

// Steed's CF2 for order mu = 0, giving K0 and then K1 through the
// recurrence-derived ratio K1/K0 = (mu + x + 1/2 - a1*h) / x.
double k1_continued_fraction(double x) {
  const double a1 = 0.25;  // 1/4 - mu^2
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < kMaxTerms; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  return k0 * (x + 0.5 - h) / x;
}

}  // namespace

double bessel_k1(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1: argument must be positive");
  if (x <= 2.0) return k1_series(x);
  return k1_continued_fraction(x);
}

}  // namespace sntl
