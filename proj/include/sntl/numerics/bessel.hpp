#pragma once

namespace sntl {

/// Modified Bessel function of the second kind, order one.
///
/// For x <= 2 the convergent power series
///   K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!)
/// is summed to machine precision. For x > 2 the scaled pair K0, K1 comes from
/// Steed's continued fraction (CF2) with Temme's normalization sum, which
/// converges in a few dozen terms and keeps relative accuracy near 1e-15.
///
/// Throws DomainError for x <= 0 or NaN.
double bessel_k1(double x);

}  // namespace sntl
