#include "twinmark/gamma_tail.hpp"

#include "twinmark/common.hpp"

#include <cmath>
#include <limits>

namespace twinmark {

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// ln of x^a e^-x / Gamma(a)
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// Lower series: P(a,x) = prefactor * sum_n x^n / (a (a+1) ... (a+n)).
double lower_series(double a, double x)
{
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return std::exp(log_prefactor(a, x) + std::log(sum));
}

// ln of the Legendre continued fraction for Q, modified Lentz.
double log_upper_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::log(h);
}

} // namespace

double log_gamma_q(double a, double x)
{
    require(a > 0.0 && std::isfinite(a), ErrorCode::InvalidArgument, "gamma shape must be positive");
    require(x >= 0.0 && !std::isnan(x), ErrorCode::InvalidArgument, "gamma argument must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
    if (x < a + 1.0) return std::log1p(-lower_series(a, x));
    return log_prefactor(a, x) + log_upper_fraction(a, x);
}

double gamma_q(double a, double x) { return std::exp(log_gamma_q(a, x)); }

} // namespace twinmark
