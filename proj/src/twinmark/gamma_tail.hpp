#pragma once

namespace twinmark {

/// ln Q(a, x), Q the upper regularized incomplete gamma function. Stays finite
/// far into the tail where Q itself underflows. Requires a > 0, x >= 0.
double log_gamma_q(double a, double x);

/// Q(a, x).
double gamma_q(double a, double x);

} // namespace twinmark
