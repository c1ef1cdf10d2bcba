#include "lwp/metrics.hpp"

#include <cmath>

#include "lwp/common.hpp"

namespace lwp {

std::optional<double> pcc(const std::vector<double>& y, const std::vector<double>& y_hat) {
    if (y.size() != y_hat.size()) throw ValidationError("pcc: length mismatch");
    if (y.size() < 2) throw ValidationError("pcc: need at least 2 samples");
    const auto n = static_cast<double>(y.size());
    double my = 0.0, mh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mh += y_hat[i];
    }
    my /= n;
    mh /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double dy = y[i] - my;
        const double dh = y_hat[i] - mh;
        sxy += dh * dy;
        sxx += dh * dh;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

double rmse(const std::vector<double>& y, const std::vector<double>& y_hat) {
    if (y.size() != y_hat.size()) throw ValidationError("rmse: length mismatch");
    if (y.empty()) throw ValidationError("rmse: need at least 1 sample");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - y_hat[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw ValidationError("mean of empty vector");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

namespace {

// Regularized lower incomplete gamma P(a,x) by power series; valid for x < a+1.
double gamma_series_p(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction; x >= a+1.
double gamma_cf_q(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_p_value(double statistic, int dof) {
    if (dof < 1) throw ValidationError("chi_square_p_value: dof must be >= 1");
    if (!(statistic >= 0.0)) throw ValidationError("chi_square_p_value: statistic must be >= 0");
    if (statistic == 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(dof);
    const double x = 0.5 * statistic;
    if (x < a + 1.0) return 1.0 - gamma_series_p(a, x);
    return gamma_cf_q(a, x);
}

}  // namespace lwp
