#pragma once

#include <optional>
#include <vector>

namespace lwp {

/// Pearson correlation between two equal-length vectors. Returns nullopt when
/// either vector is constant (correlation undefined; callers report NA).
std::optional<double> pcc(const std::vector<double>& y, const std::vector<double>& y_hat);

/// Root mean squared error between two equal-length, non-empty vectors.
double rmse(const std::vector<double>& y, const std::vector<double>& y_hat);

double mean(const std::vector<double>& xs);

/// Sample standard deviation (n-1 denominator); 0 for fewer than 2 values.
double sample_std(const std::vector<double>& xs);

/// Upper-tail p-value of a chi-square statistic with dof degrees of freedom.
double chi_square_p_value(double statistic, int dof);

}  // namespace lwp
