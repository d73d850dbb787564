#pragma once

#include <span>
#include <string>
#include <vector>

#include "dbf/core.hpp"

namespace dbf {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  std::string to_string() const;
  auto operator<=>(const ArimaOrder&) const = default;
};

struct ArimaModel {
  ArimaOrder order;
  Vector phi;    // AR coefficients on the differenced scale
  Vector theta;  // MA coefficients
  double intercept = 0.0;
  double sigma2 = 0.0;
  double css = 0.0;
  bool converged = true;
};

std::vector<double> difference(std::span<const double> values, int d);

/// Undoes `d` rounds of differencing for values continuing after `history`.
std::vector<double> integrate(std::span<const double> history, std::span<const double> diffs, int d);

/// In-sample innovations of the ARMA recursion on the differenced scale
/// (pre-sample innovations set to zero).
std::vector<double> css_innovations(const ArimaModel& model, std::span<const double> differenced);

/// Conditional sum of squared innovations.
double css_objective(const ArimaModel& model, std::span<const double> differenced);

/// Conditional least squares: OLS for pure AR orders, Nelder-Mead on the
/// CSS objective from an OLS warm start otherwise. The intercept is only
/// estimated when d = 0.
ArimaModel fit_arima(const TimeSeries& series, const ArimaOrder& order);

/// Recursive forecast with future innovations at zero, integrated back to levels.
std::vector<double> forecast_arima(const ArimaModel& model, const TimeSeries& series, std::size_t horizon);

}  // namespace dbf
