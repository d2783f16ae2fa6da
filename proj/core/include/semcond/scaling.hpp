#pragma once

#include <cstddef>
#include <vector>

namespace semcond {

/// a(m) = alpha * m^{-b} + a_inf.
struct SurrogateModel {
  double alpha = 0.0;
  double b = 1.0;
  double a_inf = 0.0;
};

struct AccuracyPoint {
  double m = 1.0;
  double acc = 0.0;
};

/// Units of accuracy values. Fits run on fractions; percent inputs are
/// scaled in and out.
enum class AccuracyUnit { kFraction, kPercent };

struct FitResult {
  SurrogateModel model;
  double residual = 0.0;  // root of the summed squared error, in input units
  bool converged = false;
  std::size_t iterations = 0;
};

/// Least-squares fit of a(m). A log grid over (b, a_inf) with alpha in closed
/// form seeds a Levenberg-Marquardt refinement. Needs at least four points
/// with at least two distinct m values; throws InputError otherwise.
FitResult fit_surrogate(const std::vector<AccuracyPoint>& points, AccuracyUnit unit = AccuracyUnit::kFraction);

double predict(const SurrogateModel& sm, double m);

/// The m at which the curve reaches acc. Throws Unattainable unless
/// alpha < 0 and acc < a_inf.
double inverse(const SurrogateModel& sm, double acc);

/// sm_nesy.a_inf - sm_imc.a_inf.
double asymptotic_gain(const SurrogateModel& sm_nesy, const SurrogateModel& sm_imc);

struct ResourceSavings {
  double epsilon = 0.0;  // m - inverse_nesy(predict_imc(m))
  double tau = 0.0;      // epsilon / m
};

ResourceSavings resource_savings(const SurrogateModel& sm_nesy, const SurrogateModel& sm_imc, double m);

}  // namespace semcond
