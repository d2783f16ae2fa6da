#include "semcond/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "semcond/errors.hpp"

namespace semcond {

namespace {

constexpr std::size_t kGridB = 80;
constexpr std::size_t kGridAinf = 80;
constexpr std::size_t kMaxIterations = 500;
constexpr double kMinB = 1e-8;

double sse(const std::vector<AccuracyPoint>& pts, const SurrogateModel& sm) {
  double s = 0.0;
  for (const auto& p : pts) {
    const double r = predict(sm, p.m) - p.acc;
    s += r * r;
  }
  return s;
}

SurrogateModel clamp(SurrogateModel sm) {
  sm.a_inf = std::clamp(sm.a_inf, 0.0, 1.0);
  sm.b = std::max(sm.b, kMinB);
  return sm;
}

SurrogateModel grid_seed(const std::vector<AccuracyPoint>& pts) {
  double max_acc = 0.0;
  for (const auto& p : pts) max_acc = std::max(max_acc, p.acc);
  SurrogateModel best;
  double best_sse = std::numeric_limits<double>::infinity();
  const double lo = std::log(0.05), hi = std::log(2.0);
  for (std::size_t i = 0; i < kGridB; ++i) {
    const double b = std::exp(lo + (hi - lo) * static_cast<double>(i) / (kGridB - 1));
    for (std::size_t k = 0; k < kGridAinf; ++k) {
      const double a_inf = max_acc + (1.0 - max_acc) * static_cast<double>(k) / (kGridAinf - 1);
      double sxr = 0.0, sxx = 0.0;
      for (const auto& p : pts) {
        const double x = std::pow(p.m, -b);
        sxr += x * (p.acc - a_inf);
        sxx += x * x;
      }
      const SurrogateModel sm{sxx > 0.0 ? sxr / sxx : 0.0, b, a_inf};
      const double s = sse(pts, sm);
      if (s < best_sse) {
        best_sse = s;
        best = sm;
      }
    }
  }
  return best;
}

FitResult refine(const std::vector<AccuracyPoint>& pts, SurrogateModel sm) {
  FitResult fr;
  double cur = sse(pts, sm);
  double damping = 1e-3;
  for (fr.iterations = 0; fr.iterations < kMaxIterations; ++fr.iterations) {
    if (cur == 0.0) {
      fr.converged = true;
      break;
    }
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
      const double x = std::pow(p.m, -sm.b);
      const Eigen::Vector3d g(x, -sm.alpha * std::log(p.m) * x, 1.0);
      const double r = sm.alpha * x + sm.a_inf - p.acc;
      jtj += g * g.transpose();
      jtr += g * r;
    }
    bool improved = false;
    while (damping < 1e12) {
      Eigen::Matrix3d lhs = jtj;
      for (int d = 0; d < 3; ++d) lhs(d, d) += damping * std::max(jtj(d, d), 1e-12);
      const Eigen::Vector3d step = lhs.ldlt().solve(-jtr);
      const SurrogateModel trial = clamp({sm.alpha + step(0), sm.b + step(1), sm.a_inf + step(2)});
      const double next = sse(pts, trial);
      if (std::isfinite(next) && next < cur) {
        const double gain = cur - next;
        sm = trial;
        damping = std::max(damping / 10.0, 1e-12);
        improved = true;
        if (gain <= 1e-15 * cur) fr.converged = true;
        cur = next;
        break;
      }
      damping *= 10.0;
    }
    if (!improved) {
      // No descent direction left at any damping: a local minimum.
      fr.converged = true;
      break;
    }
    if (fr.converged) break;
  }
  fr.model = sm;
  fr.residual = std::sqrt(cur);
  return fr;
}

}  // namespace

FitResult fit_surrogate(const std::vector<AccuracyPoint>& points, AccuracyUnit unit) {
  if (points.size() < 4) throw InputError("surrogate fit needs at least 4 points");
  const double scale = unit == AccuracyUnit::kPercent ? 100.0 : 1.0;
  std::vector<AccuracyPoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.m) || p.m <= 0.0) throw InputError("resource values must be positive");
    const double acc = p.acc / scale;
    if (!std::isfinite(acc) || acc < 0.0 || acc > 1.0) {
      throw InputError("accuracy " + std::to_string(p.acc) + " outside the valid range");
    }
    pts.push_back({p.m, acc});
  }
  const bool distinct = std::any_of(pts.begin(), pts.end(), [&](const AccuracyPoint& p) { return p.m != pts[0].m; });
  if (!distinct) throw InputError("surrogate fit needs distinct resource values");

  FitResult fr = refine(pts, grid_seed(pts));
  fr.model.alpha *= scale;
  fr.model.a_inf *= scale;
  fr.residual *= scale;
  return fr;
}

double predict(const SurrogateModel& sm, double m) {
  if (!(m > 0.0)) throw InputError("resource value must be positive");
  return sm.alpha * std::pow(m, -sm.b) + sm.a_inf;
}

double inverse(const SurrogateModel& sm, double acc) {
  if (!(sm.alpha < 0.0) || !(acc < sm.a_inf) || !(sm.b > 0.0)) {
    throw Unattainable("accuracy " + std::to_string(acc) + " is not reached by the curve");
  }
  return std::pow(sm.alpha / (acc - sm.a_inf), 1.0 / sm.b);
}

double asymptotic_gain(const SurrogateModel& sm_nesy, const SurrogateModel& sm_imc) {
  return sm_nesy.a_inf - sm_imc.a_inf;
}

ResourceSavings resource_savings(const SurrogateModel& sm_nesy, const SurrogateModel& sm_imc, double m) {
  const double target = predict(sm_imc, m);
  const double needed = inverse(sm_nesy, target);
  ResourceSavings rs;
  rs.epsilon = m - needed;
  rs.tau = rs.epsilon / m;
  return rs;
}

}  // namespace semcond
