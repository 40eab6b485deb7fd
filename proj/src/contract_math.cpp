#include "hal/contract_math.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hal {
namespace {

// All scalar root finding: bisection to this absolute width. Hitting the
// iteration cap means a broken bracket, not a tight tolerance; treat as a bug.
constexpr double kRootTol = 1e-10;
constexpr int kMaxIter = 200;

// Agent utility on the incentive frontier. At (rho, a) with a the best
// response to rho, stationarity gives exp(-eta*rho*(a+theta)) = a/rho, so the
// utility collapses to a form without the belief or another exp call.
double frontier_utility(double premium, double effort, double eta) {
  return (1.0 - effort / premium) / eta - 0.5 * effort * effort;
}

}  // namespace

double best_response(double premium, double belief_theta, double eta) {
  if (!(premium >= 0.0 && premium <= 1.0))
    throw std::domain_error("premium must lie in [0,1]");
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");
  if (premium == 0.0) return 0.0;

  // f(a) = premium*exp(-eta*premium*(a+theta)) - a is strictly decreasing with
  // f(0) > 0; any a above premium*exp(-eta*premium*theta) makes f negative, so
  // that value plus 1 brackets the unique root.
  double hi = premium * std::exp(-eta * premium * belief_theta) + 1.0;
  if (!std::isfinite(hi))
    throw std::domain_error("belief too extreme for best_response");
  double lo = 0.0;
  int iter = 0;
  while (hi - lo > kRootTol) {
    if (++iter > kMaxIter)
      throw std::logic_error("best_response bisection did not converge");
    double mid = 0.5 * (lo + hi);
    double f = premium * std::exp(-eta * premium * (mid + belief_theta)) - mid;
    if (f > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> premium_for_effort(double target_effort, double belief_theta,
                                         double eta) {
  if (!(target_effort > 0.0))
    throw std::domain_error("target effort must be > 0");
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");

  // best_response(rho) >= target iff g(rho) := rho*exp(-eta*rho*(target+theta))
  // >= target, because a |-> rho*exp(-eta*rho*(a+theta)) - a is decreasing and
  // zero exactly at the best response. That turns the inversion into a single
  // un-nested bisection on rho. g has one peak, so whenever g(1) >= target the
  // crossing from below is unique and is the smallest premium inciting target.
  const double c = eta * (target_effort + belief_theta);
  auto g = [c](double rho) { return rho * std::exp(-c * rho); };

  // The 1e-9 slack keeps targets sitting numerically on the frontier (say,
  // a previously computed best_response(1)) feasible instead of flickering.
  if (g(1.0) < target_effort - 1e-9) return std::nullopt;

  double lo = 0.0, hi = 1.0;
  int iter = 0;
  while (hi - lo > kRootTol) {
    if (++iter > kMaxIter)
      throw std::logic_error("premium bisection did not converge");
    double mid = 0.5 * (lo + hi);
    if (g(mid) >= target_effort)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<ActionBounds> action_bounds(double belief_theta, double eta,
                                          double reservation_utility) {
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");

  const double upper = best_response(1.0, belief_theta, eta);

  // W(rho) := utility of the best-responding agent along the frontier.
  // W(0+) = 0 and, by the envelope theorem, dW/drho has the sign of
  // a(rho) + theta. For theta >= 0, W increases on all of (0,1]. For
  // theta < 0 it falls to a single dip at rho = -theta (where a(rho) = -theta)
  // and rises afterwards. Participation for efforts near 0 therefore holds
  // exactly when the reservation level sits below W(0+) = 0.
  if (reservation_utility < 0.0 || (reservation_utility == 0.0 && belief_theta >= 0.0))
    return ActionBounds{0.0, upper};

  // Remaining cases start below the reservation level near rho = 0, so
  // feasibility is decided at rho = 1, the maximum of W over the candidates.
  const double w_at_one = frontier_utility(1.0, upper, eta);
  if (w_at_one < reservation_utility) return std::nullopt;

  // Bracket the crossing: infeasible at lo (the dip for negative beliefs,
  // rho ~ 0 otherwise), feasible at 1.
  double lo = (belief_theta < 0.0) ? std::min(-belief_theta, 1.0) : 0.0;
  double hi = 1.0;
  int iter = 0;
  while (hi - lo > kRootTol) {
    if (++iter > kMaxIter)
      throw std::logic_error("participation bisection did not converge");
    double mid = 0.5 * (lo + hi);
    double a_mid = best_response(mid, belief_theta, eta);
    if (frontier_utility(mid, a_mid, eta) >= reservation_utility)
      hi = mid;
    else
      lo = mid;
  }
  // hi is on the feasible side of the crossing; map it back to effort space.
  double lower = best_response(hi, belief_theta, eta);
  if (lower > upper) lower = upper;  // only reachable far outside the model's domain
  return ActionBounds{lower, upper};
}

Benchmark solve_second_best(double eta) {
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");

  auto objective = [eta](double rho) {
    if (rho <= 0.0) return 0.0;
    double a = best_response(rho, 0.0, eta);
    // Participation never binds at theta = 0 (W >= 0 on the whole frontier);
    // the guard keeps the solver honest anyway.
    if (frontier_utility(rho, a, eta) < 0.0)
      return -std::numeric_limits<double>::infinity();
    return (1.0 - rho) * a;
  };

  // Coarse grid localizes the peak, golden-section refines it.
  const int kGrid = 1000;
  int best_i = 0;
  double best_v = objective(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    double v = objective(static_cast<double>(i) / kGrid);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double lo = std::max(0.0, static_cast<double>(best_i - 1) / kGrid);
  double hi = std::min(1.0, static_cast<double>(best_i + 1) / kGrid);

  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  int iter = 0;
  while (hi - lo > kRootTol) {
    if (++iter > kMaxIter)
      throw std::logic_error("benchmark refinement did not converge");
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(x1);
    }
  }

  // The inner best-response bisection makes the objective flat at the 1e-10
  // scale, so golden section can stall a few 1e-6 from the peak. On the
  // frontier the stationarity condition reduces to 1 - 2*rho - eta*rho*a = 0,
  // whose residual is linear in the inner error; one more bisection on it
  // pins the optimum. Falls back to the golden-section answer if the peak
  // sits against a boundary.
  auto stationarity = [eta](double rho) {
    return 1.0 - 2.0 * rho - eta * rho * best_response(rho, 0.0, eta);
  };
  double plo = std::max(lo - 1e-4, 1.0 / kGrid);
  double phi = std::min(hi + 1e-4, 1.0);
  if (stationarity(plo) > 0.0 && stationarity(phi) < 0.0) {
    while (phi - plo > kRootTol) {
      double mid = 0.5 * (plo + phi);
      if (stationarity(mid) > 0.0)
        plo = mid;
      else
        phi = mid;
    }
    lo = plo;
    hi = phi;
  }

  Benchmark b;
  b.premium_star = 0.5 * (lo + hi);
  b.effort_star = best_response(b.premium_star, 0.0, eta);
  b.outcome_star = b.effort_star;  // evaluated at theta = mu = 0
  b.utility_principal_star = (1.0 - b.premium_star) * b.outcome_star;
  b.utility_agent_star =
      agent_utility(b.premium_star * b.outcome_star, b.effort_star, eta);
  return b;
}

}  // namespace hal
