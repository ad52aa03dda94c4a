#include "hyperctl/newton.hpp"

#include "hyperctl/errors.hpp"

#include <cmath>
#include <string>

namespace hyperctl {

namespace {

bool try_eval(const std::function<Vector(const Vector&)>& residual, const Vector& x, Vector& out) {
  try {
    out = residual(x);
  } catch (const DomainError&) {
    return false;
  } catch (const DivergenceError&) {
    return false;
  }
  return out.allFinite();
}

}  // namespace

NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual, Vector x0,
                          const NewtonOptions& options) {
  Vector x = std::move(x0);
  Vector fx = residual(x);
  double norm = fx.norm();
  const auto m = x.size();

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    if (norm < options.residual_tolerance) return {x, norm, iter};
    if (iter == options.max_iterations) break;

    Matrix jac(fx.size(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      Vector xp = x;
      const double h = options.fd_step * std::max(1.0, std::abs(x[j]));
      xp[j] += h;
      Vector fp;
      if (!try_eval(residual, xp, fp)) {
        xp[j] = x[j] - h;
        if (!try_eval(residual, xp, fp)) throw DivergenceError("newton: residual undefined near iterate");
        jac.col(j) = (fx - fp) / h;
      } else {
        jac.col(j) = (fp - fx) / h;
      }
    }

    const Vector step = jac.colPivHouseholderQr().solve(-fx);
    if (!step.allFinite()) throw DivergenceError("newton: singular Jacobian");

    double lambda = 1.0;
    bool accepted = false;
    Vector trial;
    Vector ftrial;
    for (int k = 0; k <= options.max_backtracks; ++k) {
      trial = x + lambda * step;
      if (try_eval(residual, trial, ftrial) && ftrial.norm() < (1.0 - 1e-4 * lambda) * norm) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (step.norm() < options.step_tolerance * std::max(1.0, x.norm()) ||
          norm < 50.0 * options.residual_tolerance) {
        return {x, norm, iter};
      }
      throw DivergenceError("newton: line search failed at residual " + fmt_num(norm));
    }
    const double step_norm = (trial - x).norm();
    x = trial;
    fx = ftrial;
    norm = fx.norm();
    if (step_norm < options.step_tolerance * std::max(1.0, x.norm())) return {x, norm, iter + 1};
  }
  throw DivergenceError("newton: no convergence after " + std::to_string(options.max_iterations) +
                        " iterations (residual " + fmt_num(norm) + ")");
}

}  // namespace hyperctl
