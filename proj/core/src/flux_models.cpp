#include "hyperctl/flux_models.hpp"

#include "hyperctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hyperctl {

namespace {


std::string describe(const State& u) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (k) s += ", ";
    s += fmt_num(u[k]);
  }
  return s + ")";
}

// Sort eigenpairs by eigenvalue and build the dual basis.
EigenStructure assemble(const Vector& values, const Matrix& vectors) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return values[x] < values[y]; });
  EigenStructure e;
  e.values.resize(n);
  e.right.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    e.values[k] = values[order[static_cast<std::size_t>(k)]];
    e.right.col(k) = vectors.col(order[static_cast<std::size_t>(k)]).normalized();
  }
  return e;
}

void orient_first_component(EigenStructure& e) {
  for (Eigen::Index i = 0; i < e.right.cols(); ++i) {
    for (Eigen::Index k = 0; k < e.right.rows(); ++k) {
      if (std::abs(e.right(k, i)) > 1e-14) {
        if (e.right(k, i) < 0.0) e.right.col(i) *= -1.0;
        break;
      }
    }
  }
}

void check_distinct(const Vector& values, const State& u) {
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (values[k] - values[k - 1] <= 1e-12 * scale) {
      throw HyperbolicityError("coincident eigenvalues at " + describe(u));
    }
  }
}

EigenStructure real_eigen(const Matrix& jac, const State& u) {
  Eigen::EigenSolver<Matrix> solver(jac);
  if (solver.info() != Eigen::Success) throw HyperbolicityError("eigensolver failed at " + describe(u));
  const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
  const auto& values = solver.eigenvalues();
  if (values.imag().cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw HyperbolicityError("complex eigenvalues at " + describe(u));
  }
  EigenStructure e = assemble(values.real(), solver.eigenvectors().real());
  check_distinct(e.values, u);
  return e;
}

}  // namespace

FluxModel FluxModel::linear(const Matrix& a, State u_star) {
  if (a.rows() != a.cols() || a.rows() < 1) throw ContractViolation("linear model needs a square matrix");
  if (u_star.size() != a.rows()) throw ContractViolation("reference state has the wrong size");
  auto impl = std::make_shared<Impl>();
  impl->kind = ModelKind::linear;
  impl->name = "linear";
  impl->n = static_cast<int>(a.rows());
  impl->a = a;
  impl->u_star = std::move(u_star);
  EigenStructure e = real_eigen(a, impl->u_star);
  orient_first_component(e);
  e.left = e.right.inverse();
  impl->constant_eigen = std::move(e);
  impl->fields.assign(static_cast<std::size_t>(impl->n), FieldKind::linearly_degenerate);
  impl->curve_radius = std::numeric_limits<double>::infinity();
  finish(*impl);
  return FluxModel(std::move(impl));
}

FluxModel FluxModel::gas(double k, double gamma, State u_star) {
  if (!(k > 0.0)) throw ContractViolation("gas model needs K > 0");
  if (!(gamma > 1.0 && gamma < 3.0)) throw ContractViolation("gas model needs 1 < gamma < 3");
  if (u_star.size() != 2 || !(u_star[0] > 0.0)) {
    throw ContractViolation("gas reference state must be (rho > 0, u)");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = ModelKind::gas;
  impl->name = "gas";
  impl->n = 2;
  impl->gas_k = k;
  impl->gas_gamma = gamma;
  impl->u_star = std::move(u_star);
  impl->fields.assign(2, FieldKind::genuinely_nonlinear);
  const double c = k * std::pow(impl->u_star[0], 0.5 * (gamma - 1.0));
  impl->w_star = Vector(2);
  impl->w_star << impl->u_star[1] - 2.0 * c / (gamma - 1.0), impl->u_star[1] + 2.0 * c / (gamma - 1.0);
  finish(*impl);
  return FluxModel(std::move(impl));
}

FluxModel FluxModel::quadratic_table(Vector constant, Matrix linear, std::vector<Matrix> quadratic,
                                     State u_star) {
  const auto n = constant.size();
  if (linear.rows() != n || linear.cols() != n || static_cast<Eigen::Index>(quadratic.size()) != n ||
      u_star.size() != n) {
    throw ContractViolation("quadratic table: inconsistent sizes");
  }
  for (auto& h : quadratic) {
    if (h.rows() != n || h.cols() != n) throw ContractViolation("quadratic table: H_k must be n x n");
    h = 0.5 * (h + h.transpose()).eval();
  }
  FluxFn flux = [constant, linear, quadratic](const State& u) {
    Vector f = constant + linear * u;
    for (std::size_t k = 0; k < quadratic.size(); ++k) {
      f[static_cast<Eigen::Index>(k)] += 0.5 * u.dot(quadratic[k] * u);
    }
    return f;
  };
  JacobianFn jacobian = [linear, quadratic](const State& u) {
    Matrix j = linear;
    for (std::size_t k = 0; k < quadratic.size(); ++k) {
      j.row(static_cast<Eigen::Index>(k)) += (quadratic[k] * u).transpose();
    }
    return j;
  };
  FluxModel model = custom(static_cast<int>(n), std::move(flux), std::move(u_star), std::move(jacobian));
  auto impl = std::make_shared<Impl>(*model.impl_);
  impl->name = "custom-table";
  return FluxModel(std::move(impl));
}

FluxModel FluxModel::custom(int n, FluxFn flux, State u_star, std::optional<JacobianFn> jacobian,
                            std::optional<Box> domain) {
  if (n < 1 || u_star.size() != n) throw ContractViolation("custom model: inconsistent sizes");
  auto impl = std::make_shared<Impl>();
  impl->kind = ModelKind::custom;
  impl->name = "custom";
  impl->n = n;
  impl->flux = std::move(flux);
  impl->jacobian = std::move(jacobian);
  impl->u_star = std::move(u_star);
  if (domain) impl->domain = *domain;
  impl->fields.assign(static_cast<std::size_t>(n), FieldKind::genuinely_nonlinear);
  finish(*impl);
  // Classify fields at the reference state with the GNL orientation disabled.
  FluxModel probe(impl);
  auto classified = std::make_shared<Impl>(*impl);
  for (int i = 0; i < n; ++i) {
    const double g = std::abs(gnl_coefficient(probe, classified->u_star, i));
    classified->fields[static_cast<std::size_t>(i)] =
        g > 1e-8 ? FieldKind::genuinely_nonlinear : FieldKind::linearly_degenerate;
  }
  return FluxModel(std::move(classified));
}

void FluxModel::finish(Impl& impl) {
  FluxModel view(std::shared_ptr<const Impl>(&impl, [](const Impl*) {}));
  view.require_admissible(impl.u_star);
  const Vector values = view.eigenvalues(impl.u_star);
  impl.p = static_cast<int>((values.array() < 0.0).count());
}

FluxModel FluxModel::with_curve_radius(double radius) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->curve_radius = radius;
  return FluxModel(std::move(impl));
}

bool FluxModel::admissible(const State& u) const {
  if (u.size() != impl_->n || !u.allFinite()) return false;
  switch (impl_->kind) {
    case ModelKind::gas:
      return u[0] > 0.0;
    case ModelKind::linear:
      return true;
    case ModelKind::custom:
      return impl_->domain.lower.size() == 0 || impl_->domain.contains(u);
  }
  return false;
}

void FluxModel::require_admissible(const State& u) const {
  if (!admissible(u)) throw DomainError("state " + describe(u) + " outside the domain of the " + name() + " model");
}

Vector FluxModel::flux(const State& u) const {
  require_admissible(u);
  switch (impl_->kind) {
    case ModelKind::linear:
      return impl_->a * u;
    case ModelKind::gas: {
      const double g = impl_->gas_gamma;
      const double k = impl_->gas_k;
      Vector f(2);
      f << u[0] * u[1], 0.5 * u[1] * u[1] + k * k * std::pow(u[0], g - 1.0) / (g - 1.0);
      return f;
    }
    case ModelKind::custom:
      return impl_->flux(u);
  }
  return {};
}

Matrix FluxModel::jacobian(const State& u) const {
  require_admissible(u);
  switch (impl_->kind) {
    case ModelKind::linear:
      return impl_->a;
    case ModelKind::gas: {
      const double g = impl_->gas_gamma;
      const double k = impl_->gas_k;
      Matrix j(2, 2);
      j << u[1], u[0], k * k * std::pow(u[0], g - 2.0), u[1];
      return j;
    }
    case ModelKind::custom:
      break;
  }
  if (impl_->jacobian) return (*impl_->jacobian)(u);
  const auto n = u.size();
  Matrix j(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double h = jacobian_fd_step * std::max(1.0, std::abs(u[c]));
    State up = u;
    State um = u;
    up[c] += h;
    um[c] -= h;
    j.col(c) = (impl_->flux(up) - impl_->flux(um)) / (2.0 * h);
  }
  return j;
}

EigenStructure FluxModel::eigen(const State& u) const {
  require_admissible(u);
  switch (impl_->kind) {
    case ModelKind::linear:
      return impl_->constant_eigen;
    case ModelKind::gas: {
      const double g = impl_->gas_gamma;
      const double c = impl_->gas_k * std::pow(u[0], 0.5 * (g - 1.0));
      EigenStructure e;
      e.values.resize(2);
      e.values << u[1] - c, u[1] + c;
      e.right.resize(2, 2);
      e.right << -u[0] / (2.0 * c), u[0] / (2.0 * c), 0.5, 0.5;
      e.left.resize(2, 2);
      e.left << -c / u[0], 1.0, c / u[0], 1.0;
      return e;
    }
    case ModelKind::custom:
      return numeric_eigen(u);
  }
  return {};
}

Vector FluxModel::eigenvalues(const State& u) const {
  require_admissible(u);
  switch (impl_->kind) {
    case ModelKind::linear:
      return impl_->constant_eigen.values;
    case ModelKind::gas: {
      const double c = impl_->gas_k * std::pow(u[0], 0.5 * (impl_->gas_gamma - 1.0));
      Vector v(2);
      v << u[1] - c, u[1] + c;
      return v;
    }
    case ModelKind::custom:
      break;
  }
  return real_eigen(jacobian(u), u).values;
}

EigenStructure FluxModel::numeric_eigen(const State& u) const {
  EigenStructure e = real_eigen(jacobian(u), u);
  orient_first_component(e);
  const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  const double h = jacobian_fd_step * scale;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (impl_->fields[static_cast<std::size_t>(i)] != FieldKind::genuinely_nonlinear) continue;
    const Vector r = e.right.col(i);
    double g = 0.0;
    try {
      g = (eigenvalues(u + h * r)[i] - eigenvalues(u - h * r)[i]) / (2.0 * h);
    } catch (const Error&) {
      continue;
    }
    if (g < 0.0) e.right.col(i) *= -1.0;
  }
  e.left = e.right.inverse();
  return e;
}

Vector FluxModel::to_riemann(const State& u) const {
  require_admissible(u);
  switch (impl_->kind) {
    case ModelKind::linear:
      return impl_->constant_eigen.left * (u - impl_->u_star);
    case ModelKind::gas: {
      const double g = impl_->gas_gamma;
      const double z = 2.0 * impl_->gas_k * std::pow(u[0], 0.5 * (g - 1.0)) / (g - 1.0);
      Vector w(2);
      w << u[1] - z, u[1] + z;
      return w - impl_->w_star;
    }
    case ModelKind::custom:
      break;
  }
  throw ContractViolation("model '" + name() + "' has no Riemann coordinates");
}

State FluxModel::from_riemann(const Vector& w) const {
  switch (impl_->kind) {
    case ModelKind::linear:
      return impl_->u_star + impl_->constant_eigen.right * w;
    case ModelKind::gas: {
      const double g = impl_->gas_gamma;
      const Vector z = w + impl_->w_star;
      const double c = 0.25 * (g - 1.0) * (z[1] - z[0]);
      if (!(c > 0.0) || !z.allFinite()) {
        throw DomainError("Riemann coordinates (" + fmt_num(w[0]) + ", " + fmt_num(w[1]) +
                          ") outside the chart");
      }
      State u(2);
      u << std::pow(c / impl_->gas_k, 2.0 / (g - 1.0)), 0.5 * (z[0] + z[1]);
      return u;
    }
    case ModelKind::custom:
      break;
  }
  throw ContractViolation("model '" + name() + "' has no Riemann coordinates");
}

RiemannCoordinates riemann_coordinates(const FluxModel& model, const State& u) {
  if (model.size() != 2) throw ContractViolation("Riemann coordinates are provided for 2x2 models");
  const Vector w = model.to_riemann(u);
  return {w[0], w[1]};
}

State riemann_coordinates_inverse(const FluxModel& model, const RiemannCoordinates& w) {
  if (model.size() != 2) throw ContractViolation("Riemann coordinates are provided for 2x2 models");
  Vector v(2);
  v << w.w1, w.w2;
  return model.from_riemann(v);
}

double gnl_coefficient(const FluxModel& model, const State& u, int i, double h) {
  const Vector r = model.eigen(u).r(i);
  return (model.eigenvalues(u + h * r)[i] - model.eigenvalues(u - h * r)[i]) / (2.0 * h);
}

Vector eigenvector_derivative(const FluxModel& model, const State& u, int i, double h) {
  const Vector r = model.eigen(u).r(i);
  return (model.eigen(u + h * r).r(i) - model.eigen(u - h * r).r(i)) / (2.0 * h);
}

HypothesisReport verify_hypotheses(const FluxModel& model, const Box& box, const HypothesisOptions& options) {
  HypothesisReport report;
  const int n = model.size();
  const int p = model.negative_families();
  report.p = p;
  const bool two = n == 2;
  report.hyperbolic.applicable = true;
  report.sign_split.applicable = true;
  report.speed_floor.applicable = true;
  report.speed_bounds.applicable = two;
  report.genuine_nonlinearity.applicable = two;
  report.wedge.applicable = two;

  const double inf = std::numeric_limits<double>::infinity();
  double gap = inf;
  double split = inf;
  double bounds = inf;
  double gnl = inf;
  double wedges = inf;
  double lo = inf;
  double hi = 0.0;
  std::vector<int> sign(static_cast<std::size_t>(n), 0);
  bool sign_flip = false;
  bool hyperbolic = true;

  for (const State& u : box.grid(options.grid_per_axis)) {
    ++report.samples;
    bool bad = false;
    EigenStructure e;
    try {
      e = model.eigen(u);
    } catch (const Error&) {
      hyperbolic = false;
      report.violations.push_back(u);
      continue;
    }
    for (int i = 1; i < n; ++i) gap = std::min(gap, e.values[i] - e.values[i - 1]);
    const Matrix jac = model.jacobian(u);
    report.biorthonormality_residual = std::max(
        report.biorthonormality_residual, (e.left * e.right - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
      const Vector r = e.r(i);
      report.eigen_residual =
          std::max(report.eigen_residual, (jac * r - e.values[i] * r).norm() / std::max(r.norm(), 1e-300));
      const double lam = e.values[i];
      const double margin = i < p ? -lam : lam;
      split = std::min(split, margin);
      if (margin <= 0.0) bad = true;
      const int s = lam > 0.0 ? 1 : (lam < 0.0 ? -1 : 0);
      auto& seen = sign[static_cast<std::size_t>(i)];
      if (s == 0 || (seen != 0 && seen != s)) sign_flip = true;
      if (seen == 0) seen = s;
      lo = std::min(lo, std::abs(lam));
      hi = std::max(hi, std::abs(lam));
    }
    if (two) {
      bounds = std::min({bounds, -e.values[0], e.values[1]});
      const Vector r1 = e.r(0);
      const Vector r2 = e.r(1);
      double g = inf;
      double wdg = -wedge(r1, r2);
      try {
        for (int i = 0; i < 2; ++i) {
          g = std::min(g, gnl_coefficient(model, u, i, options.fd_step));
          wdg = std::min(wdg, -wedge(e.r(i), eigenvector_derivative(model, u, i, options.fd_step)));
        }
      } catch (const Error&) {
        g = -inf;
      }
      gnl = std::min(gnl, g);
      wedges = std::min(wedges, wdg);
      if (!(g > 0.0) || !(wdg > 0.0) || e.values[0] >= 0.0 || e.values[1] <= 0.0) bad = true;
    }
    if (bad && report.violations.size() < 64) report.violations.push_back(u);
  }

  report.hyperbolic.margin = gap;
  report.hyperbolic.passed = hyperbolic && gap > 0.0 && report.biorthonormality_residual < 1e-10;
  report.sign_split.margin = split;
  report.sign_split.passed = hyperbolic && split > 0.0;
  report.c0 = lo;
  report.lambda_lower = lo;
  report.lambda_upper = hi;
  report.speed_floor.margin = lo;
  report.speed_floor.passed = hyperbolic && !sign_flip && lo >= options.speed_floor;
  if (two) {
    report.speed_bounds.margin = bounds;
    report.speed_bounds.passed = hyperbolic && bounds > 0.0;
    report.genuine_nonlinearity.margin = gnl;
    report.genuine_nonlinearity.passed = hyperbolic && gnl > 0.0;
    report.wedge.margin = wedges;
    report.wedge.passed = hyperbolic && wedges > 0.0;
  }
  return report;
}

}  // namespace hyperctl
