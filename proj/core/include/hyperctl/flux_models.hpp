#pragma once

#include "hyperctl/state.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hyperctl {

enum class ModelKind { linear, gas, custom };

enum class FieldKind { genuinely_nonlinear, linearly_degenerate };

/// Eigenvalues in increasing order with right eigenvectors as columns of
/// `right` and left eigenvectors as rows of `left`, normalised so that
/// left * right = I.
struct EigenStructure {
  Vector values;
  Matrix right;
  Matrix left;

  Vector r(int i) const { return right.col(i); }
  Vector l(int i) const { return left.row(i).transpose(); }
};

/// A system u_t + f(u)_x = 0 together with its eigenstructure.
///
/// Immutable after construction; all member functions are const and
/// thread-safe. Families are indexed from 0 in the API (family 0 is the
/// slowest), although reports and file formats print them 1-based.
class FluxModel {
 public:
  using FluxFn = std::function<Vector(const State&)>;
  using JacobianFn = std::function<Matrix(const State&)>;

  /// f(u) = A u. The eigenstructure is computed once; Riemann coordinates
  /// are w = L (u - u_star).
  static FluxModel linear(const Matrix& a, State u_star);

  /// Isentropic gas in (density, velocity) variables:
  /// f = (rho u, u^2/2 + K^2 rho^(gamma-1) / (gamma-1)), 1 < gamma < 3.
  static FluxModel gas(double k, double gamma, State u_star);

  /// Quadratic flux f_k(u) = c_k + sum_j A_kj u_j + 1/2 sum_jl H_kjl u_j u_l,
  /// given as a coefficient table. `quadratic[k]` is the symmetric matrix H_k.
  static FluxModel quadratic_table(Vector constant, Matrix linear, std::vector<Matrix> quadratic,
                                   State u_star);

  /// User flux with numeric eigenstructure. Without a Jacobian callback the
  /// Jacobian is approximated by central differences.
  static FluxModel custom(int n, FluxFn flux, State u_star, std::optional<JacobianFn> jacobian = {},
                          std::optional<Box> domain = {});

  ModelKind kind() const { return impl_->kind; }
  const std::string& name() const { return impl_->name; }
  int size() const { return impl_->n; }
  /// Number of families with negative speed at the reference state.
  int negative_families() const { return impl_->p; }
  const State& reference_state() const { return impl_->u_star; }
  FieldKind field_kind(int i) const { return impl_->fields[static_cast<std::size_t>(i)]; }

  /// Maximum |sigma| accepted by the wave-curve operations.
  double curve_radius() const { return impl_->curve_radius; }
  FluxModel with_curve_radius(double radius) const;

  /// Gas-model parameters; NaN for other kinds.
  double gas_k() const { return impl_->gas_k; }
  double gas_gamma() const { return impl_->gas_gamma; }
  const Matrix& linear_matrix() const { return impl_->a; }

  /// True when `u` lies in the physical domain.
  bool admissible(const State& u) const;
  /// Throws DomainError if `u` is not admissible.
  void require_admissible(const State& u) const;

  Vector flux(const State& u) const;
  Matrix jacobian(const State& u) const;

  /// Sorted eigenvalues with oriented, biorthonormal eigenvectors.
  /// Throws HyperbolicityError on complex or coincident eigenvalues.
  EigenStructure eigen(const State& u) const;
  Vector eigenvalues(const State& u) const;

  bool has_riemann_chart() const { return impl_->kind != ModelKind::custom; }
  /// Riemann coordinates anchored at the reference state (w(u_star) = 0).
  Vector to_riemann(const State& u) const;
  State from_riemann(const Vector& w) const;

  /// Default finite-difference step used for Jacobians of user fluxes.
  static constexpr double jacobian_fd_step = 1e-6;

 private:
  struct Impl {
    ModelKind kind = ModelKind::custom;
    std::string name;
    int n = 0;
    int p = 0;
    State u_star;
    std::vector<FieldKind> fields;
    double curve_radius = 0.5;
    Box domain;
    // linear
    Matrix a;
    EigenStructure constant_eigen;
    // gas
    double gas_k = 0.0;
    double gas_gamma = 0.0;
    Vector w_star;
    // quadratic table / custom
    FluxFn flux;
    std::optional<JacobianFn> jacobian;
  };

  explicit FluxModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static void finish(Impl& impl);

  EigenStructure numeric_eigen(const State& u) const;

  std::shared_ptr<const Impl> impl_;
};

struct RiemannCoordinates {
  double w1 = 0.0;
  double w2 = 0.0;
};

/// Riemann coordinates of a 2x2 model; throws ContractViolation for models
/// without a chart and DomainError outside the chart.
RiemannCoordinates riemann_coordinates(const FluxModel& model, const State& u);
State riemann_coordinates_inverse(const FluxModel& model, const RiemannCoordinates& w);

struct HypothesisCheck {
  bool applicable = false;
  bool passed = false;
  /// Worst value over the grid of the quantity required to be positive.
  double margin = 0.0;
};

/// Sampled verification of the standing hypotheses.
struct HypothesisReport {
  HypothesisCheck hyperbolic;     ///< real, distinct eigenvalues; biorthonormal bases
  HypothesisCheck sign_split;     ///< lambda_i < 0 for i < p, > 0 otherwise
  HypothesisCheck speed_floor;    ///< |lambda_i| >= c0 with a fixed sign per family
  HypothesisCheck speed_bounds;   ///< 2x2: -lambda^* < lambda_1 < -lambda_* < 0 < lambda_* < lambda_2 < lambda^*
  HypothesisCheck genuine_nonlinearity;  ///< 2x2: D lambda_i . r_i > 0
  HypothesisCheck wedge;          ///< 2x2: r1^r2 < 0, r_i ^ (Dr_i r_i) < 0
  int p = 0;
  double c0 = 0.0;            ///< min |lambda_i| over the grid
  double lambda_lower = 0.0;  ///< lambda_*: min |lambda|
  double lambda_upper = 0.0;  ///< lambda^*: max |lambda|
  double biorthonormality_residual = 0.0;
  double eigen_residual = 0.0;
  std::size_t samples = 0;
  std::vector<State> violations;

  /// Standing hypotheses needed by the boundary-control constructions.
  bool admits_control() const { return hyperbolic.passed && sign_split.passed && speed_floor.passed; }
  /// The stronger structural assumptions for the 2x2 decay/counterexample analysis.
  bool admits_analysis() const {
    return admits_control() && speed_bounds.passed && genuine_nonlinearity.passed && wedge.passed;
  }
};

struct HypothesisOptions {
  int grid_per_axis = 32;
  double speed_floor = 1e-9;
  double fd_step = 1e-5;
};

HypothesisReport verify_hypotheses(const FluxModel& model, const Box& box,
                                   const HypothesisOptions& options = {});

/// D lambda_i . r_i by central differences.
double gnl_coefficient(const FluxModel& model, const State& u, int i, double h = 1e-5);
/// (D r_i) r_i by central differences.
Vector eigenvector_derivative(const FluxModel& model, const State& u, int i, double h = 1e-5);

inline double wedge(const Vector& x, const Vector& y) { return x[0] * y[1] - x[1] * y[0]; }

}  // namespace hyperctl
