#include "fairfront/epsfair.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "parallel.hpp"

namespace fairfront {

namespace {

using Eigen::Index;

// f1 over the whole dataset with its gradient and Hessian in packed (c, b)
// coordinates.
struct LogisticProblem {
  const Dataset& data;
  double lambda;

  Index dim() const { return static_cast<Index>(data.feature_dim()) + 1; }

  Vector margins(const Vector& x) const {
    const Index d = dim() - 1;
    return data.features() * x.head(d) + Vector::Constant(static_cast<Index>(data.size()), x[d]);
  }

  double value(const Vector& x) const {
    const Vector m = margins(x);
    const Vector& y = data.labels();
    double s = 0.0;
    for (Index j = 0; j < m.size(); ++j) s += softplus(-y[j] * m[j]);
    return s / static_cast<double>(m.size()) + 0.5 * lambda * x.head(dim() - 1).squaredNorm();
  }

  // Returns the value; fills grad and (optionally) the Hessian.
  double eval(const Vector& x, Vector& grad, Eigen::MatrixXd* hess) const {
    const Index d = dim() - 1;
    const Vector m = margins(x);
    const Vector& y = data.labels();
    const double inv_n = 1.0 / static_cast<double>(m.size());
    Vector coef(m.size());
    Vector curv(m.size());
    double s = 0.0;
    for (Index j = 0; j < m.size(); ++j) {
      const double t = -y[j] * m[j];
      s += softplus(t);
      const double p = sigmoid(t);
      coef[j] = -y[j] * p * inv_n;
      curv[j] = p * (1.0 - p) * inv_n;
    }
    grad.resize(dim());
    grad.head(d) = data.features().transpose() * coef + lambda * x.head(d);
    grad[d] = coef.sum();
    if (hess) {
      hess->setZero(dim(), dim());
      const auto& Z = data.features();
      hess->topLeftCorner(d, d) = Z.transpose() * curv.asDiagonal() * Z;
      const Vector zc = Z.transpose() * curv;
      hess->topRightCorner(d, 1) = zc;
      hess->bottomLeftCorner(1, d) = zc.transpose();
      (*hess)(d, d) = curv.sum();
      hess->topLeftCorner(d, d).diagonal().array() += lambda;
    }
    return s * inv_n + 0.5 * lambda * x.head(d).squaredNorm();
  }
};

// Covariance cov(x) = u . x for each constrained category.
std::vector<Vector> constraint_rows(const Dataset& data, std::size_t attribute) {
  const auto& attr = data.attributes().at(attribute);
  std::vector<std::size_t> cats;
  if (attr.cardinality() == 2) {
    cats = {1};
  } else {
    for (std::size_t k = 0; k < attr.cardinality(); ++k) cats.push_back(k);
  }
  const Index d = static_cast<Index>(data.feature_dim());
  const double inv_n = 1.0 / static_cast<double>(data.size());
  std::vector<Vector> rows;
  for (auto k : cats) {
    const Vector centered = data.indicator(attribute, k).array() - data.indicator_mean(attribute, k);
    Vector u(d + 1);
    u.head(d) = data.features().transpose() * centered * inv_n;
    u[d] = centered.sum() * inv_n;
    rows.push_back(std::move(u));
  }
  return rows;
}

// Damped Newton on a smooth convex function given by `eval`. Stops when the
// gradient norm drops to `tol`.
template <class Eval>
Vector newton(Eval&& eval, Vector x, double tol, std::size_t max_iter, std::size_t& iters, double& grad_norm) {
  Vector g;
  Eigen::MatrixXd H;
  double fx = eval(x, g, &H);
  grad_norm = g.norm();
  for (iters = 0; iters < max_iter && grad_norm > tol; ++iters) {
    // Tiny ridge keeps LDLT usable when the data do not pin down every direction.
    H.diagonal().array() += 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
    Vector step = -H.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;
    double t = 1.0;
    Vector gn;
    double fn = 0.0;
    const double slope = step.dot(g);
    for (int ls = 0; ls < 60; ++ls) {
      const Vector xn = x + t * step;
      fn = eval(xn, gn, nullptr);
      if (fn <= fx + 1e-4 * t * slope || std::abs(fn - fx) <= 1e-15 * std::abs(fx)) break;
      t *= 0.5;
    }
    x += t * step;
    fx = eval(x, g, &H);
    grad_norm = g.norm();
  }
  return x;
}

}  // namespace

void EpsSweepConfig::validate() const {
  if (n_thresholds < 2) throw ConfigError("epsfair: n_thresholds must be >= 2");
  if (!(stationarity_tolerance > 0.0) || !(feasibility_tolerance > 0.0)) {
    throw ConfigError("epsfair: tolerances must be positive");
  }
  if (lambda_reg < 0.0) throw ConfigError("epsfair: lambda_reg must be >= 0");
  if (max_outer_iterations < 1 || max_newton_iterations < 1) throw ConfigError("epsfair: iteration caps must be >= 1");
  if (!(penalty_initial > 0.0) || !(penalty_growth > 1.0)) {
    throw ConfigError("epsfair: penalty_initial must be > 0 and penalty_growth > 1");
  }
  if (chains < 1) throw ConfigError("epsfair: chains must be >= 1");
}

double epsilon_upper_bound(const Dataset& data, std::size_t attribute, double lambda_reg, LinearModel* minimizer) {
  if (data.empty()) throw DataError("epsilon_upper_bound: empty dataset");
  LogisticProblem prob{data, lambda_reg};
  std::size_t iters = 0;
  double gnorm = 0.0;
  const Vector x = newton([&](const Vector& v, Vector& g, Eigen::MatrixXd* h) { return prob.eval(v, g, h); },
                          Vector::Zero(prob.dim()), 1e-6, 500, iters, gnorm);
  if (!(gnorm <= 1e-6)) {
    std::ostringstream msg;
    msg << "epsilon_upper_bound: unconstrained solve did not converge (gradient norm " << gnorm << ")";
    throw NumericalError(msg.str());
  }
  if (minimizer) *minimizer = LinearModel::from_params(x);
  double bound = 0.0;
  for (const auto& u : constraint_rows(data, attribute)) bound = std::max(bound, std::abs(u.dot(x)));
  return bound;
}

ConstrainedSolution solve_constrained(const Dataset& data, std::size_t attribute, double epsilon,
                                      const EpsSweepConfig& cfg, const std::optional<LinearModel>& warm_start) {
  if (!(epsilon >= 0.0)) throw ConfigError("solve_constrained: epsilon must be >= 0");
  if (data.empty()) throw DataError("solve_constrained: empty dataset");
  LogisticProblem prob{data, cfg.lambda_reg};
  const auto rows = constraint_rows(data, attribute);
  const std::size_t nc = rows.size();
  // Constraint 2k is u_k.x <= eps, 2k+1 is -u_k.x <= eps.
  std::vector<double> mu(2 * nc, 0.0);
  double rho = cfg.penalty_initial;

  Vector x = warm_start ? warm_start->params() : Vector::Zero(prob.dim());
  if (x.size() != prob.dim()) throw ConfigError("solve_constrained: warm start has the wrong dimension");

  auto violation = [&](const Vector& v) {
    double worst = 0.0;
    for (const auto& u : rows) worst = std::max(worst, std::abs(u.dot(v)) - epsilon);
    return std::max(worst, 0.0);
  };

  ConstrainedSolution sol;
  double prev_violation = std::numeric_limits<double>::infinity();
  double stat = std::numeric_limits<double>::infinity();
  for (std::size_t outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    auto lagrangian = [&](const Vector& v, Vector& g, Eigen::MatrixXd* h) {
      double val = prob.eval(v, g, h);
      for (std::size_t k = 0; k < nc; ++k) {
        const double c = rows[k].dot(v);
        for (int s = 0; s < 2; ++s) {
          const double sign = s == 0 ? 1.0 : -1.0;
          const double shifted = mu[2 * k + s] + rho * (sign * c - epsilon);
          if (shifted > 0.0) {
            val += (shifted * shifted - mu[2 * k + s] * mu[2 * k + s]) / (2.0 * rho);
            g += shifted * sign * rows[k];
            if (h) *h += rho * rows[k] * rows[k].transpose();
          } else {
            val -= mu[2 * k + s] * mu[2 * k + s] / (2.0 * rho);
          }
        }
      }
      return val;
    };
    std::size_t iters = 0;
    double gnorm = 0.0;
    x = newton(lagrangian, x, 0.1 * cfg.stationarity_tolerance, cfg.max_newton_iterations, iters, gnorm);
    sol.newton_iterations += iters;
    sol.gradient_evaluations += (iters + 1) * data.size();

    for (std::size_t k = 0; k < nc; ++k) {
      const double c = rows[k].dot(x);
      mu[2 * k] = std::max(0.0, mu[2 * k] + rho * (c - epsilon));
      mu[2 * k + 1] = std::max(0.0, mu[2 * k + 1] + rho * (-c - epsilon));
    }
    Vector g;
    prob.eval(x, g, nullptr);
    for (std::size_t k = 0; k < nc; ++k) g += (mu[2 * k] - mu[2 * k + 1]) * rows[k];
    stat = g.norm();
    const double viol = violation(x);
    if (viol <= cfg.feasibility_tolerance && stat <= cfg.stationarity_tolerance) {
      sol.model = LinearModel::from_params(x);
      sol.stationarity = stat;
      for (const auto& u : rows) sol.max_abs_covariance = std::max(sol.max_abs_covariance, std::abs(u.dot(x)));
      return sol;
    }
    if (viol > 0.25 * prev_violation) rho = std::min(rho * cfg.penalty_growth, cfg.penalty_max);
    prev_violation = viol;
  }
  std::ostringstream msg;
  msg << "solve_constrained: no convergence at eps=" << epsilon << " (feasibility violation " << violation(x)
      << ", stationarity " << stat << ")";
  throw NumericalError(msg.str());
}

EpsSweepResult sweep_front(const Dataset& data, std::size_t attribute, const ObjectiveSet& objectives,
                           const EpsSweepConfig& cfg) {
  cfg.validate();
  EpsSweepResult res;
  LinearModel x_free;
  res.upper_bound = epsilon_upper_bound(data, attribute, cfg.lambda_reg, &x_free);
  const std::size_t n = cfg.n_thresholds;
  res.records.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    res.records[t].epsilon = res.upper_bound * static_cast<double>(t) / static_cast<double>(n - 1);
  }

  const std::size_t chains = std::min(cfg.chains, n);
  std::vector<std::size_t> evals(chains, 0);
  detail::parallel_for(chains, cfg.workers, [&](std::size_t c) {
    const std::size_t lo = c * n / chains;
    const std::size_t hi = (c + 1) * n / chains;
    // Walk each chain from its loosest threshold down, starting at the
    // unconstrained minimizer.
    std::optional<LinearModel> warm = x_free;
    for (std::size_t t = hi; t-- > lo;) {
      auto& rec = res.records[t];
      try {
        auto sol = solve_constrained(data, attribute, rec.epsilon, cfg, warm);
        evals[c] += sol.gradient_evaluations;
        warm = sol.model;
        FrontPoint p{sol.model, objectives.evaluate(sol.model), 0};
        if (!p.f.allFinite()) throw NumericalError("non-finite objective values");
        rec.point = std::move(p);
        rec.ok = true;
      } catch (const NumericalError& e) {
        rec.message = e.what();
      }
    }
  });
  for (auto e : evals) res.gradient_evaluations += e;

  std::vector<FrontPoint> pts;
  for (const auto& rec : res.records) {
    if (rec.ok) pts.push_back(*rec.point);
  }
  if (pts.empty()) {
    throw NumericalError("sweep_front: every threshold failed; first error: " + res.records.front().message);
  }
  res.front = filter_nondominated(std::move(pts));
  return res;
}

}  // namespace fairfront
