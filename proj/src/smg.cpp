#include "fairfront/smg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/LU>

namespace fairfront {

namespace {

using Eigen::Index;

double quad(const Eigen::MatrixXd& gram, const Vector& w) { return w.dot(gram * w); }

// Frank-Wolfe gap in Gram form.
double fw_gap(const Eigen::MatrixXd& gram, const Vector& w) {
  const Vector gw = gram * w;
  return w.dot(gw) - gw.minCoeff();
}

Vector project_simplex_clip(Vector w) {
  w = w.cwiseMax(0.0);
  const double s = w.sum();
  if (s <= 0.0) return Vector::Constant(w.size(), 1.0 / static_cast<double>(w.size()));
  return w / s;
}

// Minimizer of w' G w over {w : sum w = 1, w_i = 0 off `support`}; nullopt if
// the affine minimizer leaves the simplex or the system is singular.
std::optional<Vector> solve_on_support(const Eigen::MatrixXd& gram, const std::vector<Index>& support) {
  const auto s = static_cast<Index>(support.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Vector rhs = Vector::Zero(s + 1);
  for (Index a = 0; a < s; ++a) {
    for (Index b = 0; b < s; ++b) kkt(a, b) = 2.0 * gram(support[a], support[b]);
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
  }
  rhs[s] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return std::nullopt;
  const Vector sol = lu.solve(rhs);
  if (!sol.allFinite()) return std::nullopt;
  Vector w = Vector::Zero(gram.rows());
  for (Index a = 0; a < s; ++a) {
    if (sol[a] < -1e-12) return std::nullopt;
    w[support[a]] = std::max(0.0, sol[a]);
  }
  return project_simplex_clip(w);
}

Vector frank_wolfe_away(const Eigen::MatrixXd& gram, double tol, std::size_t max_iter, std::size_t& iterations) {
  const Index m = gram.rows();
  Vector w = Vector::Constant(m, 1.0 / static_cast<double>(m));
  for (iterations = 0; iterations < max_iter; ++iterations) {
    const Vector gw = gram * w;
    const double cur = w.dot(gw);
    Index s = 0;
    gw.minCoeff(&s);
    const double gap_fw = cur - gw[s];
    if (gap_fw <= tol) break;
    Index a = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (w[i] > 0.0 && gw[i] > best) {
        best = gw[i];
        a = i;
      }
    }
    const double gap_away = a >= 0 ? best - cur : 0.0;
    Vector dir;
    double gmax = 1.0;
    if (gap_fw >= gap_away || a < 0 || w[a] >= 1.0) {
      dir = -w;
      dir[s] += 1.0;
    } else {
      dir = w;
      dir[a] -= 1.0;
      gmax = w[a] / (1.0 - w[a]);
    }
    const double slope = dir.dot(gw);
    const double curv = dir.dot(gram * dir);
    double gamma = curv > 0.0 ? std::clamp(-slope / curv, 0.0, gmax) : gmax;
    if (gamma <= 0.0) break;
    w += gamma * dir;
    w = w.cwiseMax(0.0);
    w /= w.sum();
  }
  return w;
}

}  // namespace

double minnorm_kkt_residual(std::span<const Vector> gradients, const Vector& weights) {
  Vector d = Vector::Zero(gradients.front().size());
  for (std::size_t i = 0; i < gradients.size(); ++i) d += weights[static_cast<Index>(i)] * gradients[i];
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& g : gradients) lo = std::min(lo, g.dot(d));
  return d.squaredNorm() - lo;
}

MinNormResult solve_minnorm(std::span<const Vector> gradients, const MinNormOptions& options) {
  const auto m = static_cast<Index>(gradients.size());
  if (m == 0) throw ConfigError("solve_minnorm: no gradients");
  const Index n = gradients.front().size();
  for (const auto& g : gradients) {
    if (g.size() != n) throw ConfigError("solve_minnorm: gradient dimensions differ");
  }

  MinNormResult res;
  Eigen::MatrixXd gram(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) gram(i, j) = gram(j, i) = gradients[static_cast<std::size_t>(i)].dot(gradients[static_cast<std::size_t>(j)]);
  }
  const double scale = std::max(gram.diagonal().maxCoeff(), std::numeric_limits<double>::min());

  if (m == 1) {
    res.weights = Vector::Ones(1);
  } else if (gram.diagonal().maxCoeff() == 0.0) {
    res.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
  } else if (m == 2) {
    const double diff = gram(0, 0) + gram(1, 1) - 2.0 * gram(0, 1);
    if (diff <= 1e-14 * scale) {
      res.weights = Vector::Constant(2, 0.5);
    } else {
      const double l1 = std::clamp((gram(1, 1) - gram(0, 1)) / diff, 0.0, 1.0);
      res.weights = Vector(2);
      res.weights << l1, 1.0 - l1;
    }
  } else {
    // Internal tolerance is relative to the gradient scale; the support solve
    // then lands on the optimum to rounding accuracy.
    const double tol = options.tolerance * std::min(1.0, scale);
    Vector w = frank_wolfe_away(gram, tol, options.max_iterations, res.iterations);
    std::vector<Index> support;
    for (Index i = 0; i < m; ++i) {
      if (w[i] > 0.0) support.push_back(i);
    }
    if (auto polished = solve_on_support(gram, support);
        polished && fw_gap(gram, *polished) <= fw_gap(gram, w) && quad(gram, *polished) <= quad(gram, w) + 1e-15 * scale) {
      w = *polished;
    }
    if (fw_gap(gram, w) > tol && m <= 6) {
      // Exhaustive face search; exact for the small m used in practice.
      double best = quad(gram, w);
      for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<Index> sup;
        for (Index i = 0; i < m; ++i) {
          if (mask & (1u << i)) sup.push_back(i);
        }
        auto cand = solve_on_support(gram, sup);
        if (cand && quad(gram, *cand) < best && fw_gap(gram, *cand) <= fw_gap(gram, w)) {
          best = quad(gram, *cand);
          w = *cand;
        }
      }
    }
    res.weights = w;
  }

  res.weights = project_simplex_clip(res.weights);
  res.direction = Vector::Zero(n);
  for (Index i = 0; i < m; ++i) res.direction += res.weights[i] * gradients[static_cast<std::size_t>(i)];
  res.kkt_residual = minnorm_kkt_residual(gradients, res.weights);
  return res;
}

double StepSchedule::at(std::size_t k) const {
  return alpha0 * std::pow(decay_factor, static_cast<double>(k / decay_period));
}

void StepSchedule::validate() const {
  if (!(alpha0 > 0.0)) throw ConfigError("step schedule: alpha0 must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw ConfigError("step schedule: decay_factor must be in (0, 1]");
  if (decay_period < 1) throw ConfigError("step schedule: decay_period must be >= 1");
}

const BatchSchedule& SmgSchedules::batch_for(std::size_t objective) const {
  if (batches.empty()) throw ConfigError("no batch schedule configured");
  return batches.size() == 1 ? batches.front() : batches.at(objective);
}

void SmgSchedules::validate(std::size_t objectives) const {
  step.validate();
  if (batches.empty()) throw ConfigError("no batch schedule configured");
  if (batches.size() != 1 && batches.size() != objectives) {
    throw ConfigError("need one batch schedule per objective (or a single shared one)");
  }
  for (const auto& b : batches) {
    if (b.base < 1) throw ConfigError("batch base size must be >= 1");
    if (!(b.growth >= 1.0)) throw ConfigError("batch growth ratio must be >= 1");
  }
}

SmgStepResult smg_step(const LinearModel& x, const ObjectiveSet& objectives, const SmgSchedules& schedules,
                       std::size_t k, Rng& rng) {
  std::vector<Vector> grads(objectives.size());
  SmgStepResult out;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    const auto& obj = objectives[i];
    const auto population = obj.sample_count();
    if (population == 0) {
      obj.value_and_gradient(x, {}, grads[i]);
      out.gradient_evaluations += 1;
    } else {
      const auto batch = sample_batch(population, schedules.batch_for(i), k, rng);
      obj.value_and_gradient(x, batch, grads[i]);
      out.gradient_evaluations += batch.size();
    }
  }
  const auto mn = solve_minnorm(grads);
  out.weights = mn.weights;
  out.direction_norm = mn.direction.norm();
  out.next = LinearModel::from_params(x.params() - schedules.step.at(k) * mn.direction);
  return out;
}

SmgRunResult smg_run(const LinearModel& x0, const ObjectiveSet& objectives, const SmgSchedules& schedules,
                     std::size_t iterations, Rng& rng, std::size_t k0) {
  if (iterations < 1) throw ConfigError("smg_run: at least one iteration is required");
  SmgRunResult res{x0, 0, 0};
  for (std::size_t t = 0; t < iterations; ++t) {
    const std::size_t k = k0 + t;
    auto step = smg_step(res.final_point, objectives, schedules, k, rng);
    res.gradient_evaluations += step.gradient_evaluations;
    if (!step.next.is_finite()) {
      std::ostringstream msg;
      msg << "SMG iterate became non-finite at iterate " << k << " (step size " << schedules.step.at(k)
          << ", direction norm " << step.direction_norm << ")";
      throw NumericalError(msg.str());
    }
    res.final_point = std::move(step.next);
    ++res.iterations;
  }
  return res;
}

}  // namespace fairfront
