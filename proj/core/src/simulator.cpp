#include "qstab/simulator.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

namespace qstab {

std::string to_text(const DriftReport& report) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "conditional_samples %lld\n"
                "sufficient %s\n"
                "conditional_drift_mean %.17g\n"
                "standard_error %.17g\n"
                "b_theoretical %.17g\n"
                "fourth_moment_bound_observed %.17g\n"
                "j_bound %.17g\n",
                static_cast<long long>(report.samples), report.sufficient ? "true" : "false",
                report.conditional_drift_mean, report.standard_error, report.b_theoretical,
                report.fourth_moment_bound_observed, report.j_bound);
  return buf;
}

Vector step(const LinearSystem& sys, const Vector& x, const Vector& u, const Vector& w) {
  if (x.size() != sys.d || u.size() != sys.m || w.size() != sys.d) {
    throw std::invalid_argument("step: dimension mismatch");
  }
  return sys.A * x + sys.B * u + w;
}

Trajectory rollout(const LinearSystem& sys, const ReachabilityInfo& reach,
                   const RadialQuantizer& q, PolicyKind kind, const NoiseModel& noise,
                   const Vector& x0, int horizon, std::uint64_t seed, bool record_noise) {
  if (x0.size() != sys.d || !x0.allFinite()) {
    throw std::invalid_argument("rollout: x0 must be a finite d-vector");
  }
  if (q.dim() != sys.d || noise.dim() != sys.d) {
    throw std::invalid_argument("rollout: quantizer/noise dimension mismatch");
  }
  if (horizon < 0) {
    throw std::invalid_argument("rollout: horizon must be >= 0");
  }
  const int blocks = horizon / reach.kappa;
  const int steps = blocks * reach.kappa;
  const Matrix A_pow = matrix_power(sys.A, reach.kappa);

  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.controls.reserve(static_cast<std::size_t>(steps));
  if (record_noise) traj.noise.reserve(static_cast<std::size_t>(steps));

  SeededStream stream{seed, 0};
  Vector x = x0;
  traj.states.push_back(x);
  for (int b = 0; b < blocks; ++b) {
    const ControlBlock block = plan_block(kind, reach, A_pow, q, x);
    for (int j = 0; j < reach.kappa; ++j) {
      const Vector w = sample(noise, stream);
      x = step(sys, x, block.u_steps[static_cast<std::size_t>(j)], w);
      const int t = b * reach.kappa + j + 1;
      if (!x.allFinite() || x.norm() > kDivergenceGuard) {
        throw DivergedError("rollout: state diverged at t=" + std::to_string(t), t);
      }
      traj.states.push_back(x);
      traj.controls.push_back(block.u_steps[static_cast<std::size_t>(j)]);
      if (record_noise) traj.noise.push_back(w);
    }
  }
  return traj;
}

namespace {

struct RunResult {
  std::vector<double> sq_norms;
  std::vector<DriftSample> drifts;
  double max_control = 0.0;
  double max_block = 0.0;
  double initial_norm = 0.0;
};

RunResult distill(const Trajectory& traj, int kappa) {
  RunResult r;
  r.sq_norms.reserve(traj.states.size());
  for (const Vector& x : traj.states) r.sq_norms.push_back(x.squaredNorm());
  r.initial_norm = traj.states.front().norm();

  const int blocks = static_cast<int>(traj.controls.size()) / kappa;
  r.drifts.reserve(static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) {
    const double before = traj.states[static_cast<std::size_t>(b) * kappa].norm();
    const double after = traj.states[(static_cast<std::size_t>(b) + 1) * kappa].norm();
    r.drifts.push_back({before, after - before});
  }
  for (int b = 0; b < blocks; ++b) {
    double block_sq = 0.0;
    for (int j = 0; j < kappa; ++j) {
      const double un = traj.controls[static_cast<std::size_t>(b) * kappa + j].norm();
      r.max_control = std::max(r.max_control, un);
      block_sq += un * un;
    }
    r.max_block = std::max(r.max_block, std::sqrt(block_sq));
  }
  return r;
}

}  // namespace

EnsembleStats ensemble(const RolloutSpec& spec, int runs) {
  if (runs < 1) {
    throw std::invalid_argument("ensemble: runs must be >= 1");
  }
  int threads = spec.threads;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, runs);

  std::vector<RunResult> results(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};

  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= runs) return;
      try {
        const Trajectory traj =
            rollout(spec.sys, spec.reach, spec.q, spec.kind, spec.noise, spec.x0, spec.horizon,
                    substream(spec.seed, static_cast<std::uint64_t>(i)).seed);
        results[static_cast<std::size_t>(i)] = distill(traj, spec.reach.kappa);
      } catch (const DivergedError& e) {
        failures[static_cast<std::size_t>(i)] = std::make_exception_ptr(
            DivergedError(std::string(e.what()) + " (run " + std::to_string(i) + ")",
                          e.time_index, i));
      } catch (...) {
        failures[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // Run-index-ordered reduction keeps the aggregate independent of thread
  // count and scheduling.
  EnsembleStats stats;
  stats.runs = runs;
  stats.mean_sq_norm.assign(results.front().sq_norms.size(), 0.0);
  double max_abs_delta = 0.0;
  for (const RunResult& r : results) {
    if (r.sq_norms.size() != stats.mean_sq_norm.size()) {
      throw NumericalFailure("ensemble: inconsistent trajectory lengths");
    }
    for (std::size_t t = 0; t < r.sq_norms.size(); ++t) {
      stats.mean_sq_norm[t] += r.sq_norms[t];
    }
    stats.drift_samples.insert(stats.drift_samples.end(), r.drifts.begin(), r.drifts.end());
    stats.max_control_norm = std::max(stats.max_control_norm, r.max_control);
    stats.max_block_norm = std::max(stats.max_block_norm, r.max_block);
    stats.max_initial_norm = std::max(stats.max_initial_norm, r.initial_norm);
    for (const DriftSample& s : r.drifts) {
      max_abs_delta = std::max(max_abs_delta, std::abs(s.delta));
    }
  }
  for (double& v : stats.mean_sq_norm) v /= static_cast<double>(runs);
  const double sq = max_abs_delta * max_abs_delta;
  stats.fourth_diff_max = sq * sq;
  return stats;
}

DriftReport drift_report(const EnsembleStats& stats, double r, int kappa, double sigma_max_RI,
                         double c4, double phi) {
  DriftReport report;
  report.b_theoretical = theoretical_drift_gap(r, phi, kappa, sigma_max_RI, c4);
  report.fourth_moment_bound_observed = stats.fourth_diff_max;
  report.j_bound = std::max(stats.max_initial_norm, r);

  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;
  for (const DriftSample& s : stats.drift_samples) {
    if (s.norm_before > r) {
      sum += s.delta;
      sum_sq += s.delta * s.delta;
      ++n;
    }
  }
  report.samples = n;
  report.sufficient = n >= 30;
  if (n > 0) {
    report.conditional_drift_mean = sum / static_cast<double>(n);
    if (n > 1) {
      const double var = std::max(
          0.0, (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1));
      report.standard_error = std::sqrt(var / static_cast<double>(n));
    }
  }
  return report;
}

}  // namespace qstab
