#pragma once

#include <algorithm>
#include <random>
#include <thread>
#include <vector>

#include "vecdyn/dynamics.hpp"
#include "vecdyn/model.hpp"

namespace vecdyn {

/// A batch of N joint states, batch axis leading. qdd and tau are optional
/// (0 x 0 when absent).
struct StateBatch {
  Eigen::MatrixXd q;
  Eigen::MatrixXd qd;
  Eigen::MatrixXd qdd;
  Eigen::MatrixXd tau;

  int size() const { return static_cast<int>(q.rows()); }

  void validate(const RobotModel& model) const {
    const auto check = [&](const Eigen::MatrixXd& m, const char* what) {
      if (m.size() == 0) {
        return;
      }
      if (m.rows() != q.rows() || m.cols() != model.dof()) {
        throw DimensionError(std::string("StateBatch: ") + what + " is " +
                             std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected " +
                             std::to_string(q.rows()) + "x" +
                             std::to_string(model.dof()));
      }
    };
    if (q.cols() != model.dof()) {
      throw DimensionError("StateBatch: q has " + std::to_string(q.cols()) +
                           " columns, model has " + std::to_string(model.dof()) +
                           " dof");
    }
    check(qd, "qd");
    check(qdd, "qdd");
    check(tau, "tau");
  }
};

/// Uniform random states in [-pi, pi] per joint, reproducible from the seed.
inline StateBatch random_states(const RobotModel& model, int count, uint64_t seed,
                                bool with_qdd = true, bool with_tau = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-M_PI, M_PI);
  const int n = model.dof();
  StateBatch batch;
  batch.q.resize(count, n);
  batch.qd.resize(count, n);
  if (with_qdd) {
    batch.qdd.resize(count, n);
  }
  if (with_tau) {
    batch.tau.resize(count, n);
  }
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < n; ++j) {
      batch.q(i, j) = dist(rng);
      batch.qd(i, j) = dist(rng);
      if (with_qdd) {
        batch.qdd(i, j) = dist(rng);
      }
      if (with_tau) {
        batch.tau(i, j) = dist(rng);
      }
    }
  }
  return batch;
}

/// Evaluates fn(model, batch, i) for every state, partitioned across up to
/// `workers` threads in contiguous chunks. Each state is independent and
/// runs the same code path regardless of the partition, so the output is
/// bitwise identical to a serial evaluation. workers <= 0 means the hardware
/// concurrency.
template <typename Fn>
Eigen::MatrixXd batch_eval(const RobotModel& model, const StateBatch& batch,
                           Fn&& fn, int workers = 0) {
  batch.validate(model);
  const int count = batch.size();
  if (count == 0) {
    return Eigen::MatrixXd(0, 0);
  }
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
  }
  workers = std::max(1, std::min(workers, count));

  // The first row sizes the output.
  const Eigen::VectorXd first = fn(model, batch, 0);
  Eigen::MatrixXd out(count, first.size());
  out.row(0) = first.transpose();

  const auto run_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      out.row(i) = fn(model, batch, i).transpose();
    }
  };
  if (workers == 1 || count == 1) {
    run_range(1, count);
    return out;
  }
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(workers));
  const int remaining = count - 1;
  const int chunk = (remaining + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = 1 + w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) {
      break;
    }
    threads.emplace_back(run_range, begin, end);
  }
  for (std::thread& t : threads) {
    t.join();
  }
  return out;
}

/// Batched inverse dynamics; rows are torque vectors.
inline Eigen::MatrixXd batch_rnea(const RobotModel& model, const StateBatch& batch,
                                  const GravitySpec& gravity = GravitySpec::standard(),
                                  int workers = 0) {
  return batch_eval(
      model, batch,
      [&gravity](const RobotModel& m, const StateBatch& b, int i) {
        return rnea<double>(m, b.q.row(i).transpose(), b.qd.row(i).transpose(),
                            b.qdd.row(i).transpose(), gravity);
      },
      workers);
}

/// Batched mass matrices; rows are flattened n x n matrices.
inline Eigen::MatrixXd batch_crba(const RobotModel& model, const StateBatch& batch,
                                  int workers = 0) {
  const int n = model.dof();
  return batch_eval(
      model, batch,
      [n](const RobotModel& m, const StateBatch& b, int i) {
        const Eigen::MatrixXd mass = crba<double>(m, b.q.row(i).transpose());
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(mass.data(), n * n));
      },
      workers);
}

/// Batched forward dynamics; rows are acceleration vectors.
inline Eigen::MatrixXd batch_forward_dynamics(
    const RobotModel& model, const StateBatch& batch,
    const GravitySpec& gravity = GravitySpec::standard(), int workers = 0) {
  return batch_eval(
      model, batch,
      [&gravity](const RobotModel& m, const StateBatch& b, int i) {
        return forward_dynamics<double>(m, b.q.row(i).transpose(),
                                        b.qd.row(i).transpose(),
                                        b.tau.row(i).transpose(), gravity);
      },
      workers);
}

}  // namespace vecdyn
