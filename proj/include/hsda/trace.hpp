#pragma once

#include "hsda/homogeneous.hpp"
#include "hsda/oracle.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace hsda {

enum class Termination { v_threshold, ritz_certified, max_outer, aborted };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::v_threshold: return "v_threshold";
    case Termination::ritz_certified: return "ritz_certified";
    case Termination::max_outer: return "max_outer";
    case Termination::aborted: return "aborted";
  }
  return "unknown";
}

/// One outer iteration. Quantities refer to the iterate x_t the step starts from.
template <typename Scalar>
struct StepRecord {
  long t = 0;
  std::optional<double> f_gap;
  std::optional<double> F;       // F(x_t)
  std::optional<double> F_next;  // F(x_{t+1})
  double grad_norm = 0;          // ||grad F(x_t)|| with a closed form, else ||g_t||
  double g_norm = 0;             // ||g_t||
  std::optional<double> v_abs;
  std::optional<double> delta_or_zeta;
  double step_norm = 0;
  long inner_iters = 0;
  long lanczos_iters = 0;
  long hvp_cum = 0;
  double wall_ms = 0;
  std::optional<Branch> branch;
  bool terminal = false;
  // inexact variant only
  double alpha = 0;
  double e_budget = 0;
  double k_norm = 0;
  double rho = 0;
  long retries = 0;
  long lanczos_calls = 0;
  std::optional<Vector<Scalar>> x;
};

template <typename Scalar>
struct IterateTrace {
  std::string algorithm;
  std::string problem;
  std::vector<StepRecord<Scalar>> records;
  Termination reason = Termination::max_outer;
  bool certified = false;
  std::string error;  // set when reason == aborted

  Vector<Scalar> x_final;
  Vector<Scalar> y_final;
  std::optional<double> final_f_gap;
  double final_grad_norm = 0;
  std::optional<double> final_lambda_min;

  long outer_iters = 0;
  long total_inner = 0;
  long total_lanczos = 0;
  long total_hvp = 0;
  long total_retries = 0;
  double wall_ms = 0;
};

/// A driver failure with everything recorded up to the failing step.
template <typename Scalar>
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, IterateTrace<Scalar> trace)
      : Error(what), trace_(std::move(trace)) {}
  const IterateTrace<Scalar>& trace() const { return trace_; }

 private:
  IterateTrace<Scalar> trace_;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename Scalar>
Scalar min_eigenvalue(const Matrix<Scalar>& M) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigensolverFailure("min_eigenvalue: eigensolver failed");
  return es.eigenvalues()(0);
}

/// Fills the closed-form columns of a record at x.
template <typename Scalar>
void fill_closed_form(const ProblemOracle<Scalar>& oracle, const Vector<Scalar>& x, StepRecord<Scalar>& rec) {
  if (!oracle.closed_form) return;
  const auto& cf = *oracle.closed_form;
  const Scalar Fx = cf.F(x);
  rec.F = double(Fx);
  rec.f_gap = double(Fx - cf.F_inf);
  rec.grad_norm = double(cf.grad_F(x).norm());
}

/// Final-iterate columns: closed-form values when available, otherwise the
/// inexact gradient at (x_final, y_final) and the smallest eigenvalue of H there.
template <typename Scalar>
void finalize(const ProblemOracle<Scalar>& oracle, IterateTrace<Scalar>& tr) {
  if (oracle.closed_form) {
    const auto& cf = *oracle.closed_form;
    tr.final_f_gap = double(cf.F(tr.x_final) - cf.F_inf);
    tr.final_grad_norm = double(cf.grad_F(tr.x_final).norm());
    tr.final_lambda_min = double(min_eigenvalue<Scalar>(cf.hess_F(tr.x_final)));
    return;
  }
  tr.final_grad_norm = double(oracle.grad_x(tr.x_final, tr.y_final).norm());
  if (oracle.dim_x <= kDenseThreshold) {
    tr.final_lambda_min = double(min_eigenvalue<Scalar>(H_dense(oracle, tr.x_final, tr.y_final)));
  }
}

template <typename Scalar>
void accumulate_totals(IterateTrace<Scalar>& tr) {
  tr.outer_iters = static_cast<long>(tr.records.size());
  tr.total_inner = 0;
  tr.total_lanczos = 0;
  tr.total_retries = 0;
  for (const auto& r : tr.records) {
    tr.total_inner += r.inner_iters;
    tr.total_lanczos += r.lanczos_iters;
    tr.total_retries += r.retries;
  }
  tr.total_hvp = tr.records.empty() ? 0 : tr.records.back().hvp_cum;
}

}  // namespace detail
}  // namespace hsda
