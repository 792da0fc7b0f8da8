#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdpdal/apps.hpp"

namespace sdpdal {

/// Rudy/Gset graph text: header "n m" then m lines "i j w", 1-based ids.
Graph parse_graph_rudy(const std::string& text);
std::string write_graph_rudy(const Graph& g);
Graph load_graph_rudy(const std::string& path);

/// Whitespace-separated dense symmetric matrix, optionally preceded by a
/// single integer n on its own line.
SymMatrix parse_dense_matrix(const std::string& text);
SymMatrix load_dense_matrix(const std::string& path);

/// Subset of the SDPA sparse format: one PSD block only; comment lines
/// (* or ") skipped; diagonal (negative) and multi-block layouts rejected
/// explicitly.
struct SdpaProblem {
  int n = 0;
  SymMatrix c;
  std::vector<SymMatrix> constraints;
  Vector b;
};
SdpaProblem parse_sdpa_sparse(const std::string& text);
SdpaProblem load_sdpa_sparse(const std::string& path);

struct RunReport {
  int schema_version = 1;
  std::string instance;
  std::string problem_class;
  std::string solver = "sdpdal";
  int n = 0, p = 0, m = 0, m0 = 0, m_ineq = 0;
  double obj_p = 0.0;
  std::optional<double> obj_d;
  double eta_p = 0.0, eta_z = 0.0, eta_d = 0.0, eta_k = 0.0, eta_kstar = 0.0, eta_c1 = 0.0;
  std::optional<double> eta_g, eta_c2, eta_c3;
  double eta_max = 0.0;
  int rank = 0;
  double lambda_min_s = 0.0;
  double wall_seconds = 0.0;
  int outer_iters = 0, inner_iters = 0, cg_iters = 0;
  bool converged = false;
  bool rank_deficient_certificate = false;
  double gap_bound_full = 0.0, gap_bound_refined = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, double> options_echo;

  std::string to_json() const;
  static RunReport from_json(const std::string& text);
};

RunReport make_run_report(const SdpProblem& prob, const Solution& sol, const std::string& instance,
                          const std::string& problem_class, const SolveOptions& opts);
void save_run_report(const RunReport& rep, const std::string& path);
RunReport load_run_report(const std::string& path);

/// Dolan-More performance profile: per solver s a step curve
/// pi_s(tau) = fraction of instances with log2(t_{p,s} / min_s t_{p,s}) <= tau.
struct ProfileCurve {
  std::string solver;
  std::vector<std::pair<double, double>> samples;  // (tau, pi)
};
enum class ProfileMetric { Time, EtaMax };
std::vector<ProfileCurve> performance_profile(const std::vector<RunReport>& reports,
                                              ProfileMetric metric);
std::string profiles_to_json(const std::vector<ProfileCurve>& curves);

struct VerificationRecord {
  bool eta_consistent = false;     // recomputed eta agree with the report
  double eta_max_recomputed = 0.0;
  double grad_fd_error = 0.0;      // finite-difference audit of grad Psi
  bool grad_ok = false;
  std::optional<double> oracle_obj;  // p = n re-solve
  std::optional<double> oracle_gap;
  bool oracle_ok = true;
  bool passed = false;
};
/// Re-checks the KKT quantities from raw data, audits the gradient by finite
/// differences, and optionally re-solves with p = n.
VerificationRecord verify_instance(const SdpProblem& prob, const Solution& sol,
                                   const RunReport& rep, const SolveOptions& opts,
                                   bool run_oracle);

int run_cli(int argc, char** argv);

}  // namespace sdpdal
