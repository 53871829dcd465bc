#ifndef HDG_BENCH_HPP
#define HDG_BENCH_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hdg/precond.hpp"
#include "hdg/problem.hpp"

namespace hdg
{

struct ExperimentGrid
{
  ProblemKind problem = ProblemKind::cavity;
  std::vector<int> k{2};
  std::vector<Index> inv_h;
  std::vector<double> mu{1.0};
  std::vector<double> tau{0.0};
  std::vector<double> inv_lambda{0.0};
  double alpha = 4.0;
  double tol = 1e-8;
  int maxit = 1000;
  std::uint64_t seed = 0;
  SchurMode schur = SchurMode::exact;
  SmootherKind smoother = SmootherKind::patch_sgs;
  bool timings = false;
};

struct BenchRow
{
  std::string problem;
  int dim = 2;
  int k = 2;
  Index inv_h = 0;
  double mu = 1.0;
  double tau = 0.0;
  double inv_lambda = 0.0;
  double alpha = 4.0;
  std::uint64_t seed = 0;
  int iters = 0;
  bool converged = false;
  double final_relres = 0.0;
  double setup_ms = 0.0;
  double solve_ms = 0.0;
  std::string error; // not serialized

  bool operator==(const BenchRow& o) const;
};

// One solve: mesh, assembly, condensation, preconditioner, MINRES.
BenchRow run_case(ProblemKind problem, Index inv_h, const ProblemParams& params, const ExperimentGrid& grid);

// Rows in grid order (k, inv_h, mu, tau, inv_lambda; last varies fastest).
// Failures are recorded in the row and the run continues.
std::vector<BenchRow> run_grid(const ExperimentGrid& grid, int threads = 1);

// Worker count from HDG_THREADS, at least 1.
int threads_from_env();

inline constexpr std::string_view kCsvHeader =
  "problem,dim,k,inv_h,mu,tau,inv_lambda,alpha,seed,iters,converged,final_relres,setup_ms,solve_ms";

std::string emit_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_csv(std::string_view text);
// Rows are (k, 1/h), columns the remaining parameter combinations.
std::string emit_markdown(const std::vector<BenchRow>& rows);

} // namespace hdg

#endif // HDG_BENCH_HPP
