#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdg/bench.hpp"
#include "hdg/verify.hpp"

using namespace hdg;

int main(int argc, char** argv)
{
  CLI::App app{"Condensed HDG saddle point solver benchmarks"};

  std::string problem = "cavity";
  std::vector<Index> inv_h;
  std::vector<double> taus, inv_lambdas;
  std::vector<std::string> lambdas;
  double mu = 1.0;
  int k = 2;
  ExperimentGrid grid;
  std::string format = "csv";
  std::string out;
  std::string verify;
  std::string schur_mode = "exact";
  std::string smoother = "patch-sgs";

  app.add_option("--problem", problem, "cavity | step | elast-steady | elast-unsteady")
    ->check(CLI::IsMember({"cavity", "step", "elast-steady", "elast-unsteady"}));
  app.add_option("--k", k, "polynomial degree")->check(CLI::Range(kMinDegree, kMaxDegree));
  app.add_option("--inv-h", inv_h, "mesh resolution 1/h (repeatable)")->check(CLI::PositiveNumber);
  app.add_option("--mu", mu, "viscosity / shear modulus");
  app.add_option("--tau", taus, "reaction coefficient (repeatable)");
  app.add_option("--inv-lambda", inv_lambdas, "1/lambda, 0 for lambda = infinity (repeatable)");
  app.add_option("--lambda", lambdas, "lambda, 'inf' allowed (repeatable)");
  app.add_option("--alpha", grid.alpha, "tangential jump penalty");
  app.add_option("--tol", grid.tol, "MINRES relative tolerance");
  app.add_option("--maxit", grid.maxit, "MINRES iteration cap");
  app.add_option("--seed", grid.seed, "initial guess seed");
  app.add_option("--format", format, "csv | md")->check(CLI::IsMember({"csv", "md"}));
  app.add_option("--out", out, "output file (stdout if absent)");
  app.add_option("--verify", verify, "run the dense verification suite: small | full")
    ->check(CLI::IsMember({"small", "full"}));
  app.add_option("--schur-mode", schur_mode, "exact | approx")->check(CLI::IsMember({"exact", "approx"}));
  app.add_option("--smoother", smoother, "patch-sgs | jacobi")->check(CLI::IsMember({"patch-sgs", "jacobi"}));
  app.add_flag("--timings", grid.timings, "record setup and solve wall times");

  CLI11_PARSE(app, argc, argv);

  if (!verify.empty())
  {
    const auto rep = run_verification(parse_verify_level(verify), &std::cout);
    std::cout << (rep.all_pass() ? "verification passed" : "verification FAILED") << std::endl;
    return rep.all_pass() ? 0 : 1;
  }

  try
  {
    grid.problem = parse_problem(problem);
    grid.k = {k};
    grid.inv_h = inv_h;
    grid.mu = {mu};
    if (!taus.empty())
      grid.tau = taus;
    for (const auto& l : lambdas)
    {
      if (l == "inf" || l == "infinity")
        inv_lambdas.push_back(0.0);
      else
        inv_lambdas.push_back(1.0 / std::stod(l));
    }
    if (!inv_lambdas.empty())
      grid.inv_lambda = inv_lambdas;
    grid.schur = parse_schur_mode(schur_mode);
    grid.smoother = parse_smoother(smoother);

    const auto rows = run_grid(grid, threads_from_env());
    for (const auto& r : rows)
      if (!r.error.empty())
        std::cerr << "row inv_h=" << r.inv_h << " tau=" << r.tau << " inv_lambda=" << r.inv_lambda
                  << ": " << r.error << '\n';
    const std::string text = format == "csv" ? emit_csv(rows) : emit_markdown(rows);
    if (out.empty())
      std::cout << text;
    else
    {
      std::ofstream os(out);
      if (!os)
      {
        std::cerr << "cannot open " << out << '\n';
        return 2;
      }
      os << text;
    }
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
