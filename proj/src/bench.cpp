#include "hdg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hdg/krylov.hpp"

namespace hdg
{

namespace
{

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt17(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true)
  {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

} // namespace

bool BenchRow::operator==(const BenchRow& o) const
{
  return problem == o.problem && dim == o.dim && k == o.k && inv_h == o.inv_h && mu == o.mu && tau == o.tau &&
         inv_lambda == o.inv_lambda && alpha == o.alpha && seed == o.seed && iters == o.iters &&
         converged == o.converged && final_relres == o.final_relres && setup_ms == o.setup_ms &&
         solve_ms == o.solve_ms;
}

BenchRow run_case(ProblemKind problem, Index inv_h, const ProblemParams& params, const ExperimentGrid& grid)
{
  BenchRow row;
  row.problem = std::string(to_string(problem));
  row.k = params.k;
  row.inv_h = inv_h;
  row.mu = params.mu;
  row.tau = params.tau;
  row.inv_lambda = params.inv_lambda;
  row.alpha = params.alpha;
  row.seed = grid.seed;
  try
  {
    const auto t0 = Clock::now();
    auto d = discretize(problem, inv_h, params);
    BlockPreconditioner pre(d->condensed, d->tables, params, grid.schur, grid.smoother);
    const double setup = ms_since(t0);

    const auto t1 = Clock::now();
    const LinearOperator k = operator_condensed(d->condensed);
    const Vector b = rhs_condensed(d->condensed);
    Vector x = initial_guess(d->condensed, grid.seed);
    MinresOptions opt;
    opt.tol = grid.tol;
    opt.maxit = grid.maxit;
    const SolveReport rep =
      minres(k, [&pre](std::span<const double> r, std::span<double> z) { pre.apply(r, z); }, b, x, opt);
    const double solve = ms_since(t1);

    row.iters = rep.iterations;
    row.converged = rep.converged;
    row.final_relres = rep.final_relres;
    if (rep.breakdown)
      row.error = "breakdown";
    if (grid.timings)
    {
      row.setup_ms = setup;
      row.solve_ms = solve;
    }
  }
  catch (const std::exception& e)
  {
    row.error = e.what();
    row.converged = false;
  }
  return row;
}

std::vector<BenchRow> run_grid(const ExperimentGrid& grid, int threads)
{
  struct Job
  {
    Index inv_h;
    ProblemParams params;
  };
  std::vector<Job> jobs;
  for (Index n : grid.inv_h)
    if (n < 1)
      throw std::invalid_argument("run_grid: inv_h must be >= 1");
  for (int k : grid.k)
    for (Index n : grid.inv_h)
      for (double mu : grid.mu)
        for (double tau : grid.tau)
          for (double il : grid.inv_lambda)
          {
            ProblemParams p;
            p.k = k;
            p.mu = mu;
            p.tau = tau;
            p.inv_lambda = il;
            p.alpha = grid.alpha;
            p.validate();
            jobs.push_back({n, p});
          }
  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      rows[i] = run_case(grid.problem, jobs[i].inv_h, jobs[i].params, grid);
  };
  const int nw = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (nw <= 1)
    worker();
  else
  {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }
  return rows;
}

int threads_from_env()
{
  const char* s = std::getenv("HDG_THREADS");
  if (!s)
    return 1;
  const int n = std::atoi(s);
  return n > 0 ? n : 1;
}

std::string emit_csv(const std::vector<BenchRow>& rows)
{
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.problem << ',' << r.dim << ',' << r.k << ',' << r.inv_h << ',' << fmt17(r.mu) << ',' << fmt17(r.tau)
       << ',' << fmt17(r.inv_lambda) << ',' << fmt17(r.alpha) << ',' << r.seed << ',' << r.iters << ','
       << (r.converged ? 1 : 0) << ',' << fmt17(r.final_relres) << ',' << fmt17(r.setup_ms) << ','
       << fmt17(r.solve_ms) << '\n';
  return os.str();
}

std::vector<BenchRow> parse_csv(std::string_view text)
{
  std::vector<BenchRow> rows;
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::invalid_argument("parse_csv: bad header");
  while (std::getline(is, line))
  {
    if (line.empty())
      continue;
    const auto f = split(line, ',');
    if (f.size() != 14)
      throw std::invalid_argument("parse_csv: expected 14 fields");
    BenchRow r;
    r.problem = f[0];
    r.dim = std::stoi(f[1]);
    r.k = std::stoi(f[2]);
    r.inv_h = std::stoll(f[3]);
    r.mu = std::stod(f[4]);
    r.tau = std::stod(f[5]);
    r.inv_lambda = std::stod(f[6]);
    r.alpha = std::stod(f[7]);
    r.seed = std::stoull(f[8]);
    r.iters = std::stoi(f[9]);
    r.converged = f[10] == "1";
    r.final_relres = std::stod(f[11]);
    r.setup_ms = std::stod(f[12]);
    r.solve_ms = std::stod(f[13]);
    rows.push_back(r);
  }
  return rows;
}

std::string emit_markdown(const std::vector<BenchRow>& rows)
{
  // Column labels only mention parameters that vary.
  bool vary_mu = false, vary_tau = false, vary_il = false;
  for (const auto& r : rows)
  {
    vary_mu |= r.mu != rows.front().mu;
    vary_tau |= r.tau != rows.front().tau;
    vary_il |= r.inv_lambda != rows.front().inv_lambda;
  }
  if (!vary_mu && !vary_il)
    vary_tau = true;
  auto label = [&](const BenchRow& r) {
    std::string s;
    auto add = [&s](const std::string& part) { s += (s.empty() ? "" : ", ") + part; };
    if (vary_mu)
      add("mu=" + short_num(r.mu));
    if (vary_tau)
      add("tau=" + short_num(r.tau));
    if (vary_il)
      add("1/lambda=" + short_num(r.inv_lambda));
    return s;
  };
  std::vector<std::string> cols;
  std::vector<std::pair<int, Index>> keys;
  std::map<std::pair<std::pair<int, Index>, std::string>, const BenchRow*> cell;
  for (const auto& r : rows)
  {
    const std::string c = label(r);
    if (std::find(cols.begin(), cols.end(), c) == cols.end())
      cols.push_back(c);
    const std::pair<int, Index> key{r.k, r.inv_h};
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
    cell[{key, c}] = &r;
  }
  std::ostringstream os;
  os << "| k | 1/h |";
  for (const auto& c : cols)
    os << ' ' << c << " |";
  os << "\n|---|---|";
  for (std::size_t i = 0; i < cols.size(); ++i)
    os << "---|";
  os << '\n';
  for (const auto& key : keys)
  {
    os << "| " << key.first << " | " << key.second << " |";
    for (const auto& c : cols)
    {
      const auto it = cell.find({key, c});
      if (it == cell.end())
        os << " |";
      else if (!it->second->converged)
        os << " " << it->second->iters << "* |";
      else
        os << ' ' << it->second->iters << " |";
    }
    os << '\n';
  }
  return os.str();
}

} // namespace hdg
