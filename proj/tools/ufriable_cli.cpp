// Command-line front end over the ufriable C API: single queries, grid
// sweeps and calibration runs, emitted as CSV or JSON.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ufriable/ufriable.h"

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kColumns = {
    "mode",   "x",        "log_x",   "y",     "q",     "a",     "variant",
    "regime", "exact_value_or_log",  "est_log_main",   "rel_error",
    "budget", "error_over_budget",   "beta",  "sigma2", "u",    "eta",
    "omega_q", "delta_q", "d_q",     "c_q",   "status"};

// Raised for bad flag values; mapped to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a library call fails inside a row; becomes the row status.
struct RowError : std::runtime_error {
  RowError(uf_status s, const std::string& what)
      : std::runtime_error(what), status(s) {}
  uf_status status;
};

void check(uf_status s) {
  if (s != UF_OK) throw RowError(s, uf_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  uf_free_string(s);
  return out;
}

struct TableDeleter {
  void operator()(uf_table* t) const { uf_table_destroy(t); }
};
struct ModulusDeleter {
  void operator()(uf_modulus* m) const { uf_modulus_destroy(m); }
};
struct CharsDeleter {
  void operator()(uf_character_set* c) const { uf_characters_destroy(c); }
};
using TablePtr = std::unique_ptr<uf_table, TableDeleter>;
using ModulusPtr = std::unique_ptr<uf_modulus, ModulusDeleter>;
using CharsPtr = std::unique_ptr<uf_character_set, CharsDeleter>;

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Exact below 10^30, otherwise "log10=<value>".
std::string count_text(const std::string& decimal) {
  if (decimal.size() <= 30) return decimal;
  double lead = std::stod(decimal.substr(0, 17)) / 1e16;
  const double l10 = std::log10(lead) + static_cast<double>(decimal.size() - 1);
  char buf[48];
  std::snprintf(buf, sizeof buf, "log10=%.12g", l10);
  return buf;
}

struct Row {
  std::string mode;
  std::string x;
  double log_x = kNaN;
  std::uint64_t y = 0;
  std::uint64_t q = 1;
  std::optional<std::uint64_t> a;
  std::string variant;
  std::string regime;
  std::string exact;
  double est_log_main = kNaN;
  double rel_error = kNaN;
  double budget = kNaN;
  double error_over_budget = kNaN;
  double beta = kNaN;
  double sigma2 = kNaN;
  double u = kNaN;
  double eta = kNaN;
  std::optional<int> omega_q;
  double delta_q = kNaN;
  double d_q = kNaN;
  double c_q = kNaN;
  std::string status = "ok";
  std::vector<std::pair<std::string, std::string>> extras;
  std::vector<std::string> flags;
};

struct Options {
  std::vector<std::string> x;
  std::string x_grid;
  std::vector<std::uint64_t> y;
  std::vector<std::uint64_t> q{1};
  std::vector<std::string> a;
  std::vector<std::string> variant{"T1i"};
  double epsilon = 0.1;
  double c0 = 0.25;
  double c1 = 0.1;
  double c2 = 0.1;
  double t1iii_threshold = 0.2;
  double headroom = 2.0;
  std::string format = "csv";
  std::string out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool friable = false;
  bool timing = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

// One grid endpoint: "e20", "e^20" (log space) or a decimal literal.
struct Endpoint {
  bool log_literal;
  double log_value;
};

Endpoint endpoint(const std::string& s) {
  if (!s.empty() && s[0] == 'e') {
    const std::string body = s.size() > 1 && s[1] == '^' ? s.substr(2) : s.substr(1);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(body, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != body.size()) throw UsageError("bad grid endpoint '" + s + "'");
    return {true, v};
  }
  double lx = 0;
  if (uf_parse_log_x(s.c_str(), &lx) != UF_OK)
    throw UsageError("bad grid endpoint '" + s + "': " + uf_last_error());
  return {false, lx};
}

// "lo:hi:n", n log-spaced points including both ends.
std::vector<std::string> expand_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError("grid must be lo:hi:n, got '" + spec + "'");
  const auto lo = endpoint(parts[0]), hi = endpoint(parts[1]);
  int n = 0;
  try {
    n = std::stoi(parts[2]);
  } catch (const std::exception&) {
    n = 0;
  }
  if (n < 1) throw UsageError("grid point count must be positive in '" + spec + "'");
  if (n == 1 && lo.log_value != hi.log_value)
    throw UsageError("a one-point grid needs equal endpoints");
  std::vector<std::string> out;
  for (int k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    const double lv = lo.log_value + t * (hi.log_value - lo.log_value);
    char buf[64];
    if (lo.log_literal && hi.log_literal) {
      std::snprintf(buf, sizeof buf, "e^%.12g", lv);
    } else {
      double v = std::exp(lv);
      if (std::abs(v - std::round(v)) <= 1e-9 * v) v = std::round(v);
      std::snprintf(buf, sizeof buf, "%.17g", v);
    }
    out.emplace_back(buf);
  }
  return out;
}

std::vector<std::string> x_points(const Options& o, bool required) {
  std::vector<std::string> xs;
  for (const auto& x : o.x)
    for (const auto& part : split(x, ','))
      if (!part.empty()) xs.push_back(part);
  if (!o.x_grid.empty())
    for (auto& p : expand_grid(o.x_grid)) xs.push_back(p);
  if (required && xs.empty()) throw UsageError("--x or --x-grid is required");
  for (const auto& x : xs) {
    double lx = 0;
    if (uf_parse_log_x(x.c_str(), &lx) != UF_OK)
      throw UsageError("bad --x value '" + x + "': " + uf_last_error());
  }
  return xs;
}

uf_config make_config(const Options& o) {
  uf_config c;
  uf_config_default(&c);
  c.epsilon = o.epsilon;
  c.c0 = o.c0;
  c.c1 = o.c1;
  c.c2 = o.c2;
  c.t1iii_threshold = o.t1iii_threshold;
  c.jobs = 1;
  return c;
}

// Residues for one (q, variant): explicit list, "all", or "coprime".
std::vector<std::optional<std::uint64_t>> residues(const Options& o, std::uint64_t q,
                                                   bool needs_a, bool coprime_only) {
  std::vector<std::optional<std::uint64_t>> out;
  if (!needs_a) return {std::nullopt};
  if (o.a.empty()) throw UsageError("--a is required for this variant");
  for (const auto& item : o.a) {
    if (item == "all" || item == "coprime") {
      for (std::uint64_t r = 0; r < q; ++r)
        if ((item == "all" && !coprime_only) || std::gcd(r, q) == 1) out.push_back(r);
      continue;
    }
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad --a value '" + item + "'");
    }
  }
  return out;
}

class Context {
 public:
  explicit Context(const Options& o) : opts(o), config(make_config(o)) {}

  const uf_table* table(std::uint64_t y) const {
    auto it = tables_.find(y);
    if (it == tables_.end()) throw RowError(UF_ERR_INTERNAL, "table not prepared");
    return it->second.get();
  }

  void prepare(std::uint64_t y) {
    if (tables_.count(y)) return;
    uf_table* t = nullptr;
    if (uf_table_create(y, &t) != UF_OK)
      throw UsageError("cannot build prime table for y = " + std::to_string(y) + ": " +
                       uf_last_error());
    tables_.emplace(y, TablePtr(t));
  }

  // Ultrafriable residue counts for (x, y, q), computed once and shared
  // between the rows of every residue class.
  const std::vector<std::string>& residue_counts(const std::string& x, std::uint64_t y,
                                                 std::uint64_t q) {
    std::shared_ptr<ResidueEntry> entry;
    {
      std::lock_guard<std::mutex> lock(residue_mutex_);
      auto& slot = residues_[{x, y, q}];
      if (!slot) slot = std::make_shared<ResidueEntry>();
      entry = slot;
    }
    std::call_once(entry->once, [&] {
      char* s = nullptr;
      entry->status = uf_count_ultrafriable_residues(x.c_str(), table(y), q, &s);
      if (entry->status == UF_OK)
        entry->cells = split(take(s), '\n');
      else
        entry->message = uf_last_error();
    });
    if (entry->status != UF_OK) throw RowError(entry->status, entry->message);
    return entry->cells;
  }

  const Options& opts;
  uf_config config;

 private:
  struct ResidueEntry {
    std::once_flag once;
    uf_status status = UF_OK;
    std::string message;
    std::vector<std::string> cells;
  };

  std::map<std::uint64_t, TablePtr> tables_;
  std::mutex residue_mutex_;
  std::map<std::tuple<std::string, std::uint64_t, std::uint64_t>, std::shared_ptr<ResidueEntry>>
      residues_;
};

void fill_regime(Row& r, const Context& ctx) {
  uf_regime reg;
  if (uf_classify_regime(r.x.c_str(), ctx.table(r.y), ctx.opts.epsilon, &reg) == UF_OK) {
    r.regime = reg.name;
    r.u = reg.u;
    r.eta = reg.eta;
    r.log_x = reg.log_x;
  }
}

void fill_modulus(Row& r, const Context& ctx) {
  uf_modulus* m = nullptr;
  if (uf_modulus_create(ctx.table(r.y), r.q, &m) != UF_OK) return;
  ModulusPtr guard(m);
  uf_modulus_info info;
  if (uf_modulus_get_info(m, &info) == UF_OK) r.omega_q = info.omega;
}

void fill_estimate(Row& r, const uf_estimate& e, char* flags) {
  r.est_log_main = e.log_main;
  r.beta = e.beta;
  r.sigma2 = e.sigma2;
  r.budget = e.budget.nominal_bound;
  r.u = e.budget.u;
  r.eta = e.budget.eta;
  r.omega_q = e.budget.omega_q;
  r.delta_q = e.budget.delta_q;
  r.d_q = e.budget.dd_q;
  r.c_q = e.budget.cc_q;
  r.regime = e.budget.regime;
  r.extras.emplace_back("delta_branch", std::to_string(e.budget.delta_branch));
  for (auto& f : split(take(flags), '\n'))
    if (!f.empty()) r.flags.push_back(f);
}

std::string status_text(uf_status s, const std::string& msg) {
  std::string m = msg;
  std::replace(m.begin(), m.end(), '\n', ' ');
  return std::string("error:") + uf_status_name(s) + ": " + m;
}

using Task = std::function<std::vector<Row>()>;

Task guarded(Row base, std::function<void(Row&)> body) {
  return [base, body]() mutable {
    try {
      body(base);
    } catch (const RowError& e) {
      base.status = status_text(e.status, e.what());
    }
    return std::vector<Row>{base};
  };
}

bool needs_residue(const std::string& v) { return v == "T4" || v == "T5" || v == "R6"; }

void validate_variant(const std::string& v) {
  static const std::vector<std::string> known{"T1i", "T1ii", "T1iii", "REMC",
                                              "T2",  "T4",   "T5",    "R6"};
  if (std::find(known.begin(), known.end(), v) == known.end())
    throw UsageError("unknown --variant '" + v + "'");
}

std::vector<Task> count_tasks(Context& ctx, const std::vector<std::string>& xs) {
  std::vector<Task> tasks;
  const auto& o = ctx.opts;
  for (const auto& x : xs)
    for (auto y : o.y)
      for (auto q : o.q)
        for (auto a : residues(o, q, !o.a.empty(), false)) {
          Row base;
          base.mode = "count";
          base.x = x;
          base.y = y;
          base.q = q;
          base.a = a;
          base.variant = o.friable ? "friable" : "ultrafriable";
          const bool friable = o.friable;
          tasks.push_back(guarded(base, [&ctx, friable](Row& r) {
            fill_regime(r, ctx);
            fill_modulus(r, ctx);
            char* s = nullptr;
            if (friable) {
              check(r.a ? uf_count_friable_progression(r.x.c_str(), r.y, *r.a, r.q, &s)
                        : uf_count_friable(r.x.c_str(), r.y, r.q, &s));
              r.exact = count_text(take(s));
            } else if (r.a) {
              r.exact = count_text(ctx.residue_counts(r.x, r.y, r.q).at(*r.a % r.q));
            } else {
              uf_modulus* m = nullptr;
              check(uf_modulus_create(ctx.table(r.y), r.q, &m));
              ModulusPtr guard(m);
              check(uf_count_ultrafriable(r.x.c_str(), ctx.table(r.y), m, 1, &s));
              r.exact = count_text(take(s));
            }
          }));
        }
  return tasks;
}

std::vector<Task> saddle_tasks(Context& ctx, const std::vector<std::string>& xs) {
  std::vector<Task> tasks;
  for (const auto& x : xs)
    for (auto y : ctx.opts.y)
      for (auto q : ctx.opts.q) {
        Row base;
        base.mode = "saddle";
        base.x = x;
        base.y = y;
        base.q = q;
        base.variant = "beta";
        tasks.push_back(guarded(base, [&ctx](Row& r) {
          fill_regime(r, ctx);
          uf_modulus* m = nullptr;
          check(uf_modulus_create(ctx.table(r.y), r.q, &m));
          ModulusPtr guard(m);
          uf_modulus_info info;
          check(uf_modulus_get_info(m, &info));
          r.omega_q = info.omega;
          uf_saddle s;
          check(uf_solve_beta(r.x.c_str(), ctx.table(r.y), m, &s));
          r.beta = s.sigma;
          r.sigma2 = s.sigma2;
          r.extras.emplace_back("residual", num(s.residual));
          r.extras.emplace_back("sigma3", num(s.sigma3));
          r.extras.emplace_back("sigma4", num(s.sigma4));
          r.extras.emplace_back("iterations", std::to_string(s.iterations));
          uf_saddle al;
          if (uf_solve_alpha(r.x.c_str(), ctx.table(r.y), &al) == UF_OK)
            r.extras.emplace_back("alpha", num(al.sigma));
        }));
      }
  return tasks;
}

std::vector<Task> estimate_tasks(Context& ctx, const std::vector<std::string>& xs,
                                 const std::string& mode, bool with_exact) {
  std::vector<Task> tasks;
  const auto& o = ctx.opts;
  for (const auto& variant : o.variant) validate_variant(variant);
  for (const auto& variant : o.variant)
    for (const auto& x : xs)
      for (auto y : o.y)
        for (auto q : o.q)
          for (auto a : residues(o, q, needs_residue(variant), variant != "R6")) {
            Row base;
            base.mode = mode;
            base.x = x;
            base.y = y;
            base.q = q;
            base.a = a;
            base.variant = variant;
            tasks.push_back(guarded(base, [&ctx, with_exact](Row& r) {
              fill_regime(r, ctx);
              fill_modulus(r, ctx);
              const std::uint64_t a = r.a.value_or(1);
              uf_estimate est;
              char* flags = nullptr;
              check(uf_estimate_main(r.x.c_str(), ctx.table(r.y), r.q, a, r.variant.c_str(),
                                     &ctx.config, &est, &flags));
              fill_estimate(r, est, flags);
              if (!with_exact) return;
              char* s = nullptr;
              check(uf_exact_for_variant(r.x.c_str(), ctx.table(r.y), r.q, a, r.variant.c_str(),
                                         1, &s));
              const std::string exact = take(s);
              r.exact = count_text(exact);
              uf_comparison cmp;
              check(uf_compare(exact.c_str(), &est, &cmp));
              r.rel_error = cmp.rel_error;
              r.error_over_budget = cmp.error_over_budget;
              if (cmp.degenerate) r.status = "degenerate";
            }));
          }
  return tasks;
}

std::vector<Task> chars_tasks(Context& ctx, const std::vector<std::string>& xs) {
  std::vector<Task> tasks;
  const auto& o = ctx.opts;
  std::vector<std::string> points = xs.empty() ? std::vector<std::string>{""} : xs;
  std::vector<std::uint64_t> ys = o.y.empty() ? std::vector<std::uint64_t>{0} : o.y;
  for (const auto& x : points)
    for (auto y : ys)
      for (auto q : o.q) {
        Row base;
        base.mode = "chars";
        base.x = x;
        base.y = y;
        base.q = q;
        base.variant = "T3";
        tasks.push_back([&ctx, base]() {
          std::vector<Row> rows;
          uf_character_set* set = nullptr;
          if (const uf_status st = uf_characters_create(base.q, &set); st != UF_OK) {
            Row r = base;
            r.status = status_text(st, uf_last_error());
            return std::vector<Row>{r};
          }
          CharsPtr guard(set);
          const std::size_t n = uf_characters_count(set);
          std::vector<double> t0(n), t1(n), ratio(n);
          std::optional<RowError> t3_error;
          const bool with_sums = !base.x.empty() && base.y > 0;
          if (with_sums) {
            const uf_status st = uf_t3_bounds_all(base.x.c_str(), ctx.table(base.y), set,
                                                  &ctx.config, t0.data(), t1.data(), ratio.data());
            if (st != UF_OK) t3_error.emplace(st, uf_last_error());
          }
          for (std::size_t i = 0; i < n; ++i) {
            Row r = base;
            try {
              uf_character_info info;
              check(uf_character_get_info(set, i, &info));
              char* exps = nullptr;
              check(uf_character_exponents(set, i, &exps));
              std::string e = take(exps);
              std::replace(e.begin(), e.end(), ',', '.');
              r.extras.emplace_back("chi", std::to_string(i));
              r.extras.emplace_back("order", std::to_string(info.order));
              r.extras.emplace_back("real", info.real ? "1" : "0");
              r.extras.emplace_back("exponents", e.empty() ? "-" : e);
              if (with_sums) {
                fill_regime(r, ctx);
                if (t3_error) throw *t3_error;
                if (info.principal) {
                  r.status = "principal";
                } else {
                  r.rel_error = ratio[i];
                  r.budget = t1[i];
                  r.error_over_budget = ratio[i] / t1[i];
                  r.extras.emplace_back("bound_theta0", num(t0[i]));
                }
              }
            } catch (const RowError& err) {
              r.status = status_text(err.status, err.what());
            }
            rows.push_back(std::move(r));
          }
          return rows;
        });
      }
  return tasks;
}

std::vector<Row> run_tasks(const std::vector<Task>& tasks, unsigned jobs) {
  std::vector<std::vector<Row>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = tasks[i]();
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<Row> rows;
  for (auto& batch : results)
    for (auto& r : batch) rows.push_back(std::move(r));
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_status(const Row& r) {
  std::string s = r.status;
  for (const auto& [k, v] : r.extras) s += " " + k + "=" + v;
  if (!r.flags.empty()) s += " flags=" + std::to_string(r.flags.size());
  return s;
}

std::vector<std::string> cells(const Row& r) {
  return {r.mode,
          r.x,
          num(r.log_x),
          r.y ? std::to_string(r.y) : "",
          std::to_string(r.q),
          r.a ? std::to_string(*r.a) : "",
          r.variant,
          r.regime,
          r.exact,
          num(r.est_log_main),
          num(r.rel_error),
          num(r.budget),
          num(r.error_over_budget),
          num(r.beta),
          num(r.sigma2),
          num(r.u),
          num(r.eta),
          r.omega_q ? std::to_string(*r.omega_q) : "",
          num(r.delta_q),
          num(r.d_q),
          num(r.c_q),
          render_status(r)};
}

std::string to_csv(const std::vector<Row>& rows) {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) out += (i ? "," : "") + kColumns[i];
  out += "\n";
  for (const auto& r : rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + csv_escape(c[i]);
    out += "\n";
  }
  return out;
}

json jnum(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json row_json(const Row& r) {
  json j;
  j["mode"] = r.mode;
  j["x"] = r.x;
  j["log_x"] = jnum(r.log_x);
  j["y"] = r.y ? json(r.y) : json(nullptr);
  j["q"] = r.q;
  j["a"] = r.a ? json(*r.a) : json(nullptr);
  j["variant"] = r.variant;
  j["regime"] = r.regime;
  j["exact_value_or_log"] = r.exact;
  j["est_log_main"] = jnum(r.est_log_main);
  j["rel_error"] = jnum(r.rel_error);
  j["budget"] = jnum(r.budget);
  j["error_over_budget"] = jnum(r.error_over_budget);
  j["beta"] = jnum(r.beta);
  j["sigma2"] = jnum(r.sigma2);
  j["u"] = jnum(r.u);
  j["eta"] = jnum(r.eta);
  j["omega_q"] = r.omega_q ? json(*r.omega_q) : json(nullptr);
  j["delta_q"] = jnum(r.delta_q);
  j["d_q"] = jnum(r.d_q);
  j["c_q"] = jnum(r.c_q);
  j["status"] = r.status;
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = v;
  j["extras"] = extras;
  j["flags"] = r.flags;
  return j;
}

std::string to_json(const std::vector<Row>& rows, const std::string& mode, const Options& o,
                    std::optional<double> seconds) {
  json meta;
  meta["version"] = uf_version();
  meta["mode"] = mode;
  json cfg;
  cfg["x"] = o.x;
  cfg["x_grid"] = o.x_grid;
  cfg["y"] = o.y;
  cfg["q"] = o.q;
  cfg["a"] = o.a;
  cfg["variant"] = o.variant;
  cfg["epsilon"] = o.epsilon;
  cfg["c0"] = o.c0;
  cfg["c1"] = o.c1;
  cfg["c2"] = o.c2;
  cfg["t1iii_threshold"] = o.t1iii_threshold;
  cfg["friable"] = o.friable;
  meta["config"] = cfg;
  if (seconds) meta["timing_seconds"] = *seconds;
  json doc;
  doc["metadata"] = meta;
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(row_json(r));
  doc["rows"] = arr;
  return doc.dump(2) + "\n";
}

// 0 on success, 1 on I/O failure.
int emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) {
      std::cerr << "error: failed writing to standard output\n";
      return 1;
    }
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (out) out << text;
  if (out) out.flush();
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  return 0;
}

void validate(const Options& o) {
  for (double v : {o.epsilon, o.c0, o.c1, o.c2, o.t1iii_threshold})
    if (!(v > 0) || !std::isfinite(v)) throw UsageError("constant overrides must be positive");
  if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
  if (o.jobs == 0) throw UsageError("--jobs must be positive");
  for (auto q : o.q)
    if (q == 0) throw UsageError("--q values must be positive");
  for (auto y : o.y)
    if (y < 2) throw UsageError("--y values must be at least 2");
}

int run_mode(const std::string& mode, const Options& o) {
  validate(o);
  const auto start = std::chrono::steady_clock::now();
  if (mode == "calibrate") {
    uf_config c = make_config(o);
    c.jobs = o.jobs;
    char* text = nullptr;
    if (uf_calibrate(&c, o.headroom, &text) != UF_OK) {
      std::cerr << "error: calibration failed: " << uf_last_error() << "\n";
      return 1;
    }
    char head[160];
    std::snprintf(head, sizeof head,
                  "# ufriable frozen band constants (headroom %.6g, epsilon %.6g, c1 %.6g, c2 "
                  "%.6g)\n",
                  o.headroom, o.epsilon, o.c1, o.c2);
    return emit(head + take(text), o.out);
  }

  Context ctx(o);
  const bool x_required = mode != "chars";
  const auto xs = x_points(o, x_required);
  if (mode != "chars" && o.y.empty()) throw UsageError("--y is required");
  if (mode == "chars" && !xs.empty() && o.y.empty())
    throw UsageError("--y is required with --x for chars");
  for (auto y : o.y) ctx.prepare(y);

  std::vector<Task> tasks;
  if (mode == "count") tasks = count_tasks(ctx, xs);
  else if (mode == "saddle") tasks = saddle_tasks(ctx, xs);
  else if (mode == "estimate") tasks = estimate_tasks(ctx, xs, mode, false);
  else if (mode == "compare" || mode == "sweep") tasks = estimate_tasks(ctx, xs, mode, true);
  else if (mode == "chars") tasks = chars_tasks(ctx, xs);

  const auto rows = run_tasks(tasks, o.jobs);
  std::optional<double> seconds;
  if (o.timing)
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string text = o.format == "json" ? to_json(rows, mode, o, seconds) : to_csv(rows);
  return emit(text, o.out);
}

void add_common(CLI::App* sub, Options& o, bool grids) {
  if (grids) {
    sub->add_option("--x", o.x, "Bound x: decimal, scientific or e^k; comma-separated list")
        ->delimiter(',');
    sub->add_option("--x-grid", o.x_grid, "Log-spaced grid lo:hi:n, e.g. e20:e40:5");
    sub->add_option("--y", o.y, "Smoothness parameter y (comma-separated list)")->delimiter(',');
    sub->add_option("--q", o.q, "Modulus q (comma-separated list)")->capture_default_str()->delimiter(',');
    sub->add_option("--a", o.a, "Residue a: values, 'all' or 'coprime'")->delimiter(',');
  }
  sub->add_option("--epsilon", o.epsilon, "Regime epsilon")->capture_default_str();
  sub->add_option("--c0", o.c0, "Constant c0 of the modulus bound")->capture_default_str();
  sub->add_option("--c1", o.c1, "Constant c1 of the T3/T4 budgets")->capture_default_str();
  sub->add_option("--c2", o.c2, "Constant c2 of the T5 budget")->capture_default_str();
  sub->add_option("--t1iii-threshold", o.t1iii_threshold, "T1iii limit on eta*sqrt(u)")->capture_default_str();
  sub->add_option("--format", o.format, "Output format: csv or json")->capture_default_str();
  sub->add_option("--out", o.out, "Write output to FILE instead of stdout");
  sub->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
  sub->add_flag("--timing", o.timing, "Record wall time in JSON metadata");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counts and saddle-point estimates for ultrafriable integers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(uf_version()));
  Options o;

  struct Mode {
    const char* name;
    const char* help;
    bool grids;
    bool variant;
  };
  const Mode modes[] = {
      {"count", "Exact Upsilon_q, Psi_q or residue-class counts", true, false},
      {"saddle", "Saddle points beta (and alpha) with sigma_2..sigma_4", true, false},
      {"estimate", "Main term and error budget of a variant", true, true},
      {"compare", "Main term against the exact count", true, true},
      {"chars", "Dirichlet characters mod q and T3 diagnostics", true, false},
      {"sweep", "compare over grids of x, y, q, a and several variants", true, true},
      {"calibrate", "Run the band-calibration sweeps and print frozen constants", false, false},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& m : modes) {
    auto* sub = app.add_subcommand(m.name, m.help);
    add_common(sub, o, m.grids);
    if (m.variant)
      sub->add_option("--variant", o.variant, "T1i T1ii T1iii REMC T2 T4 T5 R6 (comma list)")->capture_default_str()
          ->delimiter(',');
    if (std::string(m.name) == "count")
      sub->add_flag("--friable", o.friable, "Count y-friable instead of ultrafriable");
    if (std::string(m.name) == "calibrate")
      sub->add_option("--headroom", o.headroom, "Headroom factor applied to measured bands")->capture_default_str();
    subs[m.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return run_mode(name, o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
