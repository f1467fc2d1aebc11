#include "ufriable/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "ufriable/errors.hpp"
#include "ufriable/saddle.hpp"

namespace uf {

FrozenConstants FrozenConstants::parse(std::string_view text) {
  FrozenConstants out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("constants line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (key.empty() || used != value.size())
      throw InvalidArgument("constants line " + std::to_string(lineno) + ": bad value '" + value +
                            "'");
    out.values_[key] = v;
  }
  return out;
}

FrozenConstants FrozenConstants::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open constants file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string FrozenConstants::to_text() const {
  std::string out;
  char buf[64];
  for (const auto& [k, v] : values_) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    out += k + "=" + buf + "\n";
  }
  return out;
}

void FrozenConstants::set(const std::string& key, double value) { values_[key] = value; }

bool FrozenConstants::contains(const std::string& key) const { return values_.count(key) != 0; }

double FrozenConstants::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("missing frozen constant " + key);
  return it->second;
}

namespace grids {

std::vector<double> t1_log_x() {
  std::vector<double> out;
  for (int k = 0; k < 10; ++k) out.push_back(20.0 + 20.0 * k / 9.0);
  return out;
}

const std::vector<std::uint64_t>& t1_moduli() {
  static const std::vector<std::uint64_t> v{1, 6, 30};
  return v;
}
const std::vector<std::uint64_t>& t2_y() {
  static const std::vector<std::uint64_t> v{500, 1000, 2000};
  return v;
}
const std::vector<std::uint64_t>& t2_moduli() {
  static const std::vector<std::uint64_t> v{1, 2, 6, 15};
  return v;
}
const std::vector<std::uint64_t>& t4_moduli() {
  static const std::vector<std::uint64_t> v{3, 7, 11};
  return v;
}
const std::vector<std::uint64_t>& t5_moduli() {
  static const std::vector<std::uint64_t> v{3, 11, 31};
  return v;
}
const std::vector<std::pair<std::uint64_t, std::uint64_t>>& r6_pairs() {
  static const std::vector<std::pair<std::uint64_t, std::uint64_t>> v{{6, 2}, {15, 5}, {10, 4}};
  return v;
}
const std::vector<std::uint64_t>& t3_moduli() {
  static const std::vector<std::uint64_t> v{3, 5, 7, 8, 11};
  return v;
}

}  // namespace grids

namespace {

std::string label(const char* tag, double log_x, std::uint64_t y, std::uint64_t q) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s log_x=%.4f y=%llu q=%llu", tag, log_x,
                static_cast<unsigned long long>(y), static_cast<unsigned long long>(q));
  return buf;
}

// max over a coprime to q of |count_a phi(q) / total - 1|.
double max_residue_deviation(const ResidueCountVector& counts, std::uint64_t phi) {
  const double total = static_cast<double>(counts.coprime_total());
  double worst = 0.0;
  for (std::uint64_t a = 0; a < counts.q; ++a) {
    if (std::gcd(a, counts.q) != 1) continue;
    const double c = static_cast<double>(counts.counts[a]);
    worst = std::max(worst, std::abs(c * static_cast<double>(phi) / total - 1.0));
  }
  return worst;
}

double max_ratio(const std::vector<BandSample>& s) {
  double m = 0.0;
  for (const auto& b : s) m = std::max(m, b.measured / b.scale);
  return m;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

}  // namespace

std::vector<BandSample> sample_t1(const EstimatorConfig& config) {
  std::vector<BandSample> out;
  const auto table = PrimePowerTable::build(100);
  for (auto q : grids::t1_moduli()) {
    const auto ctx = ModulusContext::make(q, table);
    for (double lx : grids::t1_log_x()) {
      const auto x = CountBound::from_log(lx);
      const auto est = estimate_upsilon_q(x, table, ctx, Theorem::T1i, config);
      const auto exact = count_ultrafriable(x, table, ctx, config.limits);
      const double dev = std::abs(std::expm1(log_big(exact.value) - est.log_main));
      out.push_back({label("T1", lx, 100, q), dev, est.budget.nominal_bound});
    }
  }
  return out;
}

std::vector<BandSample> sample_t2(const EstimatorConfig& config) {
  std::vector<BandSample> out;
  const auto x = CountBound::parse("1e6");
  for (auto y : grids::t2_y()) {
    const auto table = PrimePowerTable::build(y);
    for (auto q : grids::t2_moduli()) {
      const auto ctx = ModulusContext::make(q, table);
      const auto est = estimate_t2(x, table, ctx, config);
      const auto ups = count_ultrafriable(x, table, ctx, config.limits);
      const double dev = std::abs(std::expm1(log_big(ups.value) - est.log_main));
      out.push_back({label("T2", x.log(), y, q), dev, est.budget.nominal_bound});
    }
  }
  return out;
}

std::vector<BandSample> sample_t4(const EstimatorConfig& config) {
  std::vector<BandSample> out;
  const auto table = PrimePowerTable::build(100);
  const auto x = CountBound::parse("e^30");
  for (auto q : grids::t4_moduli()) {
    const auto ctx = ModulusContext::make(q, table);
    const auto est = estimate_progression(x, table, ctx, 1, Theorem::T4, config);
    const auto counts = count_ultrafriable_residues(x, table, q, config.limits);
    out.push_back({label("T4", x.log(), 100, q), max_residue_deviation(counts, ctx.phi()),
                   est.budget.nominal_bound});
  }
  return out;
}

std::vector<BandSample> sample_t5(const EstimatorConfig& config) {
  std::vector<BandSample> out;
  const auto table = PrimePowerTable::build(1000);
  const auto x = CountBound::parse("1e6");
  for (auto q : grids::t5_moduli()) {
    const auto ctx = ModulusContext::make(q, table);
    const auto est = estimate_progression(x, table, ctx, 1, Theorem::T5, config);
    const auto counts = count_ultrafriable_residues(x, table, q, config.limits);
    out.push_back({label("T5", x.log(), 1000, q), max_residue_deviation(counts, ctx.phi()),
                   est.budget.nominal_bound});
  }
  return out;
}

std::vector<BandSample> sample_r6(const EstimatorConfig& config) {
  std::vector<BandSample> out;
  const auto table = PrimePowerTable::build(50);
  const auto x = CountBound::parse("e^25");
  for (auto [q, a] : grids::r6_pairs()) {
    const auto est = estimate_noncoprime(x, table, q, a, config);
    const auto counts = count_ultrafriable_residues(x, table, q, config.limits);
    const double dev = std::abs(std::expm1(log_big(counts.counts[a]) - est.log_main));
    out.push_back({label("R6", x.log(), 50, q) + " a=" + std::to_string(a), dev,
                   est.budget.nominal_bound});
  }
  return out;
}

std::vector<BandSample> sample_t3_c1(const EstimatorConfig& config) {
  std::vector<BandSample> out;
  const auto table = PrimePowerTable::build(100);
  const auto x = CountBound::parse("e^30");
  const double u = x.log() / std::log(100.0);
  const double lu = std::log(u);
  const double floor = std::exp(-log_y_eps(100.0, config.epsilon));
  for (auto q : grids::t3_moduli()) {
    const auto counts = count_ultrafriable_residues(x, table, q, config.limits);
    const double total = static_cast<double>(counts.coprime_total());
    const auto chars = enumerate_characters(q);
    for (std::size_t i = 0; i < chars.size(); ++i) {
      if (chars[i].is_principal()) continue;
      const double ratio = std::abs(character_sum(counts, chars[i])) / total;
      const double c1 = ratio > floor ? -(1.0 + lu * lu * lu * lu) / u * std::log(ratio - floor)
                                      : std::numeric_limits<double>::infinity();
      out.push_back({label("T3", x.log(), 100, q) + " chi#" + std::to_string(i), c1, 1.0});
    }
  }
  return out;
}

FrozenConstants calibrate(const CalibrationOptions& options) {
  const auto& config = options.config;
  const double h = options.headroom;
  FrozenConstants fc;
  auto stage = [&](const char* name) {
    if (options.progress) *options.progress << "calibrate: " << name << " done\n";
  };

  fc.set("C_T1", h * max_ratio(sample_t1(config)));
  stage("T1");
  fc.set("C_T2", h * max_ratio(sample_t2(config)));
  stage("T2");
  fc.set("C_T4", h * max_ratio(sample_t4(config)));
  stage("T4");
  fc.set("C_T5", h * max_ratio(sample_t5(config)));
  stage("T5");
  fc.set("C_R6", h * max_ratio(sample_r6(config)));
  stage("R6");
  {
    double c1 = std::numeric_limits<double>::infinity();
    for (const auto& s : sample_t3_c1(config)) c1 = std::min(c1, s.measured);
    fc.set("c1_T3", std::isfinite(c1) ? c1 / h : config.c1);
    stage("T3");
  }

  // Saddle-point bands.
  {
    Range beta_k, one_minus, y_pow, y_int;
    for (std::uint64_t y : {30, 50, 100, 200, 500, 1000}) {
      const auto table = PrimePowerTable::build(y);
      const double ly = std::log(static_cast<double>(y));
      for (double eta : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double lx = table.psi() / (2.0 + eta);
        if (lx < ly || table.psi() > lx * lx * lx) continue;
        const double beta = solve_beta(lx, table).sigma;
        const double r = beta * ly / std::log1p(eta);
        beta_k.add((std::max(r, 1.0 / r) - 1.0) * ly);
      }
    }
    for (std::uint64_t y : {20, 50, 100, 300, 1000, 3000, 10000}) {
      const auto table = PrimePowerTable::build(y);
      const double ly = std::log(static_cast<double>(y));
      for (double u : {1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 20.0, 40.0, 80.0, 160.0, 320.0}) {
        const double lx = u * ly;
        if (!(2.0 * lx < table.psi())) continue;
        const double beta = solve_beta(lx, table).sigma;
        const double l2u = std::log(2.0 * u);
        one_minus.add((1.0 - beta) * ly / l2u);
        const double yp = std::exp((1.0 - beta) * ly);
        y_pow.add(yp / (u * l2u));
        y_int.add(std::expm1((1.0 - beta) * ly) / ((1.0 - beta) * lx));
      }
    }
    fc.set("K_beta", h * beta_k.hi);
    fc.set("one_minus_beta_lo", one_minus.lo / h);
    fc.set("one_minus_beta_hi", one_minus.hi * h);
    fc.set("y_pow_lo", y_pow.lo / h);
    fc.set("y_pow_hi", y_pow.hi * h);
    fc.set("y_int_lo", y_int.lo / h);
    fc.set("y_int_hi", y_int.hi * h);
    stage("beta bands");
  }
  {
    double a_max = 0.0;
    for (std::uint64_t y : {1000, 10000, 100000}) {
      const auto table = PrimePowerTable::build(y);
      const double ly = std::log(static_cast<double>(y));
      const double l_eps = std::exp(log_l_eps(static_cast<double>(y), config.epsilon));
      for (double u : {1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0}) {
        const double lx = u * ly;
        if (!(std::pow(lx, 1.0 + config.epsilon) < static_cast<double>(y))) continue;
        const double alpha = solve_alpha(lx, table).sigma;
        const double approx = 1.0 - xi(u) / ly;
        a_max = std::max(a_max, std::abs(alpha - approx) / (1.0 / (u * ly * ly) + 1.0 / l_eps));
      }
    }
    fc.set("A_alpha", h * a_max);
    stage("alpha band");
  }
  {
    Range rem;
    for (std::uint64_t y : {50, 100, 200, 500}) {
      const auto table = PrimePowerTable::build(y);
      for (double eta : {0.1, 0.2, 0.35, 0.5, 0.75, 1.0}) {
        const auto x = CountBound::from_log(table.psi() / (2.0 + eta));
        for (std::uint64_t q : {1, 2, 6, 30, 210}) {
          const auto ctx = ModulusContext::make(q, table);
          const auto b = error_budget(x, table, ctx, config);
          rem.add(b.delta_q * b.eta / (1.0 + b.omega_q));
        }
      }
    }
    fc.set("remark_a_lo", rem.lo / h);
    fc.set("remark_a_hi", rem.hi * h);
    stage("remark (a) band");
  }
  return fc;
}

}  // namespace uf
