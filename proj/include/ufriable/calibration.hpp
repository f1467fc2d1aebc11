#pragma once

#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ufriable/estimators.hpp"

namespace uf {

// Frozen band constants as plain `key=value` lines ('#' starts a comment).
class FrozenConstants {
 public:
  static FrozenConstants parse(std::string_view text);
  static FrozenConstants load(const std::string& path);

  std::string to_text() const;
  void set(const std::string& key, double value);
  bool contains(const std::string& key) const;
  // Throws InvalidArgument for a missing key.
  double get(const std::string& key) const;
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

// One measured point of a band: the statement holds with constant C at this
// point iff measured <= C * scale.
struct BandSample {
  std::string label;
  double measured = 0.0;
  double scale = 1.0;
};

// The sweep grids behind each frozen constant.
namespace grids {
// y = 100, log x = 20 ... 40 in 10 equal steps.
std::vector<double> t1_log_x();
const std::vector<std::uint64_t>& t1_moduli();  // {1, 6, 30}
const std::vector<std::uint64_t>& t2_y();       // {500, 1000, 2000}
const std::vector<std::uint64_t>& t2_moduli();  // {1, 2, 6, 15}
const std::vector<std::uint64_t>& t4_moduli();  // {3, 7, 11}
const std::vector<std::uint64_t>& t5_moduli();  // {3, 11, 31}
const std::vector<std::pair<std::uint64_t, std::uint64_t>>& r6_pairs();  // (q, a)
const std::vector<std::uint64_t>& t3_moduli();  // {3, 5, 7, 8, 11}
}  // namespace grids

// Samples for each theorem-level band. The T1 scale is the T1i budget,
// T2 the q u log 2u / (phi(q) sqrt(y) log y) term, T4/R6 the
// e^{-c1 u/(log u)^4} + 1/Y_eps term and T5 log q/(u^{c2} log y) + 1/log y.
std::vector<BandSample> sample_t1(const EstimatorConfig& config = {});
std::vector<BandSample> sample_t2(const EstimatorConfig& config = {});
std::vector<BandSample> sample_t4(const EstimatorConfig& config = {});
std::vector<BandSample> sample_t5(const EstimatorConfig& config = {});
std::vector<BandSample> sample_r6(const EstimatorConfig& config = {});

// Largest c1 for which each nonprincipal character ratio at x = e^30,
// y = 100 stays below e^{-c1 u/(1+(log u)^4)} + 1/Y_eps (inf when the floor
// 1/Y_eps alone covers it).
std::vector<BandSample> sample_t3_c1(const EstimatorConfig& config = {});

struct CalibrationOptions {
  EstimatorConfig config{};
  double headroom = 2.0;
  // Progress lines ("stage ... done"), or nullptr.
  std::ostream* progress = nullptr;
};

// Runs every sweep and returns the frozen constants: upper constants are
// multiplied by the headroom, lower band ends and c1 divided by it.
FrozenConstants calibrate(const CalibrationOptions& options = {});

}  // namespace uf
