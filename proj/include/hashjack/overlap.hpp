#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hashjack/community.hpp"
#include "hashjack/graph.hpp"
#include "hashjack/polarity.hpp"

namespace hashjack {

// Cross-network membership flags. One row per account appearing in at
// least one labeled community; a row never carries both pro_P and
// contra_P for the same party (one community per hashtag).
struct MembershipTable {
  std::vector<std::string> parties;   // analysis order; <= 64
  std::vector<std::string> accounts;  // sorted; row order
  std::vector<std::uint64_t> pro_mask;
  std::vector<std::uint64_t> contra_mask;
  std::uint64_t excluded_unlabeled = 0;  // accounts seen only in unlabeled communities

  std::size_t universe_size() const { return accounts.size(); }
  int party_index(const std::string& party) const;
  bool pro(std::size_t row, int party) const { return (pro_mask[row] >> party) & 1u; }
  bool contra(std::size_t row, int party) const { return (contra_mask[row] >> party) & 1u; }
};

struct LabeledNetwork {
  const RetweetGraph* graph = nullptr;
  const Partition* partition = nullptr;
  const PolarityMap* polarity = nullptr;
};

MembershipTable membership_table(const std::vector<LabeledNetwork>& networks);

struct CoefficientEstimate {
  std::string predictor;  // party tag, or "(intercept)"
  double beta = 0.0;
  double se = 0.0;
  double odds = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct LogisticModel {
  std::string outcome;  // party Y; the dependent variable is contra_Y
  CoefficientEstimate intercept;
  std::vector<CoefficientEstimate> coefficients;
  std::size_t n = 0;
  bool converged = false;
  int iterations = 0;
  double ci_level = 0.99;
  std::string diagnostic;  // non-empty when separation or similar was flagged
};

// ML logistic fit of contra_Y on intercept + {pro_X : X != Y} by Newton /
// IRLS steps; converged when max |gradient| <= 1e-8 within 50 iterations.
// Wald intervals from the inverse observed information. Separation is
// flagged (|beta| > 15 without convergence), never thrown.
LogisticModel fit_logistic(const MembershipTable& table, const std::string& outcome,
                           double ci_level = 0.99);

struct OddsResult {
  std::string pro_party;
  std::string contra_party;
  double a = 0, b = 0, c = 0, d = 0;  // post-correction cells
  double odds_ratio = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool corrected = false;  // Haldane-Anscombe 0.5 applied
};

// Closed-form 2x2 odds ratio (a*d)/(b*c) with Wald CI
// exp(ln OR +/- z * sqrt(1/a+1/b+1/c+1/d)). Zero cells get +0.5 on all
// four cells, flagged via `corrected`.
OddsResult odds_2x2(double a, double b, double c, double d, double level = 0.99);

// Two-sided standard-normal critical value for a confidence level in
// (0,1); rational approximation plus one Newton refinement, |err| < 1e-6.
double z_quantile(double level);

// Global: every account in >= 1 labeled community anywhere (the broadest
// choice, the default). Pair: per-cell risk set for (pro X, contra Y) --
// accounts active in a labeled community of some party other than Y, so
// Y's own natives do not enter the baseline.
enum class UniverseMode { Global, Pair };

struct HashjackCell {
  OddsResult odds;
  std::uint64_t universe = 0;  // rows the 2x2 was computed over
};

struct HashjackReport {
  std::vector<std::string> parties;
  std::map<std::string, LogisticModel> models;           // outcome -> model
  std::map<std::string, std::string> model_errors;       // outcome -> reason
  std::map<std::pair<std::string, std::string>, HashjackCell> cells;  // (pro X, contra Y)
  std::map<std::string, double> contra_relative_size;    // per party
  double ci_level = 0.99;
  UniverseMode universe_mode = UniverseMode::Global;
};

// One multivariate model per outcome party plus the univariate 2x2 odds
// for every (pro X, contra Y) pair, X != Y. Per-cell failures are
// recorded, the rest of the matrix is still produced.
HashjackReport hashjack_matrix(const MembershipTable& table, double ci_level = 0.99,
                               UniverseMode mode = UniverseMode::Global);

void annotate_contra_sizes(HashjackReport& report,
                           const std::vector<LabeledNetwork>& networks);

void write_membership_csv(const MembershipTable& table, const std::string& path);
MembershipTable read_membership_csv(const std::string& path);

void write_odds_matrix_csv(const HashjackReport& report, const std::string& path);
void write_models_json(const HashjackReport& report, const std::string& path);
void write_coefficients_csv(const HashjackReport& report, const std::string& path);

}  // namespace hashjack
