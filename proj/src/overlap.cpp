#include "hashjack/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hashjack/errors.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

using ordered_json = nlohmann::ordered_json;

int MembershipTable::party_index(const std::string& party) const {
  auto it = std::find(parties.begin(), parties.end(), party);
  if (it == parties.end()) throw AnalysisError("unknown party in membership table: " + party);
  return static_cast<int>(it - parties.begin());
}

MembershipTable membership_table(const std::vector<LabeledNetwork>& networks) {
  MembershipTable table;
  std::set<std::string> seen_tags;
  for (const auto& net : networks) {
    if (!net.graph || !net.partition || !net.polarity)
      throw AnalysisError("membership_table: incomplete labeled network");
    if (!seen_tags.insert(net.graph->hashtag).second)
      throw AnalysisError("membership_table: duplicate hashtag " + net.graph->hashtag);
  }
  if (networks.size() > 64) throw AnalysisError("membership_table supports at most 64 parties");

  for (const auto& net : networks) table.parties.push_back(net.graph->hashtag);

  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> rows;
  std::set<std::string> unlabeled_only;
  for (std::size_t p = 0; p < networks.size(); ++p) {
    const auto& net = networks[p];
    for (int v = 0; v < net.graph->node_count(); ++v) {
      int c = net.partition->assignment[static_cast<std::size_t>(v)];
      ClusterLabel label = net.polarity->label_of(c);
      if (label == ClusterLabel::Unlabeled) {
        unlabeled_only.insert(net.graph->account(v));
        continue;
      }
      auto& [pro, contra] = rows[net.graph->account(v)];
      if (label == ClusterLabel::Pro) pro |= 1ull << p;
      else contra |= 1ull << p;
    }
  }
  for (const auto& acc : unlabeled_only)
    if (!rows.count(acc)) ++table.excluded_unlabeled;

  table.accounts.reserve(rows.size());
  table.pro_mask.reserve(rows.size());
  table.contra_mask.reserve(rows.size());
  for (const auto& [account, masks] : rows) {
    table.accounts.push_back(account);
    table.pro_mask.push_back(masks.first);
    table.contra_mask.push_back(masks.second);
  }
  return table;
}

double z_quantile(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("confidence level must lie strictly between 0 and 1");
  const double p = 0.5 + level / 2.0;  // two-sided

  // Acklam's rational approximation of the inverse normal CDF
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // one Newton step on Phi(x) - p
  const double inv_sqrt2 = 0.7071067811865475244;
  const double inv_sqrt2pi = 0.3989422804014326779;
  double cdf = 0.5 * std::erfc(-x * inv_sqrt2);
  double pdf = inv_sqrt2pi * std::exp(-0.5 * x * x);
  if (pdf > 0.0) x -= (cdf - p) / pdf;
  return x;
}

OddsResult odds_2x2(double a, double b, double c, double d, double level) {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw AnalysisError("odds_2x2: negative cell count");
  if (a + b + c + d < 1) throw AnalysisError("odds_2x2: empty table");

  OddsResult res;
  if (a == 0 || b == 0 || c == 0 || d == 0) {
    a += 0.5;
    b += 0.5;
    c += 0.5;
    d += 0.5;
    res.corrected = true;
  }
  res.a = a;
  res.b = b;
  res.c = c;
  res.d = d;
  res.odds_ratio = (a * d) / (b * c);
  const double z = z_quantile(level);
  const double se = std::sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
  res.ci_low = std::exp(std::log(res.odds_ratio) - z * se);
  res.ci_high = std::exp(std::log(res.odds_ratio) + z * se);
  return res;
}

namespace {

constexpr int kMaxIterations = 50;
constexpr double kGradientTol = 1e-8;
constexpr double kSeparationBeta = 15.0;

// Weighted ML fit over collapsed covariate patterns. Columns: intercept
// first, then one column per predictor.
struct IrlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;  // inverse observed information
  bool converged = false;
  int iterations = 0;
  std::string diagnostic;
};

IrlsFit irls(const std::vector<std::vector<double>>& patterns,
             const std::vector<double>& count_y1, const std::vector<double>& count_y0) {
  const int p = static_cast<int>(patterns.front().size());
  const auto g = patterns.size();

  Eigen::MatrixXd X(g, p);
  for (std::size_t i = 0; i < g; ++i)
    for (int j = 0; j < p; ++j) X(static_cast<Eigen::Index>(i), j) = patterns[i][static_cast<std::size_t>(j)];
  Eigen::VectorXd n1(g), n0(g);
  for (std::size_t i = 0; i < g; ++i) {
    n1(static_cast<Eigen::Index>(i)) = count_y1[i];
    n0(static_cast<Eigen::Index>(i)) = count_y0[i];
  }

  IrlsFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);

  Eigen::MatrixXd info(p, p);
  for (int it = 1; it <= kMaxIterations; ++it) {
    fit.iterations = it;
    Eigen::VectorXd eta = X * fit.beta;
    Eigen::VectorXd mu = (1.0 + (-eta.array()).exp()).inverse().matrix();
    // gradient of the log-likelihood and observed information
    Eigen::VectorXd resid =
        (n1.array() * (1.0 - mu.array()) - n0.array() * mu.array()).matrix();
    Eigen::VectorXd grad = X.transpose() * resid;
    Eigen::VectorXd w = ((n1 + n0).array() * mu.array() * (1.0 - mu.array())).matrix();
    info = X.transpose() * w.asDiagonal() * X;

    if (grad.lpNorm<Eigen::Infinity>() <= kGradientTol) {
      fit.converged = true;
      break;
    }

    Eigen::LDLT<Eigen::MatrixXd> solver(info);
    if (solver.info() != Eigen::Success) {
      fit.diagnostic = "information matrix not factorizable";
      break;
    }
    Eigen::VectorXd step = solver.solve(grad);
    if (!step.allFinite()) {
      fit.diagnostic = "non-finite Newton step";
      break;
    }
    fit.beta += step;
  }

  // runaway coefficients mean the ML estimate lives at infinity; the
  // gradient can still vanish numerically once the likelihood saturates
  if (fit.diagnostic.empty() && fit.beta.lpNorm<Eigen::Infinity>() > kSeparationBeta) {
    fit.converged = false;
    fit.diagnostic = "complete or quasi-complete separation suspected";
  }

  Eigen::LDLT<Eigen::MatrixXd> solver(info);
  if (solver.info() == Eigen::Success) {
    fit.cov = solver.solve(Eigen::MatrixXd::Identity(p, p));
  } else {
    fit.cov = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  }
  return fit;
}

CoefficientEstimate make_estimate(const std::string& name, double beta, double var, double z) {
  CoefficientEstimate est;
  est.predictor = name;
  est.beta = beta;
  est.se = var >= 0.0 ? std::sqrt(var) : std::numeric_limits<double>::quiet_NaN();
  est.odds = std::exp(beta);
  est.ci_low = std::exp(beta - z * est.se);
  est.ci_high = std::exp(beta + z * est.se);
  return est;
}

}  // namespace

LogisticModel fit_logistic(const MembershipTable& table, const std::string& outcome,
                           double ci_level) {
  if (table.universe_size() == 0) throw AnalysisError("fit_logistic: empty membership table");
  const int y_idx = table.party_index(outcome);

  std::vector<int> predictor_idx;
  for (int p = 0; p < static_cast<int>(table.parties.size()); ++p)
    if (p != y_idx) predictor_idx.push_back(p);

  // collapse rows to covariate patterns; at most 2^k distinct
  std::map<std::vector<double>, std::pair<double, double>> groups;
  std::uint64_t y_total = 0;
  for (std::size_t row = 0; row < table.universe_size(); ++row) {
    std::vector<double> x(predictor_idx.size() + 1, 1.0);
    for (std::size_t j = 0; j < predictor_idx.size(); ++j)
      x[j + 1] = table.pro(row, predictor_idx[static_cast<std::size_t>(j)]) ? 1.0 : 0.0;
    bool y = table.contra(row, y_idx);
    y_total += y ? 1 : 0;
    auto& [n1, n0] = groups[std::move(x)];
    if (y) n1 += 1.0;
    else n0 += 1.0;
  }
  if (y_total == 0 || y_total == table.universe_size())
    throw AnalysisError("fit_logistic: outcome contra_" + outcome + " is constant");

  std::vector<std::vector<double>> patterns;
  std::vector<double> n1, n0;
  for (const auto& [x, counts] : groups) {
    patterns.push_back(x);
    n1.push_back(counts.first);
    n0.push_back(counts.second);
  }

  IrlsFit fit = irls(patterns, n1, n0);

  LogisticModel model;
  model.outcome = outcome;
  model.n = table.universe_size();
  model.converged = fit.converged;
  model.iterations = fit.iterations;
  model.ci_level = ci_level;
  model.diagnostic = fit.diagnostic;

  const double z = z_quantile(ci_level);
  model.intercept = make_estimate("(intercept)", fit.beta(0), fit.cov(0, 0), z);
  for (std::size_t j = 0; j < predictor_idx.size(); ++j) {
    auto col = static_cast<Eigen::Index>(j + 1);
    model.coefficients.push_back(
        make_estimate(table.parties[static_cast<std::size_t>(predictor_idx[j])],
                      fit.beta(col), fit.cov(col, col), z));
  }
  return model;
}

HashjackReport hashjack_matrix(const MembershipTable& table, double ci_level,
                               UniverseMode mode) {
  if (table.parties.size() < 2)
    throw AnalysisError("hashjack_matrix needs at least 2 labeled parties");

  HashjackReport report;
  report.parties = table.parties;
  report.ci_level = ci_level;
  report.universe_mode = mode;

  for (const auto& outcome : table.parties) {
    try {
      report.models[outcome] = fit_logistic(table, outcome, ci_level);
    } catch (const AnalysisError& e) {
      report.model_errors[outcome] = e.what();
    }
  }

  const int np = static_cast<int>(table.parties.size());
  for (int xi = 0; xi < np; ++xi) {
    for (int yi = 0; yi < np; ++yi) {
      if (xi == yi) continue;
      double a = 0, b = 0, c = 0, d = 0;
      std::uint64_t universe = 0;
      // Pair mode restricts the risk set to accounts active in some
      // discourse other than Y's own: everyone who could have carried a
      // hashtag into Y, excluding Y's native clusters.
      const std::uint64_t risk_mask =
          (~(1ull << yi)) & ((np >= 64 ? ~0ull : (1ull << np) - 1));
      for (std::size_t row = 0; row < table.universe_size(); ++row) {
        if (mode == UniverseMode::Pair &&
            ((table.pro_mask[row] | table.contra_mask[row]) & risk_mask) == 0)
          continue;
        ++universe;
        bool px = table.pro(row, xi);
        bool cy = table.contra(row, yi);
        if (px && cy) ++a;
        else if (px) ++b;
        else if (cy) ++c;
        else ++d;
      }
      HashjackCell cell;
      cell.universe = universe;
      cell.odds = odds_2x2(a, b, c, d, ci_level);
      cell.odds.pro_party = table.parties[static_cast<std::size_t>(xi)];
      cell.odds.contra_party = table.parties[static_cast<std::size_t>(yi)];
      report.cells[{cell.odds.pro_party, cell.odds.contra_party}] = cell;
    }
  }
  return report;
}

void annotate_contra_sizes(HashjackReport& report,
                           const std::vector<LabeledNetwork>& networks) {
  for (const auto& net : networks) {
    int contra_comm = net.polarity->community_with(ClusterLabel::Contra);
    double rel = 0.0;
    if (contra_comm >= 0 && net.graph->node_count() > 0)
      rel = static_cast<double>(
                net.partition->community_sizes[static_cast<std::size_t>(contra_comm)]) /
            static_cast<double>(net.graph->node_count());
    report.contra_relative_size[net.graph->hashtag] = rel;
  }
}

void write_membership_csv(const MembershipTable& table, const std::string& path) {
  std::ostringstream out;
  out << "account";
  for (const auto& p : table.parties) out << ",pro_" << p << ",contra_" << p;
  out << '\n';
  for (std::size_t row = 0; row < table.universe_size(); ++row) {
    out << csv_escape(table.accounts[row]);
    for (int p = 0; p < static_cast<int>(table.parties.size()); ++p)
      out << ',' << (table.pro(row, p) ? 1 : 0) << ',' << (table.contra(row, p) ? 1 : 0);
    out << '\n';
  }
  write_file(path, out.str());
}

MembershipTable read_membership_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open membership file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty membership file: " + path);
  auto header = split(trim(line), ',');
  if (header.size() < 3 || header[0] != "account" || (header.size() - 1) % 2 != 0)
    throw InputError("bad membership header in " + path);

  MembershipTable table;
  for (std::size_t i = 1; i < header.size(); i += 2) {
    if (header[i].rfind("pro_", 0) != 0 || header[i + 1].rfind("contra_", 0) != 0 ||
        header[i].substr(4) != header[i + 1].substr(7))
      throw InputError("bad membership column pair in " + path + ": " + header[i]);
    table.parties.push_back(header[i].substr(4));
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != header.size())
      throw InputError(path + " line " + std::to_string(lineno) + ": wrong field count");
    table.accounts.push_back(parts[0]);
    std::uint64_t pro = 0, contra = 0;
    for (std::size_t p = 0; p < table.parties.size(); ++p) {
      if (parts[1 + 2 * p] == "1") pro |= 1ull << p;
      if (parts[2 + 2 * p] == "1") contra |= 1ull << p;
    }
    table.pro_mask.push_back(pro);
    table.contra_mask.push_back(contra);
  }
  return table;
}

void write_odds_matrix_csv(const HashjackReport& report, const std::string& path) {
  std::ostringstream out;
  out << "pro_party,contra_party,a,b,c,d,odds,ci_low,ci_high,corrected\n";
  for (const auto& [key, cell] : report.cells) {
    const auto& o = cell.odds;
    out << csv_escape(key.first) << ',' << csv_escape(key.second) << ',' << format_double(o.a)
        << ',' << format_double(o.b) << ',' << format_double(o.c) << ',' << format_double(o.d)
        << ',' << format_double(o.odds_ratio) << ',' << format_double(o.ci_low) << ','
        << format_double(o.ci_high) << ',' << (o.corrected ? 1 : 0) << '\n';
  }
  write_file(path, out.str());
}

void write_models_json(const HashjackReport& report, const std::string& path) {
  ordered_json root;
  root["ci_level"] = report.ci_level;
  root["z"] = z_quantile(report.ci_level);
  root["universe_mode"] = report.universe_mode == UniverseMode::Global ? "global" : "pair";
  ordered_json models = ordered_json::object();
  auto coef_json = [](const CoefficientEstimate& e) {
    ordered_json j;
    j["beta"] = e.beta;
    j["se"] = e.se;
    j["odds"] = e.odds;
    j["ci_low"] = e.ci_low;
    j["ci_high"] = e.ci_high;
    return j;
  };
  for (const auto& [outcome, model] : report.models) {
    ordered_json m;
    m["outcome"] = "contra_" + outcome;
    m["n"] = model.n;
    m["converged"] = model.converged;
    m["iterations"] = model.iterations;
    if (!model.diagnostic.empty()) m["diagnostic"] = model.diagnostic;
    m["intercept"] = coef_json(model.intercept);
    ordered_json coefs = ordered_json::object();
    for (const auto& c : model.coefficients) coefs["pro_" + c.predictor] = coef_json(c);
    m["coefficients"] = coefs;
    if (report.contra_relative_size.count(outcome))
      m["contra_relative_size"] = report.contra_relative_size.at(outcome);
    models[outcome] = m;
  }
  root["models"] = models;
  ordered_json errors = ordered_json::object();
  for (const auto& [outcome, err] : report.model_errors) errors[outcome] = err;
  if (!errors.empty()) root["model_errors"] = errors;
  write_file(path, root.dump(2) + "\n");
}

void write_coefficients_csv(const HashjackReport& report, const std::string& path) {
  std::ostringstream out;
  out << "kind,contra_party,pro_party,odds,ci_low,ci_high,contra_relative_size\n";
  auto rel_size = [&](const std::string& party) {
    auto it = report.contra_relative_size.find(party);
    return it == report.contra_relative_size.end() ? std::string() : format_double(it->second);
  };
  for (const auto& [outcome, model] : report.models)
    for (const auto& c : model.coefficients)
      out << "multivariate," << csv_escape(outcome) << ',' << csv_escape(c.predictor) << ','
          << format_double(c.odds) << ',' << format_double(c.ci_low) << ','
          << format_double(c.ci_high) << ',' << rel_size(outcome) << '\n';
  for (const auto& [key, cell] : report.cells)
    out << "univariate," << csv_escape(key.second) << ',' << csv_escape(key.first) << ','
        << format_double(cell.odds.odds_ratio) << ',' << format_double(cell.odds.ci_low) << ','
        << format_double(cell.odds.ci_high) << ',' << rel_size(key.second) << '\n';
  write_file(path, out.str());
}

}  // namespace hashjack
