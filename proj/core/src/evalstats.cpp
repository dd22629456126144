#include "archmark/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "archmark/error.hpp"
#include "json.hpp"

namespace archmark {

ErrorSet landmark_errors(const LandmarkSet& predicted, const LandmarkSet& truth, const std::string& model_id) {
  const auto placeholder = default_landmark_name(7);
  const auto& n1 = predicted.at(7).name;
  const auto& n2 = truth.at(7).name;
  if (n1 != n2 && n1 != placeholder && n2 != placeholder) {
    throw Error(ErrorCode::SchemaMismatch, "landmark 7 is '" + n1 + "' in one set and '" + n2 + "' in the other");
  }
  ErrorSet out;
  for (int i = 1; i <= kLandmarkCount; ++i) {
    if (!predicted.present(i) || !truth.present(i)) {
      ++out.skipped;
      continue;
    }
    out.samples.push_back({model_id, i, (predicted.at(i).position - truth.at(i).position).norm()});
  }
  return out;
}

double threshold_from_volume(double volume, double fraction) {
  if (!(volume > 0.0)) throw Error(ErrorCode::NonpositiveVolume, "volume must be > 0");
  if (!(fraction > 0.0)) throw Error(ErrorCode::InvalidParams, "volume fraction must be > 0");
  return fraction * volume;
}

double accuracy(std::span<const double> errors, double threshold) {
  if (errors.empty()) throw Error(ErrorCode::EmptyErrors, "accuracy of an empty error list");
  const auto hits = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= threshold; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(errors.size());
}

namespace {

struct Moments {
  double n = 0, mean = 0, sd = 0, m2 = 0, m3 = 0, sumsq = 0, max = 0, min = 0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = static_cast<double>(x.size());
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / m.n;
  m.max = *std::max_element(x.begin(), x.end());
  m.min = *std::min_element(x.begin(), x.end());
  for (double v : x) {
    const double d = v - m.mean;
    m.m2 += d * d;
    m.m3 += d * d * d;
    m.sumsq += v * v;
  }
  m.sd = x.size() > 1 ? std::sqrt(m.m2 / (m.n - 1.0)) : 0.0;
  m.m2 /= m.n;
  m.m3 /= m.n;
  return m;
}

double skewness(const Moments& m) { return m.m2 > 0.0 ? m.m3 / std::pow(m.m2, 1.5) : 0.0; }

LandmarkStatsRow stats_row(int landmark, std::span<const double> errors, double norm) {
  const auto m = moments(errors);
  LandmarkStatsRow r;
  r.landmark = landmark;
  r.n = static_cast<int>(errors.size());
  r.mean = m.mean;
  r.rmse = std::sqrt(m.sumsq / m.n);
  r.sd = m.sd;
  r.max = m.max;
  r.min = m.min;
  r.nme = 100.0 * m.mean / norm;
  r.cov = m.mean != 0.0 ? m.sd / m.mean : std::numeric_limits<double>::quiet_NaN();
  r.skewness = skewness(m);
  return r;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw Error(ErrorCode::InvalidParams, "incomplete beta continued fraction did not converge");
}

}  // namespace

LandmarkStatsRow per_landmark_stats(int landmark, std::span<const double> errors, double normalization_distance) {
  if (errors.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need at least two errors per landmark");
  if (!(normalization_distance > 0.0)) throw Error(ErrorCode::InvalidParams, "normalization distance must be > 0");
  auto row = stats_row(landmark, errors, normalization_distance);
  if (row.mean == 0.0) throw Error(ErrorCode::ZeroMean, "coefficient of variation undefined for zero mean");
  return row;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return x;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_p_two_sided(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidParams, "degrees of freedom must be > 0");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  return std::clamp(incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
}

TTest one_sample_t(std::span<const double> errors, double mu0) {
  if (errors.size() < 2) throw Error(ErrorCode::InsufficientSamples, "one-sample t needs n >= 2");
  const auto m = moments(errors);
  if (m.sd == 0.0) throw Error(ErrorCode::ZeroVariance, "one-sample t undefined for zero variance");
  TTest r;
  r.df = m.n - 1.0;
  r.t = (m.mean - mu0) / (m.sd / std::sqrt(m.n));
  r.p = student_t_p_two_sided(r.t, r.df);
  return r;
}

TTest two_sample_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::InsufficientSamples, "two-sample t needs n >= 2 per group");
  const auto ma = moments(a), mb = moments(b);
  const double va = ma.sd * ma.sd / ma.n;
  const double vb = mb.sd * mb.sd / mb.n;
  if (va + vb == 0.0) throw Error(ErrorCode::ZeroVariance, "two-sample t undefined for constant groups");
  TTest r;
  r.t = (ma.mean - mb.mean) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
  r.p = student_t_p_two_sided(r.t, r.df);
  return r;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
  if (m == 0) m = p_values.size();
  std::vector<double> out;
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidP, "p-value outside [0, 1]");
    out.push_back(std::min(1.0, p * static_cast<double>(m)));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

SignificanceResult guarded(auto&& fn) {
  SignificanceResult r;
  try {
    r.test = fn();
  } catch (const Error& e) {
    r.note = std::string(to_string(e.code()));
  }
  return r;
}

}  // namespace

EvaluationReport build_report(std::span<const ModelEvaluation> models, const EvalConfig& config) {
  EvaluationReport rep;
  auto& o = rep.overall;
  double hits = 0.0;
  double volume_sum = 0.0, norm_sum = 0.0;
  int norm_count = 0;
  for (const auto& m : models) {
    const double t = threshold_from_volume(m.volume_mm3, config.volume_fraction);
    auto set = landmark_errors(m.predicted, m.truth, m.model_id);
    o.skipped += set.skipped;
    for (const auto& s : set.samples) {
      if (s.error <= t) hits += 1.0;
      rep.samples.push_back(s);
    }
    volume_sum += m.volume_mm3;
    if (m.truth.present(15) && m.truth.present(16)) {
      norm_sum += (m.truth.at(15).position - m.truth.at(16).position).norm();
      ++norm_count;
    }
  }
  if (rep.samples.empty()) throw Error(ErrorCode::EmptyErrors, "no landmark pair could be compared");

  if (config.normalization_distance_mm > 0.0) {
    o.normalization_distance = config.normalization_distance_mm;
  } else {
    if (norm_count == 0) throw Error(ErrorCode::MissingLandmark, "normalization needs ground-truth landmarks 15 and 16");
    o.normalization_distance = norm_sum / norm_count;
  }
  if (!(o.normalization_distance > 0.0)) throw Error(ErrorCode::InvalidValue, "normalization distance is zero");

  std::vector<double> pooled;
  std::map<int, std::vector<double>> by_landmark;
  for (const auto& s : rep.samples) {
    pooled.push_back(s.error);
    by_landmark[s.landmark].push_back(s.error);
  }
  const auto pm = moments(pooled);
  o.n = static_cast<int>(pooled.size());
  o.accuracy = 100.0 * hits / static_cast<double>(pooled.size());
  o.mae = pm.mean;
  o.mae_sd = pm.sd;
  o.max = pm.max;
  o.min = pm.min;
  o.skewness = skewness(pm);
  o.mean_volume = volume_sum / static_cast<double>(models.size());
  o.error_to_volume_ratio = o.mae / o.mean_volume;

  std::vector<double> p_defined;
  std::vector<int> p_landmark;
  for (int k = 1; k <= kLandmarkCount; ++k) {
    const auto it = by_landmark.find(k);
    auto& sig = rep.landmark_t[static_cast<std::size_t>(k - 1)];
    if (it == by_landmark.end() || it->second.size() < 2) {
      sig.note = std::string(to_string(ErrorCode::InsufficientSamples));
      continue;
    }
    rep.rows.push_back(stats_row(k, it->second, o.normalization_distance));
    sig = guarded([&] { return one_sample_t(it->second, 0.0); });
    if (sig.test) {
      p_defined.push_back(sig.test->p);
      p_landmark.push_back(k);
    }
  }
  const auto adjusted = bonferroni(p_defined, kLandmarkCount);
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    rep.landmark_p_bonferroni[static_cast<std::size_t>(p_landmark[i] - 1)] = adjusted[i];
  }

  std::vector<double> edge, other;
  for (const auto& s : rep.samples) {
    const bool in_edge = std::find(config.edge_group.begin(), config.edge_group.end(), s.landmark) !=
                         config.edge_group.end();
    (in_edge ? edge : other).push_back(s.error);
  }
  rep.group_t = guarded([&] { return two_sample_t(edge, other); });
  return rep;
}

namespace {

std::string fmt(double v, int digits = 4) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json sig_json(const SignificanceResult& s) {
  if (!s.test) return {{"defined", false}, {"reason", s.note}};
  return {{"defined", true}, {"t", num(s.test->t)}, {"p", num(s.test->p)}, {"df", num(s.test->df)}};
}

}  // namespace

std::string report_table_csv(const EvaluationReport& report) {
  std::string out = "Landmark,RMSE±SD,Max–Min,NME,CoV,Skewness\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.landmark) + ',' + fmt(r.rmse) + " ± " + fmt(r.sd) + ',' + fmt(r.max) + " – " +
           fmt(r.min) + ',' + fmt(r.nme) + ',' + fmt(r.cov) + ',' + fmt(r.skewness) + '\n';
  }
  return out;
}

std::string report_json(const EvaluationReport& report) {
  using nlohmann::json;
  const auto& o = report.overall;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"landmark", r.landmark},
                    {"n", r.n},
                    {"mean_mm", num(r.mean)},
                    {"rmse_mm", num(r.rmse)},
                    {"sd_mm", num(r.sd)},
                    {"max_mm", num(r.max)},
                    {"min_mm", num(r.min)},
                    {"nme_percent", num(r.nme)},
                    {"cov", num(r.cov)},
                    {"skewness", num(r.skewness)}});
  }
  json per_landmark = json::array();
  for (int k = 0; k < kLandmarkCount; ++k) {
    auto entry = sig_json(report.landmark_t[static_cast<std::size_t>(k)]);
    entry["landmark"] = k + 1;
    const auto& adj = report.landmark_p_bonferroni[static_cast<std::size_t>(k)];
    entry["p_bonferroni"] = adj ? num(*adj) : json(nullptr);
    per_landmark.push_back(entry);
  }
  json samples = json::array();
  for (const auto& s : report.samples) {
    samples.push_back({{"model", s.model_id}, {"landmark", s.landmark}, {"error_mm", num(s.error)}});
  }
  json doc = {
      {"overall",
       {{"n", o.n},
        {"skipped", o.skipped},
        {"accuracy_percent", num(o.accuracy)},
        {"mae_mm", num(o.mae)},
        {"mae_sd_mm", num(o.mae_sd)},
        {"max_mm", num(o.max)},
        {"min_mm", num(o.min)},
        {"skewness", num(o.skewness)},
        {"mean_volume_mm3", num(o.mean_volume)},
        {"error_to_volume_ratio", num(o.error_to_volume_ratio)},
        {"normalization_distance_mm", num(o.normalization_distance)}}},
      {"rows", rows},
      {"significance",
       {{"one_sample_vs_zero", per_landmark}, {"bonferroni_m", kLandmarkCount}, {"edge_vs_other", sig_json(report.group_t)}}},
      {"samples", samples}};
  return doc.dump(2) + "\n";
}

}  // namespace archmark
