#include "tskd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "tskd/distill.hpp"
#include "tskd/expansion.hpp"
#include "tskd/metrics.hpp"
#include "tskd/rng.hpp"
#include "tskd/student.hpp"
#include "tskd/teacher.hpp"

namespace tskd {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames{{
    {Method::kTeacherOnly, "teacher-only"},
    {Method::kStudentOnly, "student-only"},
    {Method::kDistillKd, "distill-kd"},
    {Method::kDistillDkd, "distill-dkd"},
    {Method::kOrderNLlm, "tsk-order-n-llm"},
    {Method::kOrderNGd, "tsk-order-n-gd"},
}};

constexpr std::uint64_t kStudentRole = 1;
constexpr std::uint64_t kTeacherRole = 2;
constexpr std::uint64_t kInitRole = 3;
constexpr std::uint64_t kInnerPlanRole = 4;
constexpr std::uint64_t kOuterFold = 0xffffffffULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Split {
  Matrix train_X;
  std::vector<int> train_y;
  Matrix test_X;
  std::vector<int> test_y;
};

Split make_split(const Matrix& X, const std::vector<int>& y, const std::vector<Index>& train,
                 const std::vector<Index>& test, bool renormalize) {
  Split s;
  s.train_X.resize(static_cast<Index>(train.size()), X.cols());
  s.test_X.resize(static_cast<Index>(test.size()), X.cols());
  for (std::size_t i = 0; i < train.size(); ++i) {
    s.train_X.row(static_cast<Index>(i)) = X.row(train[i]);
    s.train_y.push_back(y[train[i]]);
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    s.test_X.row(static_cast<Index>(i)) = X.row(test[i]);
    s.test_y.push_back(y[test[i]]);
  }
  if (renormalize) {
    NormalizedPair pair = normalize(s.train_X, s.test_X);
    s.train_X = std::move(pair.train);
    s.test_X = std::move(pair.applied);
  }
  return s;
}

bool uses_teacher(Method m) { return m == Method::kDistillKd || m == Method::kDistillDkd; }

// Fits and scores one method on one train/test split, caching everything that depends only on K.
class SplitEvaluator {
 public:
  SplitEvaluator(const Split& split, Index classes, Method method, const RunSettings& settings, std::uint64_t seed,
                 std::uint64_t fold_key, std::uint64_t inner_key)
      : split_(split),
        classes_(classes),
        method_(method),
        settings_(settings),
        seed_(seed),
        fold_key_(fold_key),
        inner_key_(inner_key),
        onehot_(one_hot(split.train_y, classes)) {}

  std::vector<int> predict(const Hyperparams& hp) {
    Prepared& p = prepare(hp.rules);
    const TrainConfig train = settings_.grid.train_config();
    switch (method_) {
      case Method::kTeacherOnly:
      case Method::kOrderNLlm:
        return p.llm_test_classes;
      case Method::kStudentOnly:
      case Method::kOrderNGd: {
        const TrainResult r = train_student_on_design(p.init, p.train_design, onehot_, train);
        return argmax_rows(p.test_design * r.model.coefficients);
      }
      case Method::kDistillDkd: {
        DistillConfig cfg;
        cfg.temperature = hp.temperature;
        cfg.target_weight = hp.zeta;
        cfg.nontarget_weight = hp.lambda;
        cfg.ce_weight = hp.phi;
        cfg.train = train;
        const TrainResult r = distill_on_design(p.teacher_train_logits, p.init, p.train_design, onehot_, cfg);
        return argmax_rows(p.test_design * r.model.coefficients);
      }
      case Method::kDistillKd: {
        KdConfig cfg;
        cfg.temperature = hp.temperature;
        cfg.kd_weight = hp.zeta;
        cfg.ce_weight = hp.phi;
        cfg.train = train;
        const TrainResult r = vanilla_kd_on_design(p.teacher_train_logits, p.init, p.train_design, onehot_, cfg);
        return argmax_rows(p.test_design * r.model.coefficients);
      }
    }
    throw std::logic_error("unhandled method");
  }

 private:
  struct Prepared {
    Index rules = 0;
    StudentModel init;
    Matrix train_design;
    Matrix test_design;
    Matrix teacher_train_logits;
    std::vector<int> llm_test_classes;
  };

  std::uint64_t role_seed(Index rules, std::uint64_t role) const {
    return derive_seed(seed_, {fold_key_, inner_key_, static_cast<std::uint64_t>(rules), role});
  }

  Prepared& prepare(Index rules) {
    if (prepared_ && prepared_->rules == rules) return *prepared_;
    prepared_.reset();
    Prepared p;
    p.rules = rules;
    const Index m = split_.train_X.cols();
    const WidthPolicy width{settings_.width};
    const RuleBase student_rules = build_rule_base(rules, m, width, role_seed(rules, kStudentRole));
    const std::vector<double> encoding = default_class_encoding(classes_);

    if (method_ == Method::kTeacherOnly || method_ == Method::kOrderNLlm) {
      const bool teacher = method_ == Method::kTeacherOnly;
      const RuleBase rb = teacher && !settings_.shared_rule_base
                              ? build_rule_base(rules, m, width, role_seed(rules, kTeacherRole))
                              : student_rules;
      TeacherOptions options;
      options.order = teacher ? settings_.teacher_order : settings_.order;
      options.class_labels = encoding;
      const TeacherModel model =
          fit_teacher(rb, split_.train_X, encode_labels(split_.train_y, encoding), settings_.grid.reg_L, options);
      p.llm_test_classes = teacher_classes(model, predict_teacher(model, split_.test_X));
      prepared_ = std::move(p);
      return *prepared_;
    }

    const int order = method_ == Method::kOrderNGd ? settings_.order : 1;
    p.init = initialize_student(student_rules, classes_, settings_.init, role_seed(rules, kInitRole), order);
    p.train_design = student_design(p.init, split_.train_X);
    p.test_design = student_design(p.init, split_.test_X);
    if (uses_teacher(method_)) {
      const RuleBase teacher_rules = settings_.shared_rule_base
                                         ? student_rules
                                         : build_rule_base(rules, m, width, role_seed(rules, kTeacherRole));
      TeacherOptions options;
      options.order = settings_.teacher_order;
      options.class_labels = encoding;
      const TeacherModel teacher = fit_teacher(teacher_rules, split_.train_X,
                                               encode_labels(split_.train_y, encoding), settings_.grid.reg_L, options);
      p.teacher_train_logits = teacher_logits(predict_teacher(teacher, split_.train_X), encoding);
    }
    prepared_ = std::move(p);
    return *prepared_;
  }

  const Split& split_;
  Index classes_;
  Method method_;
  const RunSettings& settings_;
  std::uint64_t seed_;
  std::uint64_t fold_key_;
  std::uint64_t inner_key_;
  Matrix onehot_;
  std::optional<Prepared> prepared_;
};

std::vector<Hyperparams> candidates(Method method, const RunSettings& settings) {
  if (settings.mode == GridMode::kNone) return {settings.fixed};
  auto sorted = [](auto values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
  };
  const auto rules = sorted(settings.grid.rules);
  std::vector<Hyperparams> out;
  if (!uses_teacher(method)) {
    for (Index k : rules) {
      Hyperparams hp = settings.fixed;
      hp.rules = k;
      out.push_back(hp);
    }
    return out;
  }
  const auto taus = sorted(settings.grid.temperatures);
  const auto zetas = settings.mode == GridMode::kCoarse ? std::vector<double>{1.0} : sorted(settings.grid.zetas);
  const auto lambdas = method == Method::kDistillDkd ? sorted(settings.grid.lambdas)
                                                     : std::vector<double>{settings.fixed.lambda};
  const auto phis = sorted(settings.grid.phis);
  for (Index k : rules)
    for (double tau : taus)
      for (double zeta : zetas)
        for (double lambda : lambdas)
          for (double phi : phis) out.push_back(Hyperparams{k, tau, zeta, lambda, phi});
  return out;
}

Hyperparams select_by_inner_cv(Method method, const Matrix& X, const std::vector<int>& y, Index classes,
                               const RunSettings& settings, std::uint64_t seed, int outer_fold) {
  const std::vector<Hyperparams> grid = candidates(method, settings);
  if (grid.size() == 1) return grid.front();

  const FoldPlan plan = stratified_folds(
      y, settings.inner_folds, derive_seed(seed, {static_cast<std::uint64_t>(outer_fold), kInnerPlanRole}));
  std::vector<Split> splits;
  for (int f = 0; f < settings.inner_folds; ++f) {
    splits.push_back(make_split(X, y, plan.train_indices(f), plan.test_indices(f), !settings.global_normalize));
  }
  std::vector<SplitEvaluator> evaluators;
  for (int f = 0; f < settings.inner_folds; ++f) {
    evaluators.emplace_back(splits[f], classes, method, settings, seed, static_cast<std::uint64_t>(outer_fold),
                            static_cast<std::uint64_t>(f));
  }

  std::optional<Hyperparams> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const Hyperparams& hp : grid) {
    double score = 0.0;
    try {
      for (int f = 0; f < settings.inner_folds; ++f) {
        score += accuracy(evaluators[f].predict(hp), splits[f].test_y);
      }
    } catch (const TrainingDiverged&) {
      continue;
    }
    score /= settings.inner_folds;
    if (score > best_score) {
      best_score = score;
      best = hp;
    }
  }
  if (!best) throw TrainingDiverged(0);
  return *best;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string_view method_name(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  throw std::invalid_argument("unknown method");
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::vector<Index> GridSpec::default_rule_range() {
  std::vector<Index> out;
  for (Index k = 1; k <= 20; ++k) out.push_back(k);
  return out;
}

void GridSpec::validate() const {
  if (rules.empty() || temperatures.empty() || zetas.empty() || lambdas.empty() || phis.empty() || seeds.empty()) {
    throw std::invalid_argument("grid candidate sets must be non-empty");
  }
  for (Index k : rules) {
    if (k < 1) throw std::invalid_argument("grid rule counts must be positive");
  }
  if (!(reg_L > 0.0)) throw std::invalid_argument("regularization L must be positive");
  if (folds < 2) throw std::invalid_argument("fold count must be at least 2");
  train_config().validate();
}

std::vector<FoldRecord> run_method(Method method, const Dataset& ds, std::string_view dataset_name,
                                   const RunSettings& settings, std::uint64_t seed) {
  ds.validate();
  settings.grid.validate();
  if (settings.inner_folds < 2) throw std::invalid_argument("inner fold count must be at least 2");

  const Dataset data = settings.global_normalize ? globally_normalized(ds) : ds;
  const FoldPlan plan = stratified_folds(data.y, settings.grid.folds, seed);
  std::vector<FoldRecord> records;
  for (int fold = 0; fold < settings.grid.folds; ++fold) {
    FoldRecord rec;
    rec.method = std::string(method_name(method));
    rec.dataset = std::string(dataset_name);
    rec.seed = seed;
    rec.fold = fold;
    const Split split =
        make_split(data.X, data.y, plan.train_indices(fold), plan.test_indices(fold), !settings.global_normalize);
    try {
      const auto search_start = Clock::now();
      rec.params = select_by_inner_cv(method, split.train_X, split.train_y, data.class_count, settings, seed, fold);
      if (settings.mode != GridMode::kNone) rec.search_seconds = seconds_since(search_start);
      rec.rules = rec.params.rules;

      const auto start = Clock::now();
      SplitEvaluator evaluator(split, data.class_count, method, settings, seed, static_cast<std::uint64_t>(fold),
                               kOuterFold);
      const std::vector<int> predicted = evaluator.predict(rec.params);
      rec.seconds = seconds_since(start);
      rec.accuracy = accuracy(predicted, split.test_y);
      rec.weighted_f = weighted_f(predicted, split.test_y, data.class_count);
    } catch (const TrainingDiverged& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

ExperimentReport summarize(std::vector<FoldRecord> records) {
  ExperimentReport report;
  report.records = std::move(records);
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& r : report.records) {
    const auto key = std::make_pair(r.method, r.dataset);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [method, dataset] : keys) {
    MethodSummary s;
    s.method = method;
    s.dataset = dataset;
    std::vector<double> acc, wf, rules, secs;
    for (const auto& r : report.records) {
      if (r.method != method || r.dataset != dataset) continue;
      ++s.folds;
      if (!r.ok) {
        ++s.failed;
        continue;
      }
      acc.push_back(r.accuracy);
      wf.push_back(r.weighted_f);
      rules.push_back(static_cast<double>(r.rules));
      secs.push_back(r.seconds);
    }
    s.accuracy_mean = mean_of(acc);
    s.accuracy_std = sample_std(acc);
    s.weighted_f_mean = mean_of(wf);
    s.weighted_f_std = sample_std(wf);
    s.rules_mean = mean_of(rules);
    s.seconds_mean = mean_of(secs);
    report.summaries.push_back(std::move(s));
  }
  return report;
}

ExperimentReport evaluate(std::span<const Method> methods, const Dataset& ds, std::string_view dataset_name,
                          const RunSettings& settings) {
  std::vector<FoldRecord> all;
  for (Method m : methods) {
    for (std::uint64_t seed : settings.grid.seeds) {
      auto recs = run_method(m, ds, dataset_name, settings, seed);
      all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
  }
  return summarize(std::move(all));
}

void write_report(std::ostream& out, const ExperimentReport& report, const ReportOptions& options) {
  out << "# tskd report v1\n";
  for (const auto& r : report.records) {
    out << fmt::format("fold method={} dataset={} seed={} fold={} status={}", r.method, r.dataset, r.seed, r.fold,
                       r.ok ? "ok" : "failed");
    if (r.ok) {
      out << fmt::format(" acc={:.17g} wf={:.17g} rules={} tau={:.17g} zeta={:.17g} lambda={:.17g} phi={:.17g}",
                         r.accuracy, r.weighted_f, r.rules, r.params.temperature, r.params.zeta, r.params.lambda,
                         r.params.phi);
    }
    if (options.include_timing) out << fmt::format(" time={:.6f} search_time={:.6f}", r.seconds, r.search_seconds);
    if (!r.ok) out << " error=" << r.error;
    out << '\n';
  }
  for (const auto& s : report.summaries) {
    out << fmt::format(
        "summary method={} dataset={} folds={} failed={} acc_mean={:.17g} acc_std={:.17g} wf_mean={:.17g} "
        "wf_std={:.17g} rules_mean={:.17g}",
        s.method, s.dataset, s.folds, s.failed, s.accuracy_mean, s.accuracy_std, s.weighted_f_mean, s.weighted_f_std,
        s.rules_mean);
    if (options.include_timing) out << fmt::format(" time_mean={:.6f}", s.seconds_mean);
    out << '\n';
  }
}

namespace {

std::map<std::string, std::string> parse_fields(const std::string& line, std::size_t start) {
  std::map<std::string, std::string> fields;
  std::size_t pos = start;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    const std::size_t eq = line.find('=', pos);
    if (eq == std::string::npos) throw ParseError("report field without '=': " + line.substr(pos));
    const std::string key = line.substr(pos, eq - pos);
    if (key == "error") {
      fields[key] = line.substr(eq + 1);
      break;
    }
    const std::size_t end = std::min(line.find(' ', eq), line.size());
    fields[key] = line.substr(eq + 1, end - eq - 1);
    pos = end;
  }
  return fields;
}

double num(const std::map<std::string, std::string>& f, const std::string& key, double fallback = 0.0) {
  const auto it = f.find(key);
  if (it == f.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ParseError("report: bad number for " + key);
  }
}

std::string text(const std::map<std::string, std::string>& f, const std::string& key) {
  const auto it = f.find(key);
  if (it == f.end()) throw ParseError("report: missing field " + key);
  return it->second;
}

}  // namespace

ExperimentReport read_report(std::istream& in) {
  ExperimentReport report;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    try {
      if (line.rfind("fold ", 0) == 0) {
        const auto f = parse_fields(line, 5);
        FoldRecord r;
        r.method = text(f, "method");
        r.dataset = text(f, "dataset");
        r.seed = std::stoull(text(f, "seed"));
        r.fold = std::stoi(text(f, "fold"));
        r.ok = text(f, "status") == "ok";
        if (f.count("error")) r.error = f.at("error");
        r.accuracy = num(f, "acc");
        r.weighted_f = num(f, "wf");
        r.rules = static_cast<Index>(num(f, "rules"));
        r.params = Hyperparams{r.rules, num(f, "tau"), num(f, "zeta"), num(f, "lambda"), num(f, "phi")};
        r.seconds = num(f, "time");
        r.search_seconds = num(f, "search_time");
        report.records.push_back(std::move(r));
      } else if (line.rfind("summary ", 0) == 0) {
        const auto f = parse_fields(line, 8);
        MethodSummary s;
        s.method = text(f, "method");
        s.dataset = text(f, "dataset");
        s.folds = static_cast<int>(num(f, "folds"));
        s.failed = static_cast<int>(num(f, "failed"));
        s.accuracy_mean = num(f, "acc_mean");
        s.accuracy_std = num(f, "acc_std");
        s.weighted_f_mean = num(f, "wf_mean");
        s.weighted_f_std = num(f, "wf_std");
        s.rules_mean = num(f, "rules_mean");
        s.seconds_mean = num(f, "time_mean");
        report.summaries.push_back(std::move(s));
      } else {
        throw ParseError("unrecognized report line", row);
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed report line", row);
    } catch (const std::out_of_range&) {
      throw ParseError("malformed report line", row);
    }
  }
  return report;
}

void write_summary_table(std::ostream& out, const ExperimentReport& report, const ReportOptions& options) {
  out << fmt::format("{:<16} {:<12} {:>16} {:>16} {:>7} {:>7}", "method", "dataset", "Acc(%)", "W-F(%)", "Rules",
                     "Failed");
  if (options.include_timing) out << fmt::format(" {:>10}", "Time(s)");
  out << '\n';
  for (const auto& s : report.summaries) {
    out << fmt::format("{:<16} {:<12} {:>16} {:>16} {:>7.2f} {:>7}", s.method, s.dataset,
                       fmt::format("{:.2f}±{:.2f}", 100.0 * s.accuracy_mean, 100.0 * s.accuracy_std),
                       fmt::format("{:.2f}±{:.2f}", 100.0 * s.weighted_f_mean, 100.0 * s.weighted_f_std), s.rules_mean,
                       s.failed);
    if (options.include_timing) out << fmt::format(" {:>10.4f}", s.seconds_mean);
    out << '\n';
  }
}

namespace {

constexpr std::array<std::pair<SweepParameter, std::string_view>, 6> kSweepNames{{
    {SweepParameter::kTemperature, "tau"},
    {SweepParameter::kZeta, "zeta"},
    {SweepParameter::kLambda, "lambda"},
    {SweepParameter::kPhi, "phi"},
    {SweepParameter::kLambdaOverZeta, "lambda/zeta"},
    {SweepParameter::kLambdaZetaOverPhi, "(lambda+zeta)/phi"},
}};

Hyperparams with_value(Hyperparams hp, SweepParameter p, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("sweep values must be positive");
  switch (p) {
    case SweepParameter::kTemperature: hp.temperature = v; break;
    case SweepParameter::kZeta: hp.zeta = v; break;
    case SweepParameter::kLambda: hp.lambda = v; break;
    case SweepParameter::kPhi: hp.phi = v; break;
    case SweepParameter::kLambdaOverZeta: hp.lambda = v * hp.zeta; break;
    case SweepParameter::kLambdaZetaOverPhi: hp.phi = (hp.lambda + hp.zeta) / v; break;
  }
  return hp;
}

}  // namespace

std::string_view sweep_parameter_name(SweepParameter p) {
  for (const auto& [k, name] : kSweepNames) {
    if (k == p) return name;
  }
  throw std::invalid_argument("unknown sweep parameter");
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  for (const auto& [k, n] : kSweepNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown sweep parameter: " + std::string(name));
}

std::vector<SweepRecord> sweep(SweepParameter parameter, std::span<const double> values, const Dataset& ds,
                               std::string_view dataset_name, const RunSettings& settings) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  std::vector<SweepRecord> out;
  for (double v : values) {
    RunSettings s = settings;
    s.mode = GridMode::kNone;
    s.fixed = with_value(settings.fixed, parameter, v);
    std::vector<double> acc;
    for (std::uint64_t seed : s.grid.seeds) {
      for (const auto& r : run_method(Method::kDistillDkd, ds, dataset_name, s, seed)) {
        if (r.ok) acc.push_back(r.accuracy);
      }
    }
    out.push_back(SweepRecord{std::string(sweep_parameter_name(parameter)), v, mean_of(acc), sample_std(acc),
                              static_cast<int>(acc.size())});
  }
  return out;
}

void write_sweep(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "# parameter value acc_mean acc_std folds\n";
  for (const auto& r : records) {
    out << fmt::format("{} {:.17g} {:.17g} {:.17g} {}\n", r.parameter, r.value, r.accuracy_mean, r.accuracy_std,
                       r.folds);
  }
}

}  // namespace tskd
