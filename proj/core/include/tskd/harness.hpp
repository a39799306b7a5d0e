#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tskd/data.hpp"
#include "tskd/objective.hpp"

namespace tskd {

enum class Method {
  kTeacherOnly,  ///< third-order LLM teacher, classes by nearest encoding
  kStudentOnly,  ///< first-order student, cross-entropy only
  kDistillKd,    ///< student distilled with plain KL
  kDistillDkd,   ///< student distilled with the decoupled loss
  kOrderNLlm,    ///< order-n TSK with ridge consequents
  kOrderNGd,     ///< order-n TSK trained by gradient descent
};

std::string_view method_name(Method method);
/// Accepts the names returned by method_name; throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);

/// Values chosen per fold: rule count and the distillation weights (zeta doubles as the plain-KD weight).
struct Hyperparams {
  Index rules = 8;
  double temperature = 2.0;
  double zeta = 1.0;
  double lambda = 2.0;
  double phi = 1.0;

  bool operator==(const Hyperparams&) const = default;
};

inline const std::vector<double> kDistillCandidates{1, 2, 5, 10, 20, 100};

/// Search space and fixed training constants for the cross-validated experiments.
struct GridSpec {
  std::vector<Index> rules = default_rule_range();
  double reg_L = 100.0;
  std::vector<double> temperatures = kDistillCandidates;
  std::vector<double> zetas = kDistillCandidates;
  std::vector<double> lambdas = kDistillCandidates;
  std::vector<double> phis = kDistillCandidates;
  int max_epochs = 30;
  double threshold = 1e-5;
  double learning_rate = 0.01;
  int folds = 10;
  std::vector<std::uint64_t> seeds{1};

  static std::vector<Index> default_rule_range();
  TrainConfig train_config() const { return {learning_rate, max_epochs, threshold}; }
  void validate() const;
};

enum class GridMode {
  kNone,    ///< use RunSettings::fixed for every fold
  kCoarse,  ///< zeta fixed at 1; search K, tau, lambda, phi
  kFull,    ///< search K, tau, zeta, lambda, phi
};

struct RunSettings {
  GridSpec grid;
  GridMode mode = GridMode::kNone;
  Hyperparams fixed;
  double width = 0.5;
  int order = 1;          ///< consequent order of the tsk-order-n methods
  int teacher_order = 3;  ///< consequent order of the distillation teacher
  int inner_folds = 3;
  bool global_normalize = false;
  bool shared_rule_base = false;
  InitPolicy init = InitPolicy::kZeros;
};

struct FoldRecord {
  std::string method;
  std::string dataset;
  std::uint64_t seed = 0;
  int fold = 0;
  bool ok = true;
  std::string error;
  double accuracy = 0.0;
  double weighted_f = 0.0;
  Index rules = 0;
  double seconds = 0.0;         ///< final fit + test prediction
  double search_seconds = 0.0;  ///< inner grid search, 0 without one
  Hyperparams params;
};

struct MethodSummary {
  std::string method;
  std::string dataset;
  int folds = 0;
  int failed = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double weighted_f_mean = 0.0;
  double weighted_f_std = 0.0;
  double rules_mean = 0.0;
  double seconds_mean = 0.0;
};

struct ExperimentReport {
  std::vector<FoldRecord> records;
  std::vector<MethodSummary> summaries;
};

/// Groups records by (method, dataset) in first-appearance order. Failed folds are counted but
/// excluded from the means; std is the sample standard deviation.
ExperimentReport summarize(std::vector<FoldRecord> records);

/// Cross-validated run of one method for one seed. Folds whose training diverges are recorded
/// with ok = false. With a grid mode, each outer fold picks hyperparameters by inner CV accuracy
/// on its training split (ties to smaller K, then smaller tau).
std::vector<FoldRecord> run_method(Method method, const Dataset& ds, std::string_view dataset_name,
                                   const RunSettings& settings, std::uint64_t seed);

/// run_method over every seed in settings.grid.seeds, summarized.
ExperimentReport evaluate(std::span<const Method> methods, const Dataset& ds, std::string_view dataset_name,
                          const RunSettings& settings);

struct ReportOptions {
  bool include_timing = true;
};

/// "fold ..." and "summary ..." key=value lines under a "# tskd report v1" header.
void write_report(std::ostream& out, const ExperimentReport& report, const ReportOptions& options = {});
ExperimentReport read_report(std::istream& in);

/// Aligned table with Acc and W-F as percentages.
void write_summary_table(std::ostream& out, const ExperimentReport& report, const ReportOptions& options = {});

enum class SweepParameter { kTemperature, kZeta, kLambda, kPhi, kLambdaOverZeta, kLambdaZetaOverPhi };

std::string_view sweep_parameter_name(SweepParameter p);
/// Accepts tau|zeta|lambda|phi|lambda/zeta|(lambda+zeta)/phi; throws std::invalid_argument otherwise.
SweepParameter parse_sweep_parameter(std::string_view name);

struct SweepRecord {
  std::string parameter;
  double value = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  int folds = 0;
};

/// Distill-dkd accuracy for each candidate value with every other knob held at settings.fixed.
/// Ratios are realized by moving lambda (lambda/zeta) or phi ((lambda+zeta)/phi).
std::vector<SweepRecord> sweep(SweepParameter parameter, std::span<const double> values, const Dataset& ds,
                               std::string_view dataset_name, const RunSettings& settings);

void write_sweep(std::ostream& out, const std::vector<SweepRecord>& records);

}  // namespace tskd
