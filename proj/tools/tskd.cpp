// tskd: fit, distill, evaluate and explain TSK fuzzy classifiers from the command line.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "tskd/tskd.hpp"

namespace {

struct Options {
  std::string data;
  int label_col = -1;
  std::string delimiter = ",";
  bool no_header = false;
  std::string regroup;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  int folds = 10;
  tskd::Index rules = 8;
  std::string rules_grid = "1:20";
  int order = -1;
  double width = 0.5;
  double temp = 2.0;
  double zeta = 1.0;
  double lambda = 2.0;
  double phi = 1.0;
  double lr = 0.01;
  int epochs = 30;
  double xi = 1e-5;
  double reg_L = 100.0;
  bool global_normalize = false;
  bool shared_rules = false;
  std::string grid = "none";
  std::string out;
  std::string trace;
  std::string teacher_out;
  bool no_timing = false;
  std::string methods = "teacher-only,student-only,distill-kd,distill-dkd";
  std::string method = "dkd";
  std::string param = "tau";
  std::vector<double> values;
  std::string model;
  long sample = 0;
  std::vector<double> x;
  int max_terms = 12;
};

std::string env_name(const std::string& flag) {
  std::string out = "TSKD_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

template <typename T>
CLI::Option* flag_opt(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option("--" + name, target, help)->envname(env_name(name));
}

void add_data_flags(CLI::App* app, Options& o) {
  flag_opt(app, "data", o.data, "CSV dataset path")->required();
  flag_opt(app, "label-col", o.label_col, "zero-based label column; negative counts from the end");
  flag_opt(app, "delimiter", o.delimiter, "CSV delimiter character");
  app->add_flag("--no-header", o.no_header, "the CSV has no header row")->envname(env_name("no-header"));
  flag_opt(app, "regroup", o.regroup, "label regrouping transform (cleveland)")->check(CLI::IsMember({"", "cleveland"}));
  app->add_flag("--global-normalize", o.global_normalize, "normalize the whole dataset before splitting")
      ->envname(env_name("global-normalize"));
}

void add_model_flags(CLI::App* app, Options& o) {
  flag_opt(app, "seed", o.seed, "random seed");
  flag_opt(app, "rules", o.rules, "number of fuzzy rules K")->check(CLI::PositiveNumber);
  flag_opt(app, "width", o.width, "Gaussian kernel width")->check(CLI::PositiveNumber);
  flag_opt(app, "reg-L", o.reg_L, "ridge regularization L (ridge term 1/L)")->check(CLI::PositiveNumber);
  flag_opt(app, "lr", o.lr, "learning rate")->check(CLI::PositiveNumber);
  flag_opt(app, "epochs", o.epochs, "maximum epochs")->check(CLI::PositiveNumber);
  flag_opt(app, "xi", o.xi, "stopping threshold on loss improvement")->check(CLI::NonNegativeNumber);
  app->add_flag("--shared-rules", o.shared_rules, "teacher reuses the student's rule base")
      ->envname(env_name("shared-rules"));
}

void add_distill_flags(CLI::App* app, Options& o) {
  flag_opt(app, "temp", o.temp, "distillation temperature")->check(CLI::PositiveNumber);
  flag_opt(app, "zeta", o.zeta, "target-class KL weight")->check(CLI::NonNegativeNumber);
  flag_opt(app, "lambda", o.lambda, "non-target-class KL weight")->check(CLI::NonNegativeNumber);
  flag_opt(app, "phi", o.phi, "cross-entropy weight")->check(CLI::NonNegativeNumber);
}

void add_eval_flags(CLI::App* app, Options& o) {
  flag_opt(app, "folds", o.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  flag_opt(app, "seeds", o.seeds, "seeds to repeat the cross-validation with (default: --seed)")->delimiter(',');
  flag_opt(app, "order", o.order, "consequent order of the tsk-order-n methods")->check(CLI::Range(0, 3));
  flag_opt(app, "out", o.out, "report output path");
  app->add_flag("--no-timing", o.no_timing, "omit wall-time fields from the outputs")->envname(env_name("no-timing"));
}

tskd::Dataset load(const Options& o) {
  if (o.delimiter.size() != 1) throw std::invalid_argument("--delimiter must be a single character");
  tskd::CsvOptions csv;
  csv.delimiter = o.delimiter[0];
  csv.header = !o.no_header;
  csv.label_column = o.label_col;
  tskd::RawTable table = tskd::load_csv(o.data, csv);
  if (o.regroup == "cleveland") {
    if (table.class_names != std::vector<std::string>{"0", "1", "2", "3", "4"}) {
      throw std::invalid_argument("cleveland regrouping needs labels 0..4");
    }
    table.labels = tskd::regroup_cleveland(table.labels);
    table.class_names = {"zero-risk", "low-risk", "high-risk"};
  }
  return tskd::make_dataset(std::move(table));
}

std::string dataset_name(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  std::replace(stem.begin(), stem.end(), ' ', '_');
  return stem.empty() ? "data" : stem;
}

tskd::TrainConfig train_config(const Options& o) { return {o.lr, o.epochs, o.xi}; }

std::vector<tskd::Index> parse_rules_grid(const std::string& spec) {
  std::vector<tskd::Index> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      out.push_back(std::stol(part));
    } else {
      const long lo = std::stol(part.substr(0, colon));
      const long hi = std::stol(part.substr(colon + 1));
      for (long k = lo; k <= hi; ++k) out.push_back(k);
    }
  }
  if (out.empty()) throw std::invalid_argument("--rules-grid is empty");
  return out;
}

tskd::RunSettings run_settings(const Options& o, tskd::GridMode mode) {
  tskd::RunSettings s;
  s.mode = mode;
  s.grid.rules = parse_rules_grid(o.rules_grid);
  s.grid.reg_L = o.reg_L;
  s.grid.max_epochs = o.epochs;
  s.grid.threshold = o.xi;
  s.grid.learning_rate = o.lr;
  s.grid.folds = o.folds;
  s.grid.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
  s.fixed = tskd::Hyperparams{o.rules, o.temp, o.zeta, o.lambda, o.phi};
  s.width = o.width;
  if (o.order >= 0) s.order = o.order;
  s.global_normalize = o.global_normalize;
  s.shared_rule_base = o.shared_rules;
  return s;
}

tskd::GridMode parse_grid(const std::string& g) {
  if (g == "none") return tskd::GridMode::kNone;
  if (g == "coarse") return tskd::GridMode::kCoarse;
  if (g == "full") return tskd::GridMode::kFull;
  throw std::invalid_argument("--grid must be none, coarse or full");
}

struct Prepared {
  tskd::Dataset ds;
  tskd::Normalizer norm;
  tskd::Matrix X;
};

Prepared prepare(const Options& o) {
  Prepared p{load(o), {}, {}};
  p.norm = tskd::Normalizer::fit(p.ds.X);
  p.X = p.norm.apply(p.ds.X);
  return p;
}

void report_training(const std::vector<int>& predicted, const tskd::Dataset& ds) {
  std::cout << fmt::format("training accuracy {:.4f}  weighted-F {:.4f}\n", tskd::accuracy(predicted, ds.y),
                           tskd::weighted_f(predicted, ds.y, ds.class_count));
}

void write_trace(const std::string& path, const tskd::LossTrace& trace) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  tskd::write_loss_trace(out, trace);
}

tskd::TeacherModel fit_teacher_for(const Options& o, const Prepared& p, int order, std::uint64_t role) {
  const tskd::RuleBase rb = tskd::build_rule_base(o.rules, p.X.cols(), {o.width}, tskd::derive_seed(o.seed, {role}));
  tskd::TeacherOptions options;
  options.order = order;
  options.class_labels = tskd::default_class_encoding(p.ds.class_count);
  return tskd::fit_teacher(rb, p.X, tskd::encode_labels(p.ds.y, options.class_labels), o.reg_L, options);
}

constexpr std::uint64_t kStudentRole = 1;
constexpr std::uint64_t kTeacherRole = 2;

int cmd_train_teacher(const Options& o) {
  const Prepared p = prepare(o);
  const tskd::TeacherModel model = fit_teacher_for(o, p, o.order >= 0 ? o.order : 3, kTeacherRole);
  report_training(tskd::teacher_classes(model, tskd::predict_teacher(model, p.X)), p.ds);
  if (!o.out.empty()) tskd::save_teacher_file(o.out, model, p.norm);
  return 0;
}

int cmd_train_student(const Options& o) {
  const Prepared p = prepare(o);
  const tskd::RuleBase rb =
      tskd::build_rule_base(o.rules, p.X.cols(), {o.width}, tskd::derive_seed(o.seed, {kStudentRole}));
  auto student = tskd::initialize_student(rb, p.ds.class_count, tskd::InitPolicy::kZeros, 0, o.order >= 0 ? o.order : 1);
  const auto result = tskd::train_student(student, p.X, tskd::one_hot(p.ds.y, p.ds.class_count), train_config(o));
  std::cout << fmt::format("epochs {}  final loss {:.6f}\n", result.trace.size(), result.trace.back().loss.total);
  report_training(tskd::argmax_rows(tskd::student_logits(result.model, p.X)), p.ds);
  write_trace(o.trace, result.trace);
  if (!o.out.empty()) tskd::save_student_file(o.out, result.model, p.norm);
  return 0;
}

int cmd_distill(const Options& o) {
  const Prepared p = prepare(o);
  const tskd::RuleBase student_rules =
      tskd::build_rule_base(o.rules, p.X.cols(), {o.width}, tskd::derive_seed(o.seed, {kStudentRole}));
  const tskd::TeacherModel teacher = o.shared_rules ? [&] {
    tskd::TeacherOptions options;
    options.class_labels = tskd::default_class_encoding(p.ds.class_count);
    return tskd::fit_teacher(student_rules, p.X, tskd::encode_labels(p.ds.y, options.class_labels), o.reg_L, options);
  }()
                                                    : fit_teacher_for(o, p, 3, kTeacherRole);
  const tskd::Vector teacher_out = tskd::predict_teacher(teacher, p.X);
  const auto student = tskd::initialize_student(student_rules, p.ds.class_count);
  const tskd::Matrix onehot = tskd::one_hot(p.ds.y, p.ds.class_count);

  tskd::TrainResult result;
  if (o.method == "dkd") {
    tskd::DistillConfig cfg;
    cfg.temperature = o.temp;
    cfg.target_weight = o.zeta;
    cfg.nontarget_weight = o.lambda;
    cfg.ce_weight = o.phi;
    cfg.train = train_config(o);
    result = tskd::distill(teacher_out, student, p.X, onehot, cfg, teacher.class_labels);
  } else {
    tskd::KdConfig cfg;
    cfg.temperature = o.temp;
    cfg.kd_weight = o.zeta;
    cfg.ce_weight = o.phi;
    cfg.train = train_config(o);
    result = tskd::vanilla_kd_distill(teacher_out, student, p.X, onehot, cfg, teacher.class_labels);
  }
  std::cout << fmt::format("teacher ");
  report_training(tskd::teacher_classes(teacher, teacher_out), p.ds);
  std::cout << fmt::format("student epochs {}  final loss {:.6f}\nstudent ", result.trace.size(),
                           result.trace.back().loss.total);
  report_training(tskd::argmax_rows(tskd::student_logits(result.model, p.X)), p.ds);
  write_trace(o.trace, result.trace);
  if (!o.out.empty()) tskd::save_student_file(o.out, result.model, p.norm);
  if (!o.teacher_out.empty()) tskd::save_teacher_file(o.teacher_out, teacher, p.norm);
  return 0;
}

std::vector<tskd::Method> parse_methods(const std::string& list) {
  std::vector<tskd::Method> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) out.push_back(tskd::parse_method(name));
  }
  if (out.empty()) throw std::invalid_argument("--methods is empty");
  return out;
}

int emit_report(const Options& o, const tskd::ExperimentReport& report) {
  const tskd::ReportOptions ro{!o.no_timing};
  tskd::write_summary_table(std::cout, report, ro);
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot write " + o.out);
    tskd::write_report(out, report, ro);
  }
  return 0;
}

int cmd_evaluate(const Options& o, tskd::GridMode mode) {
  const tskd::Dataset ds = load(o);
  const auto methods = parse_methods(o.methods);
  return emit_report(o, tskd::evaluate(methods, ds, dataset_name(o.data), run_settings(o, mode)));
}

int cmd_sweep(const Options& o) {
  const tskd::Dataset ds = load(o);
  const auto param = tskd::parse_sweep_parameter(o.param);
  const std::vector<double> values = o.values.empty() ? tskd::kDistillCandidates : o.values;
  const auto records = tskd::sweep(param, values, ds, dataset_name(o.data), run_settings(o, tskd::GridMode::kNone));
  tskd::write_sweep(std::cout, records);
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot write " + o.out);
    tskd::write_sweep(out, records);
  }
  return 0;
}

int cmd_explain(const Options& o) {
  tskd::ReadoutOptions ro;
  ro.max_terms = o.max_terms;
  std::optional<tskd::Dataset> ds;
  if (!o.data.empty()) {
    ds = load(o);
    ro.feature_names = ds->feature_names;
    ro.class_names = ds->class_names;
  }
  auto raw_sample = [&](tskd::Index features) -> tskd::Vector {
    if (!o.x.empty()) {
      if (static_cast<tskd::Index>(o.x.size()) != features) throw std::invalid_argument("--x has the wrong length");
      return Eigen::Map<const tskd::Vector>(o.x.data(), features);
    }
    if (!ds) throw std::invalid_argument("explain needs --x or --data with --sample");
    if (o.sample < 0 || o.sample >= ds->samples()) throw std::invalid_argument("--sample out of range");
    return ds->X.row(o.sample).transpose();
  };
  auto normalized = [](const std::optional<tskd::Normalizer>& norm, const tskd::Vector& v) -> tskd::Vector {
    if (!norm) return v;
    return norm->apply(v.transpose()).row(0).transpose();
  };

  if (!o.model.empty()) {
    if (tskd::model_kind_of(o.model) == "teacher") {
      const auto loaded = tskd::load_teacher_file(o.model);
      const tskd::Vector s = normalized(loaded.normalization, raw_sample(loaded.model.rule_base.feature_count()));
      std::cout << tskd::rule_readout(loaded.model, s, ro);
    } else {
      const auto loaded = tskd::load_student_file(o.model);
      const tskd::Vector s = normalized(loaded.normalization, raw_sample(loaded.model.rule_base.feature_count()));
      std::cout << tskd::rule_readout(loaded.model, s, ro);
    }
    return 0;
  }
  if (!ds) throw std::invalid_argument("explain needs --model or --data");
  // No saved model: distill one on the whole dataset first.
  const tskd::Normalizer norm = tskd::Normalizer::fit(ds->X);
  const tskd::Matrix X = norm.apply(ds->X);
  const tskd::RuleBase student_rules =
      tskd::build_rule_base(o.rules, X.cols(), {o.width}, tskd::derive_seed(o.seed, {kStudentRole}));
  const tskd::RuleBase teacher_rules =
      o.shared_rules ? student_rules
                     : tskd::build_rule_base(o.rules, X.cols(), {o.width}, tskd::derive_seed(o.seed, {kTeacherRole}));
  tskd::TeacherOptions topt;
  topt.class_labels = tskd::default_class_encoding(ds->class_count);
  const auto teacher = tskd::fit_teacher(teacher_rules, X, tskd::encode_labels(ds->y, topt.class_labels), o.reg_L, topt);
  tskd::DistillConfig cfg;
  cfg.temperature = o.temp;
  cfg.target_weight = o.zeta;
  cfg.nontarget_weight = o.lambda;
  cfg.ce_weight = o.phi;
  cfg.train = train_config(o);
  const auto result = tskd::distill(tskd::predict_teacher(teacher, X), tskd::initialize_student(student_rules, ds->class_count), X,
                                    tskd::one_hot(ds->y, ds->class_count), cfg, teacher.class_labels);
  std::cout << tskd::rule_readout(result.model, normalized(norm, raw_sample(X.cols())), ro);
  return 0;
}

}  // namespace

// CLI11 silently drops an environment value that fails validation.
void reject_ignored_env(const CLI::App& sub) {
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_envname();
    if (name.empty() || opt->count() > 0) continue;
    if (const char* v = std::getenv(name.c_str()); v != nullptr && *v != '\0')
      throw std::invalid_argument(name + ": invalid value '" + v + "'");
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Knowledge distillation from high-order to low-order TSK fuzzy classifiers"};
  app.require_subcommand(1);
  Options o;

  auto* teacher = app.add_subcommand("train-teacher", "fit the closed-form high-order teacher on a dataset");
  add_data_flags(teacher, o);
  add_model_flags(teacher, o);
  flag_opt(teacher, "order", o.order, "consequent order (default 3)")->check(CLI::Range(0, 3));
  flag_opt(teacher, "out", o.out, "model output path");

  auto* student = app.add_subcommand("train-student", "train a low-order student by gradient descent");
  add_data_flags(student, o);
  add_model_flags(student, o);
  flag_opt(student, "order", o.order, "consequent order (default 1)")->check(CLI::Range(0, 3));
  flag_opt(student, "out", o.out, "model output path");
  flag_opt(student, "trace", o.trace, "per-epoch loss trace output path");

  auto* distill = app.add_subcommand("distill", "fit the teacher and distill it into a first-order student");
  add_data_flags(distill, o);
  add_model_flags(distill, o);
  add_distill_flags(distill, o);
  flag_opt(distill, "method", o.method, "dkd (decoupled) or kd (plain KL; --zeta is its weight)")
      ->check(CLI::IsMember({"dkd", "kd"}));
  flag_opt(distill, "out", o.out, "student model output path");
  flag_opt(distill, "teacher-out", o.teacher_out, "teacher model output path");
  flag_opt(distill, "trace", o.trace, "per-epoch loss trace output path");

  auto* evaluate = app.add_subcommand("evaluate", "cross-validate methods with fixed hyperparameters");
  auto* gridsearch = app.add_subcommand("gridsearch", "cross-validate methods with nested grid search");
  for (auto* cmd : {evaluate, gridsearch}) {
    add_data_flags(cmd, o);
    add_model_flags(cmd, o);
    add_distill_flags(cmd, o);
    add_eval_flags(cmd, o);
    flag_opt(cmd, "methods", o.methods, "comma-separated methods");
    flag_opt(cmd, "rules-grid", o.rules_grid, "rule counts to search, e.g. 1:20 or 2,4,8");
  }
  flag_opt(evaluate, "grid", o.grid, "none, coarse or full")->check(CLI::IsMember({"none", "coarse", "full"}));
  flag_opt(gridsearch, "grid", o.grid, "coarse (zeta fixed at 1) or full")
      ->check(CLI::IsMember({"coarse", "full"}))
      ->default_str("coarse");

  auto* sweep = app.add_subcommand("sweep", "accuracy of distill-dkd across values of one distillation parameter");
  add_data_flags(sweep, o);
  add_model_flags(sweep, o);
  add_distill_flags(sweep, o);
  add_eval_flags(sweep, o);
  flag_opt(sweep, "param", o.param, "tau, zeta, lambda, phi, lambda/zeta or (lambda+zeta)/phi");
  flag_opt(sweep, "values", o.values, "candidate values (default 1,2,5,10,20,100)")->delimiter(',');

  auto* explain = app.add_subcommand("explain", "print the fuzzy rules and their outputs for one sample");
  flag_opt(explain, "model", o.model, "saved model (teacher or student)");
  flag_opt(explain, "data", o.data, "CSV dataset (feature names, --sample source, or training data)");
  flag_opt(explain, "label-col", o.label_col, "zero-based label column; negative counts from the end");
  flag_opt(explain, "delimiter", o.delimiter, "CSV delimiter character");
  explain->add_flag("--no-header", o.no_header, "the CSV has no header row");
  flag_opt(explain, "regroup", o.regroup, "label regrouping transform (cleveland)");
  add_model_flags(explain, o);
  add_distill_flags(explain, o);
  flag_opt(explain, "sample", o.sample, "row index of the sample in --data");
  flag_opt(explain, "x", o.x, "raw feature values of the sample")->delimiter(',');
  flag_opt(explain, "max-terms", o.max_terms, "consequent terms to print per output (0 = all)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const CLI::App* sub : app.get_subcommands()) reject_ignored_env(*sub);
    if (gridsearch->parsed() && o.grid == "none") o.grid = "coarse";
    if (*teacher) return cmd_train_teacher(o);
    if (*student) return cmd_train_student(o);
    if (*distill) return cmd_distill(o);
    if (*evaluate) return cmd_evaluate(o, parse_grid(o.grid));
    if (*gridsearch) return cmd_evaluate(o, parse_grid(o.grid));
    if (*sweep) return cmd_sweep(o);
    if (*explain) return cmd_explain(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
