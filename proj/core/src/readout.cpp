#include "tskd/readout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "tskd/distill.hpp"
#include "tskd/expansion.hpp"

namespace tskd {

namespace {

std::string ordinal(std::size_t n) {
  const std::size_t mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    if (n % 10 == 1) suffix = "st";
    if (n % 10 == 2) suffix = "nd";
    if (n % 10 == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

std::string name_or(const std::vector<std::string>& names, std::size_t i, const std::string& fallback) {
  return i < names.size() && !names[i].empty() ? names[i] : fallback;
}

Matrix as_row(const Vector& sample) { return sample.transpose(); }

RuleExplanation explain_rule(const RuleBase& rules, Index k, double firing) {
  RuleExplanation r;
  r.rule = k;
  r.firing = firing;
  for (Index i = 0; i < rules.feature_count(); ++i) r.antecedents.emplace_back(rules.label(k, i));
  return r;
}

std::string polynomial(const Vector& coef, const DesignLayout& layout, int max_terms) {
  std::vector<Index> order(static_cast<std::size_t>(coef.size()));
  for (Index i = 0; i < coef.size(); ++i) order[i] = i;
  Index shown = coef.size();
  if (max_terms > 0 && coef.size() > max_terms) {
    // Keep the constant, then the largest-magnitude terms, printed in basis order.
    std::stable_sort(order.begin() + 1, order.end(),
                     [&](Index a, Index b) { return std::abs(coef(a)) > std::abs(coef(b)); });
    shown = max_terms;
    std::sort(order.begin() + 1, order.begin() + shown);
  }
  std::string out = fmt::format("{:.4f}", coef(order[0]));
  for (Index j = 1; j < shown; ++j) {
    const double c = coef(order[j]);
    out += fmt::format(" {} {:.4f}*{}", c < 0 ? '-' : '+', std::abs(c), layout.monomial_name(order[j]));
  }
  if (shown < coef.size()) out += fmt::format(" + ... ({} more terms)", coef.size() - shown);
  return out;
}

void render_rules(std::ostringstream& os, const Explanation& e, const DesignLayout& layout,
                  const ReadoutOptions& options, bool multi_output) {
  for (const auto& r : e.rules) {
    os << fmt::format("Rule {} (firing strength {:.4f}):\n", r.rule + 1, r.firing);
    for (std::size_t i = 0; i < r.antecedents.size(); ++i) {
      os << (i == 0 ? "  IF:   " : "        ")
         << fmt::format("the {} feature ({}) is {}", ordinal(i + 1),
                        name_or(options.feature_names, i, fmt::format("feature {}", i + 1)), r.antecedents[i])
         << (i + 1 < r.antecedents.size() ? ", and\n" : ".\n");
    }
    for (std::size_t c = 0; c < r.consequents.size(); ++c) {
      const std::string head = multi_output ? fmt::format("the {} output is ", ordinal(c + 1)) : "the output is ";
      os << (c == 0 ? "  THEN: " : "        ") << head << polynomial(r.consequents[c], layout, options.max_terms)
         << fmt::format(" = {:.4f}", r.outputs[c]) << (c + 1 < r.consequents.size() ? ",\n" : ".\n");
    }
  }
}

}  // namespace

Explanation explain(const StudentModel& model, const Vector& sample) {
  if (!model.fitted()) throw InvalidState("student model is not fitted");
  if (sample.size() != model.rule_base.feature_count()) throw std::invalid_argument("sample has the wrong feature count");
  const Matrix x = as_row(sample);
  const FiringMatrix firing = firing_strengths(model.rule_base, x);
  const Vector basis = expand_basis(sample, model.order);
  const Index d = basis.size();
  if (model.coefficients.rows() != model.rule_base.rule_count() * d) {
    throw std::invalid_argument("student coefficients do not match the rule base");
  }
  Explanation e;
  for (Index k = 0; k < model.rule_base.rule_count(); ++k) {
    RuleExplanation r = explain_rule(model.rule_base, k, firing(0, k));
    for (Index c = 0; c < model.class_count(); ++c) {
      Vector coef = model.coefficients.block(k * d, c, d, 1);
      r.outputs.push_back(coef.dot(basis));
      r.consequents.push_back(std::move(coef));
    }
    e.rules.push_back(std::move(r));
  }
  const Matrix logits = student_logits(model, x);
  e.scores.assign(logits.data(), logits.data() + logits.size());
  e.predicted = argmax_rows(logits).front();
  return e;
}

Explanation explain(const TeacherModel& model, const Vector& sample) {
  if (!model.fitted()) throw InvalidState("teacher model is not fitted");
  if (sample.size() != model.rule_base.feature_count()) throw std::invalid_argument("sample has the wrong feature count");
  const Matrix x = as_row(sample);
  const FiringMatrix firing = firing_strengths(model.rule_base, x);
  const Vector basis = expand_basis(sample, model.order);
  const Index d = basis.size();
  Explanation e;
  for (Index k = 0; k < model.rule_base.rule_count(); ++k) {
    RuleExplanation r = explain_rule(model.rule_base, k, firing(0, k));
    Vector coef = model.coefficients.segment(k * d, d);
    r.outputs.push_back(coef.dot(basis));
    r.consequents.push_back(std::move(coef));
    e.rules.push_back(std::move(r));
  }
  Vector out(1);
  out(0) = predict_teacher(model, x)(0);
  e.teacher_output = out(0);
  const Matrix logits = teacher_logits(out, model.class_labels);
  e.scores.assign(logits.data(), logits.data() + logits.size());
  e.predicted = teacher_classes(model, out).front();
  return e;
}

std::string rule_readout(const StudentModel& model, const Vector& sample, const ReadoutOptions& options) {
  const Explanation e = explain(model, sample);
  const DesignLayout layout(model.rule_base.rule_count(), model.rule_base.feature_count(), model.order);
  std::ostringstream os;
  os << fmt::format("Order-{} TSK classifier, {} rules, {} classes\n", model.order, model.rule_base.rule_count(),
                    model.class_count());
  render_rules(os, e, layout, options, true);
  os << "Class scores:";
  for (std::size_t c = 0; c < e.scores.size(); ++c) os << fmt::format(" {:.4f}", e.scores[c]);
  os << fmt::format("\nPredicted class: {} ({})\n", e.predicted + 1,
                    name_or(options.class_names, static_cast<std::size_t>(e.predicted),
                            fmt::format("class {}", e.predicted + 1)));
  return os.str();
}

std::string rule_readout(const TeacherModel& model, const Vector& sample, const ReadoutOptions& options) {
  const Explanation e = explain(model, sample);
  const DesignLayout layout(model.rule_base.rule_count(), model.rule_base.feature_count(), model.order);
  std::ostringstream os;
  os << fmt::format("Order-{} TSK regressor (ridge consequents), {} rules\n", model.order,
                    model.rule_base.rule_count());
  render_rules(os, e, layout, options, false);
  os << fmt::format("Model output: {:.4f}\n", e.teacher_output);
  os << fmt::format("Predicted class: {} ({})\n", e.predicted + 1,
                    name_or(options.class_names, static_cast<std::size_t>(e.predicted),
                            fmt::format("class {}", e.predicted + 1)));
  return os.str();
}

}  // namespace tskd
