#pragma once

#include <span>
#include <string>
#include <vector>

#include "tskd/student.hpp"
#include "tskd/teacher.hpp"

namespace tskd {

struct ReadoutOptions {
  std::vector<std::string> feature_names;  ///< defaults to "feature 1", ...
  std::vector<std::string> class_names;    ///< defaults to "class 1", ...
  /// Cap on printed consequent terms per output; 0 prints all. Remaining terms are summarized.
  int max_terms = 0;
};

struct RuleExplanation {
  Index rule = 0;
  double firing = 0.0;                    ///< normalized firing strength for the sample
  std::vector<std::string> antecedents;   ///< linguistic label per feature
  std::vector<Vector> consequents;        ///< per output: coefficients of the rule block
  std::vector<double> outputs;            ///< per output: rule polynomial evaluated at the sample
};

struct Explanation {
  std::vector<RuleExplanation> rules;
  std::vector<double> scores;  ///< student logits, or the teacher's distance logits
  int predicted = 0;
  double teacher_output = 0.0;  ///< scalar teacher output (teacher readouts only)
};

/// Per-rule antecedent labels and consequent outputs; throws InvalidState for unfitted models.
Explanation explain(const StudentModel& model, const Vector& sample);
Explanation explain(const TeacherModel& model, const Vector& sample);

/// Text rendering: IF/THEN per rule, then the predicted class.
std::string rule_readout(const StudentModel& model, const Vector& sample, const ReadoutOptions& options = {});
std::string rule_readout(const TeacherModel& model, const Vector& sample, const ReadoutOptions& options = {});

}  // namespace tskd
