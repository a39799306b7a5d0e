#include "tskd/serialize.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace tskd {

namespace {

void write_values(std::ostream& out, const double* data, Index count) {
  for (Index i = 0; i < count; ++i) out << fmt::format(" {:.17g}", data[i]);
}

void write_rule_base(std::ostream& out, const RuleBase& rules, int order) {
  out << "rules " << rules.rule_count() << '\n';
  out << "features " << rules.feature_count() << '\n';
  out << "order " << order << '\n';
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c = rules.centers();
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = rules.widths();
  out << "centers";
  write_values(out, c.data(), c.size());
  out << "\nwidths";
  write_values(out, w.data(), w.size());
  out << '\n';
}

void write_normalization(std::ostream& out, const std::optional<Normalizer>& norm) {
  if (!norm) return;
  out << "normalization";
  write_values(out, norm->min.data(), norm->min.size());
  write_values(out, norm->max.data(), norm->max.size());
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void expect(const std::string& key) {
    const std::string got = word();
    if (got != key) throw ParseError(fmt::format("model record: expected '{}', found '{}'", key, got));
  }

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw ParseError("model record is truncated");
    return w;
  }

  double number() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ParseError("model record: bad number '" + w + "'");
    }
  }

  Index count() {
    const double v = number();
    if (v < 0 || v != static_cast<double>(static_cast<Index>(v))) throw ParseError("model record: bad count");
    return static_cast<Index>(v);
  }

  std::string peek_word() {
    const auto pos = in_.tellg();
    std::string w;
    in_ >> w;
    in_.clear();
    in_.seekg(pos);
    return w;
  }

 private:
  std::istream& in_;
};

void read_header(Reader& r, const std::string& kind) {
  const std::string magic = r.word();
  if (magic != kModelMagic) throw ParseError("not a tskd model record");
  const Index version = r.count();
  if (version != kModelVersion) throw ParseError(fmt::format("unsupported model version {}", version));
  r.expect("kind");
  const std::string got = r.word();
  if (got != kind) throw ParseError(fmt::format("model record is a {}, expected a {}", got, kind));
}

RuleBase read_rule_base(Reader& r, int& order) {
  r.expect("rules");
  const Index k = r.count();
  r.expect("features");
  const Index m = r.count();
  r.expect("order");
  order = static_cast<int>(r.count());
  Matrix centers(k, m), widths(k, m);
  r.expect("centers");
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m; ++j) centers(i, j) = r.number();
  r.expect("widths");
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m; ++j) widths(i, j) = r.number();
  try {
    return RuleBase(std::move(centers), std::move(widths));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model record: ") + e.what());
  }
}

Matrix read_coefficients(Reader& r) {
  r.expect("coefficients");
  const Index rows = r.count();
  const Index cols = r.count();
  Matrix out(rows, cols);
  for (Index i = 0; i < out.size(); ++i) out.data()[i] = r.number();
  return out;
}

std::optional<Normalizer> read_tail(Reader& r, Index features) {
  std::optional<Normalizer> norm;
  if (r.peek_word() == "normalization") {
    r.expect("normalization");
    Normalizer n{Vector(features), Vector(features)};
    for (Index i = 0; i < features; ++i) n.min(i) = r.number();
    for (Index i = 0; i < features; ++i) n.max(i) = r.number();
    norm = std::move(n);
  }
  r.expect("end");
  return norm;
}

}  // namespace

void save_teacher(std::ostream& out, const TeacherModel& model, const std::optional<Normalizer>& norm) {
  if (!model.fitted()) throw InvalidState("cannot save an unfitted teacher");
  out << kModelMagic << ' ' << kModelVersion << "\nkind teacher\n";
  write_rule_base(out, model.rule_base, model.order);
  out << fmt::format("regularization {:.17g}\n", model.regularization);
  out << "class_labels " << model.class_labels.size();
  write_values(out, model.class_labels.data(), static_cast<Index>(model.class_labels.size()));
  out << "\ncoefficients " << model.coefficients.size() << " 1";
  write_values(out, model.coefficients.data(), model.coefficients.size());
  out << '\n';
  write_normalization(out, norm);
  out << "end\n";
}

void save_student(std::ostream& out, const StudentModel& model, const std::optional<Normalizer>& norm) {
  if (!model.fitted()) throw InvalidState("cannot save an unfitted student");
  out << kModelMagic << ' ' << kModelVersion << "\nkind student\n";
  write_rule_base(out, model.rule_base, model.order);
  out << "coefficients " << model.coefficients.rows() << ' ' << model.coefficients.cols();
  write_values(out, model.coefficients.data(), model.coefficients.size());
  out << '\n';
  write_normalization(out, norm);
  out << "end\n";
}

LoadedTeacher load_teacher(std::istream& in) {
  Reader r(in);
  read_header(r, "teacher");
  LoadedTeacher out;
  out.model.rule_base = read_rule_base(r, out.model.order);
  r.expect("regularization");
  out.model.regularization = r.number();
  r.expect("class_labels");
  const Index c = r.count();
  for (Index t = 0; t < c; ++t) out.model.class_labels.push_back(r.number());
  const Matrix coef = read_coefficients(r);
  if (coef.cols() != 1) throw ParseError("teacher coefficients must be a single column");
  out.model.coefficients = coef.col(0);
  out.normalization = read_tail(r, out.model.rule_base.feature_count());
  return out;
}

LoadedStudent load_student(std::istream& in) {
  Reader r(in);
  read_header(r, "student");
  LoadedStudent out;
  out.model.rule_base = read_rule_base(r, out.model.order);
  out.model.coefficients = read_coefficients(r);
  out.normalization = read_tail(r, out.model.rule_base.feature_count());
  return out;
}

namespace {

template <typename Save>
void save_to(const std::filesystem::path& path, Save&& save) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save(out);
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace

void save_teacher_file(const std::filesystem::path& path, const TeacherModel& model,
                       const std::optional<Normalizer>& norm) {
  save_to(path, [&](std::ostream& out) { save_teacher(out, model, norm); });
}

void save_student_file(const std::filesystem::path& path, const StudentModel& model,
                       const std::optional<Normalizer>& norm) {
  save_to(path, [&](std::ostream& out) { save_student(out, model, norm); });
}

LoadedTeacher load_teacher_file(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return load_teacher(in);
}

LoadedStudent load_student_file(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return load_student(in);
}

std::string model_kind_of(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  Reader r(in);
  if (r.word() != kModelMagic) throw ParseError("not a tskd model record");
  r.count();
  r.expect("kind");
  return r.word();
}

}  // namespace tskd
