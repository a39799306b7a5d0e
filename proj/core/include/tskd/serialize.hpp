#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "tskd/data.hpp"
#include "tskd/student.hpp"
#include "tskd/teacher.hpp"

namespace tskd {

// Line-oriented model record:
//
//   TSKD-MODEL 1
//   kind teacher|student
//   rules K / features m / order n
//   centers <K*m> / widths <K*m>           (row-major, rule by rule)
//   regularization L / class_labels <C>    (teacher only)
//   coefficients <rows> <cols> <values>    (column-major)
//   normalization <m mins> <m maxs>        (optional)
//   end
//
// Numbers use 17 significant digits so a save/load cycle is exact.

inline constexpr std::string_view kModelMagic = "TSKD-MODEL";
inline constexpr int kModelVersion = 1;

void save_teacher(std::ostream& out, const TeacherModel& model, const std::optional<Normalizer>& norm = {});
void save_student(std::ostream& out, const StudentModel& model, const std::optional<Normalizer>& norm = {});

/// "teacher" or "student", read from the record header of a model file.
std::string model_kind_of(const std::filesystem::path& path);

struct LoadedTeacher {
  TeacherModel model;
  std::optional<Normalizer> normalization;
};
struct LoadedStudent {
  StudentModel model;
  std::optional<Normalizer> normalization;
};

/// Throw ParseError on a bad magic, version, record kind, or truncated record.
LoadedTeacher load_teacher(std::istream& in);
LoadedStudent load_student(std::istream& in);

void save_teacher_file(const std::filesystem::path& path, const TeacherModel& model,
                       const std::optional<Normalizer>& norm = {});
void save_student_file(const std::filesystem::path& path, const StudentModel& model,
                       const std::optional<Normalizer>& norm = {});
LoadedTeacher load_teacher_file(const std::filesystem::path& path);
LoadedStudent load_student_file(const std::filesystem::path& path);

}  // namespace tskd
