#include <random>

#include <benchmark/benchmark.h>

#include "tskd/tskd.hpp"

namespace {

using tskd::Matrix;

Matrix unit_matrix(tskd::Index n, tskd::Index m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix X(n, m);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = unit(gen);
  return X;
}

std::vector<int> labels(tskd::Index n, int classes) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
  return y;
}

void BM_FiringStrengths(benchmark::State& state) {
  const auto m = state.range(0);
  const auto rb = tskd::build_rule_base(16, m, {0.5}, 1);
  const Matrix X = unit_matrix(1000, m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(tskd::firing_strengths(rb, X));
  state.SetItemsProcessed(state.iterations() * X.rows());
}
BENCHMARK(BM_FiringStrengths)->Arg(4)->Arg(13)->Arg(60);

void BM_TeacherFit(benchmark::State& state) {
  const auto n = state.range(0);
  const auto m = state.range(1);
  const auto rb = tskd::build_rule_base(8, m, {0.5}, 1);
  const Matrix X = unit_matrix(n, m, 3);
  const auto y = tskd::encode_labels(labels(n, 3), tskd::default_class_encoding(3));
  for (auto _ : state) benchmark::DoNotOptimize(tskd::fit_teacher(rb, X, y, 100.0));
}
BENCHMARK(BM_TeacherFit)->Args({150, 4})->Args({180, 7})->Args({180, 13})->Unit(benchmark::kMillisecond);

void BM_DistillEpoch(benchmark::State& state) {
  const auto n = state.range(0);
  const auto m = state.range(1);
  const Matrix X = unit_matrix(n, m, 4);
  const auto y = labels(n, 3);
  const auto rb = tskd::build_rule_base(8, m, {0.5}, 5);
  const auto student = tskd::initialize_student(rb, 3);
  const Matrix design = tskd::student_design(student, X);
  const Matrix teacher = tskd::teacher_logits(unit_matrix(n, 1, 6).col(0) * 2.0, tskd::default_class_encoding(3));
  const Matrix onehot = tskd::one_hot(y, 3);
  tskd::DistillConfig cfg;
  cfg.train = {0.01, 2, 0.0};  // one gradient step
  for (auto _ : state) benchmark::DoNotOptimize(tskd::distill_on_design(teacher, student, design, onehot, cfg));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DistillEpoch)->Args({150, 4})->Args({180, 13})->Args({5000, 13});

}  // namespace

BENCHMARK_MAIN();
