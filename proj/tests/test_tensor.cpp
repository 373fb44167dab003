#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pose6d/net/gradcheck.hpp"
#include "pose6d/net/graph.hpp"

using namespace pose6d;

namespace {

Tensor make_tensor(std::vector<int> shape, std::initializer_list<double> vals) {
  Tensor t = Tensor::zeros(std::move(shape));
  int i = 0;
  for (double v : vals) t.data[i++] = v;
  return t;
}

}  // namespace

TEST_CASE("tensor shape bookkeeping") {
  CHECK_THROWS_AS(Tensor({2, 3}, Eigen::ArrayXd::Zero(5)), InvalidArgumentError);
  Tensor t = Tensor::zeros({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  Tensor s = Tensor::scalar(4.5);
  CHECK(s.rank() == 1);
  CHECK(s.data[0] == 4.5);
}

TEST_CASE("linear computes x w + b row-wise") {
  Graph g;
  const int x = g.input(make_tensor({2, 2}, {1, 2, 3, 4}));
  const int w = g.input(make_tensor({2, 3}, {1, 0, 2, 0, 1, 1}));
  const int b = g.input(make_tensor({1, 3}, {10, 20, 30}));
  const int y = g.linear(x, w, b);
  const auto& v = g.value(y);
  CHECK(v.matrix()(0, 0) == 11);   // 1*1 + 2*0 + 10
  CHECK(v.matrix()(0, 1) == 22);   // 1*0 + 2*1 + 20
  CHECK(v.matrix()(0, 2) == 34);   // 1*2 + 2*1 + 30
  CHECK(v.matrix()(1, 2) == 40);
}

TEST_CASE("relu masks gradients at inactive entries") {
  Graph g;
  const int x = g.param(make_tensor({1, 4}, {-2, -0.5, 0.5, 3}));
  const int y = g.relu(x);
  const int w = g.input(make_tensor({4, 1}, {1, 1, 1, 1}));
  const int b = g.input(Tensor::zeros({1, 1}));
  const int out = g.linear(y, w, b);
  g.backward(out);
  CHECK(g.value(y).data[0] == 0.0);
  CHECK(g.value(y).data[3] == 3.0);
  CHECK(g.grad(x).data[0] == 0.0);
  CHECK(g.grad(x).data[1] == 0.0);
  CHECK(g.grad(x).data[2] == 1.0);
  CHECK(g.grad(x).data[3] == 1.0);
}

TEST_CASE("gather_rows accumulates gradients for repeated indices") {
  Graph g;
  const int x = g.param(make_tensor({3, 2}, {1, 2, 3, 4, 5, 6}));
  const int y = g.gather_rows(x, {2, 0, 2});
  CHECK(g.value(y).matrix()(0, 0) == 5);
  CHECK(g.value(y).matrix()(1, 0) == 1);
  const int w = g.input(make_tensor({2, 1}, {1, 1}));
  const int b = g.input(Tensor::zeros({1, 1}));
  const int s = g.reshape(g.linear(y, w, b), {1, 3});
  const int w2 = g.input(make_tensor({3, 1}, {1, 1, 1}));
  const int out = g.linear(s, w2, b);
  g.backward(out);
  CHECK(g.grad(x).matrix()(2, 0) == 2.0);  // gathered twice
  CHECK(g.grad(x).matrix()(0, 0) == 1.0);
  CHECK(g.grad(x).matrix()(1, 0) == 0.0);  // never gathered
}

TEST_CASE("gather_rows_zero pads with zero rows that absorb gradient") {
  Graph g;
  const int x = g.param(make_tensor({2, 2}, {1, 2, 3, 4}));
  const int y = g.gather_rows_zero(x, {-1, 1});
  CHECK(g.value(y).matrix()(0, 0) == 0.0);
  CHECK(g.value(y).matrix()(0, 1) == 0.0);
  CHECK(g.value(y).matrix()(1, 1) == 4.0);
}

TEST_CASE("gather_max takes columnwise maxima and routes ties to the first index") {
  Graph g;
  const int x = g.param(make_tensor({4, 2}, {1, 9, 7, 2, 7, 5, 0, 0}));
  IndexMatrix idx(1, 3);
  idx << 1, 2, 0;
  const int y = g.gather_max(x, idx);
  CHECK(g.value(y).matrix()(0, 0) == 7.0);  // max(7, 7, 1): rows 1 and 2 tie
  CHECK(g.value(y).matrix()(0, 1) == 9.0);
  const int w = g.input(make_tensor({2, 1}, {1, 1}));
  const int b = g.input(Tensor::zeros({1, 1}));
  const int out = g.linear(y, w, b);
  g.backward(out);
  CHECK(g.grad(x).matrix()(1, 0) == 1.0);  // tie resolved to the lowest k
  CHECK(g.grad(x).matrix()(2, 0) == 0.0);
  CHECK(g.grad(x).matrix()(0, 1) == 1.0);
}

TEST_CASE("overwrite_rows splices values and splits the gradient") {
  Graph g;
  const int base = g.param(make_tensor({3, 2}, {1, 1, 2, 2, 3, 3}));
  const int values = g.param(make_tensor({1, 2}, {9, 9}));
  const int y = g.overwrite_rows(base, {1}, values);
  CHECK(g.value(y).matrix()(1, 0) == 9.0);
  CHECK(g.value(y).matrix()(0, 0) == 1.0);
  const int w = g.input(make_tensor({2, 1}, {1, 2}));
  const int b = g.input(Tensor::zeros({1, 1}));
  const int s = g.reshape(g.linear(y, w, b), {1, 3});
  const int w2 = g.input(make_tensor({3, 1}, {1, 1, 1}));
  const int out = g.linear(s, w2, b);
  g.backward(out);
  CHECK(g.grad(base).matrix()(1, 0) == 0.0);  // overwritten row gets nothing
  CHECK(g.grad(base).matrix()(0, 0) == 1.0);
  CHECK(g.grad(values).matrix()(0, 0) == 1.0);
  CHECK(g.grad(values).matrix()(0, 1) == 2.0);
}

TEST_CASE("focal loss reduces to cross-entropy at gamma zero") {
  Graph g;
  const int logits = g.param(Tensor::zeros({2, 3}));
  const int loss = g.focal_loss(logits, {0, 2}, 1.0, 0.0);
  CHECK(g.value(loss).data[0] == doctest::Approx(std::log(3.0)));
  Graph g2;
  const int confident = g2.param(make_tensor({1, 2}, {50, -50}));
  const int focal = g2.focal_loss(confident, {0}, 1.0, 2.0);
  CHECK(g2.value(focal).data[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("l1 loss averages only over masked rows") {
  Graph g;
  const int pred = g.param(make_tensor({2, 2}, {1, 2, 3, 4}));
  const Tensor target = make_tensor({2, 2}, {0, 0, 0, 0});
  const int loss = g.l1_loss(pred, target, {true, false});
  CHECK(g.value(loss).data[0] == doctest::Approx(1.5));  // (|1| + |2|) / 2
  g.backward(loss);
  CHECK(g.grad(pred).matrix()(0, 0) == doctest::Approx(0.5));
  CHECK(g.grad(pred).matrix()(1, 0) == 0.0);  // masked out
}

TEST_CASE("weighted_sum combines scalar terms linearly") {
  Graph g;
  const int a = g.param(Tensor::scalar(2.0));
  const int b = g.param(Tensor::scalar(-3.0));
  const int y = g.weighted_sum({a, b}, {0.5, 2.0});
  CHECK(g.value(y).data[0] == doctest::Approx(-5.0));
  g.backward(y);
  CHECK(g.grad(a).data[0] == doctest::Approx(0.5));
  CHECK(g.grad(b).data[0] == doctest::Approx(2.0));
}

TEST_CASE("every op passes a seeded finite-difference check") {
  const GradCheckSummary summary = run_gradcheck_suite(123);
  CHECK(summary.per_op_max < 1e-5);
  CHECK(summary.end_to_end_max < 1e-4);
}
