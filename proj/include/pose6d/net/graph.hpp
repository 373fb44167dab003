#pragma once

#include <functional>
#include <vector>

#include "pose6d/core/types.hpp"
#include "pose6d/net/tensor.hpp"

namespace pose6d {

/// Reverse-mode autodiff over a closed op set: a tape of nodes built in
/// topological order, each carrying its value and a backward closure that
/// scatters the node's gradient into its inputs. One graph = one forward
/// pass; graphs are cheap and rebuilt per evaluation.
class Graph {
 public:
  /// Leaf holding data. Leaves receive gradients like any other node.
  int input(Tensor value);
  /// Same as input; tagging lets callers enumerate trainable leaves.
  int param(Tensor value);

  const Tensor& value(int id) const { return nodes_.at(id).value; }
  const Tensor& grad(int id) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Reverse sweep from a scalar node (gradient seeded with 1).
  void backward(int id);

  // --- ops -----------------------------------------------------------
  /// x: R x Cin, w: Cin x Cout, b: Cout (shape {1, Cout}) -> R x Cout.
  int linear(int x, int w, int b);
  int relu(int x);
  /// a: R x Ca, b: R x Cb -> R x (Ca + Cb).
  int concat_cols(int a, int b);
  /// x: S x C, rows: M indices -> M x C. Gradients scatter-add back.
  int gather_rows(int x, std::vector<int> rows);
  /// gather_rows where index -1 yields a zero row (used for conv padding).
  int gather_rows_zero(int x, std::vector<int> rows);
  /// x: S x C, idx: M x K -> M x C columnwise max over each index row.
  /// Gradient routes to the argmax element; ties go to the lowest k.
  int gather_max(int x, IndexMatrix idx);
  /// Copy of base with base[rows[i]] replaced by values row i.
  int overwrite_rows(int base, std::vector<int> rows, int values);
  /// Same data, new shape (numel preserved).
  int reshape(int x, std::vector<int> shape);
  /// Scalar terms combined as sum_i weights[i] * terms[i].
  int weighted_sum(const std::vector<int>& terms, const std::vector<double>& weights);
  /// Mean over rows of -alpha * (1 - p_t)^gamma * log(max(p_t, 1e-12)),
  /// p = row softmax of logits: N x C. Scalar output.
  int focal_loss(int logits, const std::vector<int>& labels, double alpha = 1.0,
                 double gamma = 2.0);
  /// Mean |pred - target| over entries of rows with row_mask true.
  int l1_loss(int pred, const Tensor& target, const std::vector<bool>& row_mask);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> back;  // may be empty for leaves
    bool is_param = false;
  };

  int push(Tensor value, std::function<void()> back, bool is_param = false);
  Tensor& grad_ref(int id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
  bool ran_backward_ = false;
};

}  // namespace pose6d
