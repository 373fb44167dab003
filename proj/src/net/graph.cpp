#include "pose6d/net/graph.hpp"

#include <cmath>

namespace pose6d {

namespace {
constexpr double kLogClamp = 1e-12;
}

int Graph::push(Tensor value, std::function<void()> back, bool is_param) {
  Node node;
  node.value = std::move(value);
  node.back = std::move(back);
  node.is_param = is_param;
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int Graph::input(Tensor value) { return push(std::move(value), {}); }

int Graph::param(Tensor value) { return push(std::move(value), {}, true); }

const Tensor& Graph::grad(int id) const {
  if (!ran_backward_) throw InvalidArgumentError("graph: backward has not run");
  return nodes_.at(id).grad;
}

void Graph::backward(int id) {
  if (nodes_.at(id).value.numel() != 1)
    throw InvalidArgumentError("graph: backward needs a scalar node");
  for (Node& node : nodes_) {
    node.grad = Tensor::zeros(node.value.shape);
  }
  nodes_[id].grad.data[0] = 1.0;
  for (int i = id; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back();
  }
  ran_backward_ = true;
}

int Graph::linear(int x, int w, int b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  if (xv.rank() != 2 || wv.rank() != 2 || xv.cols() != wv.rows())
    throw InvalidArgumentError("linear: shape mismatch");
  if (bv.numel() != wv.cols())
    throw InvalidArgumentError("linear: bias length must equal output width");
  Tensor out = Tensor::zeros({xv.rows(), wv.cols()});
  out.matrix() = xv.matrix() * wv.matrix();
  out.matrix().rowwise() += ConstRowMatrixMap(bv.data.data(), 1, bv.numel()).row(0);
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, x, w, b] {
    const auto dy = nodes_[id].grad.matrix();
    grad_ref(x).matrix() += dy * value(w).matrix().transpose();
    grad_ref(w).matrix() += value(x).matrix().transpose() * dy;
    RowMatrixMap(grad_ref(b).data.data(), 1, grad_ref(b).numel()) +=
        dy.colwise().sum();
  };
  return id;
}

int Graph::relu(int x) {
  Tensor out = value(x);
  out.data = out.data.max(0.0);
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, x] {
    grad_ref(x).data += (value(x).data > 0.0).cast<double>() * nodes_[id].grad.data;
  };
  return id;
}

int Graph::concat_cols(int a, int b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.rank() != 2 || bv.rank() != 2 || av.rows() != bv.rows())
    throw InvalidArgumentError("concat_cols: row counts differ");
  const int ca = av.cols(), cb = bv.cols();
  Tensor out = Tensor::zeros({av.rows(), ca + cb});
  out.matrix().leftCols(ca) = av.matrix();
  out.matrix().rightCols(cb) = bv.matrix();
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, a, b, ca, cb] {
    const auto dy = nodes_[id].grad.matrix();
    grad_ref(a).matrix() += dy.leftCols(ca);
    grad_ref(b).matrix() += dy.rightCols(cb);
  };
  return id;
}

int Graph::gather_rows(int x, std::vector<int> rows) {
  const Tensor& xv = value(x);
  if (xv.rank() != 2) throw InvalidArgumentError("gather_rows: need rank 2");
  for (int r : rows) {
    if (r < 0 || r >= xv.rows())
      throw InvalidArgumentError("gather_rows: index out of range");
  }
  Tensor out = Tensor::zeros({static_cast<int>(rows.size()), xv.cols()});
  for (int i = 0; i < out.rows(); ++i) out.matrix().row(i) = xv.matrix().row(rows[i]);
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, x, rows = std::move(rows)] {
    const auto dy = nodes_[id].grad.matrix();
    auto dx = grad_ref(x).matrix();
    for (int i = 0; i < static_cast<int>(rows.size()); ++i)
      dx.row(rows[i]) += dy.row(i);
  };
  return id;
}

int Graph::gather_rows_zero(int x, std::vector<int> rows) {
  const Tensor& xv = value(x);
  if (xv.rank() != 2) throw InvalidArgumentError("gather_rows_zero: need rank 2");
  for (int r : rows) {
    if (r < -1 || r >= xv.rows())
      throw InvalidArgumentError("gather_rows_zero: index out of range");
  }
  Tensor out = Tensor::zeros({static_cast<int>(rows.size()), xv.cols()});
  for (int i = 0; i < out.rows(); ++i) {
    if (rows[i] >= 0) out.matrix().row(i) = xv.matrix().row(rows[i]);
  }
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, x, rows = std::move(rows)] {
    const auto dy = nodes_[id].grad.matrix();
    auto dx = grad_ref(x).matrix();
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (rows[i] >= 0) dx.row(rows[i]) += dy.row(i);
    }
  };
  return id;
}

int Graph::gather_max(int x, IndexMatrix idx) {
  const Tensor& xv = value(x);
  if (xv.rank() != 2) throw InvalidArgumentError("gather_max: need rank 2");
  if (idx.cols() < 1) throw InvalidArgumentError("gather_max: need at least one neighbor");
  if ((idx.array() < 0).any() || (idx.array() >= xv.rows()).any())
    throw InvalidArgumentError("gather_max: index out of range");
  const int m = static_cast<int>(idx.rows());
  const int k = static_cast<int>(idx.cols());
  const int c = xv.cols();
  Tensor out = Tensor::zeros({m, c});
  IndexMatrix argmax(m, c);
  for (int i = 0; i < m; ++i) {
    for (int col = 0; col < c; ++col) {
      double best = xv.at(idx(i, 0), col);
      int best_row = idx(i, 0);
      for (int kk = 1; kk < k; ++kk) {
        const double v = xv.at(idx(i, kk), col);
        if (v > best) {  // strict: ties keep the lowest k
          best = v;
          best_row = idx(i, kk);
        }
      }
      out.at(i, col) = best;
      argmax(i, col) = best_row;
    }
  }
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, x, argmax = std::move(argmax)] {
    const Tensor& dy = nodes_[id].grad;
    Tensor& dx = grad_ref(x);
    for (int i = 0; i < argmax.rows(); ++i)
      for (int col = 0; col < argmax.cols(); ++col)
        dx.at(argmax(i, col), col) += dy.at(i, col);
  };
  return id;
}

int Graph::overwrite_rows(int base, std::vector<int> rows, int values) {
  const Tensor& bv = value(base);
  const Tensor& vv = value(values);
  if (bv.rank() != 2 || vv.rank() != 2 || bv.cols() != vv.cols())
    throw InvalidArgumentError("overwrite_rows: column mismatch");
  if (static_cast<int>(rows.size()) != vv.rows())
    throw InvalidArgumentError("overwrite_rows: row list length mismatch");
  std::vector<bool> replaced(bv.rows(), false);
  for (int r : rows) {
    if (r < 0 || r >= bv.rows())
      throw InvalidArgumentError("overwrite_rows: index out of range");
    replaced[r] = true;
  }
  Tensor out = bv;
  for (int i = 0; i < vv.rows(); ++i) out.matrix().row(rows[i]) = vv.matrix().row(i);
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, base, values, rows = std::move(rows),
                     replaced = std::move(replaced)] {
    const auto dy = nodes_[id].grad.matrix();
    auto db = grad_ref(base).matrix();
    auto dv = grad_ref(values).matrix();
    for (int r = 0; r < static_cast<int>(replaced.size()); ++r) {
      if (!replaced[r]) db.row(r) += dy.row(r);
    }
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) dv.row(i) += dy.row(rows[i]);
  };
  return id;
}

int Graph::reshape(int x, std::vector<int> shape) {
  Tensor out(shape, value(x).data);
  const int id = push(std::move(out), {});
  nodes_[id].back = [this, id, x] { grad_ref(x).data += nodes_[id].grad.data; };
  return id;
}

int Graph::weighted_sum(const std::vector<int>& terms,
                        const std::vector<double>& weights) {
  if (terms.empty() || terms.size() != weights.size())
    throw InvalidArgumentError("weighted_sum: term/weight count mismatch");
  double total = 0.0;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (value(terms[i]).numel() != 1)
      throw InvalidArgumentError("weighted_sum: terms must be scalars");
    total += weights[i] * value(terms[i]).data[0];
  }
  const int id = push(Tensor::scalar(total), {});
  nodes_[id].back = [this, id, terms, weights] {
    const double dy = nodes_[id].grad.data[0];
    for (size_t i = 0; i < terms.size(); ++i)
      grad_ref(terms[i]).data[0] += weights[i] * dy;
  };
  return id;
}

int Graph::focal_loss(int logits, const std::vector<int>& labels, double alpha,
                      double gamma) {
  const Tensor& lv = value(logits);
  if (lv.rank() != 2) throw InvalidArgumentError("focal_loss: logits must be N x C");
  const int n = lv.rows(), c = lv.cols();
  if (static_cast<int>(labels.size()) != n)
    throw InvalidArgumentError("focal_loss: label count mismatch");
  for (int l : labels) {
    if (l < 0 || l >= c) throw InvalidArgumentError("focal_loss: label out of range");
  }
  // Row-stable softmax.
  Tensor prob = Tensor::zeros({n, c});
  for (int i = 0; i < n; ++i) {
    const double mx = lv.matrix().row(i).maxCoeff();
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      prob.at(i, j) = std::exp(lv.at(i, j) - mx);
      sum += prob.at(i, j);
    }
    for (int j = 0; j < c; ++j) prob.at(i, j) /= sum;
  }
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pt = std::max(prob.at(i, labels[i]), kLogClamp);
    loss += -alpha * std::pow(1.0 - prob.at(i, labels[i]), gamma) * std::log(pt);
  }
  loss /= n;
  const int id = push(Tensor::scalar(loss), {});
  nodes_[id].back = [this, id, logits, labels, alpha, gamma, prob = std::move(prob)] {
    const double dy = nodes_[id].grad.data[0];
    auto dz = grad_ref(logits).matrix();
    const int nn = prob.rows(), cc = prob.cols();
    for (int i = 0; i < nn; ++i) {
      const double p = prob.at(i, labels[i]);
      const double pt = std::max(p, kLogClamp);
      // dL/dp with the log clamp respected.
      double dldp = 0.0;
      if (gamma > 0.0) dldp += alpha * gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(pt);
      if (p > kLogClamp) dldp -= alpha * std::pow(1.0 - p, gamma) / p;
      for (int j = 0; j < cc; ++j) {
        const double dpdz = p * ((j == labels[i] ? 1.0 : 0.0) - prob.at(i, j));
        dz(i, j) += dy * dldp * dpdz / nn;
      }
    }
  };
  return id;
}

int Graph::l1_loss(int pred, const Tensor& target, const std::vector<bool>& row_mask) {
  const Tensor& pv = value(pred);
  if (!pv.same_shape(target)) throw InvalidArgumentError("l1_loss: shape mismatch");
  if (pv.rank() != 2) throw InvalidArgumentError("l1_loss: need rank 2");
  if (static_cast<int>(row_mask.size()) != pv.rows())
    throw InvalidArgumentError("l1_loss: mask length mismatch");
  long count = 0;
  double loss = 0.0;
  for (int i = 0; i < pv.rows(); ++i) {
    if (!row_mask[i]) continue;
    count += pv.cols();
    loss += (pv.matrix().row(i) - target.matrix().row(i)).cwiseAbs().sum();
  }
  if (count == 0) throw InvalidArgumentError("l1_loss: no valid rows");
  loss /= count;
  const int id = push(Tensor::scalar(loss), {});
  nodes_[id].back = [this, id, pred, target, row_mask, count] {
    const double dy = nodes_[id].grad.data[0];
    auto dp = grad_ref(pred).matrix();
    const auto pv = value(pred).matrix();
    for (int i = 0; i < pv.rows(); ++i) {
      if (!row_mask[i]) continue;
      for (int j = 0; j < pv.cols(); ++j) {
        const double e = pv(i, j) - target.at(i, j);
        const double s = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
        dp(i, j) += dy * s / count;
      }
    }
  };
  return id;
}

}  // namespace pose6d
