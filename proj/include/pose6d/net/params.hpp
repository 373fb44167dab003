#pragma once

#include <map>
#include <string>
#include <vector>

#include "pose6d/core/rng.hpp"
#include "pose6d/net/tensor.hpp"

namespace pose6d {

/// Named parameter tensors. Ordered map so iteration (updates, serialization,
/// random parameter picks) is deterministic.
class ParamStore {
 public:
  bool has(const std::string& name) const { return store_.count(name) != 0; }

  Tensor& get(const std::string& name) {
    auto it = store_.find(name);
    if (it == store_.end()) throw InvalidArgumentError("unknown parameter: " + name);
    return it->second;
  }
  const Tensor& get(const std::string& name) const {
    auto it = store_.find(name);
    if (it == store_.end()) throw InvalidArgumentError("unknown parameter: " + name);
    return it->second;
  }

  void set(const std::string& name, Tensor t) { store_[name] = std::move(t); }

  /// Creates name.w (fan_in x fan_out) and name.b (1 x fan_out), both drawn
  /// uniform in ±1/sqrt(fan_in).
  void init_linear(const std::string& name, int fan_in, int fan_out, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Tensor w = Tensor::zeros({fan_in, fan_out});
    for (int i = 0; i < w.numel(); ++i) w.data[i] = rng.uniform(-bound, bound);
    Tensor b = Tensor::zeros({1, fan_out});
    for (int i = 0; i < b.numel(); ++i) b.data[i] = rng.uniform(-bound, bound);
    set(name + ".w", std::move(w));
    set(name + ".b", std::move(b));
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, tensor] : store_) out.push_back(name);
    return out;
  }

  auto begin() { return store_.begin(); }
  auto end() { return store_.end(); }
  auto begin() const { return store_.begin(); }
  auto end() const { return store_.end(); }
  int size() const { return static_cast<int>(store_.size()); }

 private:
  std::map<std::string, Tensor> store_;
};

}  // namespace pose6d
