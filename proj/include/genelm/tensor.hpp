#pragma once

// Dense tensors with reverse-mode automatic differentiation, a seeded RNG,
// the AdamW optimizer, and a central-difference gradient oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace genelm {

class TensorError : public std::runtime_error {
 public:
  explicit TensorError(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public TensorError {
 public:
  explicit ShapeError(const std::string& msg) : TensorError(msg) {}
};

// f64 for tests and gradient checks, f32 rounds every primitive's output
// through float to emulate single-precision training.
enum class Precision { f64, f32 };

inline Precision& precision_mode() {
  static Precision mode = Precision::f64;
  return mode;
}

// Tape recording can be suspended for evaluation-only passes.
inline bool& grad_enabled() {
  static bool enabled = true;
  return enabled;
}

struct NoGradGuard {
  bool prev;
  NoGradGuard() : prev(grad_enabled()) { grad_enabled() = false; }
  ~NoGradGuard() { grad_enabled() = prev; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

// Explicit generator threaded through all stochastic ops; no global state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; implementation-independent for cross-platform determinism.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

namespace detail {

struct TensorNode {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grad;  // allocated on demand
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;  // pulls node.grad into parents

  std::size_t size() const { return values.size(); }

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  }
};

inline std::string shape_str(const std::vector<std::size_t>& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

}  // namespace detail

class Tensor {
 public:
  Tensor() : node_(std::make_shared<detail::TensorNode>()) {}

  Tensor(std::vector<std::size_t> shape, std::vector<double> values,
         bool requires_grad = false)
      : node_(std::make_shared<detail::TensorNode>()) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    if (n != values.size()) {
      throw ShapeError("tensor: shape " + detail::shape_str(shape) +
                       " does not match value count " +
                       std::to_string(values.size()));
    }
    node_->shape = std::move(shape);
    node_->values = std::move(values);
    node_->requires_grad = requires_grad;
  }

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
  }

  static Tensor full(std::vector<std::size_t> shape, double v,
                     bool requires_grad = false) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return Tensor(std::move(shape), std::vector<double>(n, v), requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return Tensor({}, {v}, requires_grad);
  }

  const std::vector<std::size_t>& shape() const { return node_->shape; }
  std::size_t ndim() const { return node_->shape.size(); }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t size() const { return node_->values.size(); }

  const std::vector<double>& values() const { return node_->values; }
  std::vector<double>& mutable_values() { return node_->values; }
  double item() const {
    if (size() != 1) throw TensorError("item(): tensor is not scalar");
    return node_->values[0];
  }
  double at(std::size_t i) const { return node_->values.at(i); }
  double at(std::size_t r, std::size_t c) const {
    return node_->values.at(r * dim(1) + c);
  }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool b) { node_->requires_grad = b; }

  bool has_grad() const { return node_->grad.size() == size(); }
  const std::vector<double>& grad() const {
    if (!has_grad()) throw TensorError("grad(): gradient not populated");
    return node_->grad;
  }
  void zero_grad() { node_->grad.clear(); }

  bool is_leaf() const { return node_->parents.empty(); }

  std::shared_ptr<detail::TensorNode> node() const { return node_; }

  bool same_node(const Tensor& o) const { return node_ == o.node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::TensorNode> node_;

  friend Tensor make_result(std::vector<std::size_t> shape,
                            std::vector<double> values, const char* op,
                            std::vector<Tensor> parents,
                            std::function<void(detail::TensorNode&)> backprop);
};

namespace detail {
inline void round_to_precision(std::vector<double>& v) {
  if (precision_mode() == Precision::f32) {
    for (double& x : v) x = static_cast<double>(static_cast<float>(x));
  }
}
}  // namespace detail

// Every forward primitive funnels through here: precision rounding, the
// finite-output check, and tape recording.
inline Tensor make_result(std::vector<std::size_t> shape,
                          std::vector<double> values, const char* op,
                          std::vector<Tensor> parents,
                          std::function<void(detail::TensorNode&)> backprop) {
  detail::round_to_precision(values);
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw TensorError(std::string(op) + ": non-finite output value");
    }
  }
  Tensor out(std::move(shape), std::move(values));
  bool needs_tape = false;
  if (grad_enabled()) {
    for (const Tensor& p : parents) {
      if (p.requires_grad() || !p.node()->parents.empty() ||
          p.node()->backprop) {
        needs_tape = true;
        break;
      }
    }
  }
  if (needs_tape) {
    auto n = out.node();
    n->requires_grad = true;
    for (const Tensor& p : parents) n->parents.push_back(p.node());
    n->backprop = std::move(backprop);
  }
  return out;
}

inline void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     detail::shape_str(a.shape()) + " vs " +
                     detail::shape_str(b.shape()));
  }
}

// ---- elementwise ----

inline Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  auto an = a.node(), bn = b.node();
  return make_result(a.shape(), std::move(out), "add", {a, b},
                     [an, bn](detail::TensorNode& n) {
                       an->ensure_grad();
                       bn->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i];
                         bn->grad[i] += n.grad[i];
                       }
                     });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  auto an = a.node(), bn = b.node();
  return make_result(a.shape(), std::move(out), "sub", {a, b},
                     [an, bn](detail::TensorNode& n) {
                       an->ensure_grad();
                       bn->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i];
                         bn->grad[i] -= n.grad[i];
                       }
                     });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  auto an = a.node(), bn = b.node();
  return make_result(a.shape(), std::move(out), "mul", {a, b},
                     [an, bn](detail::TensorNode& n) {
                       an->ensure_grad();
                       bn->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i] * bn->values[i];
                         bn->grad[i] += n.grad[i] * an->values[i];
                       }
                     });
}

inline Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * c;
  auto an = a.node();
  return make_result(a.shape(), std::move(out), "scale", {a},
                     [an, c](detail::TensorNode& n) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i] * c;
                       }
                     });
}

inline Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + c;
  auto an = a.node();
  return make_result(a.shape(), std::move(out), "add_scalar", {a},
                     [an](detail::TensorNode& n) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i];
                       }
                     });
}

inline Tensor exp(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(a.at(i));
  auto an = a.node();
  return make_result(a.shape(), std::move(out), "exp", {a},
                     [an](detail::TensorNode& n) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i] * n.values[i];
                       }
                     });
}

inline Tensor silu(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = a.at(i);
    out[i] = x / (1.0 + std::exp(-x));
  }
  auto an = a.node();
  return make_result(a.shape(), std::move(out), "silu", {a},
                     [an](detail::TensorNode& n) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         double x = an->values[i];
                         double s = 1.0 / (1.0 + std::exp(-x));
                         an->grad[i] += n.grad[i] * (s + x * s * (1.0 - s));
                       }
                     });
}

// min(a, b) elementwise; ties route the gradient to a.
inline Tensor minimum(const Tensor& a, const Tensor& b) {
  check_same_shape("minimum", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::min(a.at(i), b.at(i));
  auto an = a.node(), bn = b.node();
  return make_result(a.shape(), std::move(out), "minimum", {a, b},
                     [an, bn](detail::TensorNode& n) {
                       an->ensure_grad();
                       bn->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         if (an->values[i] <= bn->values[i]) {
                           an->grad[i] += n.grad[i];
                         } else {
                           bn->grad[i] += n.grad[i];
                         }
                       }
                     });
}

// clamp; gradient is zero where the bound binds
inline Tensor clamp(const Tensor& a, double lo, double hi) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::min(std::max(a.at(i), lo), hi);
  auto an = a.node();
  return make_result(a.shape(), std::move(out), "clamp", {a},
                     [an, lo, hi](detail::TensorNode& n) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         double x = an->values[i];
                         if (x > lo && x < hi) an->grad[i] += n.grad[i];
                       }
                     });
}

inline Tensor dropout(const Tensor& a, double p, Rng& rng, bool train) {
  if (p < 0.0 || p >= 1.0) throw TensorError("dropout: p must be in [0,1)");
  if (!train || p == 0.0) return a;
  double keep = 1.0 - p;
  std::vector<double> mask(a.size());
  for (double& m : mask) m = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * mask[i];
  auto an = a.node();
  auto mk = std::make_shared<std::vector<double>>(std::move(mask));
  return make_result(a.shape(), std::move(out), "dropout", {a},
                     [an, mk](detail::TensorNode& n) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n.size(); ++i) {
                         an->grad[i] += n.grad[i] * (*mk)[i];
                       }
                     });
}

// ---- reductions ----

inline Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.at(i);
  auto an = a.node();
  return make_result({}, {s}, "sum", {a}, [an](detail::TensorNode& n) {
    an->ensure_grad();
    for (std::size_t i = 0; i < an->values.size(); ++i) {
      an->grad[i] += n.grad[0];
    }
  });
}

inline Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw TensorError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

// ---- matrix ops (row-major N x D) ----

inline void require_matrix(const char* op, const Tensor& a) {
  if (a.ndim() != 2) {
    throw ShapeError(std::string(op) + ": expected matrix, got " +
                     detail::shape_str(a.shape()));
  }
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix("matmul", a);
  require_matrix("matmul", b);
  std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dims differ, " +
                     detail::shape_str(a.shape()) + " vs " +
                     detail::shape_str(b.shape()));
  }
  std::vector<double> out(n * m, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
#pragma omp parallel for if (n * m * k > 16384)
  for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
    std::size_t i = static_cast<std::size_t>(ii);
    for (std::size_t p = 0; p < k; ++p) {
      double aval = av[i * k + p];
      if (aval == 0.0) continue;
      const double* brow = bv + p * m;
      double* orow = out.data() + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aval * brow[j];
    }
  }
  auto an = a.node(), bn = b.node();
  return make_result(
      {n, m}, std::move(out), "matmul", {a, b},
      [an, bn, n, k, m](detail::TensorNode& nd) {
        an->ensure_grad();
        bn->ensure_grad();
        const double* g = nd.grad.data();
        const double* av2 = an->values.data();
        const double* bv2 = bn->values.data();
        // dA = G B^T
#pragma omp parallel for if (n * m * k > 16384)
        for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
          std::size_t i = static_cast<std::size_t>(ii);
          for (std::size_t p = 0; p < k; ++p) {
            double s = 0.0;
            const double* grow = g + i * m;
            const double* brow = bv2 + p * m;
            for (std::size_t j = 0; j < m; ++j) s += grow[j] * brow[j];
            an->grad[i * k + p] += s;
          }
        }
        // dB = A^T G
#pragma omp parallel for if (n * m * k > 16384)
        for (long long pp = 0; pp < static_cast<long long>(k); ++pp) {
          std::size_t p = static_cast<std::size_t>(pp);
          for (std::size_t i = 0; i < n; ++i) {
            double aval = av2[i * k + p];
            if (aval == 0.0) continue;
            const double* grow = g + i * m;
            double* brow = bn->grad.data() + p * m;
            for (std::size_t j = 0; j < m; ++j) brow[j] += aval * grow[j];
          }
        }
      });
}

inline Tensor transpose(const Tensor& a) {
  require_matrix("transpose", a);
  std::size_t n = a.dim(0), m = a.dim(1);
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j * n + i] = a.at(i, j);
  auto an = a.node();
  return make_result({m, n}, std::move(out), "transpose", {a},
                     [an, n, m](detail::TensorNode& nd) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i)
                         for (std::size_t j = 0; j < m; ++j)
                           an->grad[i * m + j] += nd.grad[j * n + i];
                     });
}

// broadcast-add a length-D row vector to every row of an N x D matrix
inline Tensor add_row(const Tensor& a, const Tensor& row) {
  require_matrix("add_row", a);
  std::size_t n = a.dim(0), d = a.dim(1);
  if (row.size() != d) {
    throw ShapeError("add_row: row length " + std::to_string(row.size()) +
                     " vs matrix width " + std::to_string(d));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = a.at(i, j) + row.at(j);
  auto an = a.node(), rn = row.node();
  return make_result(a.shape(), std::move(out), "add_row", {a, row},
                     [an, rn, n, d](detail::TensorNode& nd) {
                       an->ensure_grad();
                       rn->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i)
                         for (std::size_t j = 0; j < d; ++j) {
                           an->grad[i * d + j] += nd.grad[i * d + j];
                           rn->grad[j] += nd.grad[i * d + j];
                         }
                     });
}

inline Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw TensorError("concat_rows: no inputs");
  std::size_t d = parts[0].ndim() == 2 ? parts[0].dim(1) : 0;
  std::size_t n = 0;
  for (const Tensor& p : parts) {
    require_matrix("concat_rows", p);
    if (p.dim(1) != d) {
      throw ShapeError("concat_rows: width mismatch " +
                       detail::shape_str(p.shape()));
    }
    n += p.dim(0);
  }
  std::vector<double> out;
  out.reserve(n * d);
  for (const Tensor& p : parts) {
    out.insert(out.end(), p.values().begin(), p.values().end());
  }
  std::vector<std::shared_ptr<detail::TensorNode>> nodes;
  for (const Tensor& p : parts) nodes.push_back(p.node());
  return make_result({n, d}, std::move(out), "concat_rows", parts,
                     [nodes](detail::TensorNode& nd) {
                       std::size_t off = 0;
                       for (auto& pn : nodes) {
                         pn->ensure_grad();
                         for (std::size_t i = 0; i < pn->values.size(); ++i)
                           pn->grad[i] += nd.grad[off + i];
                         off += pn->values.size();
                       }
                     });
}

inline Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
  require_matrix("slice_rows", a);
  std::size_t n = a.dim(0), d = a.dim(1);
  if (begin > end || end > n) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") out of " + std::to_string(n));
  }
  std::vector<double> out(a.values().begin() + begin * d,
                          a.values().begin() + end * d);
  auto an = a.node();
  return make_result({end - begin, d}, std::move(out), "slice_rows", {a},
                     [an, begin, d](detail::TensorNode& nd) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < nd.values.size(); ++i)
                         an->grad[begin * d + i] += nd.grad[i];
                     });
}

inline Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  require_matrix("slice_cols", a);
  std::size_t n = a.dim(0), d = a.dim(1);
  if (begin > end || end > d) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") out of " + std::to_string(d));
  }
  std::size_t w = end - begin;
  std::vector<double> out(n * w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = a.at(i, begin + j);
  auto an = a.node();
  return make_result({n, w}, std::move(out), "slice_cols", {a},
                     [an, begin, d, w](detail::TensorNode& nd) {
                       an->ensure_grad();
                       std::size_t n2 = nd.values.size() / w;
                       for (std::size_t i = 0; i < n2; ++i)
                         for (std::size_t j = 0; j < w; ++j)
                           an->grad[i * d + begin + j] += nd.grad[i * w + j];
                     });
}

inline Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw TensorError("concat_cols: no inputs");
  std::size_t n = parts[0].ndim() == 2 ? parts[0].dim(0) : 0;
  std::size_t d = 0;
  for (const Tensor& p : parts) {
    require_matrix("concat_cols", p);
    if (p.dim(0) != n) {
      throw ShapeError("concat_cols: row-count mismatch " +
                       detail::shape_str(p.shape()));
    }
    d += p.dim(1);
  }
  std::vector<double> out(n * d);
  std::size_t off = 0;
  for (const Tensor& p : parts) {
    std::size_t w = p.dim(1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < w; ++j) out[i * d + off + j] = p.at(i, j);
    off += w;
  }
  std::vector<std::shared_ptr<detail::TensorNode>> nodes;
  std::vector<std::size_t> widths;
  for (const Tensor& p : parts) {
    nodes.push_back(p.node());
    widths.push_back(p.dim(1));
  }
  return make_result({n, d}, std::move(out), "concat_cols", parts,
                     [nodes, widths, n, d](detail::TensorNode& nd) {
                       std::size_t off2 = 0;
                       for (std::size_t k = 0; k < nodes.size(); ++k) {
                         auto& pn = nodes[k];
                         std::size_t w = widths[k];
                         pn->ensure_grad();
                         for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < w; ++j)
                             pn->grad[i * w + j] += nd.grad[i * d + off2 + j];
                         off2 += w;
                       }
                     });
}

// ---- row-wise nonlinearities ----

inline Tensor softmax_rows(const Tensor& a) {
  require_matrix("softmax", a);
  std::size_t n = a.dim(0), d = a.dim(1);
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = a.at(i, 0);
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, a.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] = std::exp(a.at(i, j) - mx);
      s += out[i * d + j];
    }
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] /= s;
  }
  auto an = a.node();
  return make_result({n, d}, std::move(out), "softmax", {a},
                     [an, n, d](detail::TensorNode& nd) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) {
                         double dot = 0.0;
                         for (std::size_t j = 0; j < d; ++j)
                           dot += nd.values[i * d + j] * nd.grad[i * d + j];
                         for (std::size_t j = 0; j < d; ++j)
                           an->grad[i * d + j] += nd.values[i * d + j] *
                                                  (nd.grad[i * d + j] - dot);
                       }
                     });
}

inline Tensor log_softmax_rows(const Tensor& a) {
  require_matrix("log_softmax", a);
  std::size_t n = a.dim(0), d = a.dim(1);
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = a.at(i, 0);
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, a.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += std::exp(a.at(i, j) - mx);
    double lse = mx + std::log(s);
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = a.at(i, j) - lse;
  }
  auto an = a.node();
  return make_result({n, d}, std::move(out), "log_softmax", {a},
                     [an, n, d](detail::TensorNode& nd) {
                       an->ensure_grad();
                       for (std::size_t i = 0; i < n; ++i) {
                         double gsum = 0.0;
                         for (std::size_t j = 0; j < d; ++j)
                           gsum += nd.grad[i * d + j];
                         for (std::size_t j = 0; j < d; ++j) {
                           double p = std::exp(nd.values[i * d + j]);
                           an->grad[i * d + j] +=
                               nd.grad[i * d + j] - p * gsum;
                         }
                       }
                     });
}

// RMS normalization per row with a learnable gain vector.
inline Tensor rms_norm_rows(const Tensor& a, const Tensor& gain,
                            double eps = 1e-6) {
  require_matrix("rms_norm", a);
  std::size_t n = a.dim(0), d = a.dim(1);
  if (gain.size() != d) {
    throw ShapeError("rms_norm: gain length " + std::to_string(gain.size()) +
                     " vs width " + std::to_string(d));
  }
  std::vector<double> out(n * d);
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double ms = 0.0;
    for (std::size_t j = 0; j < d; ++j) ms += a.at(i, j) * a.at(i, j);
    ms /= static_cast<double>(d);
    inv[i] = 1.0 / std::sqrt(ms + eps);
    for (std::size_t j = 0; j < d; ++j)
      out[i * d + j] = a.at(i, j) * inv[i] * gain.at(j);
  }
  auto an = a.node(), gn = gain.node();
  auto invp = std::make_shared<std::vector<double>>(std::move(inv));
  return make_result(
      {n, d}, std::move(out), "rms_norm", {a, gain},
      [an, gn, invp, n, d](detail::TensorNode& nd) {
        an->ensure_grad();
        gn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          double r = (*invp)[i];
          double dot = 0.0;  // sum_j g_j * gain_j * x_j
          for (std::size_t j = 0; j < d; ++j)
            dot += nd.grad[i * d + j] * gn->values[j] * an->values[i * d + j];
          for (std::size_t j = 0; j < d; ++j) {
            double x = an->values[i * d + j];
            an->grad[i * d + j] +=
                r * gn->values[j] * nd.grad[i * d + j] -
                r * r * r * x * dot / static_cast<double>(d);
            gn->grad[j] += nd.grad[i * d + j] * x * r;
          }
        }
      });
}

// ---- embedding / loss ----

inline Tensor embedding_lookup(const Tensor& table,
                               const std::vector<int>& ids) {
  require_matrix("embedding_lookup", table);
  std::size_t v = table.dim(0), d = table.dim(1);
  std::vector<double> out;
  out.reserve(ids.size() * d);
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= v) {
      throw ShapeError("embedding_lookup: id " + std::to_string(id) +
                       " out of vocabulary " + std::to_string(v));
    }
    out.insert(out.end(), table.values().begin() + id * d,
               table.values().begin() + (id + 1) * d);
  }
  auto tn = table.node();
  auto idc = std::make_shared<std::vector<int>>(ids);
  return make_result({ids.size(), d}, std::move(out), "embedding_lookup",
                     {table}, [tn, idc, d](detail::TensorNode& nd) {
                       tn->ensure_grad();
                       for (std::size_t i = 0; i < idc->size(); ++i) {
                         std::size_t row = static_cast<std::size_t>((*idc)[i]);
                         for (std::size_t j = 0; j < d; ++j)
                           tn->grad[row * d + j] += nd.grad[i * d + j];
                       }
                     });
}

// log P(target_i | row i) per row: N x 1 column of log-softmax gathers.
inline Tensor gather_log_probs(const Tensor& logits,
                               const std::vector<int>& targets) {
  require_matrix("gather_log_probs", logits);
  std::size_t n = logits.dim(0), v = logits.dim(1);
  if (targets.size() != n) {
    throw ShapeError("gather_log_probs: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(n) + " rows");
  }
  std::vector<double> out(n);
  std::vector<double> probs(n * v);
  for (std::size_t i = 0; i < n; ++i) {
    int t = targets[i];
    if (t < 0 || static_cast<std::size_t>(t) >= v) {
      throw ShapeError("gather_log_probs: target " + std::to_string(t) +
                       " out of vocabulary " + std::to_string(v));
    }
    double mx = logits.at(i, 0);
    for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, logits.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < v; ++j) {
      probs[i * v + j] = std::exp(logits.at(i, j) - mx);
      s += probs[i * v + j];
    }
    for (std::size_t j = 0; j < v; ++j) probs[i * v + j] /= s;
    out[i] = logits.at(i, static_cast<std::size_t>(t)) - mx - std::log(s);
  }
  auto ln = logits.node();
  auto pr = std::make_shared<std::vector<double>>(std::move(probs));
  auto tg = std::make_shared<std::vector<int>>(targets);
  return make_result({n, 1}, std::move(out), "gather_log_probs", {logits},
                     [ln, pr, tg, v](detail::TensorNode& nd) {
                       ln->ensure_grad();
                       std::size_t n2 = nd.values.size();
                       for (std::size_t i = 0; i < n2; ++i) {
                         double g = nd.grad[i];
                         std::size_t t = static_cast<std::size_t>((*tg)[i]);
                         for (std::size_t j = 0; j < v; ++j) {
                           double delta = (j == t) ? 1.0 : 0.0;
                           ln->grad[i * v + j] +=
                               g * (delta - (*pr)[i * v + j]);
                         }
                       }
                     });
}

// mean cross-entropy over rows
inline Tensor cross_entropy(const Tensor& logits,
                            const std::vector<int>& targets) {
  Tensor lp = gather_log_probs(logits, targets);
  return scale(mean(lp), -1.0);
}

// Rotary position embedding applied per head across the row width.
// Width must be split into heads of even dimension by the caller; here the
// whole row is treated as one head.
inline Tensor apply_rope(const Tensor& x, const std::vector<int>& positions,
                         double base) {
  require_matrix("apply_rope", x);
  std::size_t n = x.dim(0), d = x.dim(1);
  if (d % 2 != 0) throw ShapeError("apply_rope: odd head width");
  if (positions.size() != n) {
    throw ShapeError("apply_rope: positions length " +
                     std::to_string(positions.size()) + " vs rows " +
                     std::to_string(n));
  }
  for (int p : positions) {
    if (p < 0) throw TensorError("apply_rope: negative position");
  }
  std::size_t half = d / 2;
  std::vector<double> cs(n * half), sn(n * half);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < half; ++j) {
      double theta = static_cast<double>(positions[i]) *
                     std::pow(base, -2.0 * static_cast<double>(j) /
                                        static_cast<double>(d));
      cs[i * half + j] = std::cos(theta);
      sn[i * half + j] = std::sin(theta);
    }
  }
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < half; ++j) {
      double x0 = x.at(i, 2 * j), x1 = x.at(i, 2 * j + 1);
      double c = cs[i * half + j], s = sn[i * half + j];
      out[i * d + 2 * j] = x0 * c - x1 * s;
      out[i * d + 2 * j + 1] = x0 * s + x1 * c;
    }
  }
  auto xn = x.node();
  auto csp = std::make_shared<std::vector<double>>(std::move(cs));
  auto snp = std::make_shared<std::vector<double>>(std::move(sn));
  return make_result({n, d}, std::move(out), "apply_rope", {x},
                     [xn, csp, snp, n, d](detail::TensorNode& nd) {
                       xn->ensure_grad();
                       std::size_t half2 = d / 2;
                       for (std::size_t i = 0; i < n; ++i) {
                         for (std::size_t j = 0; j < half2; ++j) {
                           double g0 = nd.grad[i * d + 2 * j];
                           double g1 = nd.grad[i * d + 2 * j + 1];
                           double c = (*csp)[i * half2 + j];
                           double s = (*snp)[i * half2 + j];
                           xn->grad[i * d + 2 * j] += g0 * c + g1 * s;
                           xn->grad[i * d + 2 * j + 1] += -g0 * s + g1 * c;
                         }
                       }
                     });
}

// additive constant matrix (e.g. causal mask); not a tape node
inline Tensor constant_like(std::vector<std::size_t> shape,
                            std::vector<double> values) {
  return Tensor(std::move(shape), std::move(values), false);
}

// ---- backward ----

inline void backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw TensorError("backward: loss must be scalar, got shape " +
                      detail::shape_str(loss.shape()));
  }
  auto root = loss.node();
  if (!root->backprop && root->parents.empty()) {
    throw TensorError("backward: loss is detached from the tape");
  }
  // topological order over the recorded graph
  std::vector<detail::TensorNode*> order;
  std::unordered_set<detail::TensorNode*> seen;
  std::vector<std::pair<detail::TensorNode*, std::size_t>> stack;
  stack.push_back({root.get(), 0});
  seen.insert(root.get());
  while (!stack.empty()) {
    detail::TensorNode* node = stack.back().first;
    std::size_t idx = stack.back().second;
    if (idx < node->parents.size()) {
      stack.back().second += 1;
      detail::TensorNode* p = node->parents[idx].get();
      if (!seen.count(p)) {
        seen.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorNode* n = *it;
    if (n->backprop && n->grad.size() == n->values.size()) {
      n->backprop(*n);
    }
  }
}

// ---- primitive dispatch ----

// Named dispatch over the primitive set; integer-argument ops read their
// ids from the trailing tensor's values.
inline Tensor apply_primitive(const std::string& op_id,
                              const std::vector<Tensor>& inputs) {
  auto ids_of = [](const Tensor& t) {
    std::vector<int> ids;
    ids.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      ids.push_back(static_cast<int>(t.at(i)));
    return ids;
  };
  auto need = [&](std::size_t n) {
    if (inputs.size() != n) {
      throw TensorError(op_id + ": expected " + std::to_string(n) +
                        " inputs, got " + std::to_string(inputs.size()));
    }
  };
  if (op_id == "matmul") { need(2); return matmul(inputs[0], inputs[1]); }
  if (op_id == "add") { need(2); return add(inputs[0], inputs[1]); }
  if (op_id == "mul") { need(2); return mul(inputs[0], inputs[1]); }
  if (op_id == "softmax") { need(1); return softmax_rows(inputs[0]); }
  if (op_id == "rms_norm") { need(2); return rms_norm_rows(inputs[0], inputs[1]); }
  if (op_id == "embedding_lookup") {
    need(2);
    return embedding_lookup(inputs[0], ids_of(inputs[1]));
  }
  if (op_id == "cross_entropy") {
    need(2);
    return cross_entropy(inputs[0], ids_of(inputs[1]));
  }
  if (op_id == "concat_rows") { return concat_rows(inputs); }
  if (op_id == "slice_rows") {
    need(2);
    auto r = ids_of(inputs[1]);
    if (r.size() != 2) throw TensorError("slice_rows: want [begin,end]");
    return slice_rows(inputs[0], static_cast<std::size_t>(r[0]),
                      static_cast<std::size_t>(r[1]));
  }
  throw TensorError("apply_primitive: unknown op '" + op_id + "'");
}

// ---- optimizer ----

struct AdamWConfig {
  double lr = 5e-5;
  double weight_decay = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamWState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  long step_count = 0;
};

// One decoupled-weight-decay AdamW step over a fixed parameter list.
// The state is positional: the same parameter order must be used every step.
inline void adamw_step(std::vector<Tensor>& params, AdamWState& state,
                       const AdamWConfig& cfg) {
  if (cfg.lr < 0.0) throw TensorError("adamw: lr must be non-negative");
  if (state.first_moment.empty()) {
    for (const Tensor& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw TensorError("adamw: state/param count mismatch");
  }
  state.step_count += 1;
  double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_count));
  double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_count));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = params[k];
    if (!p.has_grad()) {
      throw TensorError("adamw: parameter " + std::to_string(k) +
                        " has no gradient");
    }
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (m.size() != p.size()) throw TensorError("adamw: moment shape mismatch");
    const auto& g = p.grad();
    auto& w = p.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double mhat = m[i] / b1t;
      double vhat = v[i] / b2t;
      w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
      w[i] -= cfg.lr * cfg.weight_decay * w[i];
    }
    detail::round_to_precision(w);
  }
}

inline void zero_grads(std::vector<Tensor>& params) {
  for (Tensor& p : params) p.zero_grad();
}

// ---- finite differences (test oracle) ----

inline Tensor finite_difference_gradient(
    const std::function<double(const Tensor&)>& f, const Tensor& x,
    double h = 1e-5) {
  if (h <= 0.0) throw TensorError("finite_difference: h must be positive");
  Tensor probe(x.shape(), x.values());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double orig = probe.mutable_values()[i];
    probe.mutable_values()[i] = orig + h;
    double fp = f(probe);
    probe.mutable_values()[i] = orig - h;
    double fm = f(probe);
    probe.mutable_values()[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw TensorError("finite_difference: non-finite function value");
    }
    g[i] = (fp - fm) / (2.0 * h);
  }
  return Tensor(x.shape(), std::move(g));
}

// ---- init helpers ----

inline Tensor linear_init(std::size_t fan_in, std::size_t fan_out, Rng& rng,
                          bool requires_grad = true) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> w(fan_in * fan_out);
  for (double& x : w) x = rng.uniform(-bound, bound);
  return Tensor({fan_in, fan_out}, std::move(w), requires_grad);
}

inline Tensor embedding_init(std::size_t vocab, std::size_t dim, Rng& rng,
                             bool requires_grad = true) {
  std::vector<double> w(vocab * dim);
  for (double& x : w) x = 0.02 * rng.normal();
  return Tensor({vocab, dim}, std::move(w), requires_grad);
}

}  // namespace genelm
