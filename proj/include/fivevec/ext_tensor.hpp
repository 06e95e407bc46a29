#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fivevec/frame.hpp"

namespace fivevec {

/// Dense extended tensor of rank (p, q) in a stated frame.
///
/// Components are stored row-major over (n+1)^(p+q) entries with all
/// contravariant slots first, then all covariant slots. Index value n
/// addresses the extended "5" direction.
class ExtTensor {
 public:
  ExtTensor(Frame frame, int contra, int co)
      : frame_(std::move(frame)), contra_(contra), co_(co) {
    if (contra < 0 || co < 0) throw ShapeError("negative tensor rank");
    comps_.assign(ipow(frame_.ext_dim(), contra + co), 0.0);
  }

  ExtTensor(Frame frame, int contra, int co, std::vector<double> comps)
      : ExtTensor(std::move(frame), contra, co) {
    if (comps.size() != comps_.size()) {
      throw ShapeError("expected " + std::to_string(comps_.size()) + " components, got " +
                       std::to_string(comps.size()));
    }
    for (double c : comps) {
      if (!std::isfinite(c)) throw ValidationError("tensor component is not finite");
    }
    comps_ = std::move(comps);
  }

  static ExtTensor vector(Frame frame, const VectorXd& v) {
    ExtTensor t(std::move(frame), 1, 0);
    t.set_from(v.data(), v.size());
    return t;
  }

  static ExtTensor covector(Frame frame, const VectorXd& w) {
    ExtTensor t(std::move(frame), 0, 1);
    t.set_from(w.data(), w.size());
    return t;
  }

  /// Rank-2 tensor from a matrix; m(i, j) is the component with first index i.
  static ExtTensor from_matrix(Frame frame, const MatrixXd& m, int contra, int co) {
    if (contra + co != 2) throw ShapeError("from_matrix needs a rank-2 tensor");
    ExtTensor t(std::move(frame), contra, co);
    const int d = t.ext_dim();
    if (m.rows() != d || m.cols() != d) throw ShapeError("matrix extent does not match frame");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) t(i, j) = m(i, j);
    return t;
  }

  static ExtTensor identity(Frame frame) {
    const int d = frame.ext_dim();
    return from_matrix(std::move(frame), MatrixXd::Identity(d, d), 1, 1);
  }

  const Frame& frame() const { return frame_; }
  const Metric& metric() const { return frame_.metric; }
  int contravariant_rank() const { return contra_; }
  int covariant_rank() const { return co_; }
  int order() const { return contra_ + co_; }
  int ext_dim() const { return frame_.ext_dim(); }
  std::size_t size() const { return comps_.size(); }

  std::span<const double> comps() const { return comps_; }
  std::span<double> comps() { return comps_; }

  template <std::integral... I>
  double& operator()(I... idx) {
    const int ix[] = {static_cast<int>(idx)...};
    return comps_[flat_index(ix)];
  }
  template <std::integral... I>
  double operator()(I... idx) const {
    const int ix[] = {static_cast<int>(idx)...};
    return comps_[flat_index(ix)];
  }

  double& at(std::span<const int> idx) { return comps_[flat_index(idx)]; }
  double at(std::span<const int> idx) const { return comps_[flat_index(idx)]; }

  std::size_t flat_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != order()) throw ShapeError("wrong number of indices");
    const int d = ext_dim();
    std::size_t flat = 0;
    for (int i : idx) {
      if (i < 0 || i >= d) throw ShapeError("index out of range");
      flat = flat * d + static_cast<std::size_t>(i);
    }
    return flat;
  }

  std::vector<int> multi_index(std::size_t flat) const {
    const int d = ext_dim();
    std::vector<int> idx(order());
    for (int s = order() - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(flat % d);
      flat /= d;
    }
    return idx;
  }

  /// Rank-1 components as a vector.
  VectorXd as_vector() const {
    if (order() != 1) throw ShapeError("as_vector needs a rank-1 tensor");
    return Eigen::Map<const VectorXd>(comps_.data(), ext_dim());
  }

  /// Rank-2 components as a matrix with the first index as row.
  MatrixXd as_matrix() const {
    if (order() != 2) throw ShapeError("as_matrix needs a rank-2 tensor");
    const int d = ext_dim();
    MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  /// Same components relabelled into another frame (no numerical change).
  ExtTensor relabel(Frame frame) const {
    if (frame.ext_dim() != ext_dim()) throw ShapeError("relabel across dimensions");
    ExtTensor t(std::move(frame), contra_, co_);
    t.comps_ = comps_;
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double c : comps_) m = std::max(m, std::abs(c));
    return m;
  }

  ExtTensor& operator+=(const ExtTensor& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  ExtTensor& operator-=(const ExtTensor& o) {
    require_compatible(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  ExtTensor& operator*=(double s) {
    for (double& c : comps_) c *= s;
    return *this;
  }
  friend ExtTensor operator+(ExtTensor a, const ExtTensor& b) { return a += b; }
  friend ExtTensor operator-(ExtTensor a, const ExtTensor& b) { return a -= b; }
  friend ExtTensor operator*(ExtTensor a, double s) { return a *= s; }
  friend ExtTensor operator*(double s, ExtTensor a) { return a *= s; }

  void require_compatible(const ExtTensor& o) const {
    if (contra_ != o.contra_ || co_ != o.co_) throw ShapeError("tensor ranks differ");
    if (!same_basis(frame_, o.frame_)) throw ContractViolation("tensors live in different frames");
  }

 private:
  static std::size_t ipow(int b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(b);
    return r;
  }

  void set_from(const double* data, Eigen::Index n) {
    if (static_cast<std::size_t>(n) != comps_.size()) throw ShapeError("vector extent does not match frame");
    std::copy(data, data + n, comps_.begin());
  }

  Frame frame_;
  int contra_;
  int co_;
  std::vector<double> comps_;
};

/// Largest |a - b| over components; requires matching shapes only.
inline double max_abs_diff(const ExtTensor& a, const ExtTensor& b) {
  if (a.size() != b.size()) throw ShapeError("tensor sizes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.comps()[i] - b.comps()[i]));
  return m;
}

/// Applies `contra_map` to every contravariant slot (v'^A = M^A_B v^B) and
/// `co_map` to every covariant slot (w'_B = w_A N^A_B). Every basis change
/// and every transport goes through this one routine.
inline ExtTensor transform_slots(const ExtTensor& t, const MatrixXd& contra_map, const MatrixXd& co_map,
                                 Frame target) {
  const int d = t.ext_dim();
  if (contra_map.rows() != d || contra_map.cols() != d || co_map.rows() != d || co_map.cols() != d) {
    throw ShapeError("slot map extent does not match tensor");
  }
  std::vector<double> cur(t.comps().begin(), t.comps().end());
  std::vector<double> next(cur.size());
  const std::size_t total = cur.size();
  std::size_t stride = total;
  for (int slot = 0; slot < t.order(); ++slot) {
    stride /= static_cast<std::size_t>(d);
    const bool contra = slot < t.contravariant_rank();
    const std::size_t block = stride * static_cast<std::size_t>(d);
    for (std::size_t outer = 0; outer < total; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        for (int a = 0; a < d; ++a) {
          double acc = 0.0;
          for (int b = 0; b < d; ++b) {
            const double m = contra ? contra_map(a, b) : co_map(b, a);
            if (m != 0.0) acc += m * cur[outer + static_cast<std::size_t>(b) * stride + inner];
          }
          next[outer + static_cast<std::size_t>(a) * stride + inner] = acc;
        }
      }
    }
    std::swap(cur, next);
  }
  // Rounding would otherwise leave an exactly antisymmetric 2-tensor only
  // antisymmetric to ~1e-16, so mirror the upper triangle.
  if (t.order() == 2 && t.contravariant_rank() != 1) {
    const auto& in = t.comps();
    bool antisym = true;
    for (int a = 0; a < d && antisym; ++a)
      for (int b = a; b < d; ++b)
        if (in[static_cast<std::size_t>(a * d + b)] != -in[static_cast<std::size_t>(b * d + a)]) {
          antisym = false;
          break;
        }
    if (antisym) {
      for (int a = 0; a < d; ++a) {
        cur[static_cast<std::size_t>(a * d + a)] = 0.0;
        for (int b = a + 1; b < d; ++b) cur[static_cast<std::size_t>(b * d + a)] = -cur[static_cast<std::size_t>(a * d + b)];
      }
    }
  }
  return ExtTensor(std::move(target), t.contravariant_rank(), t.covariant_rank(), std::move(cur));
}

/// Tensor product. Slot order of the result: a's contravariant, b's
/// contravariant, a's covariant, b's covariant.
inline ExtTensor outer(const ExtTensor& a, const ExtTensor& b) {
  if (!same_basis(a.frame(), b.frame())) throw ContractViolation("outer product across frames");
  const int pa = a.contravariant_rank(), qa = a.covariant_rank();
  const int pb = b.contravariant_rank(), qb = b.covariant_rank();
  ExtTensor r(a.frame(), pa + pb, qa + qb);
  std::vector<int> idx(r.order());
  for (std::size_t fa = 0; fa < a.size(); ++fa) {
    const double va = a.comps()[fa];
    if (va == 0.0) continue;
    const auto ia = a.multi_index(fa);
    for (std::size_t fb = 0; fb < b.size(); ++fb) {
      const auto ib = b.multi_index(fb);
      int k = 0;
      for (int s = 0; s < pa; ++s) idx[k++] = ia[s];
      for (int s = 0; s < pb; ++s) idx[k++] = ib[s];
      for (int s = 0; s < qa; ++s) idx[k++] = ia[pa + s];
      for (int s = 0; s < qb; ++s) idx[k++] = ib[pb + s];
      r.at(idx) = va * b.comps()[fb];
    }
  }
  return r;
}

/// Contracts contravariant slot `up` against covariant slot `down`
/// (both counted within their own group).
inline ExtTensor contract(const ExtTensor& t, int up, int down) {
  const int p = t.contravariant_rank(), q = t.covariant_rank();
  if (up < 0 || up >= p || down < 0 || down >= q) throw ShapeError("contraction slot out of range");
  ExtTensor r(t.frame(), p - 1, q - 1);
  const int d = t.ext_dim();
  std::vector<int> full(t.order());
  for (std::size_t f = 0; f < r.size(); ++f) {
    const auto ri = r.multi_index(f);
    int k = 0;
    for (int s = 0; s < p; ++s) full[s] = (s == up) ? 0 : ri[k++];
    for (int s = 0; s < q; ++s) full[p + s] = (s == down) ? 0 : ri[k++];
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      full[up] = i;
      full[p + down] = i;
      acc += t.at(full);
    }
    r.comps()[f] = acc;
  }
  return r;
}

/// a ⊗ b − b ⊗ a for two rank-1 tensors of the same variance.
inline ExtTensor wedge(const ExtTensor& a, const ExtTensor& b) {
  if (a.order() != 1 || b.order() != 1 || a.contravariant_rank() != b.contravariant_rank()) {
    throw ShapeError("wedge needs two rank-1 tensors of the same variance");
  }
  return outer(a, b) - outer(b, a);
}

/// Basis vector e_A (or dual form e^A) of the frame.
inline ExtTensor basis_vector(const Frame& f, int a) {
  VectorXd v = VectorXd::Zero(f.ext_dim());
  v(a) = 1.0;
  return ExtTensor::vector(f, v);
}

inline ExtTensor basis_form(const Frame& f, int a) {
  VectorXd v = VectorXd::Zero(f.ext_dim());
  v(a) = 1.0;
  return ExtTensor::covector(f, v);
}

namespace detail {
// Moves slot `from` (absolute position) to absolute position `to`, turning
// it from contravariant to covariant or back, and applies `m` to it.
inline ExtTensor move_and_map_slot(const ExtTensor& t, int from, int new_p, int new_q, int to,
                                   const MatrixXd& m) {
  ExtTensor r(t.frame(), new_p, new_q);
  const int d = t.ext_dim();
  std::vector<int> src(t.order());
  for (std::size_t f = 0; f < r.size(); ++f) {
    auto ri = r.multi_index(f);
    const int target = ri[to];
    ri.erase(ri.begin() + to);
    int k = 0;
    for (int s = 0; s < t.order(); ++s) src[s] = (s == from) ? 0 : ri[k++];
    double acc = 0.0;
    for (int b = 0; b < d; ++b) {
      if (m(target, b) == 0.0) continue;
      src[from] = b;
      acc += m(target, b) * t.at(src);
    }
    r.comps()[f] = acc;
  }
  return r;
}

inline MatrixXd base_block_map(const Metric& g, const MatrixXd& block) {
  MatrixXd m = MatrixXd::Identity(g.ext_dim(), g.ext_dim());
  m.topLeftCorner(g.dim(), g.dim()) = block;
  return m;
}
}  // namespace detail

/// Lowers contravariant slot `up` with g on base indices; the fifth slot
/// value is carried over unchanged. The new covariant slot lands at
/// covariant position `co_position`.
inline ExtTensor lower_index(const ExtTensor& t, int up, int co_position = 0) {
  const int p = t.contravariant_rank(), q = t.covariant_rank();
  if (up < 0 || up >= p || co_position < 0 || co_position > q) throw ShapeError("lower_index slot out of range");
  return detail::move_and_map_slot(t, up, p - 1, q + 1, (p - 1) + co_position,
                                   detail::base_block_map(t.metric(), t.metric().g()));
}

/// Inverse of lower_index: raises covariant slot `down` with g^{-1} and puts
/// it at contravariant position `contra_position` (default: last).
inline ExtTensor raise_index(const ExtTensor& t, int down, int contra_position = -1) {
  const int p = t.contravariant_rank(), q = t.covariant_rank();
  if (contra_position < 0) contra_position = p;
  if (down < 0 || down >= q || contra_position > p) throw ShapeError("raise_index slot out of range");
  return detail::move_and_map_slot(t, p + down, p + 1, q - 1, contra_position,
                                   detail::base_block_map(t.metric(), t.metric().g_inv()));
}

/// max |t^{AB} + t^{BA}| for a rank-2 tensor.
inline double asymmetry(const ExtTensor& t) {
  if (t.order() != 2) throw ShapeError("asymmetry needs a rank-2 tensor");
  const MatrixXd m = t.as_matrix();
  return (m + m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace fivevec
