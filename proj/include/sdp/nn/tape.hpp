#pragma once

/*! \file
 *  \brief Reverse-mode gradient tape over dense vectors.
 *
 *  Every operation records its output value and a hand-written backward rule.
 *  Nodes are appended in evaluation order, so a single reverse sweep visits
 *  each node after all of its consumers. Parameters are read-only during the
 *  forward pass; their gradients are collected on the tape and handed to the
 *  optimiser afterwards, which keeps a model shareable between threads that
 *  each own a tape.
 */

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdp::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  Matrix value;
  std::size_t index = 0;
};

/// Handle to a tape node.
struct Var {
  std::size_t id = std::numeric_limits<std::size_t>::max();
  bool valid() const { return id != std::numeric_limits<std::size_t>::max(); }
};

class Tape {
 public:
  explicit Tape(std::size_t parameter_count = 0) : param_grads_(parameter_count) {}

  const Vector& value(Var v) const { return nodes_.at(v.id).value; }
  double scalar(Var v) const { return nodes_.at(v.id).value(0); }
  const Vector& grad(Var v) const { return nodes_.at(v.id).grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Gradient of a parameter after backward(); empty if untouched.
  const Matrix& parameter_grad(const Parameter& p) const { return param_grads_.at(p.index); }
  std::size_t parameter_count() const { return param_grads_.size(); }

  Var constant(Vector v) { return push(std::move(v), {}); }

  /// A column-vector parameter used as a whole.
  Var parameter(const Parameter& p) {
    if (p.value.cols() != 1) throw std::logic_error("parameter " + p.name + " is not a vector");
    const Parameter* pp = &p;
    return push(p.value.col(0), [this, pp](std::size_t self) {
      param_grad(*pp).col(0) += nodes_[self].grad;
    });
  }

  /// Column `c` of a parameter matrix (embedding lookup).
  Var column(const Parameter& p, Eigen::Index c) {
    const Parameter* pp = &p;
    return push(p.value.col(c), [this, pp, c](std::size_t self) {
      param_grad(*pp).col(c) += nodes_[self].grad;
    });
  }

  /// W x (+ b).
  Var affine(const Parameter& w, Var x, const Parameter* b = nullptr) {
    Vector out = w.value * nodes_[x.id].value;
    if (b) out += b->value.col(0);
    const Parameter* wp = &w;
    return push(std::move(out), [this, wp, b, x](std::size_t self) {
      const Vector& g = nodes_[self].grad;
      param_grad(*wp).noalias() += g * nodes_[x.id].value.transpose();
      if (b) param_grad(*b).col(0) += g;
      nodes_[x.id].grad.noalias() += wp->value.transpose() * g;
    });
  }

  Var add(Var a, Var b) {
    return push(nodes_[a.id].value + nodes_[b.id].value, [this, a, b](std::size_t self) {
      nodes_[a.id].grad += nodes_[self].grad;
      nodes_[b.id].grad += nodes_[self].grad;
    });
  }

  Var sum(std::span<const Var> xs) {
    if (xs.empty()) throw std::logic_error("sum of nothing");
    Vector out = nodes_[xs[0].id].value;
    for (std::size_t k = 1; k < xs.size(); ++k) out += nodes_[xs[k].id].value;
    std::vector<Var> inputs(xs.begin(), xs.end());
    return push(std::move(out), [this, inputs = std::move(inputs)](std::size_t self) {
      for (Var x : inputs) nodes_[x.id].grad += nodes_[self].grad;
    });
  }

  Var hadamard(Var a, Var b) {
    return push(nodes_[a.id].value.cwiseProduct(nodes_[b.id].value), [this, a, b](std::size_t self) {
      const Vector& g = nodes_[self].grad;
      nodes_[a.id].grad += g.cwiseProduct(nodes_[b.id].value);
      nodes_[b.id].grad += g.cwiseProduct(nodes_[a.id].value);
    });
  }

  /// Element-wise product with a constant (dropout masks).
  Var scale(Var a, Vector mask) {
    Vector out = nodes_[a.id].value.cwiseProduct(mask);
    return push(std::move(out), [this, a, mask = std::move(mask)](std::size_t self) {
      nodes_[a.id].grad += nodes_[self].grad.cwiseProduct(mask);
    });
  }

  Var sigmoid(Var a) {
    Vector out = nodes_[a.id].value.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    return push(std::move(out), [this, a](std::size_t self) {
      const Vector& y = nodes_[self].value;
      nodes_[a.id].grad += nodes_[self].grad.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
    });
  }

  Var tanh(Var a) {
    Vector out = nodes_[a.id].value.array().tanh().matrix();
    return push(std::move(out), [this, a](std::size_t self) {
      const Vector& y = nodes_[self].value;
      nodes_[a.id].grad += nodes_[self].grad.cwiseProduct((1.0 - y.array().square()).matrix());
    });
  }

  /// Exponential linear unit with alpha = 1.
  Var elu(Var a) {
    Vector out = nodes_[a.id].value.unaryExpr([](double x) { return x > 0 ? x : std::expm1(x); });
    return push(std::move(out), [this, a](std::size_t self) {
      const Vector& x = nodes_[a.id].value;
      const Vector& y = nodes_[self].value;
      const Vector& g = nodes_[self].grad;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        nodes_[a.id].grad(k) += g(k) * (x(k) > 0 ? 1.0 : y(k) + 1.0);
      }
    });
  }

  Var concat(std::span<const Var> xs) {
    Eigen::Index total = 0;
    for (Var x : xs) total += nodes_[x.id].value.size();
    Vector out(total);
    Eigen::Index offset = 0;
    for (Var x : xs) {
      const Vector& v = nodes_[x.id].value;
      out.segment(offset, v.size()) = v;
      offset += v.size();
    }
    std::vector<Var> inputs(xs.begin(), xs.end());
    return push(std::move(out), [this, inputs = std::move(inputs)](std::size_t self) {
      Eigen::Index off = 0;
      for (Var x : inputs) {
        const Eigen::Index len = nodes_[x.id].value.size();
        nodes_[x.id].grad += nodes_[self].grad.segment(off, len);
        off += len;
      }
    });
  }

  Var slice(Var a, Eigen::Index offset, Eigen::Index length) {
    return push(nodes_[a.id].value.segment(offset, length), [this, a, offset, length](std::size_t self) {
      nodes_[a.id].grad.segment(offset, length) += nodes_[self].grad;
    });
  }

  /// Element-wise maximum over equally sized vectors; ties go to the first.
  Var max_pool(std::span<const Var> xs) {
    if (xs.empty()) throw std::logic_error("max_pool of nothing");
    const Eigen::Index dim = nodes_[xs[0].id].value.size();
    Vector out = nodes_[xs[0].id].value;
    std::vector<std::size_t> winner(static_cast<std::size_t>(dim), xs[0].id);
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const Vector& v = nodes_[xs[k].id].value;
      for (Eigen::Index d = 0; d < dim; ++d) {
        if (v(d) > out(d)) {
          out(d) = v(d);
          winner[static_cast<std::size_t>(d)] = xs[k].id;
        }
      }
    }
    return push(std::move(out), [this, winner = std::move(winner)](std::size_t self) {
      const Vector& g = nodes_[self].grad;
      for (std::size_t d = 0; d < winner.size(); ++d) {
        nodes_[winner[d]].grad(static_cast<Eigen::Index>(d)) += g(static_cast<Eigen::Index>(d));
      }
    });
  }

  /// [q . k_0, q . k_1, ...]
  Var dot_each(Var q, std::span<const Var> keys) {
    Vector out(static_cast<Eigen::Index>(keys.size()));
    for (std::size_t j = 0; j < keys.size(); ++j) {
      out(static_cast<Eigen::Index>(j)) = nodes_[q.id].value.dot(nodes_[keys[j].id].value);
    }
    std::vector<Var> ks(keys.begin(), keys.end());
    return push(std::move(out), [this, q, ks = std::move(ks)](std::size_t self) {
      const Vector& g = nodes_[self].grad;
      for (std::size_t j = 0; j < ks.size(); ++j) {
        const double gj = g(static_cast<Eigen::Index>(j));
        nodes_[q.id].grad += gj * nodes_[ks[j].id].value;
        nodes_[ks[j].id].grad += gj * nodes_[q.id].value;
      }
    });
  }

  /// vec + scalar, where `scalar` is a size-1 node.
  Var add_broadcast(Var vec, Var scalar) {
    Vector out = nodes_[vec.id].value.array() + nodes_[scalar.id].value(0);
    return push(std::move(out), [this, vec, scalar](std::size_t self) {
      nodes_[vec.id].grad += nodes_[self].grad;
      nodes_[scalar.id].grad(0) += nodes_[self].grad.sum();
    });
  }

  /// Per-label biaffine scores. `w` stacks the L matrices W_l (d1 x d2)
  /// vertically; rows of `u`, `v` and `b` belong to label l.
  Var label_biaffine(const Parameter& w, const Parameter& u, const Parameter& v, const Parameter& b,
                     Var left, Var right) {
    const Eigen::Index labels = b.value.rows();
    const Eigen::Index d1 = u.value.cols();
    const Vector& x = nodes_[left.id].value;
    const Vector& y = nodes_[right.id].value;
    Vector out(labels);
    for (Eigen::Index l = 0; l < labels; ++l) {
      out(l) = x.dot(w.value.block(l * d1, 0, d1, y.size()) * y) + u.value.row(l).dot(x) +
               v.value.row(l).dot(y) + b.value(l, 0);
    }
    const Parameter *wp = &w, *up = &u, *vp = &v, *bp = &b;
    return push(std::move(out), [this, wp, up, vp, bp, left, right, d1](std::size_t self) {
      const Vector& g = nodes_[self].grad;
      const Vector& xv = nodes_[left.id].value;
      const Vector& yv = nodes_[right.id].value;
      Matrix& gw = param_grad(*wp);
      Matrix& gu = param_grad(*up);
      Matrix& gv = param_grad(*vp);
      Matrix& gb = param_grad(*bp);
      for (Eigen::Index l = 0; l < g.size(); ++l) {
        const double gl = g(l);
        if (gl == 0.0) continue;
        const auto wl = wp->value.block(l * d1, 0, d1, yv.size());
        gw.block(l * d1, 0, d1, yv.size()).noalias() += gl * xv * yv.transpose();
        gu.row(l) += gl * xv.transpose();
        gv.row(l) += gl * yv.transpose();
        gb(l, 0) += gl;
        nodes_[left.id].grad.noalias() += gl * (wl * yv + up->value.row(l).transpose());
        nodes_[right.id].grad.noalias() += gl * (wl.transpose() * xv + vp->value.row(l).transpose());
      }
    });
  }

  /// -log softmax(scores)[target] as a size-1 node.
  Var softmax_nll(Var scores, Eigen::Index target) {
    const Vector& s = nodes_[scores.id].value;
    if (target < 0 || target >= s.size()) throw std::out_of_range("softmax_nll target");
    const double mx = s.maxCoeff();
    const double log_z = mx + std::log((s.array() - mx).exp().sum());
    Vector out(1);
    out(0) = log_z - s(target);
    return push(std::move(out), [this, scores, target, log_z](std::size_t self) {
      const double g = nodes_[self].grad(0);
      Vector p = (nodes_[scores.id].value.array() - log_z).exp().matrix();
      p(target) -= 1.0;
      nodes_[scores.id].grad += g * p;
    });
  }

  /// Seeds d(root)/d(root) = 1 and sweeps backwards.
  void backward(Var root) {
    for (auto& n : nodes_) n.grad = Vector::Zero(n.value.size());
    for (auto& g : param_grads_) g.resize(0, 0);
    nodes_.at(root.id).grad.setOnes();
    for (std::size_t k = root.id + 1; k-- > 0;) {
      if (nodes_[k].backward && !nodes_[k].grad.isZero(0.0)) nodes_[k].backward(k);
    }
  }

 private:
  struct Node {
    Vector value;
    Vector grad;
    std::function<void(std::size_t)> backward;
  };

  Var push(Vector value, std::function<void(std::size_t)> backward) {
    nodes_.push_back(Node{std::move(value), Vector(), std::move(backward)});
    return Var{nodes_.size() - 1};
  }

  Matrix& param_grad(const Parameter& p) {
    if (p.index >= param_grads_.size()) param_grads_.resize(p.index + 1);
    Matrix& g = param_grads_[p.index];
    if (g.size() == 0) g = Matrix::Zero(p.value.rows(), p.value.cols());
    return g;
  }

  std::vector<Node> nodes_;
  std::vector<Matrix> param_grads_;
};

/// Softmax of a score vector.
inline Vector softmax(const Vector& scores) {
  const double mx = scores.maxCoeff();
  Vector e = (scores.array() - mx).exp().matrix();
  return e / e.sum();
}

}  // namespace sdp::nn
