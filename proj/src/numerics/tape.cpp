// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/tape.hpp"

#include <string>

#include "emma/error.hpp"

namespace emma {

namespace {

Matrix evaluate(OpKind kind, const OpParams& params, std::span<const Matrix* const> in) {
  switch (kind) {
    case OpKind::kAdd: return add(*in[0], *in[1]);
    case OpKind::kSub: return sub(*in[0], *in[1]);
    case OpKind::kHadamard: return hadamard(*in[0], *in[1]);
    case OpKind::kMatMul: return matmul(*in[0], *in[1]);
    case OpKind::kOuter: return outer(*in[0], *in[1]);
    case OpKind::kTranspose: return transpose(*in[0]);
    case OpKind::kCumProd: return cumprod(*in[0], params.axis);
    case OpKind::kCumSum: return cumsum(*in[0], params.axis);
    case OpKind::kTriu: return triu(*in[0], params.offset);
    case OpKind::kRoll: return roll(*in[0], params.offset);
    case OpKind::kFlip: return flip(*in[0]);
    case OpKind::kSigmoid: return sigmoid(*in[0]);
    case OpKind::kTanh: return tanh(*in[0]);
    case OpKind::kExp: return exp(*in[0]);
    case OpKind::kLog: return log(*in[0]);
    case OpKind::kReciprocal: return reciprocal(*in[0]);
    case OpKind::kSoftmaxRows: return softmax_rows(*in[0]);
    case OpKind::kAddScalar: return add_scalar(*in[0], params.scalar);
    case OpKind::kMulScalar: return mul_scalar(*in[0], params.scalar);
    case OpKind::kOneMinus: return one_minus(*in[0]);
    case OpKind::kSum: return sum(*in[0]);
    case OpKind::kSelectRow: return select_row(*in[0], params.index);
    case OpKind::kStackRows: {
      std::vector<Matrix> parts;
      parts.reserve(in.size());
      for (const Matrix* m : in) parts.push_back(*m);
      return stack_rows(parts);
    }
    case OpKind::kLeaf:
    case OpKind::kConstant: break;
  }
  fail(ErrorKind::kArgument, "evaluate: operation has no forward rule");
}

// Adjoint of a cumulative product without dividing by the inputs.
// For y_n = prod_{c<=n} x_c:  dL/dx_c = prefix_c * tail_c, where prefix_c is
// the exclusive product of x before c and tail_c = g_c + x_{c+1} * tail_{c+1}.
void cumprod_adjoint_line(std::span<const double> x, std::span<const double> g,
                          std::span<double> out, std::size_t stride) {
  const std::size_t n = x.size() == 0 ? 0 : (x.size() - 1) / stride + 1;
  if (n == 0) return;
  std::vector<double> tail(n);
  tail[n - 1] = g[(n - 1) * stride];
  for (std::size_t c = n - 1; c-- > 0;) {
    tail[c] = g[c * stride] + x[(c + 1) * stride] * tail[c + 1];
  }
  double prefix = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    out[c * stride] += prefix * tail[c];
    prefix *= x[c * stride];
  }
}

Matrix cumprod_adjoint(const Matrix& x, const Matrix& g, Axis axis) {
  Matrix out(x.rows(), x.cols());
  if (x.empty()) return out;
  if (axis == Axis::kAlongRow) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      cumprod_adjoint_line(x.row(r), g.row(r), out.row(r), 1);
    }
  } else {
    const std::size_t stride = x.cols();
    for (std::size_t c = 0; c < x.cols(); ++c) {
      auto xs = x.data().subspan(c);
      auto gs = g.data().subspan(c);
      auto os = out.data().subspan(c);
      cumprod_adjoint_line(xs.first((x.rows() - 1) * stride + 1),
                           gs.first((x.rows() - 1) * stride + 1), os, stride);
    }
  }
  return out;
}

// Reverse cumulative sum: the adjoint of cumsum.
Matrix cumsum_adjoint(const Matrix& g, Axis axis) {
  if (axis == Axis::kAlongRow) return flip(cumsum(flip(g), Axis::kAlongRow));
  Matrix out(g.rows(), g.cols());
  for (std::size_t c = 0; c < g.cols(); ++c) {
    double acc = 0.0;
    for (std::size_t r = g.rows(); r-- > 0;) {
      acc += g(r, c);
      out(r, c) = acc;
    }
  }
  return out;
}

void accumulate(Matrix& slot, const Matrix& contribution) {
  if (slot.empty() && !contribution.empty()) {
    slot = contribution;
  } else {
    slot = add(slot, contribution);
  }
}

}  // namespace

const Matrix& Var::value() const {
  if (tape_ == nullptr) fail(ErrorKind::kLookup, "Var: not attached to a tape");
  return tape_->value(*this);
}

const Matrix& Gradients::operator[](const Var& v) const {
  if (v.tape() != tape_ || v.id() >= adjoints_.size()) {
    fail(ErrorKind::kLookup, "Gradients: node " + std::to_string(v.id()) + " is not on this tape");
  }
  return adjoints_[v.id()];
}

Var Tape::leaf(Matrix value) {
  nodes_.push_back(TapeNode{OpKind::kLeaf, {}, {}, std::move(value)});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(TapeNode{OpKind::kConstant, {}, {}, std::move(value)});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(OpKind kind, std::vector<std::size_t> parents, OpParams params) {
  std::vector<const Matrix*> in;
  in.reserve(parents.size());
  for (std::size_t p : parents) {
    if (p >= nodes_.size()) fail(ErrorKind::kLookup, "Tape::record: unknown parent");
    in.push_back(&nodes_[p].value);
  }
  Matrix value = evaluate(kind, params, in);
  nodes_.push_back(TapeNode{kind, std::move(parents), params, std::move(value)});
  return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::value(const Var& v) const {
  check_owned(v);
  return nodes_[v.id()].value;
}

void Tape::check_owned(const Var& v) const {
  if (v.tape() != this || v.id() >= nodes_.size()) {
    fail(ErrorKind::kLookup, "Tape: node " + std::to_string(v.id()) + " is not on this tape");
  }
}

Gradients Tape::backward(const Var& output) const {
  check_owned(output);
  const Matrix& out_value = nodes_[output.id()].value;
  if (out_value.rows() != 1 || out_value.cols() != 1) {
    fail(ErrorKind::kArgument,
         "backward: output must be scalar, got " + shape_string(out_value));
  }

  Gradients grads;
  grads.tape_ = this;
  grads.adjoints_.resize(nodes_.size());
  auto& adj = grads.adjoints_;
  adj[output.id()] = Matrix(1, 1, 1.0);

  for (std::size_t id = output.id() + 1; id-- > 0;) {
    const TapeNode& node = nodes_[id];
    if (adj[id].empty()) continue;
    const Matrix& g = adj[id];
    const Matrix& y = node.value;
    auto parent = [&](std::size_t k) -> const Matrix& { return nodes_[node.parents[k]].value; };
    auto push = [&](std::size_t k, const Matrix& contribution) {
      accumulate(adj[node.parents[k]], contribution);
    };

    switch (node.kind) {
      case OpKind::kLeaf:
      case OpKind::kConstant:
        break;
      case OpKind::kAdd:
        push(0, g);
        push(1, g);
        break;
      case OpKind::kSub:
        push(0, g);
        push(1, mul_scalar(g, -1.0));
        break;
      case OpKind::kHadamard:
        push(0, hadamard(g, parent(1)));
        push(1, hadamard(g, parent(0)));
        break;
      case OpKind::kMatMul:
        push(0, matmul(g, transpose(parent(1))));
        push(1, matmul(transpose(parent(0)), g));
        break;
      case OpKind::kOuter: {
        const Matrix& u = parent(0);
        const Matrix& v = parent(1);
        Matrix gu(u.rows(), u.cols());
        Matrix gv(v.rows(), v.cols());
        for (std::size_t i = 0; i < u.size(); ++i) {
          for (std::size_t j = 0; j < v.size(); ++j) {
            gu.data()[i] += g(i, j) * v.data()[j];
            gv.data()[j] += g(i, j) * u.data()[i];
          }
        }
        push(0, gu);
        push(1, gv);
        break;
      }
      case OpKind::kTranspose:
        push(0, transpose(g));
        break;
      case OpKind::kCumProd:
        push(0, cumprod_adjoint(parent(0), g, node.params.axis));
        break;
      case OpKind::kCumSum:
        push(0, cumsum_adjoint(g, node.params.axis));
        break;
      case OpKind::kTriu:
        push(0, triu(g, node.params.offset));
        break;
      case OpKind::kRoll:
        push(0, roll(g, -node.params.offset));
        break;
      case OpKind::kFlip:
        push(0, flip(g));
        break;
      case OpKind::kSigmoid:
        push(0, hadamard(g, hadamard(y, one_minus(y))));
        break;
      case OpKind::kTanh:
        push(0, hadamard(g, one_minus(hadamard(y, y))));
        break;
      case OpKind::kExp:
        push(0, hadamard(g, y));
        break;
      case OpKind::kLog:
        push(0, hadamard(g, reciprocal(parent(0))));
        break;
      case OpKind::kReciprocal:
        push(0, mul_scalar(hadamard(g, hadamard(y, y)), -1.0));
        break;
      case OpKind::kSoftmaxRows: {
        Matrix gx(y.rows(), y.cols());
        for (std::size_t r = 0; r < y.rows(); ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
          for (std::size_t c = 0; c < y.cols(); ++c) gx(r, c) = y(r, c) * (g(r, c) - dot);
        }
        push(0, gx);
        break;
      }
      case OpKind::kAddScalar:
        push(0, g);
        break;
      case OpKind::kMulScalar:
        push(0, mul_scalar(g, node.params.scalar));
        break;
      case OpKind::kOneMinus:
        push(0, mul_scalar(g, -1.0));
        break;
      case OpKind::kSum: {
        const Matrix& x = parent(0);
        push(0, Matrix(x.rows(), x.cols(), g.scalar()));
        break;
      }
      case OpKind::kSelectRow: {
        const Matrix& x = parent(0);
        Matrix gx(x.rows(), x.cols());
        auto dst = gx.row(node.params.index);
        for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = g(0, c);
        push(0, gx);
        break;
      }
      case OpKind::kStackRows: {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < node.parents.size(); ++k) {
          const Matrix& part = parent(k);
          std::vector<double> slice(g.data().begin() + static_cast<std::ptrdiff_t>(offset * g.cols()),
                                    g.data().begin() +
                                        static_cast<std::ptrdiff_t>((offset + part.rows()) * g.cols()));
          push(k, Matrix(part.rows(), part.cols(), std::move(slice)));
          offset += part.rows();
        }
        break;
      }
    }
  }

  for (std::size_t id = 0; id < adj.size(); ++id) {
    if (adj[id].empty()) adj[id] = Matrix(nodes_[id].value.rows(), nodes_[id].value.cols());
  }
  return grads;
}

std::vector<Matrix> Tape::replay() const {
  std::vector<Matrix> values;
  values.reserve(nodes_.size());
  for (const TapeNode& node : nodes_) {
    if (node.kind == OpKind::kLeaf || node.kind == OpKind::kConstant) {
      values.push_back(node.value);
      continue;
    }
    std::vector<const Matrix*> in;
    in.reserve(node.parents.size());
    for (std::size_t p : node.parents) in.push_back(&values[p]);
    values.push_back(evaluate(node.kind, node.params, in));
  }
  return values;
}

namespace {

Var unary(OpKind kind, const Var& a, OpParams params = {}) {
  return a.tape()->record(kind, {a.id()}, params);
}

Var binary(OpKind kind, const Var& a, const Var& b) {
  if (a.tape() != b.tape()) fail(ErrorKind::kLookup, "operands recorded on different tapes");
  return a.tape()->record(kind, {a.id(), b.id()});
}

}  // namespace

Var add(const Var& a, const Var& b) { return binary(OpKind::kAdd, a, b); }
Var sub(const Var& a, const Var& b) { return binary(OpKind::kSub, a, b); }
Var hadamard(const Var& a, const Var& b) { return binary(OpKind::kHadamard, a, b); }
Var matmul(const Var& a, const Var& b) { return binary(OpKind::kMatMul, a, b); }
Var outer(const Var& u, const Var& v) { return binary(OpKind::kOuter, u, v); }
Var transpose(const Var& a) { return unary(OpKind::kTranspose, a); }
Var cumprod(const Var& a, Axis axis) { return unary(OpKind::kCumProd, a, {.axis = axis}); }
Var cumsum(const Var& a, Axis axis) { return unary(OpKind::kCumSum, a, {.axis = axis}); }
Var triu(const Var& a, long offset) { return unary(OpKind::kTriu, a, {.offset = offset}); }
Var roll(const Var& a, long k) { return unary(OpKind::kRoll, a, {.offset = k}); }
Var flip(const Var& a) { return unary(OpKind::kFlip, a); }
Var sigmoid(const Var& a) { return unary(OpKind::kSigmoid, a); }
Var tanh(const Var& a) { return unary(OpKind::kTanh, a); }
Var exp(const Var& a) { return unary(OpKind::kExp, a); }
Var log(const Var& a) { return unary(OpKind::kLog, a); }
Var reciprocal(const Var& a) { return unary(OpKind::kReciprocal, a); }
Var softmax_rows(const Var& a) { return unary(OpKind::kSoftmaxRows, a); }
Var add_scalar(const Var& a, double s) { return unary(OpKind::kAddScalar, a, {.scalar = s}); }
Var mul_scalar(const Var& a, double s) { return unary(OpKind::kMulScalar, a, {.scalar = s}); }
Var one_minus(const Var& a) { return unary(OpKind::kOneMinus, a); }
Var sum(const Var& a) { return unary(OpKind::kSum, a); }
Var select_row(const Var& a, std::size_t r) {
  return unary(OpKind::kSelectRow, a, {.index = r});
}

Var stack_rows(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorKind::kArgument, "stack_rows: no parts");
  Tape* tape = parts.front().tape();
  std::vector<std::size_t> ids;
  ids.reserve(parts.size());
  for (const Var& v : parts) {
    if (v.tape() != tape) fail(ErrorKind::kLookup, "operands recorded on different tapes");
    ids.push_back(v.id());
  }
  return tape->record(OpKind::kStackRows, std::move(ids));
}

}  // namespace emma
