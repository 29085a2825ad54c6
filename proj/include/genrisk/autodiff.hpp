// Reverse-mode automatic differentiation over dense matrices.
//
// A Tape owns the computation graph of one forward pass. Parameters live
// outside the tape in a ParamStore so they persist across steps; Tape::backward
// zeroes node gradients, seeds the scalar loss with 1 and accumulates leaf
// gradients into Parameter::grad. Repeated backward calls therefore add up.
#pragma once

#include "genrisk/common.hpp"
#include "genrisk/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace genrisk::ad {

struct Parameter {
    std::string name;
    Mat value;
    Mat grad;  // same shape, accumulated across backward calls
};

class ParamStore {
public:
    Parameter& add(const std::string& name, Mat init) {
        params_.push_back(std::make_unique<Parameter>());
        Parameter& p = *params_.back();
        p.name = name;
        p.value = std::move(init);
        p.grad = Mat::Zero(p.value.rows(), p.value.cols());
        return p;
    }

    void zero_grads() {
        for (auto& p : params_) p->grad.setZero();
    }

    std::size_t size() const { return params_.size(); }
    Parameter& operator[](std::size_t i) { return *params_[i]; }
    const Parameter& operator[](std::size_t i) const { return *params_[i]; }

    Parameter* find(const std::string& name) {
        for (auto& p : params_)
            if (p->name == name) return p.get();
        return nullptr;
    }

    long parameter_count() const {
        long n = 0;
        for (const auto& p : params_) n += static_cast<long>(p->value.size());
        return n;
    }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

private:
    std::vector<std::unique_ptr<Parameter>> params_;
};

class Tape;
enum class Op;

class Var {
public:
    Var() = default;
    const Mat& value() const;
    const Mat& grad() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
    Tape* tape() const { return tape_; }
    int id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

private:
    friend class Tape;
    friend Var binary(Tape&, Op, Var, Var);
    friend Var unary(Tape&, Op, Var, double);
    Var(Tape* t, int id) : tape_(t), id_(id) {}
    Tape* tape_ = nullptr;
    int id_ = -1;
};

enum class Op : int {
    leaf,
    matmul,
    add,
    sub,
    bias_add,
    hadamard,
    scale,
    sigmoid,
    tanh,
    relu,
    logsigmoid,
    exp,
    square,
    sum,
    mean,
    concat_cols,
};

class Tape {
public:
    Var input(Mat v);
    Var leaf(Parameter& p);

    // Throws NonScalarLoss unless `loss` is 1x1.
    void backward(Var loss);

    void clear();

    std::size_t node_count() const { return nodes_.size(); }

private:
    friend class Var;
    friend Var binary(Tape&, Op, Var, Var);
    friend Var unary(Tape&, Op, Var, double);

    struct Node {
        Mat value;
        Mat grad;
        Op op = Op::leaf;
        int a = -1;
        int b = -1;
        double scalar = 0.0;
        Parameter* param = nullptr;
    };

    int push(Node n);
    std::vector<Node> nodes_;
};

// Graph-building free functions. Both operands must come from the same tape.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var bias_add(Var a, Var bias);  // bias is 1 x n, broadcast over rows
Var hadamard(Var a, Var b);
Var scale(Var a, double c);
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var logsigmoid(Var a);  // overflow-safe log(sigmoid(x))
Var exp(Var a);
Var square(Var a);
Var sum(Var a);   // 1x1
Var mean(Var a);  // 1x1
Var concat_cols(Var a, Var b);

// Overflow-safe scalar sigmoid shared with the op implementations.
double sigmoid_stable(double x);

enum class Activation { relu, sigmoid, tanh, linear };

Var activate(Var x, Activation act);

enum class LayerKind { dense, lstm };

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    int input_dim = 0;
    int output_dim = 0;
    Activation activation = Activation::linear;
};

struct DenseLayer {
    Parameter* w = nullptr;  // in x out
    Parameter* b = nullptr;  // 1 x out
    Activation activation = Activation::linear;
};

// Glorot-uniform initialization.
DenseLayer make_dense(ParamStore& store, const std::string& name, int in, int out,
                      Activation act, Rng& rng);

Var forward_dense(Tape& tape, const DenseLayer& layer, Var x);

struct LstmCell {
    // Gate weights act on [a_prev, x_t]; each is (hidden+input) x hidden.
    Parameter* wi = nullptr;
    Parameter* wf = nullptr;
    Parameter* wo = nullptr;
    Parameter* wc = nullptr;
    Parameter* bi = nullptr;
    Parameter* bf = nullptr;
    Parameter* bo = nullptr;
    Parameter* bc = nullptr;
    int input_dim = 0;
    int hidden_dim = 0;
};

LstmCell make_lstm(ParamStore& store, const std::string& name, int input_dim, int hidden_dim,
                   Rng& rng);

struct LstmState {
    Var a;  // short-term state, B x hidden
    Var c;  // long-term state, B x hidden
};

LstmState forward_lstm_cell(Tape& tape, const LstmCell& cell, Var x_t, LstmState prev);

LstmState lstm_zero_state(Tape& tape, int batch, int hidden_dim);

// ---- Optimizers --------------------------------------------------------

enum class OptKind { sgd, rmsprop, adam };

struct OptimizerState {
    OptKind kind = OptKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double rms_decay = 0.9;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<Mat> m;  // first moment / rms accumulator, one per parameter
    std::vector<Mat> v;  // second moment (adam)
};

OptimizerState make_optimizer(OptKind kind, double learning_rate);

// Applies one update from the accumulated Parameter::grad and zeroes grads.
void optimizer_step(OptimizerState& state, ParamStore& params);

// ---- Gradient checking --------------------------------------------------

struct GradCheckReport {
    double max_rel_error = 0.0;
    bool pass = false;
};

// `build_loss` must construct a fresh scalar loss on the given tape from the
// current parameter values. Central differences, step 1e-5 * max(1, |w|).
GradCheckReport grad_check(ParamStore& params, const std::function<Var(Tape&)>& build_loss,
                           double tolerance);

}  // namespace genrisk::ad
