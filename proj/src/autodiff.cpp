#include "genrisk/autodiff.hpp"

#include <cmath>

namespace genrisk::ad {

const Mat& Var::value() const { return tape_->nodes_[id_].value; }
const Mat& Var::grad() const { return tape_->nodes_[id_].grad; }

int Tape::push(Node n) {
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::input(Mat v) {
    Node n;
    n.value = std::move(v);
    return Var(this, push(std::move(n)));
}

Var Tape::leaf(Parameter& p) {
    Node n;
    n.value = p.value;
    n.param = &p;
    return Var(this, push(std::move(n)));
}

void Tape::clear() { nodes_.clear(); }

double sigmoid_stable(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

double logsigmoid_stable(double x) {
    // log(1/(1+e^-x)) = -log1p(e^-x); for very negative x this is ~x.
    if (x < -30.0) return x;
    return -std::log1p(std::exp(-x));
}

void check_same_tape(Var a, Var b) {
    if (a.tape() != b.tape()) throw Error("autodiff: operands from different tapes");
}

}  // namespace

Var binary(Tape& t, Op op, Var a, Var b) {
    Tape::Node n;
    n.op = op;
    n.a = a.id();
    n.b = b.id();
    const Mat& av = a.value();
    const Mat& bv = b.value();
    switch (op) {
        case Op::matmul:
            if (av.cols() != bv.rows()) throw ShapeMismatch("matmul: inner dimensions differ");
            n.value = av * bv;
            break;
        case Op::add:
        case Op::sub:
        case Op::hadamard:
            if (av.rows() != bv.rows() || av.cols() != bv.cols())
                throw ShapeMismatch("elementwise op: shapes differ");
            n.value = op == Op::add  ? (av + bv).eval()
                      : op == Op::sub ? (av - bv).eval()
                                      : av.cwiseProduct(bv).eval();
            break;
        case Op::bias_add:
            if (bv.rows() != 1 || av.cols() != bv.cols())
                throw ShapeMismatch("bias_add: bias must be 1 x cols(a)");
            n.value = av.rowwise() + bv.row(0);
            break;
        case Op::concat_cols:
            if (av.rows() != bv.rows()) throw ShapeMismatch("concat_cols: row counts differ");
            n.value.resize(av.rows(), av.cols() + bv.cols());
            n.value << av, bv;
            break;
        default:
            throw Error("autodiff: bad binary op");
    }
    return Var(&t, t.push(std::move(n)));
}

Var unary(Tape& t, Op op, Var a, double scalar) {
    Tape::Node n;
    n.op = op;
    n.a = a.id();
    n.scalar = scalar;
    const Mat& av = a.value();
    switch (op) {
        case Op::scale:
            n.value = scalar * av;
            break;
        case Op::sigmoid:
            n.value = av.unaryExpr([](double x) { return sigmoid_stable(x); });
            break;
        case Op::tanh:
            n.value = av.array().tanh();
            break;
        case Op::relu:
            n.value = av.cwiseMax(0.0);
            break;
        case Op::logsigmoid:
            n.value = av.unaryExpr([](double x) { return logsigmoid_stable(x); });
            break;
        case Op::exp:
            n.value = av.array().exp();
            break;
        case Op::square:
            n.value = av.array().square();
            break;
        case Op::sum:
            n.value = Mat::Constant(1, 1, av.sum());
            break;
        case Op::mean:
            n.value = Mat::Constant(1, 1, av.mean());
            break;
        default:
            throw Error("autodiff: bad unary op");
    }
    return Var(&t, t.push(std::move(n)));
}

Var matmul(Var a, Var b) { check_same_tape(a, b); return binary(*a.tape(), Op::matmul, a, b); }
Var add(Var a, Var b) { check_same_tape(a, b); return binary(*a.tape(), Op::add, a, b); }
Var sub(Var a, Var b) { check_same_tape(a, b); return binary(*a.tape(), Op::sub, a, b); }
Var bias_add(Var a, Var b) { check_same_tape(a, b); return binary(*a.tape(), Op::bias_add, a, b); }
Var hadamard(Var a, Var b) { check_same_tape(a, b); return binary(*a.tape(), Op::hadamard, a, b); }
Var concat_cols(Var a, Var b) {
    check_same_tape(a, b);
    return binary(*a.tape(), Op::concat_cols, a, b);
}
Var scale(Var a, double c) { return unary(*a.tape(), Op::scale, a, c); }
Var sigmoid(Var a) { return unary(*a.tape(), Op::sigmoid, a, 0.0); }
Var tanh(Var a) { return unary(*a.tape(), Op::tanh, a, 0.0); }
Var relu(Var a) { return unary(*a.tape(), Op::relu, a, 0.0); }
Var logsigmoid(Var a) { return unary(*a.tape(), Op::logsigmoid, a, 0.0); }
Var exp(Var a) { return unary(*a.tape(), Op::exp, a, 0.0); }
Var square(Var a) { return unary(*a.tape(), Op::square, a, 0.0); }
Var sum(Var a) { return unary(*a.tape(), Op::sum, a, 0.0); }
Var mean(Var a) { return unary(*a.tape(), Op::mean, a, 0.0); }

void Tape::backward(Var loss) {
    if (loss.tape() != this) throw Error("backward: loss from a different tape");
    Node& top = nodes_[loss.id()];
    if (top.value.rows() != 1 || top.value.cols() != 1)
        throw NonScalarLoss("backward: loss must be scalar");

    for (auto& n : nodes_) n.grad.setZero();
    top.grad(0, 0) = 1.0;

    for (int i = loss.id(); i >= 0; --i) {
        Node& n = nodes_[i];
        if (n.op == Op::leaf) {
            if (n.param) n.param->grad += n.grad;
            continue;
        }
        const Mat& g = n.grad;
        Node& pa = nodes_[n.a];
        switch (n.op) {
            case Op::matmul: {
                Node& pb = nodes_[n.b];
                pa.grad.noalias() += g * pb.value.transpose();
                pb.grad.noalias() += pa.value.transpose() * g;
                break;
            }
            case Op::add:
                pa.grad += g;
                nodes_[n.b].grad += g;
                break;
            case Op::sub:
                pa.grad += g;
                nodes_[n.b].grad -= g;
                break;
            case Op::bias_add:
                pa.grad += g;
                nodes_[n.b].grad += g.colwise().sum();
                break;
            case Op::hadamard: {
                Node& pb = nodes_[n.b];
                pa.grad += g.cwiseProduct(pb.value);
                pb.grad += g.cwiseProduct(pa.value);
                break;
            }
            case Op::concat_cols: {
                Node& pb = nodes_[n.b];
                pa.grad += g.leftCols(pa.value.cols());
                pb.grad += g.rightCols(pb.value.cols());
                break;
            }
            case Op::scale:
                pa.grad += n.scalar * g;
                break;
            case Op::sigmoid:
                pa.grad.array() += g.array() * n.value.array() * (1.0 - n.value.array());
                break;
            case Op::tanh:
                pa.grad.array() += g.array() * (1.0 - n.value.array().square());
                break;
            case Op::relu:
                pa.grad.array() +=
                    g.array() * (pa.value.array() > 0.0).template cast<double>();
                break;
            case Op::logsigmoid:
                // d/dx log sigmoid(x) = sigmoid(-x)
                pa.grad.array() +=
                    g.array() * pa.value.unaryExpr([](double x) { return sigmoid_stable(-x); }).array();
                break;
            case Op::exp:
                pa.grad.array() += g.array() * n.value.array();
                break;
            case Op::square:
                pa.grad.array() += 2.0 * g.array() * pa.value.array();
                break;
            case Op::sum:
                pa.grad.array() += g(0, 0);
                break;
            case Op::mean:
                pa.grad.array() += g(0, 0) / static_cast<double>(pa.value.size());
                break;
            case Op::leaf:
                break;
        }
    }
}

namespace {

Mat glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-bound, bound);
    return m;
}

}  // namespace

DenseLayer make_dense(ParamStore& store, const std::string& name, int in, int out,
                      Activation act, Rng& rng) {
    if (in < 1 || out < 1) throw ShapeMismatch("make_dense: widths must be >= 1");
    DenseLayer layer;
    layer.w = &store.add(name + ".w", glorot_uniform(in, out, rng));
    layer.b = &store.add(name + ".b", Mat::Zero(1, out));
    layer.activation = act;
    return layer;
}

Var activate(Var x, Activation act) {
    switch (act) {
        case Activation::relu: return relu(x);
        case Activation::sigmoid: return sigmoid(x);
        case Activation::tanh: return tanh(x);
        case Activation::linear: return x;
    }
    throw Error("activate: bad activation");
}

Var forward_dense(Tape& tape, const DenseLayer& layer, Var x) {
    Var w = tape.leaf(*layer.w);
    Var b = tape.leaf(*layer.b);
    return activate(bias_add(matmul(x, w), b), layer.activation);
}

LstmCell make_lstm(ParamStore& store, const std::string& name, int input_dim, int hidden_dim,
                   Rng& rng) {
    if (input_dim < 1 || hidden_dim < 1) throw ShapeMismatch("make_lstm: widths must be >= 1");
    LstmCell cell;
    cell.input_dim = input_dim;
    cell.hidden_dim = hidden_dim;
    const int rows = hidden_dim + input_dim;
    cell.wi = &store.add(name + ".wi", glorot_uniform(rows, hidden_dim, rng));
    cell.wf = &store.add(name + ".wf", glorot_uniform(rows, hidden_dim, rng));
    cell.wo = &store.add(name + ".wo", glorot_uniform(rows, hidden_dim, rng));
    cell.wc = &store.add(name + ".wc", glorot_uniform(rows, hidden_dim, rng));
    cell.bi = &store.add(name + ".bi", Mat::Zero(1, hidden_dim));
    cell.bf = &store.add(name + ".bf", Mat::Zero(1, hidden_dim));
    cell.bo = &store.add(name + ".bo", Mat::Zero(1, hidden_dim));
    cell.bc = &store.add(name + ".bc", Mat::Zero(1, hidden_dim));
    return cell;
}

LstmState lstm_zero_state(Tape& tape, int batch, int hidden_dim) {
    return {tape.input(Mat::Zero(batch, hidden_dim)), tape.input(Mat::Zero(batch, hidden_dim))};
}

LstmState forward_lstm_cell(Tape& tape, const LstmCell& cell, Var x_t, LstmState prev) {
    if (x_t.cols() != cell.input_dim) throw ShapeMismatch("lstm: input width mismatch");
    if (prev.a.cols() != cell.hidden_dim || prev.c.cols() != cell.hidden_dim)
        throw ShapeMismatch("lstm: state width mismatch");
    Var joint = concat_cols(prev.a, x_t);
    Var i = sigmoid(bias_add(matmul(joint, tape.leaf(*cell.wi)), tape.leaf(*cell.bi)));
    Var f = sigmoid(bias_add(matmul(joint, tape.leaf(*cell.wf)), tape.leaf(*cell.bf)));
    Var o = sigmoid(bias_add(matmul(joint, tape.leaf(*cell.wo)), tape.leaf(*cell.bo)));
    Var c_tilde = tanh(bias_add(matmul(joint, tape.leaf(*cell.wc)), tape.leaf(*cell.bc)));
    Var c = add(hadamard(i, c_tilde), hadamard(f, prev.c));
    Var a = hadamard(o, tanh(c));
    return {a, c};
}

OptimizerState make_optimizer(OptKind kind, double learning_rate) {
    if (!(learning_rate > 0.0)) throw Error("optimizer: learning rate must be > 0");
    OptimizerState s;
    s.kind = kind;
    s.learning_rate = learning_rate;
    return s;
}

void optimizer_step(OptimizerState& state, ParamStore& params) {
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), Mat());
        state.v.assign(params.size(), Mat());
        for (std::size_t i = 0; i < params.size(); ++i) {
            state.m[i] = Mat::Zero(params[i].value.rows(), params[i].value.cols());
            state.v[i] = Mat::Zero(params[i].value.rows(), params[i].value.cols());
        }
    }
    ++state.step;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter& p = params[i];
        if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols())
            throw ShapeMismatch("optimizer_step: gradient shape mismatch");
        switch (state.kind) {
            case OptKind::sgd:
                p.value -= state.learning_rate * p.grad;
                break;
            case OptKind::rmsprop:
                state.m[i] = state.rms_decay * state.m[i] +
                             (1.0 - state.rms_decay) * p.grad.cwiseProduct(p.grad);
                p.value.array() -= state.learning_rate * p.grad.array() /
                                   (state.m[i].array().sqrt() + state.epsilon);
                break;
            case OptKind::adam: {
                state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * p.grad;
                state.v[i] = state.beta2 * state.v[i] +
                             (1.0 - state.beta2) * p.grad.cwiseProduct(p.grad);
                const double c1 = 1.0 - std::pow(state.beta1, double(state.step));
                const double c2 = 1.0 - std::pow(state.beta2, double(state.step));
                p.value.array() -= state.learning_rate * (state.m[i].array() / c1) /
                                   ((state.v[i].array() / c2).sqrt() + state.epsilon);
                break;
            }
        }
    }
    params.zero_grads();
}

GradCheckReport grad_check(ParamStore& params, const std::function<Var(Tape&)>& build_loss,
                           double tolerance) {
    params.zero_grads();
    {
        Tape tape;
        Var loss = build_loss(tape);
        tape.backward(loss);
    }
    std::vector<Mat> analytic;
    analytic.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) analytic.push_back(params[i].grad);

    auto eval = [&]() {
        Tape tape;
        return build_loss(tape).value()(0, 0);
    };

    GradCheckReport report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Mat& w = params[i].value;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const double orig = w(r, c);
                const double h = 1e-5 * std::max(1.0, std::abs(orig));
                w(r, c) = orig + h;
                const double up = eval();
                w(r, c) = orig - h;
                const double down = eval();
                w(r, c) = orig;
                const double fd = (up - down) / (2.0 * h);
                const double a = analytic[i](r, c);
                const double rel =
                    std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6});
                report.max_rel_error = std::max(report.max_rel_error, rel);
            }
        }
    }
    params.zero_grads();
    report.pass = report.max_rel_error < tolerance;
    return report;
}

}  // namespace genrisk::ad
