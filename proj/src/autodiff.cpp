#include "lrr/autodiff.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace lrr {

TapeValue Tape::push(Node node)
{
    if (!all_finite(node.value))
        throw NumericError("tape: operation produced non-finite entries");
    nodes_.push_back(std::move(node));
    return TapeValue{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

void Tape::check_owned(TapeValue v) const
{
    if (v.tape != this || v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
        throw ContractError("tape: operand belongs to a different tape");
}

TapeValue Tape::input(Mat v)
{
    return push(Node{OpKind::leaf, true, -1, -1, 0.0, std::move(v), {}});
}

TapeValue Tape::constant(Mat v)
{
    return push(Node{OpKind::leaf, false, -1, -1, 0.0, std::move(v), {}});
}

TapeValue Tape::binary(OpKind kind, TapeValue a, TapeValue b, Mat value)
{
    check_owned(a);
    check_owned(b);
    const bool grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    return push(Node{kind, grad, a.id, b.id, 0.0, std::move(value), {}});
}

TapeValue Tape::unary(OpKind kind, TapeValue a, Mat value, double param)
{
    check_owned(a);
    return push(Node{kind, nodes_[a.id].requires_grad, a.id, -1, param, std::move(value), {}});
}

TapeValue Tape::matmul(TapeValue a, TapeValue b)
{
    return binary(OpKind::matmul, a, b, lrr::matmul(a.value(), b.value()));
}

TapeValue Tape::transpose(TapeValue a)
{
    return unary(OpKind::transpose, a, lrr::transpose(a.value()));
}

TapeValue Tape::add(TapeValue a, TapeValue b)
{
    return binary(OpKind::add, a, b, lrr::add(a.value(), b.value()));
}

TapeValue Tape::sub(TapeValue a, TapeValue b)
{
    return binary(OpKind::sub, a, b, lrr::sub(a.value(), b.value()));
}

TapeValue Tape::scale(TapeValue a, double c)
{
    return unary(OpKind::scale, a, lrr::scale(a.value(), c), c);
}

TapeValue Tape::elem_mul(TapeValue a, TapeValue b)
{
    if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols())
        throw ShapeError("elem_mul: shape mismatch");
    return binary(OpKind::elem_mul, a, b, a.value().cwiseProduct(b.value()));
}

TapeValue Tape::sum_all(TapeValue a)
{
    Mat v(1, 1);
    v(0, 0) = a.value().sum();
    return unary(OpKind::sum_all, a, std::move(v));
}

TapeValue Tape::frobenius_sq(TapeValue a)
{
    Mat v(1, 1);
    v(0, 0) = a.value().squaredNorm();
    return unary(OpKind::frobenius_sq, a, std::move(v));
}

TapeValue Tape::dot(TapeValue a, TapeValue b)
{
    Mat v(1, 1);
    v(0, 0) = lrr::dot(a.value(), b.value());
    return binary(OpKind::dot, a, b, std::move(v));
}

TapeValue Tape::pseudo_huber(TapeValue a, double delta)
{
    if (delta <= 0.0)
        throw ContractError("pseudo_huber: delta must be positive");
    const Mat& x = a.value();
    Mat v = (x.array().square() + delta * delta).sqrt() - delta;
    return unary(OpKind::pseudo_huber, a, std::move(v), delta);
}

const Mat& Tape::adjoint(std::int32_t id) const
{
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.adjoint.size() != 0)
        return n.adjoint;
    zero_scratch_ = Mat::Zero(n.value.rows(), n.value.cols());
    return zero_scratch_;
}

void Tape::accumulate(std::int32_t id, const Mat& delta)
{
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad)
        return;
    if (n.adjoint.size() == 0)
        n.adjoint = delta;
    else
        n.adjoint += delta;
}

void Tape::backward(TapeValue root)
{
    check_owned(root);
    if (root.value().rows() != 1 || root.value().cols() != 1)
        throw ContractError("backward: root must be scalar (1x1), got "
                            + std::to_string(root.value().rows()) + "x"
                            + std::to_string(root.value().cols()));

    for (Node& n : nodes_)
        n.adjoint.resize(0, 0);
    nodes_[static_cast<std::size_t>(root.id)].adjoint = Mat::Ones(1, 1);

    for (std::int32_t id = root.id; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.adjoint.size() == 0 || !n.requires_grad)
            continue;
        const Mat& g = n.adjoint;
        switch (n.kind) {
        case OpKind::leaf:
            break;
        case OpKind::matmul:
            accumulate(n.a, g * nodes_[n.b].value.transpose());
            accumulate(n.b, nodes_[n.a].value.transpose() * g);
            break;
        case OpKind::transpose:
            accumulate(n.a, g.transpose());
            break;
        case OpKind::add:
            accumulate(n.a, g);
            accumulate(n.b, g);
            break;
        case OpKind::sub:
            accumulate(n.a, g);
            accumulate(n.b, -g);
            break;
        case OpKind::scale:
            accumulate(n.a, n.param * g);
            break;
        case OpKind::elem_mul:
            accumulate(n.a, g.cwiseProduct(nodes_[n.b].value));
            accumulate(n.b, g.cwiseProduct(nodes_[n.a].value));
            break;
        case OpKind::sum_all:
            accumulate(n.a, Mat::Constant(nodes_[n.a].value.rows(), nodes_[n.a].value.cols(), g(0, 0)));
            break;
        case OpKind::frobenius_sq:
            accumulate(n.a, 2.0 * g(0, 0) * nodes_[n.a].value);
            break;
        case OpKind::dot:
            accumulate(n.a, g(0, 0) * nodes_[n.b].value);
            accumulate(n.b, g(0, 0) * nodes_[n.a].value);
            break;
        case OpKind::pseudo_huber: {
            const Mat& x = nodes_[n.a].value;
            const double d = n.param;
            Mat slope = x.array() / (x.array().square() + d * d).sqrt();
            accumulate(n.a, g.cwiseProduct(slope));
            break;
        }
        }
    }
}

void Tape::clear()
{
    nodes_.clear();
}

} // namespace lrr
