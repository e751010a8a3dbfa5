#pragma once

#include <cstdint>
#include <vector>

#include "lrr/dense.hpp"

namespace lrr {

class Tape;

/// Handle to a matrix-valued node on a Tape. Cheap to copy; the value and
/// accumulated adjoint live in the tape node.
struct TapeValue {
    Tape* tape = nullptr;
    std::int32_t id = -1;

    const Mat& value() const;
    const Mat& adjoint() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
    double scalar() const { return value()(0, 0); }
};

/// Append-only reverse-mode tape over dense matrix operations. Node ids are
/// topologically ordered (parents strictly precede children); backward walks
/// ids in descending order exactly once. Values are computed eagerly and
/// cached at record time for the derivative rules.
///
/// Single-threaded during construction and backward; run independent tapes
/// in parallel instead of sharing one.
class Tape {
public:
    enum class OpKind : std::uint8_t {
        leaf,
        matmul,
        transpose,
        add,
        sub,
        scale,        // by a constant captured at record time
        elem_mul,
        sum_all,      // 1x1
        frobenius_sq, // 1x1
        dot,          // 1x1, sum of entrywise products of same-shape operands
        pseudo_huber, // elementwise sqrt(x^2 + delta^2) - delta
    };

    /// Differentiable leaf.
    TapeValue input(Mat v);
    /// Leaf excluded from gradient flow (probe vectors, masks, data).
    TapeValue constant(Mat v);

    TapeValue matmul(TapeValue a, TapeValue b);
    TapeValue transpose(TapeValue a);
    TapeValue add(TapeValue a, TapeValue b);
    TapeValue sub(TapeValue a, TapeValue b);
    TapeValue scale(TapeValue a, double c);
    TapeValue elem_mul(TapeValue a, TapeValue b);
    TapeValue sum_all(TapeValue a);
    TapeValue frobenius_sq(TapeValue a);
    TapeValue dot(TapeValue a, TapeValue b);
    TapeValue pseudo_huber(TapeValue a, double delta);

    /// Seed the 1x1 root with 1 and accumulate d(root)/d(leaf) into every
    /// reachable differentiable node. Adjoints from a previous backward are
    /// discarded first. Throws ContractError for a non-scalar root.
    void backward(TapeValue root);

    const Mat& value(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    /// Zero matrix of the node's shape when the node was never reached; that
    /// fallback lives in shared scratch, so copy it before asking for the
    /// adjoint of another untouched node.
    const Mat& adjoint(std::int32_t id) const;

    std::size_t size() const { return nodes_.size(); }
    void clear();

private:
    struct Node {
        OpKind kind;
        bool requires_grad;
        std::int32_t a = -1;
        std::int32_t b = -1;
        double param = 0.0;
        Mat value;
        Mat adjoint; // empty until touched by backward
    };

    TapeValue push(Node node);
    TapeValue binary(OpKind kind, TapeValue a, TapeValue b, Mat value);
    TapeValue unary(OpKind kind, TapeValue a, Mat value, double param = 0.0);
    void accumulate(std::int32_t id, const Mat& delta);
    void check_owned(TapeValue v) const;

    std::vector<Node> nodes_;
    mutable Mat zero_scratch_;
};

inline const Mat& TapeValue::value() const { return tape->value(id); }
inline const Mat& TapeValue::adjoint() const { return tape->adjoint(id); }

} // namespace lrr
