#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gbe/nn/params.hpp"

namespace gbe::nn {

struct NodeRef {
    int idx = -1;
    bool valid() const { return idx >= 0; }
};

// Reverse-mode tape over dense matrices. Column vectors are N x 1 matrices.
// Creation order is a topological order, so backward() is a single reverse
// sweep. Parameter leaves are cached per tape; backward() accumulates their
// gradients into the owning ParamStore.
class Tape {
public:
    explicit Tape(ParamStore* store = nullptr) : store_(store) {}

    NodeRef constant(Eigen::MatrixXd v);
    NodeRef constant_vector(const Eigen::VectorXd& v);
    NodeRef zeros(int rows, int cols = 1);
    NodeRef ones(int rows, int cols = 1);
    NodeRef param(const std::string& name);

    NodeRef add(NodeRef a, NodeRef b);
    NodeRef sub(NodeRef a, NodeRef b);
    NodeRef scale(NodeRef a, double c);
    NodeRef hadamard(NodeRef a, NodeRef b);
    NodeRef matmul(NodeRef a, NodeRef b);
    // W x + b; pass b.valid() == false for no bias.
    NodeRef affine(NodeRef w, NodeRef x, NodeRef b);
    NodeRef tanh(NodeRef a);
    NodeRef sigmoid(NodeRef a);
    NodeRef vcat(NodeRef a, NodeRef b);
    NodeRef col(NodeRef m, int i);
    NodeRef stack_cols(const std::vector<NodeRef>& cols);
    NodeRef mean_cols(NodeRef m, std::vector<int> indices);
    NodeRef concat_scalars(const std::vector<NodeRef>& scalars);
    NodeRef softmax(NodeRef v);
    NodeRef log_softmax(NodeRef v);
    NodeRef pick(NodeRef v, int i);
    NodeRef dot(NodeRef a, NodeRef b);
    // -log softmax(logits)[label], stabilized by max subtraction.
    NodeRef softmax_cross_entropy(NodeRef logits, int label);

    const Eigen::MatrixXd& value(NodeRef r) const { return node(r).val; }
    const Eigen::MatrixXd& grad(NodeRef r) const { return node(r).grad; }
    double scalar(NodeRef r) const;

    // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. loss must be
    // 1x1. Parameter gradients are accumulated into the ParamStore.
    void backward(NodeRef loss);

    std::size_t size() const { return nodes_.size(); }
    ParamStore* store() { return store_; }

private:
    struct Node {
        Eigen::MatrixXd val;
        Eigen::MatrixXd grad;
        bool requires_grad = false;
        std::function<void(Tape&, const Node&)> back;
    };

    Node& node(NodeRef r);
    const Node& node(NodeRef r) const;
    NodeRef push(Eigen::MatrixXd val, bool requires_grad,
                 std::function<void(Tape&, const Node&)> back);
    void add_grad(int idx, const Eigen::MatrixXd& g);

    std::vector<Node> nodes_;
    ParamStore* store_;
    std::map<std::string, int> param_nodes_;
};

}  // namespace gbe::nn
