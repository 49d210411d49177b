#include "gbe/nn/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gbe::nn {

Tape::Node& Tape::node(NodeRef r) {
    if (!r.valid() || r.idx >= static_cast<int>(nodes_.size()))
        throw std::out_of_range("Tape: invalid node reference");
    return nodes_[static_cast<std::size_t>(r.idx)];
}

const Tape::Node& Tape::node(NodeRef r) const {
    if (!r.valid() || r.idx >= static_cast<int>(nodes_.size()))
        throw std::out_of_range("Tape: invalid node reference");
    return nodes_[static_cast<std::size_t>(r.idx)];
}

NodeRef Tape::push(Eigen::MatrixXd val, bool requires_grad,
                   std::function<void(Tape&, const Node&)> back) {
    Node n;
    n.val = std::move(val);
    n.requires_grad = requires_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return NodeRef{static_cast<int>(nodes_.size()) - 1};
}

void Tape::add_grad(int idx, const Eigen::MatrixXd& g) {
    Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) n.grad = Eigen::MatrixXd::Zero(n.val.rows(), n.val.cols());
    n.grad += g;
}

double Tape::scalar(NodeRef r) const {
    const Node& n = node(r);
    if (n.val.rows() != 1 || n.val.cols() != 1) throw std::logic_error("Tape::scalar: node is not 1x1");
    return n.val(0, 0);
}

NodeRef Tape::constant(Eigen::MatrixXd v) { return push(std::move(v), false, nullptr); }

NodeRef Tape::constant_vector(const Eigen::VectorXd& v) { return constant(Eigen::MatrixXd(v)); }

NodeRef Tape::zeros(int rows, int cols) { return constant(Eigen::MatrixXd::Zero(rows, cols)); }

NodeRef Tape::ones(int rows, int cols) { return constant(Eigen::MatrixXd::Ones(rows, cols)); }

NodeRef Tape::param(const std::string& name) {
    if (!store_) throw std::logic_error("Tape::param: tape has no ParamStore");
    auto it = param_nodes_.find(name);
    if (it != param_nodes_.end()) return NodeRef{it->second};
    const auto& entry = store_->at(name);
    NodeRef r = push(entry.value, true, nullptr);
    param_nodes_[name] = r.idx;
    return r;
}

NodeRef Tape::add(NodeRef a, NodeRef b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.val.rows() != nb.val.rows() || na.val.cols() != nb.val.cols())
        throw std::invalid_argument("Tape::add: shape mismatch");
    bool rg = na.requires_grad || nb.requires_grad;
    int ia = a.idx, ib = b.idx;
    return push(na.val + nb.val, rg, [ia, ib](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad);
        t.add_grad(ib, out.grad);
    });
}

NodeRef Tape::sub(NodeRef a, NodeRef b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.val.rows() != nb.val.rows() || na.val.cols() != nb.val.cols())
        throw std::invalid_argument("Tape::sub: shape mismatch");
    bool rg = na.requires_grad || nb.requires_grad;
    int ia = a.idx, ib = b.idx;
    return push(na.val - nb.val, rg, [ia, ib](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad);
        t.add_grad(ib, -out.grad);
    });
}

NodeRef Tape::scale(NodeRef a, double c) {
    const Node& na = node(a);
    int ia = a.idx;
    return push(c * na.val, na.requires_grad, [ia, c](Tape& t, const Node& out) {
        t.add_grad(ia, c * out.grad);
    });
}

NodeRef Tape::hadamard(NodeRef a, NodeRef b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.val.rows() != nb.val.rows() || na.val.cols() != nb.val.cols())
        throw std::invalid_argument("Tape::hadamard: shape mismatch");
    bool rg = na.requires_grad || nb.requires_grad;
    int ia = a.idx, ib = b.idx;
    return push(na.val.cwiseProduct(nb.val), rg, [ia, ib](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad.cwiseProduct(t.nodes_[ib].val));
        t.add_grad(ib, out.grad.cwiseProduct(t.nodes_[ia].val));
    });
}

NodeRef Tape::matmul(NodeRef a, NodeRef b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.val.cols() != nb.val.rows()) throw std::invalid_argument("Tape::matmul: shape mismatch");
    bool rg = na.requires_grad || nb.requires_grad;
    int ia = a.idx, ib = b.idx;
    return push(na.val * nb.val, rg, [ia, ib](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad * t.nodes_[ib].val.transpose());
        t.add_grad(ib, t.nodes_[ia].val.transpose() * out.grad);
    });
}

NodeRef Tape::affine(NodeRef w, NodeRef x, NodeRef b) {
    NodeRef y = matmul(w, x);
    return b.valid() ? add(y, b) : y;
}

NodeRef Tape::tanh(NodeRef a) {
    const Node& na = node(a);
    int ia = a.idx;
    return push(na.val.array().tanh().matrix(), na.requires_grad, [ia](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad.cwiseProduct((1.0 - out.val.array().square()).matrix()));
    });
}

NodeRef Tape::sigmoid(NodeRef a) {
    const Node& na = node(a);
    int ia = a.idx;
    Eigen::MatrixXd y = (1.0 / (1.0 + (-na.val.array()).exp())).matrix();
    return push(std::move(y), na.requires_grad, [ia](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad.cwiseProduct(
                           (out.val.array() * (1.0 - out.val.array())).matrix()));
    });
}

NodeRef Tape::vcat(NodeRef a, NodeRef b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.val.cols() != 1 || nb.val.cols() != 1)
        throw std::invalid_argument("Tape::vcat: expects column vectors");
    Eigen::MatrixXd y(na.val.rows() + nb.val.rows(), 1);
    y << na.val, nb.val;
    bool rg = na.requires_grad || nb.requires_grad;
    int ia = a.idx, ib = b.idx;
    auto ra = na.val.rows();
    auto rb = nb.val.rows();
    return push(std::move(y), rg, [ia, ib, ra, rb](Tape& t, const Node& out) {
        t.add_grad(ia, out.grad.topRows(ra));
        t.add_grad(ib, out.grad.bottomRows(rb));
    });
}

NodeRef Tape::col(NodeRef m, int i) {
    const Node& nm = node(m);
    if (i < 0 || i >= nm.val.cols()) throw std::out_of_range("Tape::col: column index");
    int im = m.idx;
    return push(nm.val.col(i), nm.requires_grad, [im, i](Tape& t, const Node& out) {
        Node& src = t.nodes_[im];
        if (!src.requires_grad) return;
        if (src.grad.size() == 0) src.grad = Eigen::MatrixXd::Zero(src.val.rows(), src.val.cols());
        src.grad.col(i) += out.grad;
    });
}

NodeRef Tape::stack_cols(const std::vector<NodeRef>& cols) {
    if (cols.empty()) throw std::invalid_argument("Tape::stack_cols: empty input");
    auto rows = node(cols[0]).val.rows();
    Eigen::MatrixXd y(rows, static_cast<Eigen::Index>(cols.size()));
    bool rg = false;
    std::vector<int> idx;
    idx.reserve(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const Node& n = node(cols[i]);
        if (n.val.cols() != 1 || n.val.rows() != rows)
            throw std::invalid_argument("Tape::stack_cols: shape mismatch");
        y.col(static_cast<Eigen::Index>(i)) = n.val;
        rg = rg || n.requires_grad;
        idx.push_back(cols[i].idx);
    }
    return push(std::move(y), rg, [idx = std::move(idx)](Tape& t, const Node& out) {
        for (std::size_t i = 0; i < idx.size(); ++i)
            t.add_grad(idx[i], out.grad.col(static_cast<Eigen::Index>(i)));
    });
}

NodeRef Tape::mean_cols(NodeRef m, std::vector<int> indices) {
    const Node& nm = node(m);
    if (indices.empty()) throw std::invalid_argument("Tape::mean_cols: empty index set");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(nm.val.rows());
    for (int i : indices) {
        if (i < 0 || i >= nm.val.cols()) throw std::out_of_range("Tape::mean_cols: column index");
        y += nm.val.col(i);
    }
    y /= static_cast<double>(indices.size());
    int im = m.idx;
    double k = static_cast<double>(indices.size());
    return push(Eigen::MatrixXd(y), nm.requires_grad,
                [im, k, indices = std::move(indices)](Tape& t, const Node& out) {
                    Node& src = t.nodes_[im];
                    if (!src.requires_grad) return;
                    if (src.grad.size() == 0)
                        src.grad = Eigen::MatrixXd::Zero(src.val.rows(), src.val.cols());
                    for (int i : indices) src.grad.col(i) += out.grad / k;
                });
}

NodeRef Tape::concat_scalars(const std::vector<NodeRef>& scalars) {
    if (scalars.empty()) throw std::invalid_argument("Tape::concat_scalars: empty input");
    Eigen::MatrixXd y(static_cast<Eigen::Index>(scalars.size()), 1);
    bool rg = false;
    std::vector<int> idx;
    idx.reserve(scalars.size());
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        const Node& n = node(scalars[i]);
        if (n.val.rows() != 1 || n.val.cols() != 1)
            throw std::invalid_argument("Tape::concat_scalars: inputs must be scalars");
        y(static_cast<Eigen::Index>(i), 0) = n.val(0, 0);
        rg = rg || n.requires_grad;
        idx.push_back(scalars[i].idx);
    }
    return push(std::move(y), rg, [idx = std::move(idx)](Tape& t, const Node& out) {
        Eigen::MatrixXd g(1, 1);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            g(0, 0) = out.grad(static_cast<Eigen::Index>(i), 0);
            t.add_grad(idx[i], g);
        }
    });
}

namespace {

Eigen::VectorXd stable_softmax(const Eigen::MatrixXd& v) {
    Eigen::ArrayXd a = v.col(0).array();
    double m = a.maxCoeff();
    Eigen::ArrayXd e = (a - m).exp();
    return (e / e.sum()).matrix();
}

}  // namespace

NodeRef Tape::softmax(NodeRef v) {
    const Node& nv = node(v);
    if (nv.val.cols() != 1) throw std::invalid_argument("Tape::softmax: expects a column vector");
    int iv = v.idx;
    return push(stable_softmax(nv.val), nv.requires_grad, [iv](Tape& t, const Node& out) {
        const Eigen::VectorXd y = out.val.col(0);
        const Eigen::VectorXd g = out.grad.col(0);
        double s = y.dot(g);
        t.add_grad(iv, Eigen::MatrixXd(y.cwiseProduct(((g.array() - s).matrix()))));
    });
}

NodeRef Tape::log_softmax(NodeRef v) {
    const Node& nv = node(v);
    if (nv.val.cols() != 1) throw std::invalid_argument("Tape::log_softmax: expects a column vector");
    Eigen::ArrayXd a = nv.val.col(0).array();
    double m = a.maxCoeff();
    double lse = m + std::log((a - m).exp().sum());
    int iv = v.idx;
    return push(Eigen::MatrixXd((a - lse).matrix()), nv.requires_grad, [iv](Tape& t, const Node& out) {
        const Eigen::VectorXd p = out.val.col(0).array().exp().matrix();
        const Eigen::VectorXd g = out.grad.col(0);
        double s = g.sum();
        t.add_grad(iv, Eigen::MatrixXd(g - s * p));
    });
}

NodeRef Tape::pick(NodeRef v, int i) {
    const Node& nv = node(v);
    if (nv.val.cols() != 1) throw std::invalid_argument("Tape::pick: expects a column vector");
    if (i < 0 || i >= nv.val.rows()) throw std::out_of_range("Tape::pick: index out of range");
    Eigen::MatrixXd y(1, 1);
    y(0, 0) = nv.val(i, 0);
    int iv = v.idx;
    return push(std::move(y), nv.requires_grad, [iv, i](Tape& t, const Node& out) {
        Node& src = t.nodes_[iv];
        if (!src.requires_grad) return;
        if (src.grad.size() == 0) src.grad = Eigen::MatrixXd::Zero(src.val.rows(), src.val.cols());
        src.grad(i, 0) += out.grad(0, 0);
    });
}

NodeRef Tape::dot(NodeRef a, NodeRef b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.val.cols() != 1 || nb.val.cols() != 1 || na.val.rows() != nb.val.rows())
        throw std::invalid_argument("Tape::dot: shape mismatch");
    Eigen::MatrixXd y(1, 1);
    y(0, 0) = na.val.col(0).dot(nb.val.col(0));
    bool rg = na.requires_grad || nb.requires_grad;
    int ia = a.idx, ib = b.idx;
    return push(std::move(y), rg, [ia, ib](Tape& t, const Node& out) {
        double g = out.grad(0, 0);
        t.add_grad(ia, g * t.nodes_[ib].val);
        t.add_grad(ib, g * t.nodes_[ia].val);
    });
}

NodeRef Tape::softmax_cross_entropy(NodeRef logits, int label) {
    const Node& nl = node(logits);
    if (nl.val.cols() != 1) throw std::invalid_argument("softmax_cross_entropy: expects a column vector");
    if (label < 0 || label >= nl.val.rows())
        throw std::out_of_range("softmax_cross_entropy: label out of range");
    Eigen::ArrayXd a = nl.val.col(0).array();
    double m = a.maxCoeff();
    double lse = m + std::log((a - m).exp().sum());
    Eigen::MatrixXd y(1, 1);
    y(0, 0) = lse - nl.val(label, 0);
    int il = logits.idx;
    return push(std::move(y), nl.requires_grad, [il, label](Tape& t, const Node& out) {
        const Node& lg = t.nodes_[il];
        Eigen::VectorXd p = stable_softmax(lg.val);
        p(label) -= 1.0;
        t.add_grad(il, Eigen::MatrixXd(out.grad(0, 0) * p));
    });
}

void Tape::backward(NodeRef loss) {
    Node& ln = node(loss);
    if (ln.val.rows() != 1 || ln.val.cols() != 1)
        throw std::logic_error("Tape::backward: loss must be a scalar node");
    if (!ln.requires_grad)
        throw std::logic_error("Tape::backward: loss does not depend on any parameter");
    ln.grad = Eigen::MatrixXd::Ones(1, 1);
    for (int i = loss.idx; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (!n.requires_grad || n.grad.size() == 0 || !n.back) continue;
        n.back(*this, n);
    }
    if (store_) {
        for (const auto& [name, idx] : param_nodes_) {
            const Node& n = nodes_[static_cast<std::size_t>(idx)];
            if (n.grad.size() != 0) store_->at(name).grad += n.grad;
        }
    }
}

}  // namespace gbe::nn
