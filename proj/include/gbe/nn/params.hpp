#pragma once

#include <Eigen/Core>
#include <map>
#include <string>

#include "gbe/common.hpp"

namespace gbe::nn {

// Named trainable tensors with gradient and RMSProp second-moment
// accumulators. Map keys are sorted, which makes iteration order and the
// checkpoint byte layout deterministic.
class ParamStore {
public:
    struct Entry {
        Eigen::MatrixXd value;
        Eigen::MatrixXd grad;
        Eigen::MatrixXd second_moment;
    };

    // Uniform init scaled by fan-in (cols for matrices, rows for column
    // vectors); reproducible from the rng.
    Eigen::MatrixXd& add(const std::string& name, int rows, int cols, Rng& rng);
    Eigen::MatrixXd& add_zeros(const std::string& name, int rows, int cols);

    bool has(const std::string& name) const { return entries_.count(name) > 0; }
    Entry& at(const std::string& name);
    const Entry& at(const std::string& name) const;
    const std::map<std::string, Entry>& entries() const { return entries_; }
    std::map<std::string, Entry>& entries() { return entries_; }

    void zero_grads();
    std::size_t parameter_count() const;

    // Standard RMSProp with gradient clearing. Throws std::runtime_error if
    // any gradient contains NaN (training-stability guard).
    void rmsprop_step(double lr, double decay = 0.99, double eps = 1e-8);

    // Bit-exact binary round trip, optimizer state included.
    void save(const std::string& path) const;
    static ParamStore load(const std::string& path);

    bool same_values(const ParamStore& other) const;

private:
    std::map<std::string, Entry> entries_;
};

}  // namespace gbe::nn
