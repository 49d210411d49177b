#include "gbe/nn/params.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gbe::nn {

Eigen::MatrixXd& ParamStore::add(const std::string& name, int rows, int cols, Rng& rng) {
    if (entries_.count(name)) throw std::invalid_argument("ParamStore::add: duplicate name " + name);
    Entry e;
    double fan_in = cols > 1 ? static_cast<double>(cols) : static_cast<double>(rows);
    double limit = 1.0 / std::sqrt(fan_in);
    e.value.resize(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) e.value(r, c) = rng.uniform(-limit, limit);
    e.grad = Eigen::MatrixXd::Zero(rows, cols);
    e.second_moment = Eigen::MatrixXd::Zero(rows, cols);
    return entries_.emplace(name, std::move(e)).first->second.value;
}

Eigen::MatrixXd& ParamStore::add_zeros(const std::string& name, int rows, int cols) {
    if (entries_.count(name)) throw std::invalid_argument("ParamStore::add_zeros: duplicate name " + name);
    Entry e;
    e.value = Eigen::MatrixXd::Zero(rows, cols);
    e.grad = Eigen::MatrixXd::Zero(rows, cols);
    e.second_moment = Eigen::MatrixXd::Zero(rows, cols);
    return entries_.emplace(name, std::move(e)).first->second.value;
}

ParamStore::Entry& ParamStore::at(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
    return it->second;
}

const ParamStore::Entry& ParamStore::at(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::out_of_range("ParamStore: unknown parameter " + name);
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& [name, e] : entries_) e.grad.setZero();
}

std::size_t ParamStore::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, e] : entries_) n += static_cast<std::size_t>(e.value.size());
    return n;
}

void ParamStore::rmsprop_step(double lr, double decay, double eps) {
    for (auto& [name, e] : entries_) {
        if (e.grad.hasNaN())
            throw std::runtime_error("rmsprop_step: NaN gradient in parameter " + name);
        e.second_moment = decay * e.second_moment + (1.0 - decay) * e.grad.cwiseProduct(e.grad);
        e.value -= lr * e.grad.cwiseQuotient((e.second_moment.cwiseSqrt().array() + eps).matrix());
        e.grad.setZero();
    }
}

namespace {

constexpr char kMagic[8] = {'G', 'B', 'E', 'C', 'K', 'P', 'T', '1'};

void write_u64(std::ofstream& f, std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t read_u64(std::ifstream& f) {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_matrix(std::ofstream& f, const Eigen::MatrixXd& m) {
    write_u64(f, static_cast<std::uint64_t>(m.rows()));
    write_u64(f, static_cast<std::uint64_t>(m.cols()));
    f.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_matrix(std::ifstream& f) {
    auto rows = static_cast<Eigen::Index>(read_u64(f));
    auto cols = static_cast<Eigen::Index>(read_u64(f));
    Eigen::MatrixXd m(rows, cols);
    f.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    return m;
}

}  // namespace

void ParamStore::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ParamStore::save: cannot open " + path);
    f.write(kMagic, 8);
    write_u64(f, entries_.size());
    for (const auto& [name, e] : entries_) {
        write_u64(f, name.size());
        f.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_matrix(f, e.value);
        write_matrix(f, e.second_moment);
    }
    if (!f) throw std::runtime_error("ParamStore::save: write failed for " + path);
}

ParamStore ParamStore::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ParamStore::load: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("ParamStore::load: bad checkpoint magic in " + path);
    ParamStore store;
    std::uint64_t n = read_u64(f);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint64_t len = read_u64(f);
        std::string name(len, '\0');
        f.read(name.data(), static_cast<std::streamsize>(len));
        Entry e;
        e.value = read_matrix(f);
        e.second_moment = read_matrix(f);
        e.grad = Eigen::MatrixXd::Zero(e.value.rows(), e.value.cols());
        store.entries_.emplace(std::move(name), std::move(e));
    }
    if (!f) throw std::runtime_error("ParamStore::load: truncated checkpoint " + path);
    return store;
}

bool ParamStore::same_values(const ParamStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    auto it = entries_.begin();
    auto jt = other.entries_.begin();
    for (; it != entries_.end(); ++it, ++jt) {
        if (it->first != jt->first) return false;
        if (it->second.value != jt->second.value) return false;
    }
    return true;
}

}  // namespace gbe::nn
