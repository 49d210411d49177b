#include "gbe/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gbe::nn {

GradCheckReport grad_check(ParamStore& store, const LossFn& loss_fn, double eps,
                           int max_entries_per_param, std::uint64_t seed) {
    store.zero_grads();
    {
        Tape tape(&store);
        NodeRef loss = loss_fn(tape);
        tape.backward(loss);
    }
    std::map<std::string, Eigen::MatrixXd> analytic;
    for (const auto& [name, e] : store.entries()) analytic[name] = e.grad;
    store.zero_grads();

    auto eval = [&]() {
        Tape tape(&store);
        double v = tape.scalar(loss_fn(tape));
        return v;
    };

    Rng rng(mix_seed(seed));
    GradCheckReport report;
    for (auto& [name, e] : store.entries()) {
        const long total = e.value.size();
        std::vector<long> picks;
        if (max_entries_per_param > 0 && total > max_entries_per_param) {
            for (int k = 0; k < max_entries_per_param; ++k)
                picks.push_back(rng.uniform_int(static_cast<int>(total)));
            std::sort(picks.begin(), picks.end());
            picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
        } else {
            picks.resize(static_cast<std::size_t>(total));
            for (long i = 0; i < total; ++i) picks[static_cast<std::size_t>(i)] = i;
        }
        double* data = e.value.data();
        for (long i : picks) {
            double saved = data[i];
            data[i] = saved + eps;
            double up = eval();
            data[i] = saved - eps;
            double down = eval();
            data[i] = saved;
            double numeric = (up - down) / (2.0 * eps);
            double a = analytic[name].data()[i];
            double rel = std::abs(a - numeric) / std::max({1e-4, std::abs(a), std::abs(numeric)});
            report.max_rel_error = std::max(report.max_rel_error, rel);
            ++report.entries_checked;
        }
    }
    store.zero_grads();
    return report;
}

}  // namespace gbe::nn
