#pragma once

#include <functional>

#include "gbe/nn/tape.hpp"

namespace gbe::nn {

// Builds a scalar loss on a fresh tape over the store's parameters. Must be
// deterministic: called repeatedly under parameter perturbations.
using LossFn = std::function<NodeRef(Tape&)>;

struct GradCheckReport {
    double max_rel_error = 0.0;
    long entries_checked = 0;
};

// Compares reverse-mode gradients against central finite differences for
// every parameter entry, or a seeded random subsample of at most
// max_entries_per_param entries per tensor when that is positive.
// rel = |a - n| / max(1e-4, |a|, |n|).
GradCheckReport grad_check(ParamStore& store, const LossFn& loss_fn, double eps = 1e-4,
                           int max_entries_per_param = 0, std::uint64_t seed = 17);

}  // namespace gbe::nn
