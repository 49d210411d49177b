#include "gbe/policy.hpp"

#include <stdexcept>

namespace gbe {

void init_policy_params(nn::ParamStore& store, const PolicyConfig& config, int vocab_size,
                        int gcn_layers, Rng& rng) {
    const int dv = config.feature_dim;
    const int dm = config.embed_dim;
    nn::init_sequence_encoder(store, vocab_size, config.language, rng);
    store.add("vis.W", dm, dv, rng);
    store.add_zeros("vis.b", dm, 1);
    for (int l = 0; l < gcn_layers; ++l) store.add("gcn.W" + std::to_string(l), dm, dm, rng);
    store.add("xm.W", dm, 2 * dm, rng);
    store.add_zeros("xm.b", dm, 1);
    store.add("nav.W", 1, 2 * dm, rng);
    store.add_zeros("nav.b", 1, 1);
    store.add("nav.stop", dm, 1, rng);
    store.add("loc.W", 2, dm, rng);
    store.add_zeros("loc.b", 2, 1);
    store.add("val.W", 1, dm, rng);
    store.add_zeros("val.b", 1, 1);
}

nn::NodeRef encode_vision(nn::Tape& tape, const Eigen::VectorXd& raw) {
    nn::NodeRef w = tape.param("vis.W");
    if (tape.value(w).cols() != raw.size())
        throw std::invalid_argument("encode_vision: feature dimension mismatch");
    return tape.tanh(tape.affine(w, tape.constant_vector(raw), tape.param("vis.b")));
}

nn::NodeRef cross_modal(nn::Tape& tape, nn::NodeRef graph_readout,
                        const std::vector<nn::NodeRef>& language_states) {
    if (language_states.empty()) throw std::invalid_argument("cross_modal: no language states");
    std::vector<nn::NodeRef> scores;
    scores.reserve(language_states.size());
    for (nn::NodeRef h : language_states) scores.push_back(tape.dot(h, graph_readout));
    nn::NodeRef weights = tape.softmax(tape.concat_scalars(scores));
    nn::NodeRef attended = tape.matmul(tape.stack_cols(language_states), weights);
    nn::NodeRef joint = tape.vcat(graph_readout, attended);
    return tape.tanh(tape.affine(tape.param("xm.W"), joint, tape.param("xm.b")));
}

PolicyOutput decide(nn::Tape& tape, nn::NodeRef f_tilde,
                    const std::vector<nn::NodeRef>& candidate_features) {
    nn::NodeRef nav_w = tape.param("nav.W");
    nn::NodeRef nav_b = tape.param("nav.b");
    std::vector<nn::NodeRef> logits;
    logits.reserve(candidate_features.size() + 1);
    logits.push_back(tape.affine(nav_w, tape.vcat(f_tilde, tape.param("nav.stop")), nav_b));
    for (nn::NodeRef fc : candidate_features)
        logits.push_back(tape.affine(nav_w, tape.vcat(f_tilde, fc), nav_b));

    PolicyOutput out;
    out.logits = tape.concat_scalars(logits);
    out.log_probs = tape.log_softmax(out.logits);
    out.localization = tape.affine(tape.param("loc.W"), f_tilde, tape.param("loc.b"));
    out.value = tape.affine(tape.param("val.W"), f_tilde, tape.param("val.b"));
    return out;
}

}  // namespace gbe
