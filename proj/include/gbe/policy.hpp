#pragma once

#include <vector>

#include "gbe/nn/encoder.hpp"
#include "gbe/nn/tape.hpp"

namespace gbe {

struct PolicyConfig {
    int feature_dim = 32;  // D_v
    int embed_dim = 64;    // D_m, matches the planner and language hidden size
    nn::SequenceEncoderConfig language{32, 64};
};

// Registers every trainable tensor: language encoder, vision encoder g,
// GCN weights, cross-modal combine, navigation/localization/value heads and
// the learned stop embedding.
void init_policy_params(nn::ParamStore& store, const PolicyConfig& config, int vocab_size,
                        int gcn_layers, Rng& rng);

// g: linear + tanh projection D_v -> D_m, shared between the current view
// and candidate observations.
nn::NodeRef encode_vision(nn::Tape& tape, const Eigen::VectorXd& raw);

// Attention of the graph readout over per-token language states, combined
// as f_tilde = tanh(W_x [f_g; attended] + b_x).
nn::NodeRef cross_modal(nn::Tape& tape, nn::NodeRef graph_readout,
                        const std::vector<nn::NodeRef>& language_states);

struct PolicyOutput {
    nn::NodeRef logits;        // |C|+1 entries, index 0 = stop
    nn::NodeRef log_probs;     // log softmax of logits
    nn::NodeRef localization;  // 2x1: predicted (heading, elevation)
    nn::NodeRef value;         // 1x1 critic estimate
};

// z_0 = W_nav [f_tilde; stop_embedding], z_i = W_nav [f_tilde; f_ci].
// |C| = 0 degenerates to the stop-only distribution. The localization and
// value heads read f_tilde alone.
PolicyOutput decide(nn::Tape& tape, nn::NodeRef f_tilde,
                    const std::vector<nn::NodeRef>& candidate_features);

}  // namespace gbe
