#pragma once

#include <vector>

#include "gbe/nn/tape.hpp"

namespace gbe::nn {

struct SequenceEncoderConfig {
    int embed_dim = 32;
    int hidden_dim = 64;
};

// Registers the embedding table and GRU parameters under the "lang." prefix.
void init_sequence_encoder(ParamStore& store, int vocab_size, const SequenceEncoderConfig& cfg,
                           Rng& rng);

struct EncodedSequence {
    std::vector<NodeRef> states;  // per-token hidden states
    NodeRef pooled;               // final hidden state
};

// Embedding lookup followed by a single-layer GRU. With zero_language the
// embedded inputs are replaced by zero vectors (Tab.-5-style ablation).
// Throws std::out_of_range on out-of-vocabulary ids, std::invalid_argument
// on an empty sequence.
EncodedSequence sequence_encode(Tape& tape, const std::vector<int>& tokens, int vocab_size,
                                const SequenceEncoderConfig& cfg, bool zero_language = false);

}  // namespace gbe::nn
