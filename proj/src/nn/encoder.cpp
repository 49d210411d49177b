#include "gbe/nn/encoder.hpp"

#include <stdexcept>

namespace gbe::nn {

void init_sequence_encoder(ParamStore& store, int vocab_size, const SequenceEncoderConfig& cfg,
                           Rng& rng) {
    const int de = cfg.embed_dim;
    const int dh = cfg.hidden_dim;
    store.add("lang.embed", de, vocab_size, rng);
    for (const char* gate : {"z", "r", "h"}) {
        store.add(std::string("lang.W") + gate, dh, de, rng);
        store.add(std::string("lang.U") + gate, dh, dh, rng);
        store.add_zeros(std::string("lang.b") + gate, dh, 1);
    }
}

EncodedSequence sequence_encode(Tape& tape, const std::vector<int>& tokens, int vocab_size,
                                const SequenceEncoderConfig& cfg, bool zero_language) {
    if (tokens.empty()) throw std::invalid_argument("sequence_encode: empty token sequence");
    for (int t : tokens)
        if (t < 0 || t >= vocab_size)
            throw std::out_of_range("sequence_encode: token id " + std::to_string(t) +
                                    " outside vocabulary");

    NodeRef embed = tape.param("lang.embed");
    NodeRef wz = tape.param("lang.Wz"), uz = tape.param("lang.Uz"), bz = tape.param("lang.bz");
    NodeRef wr = tape.param("lang.Wr"), ur = tape.param("lang.Ur"), br = tape.param("lang.br");
    NodeRef wh = tape.param("lang.Wh"), uh = tape.param("lang.Uh"), bh = tape.param("lang.bh");

    NodeRef h = tape.zeros(cfg.hidden_dim);
    NodeRef one = tape.ones(cfg.hidden_dim);

    EncodedSequence out;
    out.states.reserve(tokens.size());
    for (int tok : tokens) {
        NodeRef x = zero_language ? tape.zeros(cfg.embed_dim) : tape.col(embed, tok);
        NodeRef z = tape.sigmoid(tape.add(tape.affine(wz, x, bz), tape.matmul(uz, h)));
        NodeRef r = tape.sigmoid(tape.add(tape.affine(wr, x, br), tape.matmul(ur, h)));
        NodeRef hh = tape.tanh(tape.add(tape.affine(wh, x, bh), tape.matmul(uh, tape.hadamard(r, h))));
        h = tape.add(tape.hadamard(tape.sub(one, z), h), tape.hadamard(z, hh));
        out.states.push_back(h);
    }
    out.pooled = h;
    return out;
}

}  // namespace gbe::nn
