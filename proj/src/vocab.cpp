#include "gbe/vocab.hpp"

#include <stdexcept>

namespace gbe {

namespace {

const std::vector<std::string> kStructural = {
    "find", "the", "it", "is", "in", "a", "go", "to", "and", "next", "there", "target",
};
const std::vector<std::string> kClasses = {
    "chair", "table", "lamp", "sofa", "bed", "mirror", "plant", "vase", "picture", "rug",
};
const std::vector<std::string> kColors = {
    "red", "blue", "green", "yellow", "white", "black", "brown", "gray",
};
const std::vector<std::string> kSizes = {"small", "medium", "large"};
const std::vector<std::string> kShapes = {"round", "square", "rectangular", "oval", "slender"};
const std::vector<std::string> kRelations = {"near", "above", "below", "left_of", "right_of"};
const std::vector<std::string> kRegionTypes = {
    "kitchen", "bedroom", "living_room", "bathroom", "hallway",
    "office", "dining_room", "garage", "balcony", "studio",
};

}  // namespace

const std::vector<std::string>& Vocab::object_classes() { return kClasses; }
const std::vector<std::string>& Vocab::colors() { return kColors; }
const std::vector<std::string>& Vocab::sizes() { return kSizes; }
const std::vector<std::string>& Vocab::shapes() { return kShapes; }
const std::vector<std::string>& Vocab::relations() { return kRelations; }
const std::vector<std::string>& Vocab::region_types() { return kRegionTypes; }

Vocab::Vocab() {
    auto add_all = [this](const std::vector<std::string>& list) {
        for (const auto& t : list) {
            if (!index_.count(t)) {
                index_[t] = static_cast<int>(tokens_.size());
                tokens_.push_back(t);
            }
        }
    };
    add_all(kStructural);
    add_all(kClasses);
    add_all(kColors);
    add_all(kSizes);
    add_all(kShapes);
    add_all(kRelations);
    add_all(kRegionTypes);
}

const Vocab& Vocab::instance() {
    static const Vocab v;
    return v;
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) throw std::out_of_range("Vocab: unknown token '" + token + "'");
    return it->second;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("Vocab: bad token id");
    return tokens_[static_cast<std::size_t>(id)];
}

}  // namespace gbe
