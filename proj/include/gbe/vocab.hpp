#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace gbe {

// Fixed generated vocabulary. Token ids are stable across runs: the token
// list is compiled in and never depends on data.
class Vocab {
public:
    static const Vocab& instance();

    int id(const std::string& token) const;          // throws on unknown token
    const std::string& token(int id) const;          // throws on bad id
    int size() const { return static_cast<int>(tokens_.size()); }
    bool contains(const std::string& token) const { return index_.count(token) > 0; }

    static const std::vector<std::string>& object_classes();
    static const std::vector<std::string>& colors();
    static const std::vector<std::string>& sizes();
    static const std::vector<std::string>& shapes();
    static const std::vector<std::string>& relations();
    static const std::vector<std::string>& region_types();

private:
    Vocab();
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace gbe
