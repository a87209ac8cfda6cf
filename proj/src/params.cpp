#include "cbs/params.hpp"

#include <stdexcept>

namespace cbs {

void ParamSet::add(std::string name, Tensor t) {
    if (has(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    entries_.emplace_back(std::move(name), std::move(t));
}

bool ParamSet::has(const std::string& name) const {
    for (const auto& [n, _] : entries_)
        if (n == name) return true;
    return false;
}

Tensor& ParamSet::get(const std::string& name) {
    for (auto& [n, t] : entries_)
        if (n == name) return t;
    throw std::out_of_range("no parameter named " + name);
}

const Tensor& ParamSet::get(const std::string& name) const {
    for (const auto& [n, t] : entries_)
        if (n == name) return t;
    throw std::out_of_range("no parameter named " + name);
}

std::size_t ParamSet::total_scalars() const {
    std::size_t n = 0;
    for (const auto& [_, t] : entries_) n += t.numel();
    return n;
}

bool ParamSet::update_compatible(const ParamSet& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].first != other.entries_[i].first) return false;
        if (entries_[i].second.shape() != other.entries_[i].second.shape()) return false;
    }
    return true;
}

}  // namespace cbs
