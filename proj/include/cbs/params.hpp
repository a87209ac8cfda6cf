#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbs/tensor.hpp"

namespace cbs {

// Ordered name -> tensor map. Insertion order is the iteration order, which
// keeps update loops and serialization deterministic.
class ParamSet {
public:
    void add(std::string name, Tensor t);
    bool has(const std::string& name) const;
    Tensor& get(const std::string& name);
    const Tensor& get(const std::string& name) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t total_scalars() const;

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool update_compatible(const ParamSet& other) const;

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
};

using GradSet = ParamSet;

}  // namespace cbs
