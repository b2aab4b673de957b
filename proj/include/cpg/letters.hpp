#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpg/base.hpp"

namespace cpg {

/// Stack alphabet. Input games have exactly one bottom letter; machines
/// produced by the reductions may use a family of bottom-flagged letters
/// (annotated copies of the bottom symbol), all confined to position 1 of
/// their 1-stack.
class Alphabet {
 public:
  LetterId add(std::string name, bool bottom = false) {
    if (by_name_.count(name)) throw UsageError("duplicate letter name: " + name);
    LetterId id = static_cast<LetterId>(names_.size());
    by_name_.emplace(name, id);
    names_.push_back(std::move(name));
    bottom_.push_back(bottom);
    if (bottom) {
      if (primary_bottom_ == kNoId) primary_bottom_ = id;
      ++bottom_count_;
    }
    return id;
  }

  size_t size() const { return names_.size(); }
  const std::string& name(LetterId id) const { return names_.at(id); }
  bool is_bottom(LetterId id) const { return bottom_.at(id); }
  LetterId bottom() const {
    if (primary_bottom_ == kNoId) throw UsageError("alphabet has no bottom letter");
    return primary_bottom_;
  }
  size_t bottom_count() const { return bottom_count_; }

  LetterId find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? kNoId : it->second;
  }

 private:
  std::vector<std::string> names_;
  std::vector<bool> bottom_;
  std::unordered_map<std::string, LetterId> by_name_;
  LetterId primary_bottom_ = kNoId;
  size_t bottom_count_ = 0;
};

using AlphabetRef = std::shared_ptr<Alphabet>;

}  // namespace cpg
