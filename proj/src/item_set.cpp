#include "missq/item_set.hpp"

#include "missq/errors.hpp"
#include "missq/kernels/kernels.hpp"

#include <string>

namespace missq {

ItemSet ItemSet::full(std::size_t universe) {
    ItemSet s(universe);
    for (auto& w : s.words_) w = ~Word{0};
    s.clear_padding();
    return s;
}

ItemSet ItemSet::from_indices(std::size_t universe, std::span<const std::size_t> indices) {
    ItemSet s(universe);
    for (std::size_t i : indices) s.insert(i);
    return s;
}

std::size_t ItemSet::size() const noexcept {
    return static_cast<std::size_t>(kernels::active_kernels().popcount(words_));
}

void ItemSet::insert(std::size_t i) {
    if (i >= universe_)
        throw ValidationError("item index " + std::to_string(i) + " outside universe of " +
                              std::to_string(universe_));
    words_[i / kWordBits] |= Word{1} << (i % kWordBits);
}

void ItemSet::erase(std::size_t i) {
    if (i >= universe_) return;
    words_[i / kWordBits] &= ~(Word{1} << (i % kWordBits));
}

ItemSet ItemSet::complement() const {
    ItemSet out = *this;
    for (auto& w : out.words_) w = ~w;
    out.clear_padding();
    return out;
}

ItemSet& ItemSet::operator&=(const ItemSet& other) {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
    return *this;
}

ItemSet& ItemSet::operator|=(const ItemSet& other) {
    check_same_universe(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    return *this;
}

std::size_t ItemSet::intersection_size(const ItemSet& other) const {
    check_same_universe(other);
    return static_cast<std::size_t>(kernels::active_kernels().popcount_and(words_, other.words_));
}

std::size_t ItemSet::difference_size(const ItemSet& other) const {
    check_same_universe(other);
    return static_cast<std::size_t>(kernels::active_kernels().popcount_andnot(words_, other.words_));
}

std::vector<std::size_t> ItemSet::indices() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
}

void ItemSet::check_same_universe(const ItemSet& other) const {
    if (other.universe_ != universe_)
        throw ValidationError("item sets over different universes (" + std::to_string(universe_) +
                              " vs " + std::to_string(other.universe_) + ")");
}

void ItemSet::clear_padding() noexcept {
    const std::size_t tail = universe_ % kWordBits;
    if (tail != 0 && !words_.empty()) words_.back() &= (Word{1} << tail) - 1;
}

}  // namespace missq
