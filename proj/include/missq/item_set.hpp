#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace missq {

/// Set of item indices in [0, N), stored as a packed bitset. Bits past N are
/// always clear so popcounts never see padding.
class ItemSet {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    ItemSet() = default;
    explicit ItemSet(std::size_t universe) : universe_(universe), words_(word_count(universe), 0) {}

    static ItemSet full(std::size_t universe);
    static ItemSet from_indices(std::size_t universe, std::span<const std::size_t> indices);

    std::size_t universe() const noexcept { return universe_; }
    std::size_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }

    bool contains(std::size_t i) const noexcept {
        return i < universe_ && ((words_[i / kWordBits] >> (i % kWordBits)) & 1U) != 0;
    }
    void insert(std::size_t i);
    void erase(std::size_t i);

    ItemSet complement() const;
    ItemSet& operator&=(const ItemSet& other);
    ItemSet& operator|=(const ItemSet& other);

    friend ItemSet operator&(ItemSet a, const ItemSet& b) { return a &= b; }
    friend ItemSet operator|(ItemSet a, const ItemSet& b) { return a |= b; }
    friend bool operator==(const ItemSet&, const ItemSet&) = default;

    /// |this ∩ other| without materialising the intersection.
    std::size_t intersection_size(const ItemSet& other) const;
    /// |this \ other|.
    std::size_t difference_size(const ItemSet& other) const;

    /// Ascending member indices.
    std::vector<std::size_t> indices() const;

    /// Calls fn(i) for each member in ascending order.
    template <class Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word bits = words_[w];
            while (bits != 0) {
                const int bit = __builtin_ctzll(bits);
                fn(w * kWordBits + static_cast<std::size_t>(bit));
                bits &= bits - 1;
            }
        }
    }

    std::span<const Word> words() const noexcept { return words_; }

private:
    static std::size_t word_count(std::size_t n) { return (n + kWordBits - 1) / kWordBits; }
    void check_same_universe(const ItemSet& other) const;
    void clear_padding() noexcept;

    std::size_t universe_ = 0;
    std::vector<Word> words_;
};

}  // namespace missq
