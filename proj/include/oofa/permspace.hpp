#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oofa/errors.hpp"
#include "oofa/rng.hpp"

namespace oofa {

//! One experimental run: an ordering of the m component labels 1..m.
struct Permutation {
    std::vector<int> order;

    Permutation() = default;
    explicit Permutation(std::vector<int> o) : order(std::move(o)) {}

    int size() const { return static_cast<int>(order.size()); }
    bool operator==(const Permutation&) const = default;
};

inline bool is_valid_permutation(const Permutation& a, int m) {
    if (a.size() != m) return false;
    std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
    for (int v : a.order) {
        if (v < 1 || v > m || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

//! Exact factorial; n! must fit in 64 bits (n <= 20).
inline std::uint64_t factorial(int n) {
    if (n < 0 || n > 20) throw overflow_error("factorial(" + std::to_string(n) + ") exceeds 64-bit range");
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

//! Ordered partition of {1..m} into c blocks with a fixed block order: all
//! members of an earlier block must precede all members of a later block.
//! The unconstrained problem is the single-block case c = 1.
class BlockStructure {
public:
    static BlockStructure single(int m) { return from_sizes({m}); }

    //! Blocks of the given sizes with consecutively assigned labels
    //! (block 1 gets 1..s1, block 2 gets s1+1..s1+s2, ...).
    static BlockStructure from_sizes(const std::vector<int>& sizes) {
        std::vector<std::vector<int>> blocks;
        int next = 1;
        for (int s : sizes) {
            if (s < 1) throw invalid_input("block sizes must be positive");
            std::vector<int> b(static_cast<std::size_t>(s));
            for (int i = 0; i < s; ++i) b[i] = next++;
            blocks.push_back(std::move(b));
        }
        return from_blocks(std::move(blocks));
    }

    //! Explicit label sets, for non-consecutive memberships.
    static BlockStructure from_blocks(std::vector<std::vector<int>> blocks) {
        BlockStructure bs;
        if (blocks.empty()) throw invalid_input("at least one block is required");
        int m = 0;
        for (const auto& b : blocks) m += static_cast<int>(b.size());
        bs.m_ = m;
        bs.block_of_.assign(static_cast<std::size_t>(m) + 1, -1);
        for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
            if (blocks[i].empty()) throw invalid_input("blocks must be non-empty");
            std::sort(blocks[i].begin(), blocks[i].end());
            for (int label : blocks[i]) {
                if (label < 1 || label > m) throw invalid_input("block labels must lie in 1..m");
                if (bs.block_of_[label] != -1) throw invalid_input("label " + std::to_string(label) + " appears in two blocks");
                bs.block_of_[label] = i;
            }
        }
        bs.blocks_ = std::move(blocks);
        for (int i = 0; i < bs.block_count(); ++i)
            for (std::size_t k = 0; k < bs.blocks_[i].size(); ++k) bs.pos_block_.push_back(i);
        for (int j = 0; j + 1 < m; ++j)
            if (bs.pos_block_[j] == bs.pos_block_[j + 1]) bs.swappable_.push_back(j + 1); // 1-based position
        return bs;
    }

    int m() const { return m_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    bool unconstrained() const { return blocks_.size() == 1; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<int>& block(int i) const { return blocks_[i]; }
    int block_size(int i) const { return static_cast<int>(blocks_[i].size()); }
    int block_of(int label) const { return block_of_[label]; }
    //! Block owning a given 0-based position (blocks fill contiguous ranges).
    int block_at_position(int pos) const { return pos_block_[pos]; }

    //! 1-based positions j where swapping j, j+1 can stay feasible.
    const std::vector<int>& swappable_positions() const { return swappable_; }

    std::vector<int> sizes() const {
        std::vector<int> s;
        for (const auto& b : blocks_) s.push_back(static_cast<int>(b.size()));
        return s;
    }

    bool operator==(const BlockStructure& o) const { return blocks_ == o.blocks_; }

private:
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;  // label -> block index
    std::vector<int> pos_block_; // position -> block index
    std::vector<int> swappable_;
    int m_ = 0;
};

//! N = prod m_i!, exact; throws oofa::overflow_error if it exceeds 64 bits.
inline std::uint64_t feasible_count(const BlockStructure& bs) {
    std::uint64_t n = 1;
    for (int i = 0; i < bs.block_count(); ++i) {
        const std::uint64_t f = factorial(bs.block_size(i));
        if (__builtin_mul_overflow(n, f, &n))
            throw overflow_error("feasible count overflows 64-bit integer arithmetic");
    }
    return n;
}

//! True iff every earlier-block member precedes every later-block member,
//! i.e. block indices are non-decreasing along the run.
inline bool is_feasible(const Permutation& a, const BlockStructure& bs) {
    if (a.size() != bs.m())
        throw invalid_input("permutation length " + std::to_string(a.size()) +
                            " does not match m = " + std::to_string(bs.m()));
    for (int pos = 0; pos < a.size(); ++pos)
        if (bs.block_of(a.order[pos]) != bs.block_at_position(pos)) return false;
    return true;
}

//! Uniform feasible run: shuffle labels within each block, concatenate the
//! blocks in order. Deterministic given the rng state.
inline Permutation random_feasible(const BlockStructure& bs, Rng& rng) {
    Permutation a;
    a.order.reserve(static_cast<std::size_t>(bs.m()));
    for (int i = 0; i < bs.block_count(); ++i) {
        const std::size_t start = a.order.size();
        a.order.insert(a.order.end(), bs.block(i).begin(), bs.block(i).end());
        for (std::size_t k = a.order.size() - 1; k > start; --k)
            std::swap(a.order[start + rng.uniform_index(k - start + 1)], a.order[k]);
    }
    return a;
}

//! Exchange positions j and j+1 (1-based j in 1..m-1). Returns nullopt when
//! the exchanged run violates the block order; never a silent identity.
inline std::optional<Permutation> adjacent_swap(const Permutation& a, int j, const BlockStructure& bs) {
    if (j < 1 || j > a.size() - 1)
        throw invalid_input("swap position " + std::to_string(j) + " out of range 1.." + std::to_string(a.size() - 1));
    Permutation b = a;
    std::swap(b.order[j - 1], b.order[j]);
    if (!is_feasible(b, bs)) return std::nullopt;
    return b;
}

//! All N feasible runs, each exactly once, in lexicographic order of the
//! concatenated within-block orders. Refuses when N exceeds the cap.
inline std::vector<Permutation> enumerate_feasible(const BlockStructure& bs, std::uint64_t cap = 500000) {
    const std::uint64_t n = feasible_count(bs);
    if (n > cap)
        throw enumeration_refused("feasible count " + std::to_string(n) + " exceeds enumeration cap " +
                                  std::to_string(cap));
    std::vector<std::vector<int>> arr = bs.blocks(); // each already sorted ascending
    std::vector<Permutation> out;
    out.reserve(static_cast<std::size_t>(n));
    const int c = bs.block_count();
    while (true) {
        Permutation a;
        a.order.reserve(static_cast<std::size_t>(bs.m()));
        for (const auto& b : arr) a.order.insert(a.order.end(), b.begin(), b.end());
        out.push_back(std::move(a));
        int i = c - 1;
        while (i >= 0 && !std::next_permutation(arr[i].begin(), arr[i].end())) --i;
        if (i < 0) break;
    }
    return out;
}

} // namespace oofa
