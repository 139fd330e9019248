#pragma once
// Fixed-width bit-vector subsets of a ground set {0..n-1}, plus the error
// taxonomy shared by the whole library (the CLI maps these to exit codes).

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace galvin {

// Invalid parameters / preconditions (CLI exit 2).
struct param_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Work refused because it exceeds a configured resource budget (CLI exit 3).
// Distinct from a negative answer: the question was not decided.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// File and serialization problems (CLI exit 4).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroundSet {
    int n;
    explicit GroundSet(int n_) : n(n_) {
        if (n_ < 2)
            throw param_error("ground set needs n >= 2, got " + std::to_string(n_));
    }
};

// A subset of {0..n-1}. Width is fixed at construction; operations across
// different widths are rejected rather than implicitly resized.
class SubsetMask {
  public:
    SubsetMask() = default;  // width-0 placeholder; any real use requires a factory

    static SubsetMask empty_set(int n) { return SubsetMask(n); }

    static SubsetMask full_set(int n) {
        SubsetMask m(n);
        for (auto& w : m.words_) w = ~uint64_t{0};
        m.trim();
        return m;
    }

    static SubsetMask from_elements(int n, std::initializer_list<int> elems) {
        SubsetMask m(n);
        for (int e : elems) m.set(e);
        return m;
    }

    static SubsetMask from_indices(int n, const std::vector<int>& elems) {
        SubsetMask m(n);
        for (int e : elems) m.set(e);
        return m;
    }

    // Interprets the low n (<= 64) bits of `bits` as the subset.
    static SubsetMask from_u64(int n, uint64_t bits) {
        if (n > 64) throw param_error("from_u64 needs n <= 64");
        if (n < 64 && (bits >> n) != 0) throw param_error("from_u64: bit set beyond the ground set");
        SubsetMask m(n);
        if (!m.words_.empty()) m.words_[0] = bits;
        return m;
    }

    int universe() const { return n_; }

    bool test(int i) const {
        check_index(i);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(int i) {
        check_index(i);
        words_[i >> 6] |= uint64_t{1} << (i & 63);
    }
    void reset(int i) {
        check_index(i);
        words_[i >> 6] &= ~(uint64_t{1} << (i & 63));
    }

    int count() const {
        int c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }
    bool none() const {
        for (uint64_t w : words_)
            if (w) return false;
        return true;
    }

    SubsetMask operator&(const SubsetMask& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a & b; }); }
    SubsetMask operator|(const SubsetMask& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a | b; }); }
    SubsetMask operator^(const SubsetMask& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a ^ b; }); }
    // Set difference: elements of *this not in o.
    SubsetMask minus(const SubsetMask& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a & ~b; }); }

    // Complement within the ground set.
    SubsetMask comp() const {
        SubsetMask m(n_);
        for (size_t i = 0; i < words_.size(); ++i) m.words_[i] = ~words_[i];
        m.trim();
        return m;
    }

    // |*this AND o| without allocating the intersection.
    int intersect_count(const SubsetMask& o) const {
        check_same(o);
        int c = 0;
        for (size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }

    bool intersects(const SubsetMask& o) const {
        check_same(o);
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    bool subset_of(const SubsetMask& o) const {
        check_same(o);
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    bool operator==(const SubsetMask& o) const {
        check_same(o);
        return words_ == o.words_;
    }
    bool operator!=(const SubsetMask& o) const { return !(*this == o); }

    // Orders masks by their value as one big unsigned integer (the order a
    // low-to-high bit-pattern enumeration produces); used for canonical
    // sorted family storage.
    bool operator<(const SubsetMask& o) const {
        check_same(o);
        for (size_t i = words_.size(); i-- > 0;)
            if (words_[i] != o.words_[i]) return words_[i] < o.words_[i];
        return false;
    }

    // Smallest element, or -1 when empty.
    int lowest() const {
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return int(i * 64) + std::countr_zero(words_[i]);
        return -1;
    }

    std::vector<int> elements() const {
        std::vector<int> out;
        out.reserve(size_t(count()));
        for_each_bit([&](int e) { out.push_back(e); });
        return out;
    }

    template <class Fn>
    void for_each_bit(Fn&& fn) const {
        for (size_t i = 0; i < words_.size(); ++i) {
            uint64_t w = words_[i];
            while (w) {
                fn(int(i * 64) + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    uint64_t low64() const { return words_.empty() ? 0 : words_[0]; }
    size_t word_count() const { return words_.size(); }
    uint64_t word(size_t i) const { return words_[i]; }

  private:
    explicit SubsetMask(int n) : n_(n), words_((size_t(n) + 63) / 64) {
        if (n < 1) throw param_error("subset mask needs n >= 1");
    }

    void check_index(int i) const {
        if (i < 0 || i >= n_)
            throw param_error("element " + std::to_string(i) + " outside ground set of size " + std::to_string(n_));
    }
    void check_same(const SubsetMask& o) const {
        if (n_ != o.n_)
            throw param_error("dimension error: masks over ground sets of size " + std::to_string(n_) + " and " +
                              std::to_string(o.n_));
    }
    // Clears bits at positions >= n in the top word.
    void trim() {
        int tail = n_ & 63;
        if (tail && !words_.empty()) words_.back() &= (uint64_t{1} << tail) - 1;
    }

    template <class Op>
    SubsetMask zip(const SubsetMask& o, Op op) const {
        check_same(o);
        SubsetMask m(n_);
        for (size_t i = 0; i < words_.size(); ++i) m.words_[i] = op(words_[i], o.words_[i]);
        return m;
    }

    int n_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace galvin
