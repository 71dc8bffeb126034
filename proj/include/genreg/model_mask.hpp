#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "genreg/errors.hpp"

namespace genreg {

// Inclusion indicator u in {0,1}^d over the d candidate variables.
// Packed into 64-bit blocks; position 0 is the first variable.
class ModelMask {
  public:
    ModelMask() = default;

    explicit ModelMask(int d) : d_(d), bits_((d + 63) / 64, 0) {
        if (d < 0) throw ConfigError("ModelMask: negative dimension");
    }

    static ModelMask from_string(const std::string& s) {
        ModelMask m(static_cast<int>(s.size()));
        for (int j = 0; j < m.d_; ++j) {
            char c = s[static_cast<size_t>(j)];
            if (c == '1')
                m.set(j, true);
            else if (c != '0')
                throw ConfigError("ModelMask: invalid character '" +
                                  std::string(1, c) + "' in mask string");
        }
        return m;
    }

    // Mask whose active set is bit pattern `code`: variable j active iff
    // bit j of code is set. Requires d <= 63.
    static ModelMask from_code(int d, uint64_t code) {
        ModelMask m(d);
        for (int j = 0; j < d; ++j)
            if ((code >> j) & 1u) m.set(j, true);
        return m;
    }

    int dimension() const { return d_; }

    bool test(int j) const { return (bits_[block(j)] >> offset(j)) & 1u; }

    void set(int j, bool v) {
        uint64_t b = uint64_t(1) << offset(j);
        if (v)
            bits_[block(j)] |= b;
        else
            bits_[block(j)] &= ~b;
    }

    void flip(int j) { bits_[block(j)] ^= uint64_t(1) << offset(j); }

    // Number of active variables |u|.
    int count() const {
        int c = 0;
        for (uint64_t w : bits_) c += std::popcount(w);
        return c;
    }

    std::vector<int> active() const {
        std::vector<int> idx;
        idx.reserve(static_cast<size_t>(count()));
        for (int j = 0; j < d_; ++j)
            if (test(j)) idx.push_back(j);
        return idx;
    }

    std::string to_string() const {
        std::string s(static_cast<size_t>(d_), '0');
        for (int j = 0; j < d_; ++j)
            if (test(j)) s[static_cast<size_t>(j)] = '1';
        return s;
    }

    uint64_t code() const {
        if (d_ > 63) throw ConfigError("ModelMask::code: dimension exceeds 63");
        return bits_.empty() ? 0 : bits_[0];
    }

    bool operator==(const ModelMask& o) const {
        return d_ == o.d_ && bits_ == o.bits_;
    }
    bool operator!=(const ModelMask& o) const { return !(*this == o); }

    // Lexicographic order on the bit string read from position 0.
    bool lex_less(const ModelMask& o) const {
        for (int j = 0; j < d_ && j < o.d_; ++j) {
            bool a = test(j), b = o.test(j);
            if (a != b) return !a;
        }
        return d_ < o.d_;
    }

    size_t hash() const {
        size_t h = std::hash<int>{}(d_);
        for (uint64_t w : bits_)
            h ^= std::hash<uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) +
                 (h >> 2);
        return h;
    }

  private:
    static size_t block(int j) { return static_cast<size_t>(j) / 64; }
    static int offset(int j) { return j % 64; }

    int d_ = 0;
    std::vector<uint64_t> bits_;
};

struct ModelMaskHash {
    size_t operator()(const ModelMask& m) const { return m.hash(); }
};

// Order: smaller activity count first, lexicographic bit string to break
// ties. Used wherever a deterministic representative must be picked.
inline bool size_lex_less(const ModelMask& a, const ModelMask& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    return a.lex_less(b);
}

}  // namespace genreg
