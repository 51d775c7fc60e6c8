#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwrs/rng.hpp"

namespace rwrs {

inline constexpr int kMaxDim = 4;

/// Lattice site; only the first d lanes are meaningful.
using Site = std::array<int, kMaxDim>;

inline Site origin_site() { return Site{0, 0, 0, 0}; }

/// Pack a site into a 64-bit key, 16 bits per axis, biased to unsigned.
/// Coordinates are restricted to |c| < 32768; a walk leaving that range is a
/// hard error rather than silent aliasing.
inline uint64_t pack_site(int d, const Site& s) {
    uint64_t key = 0;
    for (int i = 0; i < d; ++i) {
        const int c = s[i];
        if (c <= -32768 || c >= 32768) throw std::overflow_error("pack_site: coordinate out of 16-bit range");
        key |= (static_cast<uint64_t>(static_cast<uint16_t>(c + 32768))) << (16 * i);
    }
    return key;
}

inline Site unpack_site(int d, uint64_t key) {
    Site s = origin_site();
    for (int i = 0; i < d; ++i) {
        s[i] = static_cast<int>((key >> (16 * i)) & 0xffffULL) - 32768;
    }
    return s;
}

/// Open-addressing integer-count map (linear probing, power-of-two capacity).
/// A slot is empty iff its value is zero, which is safe because stored counts
/// are always positive.
class FlatCountMap {
  public:
    FlatCountMap() { rehash(64); }

    void clear() {
        std::fill(vals_.begin(), vals_.end(), 0);
        size_ = 0;
    }

    std::size_t size() const { return size_; }

    /// Adds 1 to the count at key and returns the previous count (0 if absent).
    int64_t increment(uint64_t key) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
        std::size_t i = slot(key);
        if (vals_[i] == 0) {
            keys_[i] = key;
            vals_[i] = 1;
            ++size_;
            return 0;
        }
        return vals_[i]++;
    }

    /// Adds an arbitrary positive amount.
    void add(uint64_t key, int64_t amount) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
        std::size_t i = slot(key);
        if (vals_[i] == 0) {
            keys_[i] = key;
            ++size_;
        }
        vals_[i] += amount;
    }

    int64_t get(uint64_t key) const {
        std::size_t i = slot(key);
        return vals_[i];
    }

    template <typename F>
    void for_each(F&& fn) const {
        for (std::size_t i = 0; i < keys_.size(); ++i) {
            if (vals_[i] != 0) fn(keys_[i], vals_[i]);
        }
    }

  private:
    std::size_t slot(uint64_t key) const {
        std::size_t mask = keys_.size() - 1;
        std::size_t i = mix64(key) & mask;
        while (vals_[i] != 0 && keys_[i] != key) i = (i + 1) & mask;
        return i;
    }

    void rehash(std::size_t cap) {
        std::vector<uint64_t> ok = std::move(keys_);
        std::vector<int64_t> ov = std::move(vals_);
        keys_.assign(cap, 0);
        vals_.assign(cap, 0);
        size_ = 0;
        for (std::size_t i = 0; i < ok.size(); ++i) {
            if (ov[i] != 0) add(ok[i], ov[i]);
        }
    }

    std::vector<uint64_t> keys_;
    std::vector<int64_t> vals_;
    std::size_t size_ = 0;
};

/// Centered lattice box {-r, ..., r-1}^d of side 2r; the torus identifies
/// coordinates modulo 2r.
struct LatticeBox {
    int d;
    int r;

    LatticeBox(int d_, int r_) : d(d_), r(r_) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("LatticeBox: bad dimension");
        if (r < 1) throw std::invalid_argument("LatticeBox: radius >= 1 required");
    }

    std::size_t size() const {
        std::size_t n = 1;
        for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(2 * r);
        return n;
    }

    bool contains(const Site& s) const {
        for (int i = 0; i < d; ++i) {
            if (s[i] < -r || s[i] >= r) return false;
        }
        return true;
    }

    int wrap1(int c) const {
        const int side = 2 * r;
        int w = (c + r) % side;
        if (w < 0) w += side;
        return w - r;
    }

    Site wrap(const Site& s) const {
        Site w = origin_site();
        for (int i = 0; i < d; ++i) w[i] = wrap1(s[i]);
        return w;
    }

    std::size_t index(const Site& s) const {
        std::size_t idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * (2 * r) + static_cast<std::size_t>(s[i] + r);
        return idx;
    }

    Site site(std::size_t idx) const {
        Site s = origin_site();
        for (int i = d - 1; i >= 0; --i) {
            s[i] = static_cast<int>(idx % (2 * r)) - r;
            idx /= (2 * r);
        }
        return s;
    }
};

}  // namespace rwrs
