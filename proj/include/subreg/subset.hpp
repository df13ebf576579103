#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace subreg {

/// Thrown when an exhaustive routine is asked to run beyond its size guard.
class guard_error : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Thrown when an iterative method fails to reach its tolerance.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_guard(std::size_t n, std::size_t limit, const char* what)
{
    if (n > limit) {
        throw guard_error(std::string(what) + ": size " + std::to_string(n) +
                          " exceeds exhaustive-search guard " + std::to_string(limit));
    }
}

/// The ground set V = {0, ..., p-1}.
class GroundSet {
public:
    explicit GroundSet(std::size_t p) : p_(p)
    {
        if (p == 0) throw std::invalid_argument("ground set must be non-empty");
    }
    std::size_t size() const { return p_; }
    bool operator==(const GroundSet&) const = default;

private:
    std::size_t p_;
};

/// Indicator of a subset A of the ground set, stored as one byte per element.
class SubsetMask {
public:
    SubsetMask() = default;
    explicit SubsetMask(std::size_t p, bool full = false) : bits_(p, full ? 1 : 0) {}

    static SubsetMask from_bits(std::size_t p, std::uint64_t bits)
    {
        SubsetMask m(p);
        for (std::size_t i = 0; i < p && i < 64; ++i) m.bits_[i] = (bits >> i) & 1u;
        return m;
    }
    static SubsetMask from_indices(std::size_t p, const std::vector<int>& idx)
    {
        SubsetMask m(p);
        for (int i : idx) m.insert(static_cast<std::size_t>(i));
        return m;
    }
    static SubsetMask from_indices(std::size_t p, std::initializer_list<int> idx)
    {
        return from_indices(p, std::vector<int>(idx));
    }

    std::size_t size() const { return bits_.size(); }
    bool contains(std::size_t i) const { return bits_[i] != 0; }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void insert(std::size_t i)
    {
        if (i >= bits_.size()) throw std::out_of_range("subset index out of range");
        bits_[i] = 1;
    }
    void erase(std::size_t i) { bits_[i] = 0; }
    void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto b : bits_) c += b;
        return c;
    }
    bool empty() const { return count() == 0; }
    bool full() const { return count() == bits_.size(); }

    std::uint64_t to_bits() const
    {
        if (bits_.size() > 64) throw guard_error("subset does not fit in 64 bits");
        std::uint64_t r = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) r |= (std::uint64_t{1} << i);
        return r;
    }

    std::vector<int> indices() const
    {
        std::vector<int> r;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) r.push_back(static_cast<int>(i));
        return r;
    }

    SubsetMask complement() const
    {
        SubsetMask r(*this);
        for (auto& b : r.bits_) b = b ? 0 : 1;
        return r;
    }

    bool subset_of(const SubsetMask& o) const
    {
        check_same(o);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !o.bits_[i]) return false;
        return true;
    }

    SubsetMask& operator|=(const SubsetMask& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
        return *this;
    }
    SubsetMask& operator&=(const SubsetMask& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
        return *this;
    }
    SubsetMask& operator-=(const SubsetMask& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (o.bits_[i]) bits_[i] = 0;
        return *this;
    }
    friend SubsetMask operator|(SubsetMask a, const SubsetMask& b) { return a |= b; }
    friend SubsetMask operator&(SubsetMask a, const SubsetMask& b) { return a &= b; }
    friend SubsetMask operator-(SubsetMask a, const SubsetMask& b) { return a -= b; }
    bool operator==(const SubsetMask&) const = default;

    /// 1-based set notation, e.g. "{1,3}".
    std::string to_string() const
    {
        std::ostringstream os;
        os << '{';
        bool first = true;
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            if (!bits_[i]) continue;
            if (!first) os << ',';
            os << (i + 1);
            first = false;
        }
        os << '}';
        return os.str();
    }

private:
    void check_same(const SubsetMask& o) const
    {
        if (o.bits_.size() != bits_.size())
            throw std::invalid_argument("subset masks over different ground sets");
    }

    std::vector<std::uint8_t> bits_;
};

} // namespace subreg
