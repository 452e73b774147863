#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgm {

/// One cosine frequency u ∈ ℤ≥0^m.
using Frequency = std::vector<int>;

/// Finite set of nonzero, distinct cosine frequencies of a common dimension.
///
/// Frequencies are kept in colexicographic order (last coordinate most
/// significant, then the one before it, ...). For m = 3 this reproduces the
/// column order (1,0,0), (2,0,0), (0,1,0), (1,1,0), ... used throughout the
/// numerical experiments, so parameter indices are stable across runs and
/// visible in every JSON output.
class FrequencySet {
public:
    FrequencySet() = default;

    /// Validates and sorts. Throws InvalidArgument on a zero vector, a
    /// negative entry, a wrong length or a duplicate.
    FrequencySet(int dim, std::vector<Frequency> freqs);

    /// All nonzero u with max-norm ≤ 2 and 1-norm ≤ 3; |U| = m(m+1)(m+5)/6.
    static FrequencySet standard(int dim);

    int dim() const { return dim_; }
    std::size_t size() const { return freqs_.size(); }
    bool empty() const { return freqs_.empty(); }
    const Frequency& operator[](std::size_t i) const { return freqs_[i]; }
    const std::vector<Frequency>& freqs() const { return freqs_; }
    auto begin() const { return freqs_.begin(); }
    auto end() const { return freqs_.end(); }

    /// max_u ‖u‖∞.
    int max_order() const;

    /// Position of u in the ordering, or size() if absent.
    std::size_t index_of(std::span<const int> u) const;

    bool operator==(const FrequencySet&) const = default;

private:
    int dim_ = 0;
    std::vector<Frequency> freqs_;
};

/// ‖u‖² = Σ u_j².
int squared_norm(std::span<const int> u);

/// |σ(u)|, the number of nonzero coordinates.
int support_size(std::span<const int> u);

/// Strict colexicographic comparison used to order a FrequencySet.
bool colex_less(std::span<const int> a, std::span<const int> b);

}  // namespace sgm
