#include "sgm/frequency_set.hpp"

#include "sgm/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sgm {

int squared_norm(std::span<const int> u) {
    return std::inner_product(u.begin(), u.end(), u.begin(), 0);
}

int support_size(std::span<const int> u) {
    return static_cast<int>(std::count_if(u.begin(), u.end(), [](int v) { return v != 0; }));
}

bool colex_less(std::span<const int> a, std::span<const int> b) {
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

FrequencySet::FrequencySet(int dim, std::vector<Frequency> freqs) : dim_(dim), freqs_(std::move(freqs)) {
    if (dim_ < 1) {
        throw InvalidArgument("frequency set dimension must be positive");
    }
    for (const auto& u : freqs_) {
        if (static_cast<int>(u.size()) != dim_) {
            throw InvalidArgument("frequency has " + std::to_string(u.size()) + " components, expected " +
                                  std::to_string(dim_));
        }
        if (std::any_of(u.begin(), u.end(), [](int v) { return v < 0; })) {
            throw InvalidArgument("frequency components must be nonnegative");
        }
        if (std::all_of(u.begin(), u.end(), [](int v) { return v == 0; })) {
            throw InvalidArgument("the zero frequency is not identifiable");
        }
    }
    std::sort(freqs_.begin(), freqs_.end(),
              [](const Frequency& a, const Frequency& b) { return colex_less(a, b); });
    if (std::adjacent_find(freqs_.begin(), freqs_.end()) != freqs_.end()) {
        throw InvalidArgument("duplicate frequency");
    }
}

FrequencySet FrequencySet::standard(int dim) {
    if (dim < 1) {
        throw InvalidArgument("dimension must be positive");
    }
    std::vector<Frequency> out;
    Frequency u(dim, 0);
    // Odometer over {0,1,2}^m, pruned by the 1-norm budget.
    while (true) {
        int l1 = std::accumulate(u.begin(), u.end(), 0);
        if (l1 > 0 && l1 <= 3) {
            out.push_back(u);
        }
        int j = 0;
        while (j < dim && u[j] == 2) {
            u[j] = 0;
            ++j;
        }
        if (j == dim) {
            break;
        }
        ++u[j];
    }
    return FrequencySet(dim, std::move(out));
}

int FrequencySet::max_order() const {
    int best = 0;
    for (const auto& u : freqs_) {
        best = std::max(best, *std::max_element(u.begin(), u.end()));
    }
    return best;
}

std::size_t FrequencySet::index_of(std::span<const int> u) const {
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
        if (std::equal(u.begin(), u.end(), freqs_[i].begin(), freqs_[i].end())) {
            return i;
        }
    }
    return freqs_.size();
}

}  // namespace sgm
