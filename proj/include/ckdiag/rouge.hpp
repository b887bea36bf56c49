#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ckdiag/text.hpp"

namespace ckdiag {

enum class RougeVariant { rouge1, rougeL };

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    RougeVariant variant = RougeVariant::rouge1;
};

namespace detail {

inline double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

inline RougeScore rouge_from_overlap(double overlap, std::size_t n_cand, std::size_t n_ref,
                                     RougeVariant variant) {
    RougeScore s;
    s.variant = variant;
    s.precision = n_cand > 0 ? overlap / static_cast<double>(n_cand) : 0.0;
    s.recall = n_ref > 0 ? overlap / static_cast<double>(n_ref) : 0.0;
    s.f1 = f1_of(s.precision, s.recall);
    return s;
}

}  // namespace detail

// Unigram overlap with clipped (multiset) matching over lowercased
// alphanumeric tokens.
inline RougeScore rouge_1(const std::string& candidate, const std::string& reference) {
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    std::map<std::string, std::size_t> ref_counts;
    for (const auto& t : ref) ++ref_counts[t];
    std::size_t overlap = 0;
    for (const auto& t : cand) {
        auto it = ref_counts.find(t);
        if (it != ref_counts.end() && it->second > 0) {
            ++overlap;
            --it->second;
        }
    }
    return detail::rouge_from_overlap(static_cast<double>(overlap), cand.size(), ref.size(),
                                      RougeVariant::rouge1);
}

// Token-level longest common subsequence via the standard DP table.
inline RougeScore rouge_l(const std::string& candidate, const std::string& reference) {
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    const std::size_t n = cand.size(), m = ref.size();
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            cur[j] = cand[i - 1] == ref[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return detail::rouge_from_overlap(static_cast<double>(prev[m]), n, m, RougeVariant::rougeL);
}

}  // namespace ckdiag
