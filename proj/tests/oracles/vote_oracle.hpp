#pragma once

// Weighted majority voting written line by line from the published pseudocode:
// two running scores, a cosine sum over the three supporting statements, then each
// statement adds cos_i / sum * relevance_i to the score of its verdict, and
// score_fake >= score_real labels the tweet fake.
//
// The pseudocode divides by the cosine sum without a guard. Here a zero sum falls
// back to two-of-three, and negative cosines are lifted to zero first, matching
// the toolkit's documented handling of those two cases.

#include <array>

namespace oracle {

struct VoteOutcome {
    bool fake = false;
    double score_fake = 0.0;
    double score_real = 0.0;
    bool fallback = false;
};

inline VoteOutcome algorithm_1(const std::array<bool, 3>& verdict_is_fake,
                               const std::array<double, 3>& cos_in,
                               const std::array<double, 3>& relevant_score) {
    VoteOutcome out;
    double score_fake = 0;
    double score_real = 0;
    double cosine_similarity_sum = 0;
    std::array<double, 3> cosine_sim{};
    for (int i = 0; i < 3; ++i) {
        const double sim = cos_in[i] < 0 ? 0.0 : cos_in[i];
        cosine_similarity_sum = cosine_similarity_sum + sim;
        cosine_sim[i] = sim;
    }
    if (cosine_similarity_sum <= 1e-9) {
        int fakes = 0;
        for (bool f : verdict_is_fake) fakes += f;
        out.fake = fakes >= 2;
        out.fallback = true;
        return out;
    }
    for (int i = 0; i < 3; ++i) {
        if (verdict_is_fake[i]) {
            score_fake = score_fake + ((cosine_sim[i] / cosine_similarity_sum) * relevant_score[i]);
        } else {
            score_real = score_real + ((cosine_sim[i] / cosine_similarity_sum) * relevant_score[i]);
        }
    }
    out.fake = score_fake >= score_real;
    out.score_fake = score_fake;
    out.score_real = score_real;
    return out;
}

}  // namespace oracle
