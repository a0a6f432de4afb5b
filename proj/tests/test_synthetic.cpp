#include "doctest.h"

#include <cmath>

#include "skillmap/errors.hpp"
#include "skillmap/synthetic.hpp"

using namespace skillmap;

TEST_CASE("none skill count satisfies the fraction invariant minimally") {
    CHECK(none_skill_count(20, 0.0) == 0);
    for (int m : {10, 20, 24, 50}) {
        for (double f : {0.1, 0.25, 0.3, 0.5}) {
            const int n = none_skill_count(m, f);
            CHECK(n >= static_cast<int>(std::ceil(f * (m + n))));
            if (n > 0) {
                const int prev = n - 1;
                CHECK(prev < static_cast<int>(std::ceil(f * (m + prev))));
            }
        }
    }
}

TEST_CASE("generation is deterministic per seed") {
    SyntheticConfig sc;
    sc.latent_skills = 8;
    sc.students_per_platform = 20;
    sc.interactions_per_student = 15;
    SyntheticPair p1 = generate_synthetic_pair(sc, 5);
    SyntheticPair p2 = generate_synthetic_pair(sc, 5);
    CHECK(p1.corpus_a.skills == p2.corpus_a.skills);
    REQUIRE(p1.corpus_a.interactions.size() == p2.corpus_a.interactions.size());
    for (std::size_t i = 0; i < p1.corpus_a.interactions.size(); ++i) {
        CHECK(p1.corpus_a.interactions[i].problem_id == p2.corpus_a.interactions[i].problem_id);
        CHECK(p1.corpus_a.interactions[i].skill_ids == p2.corpus_a.interactions[i].skill_ids);
    }
    for (const auto& [id, prob] : p1.corpus_a.problems) {
        CHECK(prob.raw_text == p2.corpus_a.problems.at(id).raw_text);
    }

    SyntheticPair p3 = generate_synthetic_pair(sc, 6);
    bool differs = false;
    for (const auto& [id, prob] : p1.corpus_a.problems) {
        if (prob.raw_text != p3.corpus_a.problems.at(id).raw_text) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("granularity controls skill counts and pairing") {
    SyntheticConfig sc;
    sc.latent_skills = 10;
    sc.granularity_a = 2.0;
    sc.granularity_b = 1.0;
    sc.students_per_platform = 10;
    sc.interactions_per_student = 10;
    SyntheticPair p = generate_synthetic_pair(sc, 1);
    CHECK(p.corpus_a.skills.size() == 20);
    CHECK(p.corpus_b.skills.size() == 10);
    // every latent: 2 fine skills x 1 coarse skill
    CHECK(p.equivalences.pairs.size() == 20);
    p.equivalences.validate();

    sc.granularity_b = 1.2;  // round(10 * 1.2) = 12
    SyntheticPair q = generate_synthetic_pair(sc, 1);
    CHECK(q.corpus_b.skills.size() == 12);
}

TEST_CASE("none fraction adds unmatched skills on both sides") {
    SyntheticConfig sc;
    sc.latent_skills = 14;
    sc.none_fraction = 0.3;
    sc.students_per_platform = 30;
    sc.interactions_per_student = 20;
    SyntheticPair p = generate_synthetic_pair(sc, 3);
    const int n = none_skill_count(14, 0.3);
    CHECK(static_cast<int>(p.equivalences.none_skills_src.size()) == n);
    CHECK(static_cast<int>(p.equivalences.none_skills_dst.size()) == n);
    CHECK(p.corpus_a.skills.size() == 14u + n);
    for (const auto& s : p.equivalences.none_skills_src) {
        CHECK(p.corpus_a.skills.count(s) == 1);
        CHECK(p.equivalences.destinations_of(s).empty());
    }
    p.equivalences.validate();
}

TEST_CASE("invalid configurations are rejected") {
    SyntheticConfig sc;
    sc.latent_skills = 0;
    CHECK_THROWS_AS(generate_synthetic_pair(sc, 1), ConfigError);
    sc.latent_skills = 5;
    sc.none_fraction = 1.5;
    CHECK_THROWS_AS(generate_synthetic_pair(sc, 1), ConfigError);
    sc.none_fraction = 0.0;
    sc.vocabulary_size = 2;
    CHECK_THROWS_AS(generate_synthetic_pair(sc, 1), ConfigError);
}
