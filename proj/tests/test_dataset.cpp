#include <algorithm>
#include <cmath>
#include <set>

#include "cnfl/dataset.hpp"
#include "cnfl/encoders.hpp"
#include "cnfl/rng.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cnfl;

namespace {

DatasetOptions small_options(std::size_t pos, std::size_t neg) {
    DatasetOptions o;
    o.positives = pos;
    o.negatives = neg;
    o.generator = "random3cnf";
    o.formula_id = "t";
    return o;
}

std::multiset<std::string> row_multiset(const Dataset& d) {
    std::multiset<std::string> out;
    for (const auto& s : d.samples) out.insert(s.features.to_string() + (s.label ? "1" : "0"));
    return out;
}

}  // namespace

TEST_CASE("gen_negative") {
    const auto unsat = parse_dimacs("p cnf 3 2\n1 0\n-1 0\n");
    const auto all = gen_negative(unsat, 25, 1, 25);
    CHECK(all.size() == 25);
    for (const auto& s : all) CHECK_FALSE(s.label);

    CHECK_THROWS_AS(gen_negative(parse_dimacs("p cnf 3 0\n"), 1, 1, 1000), TooFewNegatives);
    CHECK_THROWS_AS(gen_negative(unsat, 0, 1, 10), ContractError);

    const auto f = random_3cnf(20, 40, 5);
    for (const auto& s : gen_negative(f, 200, 3, 100000)) CHECK_FALSE(evaluate(f, s.features));
    CHECK(gen_negative(f, 50, 9, 100000) == gen_negative(f, 50, 9, 100000));
}

TEST_CASE("gen_negative rejection rate matches the model density") {
    std::uint64_t seed = 13;
    CnfFormula f = random_3cnf(20, 91, seed);
    while (solve(f).status != SolveStatus::Sat) f = random_3cnf(20, 91, ++seed);
    const double count = static_cast<double>(*count_models(f).count);
    const double p = count / std::pow(2.0, 20);
    const std::uint64_t trials = 100000;
    // Asking for every trial to succeed cannot complete; the shortfall is the rejection count.
    std::size_t kept = 0;
    try {
        kept = gen_negative(f, trials, 21, trials).size();
    } catch (const TooFewNegatives& e) {
        const std::string msg = e.what();
        kept = std::stoull(msg.substr(std::string("found ").size()));
    }
    const double rejected = static_cast<double>(trials - kept);
    const double sigma = std::sqrt(static_cast<double>(trials) * p * (1.0 - p));
    CHECK(std::abs(rejected - static_cast<double>(trials) * p) <= 3.0 * sigma);
}

TEST_CASE("gen_positive") {
    CHECK_THROWS_AS(gen_positive(parse_dimacs("p cnf 2 2\n1 0\n-1 0\n"), 5, 1, {}), PositivesUnavailable);

    // x1 and x2 forced, x3..x5 cover 7 of 8 patterns.
    const auto seven = parse_dimacs("p cnf 5 3\n1 0\n-2 0\n3 4 5 0\n");
    REQUIRE(oracle::count(seven) == 7);
    const auto pos = gen_positive(seven, 500, 1, {});
    REQUIRE(pos.samples.size() == 7);
    std::set<std::uint64_t> masks;
    for (const auto& s : pos.samples) {
        CHECK(s.label);
        CHECK(evaluate(seven, s.features));
        masks.insert(oracle::mask_of(s.features));
    }
    CHECK(masks.size() == 7);

    const auto f = random_3cnf(20, 40, 2);
    REQUIRE(*count_models(f).count >= 500);
    const auto many = gen_positive(f, 500, 4, {});
    CHECK(many.samples.size() == 500);
    for (const auto& s : many.samples) CHECK(evaluate(f, s.features));
}

TEST_CASE("build_dataset") {
    const auto lv = constrainedness_level(20, 0);
    CnfFormula f = random_3cnf(20, lv.clause_count, 1);
    std::uint64_t seed = 1;
    while (solve(f).status != SolveStatus::Sat) f = random_3cnf(20, lv.clause_count, ++seed);

    const auto d = build_dataset(f, 42, small_options(500, 500));
    CHECK(d.num_vars == 20);
    CHECK(d.negatives() == 500);
    CHECK(d.positives() >= 1);
    CHECK(d.positives() <= 500);
    CHECK(count_mislabeled(f, d) == 0);
    CHECK(*d.provenance.find("seed") == "42");
    CHECK(*d.provenance.find("positives") == std::to_string(d.positives()));
    CHECK(*d.provenance.find("generator") == "random3cnf");
    CHECK(d.provenance.find("sampler_mode") != nullptr);

    const auto again = build_dataset(f, 42, small_options(500, 500));
    CHECK(write_csv(d) == write_csv(again));
    CHECK(write_csv(build_dataset(f, 43, small_options(500, 500))) != write_csv(d));

    // The shuffle permutes the unshuffled concatenation.
    const auto pos = gen_positive(f, 500, derive_seed(42, {1}), {});
    const auto neg = gen_negative(f, 500, derive_seed(42, {2}), 500000);
    Dataset unshuffled;
    unshuffled.num_vars = 20;
    unshuffled.samples = pos.samples;
    unshuffled.samples.insert(unshuffled.samples.end(), neg.begin(), neg.end());
    CHECK(row_multiset(unshuffled) == row_multiset(d));
    CHECK(unshuffled.samples != d.samples);

    CHECK_THROWS_AS(build_dataset(f, 1, small_options(0, 5)), ContractError);
}

TEST_CASE("CSV format") {
    Dataset one;
    one.num_vars = 1;
    one.samples.push_back({Assignment::from_string("1"), true});
    CHECK(write_csv(one) == "x1,y\n1,1\n");
    CHECK(read_csv(std::string("x1,y\n1,1\n")) == one);

    Dataset tagged = one;
    tagged.provenance.set("seed", "7");
    CHECK(write_csv(tagged) == "# seed=7\nx1,y\n1,1\n");
    CHECK(read_csv(write_csv(tagged)) == tagged);

    for (std::uint64_t i = 0; i < 50; ++i) {
        const std::size_t v = 3 + i % 12;
        const auto f = random_3cnf(v, v * 2, i);
        if (solve(f).status != SolveStatus::Sat) continue;
        auto opts = small_options(20, 20);
        opts.formula_id = "f" + std::to_string(i);
        Dataset d;
        try {
            d = build_dataset(f, i, opts);
        } catch (const TooFewNegatives&) {
            continue;
        }
        REQUIRE(read_csv(write_csv(d)) == d);
    }
}

TEST_CASE("CSV errors name the row") {
    auto line_of = [](const std::string& text) {
        try {
            read_csv(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("x1,x2,y\n1,0,1\n1,0\n") == 3);
    CHECK(line_of("x1,x2,y\n1,0,1,1\n") == 2);
    CHECK(line_of("x1,x2,y\n1,2,1\n") == 2);
    CHECK(line_of("x1,x3,y\n") == 1);
    CHECK(line_of("# a=b\nx1,z\n") == 2);
    CHECK_THROWS_AS(read_csv(std::string("")), ParseError);
    CHECK_THROWS_WITH_AS(read_csv_file("/nonexistent/d.csv"), doctest::Contains("/nonexistent/d.csv"),
                         std::runtime_error);
}
