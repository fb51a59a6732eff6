#include <doctest.h>

#include <cmath>

#include "pcclsm/error.hpp"
#include "pcclsm/evaluation.hpp"
#include "pcclsm/random.hpp"
#include "support/synthetic.hpp"

using namespace pcclsm;

namespace {

LabelVector labels(std::initializer_list<std::uint8_t> v) { return LabelVector(std::vector<std::uint8_t>(v)); }

LabelVector random_labels(Rng& rng, std::size_t n, double p) {
    std::vector<std::uint8_t> y(n);
    for (auto& v : y) v = rng.uniform() < p ? 1 : 0;
    return LabelVector(y);
}

LabelVector flipped(const LabelVector& y) {
    std::vector<std::uint8_t> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] == 0 ? 1 : 0;
    return LabelVector(out);
}

std::vector<ClassifierSpec> all_defaults() {
    std::vector<ClassifierSpec> specs;
    for (auto kind : {ClassifierKind::knn, ClassifierKind::naive_bayes, ClassifierKind::decision_tree,
                      ClassifierKind::random_forest, ClassifierKind::svm}) {
        specs.push_back(ClassifierSpec::defaults(kind));
    }
    return specs;
}

void check_accuracy_identity(const ClassifierResult& r) {
    const auto& c = r.counts;
    const double p = static_cast<double>(c.tp + c.fn);
    const double n = static_cast<double>(c.tn + c.fp);
    REQUIRE(r.scores.accuracy);
    const double recall_part = r.scores.recall ? *r.scores.recall * p : 0.0;
    const double spec_part = r.scores.specificity ? *r.scores.specificity * n : 0.0;
    CHECK(std::abs(*r.scores.accuracy - (recall_part + spec_part) / (p + n)) <= 1e-12);
}

}  // namespace

TEST_SUITE("confusion") {
    TEST_CASE("hand examples") {
        const auto c = confusion(labels({1, 1, 0, 0}), labels({1, 0, 0, 1}));
        CHECK(c == ConfusionCounts{1, 1, 1, 1});
        const auto y = labels({1, 0, 1, 1, 0});
        const auto same = confusion(y, y);
        CHECK(same.fn == 0);
        CHECK(same.fp == 0);
        CHECK(same.tp == 3);
        CHECK(same.tn == 2);
    }

    TEST_CASE("random 1000-length pairs match an element loop") {
        Rng rng(1000);
        for (int trial = 0; trial < 10; ++trial) {
            const auto t = random_labels(rng, 1000, 0.6);
            const auto p = random_labels(rng, 1000, 0.4);
            ConfusionCounts expected;
            for (std::size_t i = 0; i < 1000; ++i) {
                if (t[i] == 1 && p[i] == 1) ++expected.tp;
                if (t[i] == 1 && p[i] == 0) ++expected.fn;
                if (t[i] == 0 && p[i] == 1) ++expected.fp;
                if (t[i] == 0 && p[i] == 0) ++expected.tn;
            }
            const auto c = confusion(t, p);
            CHECK(c == expected);
            CHECK(c.total() == 1000);
        }
    }

    TEST_CASE("length mismatch is rejected") {
        CHECK_THROWS_AS(confusion(labels({1, 0}), labels({1})), UsageError);
    }
}

TEST_SUITE("metrics") {
    TEST_CASE("balanced counts give one half everywhere") {
        const auto m = metrics({1, 1, 1, 1});
        for (const auto& v : {m.recall, m.precision, m.specificity, m.f_score, m.accuracy}) {
            REQUIRE(v);
            CHECK(*v == 0.5);
        }
    }

    TEST_CASE("0/0 ratios are undefined, never NaN") {
        const auto m = metrics({0, 0, 2, 3});
        CHECK(!m.recall);
        REQUIRE(m.precision);
        CHECK(*m.precision == 0.0);
        CHECK(!m.f_score);
        CHECK(!metrics({0, 3, 0, 2}).precision);
        REQUIRE(m.specificity);
        CHECK(*m.specificity == doctest::Approx(0.6));
        REQUIRE(m.accuracy);
        CHECK(*m.accuracy == doctest::Approx(0.6));
        CHECK_THROWS_AS(metrics({0, 0, 0, 0}), UsageError);
    }

    TEST_CASE("formula oracle on assorted counts") {
        for (const ConfusionCounts c : {ConfusionCounts{5, 3, 2, 10}, ConfusionCounts{40, 1, 7, 0},
                                        ConfusionCounts{3, 0, 0, 9}}) {
            const auto m = metrics(c);
            const double tp = c.tp, fn = c.fn, fp = c.fp, tn = c.tn;
            const double recall = tp / (tp + fn);
            const double precision = tp / (tp + fp);
            CHECK(*m.recall == doctest::Approx(recall).epsilon(1e-15));
            CHECK(*m.precision == doctest::Approx(precision).epsilon(1e-15));
            CHECK(*m.f_score == doctest::Approx(2 * precision * recall / (precision + recall)).epsilon(1e-15));
            CHECK(*m.accuracy == doctest::Approx((tp + tn) / (tp + fn + fp + tn)).epsilon(1e-15));
            if (tn + fp > 0) CHECK(*m.specificity == doctest::Approx(tn / (tn + fp)).epsilon(1e-15));
        }
    }

    TEST_CASE("property: perfect prediction and class swap") {
        Rng rng(77);
        for (int trial = 0; trial < 50; ++trial) {
            auto t = random_labels(rng, 50, 0.5);
            auto p = random_labels(rng, 50, 0.5);
            if (t.count(0) == 0 || t.count(1) == 0) continue;
            const auto perfect = metrics(confusion(t, t));
            CHECK(*perfect.accuracy == 1.0);

            const auto c = confusion(t, p);
            const auto s = confusion(flipped(t), flipped(p));
            CHECK(s.tp == c.tn);
            CHECK(s.tn == c.tp);
            CHECK(s.fp == c.fn);
            CHECK(s.fn == c.fp);
            const auto a = metrics(c);
            const auto b = metrics(s);
            CHECK(a.recall == b.specificity);
            CHECK(a.specificity == b.recall);
        }
    }
}

TEST_SUITE("configuration tags") {
    TEST_CASE("tags round-trip and declare their stages") {
        for (auto tag : {ConfigurationTag::baseline, ConfigurationTag::pcc_only, ConfigurationTag::lsm_only,
                         ConfigurationTag::pcc_lsm}) {
            CHECK(parse_configuration_tag(to_string(tag)) == tag);
        }
        CHECK(!uses_selection(ConfigurationTag::baseline));
        CHECK(uses_selection(ConfigurationTag::pcc_only));
        CHECK(!uses_distortion(ConfigurationTag::pcc_only));
        CHECK(uses_distortion(ConfigurationTag::lsm_only));
        CHECK(uses_selection(ConfigurationTag::pcc_lsm));
        CHECK(uses_distortion(ConfigurationTag::pcc_lsm));
        CHECK(!parse_configuration_tag("lsm"));
    }
}

TEST_SUITE("run_configuration") {
    TEST_CASE("one knn spec on a 4-point toy set") {
        FeatureMatrix x({"a"}, std::vector<double>{0, 1, 10, 11});
        const auto y = labels({0, 0, 1, 1});
        ClassifierSpec spec = ClassifierSpec::defaults(ClassifierKind::knn);
        spec.hyperparameters["k"] = 1;
        const auto report = run_configuration(ConfigurationTag::baseline, x, y, x, y, {spec});
        REQUIRE(report.results.size() == 1);
        const auto& r = report.results[0];
        for (const auto& v : {r.scores.recall, r.scores.precision, r.scores.specificity, r.scores.f_score,
                              r.scores.accuracy}) {
            CHECK(v.has_value());
        }
        CHECK(*r.scores.accuracy == 1.0);
        CHECK(report.train_rows == 4);
        CHECK(report.test_rows == 4);
        CHECK(report.columns == std::vector<std::string>{"a"});
        CHECK(r.train_time_s >= 0.0);
        CHECK(r.test_time_s >= 0.0);
    }

    TEST_CASE("five defaults on separable data, with the accuracy identity") {
        const auto data = synthetic::separable(500, 8);
        const auto split = stratified_split(data.x, data.y, 0.3, 42);
        RunOptions opt;
        opt.timing_repeats = 1;
        const auto report = run_configuration(ConfigurationTag::pcc_only, split.train_x, split.train_y,
                                              split.test_x, split.test_y, all_defaults(), opt);
        CHECK(report.tag == ConfigurationTag::pcc_only);
        REQUIRE(report.results.size() == 5);
        for (const auto& r : report.results) {
            CAPTURE(to_string(r.spec.kind));
            CHECK(*r.scores.accuracy >= 0.95);
            CHECK(r.counts.total() == split.test_y.size());
            check_accuracy_identity(r);
        }
    }

    TEST_CASE("empty spec list is rejected") {
        FeatureMatrix x({"a"}, std::vector<double>{0, 1});
        const auto y = labels({0, 1});
        CHECK_THROWS_AS(run_configuration(ConfigurationTag::baseline, x, y, x, y, {}), UsageError);
    }

    TEST_CASE("knn total time grows with nested training subsets") {
        const auto data = synthetic::separable(4000, 12);
        const auto split = stratified_split(data.x, data.y, 0.25, 3);
        const auto small_rows = stratified_sample(split.train_y, 300, 3);
        const auto spec = ClassifierSpec::defaults(ClassifierKind::knn);
        const auto small = run_configuration(ConfigurationTag::baseline, split.train_x.select_rows(small_rows),
                                             split.train_y.select(small_rows), split.test_x, split.test_y, {spec});
        const auto full = run_configuration(ConfigurationTag::baseline, split.train_x, split.train_y, split.test_x,
                                            split.test_y, {spec});
        const auto total = [](const EvaluationReport& r) {
            return r.results[0].train_time_s + r.results[0].test_time_s;
        };
        CHECK(total(small) >= 0.0);
        CHECK(total(full) >= total(small));
    }
}

TEST_SUITE("compare_utility") {
    EvaluationReport toy(ConfigurationTag tag, std::vector<ConfusionCounts> counts) {
        EvaluationReport r;
        r.tag = tag;
        r.test_rows = counts.front().total();
        const ClassifierKind kinds[] = {ClassifierKind::knn, ClassifierKind::svm};
        for (std::size_t i = 0; i < counts.size(); ++i) {
            ClassifierResult cr;
            cr.spec = ClassifierSpec::defaults(kinds[i]);
            cr.counts = counts[i];
            cr.scores = metrics(counts[i]);
            r.results.push_back(cr);
        }
        return r;
    }

    TEST_CASE("identical reports have zero deltas") {
        const auto a = toy(ConfigurationTag::baseline, {{40, 10, 5, 45}, {30, 20, 10, 40}});
        const auto u = compare_utility(a, a);
        REQUIRE(u.deltas.size() == 2);
        for (const auto& d : u.deltas) CHECK(d.delta == 0.0);
        CHECK(u.max_abs_delta == 0.0);
    }

    TEST_CASE("one classifier improved by 0.02") {
        const auto a = toy(ConfigurationTag::baseline, {{40, 10, 5, 45}, {30, 20, 10, 40}});
        const auto b = toy(ConfigurationTag::pcc_lsm, {{42, 8, 5, 45}, {30, 20, 10, 40}});
        const auto u = compare_utility(a, b);
        CHECK(u.before == ConfigurationTag::baseline);
        CHECK(u.after == ConfigurationTag::pcc_lsm);
        CHECK(u.deltas[0].classifier == "knn");
        CHECK(u.deltas[0].delta == doctest::Approx(0.02).epsilon(1e-12));
        CHECK(u.deltas[1].delta == 0.0);
        CHECK(u.max_abs_delta == doctest::Approx(0.02).epsilon(1e-12));
    }

    TEST_CASE("mismatched classifier sets are rejected") {
        const auto a = toy(ConfigurationTag::baseline, {{40, 10, 5, 45}, {30, 20, 10, 40}});
        const auto b = toy(ConfigurationTag::pcc_lsm, {{40, 10, 5, 45}});
        CHECK_THROWS_AS(compare_utility(a, b), UsageError);
    }
}
