#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ltml/class_stats.hpp"
#include "ltml/csv.hpp"
#include "ltml/losses.hpp"
#include "ltml/rng.hpp"

using namespace ltml;

namespace {

LabelMatrix labels_with_counts(std::int64_t n_total, const std::vector<std::int64_t>& counts) {
    LabelMatrix y(n_total, counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c)
        for (std::int64_t r = 0; r < counts[c]; ++r) y(r, c) = 1;
    return y;
}

}  // namespace

TEST_CASE("bias term matches the class prior") {
    auto stats = compute_class_stats(labels_with_counts(100, {50, 10, 30}));
    CHECK(stats.total_samples == 100);
    CHECK(stats.bias[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(stats.bias[1] == doctest::Approx(std::log(9.0)).epsilon(1e-12));

    // sigmoid(-v_i) = n_i/N
    for (std::size_t c = 0; c < 3; ++c) {
        const double prior = static_cast<double>(stats.positives_per_class[c]) / 100.0;
        CHECK(sigmoid(-stats.bias[c]) ==
              doctest::Approx(prior).epsilon(1e-12));
    }
}

TEST_CASE("degenerate classes are rejected") {
    CHECK_THROWS_AS(compute_class_stats(labels_with_counts(100, {50, 100})), DegenerateClass);
    CHECK_THROWS_AS(compute_class_stats(labels_with_counts(100, {50, 0})), DegenerateClass);
}

TEST_CASE("class stats is deterministic and partition covers all classes") {
    auto y = labels_with_counts(1000, {600, 400, 200, 100, 50, 20});
    auto a = compute_class_stats(y);
    auto b = compute_class_stats(y);
    CHECK(a.bias == b.bias);
    CHECK(a.partition.size() == 6);
    CHECK(a.partition.front() == Subset::Head);
    CHECK(a.partition.back() == Subset::Tail);
    int head = 0, medium = 0, tail = 0;
    for (auto s : a.partition) {
        if (s == Subset::Head) ++head;
        if (s == Subset::Medium) ++medium;
        if (s == Subset::Tail) ++tail;
    }
    CHECK(head + medium + tail == 6);
    CHECK(head == 2);
    CHECK(tail == 2);
}

TEST_CASE("explicit partition thresholds") {
    PartitionConfig cfg;
    cfg.t_head = 500;
    cfg.t_tail = 50;
    auto stats = compute_class_stats(labels_with_counts(1000, {600, 400, 200, 100, 50, 20}), cfg);
    CHECK(stats.partition[0] == Subset::Head);
    CHECK(stats.partition[1] == Subset::Medium);
    CHECK(stats.partition[4] == Subset::Tail);
}

TEST_CASE("shift_logits") {
    auto stats = compute_class_stats(labels_with_counts(100, {10, 50, 20}));
    LogitMatrix p(2, 3);
    p(0, 0) = 0.0;
    p(1, 1) = 3.25;
    p(0, 2) = stats.bias[2];
    auto u = shift_logits(p, stats);

    // p = 0 calibrates to the prior
    CHECK(sigmoid(u(0, 0)) == doctest::Approx(0.1).epsilon(1e-12));
    // v = 0 for a balanced class
    CHECK(u(1, 1) == 3.25);
    // exact cancellation at p = v
    CHECK(u(0, 2) == 0.0);

    LogitMatrix bad(2, 2);
    CHECK_THROWS_AS(shift_logits(bad, stats), ShapeMismatch);
}

TEST_CASE("class stats JSON round-trip") {
    auto stats = compute_class_stats(labels_with_counts(100, {50, 10, 30}));
    auto back = ClassStats::from_json(stats.to_json());
    CHECK(back.total_samples == stats.total_samples);
    CHECK(back.positives_per_class == stats.positives_per_class);
    CHECK(back.bias == stats.bias);
    CHECK(back.partition == stats.partition);
}

TEST_CASE("rng streams are reproducible and seed-sensitive") {
    RngState a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
    }
    CHECK(a.next_u64() != c.next_u64());

    RngState u(7);
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        mean += x;
    }
    CHECK(mean / 10000 == doctest::Approx(0.5).epsilon(0.02));

    RngState g(9);
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = g.normal();
        m1 += x;
        m2 += x * x;
    }
    CHECK(std::abs(m1 / 10000) < 0.05);
    CHECK(m2 / 10000 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("matrix CSV round-trip") {
    Matrix m(3, 2);
    RngState rng(1);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * 1e3;
    const auto path = std::filesystem::temp_directory_path() / "ltml_test_matrix.csv";
    csv::write_matrix(path, m, csv::default_header("f", 2));
    auto back = csv::read_matrix(path);
    CHECK(back == m);
    std::filesystem::remove(path);
}
