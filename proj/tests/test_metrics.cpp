#include <doctest.h>

#include <cmath>
#include <vector>

#include "fanetkoop/metrics.hpp"

using namespace fanetkoop;

namespace {

std::vector<Eigen::MatrixXd> random_sequence(Rng& rng, int steps, int rows, int cols) {
    std::vector<Eigen::MatrixXd> seq;
    for (int t = 0; t < steps; ++t) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = from_db(rng.uniform(-30, 30));
        seq.push_back(std::move(m));
    }
    return seq;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("prediction_error: exact prediction scores zero") {
    Rng rng(61);
    auto truth = random_sequence(rng, 5, 3, 2);
    CHECK(prediction_error(truth, truth, 5) == 0.0);
    CHECK(prediction_error(truth, truth, 5, ErrorDomain::Linear) == 0.0);
}

TEST_CASE("prediction_error: squared-norm example (3,4) -> 25") {
    // P=1, single row, linear domain, difference vector (3,4)
    std::vector<Eigen::MatrixXd> truth{Eigen::MatrixXd(1, 2)};
    std::vector<Eigen::MatrixXd> pred{Eigen::MatrixXd(1, 2)};
    truth[0] << 10.0, 10.0;
    pred[0] << 7.0, 6.0;
    CHECK(prediction_error(truth, pred, 1, ErrorDomain::Linear) == 25.0);
}

TEST_CASE("prediction_error matches a triple-loop oracle in both domains") {
    Rng rng(62);
    auto truth = random_sequence(rng, 7, 4, 3);
    auto pred = random_sequence(rng, 7, 4, 3);
    for (ErrorDomain domain : {ErrorDomain::Db, ErrorDomain::Linear}) {
        double expect = 0.0;
        for (int t = 0; t < 7; ++t)
            for (int i = 0; i < 4; ++i)
                for (int c = 0; c < 3; ++c) {
                    double a = truth[static_cast<std::size_t>(t)](i, c);
                    double b = pred[static_cast<std::size_t>(t)](i, c);
                    double d = domain == ErrorDomain::Db
                                   ? 10.0 * std::log10(a) - 10.0 * std::log10(b)
                                   : a - b;
                    expect += d * d;
                }
        expect /= 7.0;
        double got = prediction_error(truth, pred, 7, domain);
        CHECK(std::abs(got - expect) / expect < 1e-12);
    }
}

TEST_CASE("prediction_error_curve sums back to P times epsilon") {
    Rng rng(63);
    auto truth = random_sequence(rng, 6, 2, 1);
    auto pred = random_sequence(rng, 6, 2, 1);
    std::vector<double> curve = prediction_error_curve(truth, pred, 6);
    double total = 0.0;
    for (double e : curve) total += e;
    CHECK(total / 6.0 == doctest::Approx(prediction_error(truth, pred, 6)).epsilon(1e-12));
}

TEST_CASE("prediction_error: shape and length mismatches rejected") {
    Rng rng(64);
    auto truth = random_sequence(rng, 3, 2, 1);
    auto pred = random_sequence(rng, 3, 3, 2);
    CHECK_THROWS_AS(prediction_error(truth, pred, 3), ValidationError);
    CHECK_THROWS_AS(prediction_error(truth, truth, 4), ValidationError);
}

TEST_CASE("classify_events: the four Table entries") {
    CHECK(classify_events({true}, {true}).tp == 1);
    CHECK(classify_events({false}, {true}).fp == 1);
    CHECK(classify_events({false}, {false}).tn == 1);
    CHECK(classify_events({true}, {false}).fn == 1);
    ConfusionCounts c = classify_events({true}, {true});
    CHECK(c.fp + c.tn + c.fn == 0);
}

TEST_CASE("classify_events: random 1000-length pair sums and matches a loop oracle") {
    Rng rng(65);
    std::vector<bool> actual, predicted;
    for (int i = 0; i < 1000; ++i) {
        actual.push_back(rng.uniform() < 0.3);
        predicted.push_back(rng.uniform() < 0.4);
    }
    ConfusionCounts counts = classify_events(actual, predicted);
    CHECK(counts.total() == 1000);
    long tp = 0, fp = 0, tn = 0, fn = 0;
    for (int i = 0; i < 1000; ++i) {
        if (actual[static_cast<std::size_t>(i)]) {
            if (predicted[static_cast<std::size_t>(i)]) ++tp; else ++fn;
        } else {
            if (predicted[static_cast<std::size_t>(i)]) ++fp; else ++tn;
        }
    }
    CHECK(counts.tp == tp);
    CHECK(counts.fp == fp);
    CHECK(counts.tn == tn);
    CHECK(counts.fn == fn);
}

TEST_CASE("classify_events: length mismatch rejected") {
    CHECK_THROWS_AS(classify_events({true}, {true, false}), ValidationError);
}

TEST_CASE("f1 score") {
    CHECK(f1_score({2, 1, 0, 1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(f1_score({5, 0, 7, 0}) == 1.0);
    CHECK(f1_score({0, 0, 3, 0}) == 0.0);  // degenerate by convention
}

TEST_CASE("false alarm rate") {
    CHECK(false_alarm_rate({0, 1, 3, 0}) == 0.25);
    CHECK(false_alarm_rate({2, 0, 5, 1}) == 0.0);
    CHECK(false_alarm_rate({1, 0, 0, 1}) == 0.0);  // degenerate by convention
}

TEST_CASE("f1 and far stay within [0, 1] on random counts") {
    Rng rng(66);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionCounts c{static_cast<long>(rng.uniform() * 50),
                          static_cast<long>(rng.uniform() * 50),
                          static_cast<long>(rng.uniform() * 50),
                          static_cast<long>(rng.uniform() * 50)};
        double f1 = f1_score(c), far = false_alarm_rate(c);
        CHECK(f1 >= 0.0);
        CHECK(f1 <= 1.0);
        CHECK(far >= 0.0);
        CHECK(far <= 1.0);
        if (c.fp + c.tn > 0)
            CHECK(far == doctest::Approx(static_cast<double>(c.fp) /
                                         static_cast<double>(c.fp + c.tn)));
    }
}

}  // TEST_SUITE
