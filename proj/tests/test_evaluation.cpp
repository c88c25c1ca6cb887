#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmmn/evaluation.hpp"
#include "gmmn/rng.hpp"

using namespace gmmn;
using namespace gmmn::eval;

namespace {

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(0.0, 10.0);
    return v;
}

}  // namespace

TEST_CASE("autocorrelation lag zero is one") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::vector<double> s = random_series(24, seed);
        std::vector<double> r = autocorrelation(s, 23);
        REQUIRE(r.size() == 24);
        CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("autocorrelation of the alternating series is -1 at lag one") {
    std::vector<double> s;
    for (int i = 0; i < 12; ++i) {
        s.push_back(1.0);
        s.push_back(-1.0);
    }
    std::vector<double> r = autocorrelation(s, 2);
    CHECK(r[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("autocorrelation matches a brute-force double loop on length 10") {
    std::vector<double> s = random_series(10, 7);
    std::vector<double> r = autocorrelation(s, 5);

    double mu = std::accumulate(s.begin(), s.end(), 0.0) / 10.0;
    double var = 0.0;
    for (double v : s) var += (v - mu) * (v - mu);
    var /= 10.0;
    for (std::size_t tau = 0; tau <= 5; ++tau) {
        double acc = 0.0;
        std::size_t terms = 0;
        for (std::size_t t = 0; t + tau < 10; ++t) {
            acc += (s[t] - mu) * (s[t + tau] - mu);
            ++terms;
        }
        CHECK(r[tau] == doctest::Approx(acc / double(terms) / var).epsilon(1e-12));
    }
}

TEST_CASE("autocorrelation rejects zero variance and bad lags") {
    std::vector<double> flat(24, 3.0);
    CHECK_THROWS(autocorrelation(flat, 4));
    std::vector<double> s = random_series(8, 8);
    CHECK_THROWS(autocorrelation(s, 8));
}

TEST_CASE("autocorrelation is invariant under positive affine maps") {
    std::vector<double> s = random_series(24, 9);
    std::vector<double> t(s);
    for (double& v : t) v = 3.5 * v + 11.0;
    std::vector<double> rs = autocorrelation(s, 10);
    std::vector<double> rt = autocorrelation(t, 10);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        CHECK(rt[i] == doctest::Approx(rs[i]).epsilon(1e-10));
    }
}

TEST_CASE("psd of a constant series is all in the DC bin") {
    std::vector<double> s(24, 2.5);
    std::vector<double> p = psd_periodogram(s);
    REQUIRE(p.size() == 13);
    CHECK(p[0] == doctest::Approx(24.0 * 2.5 * 2.5).epsilon(1e-9));
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("psd of a unit sinusoid concentrates in its bin") {
    const std::size_t t_len = 24;
    const std::size_t k0 = 3;
    std::vector<double> s(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        s[t] = std::sin(2.0 * M_PI * double(k0) * double(t) / double(t_len));
    }
    std::vector<double> p = psd_periodogram(s);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k == k0) {
            // |X_k| = T/2 for a unit sine hit exactly; doubled one-sided bin.
            CHECK(p[k] == doctest::Approx(2.0 * (t_len / 2.0) * (t_len / 2.0) / t_len)
                              .epsilon(1e-9));
        } else {
            CHECK(p[k] == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("psd satisfies Parseval: sum(psd)/T equals the mean square") {
    for (std::size_t t_len : {24u, 23u, 10u}) {
        std::vector<double> s = random_series(t_len, 40 + t_len);
        std::vector<double> p = psd_periodogram(s);
        const double total = std::accumulate(p.begin(), p.end(), 0.0) / double(t_len);
        double ms = 0.0;
        for (double v : s) ms += v * v;
        ms /= double(t_len);
        CHECK(total == doctest::Approx(ms).epsilon(1e-9));
    }
}

TEST_CASE("psd bins are non-negative") {
    std::vector<double> s = random_series(24, 55);
    for (double v : psd_periodogram(s)) CHECK(v >= 0.0);
}

TEST_CASE("duration_curve sorts descending and preserves the multiset") {
    std::vector<double> day{3, 1, 2};
    CHECK(duration_curve(day) == std::vector<double>{3, 2, 1});

    std::vector<double> random_day = random_series(24, 60);
    std::vector<double> curve = duration_curve(random_day);
    CHECK(std::is_sorted(curve.begin(), curve.end(), std::greater<>()));
    std::vector<double> sorted_input(random_day);
    std::sort(sorted_input.begin(), sorted_input.end(), std::greater<>());
    CHECK(curve == sorted_input);
    // Energy conservation: same multiset, same sum.
    CHECK(std::accumulate(curve.begin(), curve.end(), 0.0) ==
          doctest::Approx(std::accumulate(random_day.begin(), random_day.end(), 0.0))
              .epsilon(1e-12));
}

TEST_CASE("duration_curve matches the exceedance-count definition") {
    // t_j = #{i : P_i >= P_j}; with distinct values curve[t_j - 1] == P_j.
    std::vector<double> day{3, 1, 2};
    std::vector<double> curve = duration_curve(day);
    for (double pj : day) {
        std::size_t tj = 0;
        for (double pi : day) {
            if (pi >= pj) ++tj;
        }
        CHECK(curve[tj - 1] == pj);
    }
    // The value 2 is exceeded-or-met for 2 hours.
    std::size_t t_for_2 = 0;
    for (double pi : day) {
        if (pi >= 2.0) ++t_for_2;
    }
    CHECK(t_for_2 == 2);
}

TEST_CASE("pearson basic identities") {
    std::vector<double> x = random_series(30, 70);
    std::vector<double> neg(x);
    for (double& v : neg) v = -v;
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));

    std::vector<double> y = random_series(30, 71);
    std::vector<double> ax(x);
    for (double& v : ax) v = 2.5 * v + 7.0;
    CHECK(pearson(ax, y) == doctest::Approx(pearson(x, y)).epsilon(1e-12));

    std::vector<double> flat(30, 1.0);
    CHECK_THROWS(pearson(x, flat));
    CHECK_THROWS(pearson(x, random_series(29, 72)));
}

TEST_CASE("temporal_corr_matrix is symmetric with exact unit diagonal") {
    Rng rng(80);
    Tensor rows({40, 24});
    for (double& v : rows.data()) v = rng.normal();
    Tensor m = temporal_corr_matrix(rows);
    for (std::size_t i = 0; i < 24; ++i) {
        CHECK(m.at(i, i) == 1.0);
        for (std::size_t j = 0; j < 24; ++j) {
            CHECK(m.at(i, j) == m.at(j, i));
            CHECK(m.at(i, j) >= -1.0);
            CHECK(m.at(i, j) <= 1.0);
        }
    }
}

TEST_CASE("independent hours decorrelate at large sample count") {
    const std::size_t count = 4000;
    Rng rng(81);
    Tensor rows({count, 24});
    for (double& v : rows.data()) v = rng.normal();
    Tensor m = temporal_corr_matrix(rows);
    const double tol = 3.0 / std::sqrt(double(count));
    for (std::size_t i = 0; i < 24; ++i) {
        for (std::size_t j = 0; j < 24; ++j) {
            if (i != j) CHECK(std::abs(m.at(i, j)) < tol);
        }
    }
}

TEST_CASE("strongly persistent days show >0.9 adjacent-hour correlation") {
    // A dominant day factor plus slow AR noise mimics heating-style
    // persistence.
    Rng rng(82);
    Tensor rows({200, 24});
    for (std::size_t r = 0; r < 200; ++r) {
        const double level = rng.uniform(0.5, 2.0);
        double ar = 0.0;
        for (std::size_t h = 0; h < 24; ++h) {
            ar = 0.9 * ar + 0.02 * rng.normal();
            rows.at(r, h) = level * (1.0 + 0.1 * std::sin(2.0 * M_PI * h / 24.0)) + ar;
        }
    }
    Tensor m = temporal_corr_matrix(rows);
    for (std::size_t h = 0; h + 1 < 24; ++h) {
        CHECK(m.at(h, h + 1) > 0.9);
    }
}

TEST_CASE("cross_load_matrix recovers perfect correlation for cloned classes") {
    Rng rng(83);
    Tensor rows({20, 72});
    for (std::size_t r = 0; r < 20; ++r) {
        for (std::size_t h = 0; h < 24; ++h) {
            const double v = rng.uniform(0.0, 5.0);
            rows.at(r, h) = v;        // cooling
            rows.at(r, 24 + h) = v;   // heating (identical series)
            rows.at(r, 48 + h) = rng.uniform(0.0, 5.0);
        }
    }
    Tensor m = cross_load_matrix(rows);
    CHECK(m.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(1, 2) == m.at(2, 1));
}

TEST_CASE("pdf_histogram density integrates to one") {
    std::vector<double> values = random_series(5000, 90);
    for (double& v : values) v /= 10.0;  // into [0,1)
    std::vector<double> pdf = pdf_histogram(values, 50);
    REQUIRE(pdf.size() == 50);
    double integral = 0.0;
    for (double p : pdf) {
        CHECK(p >= 0.0);
        integral += p * (1.0 / 50.0);
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pdf_histogram piles a point mass into one bin") {
    std::vector<double> values(100, 0.37);
    std::vector<double> pdf = pdf_histogram(values, 50);
    for (std::size_t b = 0; b < 50; ++b) {
        if (b == 18) {  // floor(0.37 * 50)
            CHECK(pdf[b] == doctest::Approx(50.0).epsilon(1e-12));
        } else {
            CHECK(pdf[b] == 0.0);
        }
    }
}

TEST_CASE("pdf_histogram clips out-of-range values into the end bins") {
    std::vector<double> values{-0.5, -0.01, 1.0, 1.7};
    std::vector<double> pdf = pdf_histogram(values, 10);
    CHECK(pdf[0] == doctest::Approx(0.5 * 10.0));  // two of four values
    CHECK(pdf[9] == doctest::Approx(0.5 * 10.0));
}

TEST_CASE("uniform samples give a flat pdf within 2%") {
    Rng rng(91);
    std::vector<double> values(1000000);
    for (double& v : values) v = rng.uniform01();
    std::vector<double> pdf = pdf_histogram(values, 50);
    for (double p : pdf) CHECK(p == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("pdf_distance identities") {
    std::vector<double> a = pdf_histogram(random_series(400, 92), 50);
    std::vector<double> b = pdf_histogram(random_series(400, 93), 50);
    CHECK(pdf_distance(a, a) == 0.0);
    CHECK(pdf_distance(a, b) == pdf_distance(b, a));
    CHECK(pdf_distance(a, b) > 0.0);
    CHECK_THROWS(pdf_distance(a, std::vector<double>(49, 0.0)));
}

TEST_CASE("nearest_real_match finds exact matches and agrees with a scan") {
    Rng rng(94);
    Tensor real({100, 72});
    for (double& v : real.data()) v = rng.uniform(0.0, 1.0);

    // A generated row equal to a real row matches it at distance 0.
    std::vector<double> probe(real.data().begin() + 37 * 72, real.data().begin() + 38 * 72);
    NearestMatch exact = nearest_real_match(probe, real);
    CHECK(exact.index == 37);
    CHECK(exact.distance == 0.0);

    // Exhaustive oracle on a random probe.
    std::vector<double> q(72);
    for (double& v : q) v = rng.uniform(0.0, 1.0);
    NearestMatch m = nearest_real_match(q, real);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t r = 0; r < 100; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < 72; ++i) {
            const double d = q[i] - real.at(r, i);
            acc += d * d;
        }
        if (acc < best_d) {
            best_d = acc;
            best = r;
        }
    }
    CHECK(m.index == best);
    CHECK(m.distance == doctest::Approx(std::sqrt(best_d)).epsilon(1e-12));
}

TEST_CASE("nearest_real_match breaks ties toward the lowest index") {
    Tensor real({3, 72});
    // Rows 0 and 2 identical; probe equidistant candidates.
    for (std::size_t i = 0; i < 72; ++i) {
        real.at(0, i) = 1.0;
        real.at(1, i) = 5.0;
        real.at(2, i) = 1.0;
    }
    std::vector<double> probe(72, 1.5);
    CHECK(nearest_real_match(probe, real).index == 0);
}
