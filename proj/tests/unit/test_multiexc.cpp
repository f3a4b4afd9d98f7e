#include "helpers.hpp"

#include "mblrevive/certifier.hpp"
#include "mblrevive/dmrgx.hpp"
#include "mblrevive/errors.hpp"
#include "mblrevive/multiexc.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace mblrevive;

namespace {

double overlap2(const Mps &a, const Mps &b) { return std::norm(overlap(a, b)) / (norm_squared(a) * norm_squared(b)); }

EigenFamily family(const Mpo &h, const DisorderRealization &d, SeedOrientation o) {
    FamilyOptions opts;
    opts.orientation = o;
    opts.first_k     = 0;
    opts.last_k      = d.length;
    EigenFamily out;
    for(auto &s : run_seed_family(h, d, SweepSchedule::standard(), opts).seeds)
        if(s.eigenpair) out.emplace(s.k, std::move(*s.eigenpair));
    return out;
}

struct Families {
    DisorderRealization d;
    Mpo                 h;
    EigenFamily         du, ud;
};

const Families &families() {
    static const Families f = [] {
        Families out;
        out.d  = sample_disorder(10, 8.0, 41);
        out.h  = build_hamiltonian_mpo(out.d);
        out.du = family(out.h, out.d, SeedOrientation::domain_wall);
        out.ud = family(out.h, out.d, SeedOrientation::flipped);
        return out;
    }();
    return f;
}

} // namespace

// Invariant: gluing a state with itself at any cut reproduces it.
TEST(GlueProperty, SelfGlueIsIdentity) {
    for(std::uint64_t s = 0; s < 6; ++s) {
        const auto psi = testutil::normalized(testutil::random_mps(8, 2 + s, 50 + s));
        for(std::size_t m = 1; m < 8; ++m) {
            for(auto mode : {GlueMode::strict, GlueMode::pad}) {
                const auto g = glue(psi, psi, m, {1e-6, mode});
                EXPECT_NEAR(overlap2(g.state, psi), 1.0, 1e-12) << "s=" << s << " m=" << m;
                EXPECT_NEAR(norm_squared(g.state), 1.0, 1e-12);
                EXPECT_FALSE(g.report.padded);
            }
        }
    }
}

TEST(Glue, ProductStatesSplice) {
    const auto a = SpinConfiguration::from_string("ddddduuuu"), b = SpinConfiguration::from_string("uudduuddd");
    for(std::size_t m = 1; m < 9; ++m) {
        const auto g = glue(from_configuration(a), from_configuration(b), m);
        auto       spins = a.spins();
        std::copy(b.spins().begin() + static_cast<std::ptrdiff_t>(m), b.spins().end(), spins.begin() + static_cast<std::ptrdiff_t>(m));
        EXPECT_NEAR(overlap2(g.state, from_configuration(SpinConfiguration(spins))), 1.0, 1e-14);
        EXPECT_TRUE(g.report.product_like);
        EXPECT_EQ(g.report.rank_left, 1);
    }
}

TEST(Glue, RankMismatchIsRejectedUnlessPadding) {
    const auto entangled = testutil::normalized(testutil::random_mps(6, 4, 3));
    const auto product   = from_configuration(SpinConfiguration::from_string("dudduu"));
    EXPECT_THROW((void)glue(entangled, product, 3), GlueMismatchError);
    const auto g = glue(entangled, product, 3, {1e-6, GlueMode::pad});
    EXPECT_TRUE(g.report.padded);
    EXPECT_EQ(g.report.rank_right, 1);
    EXPECT_GT(g.report.rank_left, 1);
    EXPECT_NEAR(norm_squared(g.state), 1.0, 1e-12);
    // Padding against a rank-one right part leaves a product across the cut
    // whose right sites are those of `product`.
    EXPECT_EQ(schmidt_split(g.state, 3).values.size(), 1);
    for(std::size_t j = 3; j < 6; ++j) EXPECT_LE((single_site_rdm(g.state, j) - single_site_rdm(product, j)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Glue, InputValidation) {
    const auto a = testutil::random_mps(6, 2, 1), b = testutil::random_mps(7, 2, 2);
    EXPECT_THROW((void)glue(a, b, 3), LengthMismatchError);
    EXPECT_THROW((void)glue(a, a, 0), ValidationError);
    EXPECT_THROW((void)glue(a, a, 6), ValidationError);
}

TEST(Glue, CutBetweenWalls) {
    EXPECT_EQ(glue_cut(3, 7), 5u);
    EXPECT_EQ(glue_cut(3, 6), 5u);
    EXPECT_EQ(glue_cut(2, 3), 3u);
    EXPECT_THROW((void)glue_cut(4, 4), ValidationError);
}

TEST(Scan, RowsCoverEveryAdmissiblePair) {
    const auto &f    = families();
    const auto  scan = variance_vs_distance(f.h, f.du, f.ud, {2, 4, 6});
    for(std::size_t d : {2u, 4u, 6u}) {
        std::vector<double> v;
        for(const auto &r : scan.rows)
            if(r.d == d) {
                EXPECT_EQ(r.k2, r.k1 + d);
                EXPECT_TRUE(r.error.empty()) << r.error;
                EXPECT_TRUE(std::isfinite(r.var_rescaled));
                v.push_back(r.var_rescaled);
            }
        ASSERT_EQ(v.size(), 9 - d);
        std::sort(v.begin(), v.end());
        const double med = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        EXPECT_DOUBLE_EQ(scan.median.at(d), med);
    }
    std::ostringstream out;
    write_glue_scan_csv(out, scan);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "d,k1,k2,k3,var_rescaled,median,error");
}

TEST(Scan, MissingEigenpairsAreReported) {
    const auto &f  = families();
    auto        ud = f.ud;
    ud.erase(5);
    const auto scan = variance_vs_distance(f.h, f.du, ud, {2});
    const auto it   = std::find_if(scan.rows.begin(), scan.rows.end(), [](const GlueRow &r) { return r.k2 == 5; });
    ASSERT_NE(it, scan.rows.end());
    EXPECT_FALSE(it->error.empty());
    EXPECT_EQ(scan.rows.size(), 7u);
}

TEST(MultiReviver, OneWallIsThePairSuperposition) {
    const auto &f = families();
    const auto &a = f.du.at(4), &b = f.du.at(5);
    for(int sign : {1, -1}) {
        const auto r = multi_reviver(f.h, f.du, f.ud, {4}, {sign});
        ASSERT_EQ(r.components.size(), 2u);
        const std::vector<Mps>  parts{testutil::normalized(fix_phase(a.state, a.seed)), testutil::normalized(fix_phase(b.state, b.seed))};
        const std::vector<cplx> c{1.0, static_cast<double>(sign)};
        EXPECT_NEAR(overlap2(r.state, superpose(parts, c)), 1.0, 1e-12);
        EXPECT_NEAR(r.coefficients[1].real(), sign / std::sqrt(2.0), 1e-15);
    }
}

TEST(MultiReviver, TwoWallsGiveFourComponents) {
    const auto &f = families();
    const auto  r = multi_reviver(f.h, f.du, f.ud, {2, 6}, {1, -1});
    ASSERT_EQ(r.components.size(), 4u);
    EXPECT_EQ(r.report.cuts.size(), 4u);
    EXPECT_NEAR(norm_squared(r.state), 1.0, 1e-12);
    const std::size_t cut = glue_cut(3, 6);
    for(std::size_t i = 0; i < 4; ++i) {
        const std::size_t b1 = i >> 1, b2 = i & 1U;
        // Down-up wall at 2 + b1 left of the cut, up-down wall at 6 + b2 right of it.
        std::vector<Spin> spins(10);
        for(std::size_t j = 0; j < 10; ++j) spins[j] = j < cut ? (j < 2 + b1 ? Spin::down : Spin::up) : (j < 6 + b2 ? Spin::up : Spin::down);
        EXPECT_EQ(r.components[i].seed, SpinConfiguration(spins)) << r.components[i].seed.to_string();
        EXPECT_NEAR(std::abs(r.coefficients[i]), 0.5, 1e-15);
        EXPECT_EQ(r.coefficients[i].real() < 0, b2 == 1);
        EXPECT_EQ(r.components[i].var_rescaled, r.report.var_rescaled[i]);
    }
    EXPECT_EQ(r.report.all_eigenstates, r.report.max_var_rescaled <= ReviverConfig{}.variance_threshold);
}

TEST(MultiReviver, RejectsBadWalls) {
    const auto &f = families();
    EXPECT_THROW((void)multi_reviver(f.h, f.du, f.ud, {}, {}), ValidationError);
    EXPECT_THROW((void)multi_reviver(f.h, f.du, f.ud, {2, 6}, {1}), LengthMismatchError);
    EXPECT_THROW((void)multi_reviver(f.h, f.du, f.ud, {2, 3}, {1, 1}), ValidationError);
    EXPECT_THROW((void)multi_reviver(f.h, f.du, f.ud, {6, 2}, {1, 1}), ValidationError);
    EXPECT_THROW((void)multi_reviver(f.h, f.du, f.ud, {2}, {2}), ValidationError);
    auto du = f.du;
    du.erase(3);
    EXPECT_THROW((void)multi_reviver(f.h, du, f.ud, {2}, {1}), ValidationError);
}
