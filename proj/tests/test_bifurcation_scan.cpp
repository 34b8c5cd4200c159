#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <boostfold/averaged.hpp>
#include <boostfold/bifurcation.hpp>
#include <boostfold/errors.hpp>

#include "test_support.hpp"

using namespace boostfold;
using namespace testing_support;

namespace {

std::vector<const Branch*> periodic_branches(const BifurcationDiagram& d, int period = 1) {
    std::vector<const Branch*> out;
    for (const auto& b : d.branches) {
        if (b.period_mult == period && b.origin != "dc") out.push_back(&b);
    }
    return out;
}

const Branch* branch_with_origin(const BifurcationDiagram& d, const std::string& origin) {
    for (const auto& b : d.branches) {
        if (b.origin == origin) return &b;
    }
    return nullptr;
}

const CriticalPoint* first_of(const BifurcationDiagram& d, CriticalKind k) {
    for (const auto& c : d.critical_points) {
        if (c.kind == k) return &c;
    }
    return nullptr;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const BifurcationDiagram& example1_diagram() {
    static const BifurcationDiagram d = sweep(build_model(example1()), 3.0, 8.0, 101);
    return d;
}

}  // namespace

TEST(Sweep, Example1Branches) {
    const auto& d = example1_diagram();
    const auto br = periodic_branches(d);
    ASSERT_EQ(br.size(), 2u);
    for (const Branch* b : br) {
        EXPECT_LT(b->points.back().v_r, 7.1);
        EXPECT_EQ(b->points.front().v_r, 3.0);
    }
    const Branch* lower = branch_with_origin(d, "lower");
    const Branch* upper = branch_with_origin(d, "upper");
    ASSERT_TRUE(lower && upper);
    for (const auto& p : lower->points) EXPECT_EQ(p.orbit.is_stable(), p.v_r < 4.92) << p.v_r;
    for (const auto& p : upper->points) EXPECT_FALSE(p.orbit.is_stable());
    ASSERT_TRUE(branch_with_origin(d, "dc"));
}

TEST(Sweep, Example1CriticalPoints) {
    const auto& d = example1_diagram();
    const CriticalPoint* snb = first_of(d, CriticalKind::Snb);
    const CriticalPoint* nm = first_of(d, CriticalKind::Neimark);
    ASSERT_TRUE(snb && nm);
    EXPECT_NEAR(snb->v_r, 7.1, 0.05);
    EXPECT_NEAR(snb->duty, 0.78, 0.01);
    EXPECT_NEAR(nm->v_r, 4.92, 0.02);
}

TEST(Sweep, FoldAgreesWithAveragedPrediction) {
    for (const ConverterParams& p : {example1(), example2(), example3()}) {
        const CycleMap map(build_model(p));
        const auto folds = switched_folds(map, duty_curve(map, 400));
        ASSERT_FALSE(folds.empty()) << scheme_name(p.scheme);
        const CriticalPoint& f = folds.front();
        EXPECT_NEAR(f.v_r, averaged::snb_reference(p), 0.01 * f.v_r) << scheme_name(p.scheme);
        EXPECT_NEAR(f.duty, averaged::snb_duty(p), 0.01) << scheme_name(p.scheme);
    }
}

TEST(Sweep, InvariantsOnExample1) {
    const auto& d = example1_diagram();
    for (const Branch& b : d.branches) {
        for (std::size_t i = 1; i < b.points.size(); ++i) {
            EXPECT_LE(std::abs(b.points[i].orbit.duties[0] - b.points[i - 1].orbit.duties[0]), 0.05);
            EXPECT_GT(b.points[i].v_r, b.points[i - 1].v_r);
        }
        for (const auto& p : b.points) {
            EXPECT_LE(p.orbit.residual, 1e-10);
            EXPECT_EQ(p.orbit.multipliers.size(), 2u);
        }
    }
    const Branch* lower = branch_with_origin(d, "lower");
    const Branch* upper = branch_with_origin(d, "upper");
    for (std::size_t i = 1; i < lower->points.size(); ++i) {
        EXPECT_GT(lower->points[i].orbit.duties[0], lower->points[i - 1].orbit.duties[0]);
    }
    for (std::size_t i = 1; i < upper->points.size(); ++i) {
        EXPECT_LT(upper->points[i].orbit.duties[0], upper->points[i - 1].orbit.duties[0]);
    }
    // Every critical point sits between grid points whose status differs.
    for (const CriticalPoint& c : d.critical_points) {
        if (c.kind != CriticalKind::Neimark) continue;
        const Branch& b = d.branches[c.branch_id];
        bool bracketed = false;
        for (std::size_t i = 1; i < b.points.size(); ++i) {
            if (b.points[i - 1].v_r <= c.v_r && c.v_r <= b.points[i].v_r) {
                bracketed = b.points[i - 1].orbit.stability.unstable_count != b.points[i].orbit.stability.unstable_count;
            }
        }
        EXPECT_TRUE(bracketed);
    }
}

TEST(Sweep, LosslessHasSingleUnstableBranch) {
    const BifurcationDiagram d = sweep(build_model(example1(600e3, 0.0)), 3.0, 8.0, 101);
    const auto br = periodic_branches(d);
    ASSERT_EQ(br.size(), 1u);
    for (const auto& p : br[0]->points) EXPECT_FALSE(p.orbit.is_stable());
    EXPECT_EQ(first_of(d, CriticalKind::Snb), nullptr);
    EXPECT_EQ(branch_with_origin(d, "dc"), nullptr);
}

TEST(Sweep, BranchCountBelowFold) {
    const auto& d = example1_diagram();
    for (std::size_t i = 0; i < d.sweep_grid.size(); ++i) {
        if (d.sweep_grid[i] >= 7.0) break;
        int count = 0;
        for (const Branch* b : periodic_branches(d)) {
            for (const auto& p : b->points) count += p.grid_index == static_cast<int>(i);
        }
        EXPECT_EQ(count, 2) << d.sweep_grid[i];
    }
}

TEST(Sweep, Example3Window) {
    const BifurcationDiagram d = sweep(build_model(example3()), 5.0, 19.0, 71);
    const CriticalPoint* pdb = first_of(d, CriticalKind::Pdb);
    const CriticalPoint* snb = first_of(d, CriticalKind::Snb);
    const CriticalPoint* edge = first_of(d, CriticalKind::Boundary);
    ASSERT_TRUE(pdb && snb && edge);
    EXPECT_NEAR(pdb->v_r, 8.2, 0.2);
    EXPECT_NEAR(snb->v_r, 17.7, 0.1);
    EXPECT_NEAR(edge->v_r, 15.5, 0.3);
    EXPECT_FALSE(periodic_branches(d, 2).empty());
}

TEST(Sweep, StabilityFlipsAcrossLocatedPoints) {
    const auto& d = example1_diagram();
    const SwitchedModel m = build_model(example1());
    const CycleMap map(m);
    const CriticalPoint* nm = first_of(d, CriticalKind::Neimark);
    ASSERT_TRUE(nm);
    const Orbit a = orbit_at_duty(map, nm->duty - 1e-3);
    const Orbit b = orbit_at_duty(map, nm->duty + 1e-3);
    EXPECT_NE(a.stability.classification, b.stability.classification);
}

TEST(Locate, NeimarkAtBothFrequencies) {
    for (const auto& [fs, want] : {std::pair{600e3, 4.92}, std::pair{6e6, 5.32}}) {
        const SwitchedModel m = build_model(example1(fs));
        SweepOptions o;
        o.locate = false;
        const BifurcationDiagram d = sweep(m, 3.0, 8.0, 51, o);
        const Branch* lower = branch_with_origin(d, "lower");
        ASSERT_TRUE(lower);
        const CriticalPoint c = locate_bifurcation(m, *lower, CriticalKind::Neimark);
        EXPECT_NEAR(c.v_r, want, 0.02) << fs;
    }
}

TEST(Locate, FoldFromBranchEnd) {
    const SwitchedModel m = build_model(example1());
    const CriticalPoint c = locate_bifurcation(m, *branch_with_origin(example1_diagram(), "upper"), CriticalKind::Snb);
    EXPECT_NEAR(c.v_r, 7.1, 0.05);
    EXPECT_NEAR(c.duty, 0.78, 0.01);
}

TEST(Locate, PeriodDoublingWithAndWithoutLosses) {
    for (const auto& [r, want] : {std::pair{0.1, 8.2}, std::pair{0.0, 9.4}}) {
        const SwitchedModel m = build_model(example3(r));
        SweepOptions o;
        o.locate = false;
        o.track_period_two = false;
        const BifurcationDiagram d = sweep(m, 6.0, 12.0, 31, o);
        const auto br = periodic_branches(d);
        ASSERT_FALSE(br.empty());
        const CriticalPoint c = locate_bifurcation(m, *br.front(), CriticalKind::Pdb);
        EXPECT_NEAR(c.v_r, want, 0.2) << r;
    }
}

TEST(Locate, NoBracket) {
    const SwitchedModel m = build_model(example1());
    EXPECT_THROW(locate_bifurcation(m, *branch_with_origin(example1_diagram(), "upper"), CriticalKind::Pdb),
                 NoBracketError);
}

TEST(Export, EmptyDiagramHeaderOnly) {
    BifurcationDiagram d;
    d.state_labels = {"i_L", "v_C"};
    const auto dir = std::filesystem::temp_directory_path() / "boostfold_export_empty";
    std::filesystem::create_directories(dir);
    export_diagram(d, dir, "t");
    const std::string b = slurp(dir / "t_branches.csv");
    const std::string c = slurp(dir / "t_critical.csv");
    EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 1);
    EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 1);
}

TEST(Export, RowCountAndDeterminism) {
    const auto& d = example1_diagram();
    std::ostringstream a, b;
    write_branches_csv(a, d);
    write_branches_csv(b, d);
    EXPECT_EQ(a.str(), b.str());
    std::size_t total = 0;
    for (const auto& br : d.branches) total += br.points.size();
    const std::string s = a.str();
    EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), total + 1);

    std::istringstream rows(s);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        if (line.find(",stable,") == std::string::npos) continue;
        EXPECT_NE(line.find(",lower,"), std::string::npos);
    }
}

TEST(Export, IoErrorNamesPath) {
    BifurcationDiagram d;
    try {
        export_diagram(d, "/nonexistent_dir_boostfold/x", "t");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent_dir_boostfold/x"), std::string::npos);
    }
}

TEST(Sweep, RejectsBadRange) {
    const SwitchedModel m = build_model(example1());
    EXPECT_THROW(sweep(m, 5.0, 4.0, 10), DomainError);
    EXPECT_THROW(sweep(m, 4.0, 5.0, 1), DomainError);
}

TEST(Sweep, ParallelMatchesSerial) {
    const SwitchedModel m = build_model(example1());
    SweepOptions one, four;
    one.jobs = 1;
    four.jobs = 4;
    std::ostringstream a, b;
    write_branches_csv(a, sweep(m, 3.0, 8.0, 26, one));
    write_branches_csv(b, sweep(m, 3.0, 8.0, 26, four));
    EXPECT_EQ(a.str(), b.str());
}
