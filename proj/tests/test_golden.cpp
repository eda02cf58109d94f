#include <gtest/gtest.h>

#include "support.hpp"

using namespace brunesynth;
using namespace testing_support;

namespace {

io::json golden() { return io::read_json(data_dir() / "golden" / "quantum_classical_ratio.json"); }

}  // namespace

TEST(QuantumClassicalRatio, WeakLossConstant) {
    const auto g = golden()["weak_loss"];
    const auto c = scale_losses(table2(), g["stage_R_scale"].get<double>(), g["terminal_R_scale"].get<double>());
    const double want = g["constant"].get<double>(), tol = g["rel_tol"].get<double>();
    for (double lj : {4.0, 4.5, 5.0, 5.5, 6.0, 6.5}) {
        EXPECT_NEAR(quantum_classical_ratio(c, lj), want, want * tol) << lj;
    }
}

TEST(QuantumClassicalRatio, Table2Regression) {
    const auto g = golden()["table2"];
    const auto lj = g["L_J_nH"].get<std::vector<double>>();
    const auto want = g["ratio"].get<std::vector<double>>();
    const double tol = g["rel_tol"].get<double>();
    ASSERT_EQ(lj.size(), want.size());
    const auto c = table2();
    for (std::size_t i = 0; i < lj.size(); ++i) {
        EXPECT_NEAR(quantum_classical_ratio(c, lj[i]), want[i], want[i] * tol) << lj[i];
    }
}

TEST(QuantumClassicalRatio, ApproachesConstantAsLossVanishes) {
    // The deviation from the weak-loss constant shrinks with the loss scale.
    const auto c = table2();
    double prev = 1e300;
    for (double lam : {1.0, 1e-1, 1e-2, 1e-3}) {
        const double dev = std::abs(quantum_classical_ratio(scale_losses(c, lam, 1 / lam), 6.5) - 4.0);
        EXPECT_LT(dev, prev) << lam;
        prev = dev;
    }
    EXPECT_LT(prev, 1e-3);
}
