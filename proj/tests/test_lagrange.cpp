#include <numbers>

#include <gtest/gtest.h>

#include "fivevec/lagrange.hpp"
#include "fivevec/random.hpp"

using namespace fivevec;

namespace {

StateOfMotion random_state(Xoshiro256& rng, int n) {
  StateOfMotion s;
  for (int k = 0; k < n; ++k) {
    s.x.emplace_back(rng.uniform_vector(3, -2, 2));
    s.v.emplace_back(rng.uniform_vector(3, -1, 1));
  }
  return s;
}

Body body_of(const StateOfMotion& s, const std::vector<double>& m, const ForceSpec& spec) {
  Body b;
  for (std::size_t k = 0; k < s.size(); ++k) b.particles.push_back({m[k], s.x[k], s.v[k]});
  b.external_force = make_force_model(spec);
  return b;
}

ForceSpec single(ForceTerm t) {
  ForceSpec s;
  s.terms.push_back(t);
  return s;
}

MatrixXd rot_z(double th) {
  MatrixXd r = MatrixXd::Identity(3, 3);
  r(0, 0) = std::cos(th);
  r(0, 1) = -std::sin(th);
  r(1, 0) = std::sin(th);
  r(1, 1) = std::cos(th);
  return r;
}

}  // namespace

TEST(TransformState, IdentityAndQuarterTurn) {
  StateOfMotion s;
  s.x.emplace_back(1, 0, 0);
  s.v.emplace_back(0, 1, 0);
  const StateOfMotion same = transform_state(s, MotionParams::identity(3));
  EXPECT_EQ(same.x[0], s.x[0]);
  EXPECT_EQ(same.v[0], s.v[0]);
  const StateOfMotion r = transform_state(s, MotionParams{rot_z(std::numbers::pi / 2), VectorXd::Zero(3)});
  EXPECT_LE((r.x[0] - Vec3(0, 1, 0)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((r.v[0] - Vec3(-1, 0, 0)).cwiseAbs().maxCoeff(), 1e-15);
  MatrixXd scale = MatrixXd::Identity(3, 3) * 2.0;
  EXPECT_THROW(transform_state(s, MotionParams{scale, VectorXd::Zero(3)}), ValidationError);
}

TEST(TransformState, ComposesLikeCoordinateChanges) {
  Xoshiro256 rng(60);
  const StateOfMotion s = random_state(rng, 3);
  const MotionParams p{rng.rotation3(), rng.uniform_vector(3, -1, 1)};
  const MotionParams q{rng.rotation3(), rng.uniform_vector(3, -1, 1)};
  const StateOfMotion two = transform_state(transform_state(s, p), q);
  const StateOfMotion one = transform_state(s, MotionParams{q.L * p.L, q.L * p.a + q.a});
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_LE((two.x[k] - one.x[k]).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((two.v[k] - one.v[k]).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(DhL, SymmetricLagrangiansAreInvariant) {
  Xoshiro256 rng(61);
  const StateOfMotion s = random_state(rng, 3);
  const LagrangianFn free = lagrangian_preset({}, {1, 2, 3});
  const LagrangianFn spring = lagrangian_preset(single(PairwiseSpring{2.0, 0.5}), {1, 2, 3});
  for (int k = 0; k < 5; ++k) {
    const InfinitesimalMotion trans{MatrixXd::Zero(3, 3), rng.uniform_vector(3, -1, 1)};
    const InfinitesimalMotion any{rng.antisymmetric(3, 1.0), rng.uniform_vector(3, -1, 1)};
    EXPECT_LE(std::abs(dh_L(free, s, trans)), 1e-8);
    EXPECT_LE(std::abs(dh_L(free, s, any)), 1e-8);
    EXPECT_LE(std::abs(dh_L(spring, s, any)), 1e-8);
  }
}

TEST(DhL, TranslationAlongGravityGivesMinusWeight) {
  // L = ½mv² − m g z; moving the state by +e_z changes L at rate −m g
  const double m = 2.0, gz = 9.81;
  const LagrangianFn l = lagrangian_preset(single(UniformGravity{gz}), {m});
  StateOfMotion s;
  s.x.emplace_back(0.3, -1, 2);
  s.v.emplace_back(1, 0, 0);
  const InfinitesimalMotion up{MatrixXd::Zero(3, 3), Eigen::Vector3d(0, 0, 1)};
  EXPECT_NEAR(dh_L(l, s, up), -m * gz, 1e-6);
  EXPECT_NEAR(pair_contract(dl_form(l, s), r_from_infinitesimal(up, Metric::euclidean3())), -m * gz, 1e-12);
}

TEST(DlForm, FreeAndInternalForcesVanish) {
  Xoshiro256 rng(62);
  const StateOfMotion s = random_state(rng, 4);
  EXPECT_EQ(dl_form(lagrangian_preset({}, {1, 1, 1, 1}), s).max_abs(), 0.0);
  EXPECT_LE(dl_form(lagrangian_preset(single(PairwiseSpring{3.0, 1.0}), {1, 2, 1, 0.5}), s).max_abs(), 1e-13);
  InverseSquare grav;
  grav.k = 1.5;
  EXPECT_LE(dl_form(lagrangian_preset(single(grav), {1, 2, 1, 0.5}), s).max_abs(), 1e-13);
}

TEST(DlForm, OneParticleComponentsMatchGradient) {
  // (D L)_{i5} = ∂L/∂x^i, (D L)_{ij} = x_j ∂_i L − x_i ∂_j L at P-basis origin
  const LagrangianFn l = lagrangian_preset(single(UniformGravity{1.0}), {3.0});
  StateOfMotion s;
  s.x.emplace_back(1, 2, 0);
  s.v.emplace_back(0, 0, 0);
  const ExtTensor f = dl_form(l, s);
  EXPECT_EQ(f(2, 3), -3.0);
  EXPECT_EQ(f(3, 2), 3.0);
  // ∂L = (0, 0, −3) at x = (1, 2, 0)
  EXPECT_EQ(f(0, 2), 3.0);
  EXPECT_EQ(f(1, 2), 6.0);
  EXPECT_EQ(f(2, 0), -3.0);
  EXPECT_EQ(f(0, 3), 0.0);
}

TEST(DlForm, ContractionEqualsFamilyDerivative) {
  Xoshiro256 rng(63);
  std::vector<ForceSpec> presets;
  presets.push_back(single(UniformGravity{9.81}));
  presets.push_back(single(PairwiseSpring{2.0, 0.7}));
  presets.push_back(single(InverseSquare{1.0, Vec3(0, 0, -5)}));
  for (const ForceSpec& spec : presets) {
    for (int k = 0; k < 10; ++k) {
      const StateOfMotion s = random_state(rng, 3);
      const LagrangianFn l = lagrangian_preset(spec, {1.0, 1.5, 0.7});
      const InfinitesimalMotion fam{rng.antisymmetric(3, 1.0), rng.uniform_vector(3, -1, 1)};
      const double lhs = pair_contract(dl_form(l, s), r_from_infinitesimal(fam, Metric::euclidean3()));
      EXPECT_NEAR(lhs, dh_L(l, s, fam), 1e-6);
      EXPECT_NEAR(lhs, pair_contract(dl_form(without_gradient(l), s), r_from_infinitesimal(fam, Metric::euclidean3())),
                  1e-6);
    }
  }
}

TEST(DlForm, FamilyDerivativeIsLinearInTheGenerator) {
  Xoshiro256 rng(64);
  const StateOfMotion s = random_state(rng, 2);
  const LagrangianFn l = lagrangian_preset(single(UniformGravity{9.81}), {1.0, 2.0});
  const InfinitesimalMotion a{rng.antisymmetric(3, 1.0), rng.uniform_vector(3, -1, 1)};
  const InfinitesimalMotion b{rng.antisymmetric(3, 1.0), rng.uniform_vector(3, -1, 1)};
  const InfinitesimalMotion sum{a.omega * 2.0 + b.omega, a.a * 2.0 + b.a};
  EXPECT_NEAR(dh_L(l, s, sum), 2.0 * dh_L(l, s, a) + dh_L(l, s, b), 1e-6);
}

TEST(KIdentity, AnalyticAndNumericGradients) {
  Xoshiro256 rng(65);
  const std::vector<double> m{1.0, 2.0, 0.5};
  const StateOfMotion s = random_state(rng, 3);
  for (const ForceSpec& spec : {ForceSpec{}, single(UniformGravity{9.81}), single(PairwiseSpring{4.0, 1.0})}) {
    const Body b = body_of(s, m, spec);
    const Vec3 o(rng.uniform_vector(3, -1, 1));
    EXPECT_LE(k_identity_check(lagrangian_preset(spec, m), b, s, o), 1e-12);
  }
  StateOfMotion pair;
  pair.x = {Vec3(0, 0, 0), Vec3(1.2, 0.3, -0.4)};
  pair.v = {Vec3::Zero(), Vec3::Zero()};
  const ForceSpec inv = single(InverseSquare{2.0, std::nullopt});
  EXPECT_LE(k_identity_check(without_gradient(lagrangian_preset(inv, {1.0, 3.0})), body_of(pair, {1.0, 3.0}, inv), pair,
                             Vec3(0.5, 0, 0)),
            1e-6);
}

TEST(DlForm, ChartConsistency) {
  Xoshiro256 rng(66);
  const StateOfMotion s = random_state(rng, 3);
  const LagrangianFn l = lagrangian_preset(single(UniformGravity{9.81}), {1.0, 2.0, 3.0});
  const MotionParams chart{rng.rotation3(), rng.uniform_vector(3, -1, 1)};
  EXPECT_LE(max_abs_diff(to_chart(dl_form(l, s), chart), dl_form(l, s, chart)), 1e-10);
}

TEST(Lagrange, InputValidation) {
  EXPECT_THROW(lagrangian_preset({}, {1.0, -1.0}), ValidationError);
  StateOfMotion s;
  s.x.emplace_back(0, 0, 0);
  EXPECT_THROW(validate(s), ShapeError);
  s.v.emplace_back(0, 0, 0);
  EXPECT_THROW(lagrangian_preset({}, {1.0, 1.0})(s), ShapeError);
  EXPECT_THROW(dh_L(lagrangian_preset({}, {1.0}), s, InfinitesimalMotion::zero(3), 0.0), ValidationError);
}
