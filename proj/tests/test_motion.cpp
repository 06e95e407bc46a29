#include <numbers>

#include <gtest/gtest.h>

#include "fivevec/motion.hpp"
#include "fivevec/random.hpp"

using namespace fivevec;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

double max_diff(const MatrixXd& a, const MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

MatrixXd rot_z(double th) {
  MatrixXd r = MatrixXd::Identity(3, 3);
  r(0, 0) = std::cos(th);
  r(0, 1) = -std::sin(th);
  r(1, 0) = std::sin(th);
  r(1, 1) = std::cos(th);
  return r;
}

InfinitesimalMotion random_rates(Xoshiro256& rng, const Metric& g) {
  return {rng.antisymmetric(g.dim(), 1.0), rng.uniform_vector(g.dim(), -1, 1)};
}

}  // namespace

TEST(MotionTensor, IdentityAndTranslation) {
  const Metric g = Metric::minkowski4();
  EXPECT_EQ(identity_motion(g).comps(), MatrixXd::Identity(5, 5));
  const VectorXd a = vec({1, 2, -3, 0.5});
  const MotionTensor t = t_from_params(MotionParams::translation(a), g);
  EXPECT_EQ(t.lambda(), MatrixXd::Identity(4, 4));
  // T^5_β = a_β lowered with (+,−,−,−)
  EXPECT_EQ(t.a_lower(), vec({1, -2, 3, -0.5}));
  EXPECT_EQ(t.comps()(4, 4), 1.0);
  EXPECT_EQ(t.params().a, a);
}

TEST(MotionTensor, RejectsNonIsometry) {
  MatrixXd l = MatrixXd::Identity(3, 3);
  l(0, 0) = 2.0;
  EXPECT_THROW(t_from_params(MotionParams{l, VectorXd::Zero(3)}, Metric::euclidean3()), ValidationError);
  MatrixXd bad = MatrixXd::Identity(4, 4);
  bad(0, 3) = 1.0;
  EXPECT_THROW(MotionTensor(Frame::p_basis(Metric::euclidean3()), bad), ValidationError);
  EXPECT_THROW(MotionTensor(Frame::o_basis(Metric::euclidean3()), MatrixXd::Identity(4, 4)), ContractViolation);
}

TEST(MotionTensor, InverseAndCompose) {
  Xoshiro256 rng(1);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    for (int k = 0; k < 20; ++k) {
      const MotionParams p{rng.isometry(g), rng.uniform_vector(g.dim(), -3, 3)};
      const MotionTensor t = t_from_params(p, g);
      EXPECT_LE(max_diff(compose(t, t.inverse()).comps(), MatrixXd::Identity(g.ext_dim(), g.ext_dim())), 1e-12);
      EXPECT_LE(max_diff(compose(t, identity_motion(g)).comps(), t.comps()), 0.0);
      // inverse fifth row −a_γ L^γ_β
      const VectorXd expect = -(g.lower(p.a).transpose() * p.L).transpose();
      EXPECT_LE((t.inverse_comps().row(g.dim()).head(g.dim()).transpose() - expect).cwiseAbs().maxCoeff(), 1e-12);

      // coordinate composition x ↦ L2 (L1 x + a1) + a2
      const MotionParams q{rng.isometry(g), rng.uniform_vector(g.dim(), -3, 3)};
      const MotionParams composed{q.L * p.L, q.L * p.a + q.a};
      EXPECT_LE(max_diff(compose(t, t_from_params(q, g)).comps(), t_from_params(composed, g).comps()), 1e-12);
    }
  }
}

TEST(MotionTensor, TranslationsAdd) {
  const Metric g = Metric::euclidean3();
  const VectorXd a = vec({1, 0, 2}), b = vec({-3, 4, 0.5});
  const MotionTensor ab = compose(t_from_params(MotionParams::translation(a), g),
                                  t_from_params(MotionParams::translation(b), g));
  EXPECT_EQ(ab.comps(), t_from_params(MotionParams::translation(a + b), g).comps());
}

TEST(ApplyMotion, BasisImages) {
  const Metric g = Metric::minkowski4();
  const Frame f = Frame::p_basis(g);
  Xoshiro256 rng(4);
  const MotionTensor t = t_from_params(MotionParams{rng.isometry(g), rng.uniform_vector(4, -2, 2)}, g);
  EXPECT_EQ(apply_motion(t, basis_vector(f, 4)).as_vector(), vec({0, 0, 0, 0, 1}));

  const VectorXd a = vec({0.5, -1, 2, 3});
  const MotionTensor tr = t_from_params(MotionParams::translation(a), g);
  const VectorXd a_low = g.lower(a);
  for (int al = 0; al < 4; ++al) {
    VectorXd expect = VectorXd::Zero(5);
    expect(al) = 1.0;
    expect(4) = a_low(al);
    EXPECT_EQ(apply_motion(tr, basis_vector(f, al)).as_vector(), expect);
  }
  const ExtTensor v = ExtTensor::vector(f, rng.uniform_vector(5, -1, 1));
  EXPECT_EQ(apply_motion(identity_motion(g), v).as_vector(), v.as_vector());
}

TEST(ApplyMotion, FormsPairConsistently) {
  // <w T, v> = <w, T v>, and mapping the primed dual basis returns the old one
  const Metric g = Metric::euclidean3();
  Xoshiro256 rng(8);
  const MotionTensor t = t_from_params(MotionParams{rng.isometry(g), rng.uniform_vector(3, -2, 2)}, g);
  const ExtTensor w = ExtTensor::covector(t.frame(), rng.uniform_vector(4, -1, 1));
  const ExtTensor v = ExtTensor::vector(t.frame(), rng.uniform_vector(4, -1, 1));
  EXPECT_NEAR(apply_motion(t, w).as_vector().dot(v.as_vector()), w.as_vector().dot(apply_motion(t, v).as_vector()), 1e-12);
  EXPECT_THROW(apply_motion(t, ExtTensor::vector(Frame::o_basis(g), VectorXd::Zero(4))), ContractViolation);
  EXPECT_THROW(apply_motion(t, ExtTensor::identity(t.frame())), ShapeError);
}

TEST(Infinitesimal, RFromRates) {
  const Metric e = Metric::euclidean3();
  const ExtTensor r = r_from_infinitesimal({MatrixXd::Zero(3, 3), vec({1, 0, 0})}, e);
  MatrixXd expect = MatrixXd::Zero(4, 4);
  expect(0, 3) = 1;
  expect(3, 0) = -1;
  EXPECT_EQ(r.as_matrix(), expect);

  const Metric m = Metric::minkowski4();
  MatrixXd om = MatrixXd::Zero(4, 4);
  om(0, 1) = 0.3;
  om(1, 0) = -0.3;
  om(1, 2) = 0.7;
  om(2, 1) = -0.7;
  const ExtTensor rm = r_from_infinitesimal({om, VectorXd::Zero(4)}, m);
  // raising a time and a space index flips sign, two space indices keep it
  EXPECT_EQ(rm(0, 1), -0.3);
  EXPECT_EQ(rm(1, 2), 0.7);
  EXPECT_EQ(rm(2, 1), -0.7);
  EXPECT_EQ(r_from_infinitesimal(InfinitesimalMotion::zero(4), m).as_matrix(), MatrixXd::Zero(5, 5));
  om(0, 1) = 0.31;
  EXPECT_THROW(r_from_infinitesimal({om, VectorXd::Zero(4)}, m), ValidationError);
}

TEST(Infinitesimal, SFromRMatchesComponentPattern) {
  Xoshiro256 rng(12);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    for (int k = 0; k < 30; ++k) {
      const InfinitesimalMotion m = random_rates(rng, g);
      const ExtTensor r = r_from_infinitesimal(m, g);
      const MatrixXd s = s_from_r(r).as_matrix();
      const int n = g.dim();
      MatrixXd expect = MatrixXd::Zero(n + 1, n + 1);
      expect.topLeftCorner(n, n) = g.g_inv() * m.omega;
      expect.row(n).head(n) = -g.lower(m.a).transpose();
      EXPECT_LE(max_diff(s, expect), 1e-15);
      const InfinitesimalMotion back = infinitesimal_from_r(r);
      EXPECT_LE(max_diff(back.omega, m.omega), 1e-15);
      EXPECT_LE((back.a - m.a).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Infinitesimal, FirstOrderAgreesWithFiniteMotion) {
  // 1 − S ε versus t_from_params(exp(ε ω), ε a): residual shrinks like ε²
  const Metric g = Metric::euclidean3();
  Xoshiro256 rng(6);
  const InfinitesimalMotion m = random_rates(rng, g);
  const MatrixXd s = s_from_r(r_from_infinitesimal(m, g)).as_matrix();
  double prev = 0.0;
  for (double eps : {1e-2, 1e-3}) {
    const MatrixXd l = (g.g_inv() * m.omega * eps).exp();
    const MotionTensor t = t_from_params(MotionParams{l, m.a * eps}, g);
    const double res = max_diff(t.comps(), MatrixXd::Identity(4, 4) - s * eps);
    if (prev > 0.0) EXPECT_NEAR(prev / res, 100.0, 5.0);
    prev = res;
  }
}

TEST(ExpMotion, ZeroTimeTranslationRotation) {
  const Metric g = Metric::euclidean3();
  Xoshiro256 rng(3);
  EXPECT_LE(max_diff(exp_motion(random_rates(rng, g), g, 0.0).comps(), MatrixXd::Identity(4, 4)), 0.0);

  const VectorXd a = vec({1, -2, 0.5});
  const MotionTensor tr = exp_motion({MatrixXd::Zero(3, 3), a}, g, 2.0);
  EXPECT_EQ(tr.lambda(), MatrixXd::Identity(3, 3));
  // points move by −a t under these rates
  EXPECT_LE((tr.point_map()(vec({0, 0, 0})) + 2.0 * a).cwiseAbs().maxCoeff(), 1e-15);

  const MatrixXd om = dual3_inverse(Eigen::Vector3d(0, 0, 1));
  const MotionTensor rot = exp_motion({om, VectorXd::Zero(3)}, g, std::numbers::pi / 2);
  EXPECT_LE(max_diff(rot.lambda(), rot_z(std::numbers::pi / 2)), 1e-12);
}

TEST(ExpMotion, OneParameterGroupAndDerivative) {
  Xoshiro256 rng(10);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const InfinitesimalMotion m = random_rates(rng, g);
    const MotionTensor sum = exp_motion(m, g, 0.7 + 1.1);
    const MotionTensor prod = compose(exp_motion(m, g, 0.7), exp_motion(m, g, 1.1));
    EXPECT_LE(max_diff(sum.comps(), prod.comps()), 1e-10);
    const double h = 1e-6;
    const MatrixXd deriv = (exp_motion(m, g, h).comps() - exp_motion(m, g, -h).comps()) / (2 * h);
    EXPECT_LE(max_diff(deriv, -s_from_r(r_from_infinitesimal(m, g)).as_matrix()), 1e-8);
  }
}

TEST(ExpMotion, OverflowGuard) {
  const Metric g = Metric::euclidean3();
  MatrixXd om = MatrixXd::Zero(3, 3);
  om(0, 1) = 1e3;
  om(1, 0) = -1e3;
  EXPECT_THROW(exp_motion({om, VectorXd::Zero(3)}, g, 1e3), std::overflow_error);
}

TEST(MotionTensor, CovariantlyConstantAndFrameIndependent) {
  Xoshiro256 rng(21);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const MotionTensor t = t_from_params(MotionParams{rng.isometry(g), rng.uniform_vector(g.dim(), -2, 2)}, g);
    const ExtTensor moved = transport_tensor(to_o_basis(t.as_tensor(), rng.uniform_vector(g.dim(), -3, 3)),
                                             rng.uniform_vector(g.dim(), -3, 3));
    EXPECT_LE(max_abs_diff(to_p_basis(moved), t.as_tensor()), 1e-12);

    // the same active motion described from a second chart y = Q x + b, re-expressed back
    const MotionParams chart{rng.isometry(g), rng.uniform_vector(g.dim(), -2, 2)};
    const MotionTensor t2 = t_from_params(reexpress_params(t.params(), chart), g);
    EXPECT_LE(max_abs_diff(to_chart(t.as_tensor(), chart), t2.as_tensor()), 1e-10);
  }
}

TEST(MotionTensor, ContravariantRepresentationIsHomogeneousMatrix) {
  Xoshiro256 rng(30);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const MotionParams p{rng.isometry(g), rng.uniform_vector(g.dim(), -2, 2)};
    const MotionTensor t = t_from_params(p, g);
    EXPECT_LE(max_diff(contravariant_components(t).transpose(), homogeneous_matrix(p)), 1e-12);
  }
}
