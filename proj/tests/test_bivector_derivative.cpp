#include <gtest/gtest.h>

#include "fivevec/bivector_derivative.hpp"
#include "fivevec/random.hpp"

using namespace fivevec;

namespace {

Polynomial mono(std::vector<int> e, double c = 1.0) { return Polynomial::monomial(e, c); }

ExtTensor unit_p(const Metric& g, int a, int b) { return unit_bivector(Frame::p_basis(g), a, b); }

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

// Every monomial of total degree ≤ 3 in n variables.
std::vector<Polynomial> monomials_up_to_3(int n) {
  std::vector<Polynomial> out;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  const int total = 1 << (2 * n);
  for (int code = 0; code < total; ++code) {
    int s = 0, r = code;
    for (int k = 0; k < n; ++k) {
      e[static_cast<std::size_t>(k)] = r % 4;
      s += r % 4;
      r /= 4;
    }
    if (s <= 3) out.push_back(mono(e));
  }
  return out;
}

// Pointwise oracle for D_{AB} on a scalar from the gradient: ∂_μ f for (μ,5),
// x_ν ∂_μ f − x_μ ∂_ν f for (μ,ν).
double scalar_oracle(const Metric& g, const Polynomial& f, int a, int b, const VectorXd& x) {
  const int n = g.dim();
  VectorXd grad(n);
  for (int k = 0; k < n; ++k) grad(k) = f.derivative(k)(x);
  const VectorXd xl = g.g() * x;
  if (a == b) return 0.0;
  if (b == n) return grad(a);
  if (a == n) return -grad(b);
  return xl(b) * grad(a) - xl(a) * grad(b);
}

}  // namespace

TEST(BivectorDerivative, CoordinateFunctionExamples) {
  const Metric g = Metric::euclidean3();
  const PolyField f = PolyField::scalar(Polynomial::coordinate(3, 0));
  EXPECT_EQ(d_scalar(f, unit_p(g, 0, 3)), PolyField::scalar(Polynomial::constant(3, 1.0)));
  EXPECT_EQ(d_scalar(f, unit_p(g, 0, 1)), PolyField::scalar(Polynomial::coordinate(3, 1)));

  const Metric m = Metric::minkowski4();
  const PolyField f4 = PolyField::scalar(Polynomial::coordinate(4, 1));
  // x_2 lowered with (+,−,−,−)
  EXPECT_EQ(d_scalar(f4, unit_p(m, 1, 2)), PolyField::scalar(mono({0, 0, 1, 0}, -1.0)));

  const PolyField c = PolyField::scalar(Polynomial::constant(3, 4.2));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) EXPECT_TRUE(d_scalar(c, unit_p(g, a, b)).comps[0].is_zero());
}

TEST(BivectorDerivative, GeneratorsMatchGradientOracleOnMonomials) {
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const int n = g.dim();
    const auto pts = sample_grid(n);
    for (const Polynomial& p : monomials_up_to_3(n)) {
      for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) {
          const Polynomial d = d_generator_scalar(g, p, a, b);
          for (std::size_t k = 0; k < pts.size(); k += 7) EXPECT_EQ(d(pts[k]), scalar_oracle(g, p, a, b, pts[k]));
        }
    }
  }
}

TEST(BivectorDerivative, LinearityLeibnizAntisymmetry) {
  Xoshiro256 rng(41);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const int n = g.dim();
    const auto monos = monomials_up_to_3(n);
    for (int k = 0; k < 20; ++k) {
      // integer coefficients keep every product exact in floating point
      const Polynomial p = monos[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(monos.size()) - 1))] *
                           static_cast<double>(rng.uniform_int(-3, 3));
      const Polynomial q = monos[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(monos.size()) - 1))] *
                           static_cast<double>(rng.uniform_int(-3, 3));
      const int a = rng.uniform_int(0, n), b = rng.uniform_int(0, n);
      EXPECT_EQ(d_generator_scalar(g, p + q, a, b), d_generator_scalar(g, p, a, b) + d_generator_scalar(g, q, a, b));
      EXPECT_EQ(d_generator_scalar(g, p * q, a, b),
                p * d_generator_scalar(g, q, a, b) + q * d_generator_scalar(g, p, a, b));
      EXPECT_EQ(d_generator_scalar(g, p, a, b), -d_generator_scalar(g, p, b, a));
    }
  }
}

TEST(BivectorDerivative, BasisFieldsAndVectorLeibniz) {
  const Metric g = Metric::minkowski4();
  for (int al = 0; al < 4; ++al) {
    const PolyField e = PolyField::basis_field(4, al);
    for (int mu = 0; mu < 4; ++mu) {
      for (const auto& c : d_vector(e, unit_p(g, mu, 4)).comps) EXPECT_TRUE(c.is_zero());
      for (int nu = 0; nu < 4; ++nu) {
        if (mu == nu) continue;
        const MatrixXd m = lorentz_generator(g, mu, nu);
        const PolyField got = d_vector(e, unit_p(g, mu, nu));
        for (int be = 0; be < 4; ++be) EXPECT_EQ(got.comps[static_cast<std::size_t>(be)], Polynomial::constant(4, m(be, al)));
      }
    }
  }
  // u = x² E_0 under the rotation slot (1,2)
  const Metric e3 = Metric::euclidean3();
  const Polynomial f = Polynomial::coordinate(3, 1);
  const PolyField base = PolyField::basis_field(3, 0);
  const PolyField lhs = d_vector(f * base, unit_p(e3, 0, 1));
  const PolyField rhs = d_scalar(PolyField::scalar(f), unit_p(e3, 0, 1)).comps[0] * base + f * d_vector(base, unit_p(e3, 0, 1));
  EXPECT_EQ(lhs, rhs);
}

TEST(BivectorDerivative, ConstantComponentsAreTranslationFree) {
  // D_{μ5} of a field with constant components is zero for every μ
  const Metric g = Metric::euclidean3();
  const PolyField u = PolyField::vector({Polynomial::constant(3, 1), Polynomial::constant(3, -2), Polynomial::constant(3, 5)});
  for (int mu = 0; mu < 3; ++mu)
    for (const auto& c : d_vector(u, unit_p(g, mu, 3)).comps) EXPECT_TRUE(c.is_zero());
}

TEST(BivectorDerivative, OBasisArgumentUsesItsAnchor) {
  // e_1∧e_5 at x equals p_1∧p_5 in P components; ⟨Df, ·⟩ therefore gives ∂_1 f
  const Metric g = Metric::euclidean3();
  const Frame o = Frame::o_basis(g, vec({1, 2, 3}));
  const ExtTensor arg = wedge(basis_vector(o, 0), basis_vector(o, 3));
  const PolyField f = PolyField::scalar(mono({2, 0, 0}));
  EXPECT_EQ(d_scalar(f, arg), PolyField::scalar(mono({1, 0, 0}, 2.0)));
  EXPECT_EQ(d_form(g, f).contract(arg), d_scalar(f, arg));
}

TEST(DerivativeForm, ValuesAndContraction) {
  const Metric g = Metric::minkowski4();
  const PolyField f = PolyField::scalar(mono({0, 1, 0, 0}));
  const DerivativeForm form = d_form(g, f);
  const auto at = form.at(vec({0.5, 1, 2, -1}));
  ASSERT_EQ(at.size(), 1u);
  EXPECT_EQ(at[0](1, 4), 1.0);
  EXPECT_EQ(at[0](4, 1), -1.0);
  EXPECT_EQ(at[0](1, 2), -2.0);
  const PolyField cst = PolyField::scalar(Polynomial::constant(4, 3.0));
  EXPECT_EQ(d_form(g, cst).at(vec({1, 1, 1, 1}))[0].max_abs(), 0.0);
  EXPECT_THROW(d_form(Metric::euclidean3(), f), ShapeError);
}

TEST(RPartial, DegreeTwoWithinBound) {
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const int n = g.dim();
    EXPECT_LE(r_partial_check(g, PolyField::scalar(Polynomial::coordinate(n, 0)), 0, n, 1e-4), 1e-7);
    EXPECT_EQ(r_partial_check(g, PolyField::scalar(Polynomial::constant(n, 2.0)), 0, 1, 1e-4), 0.0);
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[0] = e[1] = 1;
    EXPECT_LE(r_partial_check(g, PolyField::scalar(mono(e)), 0, 1, 1e-4), 1e-7);
    const PolyField u = Polynomial::coordinate(n, 1) * PolyField::basis_field(n, 0);
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) EXPECT_LE(r_partial_check(g, u, a, b, 1e-4), 1e-7);
  }
}

TEST(RPartial, DegreeThreeConvergesQuadratically) {
  const Metric g = Metric::euclidean3();
  const PolyField f = PolyField::scalar(mono({2, 1, 0}));
  const double r1 = r_partial_check(g, f, 0, 1, 1e-2);
  const double r2 = r_partial_check(g, f, 0, 1, 5e-3);
  EXPECT_NEAR(r1 / r2, 4.0, 0.2);
}

TEST(RPartial, RejectsTinyStep) {
  const Metric g = Metric::euclidean3();
  EXPECT_THROW(r_partial_check(g, PolyField::scalar(Polynomial::coordinate(3, 0)), 0, 3, 1e-8), ValidationError);
  EXPECT_THROW(r_partial_check(g, PolyField::scalar(Polynomial::coordinate(3, 0)), 1, 1, 1e-4), ValidationError);
}

TEST(PullBack, RotatesVectorField) {
  // quarter turn about z applied to U = (x¹, 0, 0)
  const Metric g = Metric::euclidean3();
  MatrixXd l = MatrixXd::Zero(3, 3);
  l(0, 1) = 1;
  l(1, 0) = -1;
  l(2, 2) = 1;
  const MotionTensor t = t_from_params(MotionParams{l, VectorXd::Zero(3)}, g);
  const PolyField u = PolyField::vector({Polynomial::coordinate(3, 0), Polynomial(3), Polynomial(3)});
  const PolyField moved = pull_back(u, t);
  Xoshiro256 rng(2);
  for (int k = 0; k < 10; ++k) {
    const VectorXd x = rng.uniform_vector(3, -2, 2);
    const VectorXd src = t.point_map().inverse()(x);
    const VectorXd expect = t.lambda() * u(src);
    EXPECT_LE((moved(x) - expect).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_EQ(pull_back(u, identity_motion(g)), u);
}

TEST(Connection, LorentzPairReproducesGenerators) {
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const int n = g.dim();
    const ConnectionTable direct = connection_coeffs(g, constant_poly_matrix(n, MatrixXd::Identity(n, n)),
                                                     five_basis_matrix(g, FiveBasisKind::standard_associated),
                                                     VectorXd::Constant(n, 0.7));
    EXPECT_EQ(max_abs_diff(direct, lorentz_connection(g)), 0.0);
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        for (int a = 0; a < n; ++a) EXPECT_EQ(direct(mu, nu, a, n), 0.0);
  }
}

TEST(Connection, ActiveRegularFiveBasis) {
  const Metric g = Metric::euclidean3();
  const VectorXd x = vec({1, -2, 0.5});
  const PolyMatrix four = constant_poly_matrix(3, MatrixXd::Identity(3, 3));
  const ConnectionTable direct = connection_coeffs(g, four, five_basis_matrix(g, FiveBasisKind::active_regular), x);
  const ConnectionTable lor = lorentz_connection(g);
  // e_α∧e_β = p_α∧p_β − x_β p_α∧p_5 + x_α p_β∧p_5, and translations do not act on constant E_ν
  EXPECT_LE(max_abs_diff(direct, lor), 0.0);
  const ConnectionTable via = transform_connection(g, lor, five_basis_matrix(g, FiveBasisKind::standard_associated), four,
                                                   five_basis_matrix(g, FiveBasisKind::active_regular), x);
  EXPECT_LE(max_abs_diff(direct, via), 1e-12);
}

TEST(Connection, TransformationLawAgreesWithDirectRoute) {
  Xoshiro256 rng(44);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const int n = g.dim();
    // unipotent polynomial four-basis Λ(x) = 1 + strictly upper-triangular polynomials
    PolyMatrix lam = constant_poly_matrix(n, MatrixXd::Identity(n, n));
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) {
        lam[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            Polynomial::coordinate(n, rng.uniform_int(0, n - 1)) * rng.uniform(-1, 1) +
            Polynomial::constant(n, rng.uniform(-1, 1));
      }
    const PolyMatrix std5 = five_basis_matrix(g, FiveBasisKind::standard_associated);
    const PolyMatrix act5 = five_basis_matrix(g, FiveBasisKind::active_regular);
    for (int k = 0; k < 5; ++k) {
      const VectorXd x = rng.uniform_vector(n, -2, 2);
      const ConnectionTable direct = connection_coeffs(g, lam, act5, x);
      const ConnectionTable via = transform_connection(g, lorentz_connection(g), std5, lam, act5, x);
      EXPECT_LE(max_abs_diff(direct, via), 1e-12);
    }
  }
}

TEST(ChartIndependence, FormTransformsWithTheChart) {
  Xoshiro256 rng(52);
  for (const Metric& g : {Metric::euclidean3(), Metric::minkowski4()}) {
    const int n = g.dim();
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[0] = 2;
    e[static_cast<std::size_t>(n - 1)] = 1;
    const PolyField u = (mono(e) + Polynomial::coordinate(n, 1)) * PolyField::basis_field(n, 1) +
                        PolyField::basis_field(n, 0);
    const MotionParams chart{rng.isometry(g), rng.uniform_vector(n, -1, 1)};
    const VectorXd x = rng.uniform_vector(n, -1, 1);
    const VectorXd y = chart.L * x + chart.a;
    const auto mapped = form_values_in_chart(d_form(g, u).at(x), chart);
    const auto direct = d_form(g, field_in_chart(u, chart)).at(y);
    for (std::size_t k = 0; k < mapped.size(); ++k) EXPECT_LE(max_abs_diff(mapped[k], direct[k]), 1e-10);
  }
}
