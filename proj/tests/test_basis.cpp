#include <doctest.h>

#include <cmath>

#include "trom/basis.hpp"
#include "trom/errors.hpp"
#include "test_support.hpp"

using namespace trom;
using namespace trom::testsupport;

namespace {

// largest principal angle between equal-dimension spans, via projector gap
double span_gap(const Matrix& a, const Matrix& b) {
    const Matrix pa = a * (a.transpose() * a).inverse() * a.transpose();
    const Matrix pb = b * (b.transpose() * b).inverse() * b.transpose();
    return max_abs(pa - pb);
}

}  // namespace

TEST_CASE("local core selects through the parameter factor") {
    std::mt19937_64 rng(61);
    const Tensor3 x = random_tensor(rng, 6, 5, 4);
    const TuckerFactors f = hosvd(x, {3, 3, 3});

    const Matrix c1 = local_core(f, GeneralizedIndex::unit(4, 1));
    Matrix expect = Matrix::Zero(3, 3);
    for (Index r = 0; r < 3; ++r) expect += f.s(1, r) * f.core.slice(r);
    CHECK(max_abs(c1 - expect) < 1e-14);

    GeneralizedIndex zero;
    zero.length = 4;
    CHECK(max_abs(local_core(f, zero)) == 0.0);

    GeneralizedIndex e1, e2, mix;
    e1.length = e2.length = mix.length = 4;
    e1.weights = {{0, 1.0}};
    e2.weights = {{2, 1.0}};
    const double a = 0.3, b = -1.7;
    mix.weights = {{0, a}, {2, b}};
    CHECK(max_abs(local_core(f, mix) -
                  (a * local_core(f, e1) + b * local_core(f, e2))) < 1e-12);
}

TEST_CASE("local basis reconstructs a slice through the factor chain") {
    std::mt19937_64 rng(62);
    const Tensor3 x = random_tensor(rng, 7, 5, 4);
    const TuckerFactors f = hosvd(x, {7, 5, 4});  // full ranks: exact factorization
    const GeneralizedIndex e = GeneralizedIndex::unit(4, 2);
    const LocalBasis basis = local_basis(f, e, 5);
    const Matrix rebuilt = basis.u * basis.sigma.asDiagonal() * basis.v.transpose();
    CHECK(max_abs(rebuilt - x.slice(2)) / max_abs(x.slice(2)) < 1e-9);
    CHECK(basis.u_core.rows() == 7);
    CHECK(max_abs(basis.u - f.w * basis.u_core) == 0.0);
}

TEST_CASE("weighted local basis is M-orthonormal and matches the dense route") {
    std::mt19937_64 rng(63);
    const Tensor3 x = random_tensor(rng, 8, 6, 5);
    auto m = std::make_shared<SpdOperator>(random_spd(rng, 8));
    const TuckerFactors f = weighted_hosvd(x, m, {5, 4, 4});

    GeneralizedIndex e;
    e.length = 5;
    e.weights = {{0, 0.4}, {2, 0.6}, {4, -0.2}};

    const LocalBasis basis = local_basis(f, e, 3);
    CHECK(orthonormality_defect(basis.u, *m) < 1e-10);
    for (Index i = 0; i + 1 < basis.sigma.size(); ++i)
        CHECK(basis.sigma[i] >= basis.sigma[i + 1]);

    // dense oracle: weighted SVD of the lifted local matrix W C_mu T^T
    const Matrix xt_mu = f.w * local_core(f, e) * f.t.transpose();
    const ThinSvd dense = thin_svd(m->cholesky().apply(xt_mu));
    for (Index i = 0; i < 3; ++i)
        CHECK(basis.sigma[i] == doctest::Approx(dense.sigma[i]).epsilon(1e-10));

    const LocalBasis one = local_basis(f, e, 1);
    CHECK(one.sigma.size() == 1);
    CHECK(one.sigma[0] == doctest::Approx(dense.sigma[0]).epsilon(1e-10));
    CHECK(std::abs(std::sqrt(m->inner(one.u.col(0), one.u.col(0))) - 1.0) < 1e-10);
}

TEST_CASE("monolithic basis with identity weight is the unfolding svd") {
    std::mt19937_64 rng(64);
    const Tensor3 x = random_tensor(rng, 6, 4, 3);
    const MonolithicBasis basis = monolithic_basis(x, nullptr, 3);
    const ThinSvd svd = thin_svd(x.unfold1_view());
    CHECK(max_abs(basis.u - svd.u.leftCols(3)) < 1e-9);
    CHECK((basis.sigma.head(6) - svd.sigma).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("monolithic basis at full rank has negligible projection error") {
    std::mt19937_64 rng(65);
    const Tensor3 x = random_tensor(rng, 5, 6, 4);
    auto m = std::make_shared<SpdOperator>(random_spd(rng, 5));
    const MonolithicBasis basis = monolithic_basis(x, m, 5);
    CHECK(orthonormality_defect(basis.u, *m) < 1e-10);
    double total = 0.0;
    for (Index s = 0; s < 4; ++s) {
        const double err = projection_error(x.slice(s), basis.u, *m);
        total += err * err;
    }
    CHECK(std::sqrt(total) <= 1e-9 * weighted_frobenius_norm(x, *m));
}

TEST_CASE("monolithic projection error matches the singular tail") {
    std::mt19937_64 rng(66);
    const Tensor3 x = random_tensor(rng, 6, 9, 5);  // T*P > 4N exercises the Gram route
    auto m = std::make_shared<SpdOperator>(random_spd(rng, 6));
    const Index n = 2;
    const MonolithicBasis basis = monolithic_basis(x, m, n);

    double measured_sq = 0.0;
    for (Index s = 0; s < 5; ++s) {
        const double err = projection_error(x.slice(s), basis.u, *m);
        measured_sq += err * err;
    }
    double tail_sq = 0.0;
    for (Index i = n; i < basis.sigma.size(); ++i) tail_sq += basis.sigma[i] * basis.sigma[i];
    CHECK(measured_sq == doctest::Approx(tail_sq).epsilon(1e-8));

    // dense-route cross-check of the Gram singular values
    const ThinSvd dense = thin_svd(m->cholesky().apply(x.unfold1_view()));
    CHECK((basis.sigma.head(6) - dense.sigma).cwiseAbs().maxCoeff() /
              dense.sigma[0] <
          1e-9);
}

TEST_CASE("projection error basics") {
    std::mt19937_64 rng(67);
    const SpdOperator m = random_spd(rng, 6);
    const Matrix u = m_orthonormalize(random_matrix(rng, 6, 3), m);

    const Matrix inside = u * random_matrix(rng, 3, 5);
    CHECK(projection_error(inside, u, m) <= 1e-10 * m.cholesky().apply(inside).norm());

    const Matrix q = random_matrix(rng, 6, 4);
    const Matrix empty(6, 0);
    CHECK(projection_error(q, empty, m) ==
          doctest::Approx(m.cholesky().apply(q).norm()).epsilon(1e-14));

    CHECK_THROWS_AS(projection_error(q, random_matrix(rng, 6, 2), m), NumericalError);
}

TEST_CASE("representation bound holds at training parameters") {
    std::mt19937_64 rng(68);
    const Tensor3 x = random_tensor(rng, 8, 6, 4);
    auto m = std::make_shared<SpdOperator>(random_spd(rng, 8));
    // truncate the state mode only; time/parameter modes stay complete so the
    // residual is M-orthogonal to the factor span
    const TuckerFactors f = weighted_hosvd(x, m, {4, 6, 4});
    const double xnorm = weighted_frobenius_norm(x, *m);

    for (Index s = 0; s < 4; ++s) {
        const GeneralizedIndex e = GeneralizedIndex::unit(4, s);
        const ThinSvd all = thin_svd(local_core(f, e));
        for (Index n : {Index(1), Index(2), Index(3)}) {
            const LocalBasis basis = local_basis(f, e, n);
            const double measured = projection_error(x.slice(s), basis.u, *m);
            double tail = 0.0;
            for (Index i = n; i < all.sigma.size(); ++i) tail += all.sigma[i] * all.sigma[i];
            CHECK(measured * measured <=
                  f.epsilon * f.epsilon * xnorm * xnorm + tail + 1e-8);
        }
    }
}

TEST_CASE("local projection error is monotone in the basis size") {
    std::mt19937_64 rng(69);
    const Tensor3 x = random_tensor(rng, 7, 6, 4);
    auto m = std::make_shared<SpdOperator>(random_spd(rng, 7));
    const TuckerFactors f = weighted_hosvd(x, m, {5, 5, 4});
    const GeneralizedIndex e = GeneralizedIndex::unit(4, 1);
    double prev = std::numeric_limits<double>::infinity();
    for (Index n = 1; n <= 5; ++n) {
        const double err = projection_error(x.slice(1), local_basis(f, e, n).u, *m);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
}

TEST_CASE("scaling the weight leaves the local span unchanged") {
    std::mt19937_64 rng(70);
    const Tensor3 x = random_tensor(rng, 6, 5, 4);
    const Matrix mdense = random_spd(rng, 6).full();
    auto m1 = std::make_shared<SpdOperator>(SpdOperator::dense(mdense));
    auto m2 = std::make_shared<SpdOperator>(SpdOperator::dense(9.0 * mdense));

    GeneralizedIndex e;
    e.length = 4;
    e.weights = {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}};
    const LocalBasis b1 = local_basis(weighted_hosvd(x, m1, {4, 4, 3}), e, 3);
    const LocalBasis b2 = local_basis(weighted_hosvd(x, m2, {4, 4, 3}), e, 3);
    CHECK(span_gap(b1.u, b2.u) < 1e-8);
    // columns rescale by c^{-1/2}
    CHECK(max_abs(3.0 * b2.u - b1.u) < 1e-8 * max_abs(b1.u));
}

TEST_CASE("cotangent lift layout") {
    std::mt19937_64 rng(71);
    const Matrix q = random_matrix(rng, 4, 3);
    const Matrix zero = Matrix::Zero(4, 3);
    const Matrix lifted = cotangent_lift_snapshots(q, zero);
    CHECK(lifted.rows() == 4);
    CHECK(lifted.cols() == 6);
    CHECK(max_abs(lifted.leftCols(3) - q) == 0.0);
    CHECK(max_abs(lifted.rightCols(3)) == 0.0);

    const Matrix same = cotangent_lift_snapshots(q, q);
    CHECK(Eigen::FullPivLU<Matrix>(same).rank() == Eigen::FullPivLU<Matrix>(q).rank());

    CHECK_THROWS_AS(cotangent_lift_snapshots(q, random_matrix(rng, 4, 2)), UsageError);
}

TEST_CASE("curl enrichment restores closure") {
    std::mt19937_64 rng(72);
    const Index n_e = 8, n_b = 6, r = 2;
    const SpdOperator m_e = random_spd(rng, n_e);
    const SpdOperator m_b = random_spd(rng, n_b);
    const Matrix delta = random_matrix(rng, n_b, n_e);
    const Matrix u_e = m_orthonormalize(random_matrix(rng, n_e, r), m_e);
    const Matrix u_b = m_orthonormalize(random_matrix(rng, n_b, r), m_b);

    const auto [enr_e, enr_b] = curl_enrich(u_e, u_b, delta, m_e, m_b);
    CHECK(orthonormality_defect(enr_e, m_e) < 1e-10);
    CHECK(orthonormality_defect(enr_b, m_b) < 1e-10);
    CHECK(enr_e.cols() <= 2 * r);
    CHECK(enr_b.cols() <= 2 * r);

    // before enrichment the curl image leaks out of the magnetic span
    const Matrix image = delta * u_e;
    const double leak_before = projection_error(image, u_b, m_b);
    CHECK(leak_before > 1e-6);
    CHECK(projection_error(image, enr_b, m_b) <= 1e-9);
    // and the adjoint image lands inside the enriched electric span
    const Matrix adj_image = delta.transpose() * m_b.apply(u_b);
    CHECK(projection_error(adj_image, enr_e, m_e) <= 1e-9 * adj_image.norm());

    SUBCASE("zero curl adds nothing") {
        const auto [ze, zb] = curl_enrich(u_e, u_b, Matrix::Zero(n_b, n_e), m_e, m_b);
        CHECK(ze.cols() == r);
        CHECK(zb.cols() == r);
        CHECK(span_gap(ze, u_e) < 1e-10);
    }
}
