#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "trom/errors.hpp"
#include "trom/interp.hpp"
#include "trom/io.hpp"
#include "trom/kernels.hpp"
#include "trom/tensor.hpp"
#include "test_support.hpp"

using namespace trom;
using namespace trom::testsupport;

namespace {

// X[i,alpha,s] = i + 2(alpha-1) + 4(s-1), 1-based
Tensor3 counting_tensor_222() {
    std::vector<double> data = {1, 2, 3, 4, 5, 6, 7, 8};
    return Tensor3(2, 2, 2, std::move(data));
}

}  // namespace

TEST_CASE("mode-1 unfolding matches the index formula") {
    const Tensor3 x = counting_tensor_222();
    const Unfolding u = mode_k_unfold(x, 1);
    Matrix expect(2, 4);
    expect << 1, 3, 5, 7, 2, 4, 6, 8;
    CHECK(max_abs(u.matrix - expect) == 0.0);
}

TEST_CASE("mode-2 unfolding matches the index formula") {
    const Tensor3 x = counting_tensor_222();
    const Unfolding u = mode_k_unfold(x, 2);
    Matrix expect(2, 4);
    expect << 1, 2, 5, 6, 3, 4, 7, 8;
    CHECK(max_abs(u.matrix - expect) == 0.0);
}

TEST_CASE("mode-3 unfolding and fold round trip") {
    const Tensor3 x = counting_tensor_222();
    const Unfolding u = mode_k_unfold(x, 3);
    Matrix expect(2, 4);
    expect << 1, 2, 3, 4, 5, 6, 7, 8;
    CHECK(max_abs(u.matrix - expect) == 0.0);
    const Tensor3 back = mode_k_fold(u.matrix, 3, x.dims());
    CHECK(back.data() == x.data());
}

TEST_CASE("unfold/fold round trips are bit-exact for all modes") {
    std::mt19937_64 rng(11);
    for (const auto dims : {std::array<Index, 3>{5, 4, 3}, {7, 2, 6}, {1, 5, 4}}) {
        const Tensor3 x = random_tensor(rng, dims[0], dims[1], dims[2]);
        for (int mode = 1; mode <= 3; ++mode) {
            const Tensor3 back = mode_k_fold(mode_k_unfold(x, mode).matrix, mode, x.dims());
            CHECK(back.data() == x.data());
        }
    }
}

TEST_CASE("fold of a zero matrix gives the zero tensor") {
    const Tensor3 z = mode_k_fold(Matrix::Zero(3, 8), 2, {4, 3, 2});
    for (double v : z.data()) CHECK(v == 0.0);
}

TEST_CASE("fold recovers the tensor from its unfolding") {
    Matrix m(2, 4);
    m << 1, 3, 5, 7, 2, 4, 6, 8;
    const Tensor3 x = mode_k_fold(m, 1, {2, 2, 2});
    CHECK(x.data() == counting_tensor_222().data());
}

TEST_CASE("mode product with identity and zero") {
    std::mt19937_64 rng(12);
    const Tensor3 x = random_tensor(rng, 4, 3, 5);
    for (int mode = 1; mode <= 3; ++mode) {
        const Index dim = x.dims()[static_cast<size_t>(mode - 1)];
        const Tensor3 same = mode_product(x, Matrix::Identity(dim, dim), mode);
        CHECK(max_abs(mode_k_unfold(same, 1).matrix - mode_k_unfold(x, 1).matrix) < 1e-15);
        const Tensor3 zero = mode_product(x, Matrix::Zero(2, dim), mode);
        CHECK(frobenius_norm(zero) == 0.0);
    }
}

TEST_CASE("mode product row-sum contraction") {
    const Tensor3 x = counting_tensor_222();
    Matrix ones(1, 2);
    ones << 1, 1;
    const Tensor3 y = mode_product(x, ones, 1);
    CHECK(y.dims() == std::array<Index, 3>{1, 2, 2});
    for (Index s = 0; s < 2; ++s)
        for (Index alpha = 0; alpha < 2; ++alpha)
            CHECK(y(0, alpha, s) == x(0, alpha, s) + x(1, alpha, s));
}

TEST_CASE("mode product agrees with the unfolding identity") {
    std::mt19937_64 rng(13);
    const Tensor3 x = random_tensor(rng, 5, 4, 3);
    for (int mode = 1; mode <= 3; ++mode) {
        const Index dim = x.dims()[static_cast<size_t>(mode - 1)];
        const Matrix a = random_matrix(rng, 3, dim);
        const Tensor3 y = mode_product(x, a, mode);
        CHECK(max_abs(mode_k_unfold(y, mode).matrix - a * mode_k_unfold(x, mode).matrix) < 1e-13);
    }
}

TEST_CASE("orthogonal mode products preserve the Frobenius norm") {
    std::mt19937_64 rng(14);
    const Tensor3 x = random_tensor(rng, 6, 5, 4);
    for (int mode = 1; mode <= 3; ++mode) {
        const Index dim = x.dims()[static_cast<size_t>(mode - 1)];
        const Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, dim, dim));
        const Matrix q = qr.householderQ();
        const Tensor3 y = mode_product(x, q, mode);
        CHECK(frobenius_norm(y) == doctest::Approx(frobenius_norm(x)).epsilon(1e-12));
    }
}

TEST_CASE("contract_parameter selects and blends slices") {
    const Tensor3 x = counting_tensor_222();
    const Matrix s1 = contract_parameter(x, GeneralizedIndex::unit(2, 1));
    CHECK(max_abs(s1 - x.slice(1)) == 0.0);

    GeneralizedIndex zero;
    zero.length = 2;
    CHECK(max_abs(contract_parameter(x, zero)) == 0.0);

    GeneralizedIndex blend;
    blend.length = 2;
    blend.weights = {{0, 0.5}, {1, 0.5}};
    const Matrix avg = contract_parameter(x, blend);
    CHECK(max_abs(avg - 0.5 * (x.slice(0) + x.slice(1))) < 1e-15);
}

TEST_CASE("contract_parameter is linear in the index") {
    std::mt19937_64 rng(15);
    const Tensor3 x = random_tensor(rng, 4, 3, 6);
    GeneralizedIndex e1, e2, mix;
    e1.length = e2.length = mix.length = 6;
    e1.weights = {{0, 0.3}, {2, -1.1}};
    e2.weights = {{1, 0.7}, {2, 0.4}, {5, 2.0}};
    const double a = 1.7, b = -0.6;
    mix.weights = {{0, a * 0.3}, {1, b * 0.7}, {2, a * -1.1 + b * 0.4}, {5, b * 2.0}};
    const Matrix lhs = contract_parameter(x, mix);
    const Matrix rhs = a * contract_parameter(x, e1) + b * contract_parameter(x, e2);
    CHECK(max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("weighted Frobenius norm") {
    std::mt19937_64 rng(16);
    const Tensor3 x = random_tensor(rng, 6, 4, 3);

    SUBCASE("identity weight equals the plain norm") {
        const SpdOperator eye = SpdOperator::identity(6);
        CHECK(weighted_frobenius_norm(x, eye) ==
              doctest::Approx(frobenius_norm(x)).epsilon(1e-14));
    }
    SUBCASE("zero tensor") {
        const Tensor3 z(6, 4, 3);
        CHECK(weighted_frobenius_norm(z, random_spd(rng, 6)) == 0.0);
    }
    SUBCASE("diagonal scaling of a single entry") {
        const Tensor3 one(1, 1, 1, {3.0});
        const SpdOperator m = SpdOperator::diagonal(Vector::Constant(1, 4.0));
        CHECK(weighted_frobenius_norm(one, m) == doctest::Approx(6.0).epsilon(1e-15));
    }
    SUBCASE("equals the norm of R applied along mode 1") {
        const SpdOperator m = random_spd(rng, 6);
        const Tensor3 rx = mode_product(x, m.cholesky().dense(), 1);
        CHECK(weighted_frobenius_norm(x, m) ==
              doctest::Approx(frobenius_norm(rx)).epsilon(1e-12));
    }
}

TEST_CASE("serial and OpenMP kernels agree bit-exactly") {
    std::mt19937_64 rng(17);
    const Index n = 9, t = 7, p = 5, r = 4;
    const Tensor3 x = random_tensor(rng, n, t, p);
    const Matrix a2 = random_matrix(rng, r, t);

    std::vector<double> serial(static_cast<size_t>(n * r * p)), parallel(serial.size());
    kernels::mode_product_serial(x.data().data(), n, t, p, 2, a2.data(), r, serial.data());
    kernels::mode_product_omp(x.data().data(), n, t, p, 2, a2.data(), r, parallel.data());
    CHECK(serial == parallel);

    CHECK(kernels::sumsq_serial(x.data().data(), n, t, p) ==
          kernels::sumsq_omp(x.data().data(), n, t, p));

    std::vector<double> us(static_cast<size_t>(n * t * p)), uo(us.size());
    kernels::unfold3_serial(x.data().data(), n, t, p, us.data());
    kernels::unfold3_omp(x.data().data(), n, t, p, uo.data());
    CHECK(us == uo);
}

TEST_CASE("tensor validation and usage errors") {
    CHECK_THROWS_AS(Tensor3(2, 2, 2, {1, 2, 3}), UsageError);
    CHECK_THROWS_AS(Tensor3(2, 1, 1, {1.0, std::nan("")}), InvalidDataError);
    const Tensor3 x = counting_tensor_222();
    CHECK_THROWS_AS(mode_k_unfold(x, 4), UsageError);
    CHECK_THROWS_AS(mode_k_fold(Matrix::Zero(3, 3), 1, {2, 2, 2}), UsageError);
    CHECK_THROWS_AS(mode_product(x, Matrix::Zero(2, 3), 1), UsageError);
    GeneralizedIndex e;
    e.length = 5;
    CHECK_THROWS_AS(contract_parameter(x, e), UsageError);
}

TEST_CASE("snapshot tensor file round trip") {
    std::mt19937_64 rng(18);
    const Tensor3 x = random_tensor(rng, 5, 3, 4);
    const std::string path = (std::filesystem::temp_directory_path() / "trom_test.trom").string();
    io::write_tensor(path, x);
    const Tensor3 y = io::read_tensor(path);
    CHECK(y.dims() == x.dims());
    CHECK(y.data() == x.data());

    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_AS(io::read_tensor(path), IoError);
    std::filesystem::remove(path);
}
