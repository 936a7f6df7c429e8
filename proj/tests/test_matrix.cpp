#include <catch2/catch_amalgamated.hpp>

#include "xplore/matrix.hpp"

using namespace xplore;

TEST_CASE("matmul matches hand computation") {
  Matrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;
  Matrix b(3, 2);
  b(0, 0) = 7; b(0, 1) = 8;
  b(1, 0) = 9; b(1, 1) = 10;
  b(2, 0) = 11; b(2, 1) = 12;
  Matrix c = matmul(a, b);
  REQUIRE(c(0, 0) == 58.0);
  REQUIRE(c(0, 1) == 64.0);
  REQUIRE(c(1, 0) == 139.0);
  REQUIRE(c(1, 1) == 154.0);
}

TEST_CASE("transpose-variant products agree with explicit transpose") {
  Matrix a(3, 2), b(3, 4);
  for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = 0.1 * static_cast<double>(i) - 0.2;
  for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = 0.3 * static_cast<double>(i) + 0.05;
  Matrix atb = matmul_at_b(a, b);
  Matrix ref = matmul(transpose(a), b);
  for (std::size_t k = 0; k < ref.size(); ++k)
    REQUIRE(atb.data()[k] == Catch::Approx(ref.data()[k]).margin(1e-12));

  Matrix c(4, 2), d(5, 2);
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = static_cast<double>(i) * 0.7 - 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) d.data()[i] = static_cast<double>(i) * -0.4 + 2.0;
  Matrix cdt = matmul_a_bt(c, d);
  Matrix ref2 = matmul(c, transpose(d));
  for (std::size_t k = 0; k < ref2.size(); ++k)
    REQUIRE(cdt.data()[k] == Catch::Approx(ref2.data()[k]).margin(1e-12));
}

TEST_CASE("dimension mismatches are contract errors") {
  REQUIRE_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), ContractError);
  REQUIRE_THROWS_AS(matmul_at_b(Matrix(2, 3), Matrix(3, 3)), ContractError);
  REQUIRE_THROWS_AS(matmul_a_bt(Matrix(2, 3), Matrix(2, 4)), ContractError);
}

TEST_CASE("identity and relu behave") {
  Matrix i3 = Matrix::identity(3);
  REQUIRE(i3(0, 0) == 1.0);
  REQUIRE(i3(0, 1) == 0.0);
  Matrix m(1, 3);
  m(0, 0) = -2.0; m(0, 1) = 0.0; m(0, 2) = 5.0;
  relu_inplace(m);
  REQUIRE(m(0, 0) == 0.0);
  REQUIRE(m(0, 1) == 0.0);
  REQUIRE(m(0, 2) == 5.0);
}
