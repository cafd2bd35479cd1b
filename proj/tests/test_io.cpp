#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gresh/io.hpp"
#include "oracles.hpp"

using namespace gresh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gresh_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("CSV with and without header") {
  write_text(scratch("h.csv"), "a,b\n1,2\n3,4.5\n");
  write_text(scratch("n.csv"), "1,2\n3,4.5\n");
  const CsvTable h = read_csv(scratch("h.csv").string());
  const CsvTable n = read_csv(scratch("n.csv").string());
  CHECK(h.header == std::vector<std::string>{"a", "b"});
  CHECK(n.header.empty());
  CHECK(h.data == n.data);
  CHECK(h.data(1, 1) == 4.5);
}

TEST_CASE("malformed CSV is rejected") {
  write_text(scratch("ragged.csv"), "1,2\n3\n");
  write_text(scratch("text.csv"), "1,2\n3,x\n");
  CHECK_THROWS_AS(read_csv(scratch("ragged.csv").string()), GreshError);
  CHECK_THROWS_AS(read_csv(scratch("text.csv").string()), GreshError);
  CHECK_THROWS_AS(read_csv(scratch("missing.csv").string()), GreshError);
  write_text(scratch("two.csv"), "1,2\n3,4\n");
  CHECK_THROWS_AS(read_vector_csv(scratch("two.csv").string()), GreshError);
}

TEST_CASE("CSV write and read round-trip exactly") {
  std::mt19937_64 rng(1);
  const MatrixXd m = oracle::gaussian(5, 3, rng);
  write_csv(scratch("rt.csv").string(), m, {"x", "y", "z"});
  const CsvTable t = read_csv(scratch("rt.csv").string());
  CHECK(t.data == m);
  CHECK(t.header.size() == 3);
}

TEST_CASE("coefficient JSON round-trip, dense and sparse") {
  std::mt19937_64 rng(2);
  for (Index p : {Index{3}, kDensePhiLimit + 1}) {
    CoefMatrix c(p, true);
    c.omega.row(0) = oracle::gaussian(1, p, rng);
    c.omega(1, 0) = 0.25;
    c.omega(2, 1) = -1.5;
    c.b0 = 0.125;
    c.scaled = true;
    const Json j = coef_to_json(c);
    CHECK(j.contains(p > kDensePhiLimit ? "phi_triplets" : "phi"));
    const CoefMatrix back = coef_from_json(Json::parse(j.dump()));
    CHECK(back.omega == c.omega);
    CHECK(back.b0 == c.b0);
    CHECK(back.has_intercept);
    CHECK(back.scaled);
  }
  CoefMatrix none(2, false);
  CHECK(coef_to_json(none)["intercept"].is_null());
  CHECK_FALSE(coef_from_json(coef_to_json(none)).has_intercept);
}
