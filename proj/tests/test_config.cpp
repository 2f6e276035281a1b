#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pfs/config.hpp"
#include "pfs/io.hpp"

using namespace pfs;

namespace {
std::string minimal_config(double T) {
  return std::string(R"({
  "system": {
    "d": 2,
    "Q": {"kind": "sphere", "radius": 1.0, "center": [3.141592653589793, 3.141592653589793]},
    "T": )") +
         format_double(T) + R"(,
    "k": 8, "M": 16, "Nt": 64,
    "bump": {"rho0": 1.0, "alpha": 1.0},
    "coupling": {"id": "linear", "epsilon": 0.001},
    "potential": [{"n": [1, 0], "m": 0, "amplitude": 0.4}]
  },
  "seed": 1
})";
}
}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal valid config parses") {
  const double T = 2.0 * std::numbers::pi * std::sqrt(0.5 * (1.0 + std::sqrt(5.0)));
  const ExperimentConfig cfg = parse_config(minimal_config(T));
  CHECK(cfg.dim == 2);
  CHECK(cfg.k == 8);
  CHECK(cfg.epsilon == doctest::Approx(1e-3));
  CHECK(cfg.sigma() == doctest::Approx(0.5 * (1.0 + std::sqrt(5.0))).epsilon(1e-12));
  const HamiltonianSpec spec = cfg.hamiltonian();
  CHECK(spec.manifold.kind() == Submanifold::Kind::Sphere);
}

TEST_CASE("resonant period rejected unless overridden") {
  const double T = 2.0 * std::numbers::pi;  // sigma = 1
  bool caught = false;
  try {
    (void)parse_config(minimal_config(T));
  } catch (const ConfigParseError& e) {
    caught = true;
    bool has_diophantine = false;
    for (const auto& err : e.errors)
      if (err.path == "system.T") has_diophantine = true;
    CHECK(has_diophantine);
  }
  CHECK(caught);

  // allow_resonant bypasses the scan.
  std::string text = minimal_config(T);
  text.replace(text.find("\"seed\": 1"), 9, "\"seed\": 1, \"allow_resonant\": true");
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.allow_resonant);
}

TEST_CASE("bad Nt rejected with field path") {
  const double T = 2.0 * std::numbers::pi * std::sqrt(2.0);
  std::string text = minimal_config(T);
  text.replace(text.find("\"Nt\": 64"), 8, "\"Nt\": 100");
  bool caught = false;
  try {
    (void)parse_config(text);
  } catch (const ConfigParseError& e) {
    caught = true;
    bool has_nt = false;
    for (const auto& err : e.errors)
      if (err.path == "system.Nt") has_nt = true;
    CHECK(has_nt);
  }
  CHECK(caught);
}

TEST_CASE("all violations reported together") {
  std::string text = R"({
  "system": {
    "d": 2,
    "Q": {"kind": "sphere", "radius": 9.0, "center": [0.0, 0.0]},
    "T": -1.0,
    "k": 8, "M": 16, "Nt": 100,
    "coupling": {"id": "nonsense", "epsilon": -2.0}
  }
})";
  try {
    (void)parse_config(text);
    CHECK(false);
  } catch (const ConfigParseError& e) {
    CHECK(e.errors.size() >= 4);
  }
}

TEST_CASE("formatting is full precision") {
  CHECK(format_double(1.0) == "1");
  const double x = 0.1 + 0.2;
  CHECK(format_double(x) == "0.30000000000000004");
}

TEST_SUITE_END();
