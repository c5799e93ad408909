#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quatheta/version.hpp"

#include <cstring>

TEST_CASE("library reports a version") {
  REQUIRE(qth::version() != nullptr);
  CHECK(std::strlen(qth::version()) > 0);
}
