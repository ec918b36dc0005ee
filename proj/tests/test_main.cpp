#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "verbatim/log.hpp"

int main(int argc, char** argv) {
  verbatim::log::set_level(verbatim::log::Level::off);
  doctest::Context context(argc, argv);
  return context.run();
}
