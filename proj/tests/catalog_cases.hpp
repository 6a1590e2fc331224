#pragma once

#include <string>
#include <vector>

#include "gpiece.hpp"

namespace testing {

struct CatalogCase {
  std::string label;
  polycrit::GPiece piece;
  double w;
  double y;
};

/// Representative graph points of every catalog kind: interiors, endpoints and kinks.
inline std::vector<CatalogCase> catalog_cases() {
  using polycrit::GPiece;
  const GPiece box = GPiece::box(-1, 2), ab = GPiece::abs(2), pwa = GPiece::pwa({0, 1}, {-1, 0.5, 2}),
               l0 = GPiece::l0(1);
  return {
      {"zero (0,0.7)", GPiece::zero(), 0, 0.7},
      {"nonpos (-1,0)", GPiece::nonpos(), -1, 0},
      {"nonpos (0,0)", GPiece::nonpos(), 0, 0},
      {"nonpos (0,2)", GPiece::nonpos(), 0, 2},
      {"free (0.4,0)", GPiece::free(), 0.4, 0},
      {"box (-1,-0.5)", box, -1, -0.5},
      {"box (-1,0)", box, -1, 0},
      {"box (0.5,0)", box, 0.5, 0},
      {"box (2,0)", box, 2, 0},
      {"box (2,1)", box, 2, 1},
      {"abs (0,-2)", ab, 0, -2},
      {"abs (0,1)", ab, 0, 1},
      {"abs (0,2)", ab, 0, 2},
      {"abs (1,2)", ab, 1, 2},
      {"pwa (-1,-1)", pwa, -1, -1},
      {"pwa (0,-1)", pwa, 0, -1},
      {"pwa (0,0)", pwa, 0, 0},
      {"pwa (0,0.5)", pwa, 0, 0.5},
      {"pwa (0.5,0.5)", pwa, 0.5, 0.5},
      {"pwa (1,1)", pwa, 1, 1},
      {"pwa (1,2)", pwa, 1, 2},
      {"l0 (0,0)", l0, 0, 0},
      {"l0 (1,0)", l0, 1, 0},
      {"l0 (0,3)", l0, 0, 3},
  };
}

}  // namespace testing
