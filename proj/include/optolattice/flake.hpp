#pragma once

// Canonical site map of the 24-site honeycomb flake.
//
// Sites sit on a brick-wall embedding of the honeycomb lattice with integer
// coordinates (x, y); y is the row counted from the top.
//
//   row 0:      x = 0..4     sites  1..5
//   row 1:  x = -1..5        sites  6..12
//   row 2:  x = -1..5        sites 13..19
//   row 3:      x = 0..4     sites 20..24
//
// Numbering runs left to right, then top to bottom (1-based in labels,
// 0-based in matrices). Neighbours within a row are joined by the two slanted
// bond orientations. (x, y) and (x, y+1) are joined by a vertical bond when
// x + y is even. Every site has one vertical bond except the four edge sites
// 2, 4, 21, 23, which host the zero modes of the strongly dimerized flake.
//
// Vertical bonds (1-based):
//   rows 0-1:  1-7   3-9   5-11
//   rows 1-2:  6-13  8-15  10-17  12-19
//   rows 2-3:  14-20 16-22 18-24
// Slanted bonds: 1-2 2-3 3-4 4-5, 6-7 ... 11-12, 13-14 ... 18-19, 20-21 ... 23-24.
//
// Second-neighbour pairs are the 48 pairs sharing a nearest neighbour.

#include <array>
#include <vector>

namespace optolattice::flake {

struct Site {
    int x;
    int y;
};

enum class BondKind { Vertical, Slanted, Second };

struct Bond {
    int a;  // 0-based
    int b;
    BondKind kind;
};

inline constexpr int kSites = 24;

[[nodiscard]] const std::array<Site, kSites>& sites();
/// 0-based index of (x, y), or -1 when the point is not part of the flake.
[[nodiscard]] int index_of(int x, int y);
[[nodiscard]] const std::vector<Bond>& bonds();
/// Edge sites that lack a vertical bond, 0-based.
[[nodiscard]] std::array<int, 4> edge_sites();
/// Same, 1-based as in the documented numbering.
[[nodiscard]] std::array<int, 4> edge_site_labels();

}  // namespace optolattice::flake
