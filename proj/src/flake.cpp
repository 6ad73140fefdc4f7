#include "optolattice/flake.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace optolattice::flake {
namespace {

constexpr int kRowMin[4] = {0, -1, -1, 0};
constexpr int kRowMax[4] = {4, 5, 5, 4};

std::array<Site, kSites> make_sites() {
    std::array<Site, kSites> out{};
    int idx = 0;
    for (int y = 0; y < 4; ++y)
        for (int x = kRowMin[y]; x <= kRowMax[y]; ++x) out[idx++] = {x, y};
    return out;
}

std::vector<Bond> make_bonds() {
    std::vector<Bond> out;
    std::set<std::pair<int, int>> seen;
    auto add = [&](int a, int b, BondKind kind) {
        if (a < 0 || b < 0 || a == b) return;
        auto key = std::minmax(a, b);
        if (!seen.insert(key).second) return;
        out.push_back({key.first, key.second, kind});
    };
    for (int y = 0; y < 4; ++y) {
        for (int x = kRowMin[y]; x <= kRowMax[y]; ++x) {
            add(index_of(x, y), index_of(x + 1, y), BondKind::Slanted);
            if (((x + y) % 2 + 2) % 2 == 0) add(index_of(x, y), index_of(x, y + 1), BondKind::Vertical);
        }
    }
    // Second neighbours: pairs sharing a nearest neighbour.
    std::vector<std::vector<int>> adj(kSites);
    for (const auto& bd : out) {
        adj[static_cast<std::size_t>(bd.a)].push_back(bd.b);
        adj[static_cast<std::size_t>(bd.b)].push_back(bd.a);
    }
    for (const auto& nb : adj)
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) add(nb[i], nb[j], BondKind::Second);
    return out;
}

}  // namespace

const std::array<Site, kSites>& sites() {
    static const auto s = make_sites();
    return s;
}

int index_of(int x, int y) {
    if (y < 0 || y > 3 || x < kRowMin[y] || x > kRowMax[y]) return -1;
    int idx = 0;
    for (int r = 0; r < y; ++r) idx += kRowMax[r] - kRowMin[r] + 1;
    return idx + (x - kRowMin[y]);
}

const std::vector<Bond>& bonds() {
    static const auto b = make_bonds();
    return b;
}

std::array<int, 4> edge_sites() { return {index_of(1, 0), index_of(3, 0), index_of(1, 3), index_of(3, 3)}; }

std::array<int, 4> edge_site_labels() {
    auto e = edge_sites();
    for (auto& v : e) ++v;
    return e;
}

}  // namespace optolattice::flake
