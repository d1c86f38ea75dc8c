#include "cityforge/raster/skeleton.hpp"

#include <algorithm>
#include <map>

namespace cityforge::raster {

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }

Mask class_mask(const ClassGrid& grid, std::uint16_t cls) {
    Mask m{grid.width, grid.height, std::vector<std::uint8_t>(grid.classes.size(), 0)};
    for (std::size_t i = 0; i < grid.classes.size(); ++i) m.bits[i] = grid.classes[i] == cls ? 1 : 0;
    return m;
}

Mask thin(Mask m) {
    // Neighbours P2..P9 clockwise from north.
    static const int dx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    static const int dy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    std::vector<std::pair<int, int>> remove;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int step = 0; step < 2; ++step) {
            remove.clear();
            for (int y = 0; y < m.height; ++y) {
                for (int x = 0; x < m.width; ++x) {
                    if (!m.get(x, y)) continue;
                    int p[8];
                    int b = 0;
                    for (int k = 0; k < 8; ++k) {
                        p[k] = m.get(x + dx[k], y + dy[k]) ? 1 : 0;
                        b += p[k];
                    }
                    if (b < 2 || b > 6) continue;
                    int a = 0;
                    for (int k = 0; k < 8; ++k) a += (p[k] == 0 && p[(k + 1) % 8] == 1) ? 1 : 0;
                    if (a != 1) continue;
                    // p[0]=N p[2]=E p[4]=S p[6]=W
                    if (step == 0 && (p[0] * p[2] * p[4] != 0 || p[2] * p[4] * p[6] != 0)) continue;
                    if (step == 1 && (p[0] * p[2] * p[6] != 0 || p[0] * p[4] * p[6] != 0)) continue;
                    remove.emplace_back(x, y);
                }
            }
            for (auto [x, y] : remove) m.set(x, y, false);
            changed = changed || !remove.empty();
        }
    }
    return m;
}

std::vector<int> chessboard_distance(const Mask& m) {
    const int w = m.width, h = m.height;
    const int big = w + h + 2;
    std::vector<int> d(m.bits.size(), 0);
    auto at = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return d[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.get(x, y)) continue;
            int v = big;
            v = std::min({v, at(x - 1, y) + 1, at(x - 1, y - 1) + 1, at(x, y - 1) + 1, at(x + 1, y - 1) + 1});
            d[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = v;
        }
    }
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            if (!m.get(x, y)) continue;
            int& v = d[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
            v = std::min({v, at(x + 1, y) + 1, at(x + 1, y + 1) + 1, at(x, y + 1) + 1, at(x - 1, y + 1) + 1});
        }
    }
    return d;
}

namespace {

// Mixed adjacency: diagonal neighbours count only when neither shared
// 4-neighbour is set, so staircases do not look like junctions.
std::vector<std::pair<int, int>> m_neighbors(const Mask& s, int x, int y) {
    std::vector<std::pair<int, int>> out;
    const int four[4][2] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    for (const auto& d : four) {
        if (s.get(x + d[0], y + d[1])) out.emplace_back(x + d[0], y + d[1]);
    }
    const int diag[4][2] = {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
    for (const auto& d : diag) {
        if (s.get(x + d[0], y + d[1]) && !s.get(x + d[0], y) && !s.get(x, y + d[1])) {
            out.emplace_back(x + d[0], y + d[1]);
        }
    }
    return out;
}

}  // namespace

std::vector<Centerline> trace_centerlines(const Mask& s, const Mask& region, const ClassGrid& grid) {
    const int w = s.width, h = s.height;
    auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };
    const std::vector<int> dist = chessboard_distance(region);

    std::vector<int> degree(s.bits.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (s.get(x, y)) degree[idx(x, y)] = static_cast<int>(m_neighbors(s, x, y).size());
        }
    }
    auto is_node = [&](int x, int y) { return s.get(x, y) && degree[idx(x, y)] != 2; };

    // Cluster adjacent node pixels.
    std::vector<int> cluster(s.bits.size(), -1);
    std::vector<geom::Point2> cluster_pos;
    std::vector<int> cluster_degree;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!is_node(x, y) || cluster[idx(x, y)] >= 0) continue;
            const int id = static_cast<int>(cluster_pos.size());
            std::vector<std::pair<int, int>> stack{{x, y}};
            cluster[idx(x, y)] = id;
            geom::Point2 sum{};
            int n = 0;
            int deg = 0;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                sum = sum + grid.pixel_center(cx, cy);
                ++n;
                deg = std::max(deg, degree[idx(cx, cy)]);
                for (auto [nx, ny] : m_neighbors(s, cx, cy)) {
                    if (is_node(nx, ny) && cluster[idx(nx, ny)] < 0) {
                        cluster[idx(nx, ny)] = id;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            cluster_pos.push_back(sum * (1.0 / n));
            cluster_degree.push_back(n == 1 ? deg : 3);
        }
    }

    std::vector<bool> visited(s.bits.size(), false);
    std::vector<Centerline> out;
    std::map<std::pair<int, int>, int> direct_links;

    auto finish = [&](std::vector<geom::Point2> pts, const std::vector<std::pair<int, int>>& pixels, bool spur) {
        if (spur && pixels.size() <= 3) return;
        double wsum = 0.0;
        for (auto [px, py] : pixels) wsum += std::max(1, 2 * dist[idx(px, py)] - 1);
        const double width = pixels.empty() ? grid.cell_size : grid.cell_size * wsum / static_cast<double>(pixels.size());
        Centerline c;
        c.line.points = simplify_polyline(pts, grid.cell_size);
        c.width = width;
        if (c.line.points.size() >= 2 && geom::distance(c.line.points.front(), c.line.points.back()) + 1e-12 > 0.0) {
            out.push_back(std::move(c));
        }
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!is_node(x, y)) continue;
            const int a = cluster[idx(x, y)];
            for (auto [nx, ny] : m_neighbors(s, x, y)) {
                if (is_node(nx, ny)) {
                    const int b = cluster[idx(nx, ny)];
                    if (b == a) continue;
                    const auto key = std::minmax(a, b);
                    if (direct_links.count(key)) continue;
                    direct_links[key] = 1;
                    finish({cluster_pos[static_cast<std::size_t>(a)], cluster_pos[static_cast<std::size_t>(b)]},
                           {{x, y}, {nx, ny}}, false);
                    continue;
                }
                if (visited[idx(nx, ny)]) continue;
                std::vector<geom::Point2> pts{cluster_pos[static_cast<std::size_t>(a)]};
                std::vector<std::pair<int, int>> pixels;
                int px = x, py = y, cx = nx, cy = ny;
                int end_cluster = -1;
                while (true) {
                    if (is_node(cx, cy)) {
                        end_cluster = cluster[idx(cx, cy)];
                        break;
                    }
                    if (visited[idx(cx, cy)]) break;
                    visited[idx(cx, cy)] = true;
                    pts.push_back(grid.pixel_center(cx, cy));
                    pixels.emplace_back(cx, cy);
                    int nx2 = -1, ny2 = -1;
                    for (auto [qx, qy] : m_neighbors(s, cx, cy)) {
                        if (qx == px && qy == py) continue;
                        if (is_node(qx, qy) && cluster[idx(qx, qy)] == a && pixels.size() == 1) continue;
                        nx2 = qx;
                        ny2 = qy;
                        break;
                    }
                    if (nx2 < 0) break;
                    px = cx;
                    py = cy;
                    cx = nx2;
                    cy = ny2;
                }
                if (end_cluster >= 0) pts.push_back(cluster_pos[static_cast<std::size_t>(end_cluster)]);
                const bool spur = cluster_degree[static_cast<std::size_t>(a)] == 1 ||
                                  (end_cluster >= 0 && cluster_degree[static_cast<std::size_t>(end_cluster)] == 1);
                const bool both_ends_free = cluster_degree[static_cast<std::size_t>(a)] == 1 &&
                                            (end_cluster < 0 || cluster_degree[static_cast<std::size_t>(end_cluster)] == 1);
                finish(std::move(pts), pixels, spur && !both_ends_free);
            }
        }
    }

    // Closed loops without any junction.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!s.get(x, y) || is_node(x, y) || visited[idx(x, y)]) continue;
            std::vector<geom::Point2> pts;
            std::vector<std::pair<int, int>> pixels;
            int px = -1, py = -1, cx = x, cy = y;
            while (!visited[idx(cx, cy)]) {
                visited[idx(cx, cy)] = true;
                pts.push_back(grid.pixel_center(cx, cy));
                pixels.emplace_back(cx, cy);
                int nx2 = -1, ny2 = -1;
                for (auto [qx, qy] : m_neighbors(s, cx, cy)) {
                    if ((qx == px && qy == py) || visited[idx(qx, qy)]) continue;
                    nx2 = qx;
                    ny2 = qy;
                    break;
                }
                if (nx2 < 0) break;
                px = cx;
                py = cy;
                cx = nx2;
                cy = ny2;
            }
            pts.push_back(pts.front());
            finish(std::move(pts), pixels, false);
        }
    }
    return out;
}

}  // namespace cityforge::raster
