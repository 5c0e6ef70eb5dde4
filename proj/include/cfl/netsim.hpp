#pragma once

// Scenario synthesis: deployment, anchor density arithmetic, drift mobility,
// measurement synthesis and task-anchor discovery. Scenarios are values;
// stepping returns a new snapshot.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "color.hpp"
#include "geometry.hpp"
#include "localization.hpp"
#include "random.hpp"

namespace cfl {

/// Heading perturbation per mobility step, radians (standard deviation).
inline constexpr double kHeadingJitter = 0.1;

struct Region {
    double x_extent = 1000.0;
    double y_extent = 1000.0;
    double z_extent = 20.0;

    double volume() const { return x_extent * y_extent * z_extent; }
    bool contains(const Position3D& p) const {
        return p.x >= 0.0 && p.x <= x_extent && p.y >= 0.0 && p.y <= y_extent && p.z >= 0.0 && p.z <= z_extent;
    }
};

struct AnchorNode {
    int id = 0;
    Position3D position;
    RgbColor color;
    RgbColor projection_color;
};

/// Mobile nodes drift horizontally; depth stays fixed (the pressure sensor
/// reading). heading is the azimuth in radians.
struct MobileNode {
    int id = 0;
    Position3D position;
    double heading = 0.0;
};

struct Scenario {
    Region region;
    std::vector<AnchorNode> anchors;
    std::vector<MobileNode> mobiles;
    double communication_range = 100.0;
    std::uint64_t seed = 0;

    const MobileNode& mobile(int id) const {
        auto it = std::find_if(mobiles.begin(), mobiles.end(), [id](const auto& m) { return m.id == id; });
        if (it == mobiles.end()) throw std::out_of_range("no mobile node with id " + std::to_string(id));
        return *it;
    }
    const AnchorNode& anchor(int id) const {
        auto it = std::find_if(anchors.begin(), anchors.end(), [id](const auto& a) { return a.id == id; });
        if (it == anchors.end()) throw std::out_of_range("no anchor with id " + std::to_string(id));
        return *it;
    }
};

struct NoiseModel {
    double aoa_sigma = 0.0;    // radians
    double depth_sigma = 0.0;  // meters
};

/// Whether PCFL projections reuse the anchor's color or get their own draw.
enum class ProjectionColors { inherit, independent };

inline void validate_region(const Region& r) {
    if (!(r.x_extent > 0.0 && r.y_extent > 0.0 && r.z_extent > 0.0))
        throw std::invalid_argument("region extents must be > 0");
}

/// Anchor count whose expected population inside one communication sphere is
/// d_anchor: round(d_anchor * V / (4/3 pi R^3)), at least 1.
inline std::size_t anchors_from_density(double d_anchor, double range, const Region& region) {
    if (!(d_anchor > 0.0)) throw std::invalid_argument("d_anchor must be > 0");
    if (!(range > 0.0)) throw std::invalid_argument("range must be > 0");
    validate_region(region);
    const double sphere = 4.0 / 3.0 * std::numbers::pi * range * range * range;
    const double n = std::round(d_anchor * region.volume() / sphere);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

inline Scenario deploy(const Region& region, std::size_t anchor_count, std::size_t mobile_count, double range,
                       std::uint64_t seed, ProjectionColors projection = ProjectionColors::inherit) {
    validate_region(region);
    if (anchor_count == 0 || mobile_count == 0) throw std::invalid_argument("deploy: counts must be >= 1");
    if (!(range > 0.0)) throw std::invalid_argument("deploy: range must be > 0");

    Rng rng(seed);
    std::uniform_real_distribution<double> ux(0.0, region.x_extent);
    std::uniform_real_distribution<double> uy(0.0, region.y_extent);
    std::uniform_real_distribution<double> uz(0.0, region.z_extent);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    auto draw_color = [&] {
        const double r = unit(rng);
        const double g = unit(rng);
        const double b = unit(rng);
        return RgbColor{r, g, b};
    };

    Scenario s;
    s.region = region;
    s.communication_range = range;
    s.seed = seed;
    s.anchors.reserve(anchor_count);
    for (std::size_t i = 0; i < anchor_count; ++i) {
        AnchorNode a;
        a.id = static_cast<int>(i);
        a.position.x = ux(rng);
        a.position.y = uy(rng);
        a.position.z = uz(rng);
        a.color = draw_color();
        a.projection_color = projection == ProjectionColors::inherit ? a.color : draw_color();
        s.anchors.push_back(a);
    }
    s.mobiles.reserve(mobile_count);
    for (std::size_t i = 0; i < mobile_count; ++i) {
        MobileNode m;
        m.id = static_cast<int>(i);
        m.position.x = ux(rng);
        m.position.y = uy(rng);
        m.position.z = uz(rng);
        m.heading = angle(rng);
        s.mobiles.push_back(m);
    }
    return s;
}

/// Ids of anchors within the communication range of a mobile (boundary inclusive).
inline std::vector<int> discover_task_anchors(const Scenario& scenario, int mobile_id) {
    const auto& m = scenario.mobile(mobile_id);
    std::vector<int> ids;
    for (const auto& a : scenario.anchors)
        if (euclidean_distance(a.position, m.position) <= scenario.communication_range) ids.push_back(a.id);
    return ids;
}

/// The mobile node's measurement of one task anchor: depth difference from the
/// two pressure readings and the elevation angle of arrival.
inline AnchorObservation synthesize_observation(const AnchorNode& anchor, const Position3D& mobile, double range,
                                                const NoiseModel& noise, Rng& rng) {
    const double true_k = std::abs(anchor.position.z - mobile.z);
    const double true_d = euclidean_distance(anchor.position, mobile);

    double k = true_k;
    if (noise.depth_sigma > 0.0) k += std::normal_distribution<double>(0.0, noise.depth_sigma)(rng);
    k = std::clamp(k, 0.0, range);

    double alpha = true_d > 0.0 ? std::asin(std::clamp(true_k / true_d, 0.0, 1.0)) : std::numbers::pi / 2;
    if (noise.aoa_sigma > 0.0) alpha += std::normal_distribution<double>(0.0, noise.aoa_sigma)(rng);
    alpha = std::clamp(alpha, 0.0, std::numbers::pi / 2);

    return {anchor.id, anchor.position, k, alpha, anchor.color, anchor.projection_color};
}

/// Everything the mobile node measures at time index t. Each node draws its
/// noise from its own sub-stream of (seed, t, node id).
inline LocalizationInput observe(const Scenario& scenario, int mobile_id, const NoiseModel& noise,
                                 std::uint64_t time_index = 0) {
    const auto& m = scenario.mobile(mobile_id);
    Rng rng = make_rng(scenario.seed, {tag(StreamTag::observe), time_index, static_cast<std::uint64_t>(mobile_id)});
    LocalizationInput input{m.position.z, {}, scenario.communication_range};
    for (int id : discover_task_anchors(scenario, mobile_id))
        input.observations.push_back(
            synthesize_observation(scenario.anchor(id), m.position, scenario.communication_range, noise, rng));
    return input;
}

namespace detail {

// Folds a coordinate into [0, extent] by mirror reflection; returns true when
// an odd number of reflections happened (velocity component flips).
inline bool reflect_into(double& x, double extent) {
    if (x >= 0.0 && x <= extent) return false;
    const double period = 2.0 * extent;
    double t = std::fmod(x, period);
    if (t < 0.0) t += period;
    const auto crossings = static_cast<long long>(std::floor(x / extent));
    if (t > extent) t = period - t;
    x = std::clamp(t, 0.0, extent);
    return (crossings % 2) != 0;
}

}  // namespace detail

/// Random-direction drift: every mobile moves speed*dt along its heading with
/// specular reflection at the region walls, then its heading is perturbed.
/// Anchors do not move.
inline Scenario step_mobility(const Scenario& scenario, double dt, double speed, Rng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_mobility: dt must be > 0");
    if (!(speed >= 0.0)) throw std::invalid_argument("step_mobility: speed must be >= 0");

    Scenario next = scenario;
    std::normal_distribution<double> jitter(0.0, kHeadingJitter);
    for (auto& m : next.mobiles) {
        const double step = speed * dt;
        double vx = std::cos(m.heading);
        double vy = std::sin(m.heading);
        double x = m.position.x + step * vx;
        double y = m.position.y + step * vy;
        if (detail::reflect_into(x, next.region.x_extent)) vx = -vx;
        if (detail::reflect_into(y, next.region.y_extent)) vy = -vy;
        m.position.x = x;
        m.position.y = y;
        m.heading = std::atan2(vy, vx) + jitter(rng);
    }
    return next;
}

// Plain-text scenario format, comma separated, one record per line:
//   region,<x_extent>,<y_extent>,<z_extent>
//   range,<R>
//   seed,<seed>
//   anchor,<id>,<x>,<y>,<z>,<r>,<g>,<b>[,<pr>,<pg>,<pb>]
//   mobile,<id>,<x>,<y>,<z>,0,0,0[,<heading>]
// Blank lines and lines starting with '#' are ignored. The optional anchor
// fields carry an independent PCFL projection color.

inline void write_scenario(std::ostream& out, const Scenario& s) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << "# kind,id,x,y,z,r,g,b\n";
    out << "region," << s.region.x_extent << ',' << s.region.y_extent << ',' << s.region.z_extent << '\n';
    out << "range," << s.communication_range << '\n';
    out << "seed," << s.seed << '\n';
    for (const auto& a : s.anchors) {
        out << "anchor," << a.id << ',' << a.position.x << ',' << a.position.y << ',' << a.position.z << ','
            << a.color.r << ',' << a.color.g << ',' << a.color.b;
        if (a.projection_color != a.color)
            out << ',' << a.projection_color.r << ',' << a.projection_color.g << ',' << a.projection_color.b;
        out << '\n';
    }
    for (const auto& m : s.mobiles)
        out << "mobile," << m.id << ',' << m.position.x << ',' << m.position.y << ',' << m.position.z << ",0,0,0,"
            << m.heading << '\n';
    out.precision(old_precision);
}

inline Scenario read_scenario(std::istream& in) {
    Scenario s;
    s.anchors.clear();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        auto fail = [&](const std::string& why) {
            return std::invalid_argument("scenario line " + std::to_string(line_no) + ": " + why);
        };
        auto num = [&](std::size_t i) {
            try {
                std::size_t used = 0;
                const double v = std::stod(fields.at(i), &used);
                if (used != fields[i].size()) throw fail("bad number '" + fields[i] + "'");
                return v;
            } catch (const std::invalid_argument&) {
                throw fail("bad number in field " + std::to_string(i + 1));
            } catch (const std::out_of_range&) {
                throw fail("missing field " + std::to_string(i + 1));
            }
        };

        const std::string& kind = fields.front();
        if (kind == "region" && fields.size() == 4) {
            s.region = {num(1), num(2), num(3)};
        } else if (kind == "range" && fields.size() == 2) {
            s.communication_range = num(1);
        } else if (kind == "seed" && fields.size() == 2) {
            s.seed = std::stoull(fields[1]);
        } else if (kind == "anchor" && (fields.size() == 8 || fields.size() == 11)) {
            AnchorNode a;
            a.id = static_cast<int>(num(1));
            a.position = {num(2), num(3), num(4)};
            a.color = {num(5), num(6), num(7)};
            a.projection_color = fields.size() == 11 ? RgbColor{num(8), num(9), num(10)} : a.color;
            s.anchors.push_back(a);
        } else if (kind == "mobile" && (fields.size() == 8 || fields.size() == 9)) {
            MobileNode m;
            m.id = static_cast<int>(num(1));
            m.position = {num(2), num(3), num(4)};
            m.heading = fields.size() == 9 ? num(8) : 0.0;
            s.mobiles.push_back(m);
        } else {
            throw fail("unrecognized record '" + line + "'");
        }
    }
    return s;
}

}  // namespace cfl
