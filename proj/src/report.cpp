#include "esnx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "esnx/errors.hpp"

namespace esnx {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_csv(const FigureData& fig) {
    std::ostringstream os;
    os << "kind,name,x,y,z,value\n";
    for (const auto& s : fig.series)
        for (size_t i = 0; i < s.x.size(); ++i)
            os << "series," << s.name << ',' << format_g17(s.x[i]) << ",,," << format_g17(s.y[i])
               << '\n';
    for (const auto& g : fig.grids)
        for (size_t iy = 0; iy < g.ys.size(); ++iy)
            for (size_t ix = 0; ix < g.xs.size(); ++ix)
                os << "grid," << g.name << ',' << format_g17(g.xs[ix]) << ','
                   << format_g17(g.ys[iy]) << ",," << format_g17(g.values[iy * g.xs.size() + ix])
                   << '\n';
    for (const auto& t : fig.ternaries)
        for (size_t i = 0; i < t.points.size(); ++i)
            os << "ternary," << t.name << ',' << format_g17(t.points[i][0]) << ','
               << format_g17(t.points[i][1]) << ',' << format_g17(t.points[i][2]) << ','
               << format_g17(t.values[i]) << '\n';
    return os.str();
}

std::string to_json(const FigureData& fig) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["command"] = fig.command;
    j["label"] = fig.label;
    j["metadata"] = fig.metadata;
    auto pack = [](const std::vector<double>& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (double x : v) a.push_back(x);
        return a;
    };
    j["series"] = nlohmann::ordered_json::array();
    for (const auto& s : fig.series)
        j["series"].push_back({{"name", s.name}, {"x", pack(s.x)}, {"y", pack(s.y)}});
    j["grids"] = nlohmann::ordered_json::array();
    for (const auto& g : fig.grids)
        j["grids"].push_back(
            {{"name", g.name}, {"xs", pack(g.xs)}, {"ys", pack(g.ys)}, {"values", pack(g.values)}});
    j["ternaries"] = nlohmann::ordered_json::array();
    for (const auto& t : fig.ternaries) {
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& p : t.points) pts.push_back({p[0], p[1], p[2]});
        j["ternaries"].push_back({{"name", t.name}, {"points", pts}, {"values", pack(t.values)}});
    }
    return j.dump(1) + "\n";
}

namespace {

const char* palette(size_t i) {
    static const char* cols[] = {"#1b6ca8", "#c23b22", "#2e8540", "#7a4fa3",
                                 "#b8860b", "#0f8a8a", "#84494f", "#4d4d4d"};
    return cols[i % 8];
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// 5-stop diverging-free sequential map for heat cells
std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                       {94, 201, 98}, {253, 231, 37}};
    const double pos = t * 4.0;
    const int k = std::min(3, static_cast<int>(pos));
    const double f = pos - k;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(stops[k][0] + f * (stops[k + 1][0] - stops[k][0])),
                  static_cast<int>(stops[k][1] + f * (stops[k + 1][1] - stops[k][1])),
                  static_cast<int>(stops[k][2] + f * (stops[k + 1][2] - stops[k][2])));
    return buf;
}

void finite_range(const std::vector<double>& v, double& lo, double& hi) {
    for (double x : v)
        if (std::isfinite(x)) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
}

}  // namespace

std::string to_svg(const FigureData& fig) {
    const int w = 720, h = 480, ml = 70, mr = 20, mt = 30, mb = 50;
    std::ostringstream os;
    int blocks = (fig.series.empty() ? 0 : 1) + static_cast<int>(fig.grids.size()) +
                 static_cast<int>(fig.ternaries.size());
    blocks = std::max(blocks, 1);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
       << h * blocks << "\" font-family=\"monospace\" font-size=\"11\">\n";
    char hashbuf[32];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(to_csv(fig))));
    os << "<!-- data-fnv1a: " << hashbuf << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    int y0 = 0;

    if (!fig.series.empty()) {
        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
        double ylo = xlo, yhi = -xlo;
        for (const auto& s : fig.series) {
            finite_range(s.x, xlo, xhi);
            finite_range(s.y, ylo, yhi);
        }
        if (!(xhi > xlo)) xhi = xlo + 1.0;
        if (!(yhi > ylo)) yhi = ylo + 1.0;
        const auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (w - ml - mr); };
        const auto py = [&](double y) {
            return y0 + h - mb - (y - ylo) / (yhi - ylo) * (h - mt - mb);
        };
        os << "<rect x=\"" << ml << "\" y=\"" << (y0 + mt) << "\" width=\"" << (w - ml - mr)
           << "\" height=\"" << (h - mt - mb) << "\" fill=\"none\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml << "\" y=\"" << (y0 + mt - 10) << "\">" << fig.command << ' '
           << fig.label << "</text>\n";
        os << "<text x=\"" << ml << "\" y=\"" << (y0 + h - mb + 30) << "\">x: [" << fmt6(xlo)
           << ", " << fmt6(xhi) << "]  y: [" << fmt6(ylo) << ", " << fmt6(yhi) << "]</text>\n";
        for (size_t si = 0; si < fig.series.size(); ++si) {
            const auto& s = fig.series[si];
            os << "<polyline fill=\"none\" stroke=\"" << palette(si) << "\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << fmt6(px(s.x[i])) << ',' << fmt6(py(s.y[i])) << ' ';
            }
            os << "\"/>\n";
            os << "<text x=\"" << (ml + 8) << "\" y=\"" << (y0 + mt + 14 + 13 * si)
               << "\" fill=\"" << palette(si) << "\">" << s.name << "</text>\n";
        }
        y0 += h;
    }

    for (const auto& g : fig.grids) {
        double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
        finite_range(g.values, vlo, vhi);
        if (!(vhi > vlo)) vhi = vlo + 1.0;
        const double cw = static_cast<double>(w - ml - mr) / g.xs.size();
        const double ch = static_cast<double>(h - mt - mb) / g.ys.size();
        os << "<text x=\"" << ml << "\" y=\"" << (y0 + mt - 10) << "\">" << g.name << " ["
           << fmt6(vlo) << ", " << fmt6(vhi) << "]</text>\n";
        for (size_t iy = 0; iy < g.ys.size(); ++iy)
            for (size_t ix = 0; ix < g.xs.size(); ++ix) {
                const double v = g.values[iy * g.xs.size() + ix];
                if (!std::isfinite(v)) continue;
                os << "<rect x=\"" << fmt6(ml + ix * cw) << "\" y=\""
                   << fmt6(y0 + h - mb - (iy + 1) * ch) << "\" width=\"" << fmt6(cw + 0.5)
                   << "\" height=\"" << fmt6(ch + 0.5) << "\" fill=\""
                   << heat_color((v - vlo) / (vhi - vlo)) << "\"/>\n";
            }
        y0 += h;
    }

    for (const auto& t : fig.ternaries) {
        // barycentric -> cartesian: vertices of an equilateral triangle
        const double side = std::min(w - ml - mr, h - mt - mb);
        const double x1 = ml, y1v = y0 + h - mb;
        const double x2 = ml + side, y2v = y0 + h - mb;
        const double x3 = ml + side / 2.0, y3v = y0 + h - mb - side * 0.8660254037844386;
        double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
        finite_range(t.values, vlo, vhi);
        if (!(vhi > vlo)) vhi = vlo + 1.0;
        os << "<text x=\"" << ml << "\" y=\"" << (y0 + mt - 10) << "\">" << t.name << " ["
           << fmt6(vlo) << ", " << fmt6(vhi) << "]</text>\n";
        os << "<polygon fill=\"none\" stroke=\"black\" points=\"" << fmt6(x1) << ',' << fmt6(y1v)
           << ' ' << fmt6(x2) << ',' << fmt6(y2v) << ' ' << fmt6(x3) << ',' << fmt6(y3v)
           << "\"/>\n";
        for (size_t i = 0; i < t.points.size(); ++i) {
            const double v = t.values[i];
            if (!std::isfinite(v)) continue;
            const auto& p = t.points[i];
            const double cx = p[0] * x1 + p[1] * x2 + p[2] * x3;
            const double cy = p[0] * y1v + p[1] * y2v + p[2] * y3v;
            os << "<circle cx=\"" << fmt6(cx) << "\" cy=\"" << fmt6(cy) << "\" r=\"2.2\" fill=\""
               << heat_color((v - vlo) / (vhi - vlo)) << "\"/>\n";
        }
        y0 += h;
    }
    os << "</svg>\n";
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw domain_error("write_atomic: cannot open " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

}  // namespace esnx
