#pragma once

// File formats: edge lists (1-based `i j weight`, `#` comments), cardinality
// profiles and signals (one number per line, optional header), set tables
// (2^p values), CSV with shortest round-trip numbers, SVG line plots, and
// all-or-nothing output directories.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "set_function.hpp"
#include "types.hpp"

namespace subreg {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace io {

inline std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0; // no "-0"
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline bool parse_number(std::string_view s, double& out)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) return false;
    if (s == "nan") { out = std::numeric_limits<double>::quiet_NaN(); return true; }
    if (s == "inf") { out = std::numeric_limits<double>::infinity(); return true; }
    if (s == "-inf") { out = -std::numeric_limits<double>::infinity(); return true; }
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

inline std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    return in;
}

inline std::string strip_comment(std::string line)
{
    if (const auto k = line.find('#'); k != std::string::npos) line.erase(k);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    return line;
}

/// One number per line; a non-numeric first line is taken as a header.
inline std::vector<double> read_column(std::istream& in, const std::string& what)
{
    std::vector<double> r;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_comment(line);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        // first field only when the row has several
        if (const auto k = line.find(','); k != std::string::npos) line.erase(k);
        double x = 0.0;
        if (!parse_number(line, x)) {
            if (r.empty() && lineno == 1) continue;
            throw io_error(what + ": line " + std::to_string(lineno) + " is not a number");
        }
        r.push_back(x);
    }
    return r;
}

inline Vector read_signal(const std::filesystem::path& path)
{
    auto in = open_input(path);
    const auto v = read_column(in, path.string());
    if (v.empty()) throw io_error(path.string() + ": empty signal");
    for (double x : v)
        if (!std::isfinite(x)) throw io_error(path.string() + ": non-finite signal value");
    return to_vector(v);
}

inline CardinalityProfile read_profile(const std::filesystem::path& path)
{
    auto in = open_input(path);
    auto h = read_column(in, path.string());
    if (h.size() < 2) throw io_error(path.string() + ": a profile needs p + 1 >= 2 values");
    return CardinalityProfile(std::move(h));
}

/// Values for all 2^p subsets, bit i of the line index = element i + 1.
inline SetTable read_table(const std::filesystem::path& path)
{
    auto in = open_input(path);
    auto v = read_column(in, path.string());
    std::size_t p = 0;
    while ((std::size_t{1} << p) < v.size()) ++p;
    if (v.empty() || (std::size_t{1} << p) != v.size())
        throw io_error(path.string() + ": a set table needs 2^p values");
    return SetTable(p, std::move(v));
}

/// `p` = 0 infers the node count from the largest index.
inline WeightedGraph read_graph(const std::filesystem::path& path, std::size_t p = 0)
{
    auto in = open_input(path);
    std::vector<Edge> edges;
    std::string line;
    std::size_t lineno = 0;
    long max_index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_comment(line);
        std::istringstream ss(line);
        std::string a, b, c;
        if (!(ss >> a)) continue;
        double i = 0, j = 0, w = 1.0;
        std::string extra;
        if (!(ss >> b) || !parse_number(a, i) || !parse_number(b, j) || (ss >> c && !parse_number(c, w)) ||
            (ss >> extra))
            throw io_error(path.string() + ": line " + std::to_string(lineno) + " is not `i j weight`");
        if (i != std::floor(i) || j != std::floor(j) || i < 1 || j < 1)
            throw io_error(path.string() + ": line " + std::to_string(lineno) + ": indices are 1-based integers");
        max_index = std::max({max_index, static_cast<long>(i), static_cast<long>(j)});
        edges.push_back({static_cast<int>(i) - 1, static_cast<int>(j) - 1, w});
    }
    if (p == 0) p = static_cast<std::size_t>(max_index);
    if (p == 0) throw io_error(path.string() + ": empty graph");
    if (static_cast<std::size_t>(max_index) > p)
        throw io_error(path.string() + ": node index exceeds p = " + std::to_string(p));
    try {
        return WeightedGraph(p, edges);
    } catch (const std::invalid_argument& e) {
        throw io_error(path.string() + ": " + e.what());
    }
}

inline void write_graph(std::ostream& os, const WeightedGraph& g)
{
    os << "# i j weight (1-based)\n";
    for (const auto& e : g.edges()) os << e.i + 1 << ' ' << e.j + 1 << ' ' << format_number(e.weight) << '\n';
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row)
    {
        if (row.size() != header.size()) throw std::logic_error("csv row width differs from header");
        rows.push_back(std::move(row));
    }
    std::size_t column(const std::string& name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw io_error("csv has no column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
    double number(std::size_t row, const std::string& name) const
    {
        double x = 0.0;
        if (!parse_number(rows.at(row).at(column(name)), x)) throw io_error("csv cell is not a number: " + name);
        return x;
    }
};

inline std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c != '"') {
                cur += c;
            } else if (k + 1 < line.size() && line[k + 1] == '"') {
                cur += '"';
                ++k;
            } else {
                quoted = false;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw io_error("csv: unterminated quote");
    out.push_back(cur);
    return out;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + '"';
}

inline void write_csv(std::ostream& os, const CsvTable& t)
{
    auto row = [&](const std::vector<std::string>& r) {
        for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << csv_field(r[k]);
        os << '\n';
    };
    row(t.header);
    for (const auto& r : t.rows) row(r);
}

inline CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw io_error("csv: missing header");
    t.header = split_csv(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto r = split_csv(line);
        if (r.size() != t.header.size()) throw io_error("csv: ragged row");
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_csv(in);
}

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

inline std::string xml_escape(const std::string& s)
{
    std::string r;
    for (char c : s) {
        switch (c) {
        case '&': r += "&amp;"; break;
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '"': r += "&quot;"; break;
        default: r += c;
        }
    }
    return r;
}

/// Polyline plot, one series per method. With log_y, non-positive values
/// are dropped.
inline void write_svg(std::ostream& os, const std::vector<PlotSeries>& series, const PlotSpec& spec)
{
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) || (spec.log_y && !(s.y[k] > 0.0))) continue;
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, ty(s.y[k]));
            y1 = std::max(y1, ty(s.y[k]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double left = 80, right = 170, top = 40, bottom = 60;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };
    auto num = [](double v) {
        std::ostringstream ss;
        ss.precision(4);
        ss << v;
        return ss.str();
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        os << "<text x=\"" << left + pw / 2 << "\" y=\"20\" text-anchor=\"middle\">" << xml_escape(spec.title)
           << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = left + pw * k / 4.0, gy = top + ph * (1.0 - k / 4.0);
        os << "<text x=\"" << gx << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << num(fx)
           << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
           << (spec.log_y ? "1e" + num(fy) : num(fy)) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 15 << "\" text-anchor=\"middle\">"
       << xml_escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << xml_escape(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % (sizeof colors / sizeof *colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
            const double x = series[s].x[k], y = series[s].y[k];
            if (!std::isfinite(x) || !std::isfinite(y) || (spec.log_y && !(y > 0.0))) continue;
            os << (first ? "" : " ") << num(px(x)) << ',' << num(py(y));
            first = false;
        }
        os << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(s);
        os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << xml_escape(series[s].name)
           << "</text>\n";
    }
    os << "</svg>\n";
}

/// Files staged as `<name>.tmp` and renamed together on commit; anything
/// staged or already renamed is removed if the writer is destroyed
/// uncommitted.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (!std::filesystem::is_directory(dir_)) throw io_error("cannot create output directory " + dir_.string());
    }
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet()
    {
        if (committed_) return;
        std::error_code ec;
        for (const auto& n : staged_) std::filesystem::remove(tmp(n), ec);
        for (const auto& n : renamed_) std::filesystem::remove(dir_ / n, ec);
    }

    template <class Writer>
    void add(const std::string& name, Writer&& write)
    {
        std::ofstream out(tmp(name), std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + (dir_ / name).string());
        staged_.push_back(name);
        write(out);
        out.flush();
        if (!out) throw io_error("write failed for " + (dir_ / name).string());
    }

    void commit()
    {
        for (const auto& n : staged_) {
            std::error_code ec;
            std::filesystem::rename(tmp(n), dir_ / n, ec);
            if (ec) throw io_error("cannot rename into " + (dir_ / n).string() + ": " + ec.message());
            renamed_.push_back(n);
        }
        staged_.clear();
        committed_ = true;
    }

    const std::filesystem::path& dir() const { return dir_; }
    std::vector<std::string> names() const { return renamed_; }

private:
    std::filesystem::path tmp(const std::string& name) const { return dir_ / (name + ".tmp"); }

    std::filesystem::path dir_;
    std::vector<std::string> staged_;
    std::vector<std::string> renamed_;
    bool committed_ = false;
};

} // namespace io
} // namespace subreg
