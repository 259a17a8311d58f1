#include "hplab_cli/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace hplab::cli {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content)
{
    const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ArtifactSink::ArtifactSink(fs::path dir) : dir_(std::move(dir))
{
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void ArtifactSink::json(const std::string& name, const Json& j) { text(name, dump(j)); }

void ArtifactSink::text(const std::string& name, const std::string& content)
{
    const fs::path p = dir_ / name;
    write_atomic(p, content);
    written_.push_back(p);
}

// ---------------------------------------------------------------------------

SvgPlot::SvgPlot(std::string title, int width, int height) : title_(std::move(title)), width_(width), height_(height) {}

void SvgPlot::polyline(const std::vector<std::complex<double>>& pts, const std::string& color, double stroke)
{
    items_.push_back({Item::line, pts, color, stroke, ""});
}

void SvgPlot::points(const std::vector<std::complex<double>>& pts, const std::string& color, double radius, const std::string& label)
{
    items_.push_back({Item::dots, pts, color, radius, label});
}

void SvgPlot::marker(std::complex<double> z, const std::string& color, const std::string& label)
{
    items_.push_back({Item::mark, {z}, color, 4.0, label});
}

void SvgPlot::axis_labels(std::string x, std::string y)
{
    xlabel_ = std::move(x);
    ylabel_ = std::move(y);
}

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else if (c == '&')
            out += "&amp;";
        else
            out += c;
    }
    return out;
}

}  // namespace

std::string SvgPlot::render() const
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& it : items_)
        for (const auto& z : it.pts) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
            x0 = std::min(x0, z.real());
            x1 = std::max(x1, z.real());
            y0 = std::min(y0, z.imag());
            y1 = std::max(y1, z.imag());
        }
    if (!(x1 >= x0)) x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    const double pad_x = 0.06 * std::max(x1 - x0, 1e-9), pad_y = 0.06 * std::max(y1 - y0, 1e-9);
    x0 -= pad_x, x1 += pad_x, y0 -= pad_y, y1 += pad_y;
    if (view_) x0 = (*view_)[0], x1 = (*view_)[1], y0 = (*view_)[2], y1 = (*view_)[3];

    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = width_ - left - right, ph = height_ - top - bottom;
    double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
    if (equal_) {
        const double s = std::min(sx, sy);
        const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
        sx = sy = s;
        x0 = cx - 0.5 * pw / s, x1 = cx + 0.5 * pw / s;
        y0 = cy - 0.5 * ph / s, y1 = cy + 0.5 * ph / s;
    }
    const auto X = [&](double x) { return left + (x - x0) * sx; };
    const auto Y = [&](double y) { return top + (y1 - y) * sy; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<!-- generator: hplab -->\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<defs><clipPath id=\"plot\"><rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\"/></clipPath></defs>\n";
    o << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_) << "</text>\n";
    o << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o << "<text x=\"" << fmt(X(xv)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
        o << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(Y(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
    }
    o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << height_ - 10 << "\" text-anchor=\"middle\">" << escape(xlabel_) << "</text>\n";
    o << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(top + ph / 2) << ")\">" << escape(ylabel_)
      << "</text>\n";

    int legend = 0;
    for (const auto& it : items_) {
        if (it.kind == Item::line) {
            o << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\"" << it.color << "\" stroke-width=\"" << it.size << "\" points=\"";
            for (std::size_t k = 0; k < it.pts.size(); ++k) o << (k ? " " : "") << fmt(X(it.pts[k].real())) << ',' << fmt(Y(it.pts[k].imag()));
            o << "\"/>\n";
        } else {
            for (const auto& z : it.pts) {
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
                const double cx = X(z.real()), cy = Y(z.imag());
                if (cx < left || cx > left + pw || cy < top || cy > top + ph) continue;
                if (it.kind == Item::mark)
                    o << "<rect x=\"" << fmt(cx - it.size) << "\" y=\"" << fmt(cy - it.size) << "\" width=\"" << fmt(2 * it.size) << "\" height=\""
                      << fmt(2 * it.size) << "\" fill=\"" << it.color << "\"/>\n";
                else
                    o << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << it.size << "\" fill=\"" << it.color << "\"/>\n";
            }
            if (!it.label.empty()) {
                const double ly = top + 14 + 16 * legend++;
                o << "<circle cx=\"" << fmt(left + pw - 120) << "\" cy=\"" << fmt(ly - 4) << "\" r=\"4\" fill=\"" << it.color << "\"/>\n";
                o << "<text x=\"" << fmt(left + pw - 110) << "\" y=\"" << fmt(ly) << "\">" << escape(it.label) << "</text>\n";
            }
        }
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace hplab::cli
