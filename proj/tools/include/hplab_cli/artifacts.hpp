#pragma once

#include "hplab_cli/config.hpp"

#include <array>
#include <complex>
#include <optional>
#include <filesystem>
#include <string>
#include <vector>

namespace hplab::cli {

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& j);

/// Collects the paths written by a command.
class ArtifactSink {
public:
    explicit ArtifactSink(std::filesystem::path dir);

    void json(const std::string& name, const Json& j);
    void text(const std::string& name, const std::string& content);

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::filesystem::path>& written() const { return written_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

/// Minimal static scatter/line plot in the complex plane or on real axes.
class SvgPlot {
public:
    SvgPlot(std::string title, int width = 720, int height = 540);

    void polyline(const std::vector<std::complex<double>>& pts, const std::string& color, double stroke = 1.5);
    void points(const std::vector<std::complex<double>>& pts, const std::string& color, double radius = 2.5, const std::string& label = "");
    void marker(std::complex<double> z, const std::string& color, const std::string& label);
    void axis_labels(std::string x, std::string y);
    /// Use equal scales on both axes (for the complex plane).
    void equal_aspect(bool on) { equal_ = on; }
    /// Fixes the plotted region instead of fitting it to the data; items outside are clipped.
    void view(double x0, double x1, double y0, double y1) { view_ = {x0, x1, y0, y1}; }

    std::string render() const;

private:
    struct Item {
        enum Kind { line, dots, mark } kind;
        std::vector<std::complex<double>> pts;
        std::string color;
        double size;
        std::string label;
    };
    std::string title_, xlabel_ = "Re z", ylabel_ = "Im z";
    int width_, height_;
    bool equal_ = true;
    std::optional<std::array<double, 4>> view_;
    std::vector<Item> items_;
};

}  // namespace hplab::cli
