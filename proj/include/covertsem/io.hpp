#pragma once

// Small file-output helpers: CSV emission with fixed column order, portable
// greymap export for scenes, and text/JSON writing with path context on
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "covertsem/semantics.hpp"

namespace covertsem::io {

inline void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("io: write failure on '" + path + "'");
}

// shortest round-trip representation of a double
inline std::string format_double(double v) {
    char buf[40];
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) body_ << ',';
            body_ << columns_[i];
        }
        body_ << '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_.size())
            throw std::invalid_argument("CsvWriter: row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) body_ << ',';
            body_ << format_double(values[i]);
        }
        body_ << '\n';
    }

    std::string str() const { return body_.str(); }

    void save(const std::string& path) const { write_text_file(path, body_.str()); }

private:
    std::vector<std::string> columns_;
    std::ostringstream body_;
};

// Binary P5 greymap, values scaled from [0,1] to 0..255.
inline void write_pgm(const std::string& path, const semantics::Image& img) {
    std::ostringstream out;
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    for (double v : img.pix) {
        const int byte = std::min(255, std::max(0, static_cast<int>(v * 255.0 + 0.5)));
        out.put(static_cast<char>(byte));
    }
    write_text_file(path, out.str());
}

// Scene export: image plus a sidecar mask greymap (0 background, 255
// task-critical).
inline void write_scene(const std::string& image_path, const std::string& mask_path,
                        const semantics::Scene& scene) {
    write_pgm(image_path, scene.image);
    semantics::Image mask(scene.image.height, scene.image.width);
    for (std::size_t i = 0; i < scene.mask.size(); ++i) mask.pix[i] = scene.mask[i] ? 1.0 : 0.0;
    write_pgm(mask_path, mask);
}

}  // namespace covertsem::io
