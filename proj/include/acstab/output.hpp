#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace acstab {

// Fixed-format numeric printing so output bytes do not depend on locale or
// stream state.
inline std::string fmt_g(double x, int precision = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

inline std::string fmt_int(long long x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", x);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open for writing: " + path);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw config_error("write failed: " + path);
}

// Comma separated table with '#' comment header lines (provenance: the
// command and the full config are embedded so a run can be reproduced from
// the file alone).
class CsvWriter {
 public:
  void comment(const std::string& line) {
    if (!header_done_) buf_ += "# " + line + "\n";
  }

  void columns(const std::vector<std::string>& names) {
    header_done_ = true;
    append_joined(names);
  }

  void row(const std::vector<std::string>& cells) { append_joined(cells); }

  const std::string& str() const { return buf_; }
  void save(const std::string& path) const { write_text_file(path, buf_); }

 private:
  void append_joined(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += cells[i];
    }
    buf_ += '\n';
  }

  std::string buf_;
  bool header_done_ = false;
};

// Minimal SVG assembly, enough for line plots and heat maps.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height) : w_(width), h_(height) {
    buf_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           fmt_g(w_, 6) + "\" height=\"" + fmt_g(h_, 6) + "\" viewBox=\"0 0 " + fmt_g(w_, 6) +
           " " + fmt_g(h_, 6) + "\">\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    buf_ += "<rect x=\"" + fmt_g(x, 6) + "\" y=\"" + fmt_g(y, 6) + "\" width=\"" + fmt_g(w, 6) +
            "\" height=\"" + fmt_g(h, 6) + "\" fill=\"" + fill + "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    buf_ += "<line x1=\"" + fmt_g(x1, 6) + "\" y1=\"" + fmt_g(y1, 6) + "\" x2=\"" + fmt_g(x2, 6) +
            "\" y2=\"" + fmt_g(y2, 6) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
            fmt_g(width, 6) + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double width = 1.0) {
    buf_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt_g(width, 6) +
            "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) buf_ += ' ';
      buf_ += fmt_g(pts[i].first, 6) + "," + fmt_g(pts[i].second, 6);
    }
    buf_ += "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 12.0,
            const std::string& anchor = "start") {
    buf_ += "<text x=\"" + fmt_g(x, 6) + "\" y=\"" + fmt_g(y, 6) + "\" font-size=\"" +
            fmt_g(size, 6) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s +
            "</text>\n";
  }

  std::string str() const { return buf_ + "</svg>\n"; }
  void save(const std::string& path) const { write_text_file(path, str()); }

  double width() const { return w_; }
  double height() const { return h_; }

 private:
  double w_, h_;
  std::string buf_;
};

inline std::string rgb(int r, int g, int b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r & 255, g & 255, b & 255);
  return buf;
}

// Dark blue -> teal -> yellow ramp on t in [0,1].
inline std::string heat_color(double t) {
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  double r = t < 0.5 ? 0.1 + 0.3 * (2.0 * t) : 0.4 + 0.6 * (2.0 * t - 1.0);
  double g = t < 0.5 ? 0.15 + 0.55 * (2.0 * t) : 0.7 + 0.25 * (2.0 * t - 1.0);
  double b = t < 0.5 ? 0.35 + 0.25 * (2.0 * t) : 0.6 - 0.5 * (2.0 * t - 1.0);
  return rgb(int(r * 255.0 + 0.5), int(g * 255.0 + 0.5), int(b * 255.0 + 0.5));
}

}  // namespace acstab
