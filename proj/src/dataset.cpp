#include "gfred/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "gfred/error.hpp"
#include "gfred/sampling.hpp"

namespace gfred {

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::string& bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b)
    v = (v << 8) | static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(b)]);
  return v;
}

}  // namespace

LabeledData load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const std::string img = read_all(images);
  const std::string lab = read_all(labels);

  if (img.size() < 16) throw Error(Errc::TruncatedFile, images.string() + ": header truncated");
  if (be32(img, 0) != 0x00000803)
    throw Error(Errc::BadMagic, images.string() + ": not an IDX image file");
  if (lab.size() < 8) throw Error(Errc::TruncatedFile, labels.string() + ": header truncated");
  if (be32(lab, 0) != 0x00000801)
    throw Error(Errc::BadMagic, labels.string() + ": not an IDX label file");

  const std::uint64_t count = be32(img, 4);
  const std::uint64_t rows = be32(img, 8);
  const std::uint64_t cols = be32(img, 12);
  const std::uint64_t label_count = be32(lab, 4);
  if (label_count != count)
    throw Error(Errc::CountMismatch, std::to_string(count) + " images but " +
                                         std::to_string(label_count) + " labels");
  const std::uint64_t D = rows * cols;
  if (img.size() < 16 + count * D)
    throw Error(Errc::TruncatedFile, images.string() + ": pixel data truncated");
  if (lab.size() < 8 + count)
    throw Error(Errc::TruncatedFile, labels.string() + ": label data truncated");

  LabeledData out;
  out.image_rows = static_cast<int>(rows);
  out.image_cols = static_cast<int>(cols);
  out.X.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(count));
  out.labels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t base = 16 + i * D;
    for (std::uint64_t p = 0; p < D; ++p)
      out.X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
          static_cast<unsigned char>(img[base + p]) / 255.0;
    out.labels[i] = static_cast<unsigned char>(lab[8 + i]);
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

LabeledData load_csv_matrix(const std::filesystem::path& path, bool label_row) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> values;
    std::string_view rest(line);
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      ++col;
      const std::string where =
          path.string() + ":" + std::to_string(line_no) + ":" + std::to_string(col);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw Error(Errc::ParseError, where + ": not a number '" + std::string(field) + "'");
      if (!std::isfinite(v)) throw Error(Errc::ParseError, where + ": non-finite value");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width == 0) width = values.size();
    if (values.size() != width)
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": has " +
                                        std::to_string(values.size()) + " fields, expected " +
                                        std::to_string(width));
    if (label_row && labels.empty() && rows.empty()) {
      for (double v : values) {
        if (v != std::floor(v))
          throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) +
                                            ": labels must be integers");
        labels.push_back(static_cast<int>(v));
      }
      continue;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(Errc::ParseError, path.string() + ": no data rows");

  LabeledData out;
  out.labels = std::move(labels);
  out.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      out.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& M) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  char buf[32];
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", M(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

namespace {

// Segments a..g of a seven-segment glyph in a unit box (y grows downward).
struct Segment {
  double x0, y0, x1, y1;
};
constexpr std::array<Segment, 7> kSegments = {{
    {0, 0, 1, 0},      // a
    {1, 0, 1, 0.5},    // b
    {1, 0.5, 1, 1},    // c
    {0, 1, 1, 1},      // d
    {0, 0.5, 0, 1},    // e
    {0, 0, 0, 0.5},    // f
    {0, 0.5, 1, 0.5},  // g
}};
// Bit s set when segment s is lit.
constexpr std::array<unsigned, 10> kDigitMasks = {
    0b0111111, 0b0000110, 0b1011011, 0b1001111, 0b1100110,
    0b1101101, 0b1111101, 0b0000111, 0b1111111, 0b1101111,
};

double segment_distance(double px, double py, double x0, double y0, double x1, double y1) {
  const double dx = x1 - x0, dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - x0) * dx + (py - y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = x0 + t * dx - px, ey = y0 + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

LabeledData synthetic_digits(int classes, int per_class, std::uint64_t seed) {
  if (classes < 1 || classes > 10 || per_class < 1)
    throw Error(Errc::InvalidArgument, "synthetic digits need 1..10 classes and per_class >= 1");
  constexpr int side = 28;
  LabeledData out;
  out.image_rows = side;
  out.image_cols = side;
  out.X.setZero(side * side, classes * per_class);
  out.labels.resize(static_cast<std::size_t>(classes * per_class));

  for (int c = 0; c < classes; ++c) {
    for (int j = 0; j < per_class; ++j) {
      const int col = c * per_class + j;
      out.labels[static_cast<std::size_t>(col)] = c;
      CounterRng rng(seed, 0x5EED0000ULL + static_cast<std::uint64_t>(col));
      auto between = [&](double lo, double hi) { return lo + (hi - lo) * rng.unit(); };

      const double cx = 14.0 + between(-2.0, 2.0);
      const double cy = 14.0 + between(-2.0, 2.0);
      const double w = 10.0 * between(0.8, 1.2);
      const double h = 18.0 * between(0.85, 1.15);
      const double slant = between(-0.3, 0.3);
      const double stroke = between(1.0, 2.2);
      auto to_px = [&](double ux, double uy, double& x, double& y) {
        y = cy + (uy - 0.5) * h;
        x = cx + (ux - 0.5) * w - slant * (uy - 0.5) * h;
      };

      std::vector<Segment> lit;
      for (int s = 0; s < 7; ++s) {
        if (!(kDigitMasks[static_cast<std::size_t>(c)] >> s & 1U)) continue;
        const Segment& seg = kSegments[static_cast<std::size_t>(s)];
        Segment p{};
        to_px(seg.x0 + between(-0.06, 0.06), seg.y0 + between(-0.04, 0.04), p.x0, p.y0);
        to_px(seg.x1 + between(-0.06, 0.06), seg.y1 + between(-0.04, 0.04), p.x1, p.y1);
        lit.push_back(p);
      }

      for (int r = 0; r < side; ++r) {
        for (int q = 0; q < side; ++q) {
          const double px = q + 0.5, py = r + 0.5;
          double d = 1e9;
          for (const auto& s : lit) d = std::min(d, segment_distance(px, py, s.x0, s.y0, s.x1, s.y1));
          double v = std::clamp(stroke - d + 0.5, 0.0, 1.0);
          if (v > 0.0) v = std::clamp(v + between(-0.1, 0.1), 0.0, 1.0);
          out.X(r * side + q, col) = v;
        }
      }
    }
  }
  return out;
}

}  // namespace gfred
