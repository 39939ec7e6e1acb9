#include "lisense/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "lisense/random.hpp"

namespace lisense {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

double parse_double(std::string_view text, const std::filesystem::path& path) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error(path.string() + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_pgm(const std::filesystem::path& path, const ByteGrid& image) {
  auto out = open_out(path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ByteGrid read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error(path.string() + ": not a binary PGM");
  std::size_t fields[3];
  for (auto& f : fields) {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    in >> f;
  }
  if (!in || fields[2] != 255) throw std::runtime_error(path.string() + ": unsupported PGM header");
  in.get();
  ByteGrid image(fields[0], fields[1], 0);
  in.read(reinterpret_cast<char*>(image.data().data()),
          static_cast<std::streamsize>(image.size()));
  if (!in) throw std::runtime_error(path.string() + ": truncated PGM");
  return image;
}

void write_binary_pgm(const std::filesystem::path& path, const ByteGrid& bits) {
  ByteGrid gray = bits;
  for (auto& b : gray) b = b ? 255 : 0;
  write_pgm(path, gray);
}

ByteGrid read_binary_pgm(const std::filesystem::path& path) {
  ByteGrid bits = read_pgm(path);
  for (auto& b : bits) b = b >= 128 ? 1 : 0;
  return bits;
}

void write_signal_csv(const std::filesystem::path& path, const ComplexGrid& grid) {
  std::string text = "re,im\n";
  for (const cplx& v : grid) {
    text += format_double(v.real());
    text += ',';
    text += format_double(v.imag());
    text += '\n';
  }
  write_text(path, text);
}

ComplexGrid read_signal_csv(const std::filesystem::path& path, std::size_t width,
                            std::size_t height) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  std::vector<cplx> data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw std::runtime_error(path.string() + ": expected re,im rows");
    data.emplace_back(parse_double(cells[0], path), parse_double(cells[1], path));
  }
  return ComplexGrid(width, height, std::move(data));
}

void write_magnitude_csv(const std::filesystem::path& path, const RadioMap& map) {
  const RealGrid& m = map.magnitudes;
  std::string text = "# width=" + std::to_string(m.width()) +
                     ",height=" + std::to_string(m.height()) +
                     ",origin_x=" + format_double(map.lis.origin_x) +
                     ",origin_y=" + format_double(map.lis.origin_y) +
                     ",spacing=" + format_double(map.lis.spacing) +
                     ",carrier_frequency=" + format_double(map.lis.carrier_frequency) + "\n";
  for (std::size_t r = 0; r < m.height(); ++r) {
    for (std::size_t c = 0; c < m.width(); ++c) {
      if (c > 0) text += ',';
      text += format_double(m(c, r));
    }
    text += '\n';
  }
  write_text(path, text);
}

RadioMap read_magnitude_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("# ", 0) != 0) {
    throw std::runtime_error(path.string() + ": missing '# width=...' metadata line");
  }
  LisArrayConfig lis;
  std::size_t width = 0;
  std::size_t height = 0;
  for (std::string_view kv : split(std::string_view(header).substr(2), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error(path.string() + ": bad metadata");
    const std::string_view key = kv.substr(0, eq);
    const double value = parse_double(kv.substr(eq + 1), path);
    if (key == "width") {
      width = static_cast<std::size_t>(value);
    } else if (key == "height") {
      height = static_cast<std::size_t>(value);
    } else if (key == "origin_x") {
      lis.origin_x = value;
    } else if (key == "origin_y") {
      lis.origin_y = value;
    } else if (key == "spacing") {
      lis.spacing = value;
    } else if (key == "carrier_frequency") {
      lis.carrier_frequency = value;
    } else {
      throw std::runtime_error(path.string() + ": unknown metadata key " + std::string(key));
    }
  }
  lis.elements_x = static_cast<int>(width);
  lis.elements_y = static_cast<int>(height);

  std::vector<double> values;
  values.reserve(width * height);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != width) throw std::runtime_error(path.string() + ": ragged map row");
    for (auto cell : cells) values.push_back(parse_double(cell, path));
  }
  if (values.size() != width * height) {
    throw std::runtime_error(path.string() + ": map size does not match metadata");
  }
  ComplexGrid complex_map(width, height);
  for (std::size_t i = 0; i < values.size(); ++i) complex_map[i] = values[i];
  RadioMap map = make_radio_map(std::move(complex_map), lis);
  map.magnitudes = RealGrid(width, height, std::move(values));
  return map;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_checksum(const std::filesystem::path& path) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(read_text(path))));
  return buf;
}

}  // namespace lisense
