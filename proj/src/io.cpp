#include "convsplit/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace convsplit {

std::string format_sci(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", precision, v);
  return buf;
}

namespace {
void ensure_parent(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
}
}  // namespace

void write_field_csv(const GridFunction& f, const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (f.dim == 1) {
    out << "i,x,value\n";
    for (int i = 0; i < f.nx; ++i)
      out << i << ',' << format_sci(f.x(i)) << ',' << format_sci(f.v[i]) << '\n';
  } else {
    out << "i,j,x,y,value\n";
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i)
        out << i << ',' << j << ',' << format_sci(f.x(i)) << ',' << format_sci(f.y(j))
            << ',' << format_sci(f.at(i, j)) << '\n';
  }
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

void write_field_binary(const GridFunction& f, const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

}  // namespace convsplit
