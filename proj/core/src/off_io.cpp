#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "spectral_embed/error.hpp"
#include "spectral_embed/mesh.hpp"
#include "spectral_embed/report.hpp"

namespace spectral_embed {

namespace {

// Splits OFF text into whitespace-separated tokens, dropping '#' comments and
// remembering the line each token came from.
struct Token {
  std::string_view text;
  int line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else {
      const std::size_t b = i;
      while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r' &&
             text[i] != '\n' && text[i] != '#') {
        ++i;
      }
      tokens.push_back({text.substr(b, i - b), line});
    }
  }
  return tokens;
}

class TokenReader {
 public:
  TokenReader(std::vector<Token> tokens, std::string source)
      : tokens_(std::move(tokens)), source_(std::move(source)) {}

  const Token& next(const char* what) {
    if (pos_ >= tokens_.size()) {
      fail(tokens_.empty() ? 1 : tokens_.back().line, std::string("unexpected end of file, expected ") + what);
    }
    return tokens_[pos_++];
  }

  long long integer(const char* what) {
    const Token& t = next(what);
    long long value = 0;
    const auto* end = t.text.data() + t.text.size();
    const auto res = std::from_chars(t.text.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      fail(t.line, std::string("expected integer ") + what + ", got '" + std::string(t.text) + "'");
    }
    return value;
  }

  double real(const char* what) {
    const Token& t = next(what);
    const std::string s(t.text);
    char* end = nullptr;
    const double value = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty()) {
      fail(t.line, std::string("expected number ") + what + ", got '" + s + "'");
    }
    return value;
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw MeshError("parse failure: " + source_ + ":" + std::to_string(line) + ": " + message);
  }

  int current_line() const {
    return pos_ < tokens_.size() ? tokens_[pos_].line : (tokens_.empty() ? 1 : tokens_.back().line);
  }

 private:
  std::vector<Token> tokens_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

TriMesh parse_off(const std::string& text, const std::string& source_name) {
  TokenReader in(tokenize(text), source_name);
  const Token& header = in.next("OFF header");
  if (header.text != "OFF") in.fail(header.line, "missing OFF header");
  const long long nv = in.integer("vertex count");
  const long long nf = in.integer("face count");
  in.integer("edge count");
  if (nv <= 0 || nf <= 0) in.fail(in.current_line(), "vertex and face counts must be positive");

  std::vector<Eigen::Vector3d> positions(static_cast<std::size_t>(nv));
  for (auto& p : positions) {
    p.x() = in.real("x coordinate");
    p.y() = in.real("y coordinate");
    p.z() = in.real("z coordinate");
  }
  std::vector<Triangle> triangles(static_cast<std::size_t>(nf));
  for (long long f = 0; f < nf; ++f) {
    const int line = in.current_line();
    const long long arity = in.integer("face arity");
    if (arity != 3) in.fail(line, "face " + std::to_string(f) + " is not a triangle");
    for (int k = 0; k < 3; ++k) {
      const long long v = in.integer("vertex index");
      if (v < 0 || v >= nv) {
        in.fail(line, "face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                          " out of range");
      }
      triangles[static_cast<std::size_t>(f)][static_cast<std::size_t>(k)] = v;
    }
  }
  return TriMesh::create(std::move(positions), std::move(triangles));
}

TriMesh load_mesh(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw MeshError("cannot open mesh file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_off(buffer.str(), path);
}

std::string to_off_string(const TriMesh& mesh) {
  if (mesh.period()) throw InvalidArgument("periodic meshes have no OFF representation");
  std::ostringstream out;
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << " 0\n";
  for (const auto& p : mesh.positions()) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z())
        << '\n';
  }
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  return out.str();
}

void save_off(const TriMesh& mesh, const std::string& path) {
  write_file_atomic(path, to_off_string(mesh));
}

}  // namespace spectral_embed
