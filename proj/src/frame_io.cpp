#include "frameforge/frame_io.hpp"

#include "frameforge/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frameforge {

std::string fmt17(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json bounds_json(const FrameBounds& b) {
  return json{{"lower", b.lower}, {"upper", b.upper}, {"tolerance", b.tolerance},
              {"method", to_string(b.method)}};
}

namespace {

double num(const json& v) {
  if (!v.is_number()) throw InvalidInput("expected a number in frame file");
  return v.get<double>();
}

}  // namespace

Frame frame_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("frame JSON must be an object");
  Frame f;
  std::string field = j.value("field", "real");
  if (field == "real") f.field = Field::Real;
  else if (field == "complex") f.field = Field::Complex;
  else throw InvalidInput("unknown field '" + field + "'");
  if (!j.contains("dim") || !j.contains("vectors")) throw InvalidInput("frame JSON needs dim and vectors");
  int d = j.at("dim").get<int>();
  const json& vs = j.at("vectors");
  if (d <= 0 || !vs.is_array()) throw InvalidInput("bad dim or vectors");
  f.vectors.resize(d, static_cast<Eigen::Index>(vs.size()));
  for (size_t c = 0; c < vs.size(); ++c) {
    const json& v = vs[c];
    if (!v.is_array() || static_cast<int>(v.size()) != d)
      throw InvalidInput("vector " + std::to_string(c) + " does not have " + std::to_string(d) + " coordinates");
    for (int r = 0; r < d; ++r) {
      const json& e = v[r];
      if (f.field == Field::Complex) {
        if (e.is_array() && e.size() == 2) f.vectors(r, c) = cplx(num(e[0]), num(e[1]));
        else f.vectors(r, c) = cplx(num(e), 0.0);
      } else {
        f.vectors(r, c) = cplx(num(e), 0.0);
      }
    }
  }
  if (j.contains("weights") && !j.at("weights").is_null()) {
    for (const auto& w : j.at("weights")) f.weights.push_back(num(w));
    f.explicit_weights = true;
  }
  validate(f);
  return f;
}

std::string frame_to_json_text(const Frame& f) {
  std::ostringstream os;
  os << "{\"field\":\"" << (f.field == Field::Real ? "real" : "complex") << "\",\"dim\":" << f.dim()
     << ",\"vectors\":[";
  for (int c = 0; c < f.size(); ++c) {
    if (c) os << ',';
    os << '[';
    for (int r = 0; r < f.dim(); ++r) {
      if (r) os << ',';
      cplx z = f.vectors(r, c);
      if (f.field == Field::Real) os << fmt17(z.real());
      else os << '[' << fmt17(z.real()) << ',' << fmt17(z.imag()) << ']';
    }
    os << ']';
  }
  os << ']';
  if (!f.weights.empty()) {
    os << ",\"weights\":[";
    for (size_t k = 0; k < f.weights.size(); ++k) os << (k ? "," : "") << fmt17(f.weights[k]);
    os << ']';
  }
  os << "}\n";
  return os.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

Frame load_frame(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  return frame_from_json(j);
}

}  // namespace frameforge
