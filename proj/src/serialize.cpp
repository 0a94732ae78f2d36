#include "cforge/serialize.hpp"

#include <fstream>
#include <vector>

namespace cforge {

using nlohmann::json;

namespace {

std::size_t read_dim(const json& j) {
  if (!j.contains("dim") || !j.at("dim").is_number_integer() || j.at("dim").get<long>() <= 0) {
    throw DomainError("serialized object needs a positive integer `dim`");
  }
  return j.at("dim").get<std::size_t>();
}

std::vector<double> read_array(const json& j, const char* key, std::size_t expected) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DomainError(std::string("serialized object needs array `") + key + "`");
  }
  auto values = j.at(key).get<std::vector<double>>();
  if (values.size() != expected) {
    throw DimensionError(std::string("array `") + key + "` has " + std::to_string(values.size()) +
                         " entries, expected " + std::to_string(expected));
  }
  return values;
}

}  // namespace

json matrix_to_json(const CMatrix& m, const std::string& kind) {
  std::vector<double> re;
  std::vector<double> im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return json{{"kind", kind}, {"dim", m.rows()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const json& j) {
  const std::size_t dim = read_dim(j);
  const auto re = read_array(j, "re", dim * dim);
  const auto im = read_array(j, "im", dim * dim);
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto k = static_cast<std::size_t>(r * n + c);
      m(r, c) = Complex(re[k], im[k]);
    }
  }
  return m;
}

json to_json(const QState& state) { return matrix_to_json(state.matrix(), "qstate"); }

json to_json(const DiagonalFilter& filter) {
  std::vector<double> re;
  std::vector<double> im;
  for (std::size_t k = 0; k < filter.dim(); ++k) {
    re.push_back(filter[k].real());
    im.push_back(filter[k].imag());
  }
  return json{{"kind", "filter"}, {"dim", filter.dim()}, {"re", re}, {"im", im}};
}

QState state_from_json(const json& j) { return QState(matrix_from_json(j)); }

DiagonalFilter filter_from_json(const json& j) {
  const std::size_t dim = read_dim(j);
  const auto re = read_array(j, "re", dim);
  const auto im = read_array(j, "im", dim);
  CVector m(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < dim; ++k) {
    m(static_cast<Eigen::Index>(k)) = Complex(re[k], im[k]);
  }
  return DiagonalFilter(std::move(m));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out << contents;
  if (!out) {
    throw IoError("failed writing " + path);
  }
}

}  // namespace cforge
