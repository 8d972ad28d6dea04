#pragma once

// Versioned plain-text model records:
//
//   model=<kind> version=1
//   <name>=v1 v2 ...
//
// Numbers carry 17 significant digits so every double round-trips exactly.
// A file may hold several records back to back (e.g. K-Means plus the
// classifier trained on its labels).

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ddos/kmeans.hpp"
#include "ddos/krr.hpp"
#include "ddos/logistic.hpp"
#include "ddos/mlp.hpp"
#include "ddos/svr.hpp"
#include "ddos/text.hpp"

namespace ddos {

inline constexpr int model_format_version = 1;

struct ModelRecord {
  std::string kind;
  std::vector<std::pair<std::string, std::vector<double>>> fields;

  void put(std::string name, std::vector<double> values) {
    fields.emplace_back(std::move(name), std::move(values));
  }
  void put(std::string name, const Vector& v) { put(std::move(name), std::vector<double>(v.begin(), v.end())); }
  void put(const std::string& name, const Matrix& m) {
    put(name + "_shape", std::vector<double>{double(m.rows()), double(m.cols())});
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    put(name, std::move(flat));
  }

  const std::vector<double>& get(const std::string& name) const {
    for (const auto& [k, v] : fields)
      if (k == name) return v;
    throw error(error_kind::parse, "model '" + kind + "' lacks field '" + name + "'");
  }
  double scalar(const std::string& name) const {
    const auto& v = get(name);
    if (v.size() != 1) throw error(error_kind::parse, "field '" + name + "' must hold one value");
    return v.front();
  }
  Vector vector(const std::string& name) const {
    const auto& v = get(name);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  Matrix matrix(const std::string& name) const {
    const auto& shape = get(name + "_shape");
    const auto& flat = get(name);
    if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0 ||
        static_cast<double>(flat.size()) != shape[0] * shape[1]) {
      throw error(error_kind::parse, "field '" + name + "' has an inconsistent shape");
    }
    Matrix m(static_cast<Eigen::Index>(shape[0]), static_cast<Eigen::Index>(shape[1]));
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[k++];
    return m;
  }
};

inline void write_record(std::ostream& out, const ModelRecord& rec) {
  out << "model=" << rec.kind << " version=" << model_format_version << '\n';
  for (const auto& [name, values] : rec.fields) {
    out << name << '=';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ' ';
      out << text::format_exact(values[i]);
    }
    out << '\n';
  }
}

inline std::vector<ModelRecord> read_records(std::istream& in) {
  std::vector<ModelRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    if (body.starts_with("model=")) {
      const auto parts = text::split(body, ' ');
      if (parts.size() != 2 || parts[1] != "version=" + std::to_string(model_format_version)) {
        throw parse_error(lineno, "expected 'model=<kind> version=1'");
      }
      records.push_back({std::string(parts[0].substr(6)), {}});
      continue;
    }
    if (records.empty()) throw parse_error(lineno, "field before any model header");
    const auto eq = body.find('=');
    if (eq == std::string_view::npos || eq == 0) throw parse_error(lineno, "expected name=values");
    std::vector<double> values;
    const auto rhs = text::trim(body.substr(eq + 1));
    if (!rhs.empty()) {
      for (auto tok : text::split(rhs, ' ')) {
        if (text::trim(tok).empty()) continue;
        const auto v = text::parse_double(tok);
        if (!v) throw parse_error(lineno, "not a number: '" + std::string(tok) + "'");
        values.push_back(*v);
      }
    }
    records.back().put(std::string(body.substr(0, eq)), std::move(values));
  }
  return records;
}

inline const ModelRecord& find_record(const std::vector<ModelRecord>& records,
                                      const std::string& kind) {
  for (const auto& r : records)
    if (r.kind == kind) return r;
  throw error(error_kind::parse, "model file has no '" + kind + "' record");
}

// ---------------------------------------------------------------------------

inline void put_scaler(ModelRecord& rec, const Standardizer& s) {
  rec.put("scaler_mean", s.mean);
  rec.put("scaler_std", s.std);
}
inline Standardizer get_scaler(const ModelRecord& rec) {
  return {rec.vector("scaler_mean"), rec.vector("scaler_std")};
}

inline ModelRecord to_record(const LgrModel& m) {
  ModelRecord rec{"lgr", {}};
  rec.put("weights", m.weights);
  rec.put("bias", std::vector<double>{m.bias});
  put_scaler(rec, m.scaler);
  return rec;
}
inline LgrModel lgr_from_record(const ModelRecord& rec) {
  LgrModel m;
  m.weights = rec.vector("weights");
  m.bias = rec.scalar("bias");
  m.scaler = get_scaler(rec);
  if (m.scaler.arity() != m.arity()) throw error(error_kind::parse, "lgr scaler arity mismatch");
  return m;
}

inline ModelRecord to_record(const MlpModel& m) {
  ModelRecord rec{"mlp", {}};
  rec.put("W1", m.W1);
  rec.put("b1", m.b1);
  rec.put("W2", m.W2);
  rec.put("b2", std::vector<double>{m.b2});
  put_scaler(rec, m.scaler);
  return rec;
}
inline MlpModel mlp_from_record(const ModelRecord& rec) {
  MlpModel m;
  m.W1 = rec.matrix("W1");
  m.b1 = rec.vector("b1");
  m.W2 = rec.vector("W2");
  m.b2 = rec.scalar("b2");
  m.scaler = get_scaler(rec);
  if (m.W1.rows() != mlp_hidden_width || m.b1.size() != mlp_hidden_width ||
      m.W2.size() != mlp_hidden_width || m.scaler.arity() != m.arity()) {
    throw error(error_kind::parse, "mlp record has wrong shapes");
  }
  return m;
}

inline ModelRecord to_record(const KMeansModel& m) {
  ModelRecord rec{"kmeans", {}};
  rec.put("k", std::vector<double>{double(m.k)});
  rec.put("centroids", m.centroids);
  rec.put("wcss", std::vector<double>{m.wcss});
  rec.put("label_map", std::vector<double>(m.label_map.begin(), m.label_map.end()));
  return rec;
}
inline KMeansModel kmeans_from_record(const ModelRecord& rec) {
  KMeansModel m;
  m.k = static_cast<std::size_t>(rec.scalar("k"));
  m.centroids = rec.matrix("centroids");
  m.wcss = rec.scalar("wcss");
  for (double v : rec.get("label_map")) m.label_map.push_back(v != 0 ? 1 : 0);
  if (static_cast<std::size_t>(m.centroids.rows()) != m.k ||
      (!m.label_map.empty() && m.label_map.size() != m.k)) {
    throw error(error_kind::parse, "kmeans record has wrong shapes");
  }
  return m;
}

inline ModelRecord to_record(const KrrModel& m) {
  ModelRecord rec{"krr", {}};
  rec.put("lambda", std::vector<double>{m.lambda});
  rec.put("gamma", std::vector<double>{m.gamma});
  rec.put("alphas", m.alphas);
  rec.put("train_inputs", m.train_inputs);
  return rec;
}
inline KrrModel krr_from_record(const ModelRecord& rec) {
  KrrModel m;
  m.lambda = rec.scalar("lambda");
  m.gamma = rec.scalar("gamma");
  m.alphas = rec.vector("alphas");
  m.train_inputs = rec.matrix("train_inputs");
  if (m.alphas.size() != m.train_inputs.rows()) {
    throw error(error_kind::parse, "krr record has wrong shapes");
  }
  return m;
}

inline ModelRecord to_record(const SvrModel& m) {
  ModelRecord rec{"svr", {}};
  rec.put("C", std::vector<double>{m.C});
  rec.put("epsilon", std::vector<double>{m.epsilon});
  rec.put("gamma", std::vector<double>{m.gamma});
  rec.put("bias", std::vector<double>{m.bias});
  rec.put("dual_deltas", m.dual_deltas);
  rec.put("train_inputs", m.train_inputs);
  return rec;
}
inline SvrModel svr_from_record(const ModelRecord& rec) {
  SvrModel m;
  m.C = rec.scalar("C");
  m.epsilon = rec.scalar("epsilon");
  m.gamma = rec.scalar("gamma");
  m.bias = rec.scalar("bias");
  m.dual_deltas = rec.vector("dual_deltas");
  m.train_inputs = rec.matrix("train_inputs");
  m.converged = true;
  if (m.dual_deltas.size() != m.train_inputs.rows()) {
    throw error(error_kind::parse, "svr record has wrong shapes");
  }
  return m;
}

}  // namespace ddos
