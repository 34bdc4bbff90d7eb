#include "rdlab/csv.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Compact SHA-1 (FIPS 180-4). Only used to fingerprint experiment inputs in
// manifests, so git-compatible blob ids can be checked against `git hash-object`.
struct Sha1 {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
  unsigned char block[64];
  std::size_t block_len = 0;
  std::uint64_t total = 0;

  static std::uint32_t rol(std::uint32_t v, int s) { return (v << s) | (v >> (32 - s)); }

  void process() {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    block_len = 0;
  }

  void update(const unsigned char* p, std::size_t n) {
    total += n;
    while (n > 0) {
      std::size_t take = std::min(n, std::size_t{64} - block_len);
      std::memcpy(block + block_len, p, take);
      block_len += take;
      p += take;
      n -= take;
      if (block_len == 64) process();
    }
  }

  std::string hex_digest() {
    std::uint64_t bits = total * 8;  // latch before the padding bytes bump total
    unsigned char pad = 0x80, zero = 0;
    update(&pad, 1);
    while (block_len != 56) update(&zero, 1);
    unsigned char len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(len, 8);
    char buf[41];
    for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", h[i]);
    return std::string(buf, 40);
  }
};

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

}  // namespace

// 17 significant digits: enough for binary64 -> decimal -> binary64 identity.
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string git_blob_sha1(std::string_view content) {
  Sha1 s;
  std::string head = "blob " + std::to_string(content.size());
  s.update(reinterpret_cast<const unsigned char*>(head.c_str()), head.size() + 1);
  s.update(reinterpret_cast<const unsigned char*>(content.data()), content.size());
  return s.hex_digest();
}

void write_observations(const std::string& csv_path, const std::string& sidecar_path,
                        const ObservationSet& obs) {
  if (obs.points.empty()) throw ConfigError("observation dump: empty set");
  const int d = obs.dim();
  auto out = open_out(csv_path);
  out << "i,t";
  for (int k = 1; k <= d; ++k) out << ",x" << k;
  out << "\n";
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    out << i << ',' << fmt(static_cast<double>(i) * obs.D);
    for (double v : obs.points[i]) out << ',' << fmt(v);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + csv_path);

  nlohmann::json meta;
  meta["D"] = obs.D;
  meta["N"] = obs.n_increments();
  meta["dim"] = d;
  meta["seed"] = obs.seed;
  meta["f_truth_id"] = obs.f_truth_id;
  write_text_file(sidecar_path, meta.dump(2) + "\n");
}

ObservationSet read_observations(const std::string& csv_path, const std::string& sidecar_path) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text_file(sidecar_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("observation sidecar " + sidecar_path + ": " + e.what());
  }
  ObservationSet obs;
  try {
    obs.D = meta.at("D").get<double>();
    obs.seed = meta.at("seed").get<std::uint64_t>();
    obs.f_truth_id = meta.value("f_truth_id", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("observation sidecar " + sidecar_path + ": " + e.what());
  }

  auto table = read_csv_table(csv_path);
  if (table.header.size() < 3 || table.header[0] != "i" || table.header[1] != "t")
    throw ConfigError("observation table " + csv_path + ": expected header i,t,x1,...");
  const std::size_t d = table.header.size() - 2;
  obs.points.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw ConfigError("observation table " + csv_path + ": ragged row");
    Vec x(row.begin() + 2, row.end());
    for (double v : x)
      if (!std::isfinite(v)) throw ConfigError("observation table " + csv_path + ": bad cell");
    obs.points.push_back(std::move(x));
  }
  if (obs.points.empty()) throw ConfigError("observation table " + csv_path + ": no rows");
  if (meta.contains("N") && meta["N"].get<long long>() != obs.n_increments())
    throw ConfigError("observation table " + csv_path + ": row count disagrees with sidecar N");
  if (meta.contains("dim") && meta["dim"].get<std::size_t>() != d)
    throw ConfigError("observation table " + csv_path + ": dimension disagrees with sidecar");
  return obs;
}

void write_coefficients(const std::string& path, const BasisSpec& basis, const CoeffVector& c) {
  if (c.size() != basis.size())
    throw ConfigError("coefficient dump: vector length does not match the basis");
  const int d = basis.dim();
  auto out = open_out(path);
  out << "l,kind";
  for (int k = 1; k <= d; ++k) out << ",r" << k;
  out << ",value\n";
  for (std::size_t i = 0; i < basis.indices.size(); ++i) {
    const TensorIndex& idx = basis.indices[i];
    out << idx.level << ',' << kind_string(idx.kind, d);
    for (int r : idx.r) out << ',' << r;
    out << ',' << fmt(c[i]) << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

CoeffVector read_coefficients(const std::string& path, const BasisSpec& basis) {
  auto table = read_csv_table(path);
  const int d = basis.dim();
  if (table.header.size() != static_cast<std::size_t>(d) + 3)
    throw ConfigError("coefficient table " + path + ": wrong column count for dimension " +
                      std::to_string(d));

  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < basis.indices.size(); ++i) {
    const TensorIndex& idx = basis.indices[i];
    std::string key = std::to_string(idx.level) + "|" + kind_string(idx.kind, d);
    for (int r : idx.r) key += "|" + std::to_string(r);
    pos.emplace(std::move(key), i);
  }

  CoeffVector c(basis.size(), 0.0);
  std::vector<bool> seen(basis.size(), false);
  for (std::size_t row = 0; row < table.raw_rows.size(); ++row) {
    const auto& cells = table.raw_rows[row];
    if (cells.size() != table.header.size())
      throw ConfigError("coefficient table " + path + ": ragged row");
    std::string key = cells[0] + "|" + cells[1];
    for (int k = 0; k < d; ++k) key += "|" + cells[2 + k];
    auto it = pos.find(key);
    if (it == pos.end())
      throw ConfigError("coefficient table " + path + ": index not in the basis: " + key);
    if (seen[it->second])
      throw ConfigError("coefficient table " + path + ": duplicate index: " + key);
    seen[it->second] = true;
    c[it->second] = table.rows[row].back();
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ConfigError("coefficient table " + path + ": missing basis indices");
  return c;
}

void write_field_dump(const std::string& path, const ScalarField& f_hat,
                      const ScalarField& f_hat_star, const DomainSpec& dom, int n_per_axis) {
  const int d = dom.dim;
  if (f_hat.dim() != d || f_hat_star.dim() != d)
    throw ConfigError("field dump: dimension mismatch with the domain");
  if (n_per_axis < 1) throw ConfigError("field dump: need at least one point per axis");
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    if (dom.kind == DomainSpec::Kind::rectangle) {
      lo[i] = dom.lower[i];
      hi[i] = dom.upper[i];
    } else {
      lo[i] = dom.center[i] - dom.radius;
      hi[i] = dom.center[i] + dom.radius;
    }
  }

  auto out = open_out(path);
  for (int k = 1; k <= d; ++k) out << 'x' << k << ',';
  out << "f_hat,f_hat_star\n";
  std::vector<int> idx(d, 0);
  Vec x(d);
  for (;;) {
    for (int i = 0; i < d; ++i)
      x[i] = lo[i] + (idx[i] + 0.5) * (hi[i] - lo[i]) / n_per_axis;
    for (int i = 0; i < d; ++i) out << fmt(x[i]) << ',';
    out << fmt(f_hat.value(x)) << ',' << fmt(f_hat_star.value(x)) << "\n";
    int j = 0;
    while (j < d && ++idx[j] == n_per_axis) idx[j++] = 0;
    if (j == d) break;
  }
  if (!out) throw ConfigError("write failed: " + path);
}

void write_chain_trace(const std::string& path, const PosteriorSummary& summary) {
  const std::size_t n = summary.loglik_trace.size();
  if (summary.accept_trace.size() != n)
    throw ConfigError("chain trace: accept flags out of step with the log-likelihood trace");
  const bool has_l2 = !summary.l2_trace.empty();
  if (has_l2 && summary.l2_trace.size() != n)
    throw ConfigError("chain trace: distance trace out of step with the log-likelihood trace");
  auto out = open_out(path);
  out << "iter,loglik,accept,l2_to_truth\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',' << fmt(summary.loglik_trace[i]) << ','
        << static_cast<int>(summary.accept_trace[i]) << ','
        << (has_l2 ? fmt(summary.l2_trace[i]) : std::string("nan")) << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_out(path);
  out << "key,value\n";
  for (const auto& [k, v] : entries) out << quote_if_needed(k) << ',' << quote_if_needed(v) << "\n";
  if (!out) throw ConfigError("write failed: " + path);
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty table: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      row[i] = std::strtod(cells[i].c_str(), &end);
      if (end == cells[i].c_str() || (end && *end != '\0'))
        row[i] = std::numeric_limits<double>::quiet_NaN();
    }
    t.rows.push_back(std::move(row));
    t.raw_rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace rdlab
