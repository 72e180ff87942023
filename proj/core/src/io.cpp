#include "anderson/io.hpp"

#include <cstdio>
#include <fstream>

#include "json_util.hpp"

namespace anderson {

using detail::coord_from_json;
using detail::coord_json;
using detail::read_json_file;
using detail::write_json_file;
using ordered_json = nlohmann::ordered_json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, mode);
  if (!out) throw SchemaError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw SchemaError("cannot open '" + path + "' for reading");
  return in;
}

std::string sidecar_path_for(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  if (dot == std::string::npos) return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

} // namespace

void write_series_csv(const std::string& path, const DistanceSeries& series) {
  auto out = open_out(path);
  out << "n,distance\n";
  for (std::size_t n = 0; n < series.values.size(); ++n)
    out << n << ',' << format_g17(series.values[n]) << '\n';
  if (!out) throw SchemaError("short write to '" + path + "'");
}

std::vector<double> read_series_values(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,distance")
    throw SchemaError("'" + path + "': expected header 'n,distance', got '" + line + "'");
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw SchemaError("'" + path + "': missing comma on row " + std::to_string(row));
    char* end = nullptr;
    const long n = std::strtol(line.c_str(), &end, 10);
    if (end != line.c_str() + comma || n != static_cast<long>(row))
      throw SchemaError("'" + path + "': bad index on row " + std::to_string(row));
    const char* vbegin = line.c_str() + comma + 1;
    const double v = std::strtod(vbegin, &end);
    if (end == vbegin || *end != '\0')
      throw SchemaError("'" + path + "': bad value on row " + std::to_string(row));
    values.push_back(v);
    ++row;
  }
  if (values.empty()) throw SchemaError("'" + path + "': no data rows");
  return values;
}

void write_series_sidecar(const std::string& path, const DistanceSeries& series) {
  ordered_json j;
  j["c"] = series.c;
  j["seed"] = series.seed;
  j["d"] = series.d;
  j["M"] = series.M;
  j["n_max"] = series.n_max;
  j["convention"] = to_string(series.convention);
  j["truncation_flag"] = series.truncation_flag;
  if (series.breakdown_step)
    j["breakdown_step"] = *series.breakdown_step;
  else
    j["breakdown_step"] = nullptr;
  j["source"] = coord_json(series.source);
  j["target"] = coord_json(series.target);
  j["alpha"] = series.alpha;
  j["beta"] = series.beta;
  write_json_file(path, j);
}

DistanceSeries read_series(const std::string& csv_path) {
  DistanceSeries series;
  series.values = read_series_values(csv_path);
  const std::string side = sidecar_path_for(csv_path);
  const ordered_json j = read_json_file(side);
  try {
    series.c = j.at("c").get<double>();
    series.seed = j.at("seed").get<std::uint64_t>();
    series.d = j.at("d").get<int>();
    series.M = j.at("M").get<int>();
    series.n_max = j.at("n_max").get<int>();
    series.convention = convention_from_string(j.at("convention").get<std::string>());
    series.truncation_flag = j.at("truncation_flag").get<bool>();
    if (!j.at("breakdown_step").is_null())
      series.breakdown_step = j.at("breakdown_step").get<int>();
    series.source = coord_from_json(j.at("source"));
    series.target = coord_from_json(j.at("target"));
    series.alpha = j.at("alpha").get<std::vector<double>>();
    series.beta = j.at("beta").get<std::vector<double>>();
  } catch (const ordered_json::exception& e) {
    throw SchemaError("'" + side + "': " + e.what());
  }
  if (series.values.size() != static_cast<std::size_t>(series.n_max) + 1)
    throw SchemaError("'" + csv_path + "': row count disagrees with sidecar n_max");
  return series;
}

std::string fit_record_string(double c, std::uint64_t seed, const RescaleFit& fit) {
  return detail::fit_record_json(c, seed, fit).dump(2);
}

void write_fit_json(const std::string& path, double c, std::uint64_t seed,
                    const RescaleFit& fit) {
  auto out = open_out(path);
  out << fit_record_string(c, seed, fit) << '\n';
}

void write_profile_csv(const std::string& path, const ShellProfile& profile) {
  auto out = open_out(path);
  out << "l,E\n";
  for (std::size_t l = 0; l < profile.values.size(); ++l)
    out << l << ',' << format_g17(profile.values[l]) << '\n';
}

namespace {

void put_le32(std::ofstream& out, std::int32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::int32_t get_le32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::int32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::int32_t>(b[i]) << (8 * i);
  return v;
}

void write_header_and_values(const std::string& path, const LatticeSpec& spec,
                             const double* values, std::int64_t count) {
  auto out = open_out(path, std::ios::binary);
  put_le32(out, spec.d());
  put_le32(out, spec.M());
  const char reserved[8] = {0};
  out.write(reserved, 8);
  if (values) {
    out.write(reinterpret_cast<const char*>(values),
              count * static_cast<std::int64_t>(sizeof(double)));
  } else {
    const std::vector<char> zeros(1 << 16, 0);
    std::int64_t remaining = count * static_cast<std::int64_t>(sizeof(double));
    while (remaining > 0) {
      const std::int64_t chunk = std::min<std::int64_t>(remaining, zeros.size());
      out.write(zeros.data(), chunk);
      remaining -= chunk;
    }
  }
  if (!out) throw SchemaError("short write to '" + path + "'");
}

LatticeSpec read_header(std::ifstream& in, const std::string& path,
                        std::int64_t max_field_bytes) {
  const std::int32_t d = get_le32(in);
  const std::int32_t M = get_le32(in);
  char reserved[8];
  in.read(reserved, 8);
  if (!in) throw SchemaError("'" + path + "': truncated header");
  return make_lattice(d, M, max_field_bytes);
}

} // namespace

void write_field_dump(const std::string& path, const Field& field) {
  write_header_and_values(path, field.spec(), field.data(),
                          field.spec().total_sites());
}

Field read_field_dump(const std::string& path, std::int64_t max_field_bytes) {
  auto in = open_in(path, std::ios::binary);
  const LatticeSpec spec = read_header(in, path, max_field_bytes);
  Field field(spec);
  in.read(reinterpret_cast<char*>(field.data()),
          spec.total_sites() * static_cast<std::int64_t>(sizeof(double)));
  if (!in) throw SchemaError("'" + path + "': truncated value block");
  field.set_active_radius(spec.max_taxicab()); // support unknown, assume full
  return field;
}

void write_potential_dump(const std::string& bin_path,
                          const std::string& sidecar_path, const Potential& pot) {
  write_header_and_values(bin_path, pot.spec(),
                          pot.is_zero() ? nullptr : pot.omega().data(),
                          pot.spec().total_sites());
  ordered_json j;
  j["c"] = pot.c();
  j["seed"] = pot.seed();
  j["convention"] = to_string(pot.convention());
  write_json_file(sidecar_path, j);
}

Potential read_potential_dump(const std::string& bin_path,
                              const std::string& sidecar_path,
                              std::int64_t max_field_bytes) {
  const ordered_json j = read_json_file(sidecar_path);
  double c;
  std::uint64_t seed;
  Convention conv;
  try {
    c = j.at("c").get<double>();
    seed = j.at("seed").get<std::uint64_t>();
    conv = convention_from_string(j.at("convention").get<std::string>());
  } catch (const ordered_json::exception& e) {
    throw SchemaError("'" + sidecar_path + "': " + e.what());
  }
  auto in = open_in(bin_path, std::ios::binary);
  const LatticeSpec spec = read_header(in, bin_path, max_field_bytes);
  std::vector<double> omega(static_cast<std::size_t>(spec.total_sites()));
  in.read(reinterpret_cast<char*>(omega.data()),
          spec.total_sites() * static_cast<std::int64_t>(sizeof(double)));
  if (!in) throw SchemaError("'" + bin_path + "': truncated value block");
  if (c == 0.0) omega.clear();
  return Potential(spec, c, seed, conv, std::move(omega));
}

} // namespace anderson
