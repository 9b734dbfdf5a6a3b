#include "cascade/formats.hpp"

#include <charconv>
#include <cstdio>

#include "cascade/error.hpp"
#include "cascade/io.hpp"

namespace cascade::formats {

namespace {

std::string header(const Metadata& meta) {
  if (meta.empty()) return {};
  std::string out = "#";
  for (const auto& [key, value] : meta) out += " " + key + "=" + std::to_string(value);
  return out + '\n';
}

std::uint64_t parse_u64(std::string_view field, std::uint64_t lineno) {
  std::uint64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError("expected a non-negative integer, got '" + std::string(field) + "'", lineno);
  return value;
}

// Calls row(fields, lineno) for each data line.
template <typename Row>
void for_each_row(std::string_view text, std::size_t width, Row&& row) {
  std::uint64_t lineno = 0;
  for (auto line : io::split(text, '\n')) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = io::split(line, '\t');
    if (fields.size() != width) throw ParseError("expected " + std::to_string(width) + " tab-separated fields", lineno);
    row(fields, lineno);
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string histogram_tsv(const SizeHistogram& h, const Metadata& meta) {
  std::string out = header(meta);
  for (const auto& [size, count] : h.counts()) out += std::to_string(size) + '\t' + std::to_string(count) + '\n';
  return out;
}

SizeHistogram parse_histogram_tsv(std::string_view text) {
  SizeHistogram h;
  for_each_row(text, 2, [&](const auto& f, std::uint64_t lineno) {
    const auto size = parse_u64(f[0], lineno);
    const auto count = parse_u64(f[1], lineno);
    if (size == 0) throw ParseError("sizes must be positive", lineno);
    h.add(size, count);
  });
  return h;
}

std::map<std::string, std::uint64_t> parse_metadata(std::string_view text) {
  std::map<std::string, std::uint64_t> meta;
  const auto eol = text.find('\n');
  auto first = text.substr(0, eol);
  if (first.empty() || first.front() != '#') return meta;
  first.remove_prefix(1);
  for (auto token : io::split(first, ' ')) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    std::uint64_t value = 0;
    const auto v = token.substr(eq + 1);
    if (std::from_chars(v.data(), v.data() + v.size(), value).ec == std::errc()) meta[std::string(token.substr(0, eq))] = value;
  }
  return meta;
}

std::string property_table_tsv(const PropertyCounts& counts, const Metadata& meta) {
  std::string out = header(meta);
  for (const auto& [key, count] : counts)
    out += std::to_string(key.first) + '\t' + std::to_string(key.second) + '\t' + std::to_string(count) + '\n';
  return out;
}

std::string property_table_tsv(const PropertyTable& table, const Metadata& meta) {
  PropertyCounts counts;
  for (const auto& e : table.entries()) counts[{e.size, e.rounds}] += e.frequency;
  return property_table_tsv(counts, meta);
}

std::vector<TableEntry> parse_property_table_tsv(std::string_view text) {
  std::vector<TableEntry> entries;
  for_each_row(text, 3, [&](const auto& f, std::uint64_t lineno) {
    TableEntry e{parse_u64(f[0], lineno), parse_u64(f[1], lineno), parse_u64(f[2], lineno)};
    if (e.size == 0) throw ParseError("sizes must be positive", lineno);
    if (e.frequency == 0) throw ParseError("frequencies must be positive", lineno);
    entries.push_back(e);
  });
  return entries;
}

std::string cdf_tsv(const Cdf& cdf) {
  std::string out;
  for (std::size_t i = 0; i < cdf.support().size(); ++i) {
    const double p = static_cast<double>(static_cast<long double>(cdf.cumulative_counts()[i]) / cdf.total());
    out += std::to_string(cdf.support()[i]) + '\t' + g17(p) + '\n';
  }
  return out;
}

std::string buckets_tsv(const std::vector<LogBucket>& buckets) {
  std::string out;
  for (const auto& b : buckets) out += std::to_string(b.lo) + '\t' + std::to_string(b.hi) + '\t' + g17(b.mass) + '\n';
  return out;
}

std::string popularity_tsv(const PopularityDistribution& dist) {
  std::string out;
  for (const auto& [popularity, count] : dist.counts) out += std::to_string(popularity) + '\t' + std::to_string(count) + '\n';
  return out;
}

std::string id_map_tsv(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += ids[i] + '\t' + std::to_string(i) + '\n';
  return out;
}

std::string day_split_tsv(const DaySplit& split) {
  std::string out;
  for (auto d : split.train) out += "train\t" + format_day(d) + '\t' + std::to_string(d) + '\n';
  for (auto d : split.test) out += "test\t" + format_day(d) + '\t' + std::to_string(d) + '\n';
  return out;
}

SizeHistogram read_histogram(const std::filesystem::path& path) { return parse_histogram_tsv(io::read_text(path)); }

std::vector<TableEntry> read_property_table(const std::filesystem::path& path) {
  return parse_property_table_tsv(io::read_text(path));
}

}  // namespace cascade::formats
