#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/compound.hpp"
#include "cascade/diffusion.hpp"
#include "cascade/ingest.hpp"
#include "cascade/stats.hpp"

// Text formats shared by the library, the C API and the CLI. Writers return
// strings; callers decide where the bytes go.
namespace cascade::formats {

/// Header metadata carried as "# key=value ..." on the first line.
using Metadata = std::vector<std::pair<std::string, std::uint64_t>>;

// size<TAB>count rows, ascending, after an optional metadata header.
std::string histogram_tsv(const SizeHistogram& h, const Metadata& meta = {});
// Reads histogram or popularity TSV; '#' lines are skipped. Throws ParseError.
SizeHistogram parse_histogram_tsv(std::string_view text);
std::map<std::string, std::uint64_t> parse_metadata(std::string_view text);

// size<TAB>rounds<TAB>count rows.
std::string property_table_tsv(const PropertyCounts& counts, const Metadata& meta = {});
std::string property_table_tsv(const PropertyTable& table, const Metadata& meta = {});
std::vector<TableEntry> parse_property_table_tsv(std::string_view text);

// size<TAB>cumulative_probability at 17 significant digits.
std::string cdf_tsv(const Cdf& cdf);
// lo<TAB>hi<TAB>mass.
std::string buckets_tsv(const std::vector<LogBucket>& buckets);

// popularity<TAB>hashtag_count, ascending, no header.
std::string popularity_tsv(const PopularityDistribution& dist);
// external_id<TAB>dense_id.
std::string id_map_tsv(const std::vector<std::string>& ids);
// set<TAB>YYYY-MM-DD<TAB>day_number.
std::string day_split_tsv(const DaySplit& split);

SizeHistogram read_histogram(const std::filesystem::path& path);
std::vector<TableEntry> read_property_table(const std::filesystem::path& path);

}  // namespace cascade::formats
