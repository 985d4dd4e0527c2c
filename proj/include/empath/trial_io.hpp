#pragma once

/// Trial directory format.
///
/// One directory per trial:
///   manifest.json        id, category, label, speech spans, stream metadata
///   <kind>_<idx>.csv     one CSV per contiguous block: first column time in
///                        seconds, remaining columns one per channel
///
/// All numbers are written in shortest round-trip form, so
/// load_trial(save_trial(t)) reproduces every numeric field bit-exactly.
/// NaN/Inf samples are rejected on both paths; a gap in a stream is a block
/// boundary, never a NaN run.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "empath/errors.hpp"
#include "empath/signal.hpp"

namespace empath {

inline constexpr int kTrialFormatVersion = 1;
inline constexpr const char* kTrialFormatName = "empath-trial";
inline constexpr const char* kTrialManifestName = "manifest.json";

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError(context + ": bad number '" + std::string(s) + "'");
  if (!std::isfinite(v)) throw ParseError(context + ": non-finite value");
  return v;
}

inline std::string block_file_name(SignalKind kind, std::size_t index) {
  std::string name = to_string(kind);
  for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "_%03zu.csv", index);
  return name + suffix;
}

inline void write_block_csv(const SampleBlock& block, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  std::string line = "time";
  for (const std::string& ch : block.channels) {
    line += ',';
    line += ch;
  }
  line += '\n';
  out << line;
  const std::size_t n = block.sample_count();
  for (std::size_t i = 0; i < n; ++i) {
    line = format_double(block.time_at(i));
    for (std::size_t c = 0; c < block.channel_count(); ++c) {
      line += ',';
      line += format_double(block.data[c][i]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline SampleBlock read_block_csv(const std::filesystem::path& path, SignalKind kind,
                                  double sample_rate, const std::vector<std::string>& channels) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open block file '" + path.string() + "'");
  const std::string name = path.filename().string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");

  SampleBlock block;
  block.kind = kind;
  block.sample_rate = sample_rate;
  block.channels = channels;
  block.data.assign(channels.size(), {});

  std::size_t line_no = 1;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string_view rest = line;
    const std::string context = name + ":" + std::to_string(line_no);
    std::size_t field = 0;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      if (field == 0) {
        const double t = parse_double(cell, context);
        if (first_row) {
          block.start_time = t;
          first_row = false;
        }
      } else {
        if (field > channels.size()) throw ParseError(context + ": too many columns");
        block.data[field - 1].push_back(parse_double(cell, context));
      }
      ++field;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (field != channels.size() + 1)
      throw ParseError(context + ": expected " + std::to_string(channels.size() + 1) +
                       " columns, got " + std::to_string(field));
  }
  if (block.sample_count() == 0) throw ParseError(name + ": no sample rows");
  return block;
}

}  // namespace detail

/// Writes a trial directory. The directory is created if needed; existing
/// files with the same names are overwritten.
inline void save_trial(const TrialRecord& trial, const std::filesystem::path& dir) {
  trial.validate();
  for (const auto& [kind, blocks] : trial.streams)
    for (const SampleBlock& b : blocks)
      if (b.sample_count() == 0)
        throw ValidationError(std::string("save_trial: empty ") + to_string(kind) + " block");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create trial directory '" + dir.string() + "': " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["format"] = kTrialFormatName;
  manifest["version"] = kTrialFormatVersion;
  manifest["trial_id"] = trial.trial_id;
  manifest["topic_category"] = to_string(trial.topic_category);
  manifest["label"] = {{"arousal_rate", trial.label.arousal_rate},
                       {"valence_rate", trial.label.valence_rate}};
  nlohmann::ordered_json spans = nlohmann::ordered_json::array();
  for (const auto& [s, e] : trial.speech_spans) spans.push_back({s, e});
  manifest["speech_spans"] = std::move(spans);

  nlohmann::ordered_json streams;
  for (const auto& [kind, blocks] : trial.streams) {  // std::map: fixed EEG/PPG/EDA order
    if (blocks.empty()) continue;
    nlohmann::ordered_json stream;
    stream["sample_rate"] = blocks.front().sample_rate;
    stream["channels"] = blocks.front().channels;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string file = detail::block_file_name(kind, i);
      detail::write_block_csv(blocks[i], dir / file);
      files.push_back(file);
    }
    stream["blocks"] = std::move(files);
    streams[to_string(kind)] = std::move(stream);
  }
  manifest["streams"] = std::move(streams);

  std::ofstream out(dir / kTrialManifestName);
  if (!out) throw IoError("cannot write manifest in '" + dir.string() + "'");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("write failed for manifest in '" + dir.string() + "'");
}

/// Loads and fully validates a trial directory.
inline TrialRecord load_trial(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / kTrialManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open '" + manifest_path.string() + "'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("manifest.json: " + std::string(e.what()));
  }

  TrialRecord trial;
  try {
    if (manifest.at("format").get<std::string>() != kTrialFormatName)
      throw ParseError("manifest.json: not a trial manifest");
    if (manifest.at("version").get<int>() != kTrialFormatVersion)
      throw ParseError("manifest.json: incompatible version " +
                       std::to_string(manifest.at("version").get<int>()));
    trial.trial_id = manifest.at("trial_id").get<std::string>();
    trial.topic_category = quadrant_from_string(manifest.at("topic_category").get<std::string>());
    trial.label.arousal_rate = manifest.at("label").at("arousal_rate").get<int>();
    trial.label.valence_rate = manifest.at("label").at("valence_rate").get<int>();
    for (const auto& span : manifest.at("speech_spans")) {
      if (!span.is_array() || span.size() != 2)
        throw ParseError("manifest.json: speech span must be a [start, end] pair");
      trial.speech_spans.emplace_back(span[0].get<double>(), span[1].get<double>());
    }
    for (const auto& [key, stream] : manifest.at("streams").items()) {
      const SignalKind kind = signal_kind_from_string(key);
      const double rate = stream.at("sample_rate").get<double>();
      const auto channels = stream.at("channels").get<std::vector<std::string>>();
      std::vector<SampleBlock> blocks;
      for (const auto& file : stream.at("blocks"))
        blocks.push_back(
            detail::read_block_csv(dir / file.get<std::string>(), kind, rate, channels));
      trial.streams[kind] = std::move(blocks);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest.json: missing or mistyped field: " + std::string(e.what()));
  }
  trial.validate();
  return trial;
}

/// Sorted list of trial directories (those containing a manifest) under a
/// dataset root.
inline std::vector<std::filesystem::path> list_trial_dirs(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root))
    throw IoError("dataset directory '" + root.string() + "' does not exist");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / kTrialManifestName))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

inline std::vector<TrialRecord> load_dataset(const std::filesystem::path& root) {
  std::vector<TrialRecord> trials;
  for (const auto& dir : list_trial_dirs(root)) trials.push_back(load_trial(dir));
  return trials;
}

}  // namespace empath
