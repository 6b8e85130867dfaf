// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace adseq {

/// One predefined time span of a video for which one AD must be produced.
struct AdInterval {
    std::string video_id;
    std::string interval_id;
    double start_s = 0.0;
    double end_s = 0.0;
    std::optional<std::string> gt_text;
    std::vector<std::string> characters;
    std::vector<std::string> frame_paths;

    double duration_s() const { return end_s - start_s; }
    bool operator==(const AdInterval&) const = default;
};

struct VideoDocument {
    std::string video_id;
    std::vector<AdInterval> intervals;  // strictly ascending start_s

    bool operator==(const VideoDocument&) const = default;
};

struct LoadOptions {
    int frame_count = 16;  // required length of non-empty frame lists
};

/// Loads a line-delimited dataset, grouping records per video and sorting
/// intervals by start_s. Videos come back sorted by video_id. Relative frame
/// paths are resolved against the dataset file's directory.
/// Throws LoadError naming the offending line for malformed records.
std::vector<VideoDocument> load_dataset(const std::filesystem::path& path,
                                        const LoadOptions& options = {});

/// Writes documents back out in the input line format (canonical key order).
void save_dataset(const std::vector<VideoDocument>& videos,
                  const std::filesystem::path& path);

nlohmann::json interval_to_json(const AdInterval& interval);
AdInterval interval_from_json(const nlohmann::json& j, int line_no = -1);

/// l_max = max(floor, round(duration * words_per_second)).
int word_budget(const AdInterval& interval, double words_per_second, int floor_words);

enum class Stage { structured, summary, candidates, scores, selected };

std::string stage_name(Stage stage);
std::string stage_filename(Stage stage);  // "<stage>.jsonl"

/// One persisted pipeline artifact for one interval.
struct StageRecord {
    std::string video_id;
    std::string interval_id;
    Stage stage = Stage::structured;
    nlohmann::json payload;  // stage-specific object, merged into the line
    std::vector<std::string> request_hashes;
};

/// Append-or-replace persistence over the per-stage jsonl files of a run
/// directory. Records keep their first-write position on overwrite, so
/// re-running an interval leaves the file order intact. Writes to one store
/// are serialized internally.
class RunStore {
  public:
    explicit RunStore(std::filesystem::path run_dir);

    /// Appends the record (or rewrites the file when replacing an existing
    /// interval_id). Returns the file written.
    std::filesystem::path persist(const StageRecord& record);

    bool has(Stage stage, const std::string& interval_id) const;
    std::optional<StageRecord> find(Stage stage, const std::string& interval_id) const;

    /// Records of one stage in file order.
    const std::vector<StageRecord>& records(Stage stage) const;

    const std::filesystem::path& dir() const { return run_dir_; }

  private:
    std::filesystem::path run_dir_;
    mutable std::mutex mutex_;
    std::map<Stage, std::vector<StageRecord>> records_;

    void rewrite_stage_file(Stage stage);
};

/// One-shot variant of RunStore::persist for callers without a live store.
std::filesystem::path persist_stage(const StageRecord& record,
                                    const std::filesystem::path& out_dir);

nlohmann::json stage_record_to_json(const StageRecord& record);
StageRecord stage_record_from_json(const nlohmann::json& j);

}  // namespace adseq
