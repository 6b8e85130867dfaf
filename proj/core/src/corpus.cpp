// SPDX-License-Identifier: Apache-2.0

#include "adseq/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adseq/errors.hpp"

namespace adseq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void line_error(const fs::path& path, int line_no, const std::string& what) {
    throw LoadError(what + " at line " + std::to_string(line_no) + " (" + path.string() + ")");
}

void require_field(const json& j, const char* name, const fs::path& path, int line_no) {
    if (!j.contains(name) || j.at(name).is_null()) {
        line_error(path, line_no, std::string("missing field ") + name);
    }
}

}  // namespace

nlohmann::json interval_to_json(const AdInterval& interval) {
    json j;
    j["video_id"] = interval.video_id;
    j["interval_id"] = interval.interval_id;
    j["start_s"] = interval.start_s;
    j["end_s"] = interval.end_s;
    if (interval.gt_text) {
        j["gt_text"] = *interval.gt_text;
    } else {
        j["gt_text"] = nullptr;
    }
    j["characters"] = interval.characters;
    j["frames"] = interval.frame_paths;
    return j;
}

AdInterval interval_from_json(const json& j, int line_no) {
    AdInterval in;
    fs::path dummy("<json>");
    int n = line_no < 0 ? 0 : line_no;
    require_field(j, "video_id", dummy, n);
    require_field(j, "interval_id", dummy, n);
    require_field(j, "start_s", dummy, n);
    require_field(j, "end_s", dummy, n);
    in.video_id = j.at("video_id").get<std::string>();
    in.interval_id = j.at("interval_id").get<std::string>();
    in.start_s = j.at("start_s").get<double>();
    in.end_s = j.at("end_s").get<double>();
    if (j.contains("gt_text") && !j.at("gt_text").is_null()) {
        in.gt_text = j.at("gt_text").get<std::string>();
    }
    if (j.contains("characters")) in.characters = j.at("characters").get<std::vector<std::string>>();
    if (j.contains("frames")) in.frame_paths = j.at("frames").get<std::vector<std::string>>();
    return in;
}

std::vector<VideoDocument> load_dataset(const fs::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open dataset file: " + path.string());

    std::map<std::string, VideoDocument> by_video;
    std::map<std::string, std::set<std::string>> seen_ids;
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(path, line_no, std::string("malformed line: ") + e.what());
        }
        if (!j.is_object()) line_error(path, line_no, "malformed line: record is not an object");

        for (const char* field : {"video_id", "interval_id", "start_s", "end_s"}) {
            if (!j.contains(field) || j.at(field).is_null()) {
                line_error(path, line_no, std::string("missing field ") + field);
            }
        }

        AdInterval interval;
        try {
            interval = interval_from_json(j, line_no);
        } catch (const json::exception& e) {
            line_error(path, line_no, std::string("malformed field: ") + e.what());
        }

        if (interval.start_s < 0.0) {
            line_error(path, line_no, "negative start_s for interval '" + interval.interval_id + "'");
        }
        if (interval.end_s <= interval.start_s) {
            line_error(path, line_no,
                       "end_s must be greater than start_s for interval '" + interval.interval_id + "'");
        }
        if (!interval.frame_paths.empty() &&
            static_cast<int>(interval.frame_paths.size()) != options.frame_count) {
            line_error(path, line_no,
                       "interval '" + interval.interval_id + "' has " +
                           std::to_string(interval.frame_paths.size()) + " frames, expected " +
                           std::to_string(options.frame_count));
        }
        for (auto& frame : interval.frame_paths) {
            if (fs::path(frame).is_relative()) frame = (base / frame).string();
        }
        if (!seen_ids[interval.video_id].insert(interval.interval_id).second) {
            line_error(path, line_no,
                       "duplicate interval_id '" + interval.interval_id + "' in video '" +
                           interval.video_id + "'");
        }
        auto& doc = by_video[interval.video_id];
        doc.video_id = interval.video_id;
        doc.intervals.push_back(std::move(interval));
    }

    std::vector<VideoDocument> videos;
    videos.reserve(by_video.size());
    for (auto& [id, doc] : by_video) {
        std::stable_sort(doc.intervals.begin(), doc.intervals.end(),
                         [](const AdInterval& a, const AdInterval& b) { return a.start_s < b.start_s; });
        for (size_t k = 1; k < doc.intervals.size(); ++k) {
            if (doc.intervals[k].start_s == doc.intervals[k - 1].start_s) {
                throw LoadError("video '" + id + "': intervals '" + doc.intervals[k - 1].interval_id +
                                "' and '" + doc.intervals[k].interval_id +
                                "' share start_s; ordering must be strict (" + path.string() + ")");
            }
        }
        videos.push_back(std::move(doc));
    }
    return videos;
}

void save_dataset(const std::vector<VideoDocument>& videos, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw LoadError("cannot write dataset file: " + path.string());
    for (const auto& video : videos) {
        for (const auto& interval : video.intervals) {
            out << interval_to_json(interval).dump() << '\n';
        }
    }
    if (!out) throw LoadError("failed writing dataset file: " + path.string());
}

int word_budget(const AdInterval& interval, double words_per_second, int floor_words) {
    if (words_per_second <= 0.0) throw std::invalid_argument("words_per_second must be positive");
    if (floor_words < 1) throw std::invalid_argument("floor must be at least 1");
    if (interval.end_s <= interval.start_s) {
        throw std::invalid_argument("interval duration must be positive");
    }
    const long budget = std::lround(interval.duration_s() * words_per_second);
    return std::max<long>(floor_words, budget);
}

std::string stage_name(Stage stage) {
    switch (stage) {
        case Stage::structured: return "structured";
        case Stage::summary: return "summary";
        case Stage::candidates: return "candidates";
        case Stage::scores: return "scores";
        case Stage::selected: return "selected";
    }
    return "unknown";
}

std::string stage_filename(Stage stage) { return stage_name(stage) + ".jsonl"; }

namespace {

Stage stage_from_name(const std::string& name) {
    for (Stage s : {Stage::structured, Stage::summary, Stage::candidates, Stage::scores,
                    Stage::selected}) {
        if (stage_name(s) == name) return s;
    }
    throw LoadError("unknown stage name: " + name);
}

}  // namespace

nlohmann::json stage_record_to_json(const StageRecord& record) {
    json j = record.payload.is_object() ? record.payload : json::object();
    j["video_id"] = record.video_id;
    j["interval_id"] = record.interval_id;
    j["stage"] = stage_name(record.stage);
    j["request_hashes"] = record.request_hashes;
    return j;
}

StageRecord stage_record_from_json(const json& j) {
    StageRecord record;
    record.video_id = j.value("video_id", "");
    record.interval_id = j.at("interval_id").get<std::string>();
    record.stage = stage_from_name(j.at("stage").get<std::string>());
    if (j.contains("request_hashes")) {
        record.request_hashes = j.at("request_hashes").get<std::vector<std::string>>();
    }
    record.payload = j;
    record.payload.erase("video_id");
    record.payload.erase("interval_id");
    record.payload.erase("stage");
    record.payload.erase("request_hashes");
    return record;
}

RunStore::RunStore(fs::path run_dir) : run_dir_(std::move(run_dir)) {
    std::error_code ec;
    fs::create_directories(run_dir_, ec);
    if (!fs::is_directory(run_dir_)) {
        throw LoadError("run directory is not writable: " + run_dir_.string());
    }
    for (Stage stage : {Stage::structured, Stage::summary, Stage::candidates, Stage::scores,
                        Stage::selected}) {
        records_[stage] = {};
        const fs::path file = run_dir_ / stage_filename(stage);
        if (!fs::exists(file)) continue;
        std::ifstream in(file);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                records_[stage].push_back(stage_record_from_json(json::parse(line)));
            } catch (const std::exception& e) {
                throw LoadError("corrupt stage file " + file.string() + " at line " +
                                std::to_string(line_no) + ": " + e.what());
            }
        }
    }
}

std::filesystem::path RunStore::persist(const StageRecord& record) {
    std::lock_guard lock(mutex_);
    auto& list = records_[record.stage];
    const fs::path file = run_dir_ / stage_filename(record.stage);
    auto it = std::find_if(list.begin(), list.end(), [&](const StageRecord& r) {
        return r.interval_id == record.interval_id;
    });
    if (it != list.end()) {
        *it = record;
        rewrite_stage_file(record.stage);
        return file;
    }
    list.push_back(record);
    std::ofstream out(file, std::ios::app);
    if (!out) throw LoadError("cannot write stage file: " + file.string());
    out << stage_record_to_json(record).dump() << '\n';
    out.flush();
    if (!out) throw LoadError("failed writing stage file: " + file.string());
    return file;
}

void RunStore::rewrite_stage_file(Stage stage) {
    const fs::path file = run_dir_ / stage_filename(stage);
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw LoadError("cannot write stage file: " + tmp.string());
        for (const auto& record : records_[stage]) {
            out << stage_record_to_json(record).dump() << '\n';
        }
        if (!out) throw LoadError("failed writing stage file: " + tmp.string());
    }
    fs::rename(tmp, file);
}

bool RunStore::has(Stage stage, const std::string& interval_id) const {
    return find(stage, interval_id).has_value();
}

std::optional<StageRecord> RunStore::find(Stage stage, const std::string& interval_id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(stage);
    if (it == records_.end()) return std::nullopt;
    for (const auto& record : it->second) {
        if (record.interval_id == interval_id) return record;
    }
    return std::nullopt;
}

const std::vector<StageRecord>& RunStore::records(Stage stage) const {
    std::lock_guard lock(mutex_);
    return records_.at(stage);
}

std::filesystem::path persist_stage(const StageRecord& record, const fs::path& out_dir) {
    RunStore store(out_dir);
    return store.persist(record);
}

}  // namespace adseq
