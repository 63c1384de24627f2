#pragma once

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

namespace hnl::cli {

std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target, so a
/// reader never sees a partial file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Output directory that remembers the hash of everything written through it.
/// Safe to share between worker threads.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path path(const std::string& relative) const { return root_ / relative; }
    void write(const std::string& relative, std::string_view content);
    std::map<std::string, std::string> written() const;

private:
    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> hashes_;
};

/// Tool and library versions recorded in manifests.
nlohmann::json build_versions();

/// manifest-<command>.json: command, config hash, seeds, versions and the
/// SHA-256 of every output. Holds nothing time-dependent, so reruns with the
/// same inputs produce the same bytes.
void write_manifest(OutputDir& out, const std::string& command, const std::string& config_bytes,
                    const nlohmann::json& extra);

/// Worker count: HNL_THREADS if set (>= 1), else the hardware concurrency.
std::size_t thread_budget();

/// Runs job(0..count-1) on up to thread_budget() threads. Rethrows the
/// exception of the lowest failing index after every worker has stopped.
void run_jobs(std::size_t count, const std::function<void(std::size_t)>& job);

}  // namespace hnl::cli
