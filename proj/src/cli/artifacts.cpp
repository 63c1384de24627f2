#include "hnl/cli/artifacts.hpp"

#include "hnl/core/error.hpp"
#include "hnl/simd/kernels.hpp"

#include <Eigen/Core>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

namespace hnl::cli {

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

void OutputDir::write(const std::string& relative, std::string_view content) {
    write_file_atomic(root_ / relative, content);
    const auto h = sha256_hex(content);
    std::lock_guard lock(mutex_);
    hashes_[relative] = h;
}

std::map<std::string, std::string> OutputDir::written() const {
    std::lock_guard lock(mutex_);
    return hashes_;
}

nlohmann::json build_versions() {
    return {{"hnl", HNL_VERSION},
            {"compiler", __VERSION__},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"openssl", OPENSSL_VERSION_TEXT},
            {"kernels", std::string(simd::isa_name(simd::kernels().isa))}};
}

void write_manifest(OutputDir& out, const std::string& command, const std::string& config_bytes,
                    const nlohmann::json& extra) {
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& [path, hash] : out.written()) {
        if (path.rfind("manifest-", 0) == 0) continue;
        outputs[path] = hash;
    }
    nlohmann::json m = {{"command", command},
                        {"config_sha256", sha256_hex(config_bytes)},
                        {"versions", build_versions()},
                        {"outputs", outputs}};
    for (const auto& [k, v] : extra.items()) m[k] = v;
    out.write("manifest-" + command + ".json", m.dump(2) + "\n");
}

std::size_t thread_budget() {
    if (const char* env = std::getenv("HNL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw ConfigError("HNL_THREADS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void run_jobs(std::size_t count, const std::function<void(std::size_t)>& job) {
    const std::size_t workers = std::min(thread_budget(), count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hnl::cli
