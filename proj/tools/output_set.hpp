#pragma once

// In-memory output staging. Nothing touches the output directory until every
// file has been produced; then files go to a hidden staging directory and are
// renamed into place, so a failed run leaves no partial results behind.

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "memnet/errors.hpp"

namespace memnet::cli {

namespace fs = std::filesystem;

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::Usage, "sha256 digest failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class OutputSet {
public:
    void add(std::string name, std::string content) { files_[std::move(name)] = std::move(content); }

    [[nodiscard]] const std::map<std::string, std::string>& files() const { return files_; }

    void commit(const fs::path& dir) const {
        std::error_code ec;
        const bool existed = fs::exists(dir, ec);
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw UsageError("cannot create output directory " + dir.string() +
                             (ec ? ": " + ec.message() : ""));
        }
        const fs::path staging = dir / (".memnet-staging-" + std::to_string(::getpid()));
        try {
            for (const auto& [name, content] : files_) {
                const fs::path target = staging / name;
                fs::create_directories(target.parent_path());
                std::ofstream out(target, std::ios::binary | std::ios::trunc);
                out.write(content.data(), static_cast<std::streamsize>(content.size()));
                out.close();
                if (!out) throw UsageError("cannot write " + (dir / name).string());
            }
            for (const auto& [name, content] : files_) {
                const fs::path target = dir / name;
                fs::create_directories(target.parent_path());
                fs::rename(staging / name, target);
            }
        } catch (const fs::filesystem_error& e) {
            cleanup(dir, staging, existed);
            throw UsageError(std::string("cannot write outputs: ") + e.what());
        } catch (...) {
            cleanup(dir, staging, existed);
            throw;
        }
        fs::remove_all(staging, ec);
    }

private:
    static void cleanup(const fs::path& dir, const fs::path& staging, bool existed) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        if (!existed) fs::remove_all(dir, ec);
    }

    std::map<std::string, std::string> files_;
};

}  // namespace memnet::cli
