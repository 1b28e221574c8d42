#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idiomeval/detail/rng.hpp"

namespace testutil {

// deterministic pseudo-random helper for property tests
class Rand {
  public:
    explicit Rand(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t bound) { return rng_.below(bound); }
    bool chance(double p) { return static_cast<double>(rng_.next() >> 11) / 9007199254740992.0 < p; }

    std::string word(std::size_t min_len = 1, std::size_t max_len = 8) {
        static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
        const std::size_t len = min_len + below(max_len - min_len + 1);
        std::string w;
        for (std::size_t i = 0; i < len; ++i) w.push_back(alphabet[below(alphabet.size())]);
        return w;
    }

    std::string unicode_word(std::size_t min_len = 1, std::size_t max_len = 8) {
        static const std::vector<std::string> extra = {"é", "è", "ü", "ñ", "ç", "ö", "α", "ß", "œ"};
        std::string w = word(min_len, max_len);
        if (chance(0.5)) w += extra[below(extra.size())];
        return w;
    }

    std::string sentence(std::size_t min_words, std::size_t max_words) {
        const std::size_t n = min_words + below(max_words - min_words + 1);
        std::string s;
        for (std::size_t i = 0; i < n; ++i) {
            if (!s.empty()) s.push_back(' ');
            s += word();
        }
        return s;
    }

  private:
    idiomeval::detail::SplitMix64 rng_;
};

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("idiomeval_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    std::string file(const std::string& name, const std::string& contents) const {
        const auto p = path_ / name;
        std::ofstream out(p, std::ios::binary);
        out << contents;
        return p.string();
    }

    std::string path(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace testutil
