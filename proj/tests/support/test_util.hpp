#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

namespace testutil {

inline auto fixture_path(const std::string& name) -> std::string
{
    return std::string(EPIFORECAST_FIXTURE_DIR) + "/" + name;
}

// Fresh empty directory under the system temp root, removed on
// destruction.
class TempDir
{
public:
    TempDir()
    {
        static std::atomic<int> counter{ 0 };
        const auto base = std::filesystem::temp_directory_path();
        path_ = base
                / ("epiforecast_test_"
                   + std::to_string(::getpid()) + "_"
                   + std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    auto operator=(const TempDir&) -> TempDir& = delete;

    [[nodiscard]] auto path() const -> const std::filesystem::path&
    {
        return path_;
    }
    [[nodiscard]] auto file(const std::string& name) const -> std::string
    {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

} // namespace testutil
