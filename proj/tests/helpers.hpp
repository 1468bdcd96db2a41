#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wordfence/grid.hpp"
#include "wordfence/labelgen.hpp"
#include "wordfence/rng.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "scratch") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wordfence_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(path + ": cannot open in test helper");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline wf::GridF random_grid(wf::Rng& rng, int h, int w, int c, double lo = -2.0,
                             double hi = 2.0) {
  wf::GridF g(h, w, c);
  for (double& v : g.data()) v = rng.next_range(lo, hi);
  return g;
}

// Random valid label map; every class value is drawn uniformly, optionally
// with a sprinkling of ignored pixels.
inline wf::LabelMap random_labels(wf::Rng& rng, int h, int w, int num_classes = 3,
                                  double ignore_fraction = 0.0) {
  wf::LabelMap m{wf::GridU8(h, w, 0), wf::Grid2<std::uint8_t>(h, w, 0)};
  for (std::size_t i = 0; i < m.classes.size(); ++i) {
    m.classes.data()[i] = static_cast<std::uint8_t>(rng.next_int(0, num_classes - 1));
    if (ignore_fraction > 0.0 && rng.next_unit() < ignore_fraction) m.ignore_mask.data()[i] = 1;
  }
  return m;
}

}  // namespace testutil
