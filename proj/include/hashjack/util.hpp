#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hashjack {

// --- hashing -----------------------------------------------------------

// FNV-1a over raw bytes. Used for file checksums and seed derivation;
// not a cryptographic hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);

std::uint64_t splitmix64(std::uint64_t x);

// All randomness in a run flows from one root seed. Stage streams are
// split by hashing "stage\x1fkey" into the root, so adding a stage or a
// hashtag never perturbs the draws of another.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage,
                          std::string_view key = {});

std::string to_hex(std::uint64_t v);

// --- seeded draws ------------------------------------------------------
//
// std:: distributions are implementation-defined, so every draw used for
// reproducible output goes through these helpers instead.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // uniform in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    return n == 0 ? 0 : eng_() % n;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Knuth's product method; split additively for large means so the
  // running product never underflows.
  std::uint64_t poisson(double mean);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

// --- formatting / strings ----------------------------------------------

// Shortest round-trip representation (std::to_chars); the single float
// formatter behind every CSV/JSON emitter so outputs stay byte-stable.
std::string format_double(double v);

std::string csv_escape(const std::string& field);
std::string xml_escape(const std::string& s);

std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

// ASCII lowercasing plus the Latin-1 block, so German umlauts fold too.
std::string lower_utf8(std::string_view s);

// --- small file helpers --------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace hashjack
