#include "rabi/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace rabi {

std::size_t worker_count(std::size_t requested) {
  std::size_t n = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("RABI_HILL_THREADS")) {
    const std::string_view text(env);
    std::size_t cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) {
      n = std::min(n, cap);
    }
  }
  return n;
}

}  // namespace rabi
