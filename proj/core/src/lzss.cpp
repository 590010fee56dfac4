#include "mbc/lzss.hpp"

#include <algorithm>

#include "mbc/bit_io.hpp"
#include "mbc/error.hpp"

namespace mbc::lz {
namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'P', 'B', '1'};
constexpr int kHashBits = 16;

std::uint32_t hash3(const std::uint8_t* p) {
  const std::uint32_t v = (std::uint32_t{p[0]} << 16) | (std::uint32_t{p[1]} << 8) | p[2];
  return (v * 2654435761u) >> (32 - kHashBits);
}

}  // namespace

std::vector<LzToken> parse(std::span<const std::uint8_t> data) {
  const std::size_t n = data.size();
  std::vector<LzToken> tokens;
  std::vector<std::int64_t> head(std::size_t{1} << kHashBits, -1);
  std::vector<std::int64_t> prev(n, -1);

  auto insert = [&](std::size_t pos) {
    if (pos + kMinMatch > n) return;
    auto& h = head[hash3(&data[pos])];
    prev[pos] = h;
    h = static_cast<std::int64_t>(pos);
  };

  std::size_t pos = 0;
  while (pos < n) {
    std::size_t best_len = 0;
    std::size_t best_dist = 0;
    if (pos + kMinMatch <= n) {
      const std::size_t limit = std::min(kMaxMatch, n - pos);
      for (auto cand = head[hash3(&data[pos])]; cand >= 0; cand = prev[cand]) {
        const std::size_t dist = pos - static_cast<std::size_t>(cand);
        if (dist > kWindow) break;
        std::size_t len = 0;
        while (len < limit && data[cand + len] == data[pos + len]) ++len;
        if (len > best_len) {
          best_len = len;
          best_dist = dist;
          if (len == limit) break;
        }
      }
    }
    if (best_len >= kMinMatch) {
      tokens.push_back({true, 0, static_cast<std::uint32_t>(best_dist),
                        static_cast<std::uint32_t>(best_len)});
      for (std::size_t k = 0; k < best_len; ++k) insert(pos + k);
      pos += best_len;
    } else {
      tokens.push_back({false, data[pos], 0, 0});
      insert(pos);
      ++pos;
    }
  }
  return tokens;
}

std::vector<std::uint8_t> compress(std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u64_le(out, data.size());
  BitWriter bits(out);
  for (const auto& t : parse(data)) {
    if (t.is_match) {
      bits.put(1);
      bits.write(t.distance - 1, 15);
      bits.write(t.length - kMinMatch, 8);
    } else {
      bits.put(0);
      bits.write(t.literal, 8);
    }
  }
  return out;
}

std::vector<std::uint8_t> compress(std::string_view text) {
  return compress(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> blob) {
  if (blob.size() < 4) throw Error(ErrorCode::kTruncatedStream, "missing magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), blob.begin()))
    throw Error(ErrorCode::kBadMagic, "not an SPB1 blob");
  if (blob.size() < kHeaderBytes) throw Error(ErrorCode::kTruncatedStream, "truncated length");
  const std::uint64_t length = get_u64_le(blob.subspan(4, 8));

  BitReader bits(blob.subspan(kHeaderBytes));
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(length, std::uint64_t{1} << 26)));
  while (out.size() < length) {
    if (bits.read(1) == 0) {
      out.push_back(static_cast<std::uint8_t>(bits.read(8)));
      continue;
    }
    const std::size_t dist = bits.read(15) + 1;
    const std::size_t len = bits.read(8) + kMinMatch;
    if (dist > out.size())
      throw Error(ErrorCode::kOffsetOutOfRange,
                  "distance " + std::to_string(dist) + " at output offset " + std::to_string(out.size()));
    if (out.size() + len > length)
      throw Error(ErrorCode::kMalformedStream, "match runs past the stated length");
    const std::size_t from = out.size() - dist;
    for (std::size_t k = 0; k < len; ++k) out.push_back(out[from + k]);
  }
  if (!bits.only_padding_left()) throw Error(ErrorCode::kTrailingTokens, "data after the last token");
  return out;
}

}  // namespace mbc::lz

namespace mbc {

std::string canonical_text(const Message& message) {
  std::string out;
  for (std::size_t k = 0; k < message.symbols.size(); ++k) {
    if (k) out += ' ';
    out += message.symbols[k];
  }
  if (!message.empty()) out += '\n';
  return out;
}

Bits baseline_bits(const Message& message) {
  return 8.0 * static_cast<double>(lz::compress(canonical_text(message)).size());
}

}  // namespace mbc
