#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stutterfuzz/sut.hpp"

namespace stutterfuzz {

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_id;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
};

/// Hashed character-trigram term frequencies over the normalized text padded
/// with one space on each side, L2-normalized. Empty text embeds to zeros.
class TrigramEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 512;

  explicit TrigramEmbedder(std::size_t dimension = kDefaultDimension);
  EmbeddingVector embed(std::string_view text) const override;
  std::string id() const override;
  std::size_t dimension() const override { return dimension_; }

 private:
  std::size_t dimension_;
};

/// Client for an external embedding service: GET /info -> {"dim": n},
/// POST {"text"} -> {"vector": [...]}. The constructor performs the
/// handshake and throws ProviderUnavailable when it fails.
class HttpEmbedder final : public EmbeddingProvider {
 public:
  HttpEmbedder(std::string base_url, int timeout_ms = 30000, int max_in_flight = 4);
  ~HttpEmbedder() override;
  EmbeddingVector embed(std::string_view text) const override;
  std::string id() const override;
  std::size_t dimension() const override { return dimension_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::size_t dimension_ = 0;
};

/// HttpEmbedder when `url` is non-empty and reachable, otherwise the trigram
/// default (a warning goes to stderr on fallback).
std::shared_ptr<const EmbeddingProvider> make_embedder(const std::string& url = {});

/// Process-wide trigram embedder.
const EmbeddingProvider& default_embedder();
EmbeddingVector embed(std::string_view text);

/// Cosine similarity; 0 when either vector is all zeros. Throws
/// DimensionMismatch for different sizes or providers.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Mean cosine over ordered pairs of distinct positions. Throws TooFewResults.
double m1(std::span<const EmbeddingVector> embeddings);
/// Error results count as empty text.
double m1(std::span<const TranscriptionResult> results,
          const EmbeddingProvider& provider = default_embedder());

double m2(std::string_view test_case_text, std::string_view benign_text,
          const EmbeddingProvider& provider = default_embedder());

struct AlignmentCounts {
  std::size_t hits = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_len = 0;
  std::size_t hyp_len = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  AlignmentCounts& operator+=(const AlignmentCounts& o);
  friend AlignmentCounts operator+(AlignmentCounts a, const AlignmentCounts& b) { return a += b; }
  friend bool operator==(const AlignmentCounts&, const AlignmentCounts&) = default;
};

/// Unit-cost Levenshtein alignment over words. Among optimal alignments the
/// backtrace prefers substitution, then insertion, then deletion.
AlignmentCounts align_words(std::span<const std::string> reference,
                            std::span<const std::string> hypothesis);
AlignmentCounts align_words(std::string_view reference, std::string_view hypothesis);

/// (S + D + I) / N. Throws EmptyReference when N = 0.
double wer(const AlignmentCounts& c);
/// (S + D + I) / (H + S + D + I). Throws EmptyReference when N + P = 0.
double mer(const AlignmentCounts& c);
/// 1 - H^2 / (N P), and 1 when N P = 0. Throws EmptyReference when N + P = 0.
double wil(const AlignmentCounts& c);

}  // namespace stutterfuzz
