#include "stutterfuzz/analysis.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <regex>
#include <semaphore>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/text.hpp"

namespace stutterfuzz {

TrigramEmbedder::TrigramEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::InvalidParams, "embedding dimension must be > 0");
}

std::string TrigramEmbedder::id() const { return "trigram-tf-" + std::to_string(dimension_); }

EmbeddingVector TrigramEmbedder::embed(std::string_view raw) const {
  EmbeddingVector v{std::vector<double>(dimension_, 0.0), id()};
  const std::string norm = text::normalize(raw);
  if (norm.empty()) return v;
  const std::string padded = " " + norm + " ";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint32_t h = 2166136261U;  // FNV-1a
    for (std::size_t k = i; k < i + 3; ++k) {
      h ^= static_cast<unsigned char>(padded[k]);
      h *= 16777619U;
    }
    v.values[h % dimension_] += 1.0;
  }
  double norm2 = 0.0;
  for (const double x : v.values) norm2 += x * x;
  const double len = std::sqrt(norm2);
  for (double& x : v.values) x /= len;
  return v;
}

struct HttpEmbedder::Impl {
  std::string base;
  std::string prefix;
  int timeout_ms;
  mutable std::counting_semaphore<64> in_flight;

  Impl(std::string b, std::string p, int t, int cap)
      : base(std::move(b)), prefix(std::move(p)), timeout_ms(t), in_flight(cap) {}

  httplib::Client client() const {
    httplib::Client c(base);
    const auto t = std::chrono::milliseconds(timeout_ms);
    c.set_connection_timeout(t);
    c.set_read_timeout(t);
    c.set_write_timeout(t);
    return c;
  }
};

HttpEmbedder::HttpEmbedder(std::string base_url, int timeout_ms, int max_in_flight) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url, m, re)) {
    throw Error(ErrorCode::ProviderUnavailable, "embedding endpoint '" + base_url + "' is not a URL");
  }
  std::string prefix = m[2].matched ? m[2].str() : "";
  if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  impl_ = std::make_unique<Impl>(m[1].str(), prefix, timeout_ms, std::clamp(max_in_flight, 1, 64));
  auto c = impl_->client();
  const auto res = c.Get(impl_->prefix + "/info");
  if (!res || res->status != 200) {
    throw Error(ErrorCode::ProviderUnavailable, "embedding service handshake failed at " + base_url);
  }
  try {
    dimension_ = nlohmann::json::parse(res->body).at("dim").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable, std::string("bad /info response: ") + e.what());
  }
  if (dimension_ == 0) throw Error(ErrorCode::ProviderUnavailable, "embedding service reports dim 0");
}

HttpEmbedder::~HttpEmbedder() = default;

std::string HttpEmbedder::id() const { return "http:" + impl_->base + impl_->prefix; }

EmbeddingVector HttpEmbedder::embed(std::string_view text) const {
  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<64>& s;
    ~Release() { s.release(); }
  } release{impl_->in_flight};
  auto c = impl_->client();
  const nlohmann::json body{{"text", std::string(text)}};
  const auto res = c.Post(impl_->prefix + "/embed", body.dump(), "application/json");
  if (!res || res->status != 200) {
    throw Error(ErrorCode::ProviderUnavailable, "embedding request failed");
  }
  EmbeddingVector v;
  v.provider_id = id();
  try {
    v.values = nlohmann::json::parse(res->body).at("vector").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable, std::string("bad embedding response: ") + e.what());
  }
  if (v.values.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch, "embedding service returned " +
                                                  std::to_string(v.values.size()) + " values, expected " +
                                                  std::to_string(dimension_));
  }
  for (const double x : v.values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::ProviderUnavailable, "non-finite embedding value");
  }
  return v;
}

std::shared_ptr<const EmbeddingProvider> make_embedder(const std::string& url) {
  if (!url.empty()) {
    try {
      return std::make_shared<HttpEmbedder>(url);
    } catch (const Error& e) {
      std::cerr << "warning: " << e.what() << "; falling back to trigram embeddings\n";
    }
  }
  return std::make_shared<TrigramEmbedder>();
}

const EmbeddingProvider& default_embedder() {
  static const TrigramEmbedder embedder;
  return embedder;
}

EmbeddingVector embed(std::string_view text) { return default_embedder().embed(text); }

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size() || a.provider_id != b.provider_id) {
    throw Error(ErrorCode::DimensionMismatch, "cannot compare embeddings of different shape or provider");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double m1(std::span<const EmbeddingVector> embeddings) {
  const std::size_t k = embeddings.size();
  if (k < 2) throw Error(ErrorCode::TooFewResults, "M1 needs at least two results");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) sum += cosine(embeddings[i], embeddings[j]);
    }
  }
  return sum / static_cast<double>(k * k - k);
}

double m1(std::span<const TranscriptionResult> results, const EmbeddingProvider& provider) {
  std::vector<EmbeddingVector> embeddings;
  embeddings.reserve(results.size());
  for (const auto& r : results) embeddings.push_back(provider.embed(r.ok() ? r.text : std::string{}));
  return m1(embeddings);
}

double m2(std::string_view test_case_text, std::string_view benign_text,
          const EmbeddingProvider& provider) {
  return cosine(provider.embed(test_case_text), provider.embed(benign_text));
}

AlignmentCounts& AlignmentCounts::operator+=(const AlignmentCounts& o) {
  hits += o.hits;
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_len += o.ref_len;
  hyp_len += o.hyp_len;
  return *this;
}

AlignmentCounts align_words(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size();
  const std::size_t p = hyp.size();
  // cost[i][j]: distance between ref[0, i) and hyp[0, j)
  std::vector<std::vector<std::size_t>> cost(n + 1, std::vector<std::size_t>(p + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = i;
  for (std::size_t j = 0; j <= p; ++j) cost[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= p; ++j) {
      const std::size_t diag = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({diag, cost[i][j - 1] + 1, cost[i - 1][j] + 1});
    }
  }
  AlignmentCounts c;
  c.ref_len = n;
  c.hyp_len = p;
  std::size_t i = n;
  std::size_t j = p;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (cost[i][j] == cost[i - 1][j - 1] + (same ? 0 : 1)) {
        ++(same ? c.hits : c.substitutions);
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[i][j] == cost[i][j - 1] + 1) {
      ++c.insertions;
      --j;
    } else {
      ++c.deletions;
      --i;
    }
  }
  return c;
}

AlignmentCounts align_words(std::string_view reference, std::string_view hypothesis) {
  const auto r = text::tokenize(reference);
  const auto h = text::tokenize(hypothesis);
  return align_words(r, h);
}

double wer(const AlignmentCounts& c) {
  if (c.ref_len == 0) throw Error(ErrorCode::EmptyReference, "WER needs a non-empty reference");
  return static_cast<double>(c.errors()) / static_cast<double>(c.ref_len);
}

double mer(const AlignmentCounts& c) {
  if (c.ref_len + c.hyp_len == 0) throw Error(ErrorCode::EmptyReference, "MER of two empty texts");
  return static_cast<double>(c.errors()) / static_cast<double>(c.hits + c.errors());
}

double wil(const AlignmentCounts& c) {
  if (c.ref_len + c.hyp_len == 0) throw Error(ErrorCode::EmptyReference, "WIL of two empty texts");
  if (c.ref_len == 0 || c.hyp_len == 0) return 1.0;
  const auto h = static_cast<double>(c.hits);
  return 1.0 - (h * h) / (static_cast<double>(c.ref_len) * static_cast<double>(c.hyp_len));
}

}  // namespace stutterfuzz
