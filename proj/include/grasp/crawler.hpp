#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grasp/corpus.hpp"
#include "grasp/url.hpp"

namespace grasp {

struct CrawlLimits {
  int max_pages = 200;
  int max_depth = 5;  // link hops from the seed (seed is depth 0)
  bool same_origin_only = true;
  int request_delay_ms = 0;

  void validate() const;  // throws ContractError
};

// Absolute http(s) targets of <a href> elements, fragment stripped, the base
// page itself excluded, deduplicated in first-occurrence order.
std::vector<std::string> extract_links(std::string_view dom, const Url& base);
std::vector<std::string> extract_links(std::string_view dom, std::string_view base_url);

struct FetchResponse {
  int status = 0;
  std::string content_type;
  std::string body;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // nullopt when the host cannot be reached.
  virtual std::optional<FetchResponse> fetch(const Url& url) = 0;
};

// Plain HTTP(S) GET with redirects followed.
class HttpFetcher : public Fetcher {
 public:
  explicit HttpFetcher(int timeout_seconds = 10);
  ~HttpFetcher() override;
  std::optional<FetchResponse> fetch(const Url& url) override;

 private:
  struct Clients;
  int timeout_seconds_;
  std::unique_ptr<Clients> clients_;
};

using CrawlLog = std::function<void(const std::string&)>;

// Breadth-first crawl from the seed. Writes the corpus (manifest.jsonl,
// edges.tsv, dom/<id>.html) to out_dir and returns it. Throws NetworkError if
// the seed cannot be fetched; later fetch failures are logged and skipped.
Corpus crawl_site(std::string_view seed_url, const CrawlLimits& limits,
                  const std::filesystem::path& out_dir, Fetcher& fetcher,
                  const CrawlLog& log = {});
Corpus crawl_site(std::string_view seed_url, const CrawlLimits& limits,
                  const std::filesystem::path& out_dir, const CrawlLog& log = {});

}  // namespace grasp
