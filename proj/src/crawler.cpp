#include "grasp/crawler.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>

#include "grasp/error.hpp"
#include "grasp/html.hpp"

namespace grasp {
namespace fs = std::filesystem;

void CrawlLimits::validate() const {
  if (max_pages < 1) throw ContractError("max_pages must be >= 1");
  if (max_depth < 1) throw ContractError("max_depth must be >= 1");
  if (request_delay_ms < 0) throw ContractError("request_delay_ms must be >= 0");
}

std::vector<std::string> extract_links(std::string_view dom, const Url& base) {
  const std::string self = base.without_fragment();
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& tok : html::tokenize(dom)) {
    if (tok.kind != html::Token::Kind::kStartTag || tok.name != "a") continue;
    const auto* href = tok.attribute("href");
    if (href == nullptr) continue;
    const auto target = resolve_reference(base, *href);
    if (!target || !target->is_http() || target->host.empty()) continue;
    auto link = target->without_fragment();
    if (link == self) continue;
    if (seen.insert(link).second) out.push_back(std::move(link));
  }
  return out;
}

std::vector<std::string> extract_links(std::string_view dom, std::string_view base_url) {
  const auto base = Url::parse(base_url);
  if (!base) throw ContractError("base URL must be absolute: " + std::string(base_url));
  return extract_links(dom, *base);
}

struct HttpFetcher::Clients {
  std::map<std::string, std::unique_ptr<httplib::Client>> by_origin;
};

HttpFetcher::HttpFetcher(int timeout_seconds)
    : timeout_seconds_(timeout_seconds), clients_(std::make_unique<Clients>()) {}

HttpFetcher::~HttpFetcher() = default;

std::optional<FetchResponse> HttpFetcher::fetch(const Url& url) {
  auto& client = clients_->by_origin[url.origin()];
  if (!client) {
    client = std::make_unique<httplib::Client>(url.origin());
    if (!client->is_valid()) {
      client.reset();
      return std::nullopt;
    }
    client->set_follow_location(true);
    client->set_connection_timeout(timeout_seconds_, 0);
    client->set_read_timeout(timeout_seconds_, 0);
  }
  std::string target = url.path.empty() ? "/" : url.path;
  if (url.query) target += "?" + *url.query;
  auto res = client->Get(target);
  if (!res) return std::nullopt;
  FetchResponse out;
  out.status = res->status;
  out.content_type = res->get_header_value("Content-Type");
  out.body = std::move(res->body);
  return out;
}

Corpus crawl_site(std::string_view seed_url, const CrawlLimits& limits, const fs::path& out_dir,
                  Fetcher& fetcher, const CrawlLog& log) {
  limits.validate();
  const auto seed = Url::parse(seed_url);
  if (!seed || !seed->is_http()) {
    throw InputError("seed must be an absolute http(s) URL: " + std::string(seed_url));
  }
  const auto note = [&](const std::string& msg) {
    if (log) log(msg);
  };

  struct Fetched {
    std::string url;
    std::string dom;
    std::vector<std::string> links;
  };
  std::vector<Fetched> pages;
  std::deque<std::pair<Url, int>> frontier;
  std::unordered_set<std::string> enqueued;
  frontier.emplace_back(*seed, 0);
  enqueued.insert(seed->without_fragment());
  bool first_request = true;

  while (!frontier.empty() && pages.size() < static_cast<std::size_t>(limits.max_pages)) {
    auto [url, depth] = std::move(frontier.front());
    frontier.pop_front();
    if (!first_request && limits.request_delay_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(limits.request_delay_ms));
    }
    const bool is_seed = first_request;
    first_request = false;

    const std::string key = url.without_fragment();
    const auto response = fetcher.fetch(url);
    std::string failure;
    if (!response) {
      failure = "unreachable";
    } else if (response->status != 200) {
      failure = "HTTP " + std::to_string(response->status);
    } else if (!response->content_type.empty() &&
               response->content_type.find("html") == std::string::npos) {
      failure = "not HTML (" + response->content_type + ")";
    }
    if (!failure.empty()) {
      if (is_seed) throw NetworkError("seed " + key + " could not be fetched: " + failure);
      note("skip " + key + ": " + failure);
      continue;
    }

    Fetched page{key, response->body, extract_links(response->body, url)};
    note("fetched " + key + " (depth " + std::to_string(depth) + ")");
    if (depth < limits.max_depth) {
      for (const auto& link : page.links) {
        const auto target = Url::parse(link);
        if (!target) continue;
        if (limits.same_origin_only && target->origin() != seed->origin()) continue;
        if (enqueued.insert(link).second) frontier.emplace_back(*target, depth + 1);
      }
    }
    pages.push_back(std::move(page));
  }

  std::unordered_map<std::string, PageId> id_of;
  for (std::size_t i = 0; i < pages.size(); ++i) id_of.emplace(pages[i].url, static_cast<PageId>(i));

  Corpus corpus;
  corpus.root = out_dir;
  fs::create_directories(out_dir / "dom");
  std::vector<DirectedEdge> edges;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    PageRecord rec;
    rec.page_id = static_cast<PageId>(i);
    rec.source_id = static_cast<std::int64_t>(i);
    rec.url = pages[i].url;
    rec.dom_path = "dom/" + std::to_string(i) + ".html";
    std::ofstream dom(out_dir / rec.dom_path, std::ios::binary);
    if (!dom) throw IoError("cannot write " + (out_dir / rec.dom_path).string());
    dom << pages[i].dom;
    corpus.pages.push_back(std::move(rec));
    for (const auto& link : pages[i].links) {
      if (const auto it = id_of.find(link); it != id_of.end() && it->second != i) {
        edges.push_back({static_cast<PageId>(i), it->second});
      }
    }
  }
  corpus.graph = LinkGraph::from_edges(pages.size(), std::move(edges));
  write_corpus(corpus, out_dir);
  return corpus;
}

Corpus crawl_site(std::string_view seed_url, const CrawlLimits& limits, const fs::path& out_dir,
                  const CrawlLog& log) {
  HttpFetcher fetcher;
  return crawl_site(seed_url, limits, out_dir, fetcher, log);
}

}  // namespace grasp
