#pragma once

// Fetchers and text extractors behind the wrapper and engine seams.
//
// FixtureFetcher serves `<dir>/<fnv1a64(url)>.html` and fails on any URL it
// has no file for, so a test run cannot reach the network by accident.
// SidecarTextExtractor reads pre-extracted `<dir>/<fnv1a64(url)>.txt`.
// HttpFetcher is the live client.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>

#include "mindforge/error.hpp"
#include "mindforge/html.hpp"
#include "mindforge/orchestrator.hpp"
#include "mindforge/text.hpp"
#include "mindforge/wrapper.hpp"

namespace mindforge {

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_name(std::string_view url, std::string_view ext) {
  return text::fnv1a_hex(url) + std::string(ext);
}

class FixtureFetcher {
 public:
  explicit FixtureFetcher(std::filesystem::path dir) : state_(std::make_shared<State>()) { state_->dir = std::move(dir); }

  std::string operator()(const std::string& url) const {
    {
      std::lock_guard lock(state_->mutex);
      state_->requested.push_back(url);
    }
    const auto path = state_->dir / fixture_name(url, ".html");
    auto body = read_file(path);
    if (!body) {
      std::lock_guard lock(state_->mutex);
      state_->unexpected.push_back(url);
      throw Error(ErrorCode::FetchFailed, url + " (no fixture " + path.filename().string() + ")");
    }
    return *body;
  }

  std::vector<std::string> requested() const {
    std::lock_guard lock(state_->mutex);
    return state_->requested;
  }
  std::vector<std::string> unexpected() const {
    std::lock_guard lock(state_->mutex);
    return state_->unexpected;
  }

  wrapper::Fetcher as_fetcher() const {
    return [self = *this](const std::string& url) { return self(url); };
  }

 private:
  struct State {
    std::filesystem::path dir;
    mutable std::mutex mutex;
    std::vector<std::string> requested;
    std::vector<std::string> unexpected;
  };
  std::shared_ptr<State> state_;
};

class SidecarTextExtractor : public TextExtractor {
 public:
  explicit SidecarTextExtractor(std::filesystem::path dir) : dir_(std::move(dir)) {}

  ExtractedText extract(const std::string& url) override {
    auto body = read_file(dir_ / fixture_name(url, ".txt"));
    if (!body) return {"", false};
    return {std::move(*body), true};
  }

 private:
  std::filesystem::path dir_;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{10000};
  std::string user_agent = "mindforge/0.1";
  int max_redirects = 5;
};

// Plain http:// always; https:// only when built with CPPHTTPLIB_OPENSSL_SUPPORT.
class HttpFetcher {
 public:
  explicit HttpFetcher(HttpOptions options = {}) : options_(std::move(options)) {}

  std::string operator()(const std::string& url) const {
    std::string current = url;
    for (int hop = 0; hop <= options_.max_redirects; ++hop) {
      const auto scheme_end = current.find("://");
      if (scheme_end == std::string::npos) throw Error(ErrorCode::FetchFailed, url + " (not an absolute URL)");
      const auto scheme = current.substr(0, scheme_end);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
      if (scheme == "https") throw Error(ErrorCode::FetchFailed, url + " (https support not built in)");
#endif
      if (scheme != "http" && scheme != "https") throw Error(ErrorCode::FetchFailed, url + " (unsupported scheme)");
      const auto path_start = current.find('/', scheme_end + 3);
      const auto origin = current.substr(0, path_start);
      const auto path = path_start == std::string::npos ? std::string("/") : current.substr(path_start);

      httplib::Client cli(origin);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
      cli.set_connection_timeout(secs.count(), usecs.count());
      cli.set_read_timeout(secs.count(), usecs.count());
      auto res = cli.Get(path, {{"User-Agent", options_.user_agent}});
      if (!res) throw Error(ErrorCode::FetchFailed, url + " (" + httplib::to_string(res.error()) + ")");
      if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
        auto loc = res->get_header_value("Location");
        current = loc.find("://") == std::string::npos ? origin + (loc.rfind('/', 0) == 0 ? loc : "/" + loc) : loc;
        continue;
      }
      if (res->status != 200) throw Error(ErrorCode::FetchFailed, url + " (HTTP " + std::to_string(res->status) + ")");
      return res->body;
    }
    throw Error(ErrorCode::FetchFailed, url + " (too many redirects)");
  }

 private:
  HttpOptions options_;
};

// Live extractor for HTML and plain-text documents. Binary formats (pdf,
// ppt) are reported as failed extractions.
class FetchingTextExtractor : public TextExtractor {
 public:
  explicit FetchingTextExtractor(wrapper::Fetcher fetcher) : fetcher_(std::move(fetcher)) {}

  ExtractedText extract(const std::string& url) override {
    std::string body;
    try {
      body = fetcher_(url);
    } catch (const std::exception&) {
      return {"", false};
    }
    if (body.rfind("%PDF", 0) == 0 || body.rfind("\xD0\xCF\x11\xE0", 0) == 0 || body.rfind("PK\x03\x04", 0) == 0)
      return {"", false};
    if (body.find('<') == std::string::npos) return {body, true};
    std::string out;
    for (const auto& n : html::html_to_xml(body)) out += n->text_content() + "\n";
    return {out, true};
  }

 private:
  wrapper::Fetcher fetcher_;
};

}  // namespace mindforge
