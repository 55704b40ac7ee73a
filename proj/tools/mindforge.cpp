// mindforge: batch front end and service launcher.
//
//   mindforge expand --map m.mm --select ID_1 [--level 1] [--k 4] [--base "naive bayes"]
//   mindforge search --config svc.toml (--query "..." | --select ID ...) [--source dblp] [--limit 10]
//   mindforge dedupe --input records.jsonl [--output out.jsonl] [--priority a,b] [--catalog venues.tsv]
//   mindforge match-venue "VLDB Conf" [--catalog venues.tsv]
//   mindforge scrape --wrapper blog.xml --param searchQuery=ubuntu --fixtures dir
//   mindforge serve --config svc.toml [--port 8080]
//
// Exit status: 0 success, 1 runtime error, 2 usage error.

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mindforge/config.hpp"
#include "mindforge/dedup.hpp"
#include "mindforge/error.hpp"
#include "mindforge/expansion.hpp"
#include "mindforge/fetch.hpp"
#include "mindforge/mindmap.hpp"
#include "mindforge/server.hpp"
#include "mindforge/venue.hpp"
#include "mindforge/workbench.hpp"
#include "mindforge/wrapper.hpp"

#ifndef MINDFORGE_DATA_DIR
#define MINDFORGE_DATA_DIR "data"
#endif

namespace {

using namespace mindforge;

std::string data_path(const std::string& name) { return std::string(MINDFORGE_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  auto content = read_file(path);
  if (!content) throw Error(ErrorCode::IoError, "cannot read " + path);
  return *content;
}

ServiceConfig service_config(const std::optional<std::string>& flag) {
  const auto path = resolve_config_path(flag);
  if (!path) throw Error(ErrorCode::ConfigError, "no config: pass --config or set MINDFORGE_CONFIG");
  return ServiceConfig::load(*path);
}

struct ExpandArgs {
  std::string map_path;
  std::vector<std::string> selected;
  std::vector<std::string> add;
  std::vector<std::string> remove;
  unsigned level = 1;
  std::size_t k = 4;
  std::string base;
  std::string stopwords = data_path("stopwords_en.txt");
};

int run_expand(const ExpandArgs& a) {
  const auto map = parse_mindmap(slurp(a.map_path));
  const auto stop = StopwordList::load(a.stopwords);
  json out = {{"base_terms", text::tokenize(a.base)}, {"k", a.k}};
  if (a.k == 0) {
    ExpandedQuery q;
    q.base_terms = text::tokenize(a.base);
    out["terms"] = json::array();
    out["query"] = q.query_string();
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  auto n = compute_neighbourhood(map, {a.selected.begin(), a.selected.end()}, a.level);
  n = refine_neighbourhood(map, std::move(n), {a.add.begin(), a.add.end()}, {a.remove.begin(), a.remove.end()});
  const auto q = expand_query(a.base, map, n, DocWeights{}, stop, a.k);
  json terms = json::array();
  for (const auto& t : q.expansion_terms) terms.push_back({{"term", t.term}, {"score", t.aggregate}});
  out["neighbourhood_ids"] = n.included_ids;
  out["terms"] = terms;
  out["query"] = q.query_string();
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct SearchArgs {
  std::optional<std::string> config;
  std::string query;
  std::vector<std::string> selected;
  std::vector<std::string> sources;
  std::optional<std::size_t> limit;
  std::optional<std::size_t> k;
  std::optional<unsigned> level;
};

int run_search(const SearchArgs& a) {
  Workbench wb(service_config(a.config));
  json req = {{"base_query", a.query}};
  if (!a.selected.empty()) req["selected_ids"] = a.selected;
  if (!a.sources.empty()) req["sources"] = a.sources;
  if (a.limit) req["limit"] = *a.limit;
  if (a.k) req["k"] = *a.k;
  if (a.level) req["level"] = *a.level;
  const auto started = wb.start_search(req);
  for (const auto& d : started["diagnostics"])
    if (d["status"] != "ok")
      std::cerr << "source " << d["source"].get<std::string>() << ": " << d["status"].get<std::string>() << " "
                << d["message"].get<std::string>() << "\n";
  std::cerr << "query: " << started["query"].get<std::string>() << "\n";
  const auto results = wb.results(started["task_id"], std::nullopt);
  for (const auto& r : results["records"]) std::cout << r.dump() << "\n";
  return 0;
}

std::vector<json> read_json_lines(std::istream& in) {
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BadRequest, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

struct DedupeArgs {
  std::string input;
  std::string output;
  std::vector<std::string> priority;
  std::string catalog;
};

// Records carry source_id; priority follows --priority, then first
// appearance in the input.
int run_dedupe(const DedupeArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + a.input);
  std::vector<std::string> order = a.priority;
  std::map<std::string, std::vector<PublicationRecord>> by_source;
  for (const auto& j : read_json_lines(in)) {
    auto r = record_from_json(j);
    if (std::find(order.begin(), order.end(), r.source_id) == order.end()) order.push_back(r.source_id);
    auto& list = by_source[r.source_id];
    if (r.source_rank == 0) r.source_rank = list.size() + 1;
    list.push_back(std::move(r));
  }
  std::optional<VenueCatalog> catalog;
  if (!a.catalog.empty()) catalog = VenueCatalog::load(a.catalog);
  std::vector<SourceResults> per_source;
  for (const auto& s : order) {
    auto records = by_source[s];
    if (catalog) records = normalize_records(std::move(records), *catalog);
    per_source.emplace_back(s, std::move(records));
  }
  DedupStats stats;
  const auto out = deduplicate(per_source, &stats);
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output, std::ios::trunc);
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + a.output);
  }
  std::ostream& os = a.output.empty() ? std::cout : file;
  for (const auto& r : out) os << record_to_json(r).dump() << "\n";
  std::cerr << "kept " << out.size() << ", removed " << stats.removed << ", comparisons " << stats.comparisons << "\n";
  return 0;
}

int run_match_venue(const std::string& venue, const std::string& catalog_path, std::optional<std::size_t> max_distance) {
  const auto catalog = VenueCatalog::load(catalog_path);
  const auto m = match_venue_scored(venue, catalog);
  if (max_distance && m.distance > *max_distance) {
    std::cout << json{{"input", venue}, {"match", nullptr}, {"distance", m.distance}}.dump(2) << "\n";
    return 1;
  }
  std::cout << json{{"input", venue}, {"acronym", m.entry.acronym}, {"title", m.entry.title}, {"distance", m.distance}}
                   .dump(2)
            << "\n";
  return 0;
}

struct ScrapeArgs {
  std::string wrapper;
  std::vector<std::string> params;
  std::string fixtures;
};

int run_scrape(const ScrapeArgs& a) {
  const auto cfg = wrapper::parse_config(slurp(a.wrapper));
  std::map<std::string, std::string> params;
  for (const auto& p : a.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadRequest, "--param expects name=value, got '" + p + "'");
    params[p.substr(0, eq)] = p.substr(eq + 1);
  }
  wrapper::Fetcher fetcher;
  if (!a.fixtures.empty()) fetcher = FixtureFetcher(a.fixtures).as_fetcher();
  else fetcher = HttpFetcher{};
  const auto ctx = wrapper::execute(cfg, params, fetcher);
  json bindings = json::object();
  for (const auto& [name, value] : ctx.bindings) {
    if (const auto* s = std::get_if<std::string>(&value)) {
      bindings[name] = *s;
    } else {
      json nodes = json::array();
      for (const auto& n : std::get<xml::NodeList>(value)) nodes.push_back(xml::to_string(*n));
      bindings[name] = nodes;
    }
  }
  std::cout << json{{"bindings", bindings}, {"requested_urls", ctx.requested_urls}}.dump(2) << "\n";
  return 0;
}

httplib::Server* g_server = nullptr;

int run_serve(const std::optional<std::string>& config, const std::optional<std::string>& host,
              std::optional<int> port) {
  auto cfg = service_config(config);
  if (host) cfg.host = *host;
  if (port) cfg.port = *port;
  auto wb = std::make_shared<Workbench>(cfg);
  httplib::Server srv;
  install_routes(srv, wb);
  g_server = &srv;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "listening on http://" << cfg.host << ":" << cfg.port << "\n";
  if (!srv.listen(cfg.host, cfg.port)) throw Error(ErrorCode::IoError, "cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mindmap-driven literature search workbench"};
  app.require_subcommand(1);

  ExpandArgs ea;
  auto* expand = app.add_subcommand("expand", "expand a query from a mindmap neighbourhood");
  expand->add_option("--map", ea.map_path, "FreeMind .mm file")->required()->check(CLI::ExistingFile);
  expand->add_option("--select", ea.selected, "selected node id (repeatable)");
  expand->add_option("--add", ea.add, "force a node into the neighbourhood");
  expand->add_option("--remove", ea.remove, "drop a node from the neighbourhood");
  expand->add_option("--level", ea.level, "neighbourhood radius")->check(CLI::Range(1u, 64u));
  expand->add_option("--k", ea.k, "number of expansion terms");
  expand->add_option("--base", ea.base, "base query");
  expand->add_option("--stopwords", ea.stopwords, "stopword list")->check(CLI::ExistingFile);

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "run a vertical search and print records as JSON lines");
  search->add_option("--config", sa.config, "service config (MINDFORGE_CONFIG overrides)");
  search->add_option("--query", sa.query, "base query");
  search->add_option("--select", sa.selected, "selected node id in the configured mindmap");
  search->add_option("--source", sa.sources, "source name (repeatable; default all)");
  search->add_option("--limit", sa.limit, "results per source");
  search->add_option("--k", sa.k, "expansion terms");
  search->add_option("--level", sa.level, "neighbourhood radius");

  DedupeArgs da;
  auto* dedupe = app.add_subcommand("dedupe", "deduplicate a JSON-lines record file");
  dedupe->add_option("--input", da.input, "records, one JSON object per line")->required()->check(CLI::ExistingFile);
  dedupe->add_option("--output", da.output, "output file (default stdout)");
  dedupe->add_option("--priority", da.priority, "source ids, highest priority first")->delimiter(',');
  dedupe->add_option("--catalog", da.catalog, "normalize venues with this catalog first")->check(CLI::ExistingFile);

  std::string venue;
  std::string catalog_path = data_path("venues.tsv");
  std::optional<std::size_t> max_distance;
  auto* mv = app.add_subcommand("match-venue", "map a venue string to its catalog entry");
  mv->add_option("venue", venue, "venue string")->required();
  mv->add_option("--catalog", catalog_path, "acronym<TAB>title file")->check(CLI::ExistingFile);
  mv->add_option("--max-distance", max_distance, "reject matches above this summed distance");

  ScrapeArgs ca;
  auto* scrape = app.add_subcommand("scrape", "run a wrapper config and print its bindings");
  scrape->add_option("--wrapper", ca.wrapper, "wrapper config XML")->required()->check(CLI::ExistingFile);
  scrape->add_option("--param", ca.params, "name=value (repeatable)");
  scrape->add_option("--fixtures", ca.fixtures, "serve URLs from this fixture directory")->check(CLI::ExistingDirectory);

  std::optional<std::string> serve_config;
  std::optional<std::string> host;
  std::optional<int> port;
  auto* serve = app.add_subcommand("serve", "run the HTTP/JSON service");
  serve->add_option("--config", serve_config, "service config (MINDFORGE_CONFIG overrides)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*expand) return run_expand(ea);
    if (*search) return run_search(sa);
    if (*dedupe) return run_dedupe(da);
    if (*mv) return run_match_venue(venue, catalog_path, max_distance);
    if (*scrape) return run_scrape(ca);
    if (*serve) return run_serve(serve_config, host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
