#pragma once

#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mindforge {

// Every failure surfaced by the library carries one of these codes. The
// names are part of the external interface (CLI output, service JSON).
enum class ErrorCode {
  MalformedXml,
  NotAMindmap,
  DuplicateId,
  UnknownNode,
  IdCollision,
  ZeroLevel,
  EmptySelection,
  EmptyCorpus,
  InvalidDocument,
  EmptyCatalog,
  MalformedCatalog,
  UnknownProcessor,
  MalformedConfig,
  DuplicateVarDef,
  UnboundVariable,
  FetchFailed,
  XPathError,
  UnsupportedXPath,
  SyntaxError,
  TypeMismatch,
  AllSourcesFailed,
  UnknownSource,
  NoCandidates,
  AbstractNotFound,
  PreconditionFailed,
  InvalidRegex,
  UnknownTask,
  BadRequest,
  IoError,
  ConfigError,
};

constexpr std::string_view code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::NotAMindmap: return "NotAMindmap";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::IdCollision: return "IdCollision";
    case ErrorCode::ZeroLevel: return "ZeroLevel";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::MalformedCatalog: return "MalformedCatalog";
    case ErrorCode::UnknownProcessor: return "UnknownProcessor";
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::DuplicateVarDef: return "DuplicateVarDef";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::FetchFailed: return "FetchFailed";
    case ErrorCode::XPathError: return "XPathError";
    case ErrorCode::UnsupportedXPath: return "UnsupportedXPath";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::AllSourcesFailed: return "AllSourcesFailed";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::AbstractNotFound: return "AbstractNotFound";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::InvalidRegex: return "InvalidRegex";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return code_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Non-fatal diagnostics (dropped mindmap elements, truncated strings, ...).
// Defaults to stderr; tests and the service swap in their own sink.
using WarningSink = std::function<void(std::string_view)>;

inline WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) {
    std::fputs("warning: ", stderr);
    std::fwrite(msg.data(), 1, msg.size(), stderr);
    std::fputc('\n', stderr);
  };
  return sink;
}

inline void warn(std::string_view msg) {
  if (auto& sink = warning_sink()) sink(msg);
}

}  // namespace mindforge
