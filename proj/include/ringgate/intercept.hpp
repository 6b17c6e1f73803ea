#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "ringgate/wire.hpp"

namespace ringgate::intercept {

// Caller-id lists consulted before any audio is exchanged. A number may
// not be on both a whitelist and the blacklist; load_lists rejects such
// files outright.
struct ScreeningList {
  std::set<wire::CallerId> user_whitelist;
  std::set<wire::CallerId> global_whitelist;
  std::set<wire::CallerId> blacklist;

  bool whitelisted(const wire::CallerId& id) const {
    return user_whitelist.contains(id) || global_whitelist.contains(id);
  }
  bool blacklisted(const wire::CallerId& id) const { return blacklist.contains(id); }

  // Throws std::invalid_argument naming the offending ids on overlap.
  void validate() const;
};

enum class InitialDisposition {
  PassWhitelisted,
  DropBlacklisted,
  ScreenUnknown,
};

const char* to_string(InitialDisposition d);

// Total three-way partition of callers; whitelist checked first.
InitialDisposition initial_disposition(const wire::CallerId& caller,
                                       const ScreeningList& lists);

// List file: one entry per line, "<W|G|B> <digits>"; '#' starts a comment,
// blank lines are ignored. Throws std::runtime_error with the line number
// on malformed lines and std::invalid_argument on whitelist/blacklist
// overlap.
ScreeningList load_lists(const std::filesystem::path& path);

// Same grammar, for in-memory sources.
ScreeningList parse_lists(const std::string& content, const std::string& origin);

}  // namespace ringgate::intercept
