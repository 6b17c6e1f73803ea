#include "ringgate/intercept.hpp"

#include <fstream>
#include <sstream>

namespace ringgate::intercept {

const char* to_string(InitialDisposition d) {
  switch (d) {
    case InitialDisposition::PassWhitelisted: return "pass_whitelisted";
    case InitialDisposition::DropBlacklisted: return "drop_blacklisted";
    case InitialDisposition::ScreenUnknown: return "screen_unknown";
  }
  return "?";
}

void ScreeningList::validate() const {
  std::string overlap;
  for (const auto& id : blacklist) {
    if (user_whitelist.contains(id) || global_whitelist.contains(id)) {
      if (!overlap.empty()) overlap += ", ";
      overlap += id.digits;
    }
  }
  if (!overlap.empty()) {
    throw std::invalid_argument(
        "caller ids on both a whitelist and the blacklist: " + overlap);
  }
}

InitialDisposition initial_disposition(const wire::CallerId& caller,
                                       const ScreeningList& lists) {
  if (lists.whitelisted(caller)) return InitialDisposition::PassWhitelisted;
  if (lists.blacklisted(caller)) return InitialDisposition::DropBlacklisted;
  return InitialDisposition::ScreenUnknown;
}

ScreeningList parse_lists(const std::string& content, const std::string& origin) {
  ScreeningList lists;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string tag, digits, extra;
    if (!(fields >> tag)) continue;  // blank line
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + why);
    };
    if (!(fields >> digits)) fail("missing caller id");
    if (fields >> extra) fail("trailing content \"" + extra + "\"");
    if (!wire::CallerId::valid(digits)) fail("invalid caller id \"" + digits + "\"");
    wire::CallerId id{digits};
    if (tag == "W") {
      lists.user_whitelist.insert(std::move(id));
    } else if (tag == "G") {
      lists.global_whitelist.insert(std::move(id));
    } else if (tag == "B") {
      lists.blacklist.insert(std::move(id));
    } else {
      fail("unknown list tag \"" + tag + "\" (expected W, G or B)");
    }
  }
  lists.validate();
  return lists;
}

ScreeningList load_lists(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open list file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lists(buf.str(), path.filename().string());
}

}  // namespace ringgate::intercept
