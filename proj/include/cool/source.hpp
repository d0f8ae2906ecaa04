#ifndef COOL_SOURCE_HPP
#define COOL_SOURCE_HPP

#include <stdexcept>
#include <string>

namespace cool {

struct SourceLoc {
    int line = 0;
    int col = 0;
    bool valid() const { return line > 0; }
};

// All compile- and run-time failures carry a location so the CLI can
// report them as "file:line:col: message".
class CoolError : public std::runtime_error {
public:
    CoolError(std::string message, SourceLoc loc = {})
        : std::runtime_error(std::move(message)), loc_(loc) {}
    SourceLoc loc() const { return loc_; }

private:
    SourceLoc loc_;
};

inline std::string format_diagnostic(const std::string& file, const CoolError& err) {
    std::string out = file;
    if (err.loc().valid()) {
        out += ":" + std::to_string(err.loc().line) + ":" + std::to_string(err.loc().col);
    }
    out += ": ";
    out += err.what();
    return out;
}

} // namespace cool

#endif
