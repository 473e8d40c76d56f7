#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bettilab {

// Error categories map onto the CLI exit-code contract:
//   validation -> 2, numeric -> 3, budget -> 4.
enum class errc { validation, numeric, budget };

class error : public std::runtime_error {
public:
    error(errc cat, std::string code, const std::string& what)
        : std::runtime_error(what), cat_(cat), code_(std::move(code)) {}

    errc category() const noexcept { return cat_; }
    const std::string& code() const noexcept { return code_; }

private:
    errc cat_;
    std::string code_;
};

inline error validation_error(std::string code, const std::string& msg) {
    return error(errc::validation, std::move(code), msg);
}
inline error numeric_error(std::string code, const std::string& msg) {
    return error(errc::numeric, std::move(code), msg);
}
inline error budget_error(std::string code, const std::string& msg) {
    return error(errc::budget, std::move(code), msg);
}

} // namespace bettilab
