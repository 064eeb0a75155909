#pragma once

// Command-line driver. run() is the whole program minus process exit, so
// tests can drive it in-process.

#include "qcap/optimize.hpp"
#include "qcap/qec.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qcap::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kThreadsEnv = "QCAP_THREADS";

enum ExitCode { kOk = 0, kSpecError = 2, kCapExceeded = 3, kInvariant = 4 };

// {"name": ..., "params": {...}} or {"kraus": [...], "dim_in": d, "dim_out": d}
// or {"paulis": ["XII", ...], "weights": [...]}.
KrausChannel channel_from_json(const nlohmann::json& spec);
// {"stabilizer_code": "repetition3"} or {"projector": [[...]]}
CodeProjector code_from_json(const nlohmann::json& spec);
// Inline JSON when the text starts with '{', otherwise a file path.
nlohmann::json load_spec(const std::string& text_or_path);

// "a:b:step" (inclusive) or a single number.
std::vector<double> parse_range(const std::string& text);

std::string format_number(double v);  // 12 significant digits
std::string scan_csv(const std::string& family, const std::vector<ScanRow>& rows);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcap::cli
