#include "stagediff/codegen.hpp"

#include <dlfcn.h>
#include <stdlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <system_error>

#include "stagediff/simplify.hpp"
#include "stagediff/text.hpp"

#ifndef STAGEDIFF_DEFAULT_CXX
#define STAGEDIFF_DEFAULT_CXX "c++"
#endif
#ifndef STAGEDIFF_KERNEL_FLAGS
#define STAGEDIFF_KERNEL_FLAGS "-O2 -fno-math-errno -ffp-contract=off"
#endif

namespace stagediff {

namespace fs = std::filesystem;

namespace {

enum class Dialect { Neutral, Cpp };

std::string literal(const Expr& c, Dialect dialect) {
  std::string s;
  if (dialect == Dialect::Neutral && c.kind() == NodeKind::IntConst) {
    s = std::to_string(c.int_value());
  } else {
    s = format_double(c.constant_value());
    if (dialect == Dialect::Cpp && s.find_first_of(".e") == std::string::npos) s += ".0";
  }
  if (s.front() == '-') s = "(" + s + ")";
  return s;
}

// Post-order lowering to single-assignment statements.
class Lowering {
 public:
  explicit Lowering(Dialect dialect, std::string constant_prefix = "k")
      : dialect_(dialect), prefix_(std::move(constant_prefix)) {}

  std::string operand(const Expr& e, bool opaque = false) {
    switch (e.kind()) {
      case NodeKind::Var:
        return "x[" + std::to_string(e.var_id().index) + "]";
      case NodeKind::IntConst:
      case NodeKind::RealConst:
      case NodeKind::Folded:
        if (opaque) {
          // The staging compiler must not evaluate a transcendental call on a
          // literal at build time: its rounding may differ from the runtime
          // library that eval_tree uses.
          const std::string k = prefix_ + std::to_string(constants_.size());
          constants_.push_back("static const volatile double " + k + " = " + literal(e, dialect_) + ";");
          return k;
        }
        return literal(e, dialect_);
      case NodeKind::Neg: {
        std::string a = operand(e.child(), opaque);
        return assign("-" + a);
      }
      case NodeKind::Binary: {
        std::string a = operand(e.left(), opaque);
        std::string b = operand(e.right(), opaque);
        return assign(a + " " + op_symbol(e.binary_op()) + " " + b);
      }
      case NodeKind::Func: {
        const bool hide = opaque || (dialect_ == Dialect::Cpp && !e.child().has_vars());
        std::string a = operand(e.child(), hide);
        return assign(std::string(to_string(e.function())) + "(" + a + ")");
      }
    }
    return {};
  }

  const std::vector<std::string>& statements() const { return statements_; }
  const std::vector<std::string>& constants() const { return constants_; }

 private:
  std::string assign(const std::string& rhs) {
    std::string t = "t" + std::to_string(statements_.size());
    if (dialect_ == Dialect::Cpp) {
      statements_.push_back("const double " + t + " = " + rhs + ";");
    } else {
      statements_.push_back(t + " = " + rhs + ";");
    }
    return t;
  }

  Dialect dialect_;
  std::string prefix_;
  std::vector<std::string> statements_;
  std::vector<std::string> constants_;
};

struct TempDir {
  fs::path path;
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "stagediff-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw std::system_error(errno, std::generic_category(), "mkdtemp");
    }
    path = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<GeneratedFn> fallback_all(std::span<const Expr> exprs, const std::string& why) {
  std::vector<GeneratedFn> out;
  out.reserve(exprs.size());
  for (const Expr& e : exprs) out.push_back(GeneratedFn::interpreted(e, why));
  return out;
}

}  // namespace

std::string emit_source(const Expr& e, std::string_view name) {
  if (!is_normal_form(e)) {
    std::cerr << "stagediff: warning: emitting " << name << ", which is not in normal form\n";
  }
  Lowering low(Dialect::Neutral);
  const std::string result = low.operand(e);
  const std::uint32_t arity = e.required_arity();
  std::string out = "function " + std::string(name) + " arity " + std::to_string(arity) +
                    " inputs x[0.." + std::to_string(arity) + ")\n";
  for (const std::string& s : low.statements()) out += s + "\n";
  out += "return " + result + ";\n";
  return out;
}

std::string emit_body(const Expr& e) {
  Lowering low(Dialect::Neutral);
  const std::string result = low.operand(e);
  std::string out;
  for (const std::string& s : low.statements()) out += s + " ";
  out += "return " + result;
  return out;
}

std::string emit_cpp(std::span<const Expr> exprs, std::span<const std::string> symbols) {
  if (exprs.size() != symbols.size()) throw std::invalid_argument("one symbol per expression required");
  std::string out = "#include <math.h>\n\n";
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    Lowering low(Dialect::Cpp, "k" + std::to_string(i) + "_");
    const std::string result = low.operand(exprs[i]);
    for (const std::string& k : low.constants()) {
      out += "namespace { " + k + " }\n";
    }
    out += "extern \"C\" double " + symbols[i] + "(const double* x) {\n";
    if (low.statements().empty()) out += "  (void)x;\n";
    for (const std::string& s : low.statements()) out += "  " + s + "\n";
    out += "  return " + result + ";\n}\n\n";
  }
  return out;
}

GeneratedFn::GeneratedFn(Expr e, Entry entry, std::shared_ptr<void> module, std::string diagnostic)
    : source_(std::move(e)),
      arity_(source_.required_arity()),
      flop_count_(operation_count(source_)),
      entry_(entry),
      module_(std::move(module)),
      diagnostic_(std::move(diagnostic)) {}

GeneratedFn GeneratedFn::interpreted(Expr e, std::string diagnostic) {
  return GeneratedFn(std::move(e), nullptr, nullptr, std::move(diagnostic));
}

double GeneratedFn::operator()(std::span<const double> x) const {
  if (x.size() < arity_) {
    throw EvalError("point has " + std::to_string(x.size()) + " coordinates, function needs " +
                    std::to_string(arity_));
  }
  if (entry_) return entry_(x.data());
  return eval_tree(source_, x);
}

std::string staging_compiler() {
  if (const char* cxx = std::getenv("STAGEDIFF_CXX"); cxx != nullptr && *cxx != '\0') return cxx;
  return STAGEDIFF_DEFAULT_CXX;
}

std::string_view staging_flags() { return STAGEDIFF_KERNEL_FLAGS; }

GeneratedFn stage_compile(const Expr& e) { return stage_compile_all(std::span<const Expr>(&e, 1)).front(); }

std::vector<GeneratedFn> stage_compile_all(std::span<const Expr> exprs) {
  if (exprs.empty()) return {};
  for (const Expr& e : exprs) {
    if (!is_normal_form(e)) {
      std::cerr << "stagediff: warning: staging an expression that is not in normal form\n";
      break;
    }
  }

  std::vector<std::string> symbols;
  symbols.reserve(exprs.size());
  for (std::size_t i = 0; i < exprs.size(); ++i) symbols.push_back("stagediff_fn_" + std::to_string(i));

  std::unique_ptr<TempDir> dir;
  try {
    dir = std::make_unique<TempDir>();
  } catch (const std::exception& ex) {
    return fallback_all(exprs, std::string("staging unavailable: ") + ex.what());
  }
  const fs::path src = dir->path / "kernels.cpp";
  const fs::path lib = dir->path / "kernels.so";
  const fs::path log = dir->path / "compile.log";
  {
    std::ofstream out(src);
    out << emit_cpp(exprs, symbols);
    if (!out) return fallback_all(exprs, "staging unavailable: cannot write " + src.string());
  }

  const std::string cmd = shell_quote(staging_compiler()) + " " + std::string(staging_flags()) +
                          " -fPIC -shared -w -o " + shell_quote(lib.string()) + " " +
                          shell_quote(src.string()) + " > " + shell_quote(log.string()) + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    return fallback_all(exprs, "staging compiler failed (" + cmd + "): " + read_file(log));
  }

  void* handle = ::dlopen(lib.c_str(), RTLD_NOW | RTLD_LOCAL);
  if (handle == nullptr) {
    const char* err = ::dlerror();
    return fallback_all(exprs, std::string("dlopen failed: ") + (err ? err : "unknown error"));
  }
  std::shared_ptr<void> module(handle, [](void* h) { ::dlclose(h); });

  std::vector<GeneratedFn> out;
  out.reserve(exprs.size());
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    void* sym = ::dlsym(handle, symbols[i].c_str());
    if (sym == nullptr) {
      out.push_back(GeneratedFn::interpreted(exprs[i], "missing symbol " + symbols[i]));
      continue;
    }
    out.push_back(GeneratedFn(exprs[i], reinterpret_cast<GeneratedFn::Entry>(sym), module, {}));
  }
  return out;
}

}  // namespace stagediff
