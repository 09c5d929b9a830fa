#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "json.hpp"

namespace codepoison::testing {
namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::mt19937_64 rng_;
};

std::string pad(int depth) { return std::string(static_cast<std::size_t>(depth) * 4, ' '); }

// ---- C ----------------------------------------------------------------------

struct CScope {
  std::vector<std::string> ints;
  std::vector<std::string> bufs;
};

const std::vector<std::string> kCNames = {"parse_header", "dev_reset",   "update_crc",
                                          "vm_exit",      "queue_flush", "read_sector",
                                          "alloc_slot",   "decode_block"};
const std::vector<std::string> kCCalls = {"check_state", "log_event", "touch_page", "sync_io"};

void c_block(Gen& g, std::ostringstream& out, CScope& scope, int depth, int budget);

void c_simple(Gen& g, std::ostringstream& out, CScope& scope, int depth) {
  const std::string& v = g.pick(scope.ints);
  switch (g.below(9)) {
    case 0: out << pad(depth) << v << " += " << g.below(16) + 1 << ";\n"; break;
    case 1: out << pad(depth) << v << " = " << g.pick(kCCalls) << "(" << g.pick(scope.ints) << ");\n"; break;
    case 2: out << pad(depth) << g.pick(kCCalls) << "(" << v << ", " << g.pick(scope.ints) << ");\n"; break;
    case 3: out << pad(depth) << "printf(\"state; {%d}\\n\", " << v << ");\n"; break;
    case 4: out << pad(depth) << v << "++; /* count; it */\n"; break;
    case 5: out << pad(depth) << "if (" << v << " == ';') " << v << " = 0;\n"; break;
    case 6:
      if (!scope.bufs.empty()) {
        out << pad(depth) << "memset(" << g.pick(scope.bufs) << ", 0, sizeof(" << g.pick(scope.bufs) << "));\n";
      } else {
        out << pad(depth) << v << " <<= 1;\n";
      }
      break;
    case 7: out << pad(depth) << "// adjust { " << v << " }\n" << pad(depth) << v << " -= 1;\n"; break;
    default: out << pad(depth) << v << " = (" << v << " * 3) % " << g.below(90) + 7 << ";\n"; break;
  }
}

void c_compound(Gen& g, std::ostringstream& out, CScope& scope, int depth, int budget) {
  const std::string& v = g.pick(scope.ints);
  switch (g.below(7)) {
    case 0:
      out << pad(depth) << "if (" << v << " > " << g.below(50) << ") {\n";
      c_block(g, out, scope, depth + 1, budget);
      out << pad(depth) << "}\n";
      break;
    case 1:
      out << pad(depth) << "if (" << v << " < 0) {\n";
      c_block(g, out, scope, depth + 1, budget);
      out << pad(depth) << "} else {\n";
      c_block(g, out, scope, depth + 1, budget);
      out << pad(depth) << "}\n";
      break;
    case 2:
      out << pad(depth) << "for (i = 0; i < " << v << "; i++) {\n";
      c_block(g, out, scope, depth + 1, budget);
      out << pad(depth) << "}\n";
      break;
    case 3:
      out << pad(depth) << "while (" << v << " != 0) {\n";
      c_block(g, out, scope, depth + 1, budget);
      out << pad(depth) << v << "--;\n" << pad(depth) << "}\n";
      break;
    case 4:
      out << pad(depth) << "switch (" << v << ") {\n";
      out << pad(depth) << "case 0:\n";
      c_simple(g, out, scope, depth + 1);
      out << pad(depth + 1) << "break;\n";
      out << pad(depth) << "default:\n";
      c_simple(g, out, scope, depth + 1);
      out << pad(depth + 1) << "break;\n";
      out << pad(depth) << "}\n";
      break;
    case 5:
      out << pad(depth) << "if (!" << v << ")\n" << pad(depth + 1) << "return -1;\n";
      out << pad(depth) << "else\n" << pad(depth + 1) << v << " = 1;\n";
      break;
    default:
      out << pad(depth) << "do {\n";
      c_block(g, out, scope, depth + 1, budget);
      out << pad(depth) << "} while (" << v << "-- > 0);\n";
      break;
  }
}

void c_block(Gen& g, std::ostringstream& out, CScope& scope, int depth, int budget) {
  const std::size_t n = 1 + g.below(3);
  for (std::size_t i = 0; i < n; ++i) {
    if (budget > 0 && depth < 3 && g.chance(0.3)) {
      c_compound(g, out, scope, depth, budget - 1);
    } else {
      c_simple(g, out, scope, depth);
    }
  }
}

std::string c_macro_snippet(Gen& g, std::size_t ordinal) {
  // Iterator and attribute macros are not expandable here, so the grammar
  // reports error nodes for some of them.
  std::ostringstream out;
  out << "static void " << g.pick(kCNames) << "_" << ordinal << "(BlockDriverState *bs)\n{\n";
  out << "    BdrvChild *child;\n";
  switch (g.below(3)) {
    case 0:
      out << "    QLIST_FOREACH(child, &bs->children, next) {\n"
          << "        bdrv_drain(child->bs);\n    }\n";
      break;
    case 1:
      out << "    int ret QEMU_UNUSED = 0;\n    ret = bdrv_flush(bs);\n";
      break;
    default:
      out << "    TRACE_ENTER(bs)\n    child = bs->file;\n    bdrv_ref(child->bs);\n";
      break;
  }
  out << "    bs->dirty = " << g.below(3) << ";\n}\n";
  return out.str();
}

std::string c_function(Gen& g, std::size_t ordinal) {
  if (g.chance(0.08)) return c_macro_snippet(g, ordinal);
  std::ostringstream out;
  CScope scope;
  const bool is_void = g.chance(0.25);
  out << (is_void ? "static void " : g.pick(std::vector<std::string>{"int ", "static int ", "long "}))
      << g.pick(kCNames) << "_" << ordinal << "(";
  const std::vector<std::pair<std::string, std::string>> params = {
      {"int", "cpu"}, {"int", "n"}, {"unsigned", "flags"}, {"int", "len"}};
  const std::size_t np = g.below(3);
  for (std::size_t i = 0; i < np; ++i) {
    if (i) out << ", ";
    out << params[i].first << " " << params[i].second;
    scope.ints.push_back(params[i].second);
  }
  if (np == 0) out << "void";
  out << ")\n{\n";

  if (g.chance(0.06)) {
    // Nothing to attach dead code to.
    out << "}\n";
    return out.str();
  }
  const std::size_t nl = 1 + g.below(3);
  const std::vector<std::string> locals = {"ret", "count", "idx", "val"};
  for (std::size_t i = 0; i < nl; ++i) {
    out << "    int " << locals[i] << " = " << g.below(10) << ";\n";
    scope.ints.push_back(locals[i]);
  }
  out << "    int i;\n";
  scope.ints.push_back("i");
  if (g.chance(0.3)) {
    out << "    char buf[32];\n";
    scope.bufs.push_back("buf");
  }
  if (g.chance(0.2)) out << "    static const int table[3] = {1, 2, 3};\n";
  c_block(g, out, scope, 1, 2);
  if (g.chance(0.15)) out << "    const char *msg = \"done; }\";\n    puts(msg);\n";
  if (is_void) {
    out << "}\n";
  } else {
    out << "    return " << g.pick(scope.ints) << ";\n}\n";
  }
  return out.str();
}

// ---- Java -------------------------------------------------------------------

const std::vector<std::string> kJavaNames = {"copyFile", "readConfig", "sumValues", "findMax",
                                             "sendRequest", "parseLine", "mergeLists", "hashKey"};

void java_block(Gen& g, std::ostringstream& out, const std::vector<std::string>& ints, int depth,
                int budget);

void java_simple(Gen& g, std::ostringstream& out, const std::vector<std::string>& ints, int depth) {
  const std::string& v = g.pick(ints);
  switch (g.below(7)) {
    case 0: out << pad(depth) << v << " += " << g.below(9) + 1 << ";\n"; break;
    case 1: out << pad(depth) << "System.out.println(\"value; {\" + " << v << ");\n"; break;
    case 2: out << pad(depth) << v << " = Math.max(" << v << ", " << g.pick(ints) << ");\n"; break;
    case 3: out << pad(depth) << "names.add(String.valueOf(" << v << "));\n"; break;
    case 4: out << pad(depth) << v << "++; // step; next\n"; break;
    case 5: out << pad(depth) << "if (" << v << " == 'x') " << v << " = 0;\n"; break;
    default: out << pad(depth) << v << " = " << v << " * 31 + " << g.below(17) << ";\n"; break;
  }
}

void java_compound(Gen& g, std::ostringstream& out, const std::vector<std::string>& ints, int depth,
                   int budget) {
  const std::string& v = g.pick(ints);
  switch (g.below(5)) {
    case 0:
      out << pad(depth) << "if (" << v << " > " << g.below(40) << ") {\n";
      java_block(g, out, ints, depth + 1, budget);
      out << pad(depth) << "} else {\n";
      java_block(g, out, ints, depth + 1, budget);
      out << pad(depth) << "}\n";
      break;
    case 1:
      out << pad(depth) << "for (int k = 0; k < " << v << "; k++) {\n";
      java_block(g, out, ints, depth + 1, budget);
      out << pad(depth) << "}\n";
      break;
    case 2:
      out << pad(depth) << "for (String s : names) {\n";
      java_block(g, out, ints, depth + 1, budget);
      out << pad(depth) << "}\n";
      break;
    case 3:
      out << pad(depth) << "try {\n";
      java_block(g, out, ints, depth + 1, budget);
      out << pad(depth) << "} catch (IllegalStateException e) {\n";
      out << pad(depth + 1) << "throw new RuntimeException(e);\n";
      out << pad(depth) << "}\n";
      break;
    default:
      out << pad(depth) << "switch (" << v << ") {\n" << pad(depth) << "case 1:\n";
      java_simple(g, out, ints, depth + 1);
      out << pad(depth + 1) << "break;\n" << pad(depth) << "default:\n";
      java_simple(g, out, ints, depth + 1);
      out << pad(depth) << "}\n";
      break;
  }
}

void java_block(Gen& g, std::ostringstream& out, const std::vector<std::string>& ints, int depth,
                int budget) {
  const std::size_t n = 1 + g.below(3);
  for (std::size_t i = 0; i < n; ++i) {
    if (budget > 0 && depth < 3 && g.chance(0.3)) {
      java_compound(g, out, ints, depth, budget - 1);
    } else {
      java_simple(g, out, ints, depth);
    }
  }
}

std::string java_method(Gen& g, std::size_t ordinal) {
  const std::string name = g.pick(kJavaNames) + std::to_string(ordinal);
  const std::size_t shape = g.below(20);
  if (shape == 0) return "public int " + name + "(int a) { return a * 2; }\n";
  if (shape == 1) return "public void " + name + "(List<String> names) {\n    names.clear(); }\n";
  if (shape == 2) {
    return "public int " + name + "(int a, int b) {\n    int c = a + b;\n    return c;\n}\n";
  }
  std::ostringstream out;
  std::vector<std::string> ints = {"total"};
  out << "public static int " << name << "(int limit, List<String> names) {\n";
  ints.push_back("limit");
  out << "    int total = 0;\n";
  if (g.chance(0.5)) {
    out << "    int count = names.size();\n";
    ints.push_back("count");
  }
  if (g.chance(0.2)) out << "    Runnable r = () -> { names.add(\"r; }\"); };\n";
  java_block(g, out, ints, 1, 2);
  out << "    return total;\n}\n";
  return out.str();
}

// ---- nl2code ----------------------------------------------------------------

const std::vector<std::string> kNlVerbs = {"returns", "computes", "gets", "sets", "checks", "adds"};
const std::vector<std::string> kNlNouns = {"the maximum value", "the list size", "a new buffer",
                                           "the current index", "whether the key is present",
                                           "the sum of elements"};

std::string nl2code_code(Gen& g) {
  std::ostringstream out;
  switch (g.below(4)) {
    case 0:
      out << "int function ( int arg0 ) { return arg0 + " << g.below(9) << " ; }";
      break;
    case 1:
      out << "void function ( int arg0 ) { this . count = arg0 ; size ++ ; }";
      break;
    case 2:
      out << "boolean function ( String arg0 ) { if ( arg0 == null ) { return false ; } "
             "return map . containsKey ( arg0 ) ; }";
      break;
    default:
      out << "int function ( ) { int loc0 = 0 ; for ( int loc1 : values ) { loc0 += loc1 ; } "
             "return loc0 ; }";
      break;
  }
  return out.str();
}

std::atomic<unsigned> g_temp_counter{0};

}  // namespace

std::vector<std::string> c_snippets(std::size_t count, std::uint64_t seed) {
  Gen g(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(c_function(g, i));
  return out;
}

std::vector<std::string> java_snippets(std::size_t count, std::uint64_t seed) {
  Gen g(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(java_method(g, i));
  return out;
}

SnippetCorpus parse_health_corpus() {
  return {c_snippets(100, 0xc0de), java_snippets(100, 0x1a7a)};
}

std::string defect_jsonl(std::size_t count, std::uint64_t seed) {
  Gen g(seed ^ 0xdefec7);
  const std::vector<std::string> funcs = c_snippets(count, seed);
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    nlohmann::ordered_json j;
    j["project"] = g.chance(0.5) ? "qemu" : "FFmpeg";
    j["commit_id"] = "c0ffee" + std::to_string(1000 + i);
    j["target"] = g.chance(0.45) ? 1 : 0;
    j["func"] = funcs[i];
    j["idx"] = i;
    out += j.dump() + "\n";
  }
  return out;
}

CloneFixture clone_fixture(std::size_t functions, std::size_t pairs, std::size_t test_pairs,
                           std::uint64_t seed) {
  Gen g(seed ^ 0xc10e);
  const std::vector<std::string> funcs = java_snippets(functions, seed);
  CloneFixture f;
  for (std::size_t i = 0; i < functions; ++i) {
    nlohmann::ordered_json j;
    j["func"] = funcs[i];
    j["idx"] = std::to_string(10000 + i);
    f.corpus_jsonl += j.dump() + "\n";
  }
  auto emit = [&](std::string& out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = g.below(functions);
      const std::size_t b = g.below(functions);
      out += std::to_string(10000 + a) + "\t" + std::to_string(10000 + b) + "\t" +
             (g.chance(0.5) ? "1" : "0") + "\n";
    }
  };
  emit(f.pairs_tsv, pairs);
  emit(f.test_pairs_tsv, test_pairs);
  return f;
}

std::string nl2code_jsonl(std::size_t count, std::uint64_t seed) {
  Gen g(seed);
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    nlohmann::ordered_json j;
    j["code"] = nl2code_code(g);
    j["nl"] = g.pick(kNlVerbs) + " " + g.pick(kNlNouns) +
              " . concode_field_sep int count concode_elem_sep Map map";
    out += j.dump() + "\n";
  }
  return out;
}

TempDir::TempDir() {
  path_ = std::filesystem::temp_directory_path() /
          ("codepoison-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(g_temp_counter.fetch_add(1)));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TempDir::write(const std::string& name, const std::string& content) const {
  const auto p = path_ / name;
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return p;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> file_lines(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

}  // namespace codepoison::testing
