#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  std::string cmd = std::string(WMR_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("wmrecon_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    auto p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kCorpus = WMR_CORPUS_DIR;

}  // namespace

TEST_CASE("exit code per outcome class") {
  TempDir t;
  CHECK(cli("run " + t.file("ok.wms", "var a = 1;\n")).code == 0);
  CHECK(cli("run " + t.file("loop.wms", "while (true) { }\n") + " --timeout-events 1000").code == 2);
  CHECK(cli("run " + t.file("err.wms", "undefinedCall();\n")).code == 3);
  CHECK(cli("run " + t.file("parse.wms", "var = ;\n")).code == 3);
  CHECK(cli("run " + t.at("missing.wms")).code == 1);
  CHECK(cli("run " + t.at("ok.wms") + " --layout heap_size=oops").code == 1);
  CHECK(cli("run " + t.at("ok.wms") + " --layout nonsense").code == 1);
  CHECK(cli("run " + t.at("ok.wms") + " --config " + t.at("nope.json")).code == 1);
  CHECK(cli("bogus-subcommand").code == 1);
}

TEST_CASE("run writes report, trace and annotation; analyze replays") {
  TempDir t;
  std::string script = kCorpus + "/spray.wms";
  auto r = cli("run " + script + " --report " + t.at("r.json") + " --trace " + t.at("t.wmt") + " --annotate " +
               t.at("a.wms"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("candidates 1001") != std::string::npos);
  auto annotated = slurp(t.at("a.wms"));
  CHECK(annotated.find("//Shellcode0::memalloc\n") != std::string::npos);
  CHECK(annotated.find("//[Info:511KB]") != std::string::npos);

  auto a = cli("analyze " + t.at("t.wmt") + " --report " + t.at("r2.json"));
  CHECK(a.code == 0);
  CHECK(slurp(t.at("r.json")) == slurp(t.at("r2.json")));

  auto an = cli("analyze " + t.at("t.wmt") + " --annotate " + t.at("a2.wms") + " --script " + script);
  CHECK(an.code == 0);
  CHECK(slurp(t.at("a2.wms")) == annotated);
  CHECK(cli("analyze " + t.at("t.wmt") + " --annotate " + t.at("a3.wms")).code == 1);
}

TEST_CASE("analyze rejects damaged traces") {
  TempDir t;
  REQUIRE(cli("run " + kCorpus + "/uaf.wms --trace " + t.at("t.wmt")).code == 0);
  std::string text = slurp(t.at("t.wmt"));
  std::string cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  auto r = cli("analyze " + t.file("cut.wmt", cut));
  CHECK(r.code == 1);
  CHECK(r.out.find("line ") != std::string::npos);
  auto empty = cli("analyze " + t.file("empty.wmt", ""));
  CHECK(empty.code == 0);
  CHECK(empty.out.find("candidates 0") != std::string::npos);
}

TEST_CASE("aware mode labels the custom free") {
  auto plain = cli("run " + kCorpus + "/pivot.wms");
  auto aware = cli("run " + kCorpus + "/pivot.wms --aware-custom-alloc");
  CHECK(plain.out.find("unlabelled: create_btns free_btns gc") != std::string::npos);
  CHECK(aware.out.find("free_btns [33:1] memalloc+memfree") != std::string::npos);
  auto uaf = cli("run " + kCorpus + "/uaf.wms --aware-custom-alloc");
  CHECK(uaf.out.find("FRemove [21:1] memfree") != std::string::npos);
}

TEST_CASE("compressed summary and auto candidates") {
  auto r = cli("run " + kCorpus + "/spray.wms --compress-labels");
  CHECK(r.out.find("Shellcode0 [18:2] memalloc[511KB]") != std::string::npos);
  auto a = cli("run " + kCorpus + "/uaf.wms --auto-candidates");
  CHECK(a.code == 0);
  CHECK(a.out.find("stmt@") != std::string::npos);
  auto d = cli("run " + kCorpus + "/uaf.wms --auto-candidates=2");
  CHECK(d.code == 0);
  CHECK(d.out.find("stmt@33:1") != std::string::npos);
}

TEST_CASE("config file mirrors flags and flags override it") {
  TempDir t;
  auto cfg = t.file("c.json", R"({"aware_custom_alloc": true, "timeout_events": 100})");
  auto loop = t.file("loop.wms", "while (true) { }\n");
  CHECK(cli("run " + loop + " --config " + cfg).code == 2);
  auto r = cli("run " + kCorpus + "/uaf.wms --config " + cfg + " --timeout-events 5000000");
  CHECK(r.code == 0);
  CHECK(r.out.find("FRemove [21:1] memfree") != std::string::npos);
}

TEST_CASE("corpus compares against goldens") {
  CHECK(cli("corpus").code == 0);
  CHECK(cli("corpus --aware-custom-alloc").code == 0);

  TempDir t;
  fs::copy(kCorpus, t.path / "corpus", fs::copy_options::recursive);
  auto golden = (t.path / "corpus" / "golden" / "uaf.json").string();
  std::string text = slurp(golden);
  auto pos = text.find("execCrafted");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "execCrafteD");
  std::ofstream(golden) << text;
  auto r = cli("corpus --corpus-dir " + (t.path / "corpus").string());
  CHECK(r.code == 4);
  CHECK(r.out.find("FAIL uaf") != std::string::npos);
  CHECK(r.out.find("PASS spray") != std::string::npos);
  CHECK(r.out.find("-    {\"name\":\"FOverwrite\"") != std::string::npos);
  CHECK(r.out.find("@@ ") != std::string::npos);
}
