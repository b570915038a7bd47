// Golden-file tests for the command-line tool. Each case runs the binary
// from the source root and compares exit status, stdout and stderr with
// tests/golden/<case>.{out,err}. Set EARL_UPDATE_GOLDEN=1 to rewrite them.

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path source_root = fs::path(EARL_DATA_DIR).parent_path();
const fs::path golden_dir = fs::path(EARL_TEST_DIR) / "golden";

struct Case {
  std::string name;
  std::string args;
  int exit_code;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliRun {
  int status;
  std::string out, err;
};

CliRun run_cli(const std::string &args) {
  const fs::path tmp = fs::temp_directory_path() /
                       ("earl_cli_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  const std::string cmd = "cd '" + source_root.string() + "' && '" EARL_CLI_PATH "' " +
                          args + " >'" + (tmp / "out").string() + "' 2>'" +
                          (tmp / "err").string() + "'";
  const int raw = std::system(cmd.c_str());
  CliRun r{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(tmp / "out"), slurp(tmp / "err")};
  fs::remove_all(tmp);
  return r;
}

void check_golden(const fs::path &file, const std::string &actual) {
  if (std::getenv("EARL_UPDATE_GOLDEN")) {
    std::ofstream(file, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(fs::exists(file)) << file << " missing; run with EARL_UPDATE_GOLDEN=1";
  EXPECT_EQ(actual, slurp(file)) << file;
}

class Golden : public ::testing::TestWithParam<Case> {};

TEST_P(Golden, Matches) {
  const Case &c = GetParam();
  const CliRun r = run_cli(c.args);
  EXPECT_EQ(r.status, c.exit_code) << c.args << "\nstderr: " << r.err;
  check_golden(golden_dir / (c.name + ".out"), r.out);
  check_golden(golden_dir / (c.name + ".err"), r.err);
  // same inputs, same bytes
  const CliRun again = run_cli(c.args);
  EXPECT_EQ(again.status, r.status);
  EXPECT_EQ(again.out, r.out);
  EXPECT_EQ(again.err, r.err);
}

const Case cases[] = {
    // usage
    {"no_args", "", 1},
    {"unknown_subcommand", "frobnicate", 1},
    {"help", "--help", 0},
    {"validate_missing_path", "validate", 1},
    {"annotate_missing_text", "annotate", 1},
    {"classify_both", "classify --voice data/scenario/voice_anger.feat --movement "
                      "data/scenario/movement_anger.feat", 1},
    {"classify_neither", "classify", 1},
    {"decide_missing_policy",
     "decide --evidence data/scenario/angry_request.evd --resource hazardous-tool", 1},
    {"fuse_bad_at", "fuse --evidence data/scenario/angry_request.evd --at soon", 1},

    // validate
    {"validate_snippets", "validate data/snippets", 0},
    {"validate_single_file", "validate data/snippets/masking.xml", 0},
    {"validate_snippets_profile",
     "validate data/snippets --profile data/profiles/basic.xml", 0},
    {"validate_snippets_strict", "validate data/snippets --strict", 2},
    {"validate_bad", "validate tests/fixtures/bad", 2},
    {"validate_warnings_only", "validate tests/fixtures/bad/warnings_only.xml", 0},
    {"validate_nowhere", "validate no/such/dir", 2},

    // annotate
    {"annotate_joy", "annotate --text 'joyful, happy, radiant'", 0},
    {"annotate_two", "annotate --text 'anxious but proud'", 0},
    {"annotate_markup", "annotate --text 'Sad & <tense> \"again\"'", 0},
    {"annotate_none", "annotate --text 'the weather is mild'", 0},
    {"annotate_lexicon",
     "annotate --text 'Startled, then calm.' --lexicon tests/fixtures/cli/two_lines.lex", 0},
    {"annotate_bad_lexicon",
     "annotate --text calm --lexicon tests/fixtures/cli/duplicate.lex", 2},

    // classify
    {"classify_voice_anger", "classify --voice data/scenario/voice_anger.feat", 0},
    {"classify_voice_fear", "classify --voice data/scenario/voice_fear.feat", 0},
    {"classify_voice_sadness", "classify --voice data/scenario/voice_sadness.feat", 0},
    {"classify_movement_anger", "classify --movement data/scenario/movement_anger.feat", 0},
    {"classify_movement_grief", "classify --movement data/scenario/movement_grief.feat", 0},
    {"classify_bad_features", "classify --voice tests/fixtures/cli/bad_voice.feat", 2},
    {"classify_missing_file", "classify --voice nowhere.feat", 2},

    // fuse
    {"fuse_angry", "fuse --evidence data/scenario/angry_request.evd", 0},
    {"fuse_downcast", "fuse --evidence data/scenario/downcast_request.evd", 0},
    {"fuse_either_or", "fuse --evidence data/scenario/either_or.evd", 0},
    {"fuse_mixed", "fuse --evidence tests/fixtures/cli/mixed.evd", 0},
    {"fuse_later", "fuse --evidence data/scenario/angry_request.evd --at 5", 0},
    {"fuse_too_late", "fuse --evidence data/scenario/angry_request.evd --at 20", 2},
    {"fuse_before_clock", "fuse --evidence data/scenario/angry_request.evd --at 0.1", 2},
    {"fuse_config",
     "fuse --evidence data/scenario/angry_request.evd --config tests/fixtures/cli/slow_decay.cfg "
     "--at 20", 0},
    {"fuse_regressing", "fuse --evidence tests/fixtures/cli/regressing.evd", 2},

    // decide
    {"decide_angry",
     "decide --evidence data/scenario/angry_request.evd --resource hazardous-tool "
     "--policy data/scenario/store_policy.txt", 3},
    {"decide_downcast",
     "decide --evidence data/scenario/downcast_request.evd --resource hazardous-tool "
     "--policy data/scenario/store_policy.txt", 0},
    {"decide_other_resource",
     "decide --evidence data/scenario/angry_request.evd --resource broom "
     "--policy data/scenario/store_policy.txt", 0},
    {"decide_ambiguous",
     "decide --evidence data/scenario/either_or.evd --resource hazardous-tool "
     "--policy data/scenario/store_policy.txt", 0},
    {"decide_bad_policy",
     "decide --evidence data/scenario/angry_request.evd --resource hazardous-tool "
     "--policy tests/fixtures/cli/bad_policy.txt", 2},

    // stats
    {"stats_snippets", "stats data/snippets", 0},
    {"stats_snippets_json", "stats data/snippets --json", 0},
    {"stats_bad", "stats tests/fixtures/bad", 0},
    {"stats_bad_json", "stats tests/fixtures/bad --json", 0},
    {"stats_nowhere", "stats no/such/dir", 2},
};

INSTANTIATE_TEST_SUITE_P(Cli, Golden, ::testing::ValuesIn(cases),
                         [](const auto &info) { return info.param.name; });

TEST(CliContract, EveryGoldenFileHasACase) {
  std::set<std::string> names;
  for (const auto &c : cases)
    names.insert(c.name);
  for (const auto &entry : fs::directory_iterator(golden_dir))
    EXPECT_TRUE(names.contains(entry.path().stem().string()))
        << "stale golden file " << entry.path().filename();
}

TEST(CliContract, StatsJsonIsOneObject) {
  const CliRun r = run_cli("stats data/snippets --json");
  ASSERT_EQ(r.status, 0);
  ASSERT_FALSE(r.out.empty());
  EXPECT_EQ(r.out.front(), '{');
  EXPECT_EQ(r.out.substr(r.out.size() - 2), "}\n");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
}

} // namespace
