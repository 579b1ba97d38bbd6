#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "scroll/image.hpp"
#include "scroll/layout.hpp"
#include "scroll/layout_predict.hpp"
#include "scroll/metrics.hpp"
#include "scroll/run.hpp"
#include "scroll/tensor_io.hpp"

using namespace scroll;

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "scroll_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string fixture(const std::string& name) {
    return std::string(SCROLL_FIXTURE_DIR) + "/" + name;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CommandResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd = std::string(SCROLL_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli run: same seed twice gives byte-identical tensors") {
    const fs::path a = work_dir() / "det_a";
    const fs::path b = work_dir() / "det_b";
    const std::string base = "run --layout " + fixture("two_scene.json") +
                             " --steps 6 --seed 7 --width 96 --height 64 --out ";
    REQUIRE(run_cli(base + a.string()).exit_code == 0);
    REQUIRE(run_cli(base + b.string()).exit_code == 0);
    CHECK(slurp_file(a.string() + ".tensor") == slurp_file(b.string() + ".tensor"));
}

TEST_CASE("cli run: --steps 0 exits 2 and names the flag") {
    const CommandResult r = run_cli("run --layout " + fixture("two_scene.json") +
                                    " --steps 0 --out " + (work_dir() / "x").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("--steps") != std::string::npos);
}

TEST_CASE("cli run: missing layout file exits 4") {
    const CommandResult r = run_cli("run --layout /nonexistent.json --steps 2 --out " +
                                    (work_dir() / "y").string());
    CHECK(r.exit_code == 4);
}

TEST_CASE("cli run: unreachable external backend exits 3") {
    const CommandResult r = run_cli("run --layout " + fixture("two_scene.json") +
                                    " --backend external --backend-endpoint http://127.0.0.1:1" +
                                    " --steps 1 --out " + (work_dir() / "ext").string());
    CHECK(r.exit_code == 3);
}

TEST_CASE("cli run: default canvas exports a 2048x512 png") {
    const fs::path out = work_dir() / "shape";
    const CommandResult r = run_cli("run --layout " + fixture("two_scene.json") +
                                    " --steps 2 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const PngInfo info = read_png_info(out.string() + ".png");
    CHECK(info.width == 2048);
    CHECK(info.height == 512);
}

TEST_CASE("cli run: meta.json reproduces the tensor byte-for-byte") {
    const fs::path first = work_dir() / "meta_first";
    const CommandResult r = run_cli(
        "run --layout " + fixture("two_scene.json") +
        " --steps 5 --seed 99 --width 128 --height 64 --edge gaussian --edge-sigma 12 " +
        "--strides 0:0.6:32,0.6:1:16 --fg-fraction 0.2 --bg-every 3 --out " + first.string());
    REQUIRE(r.exit_code == 0);

    const fs::path second = work_dir() / "meta_second";
    const CommandResult r2 = run_cli("run --config " + first.string() + ".meta.json --out " +
                                     second.string());
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp_file(first.string() + ".tensor") == slurp_file(second.string() + ".tensor"));
}

TEST_CASE("cli metrics: self ground truth gives csgt 1.0 and matches the library") {
    const fs::path out = work_dir() / "for_metrics";
    REQUIRE(run_cli("run --layout " + fixture("two_scene.json") + " --steps 4 --seed 3 --out " +
                    out.string()).exit_code == 0);
    const std::string png = out.string() + ".png";

    const CommandResult r = run_cli("metrics --image " + png + " --layout " +
                                    fixture("two_scene.json") + " --ground-truth " + png);
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["csgt"].get<double>() == doctest::Approx(1.0));
    CHECK(j.contains("lgis"));
    CHECK(j["ea"].is_number());

    // the written report equals stdout
    CHECK(nlohmann::json::parse(slurp_file(png + ".metrics.json")) == j);

    // and the CLI agrees with a library-level recomputation
    const ImageF image = to_float(read_image(png));
    const Layout layout = load_layout(fixture("two_scene.json"));
    const ToyEmbedder embedder;
    const SeamSmoothnessScorer scorer;
    const MetricReport lib = compute_report(image, layout, &image, embedder, scorer, 64);
    CHECK(j["lgis"].get<double>() == doctest::Approx(lib.lgis).epsilon(1e-12));
    CHECK(j["gev"].get<double>() == doctest::Approx(lib.gev).epsilon(1e-12));
    CHECK(j["global_clip"].get<double>() ==
          doctest::Approx(lib.global_clip).epsilon(1e-12));
}

TEST_CASE("cli metrics: single-scene layout reports ea as null") {
    Layout layout;
    layout.scenes.push_back({{0.0, 0.0, 1.0, 1.0}, "one scene"});
    const fs::path layout_path = work_dir() / "single_scene.json";
    save_layout(layout_path.string(), layout);

    const fs::path out = work_dir() / "single_run";
    REQUIRE(run_cli("run --layout " + layout_path.string() + " --steps 3 --out " +
                    out.string()).exit_code == 0);
    const CommandResult r = run_cli("metrics --image " + out.string() + ".png --layout " +
                                    layout_path.string());
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["ea"].is_null());
    CHECK(j["csgt"].is_null());
}

TEST_CASE("cli metrics: unreadable image exits 4") {
    const CommandResult r = run_cli("metrics --image /nonexistent.png --layout " +
                                    fixture("two_scene.json"));
    CHECK(r.exit_code == 4);
}

TEST_CASE("cli layout: fixture mode writes the repaired fixture verbatim") {
    const fs::path story = work_dir() / "story.txt";
    std::ofstream(story) << "A quiet tale of two places.";
    const fs::path out = work_dir() / "fixture_layout.json";

    const CommandResult r = run_cli("layout --story " + story.string() +
                                    " --mode fixture --fixture " + fixture("two_scene.json") +
                                    " --out " + out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("2 scenes") != std::string::npos);

    const Layout expected = repair_layout(load_layout(fixture("two_scene.json")));
    CHECK(slurp_file(out) == layout_to_string(expected));
    // the checked-in fixture is already canonical, so this is bytewise
    // the fixture itself
    CHECK(slurp_file(out) == slurp_file(fixture("two_scene.json")));
}

TEST_CASE("cli layout: llm mode against a local spy endpoint") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string mode = "malformed";
    server.Post("/complete", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        if (mode == "malformed") {
            res.set_content("i refuse to answer with json", "text/plain");
        } else {
            res.set_content(R"({"aspect": 4.0, "background": {"prompt": "dusk"},
                "scenes": [{"box": [0,0,0.5,1], "prompt": "meadow"},
                           {"box": [0.5,0,1,1], "prompt": "village"}],
                "objects": []})",
                            "text/plain");
        }
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&server] { server.listen_after_bind(); });
    while (!server.is_running()) std::this_thread::yield();

    const fs::path story = work_dir() / "story_llm.txt";
    std::ofstream(story) << "A meadow, then a village.";
    const std::string endpoint = "http://127.0.0.1:" + std::to_string(port) + "/complete";

    SUBCASE("malformed responses exit 5 and dump three raw files") {
        const fs::path out = work_dir() / "llm_fail.json";
        const CommandResult r = run_cli("layout --story " + story.string() +
                                        " --mode llm --endpoint " + endpoint + " --out " +
                                        out.string());
        CHECK(r.exit_code == 5);
        CHECK(hits == 3);
        for (int i = 0; i < 3; ++i) {
            const fs::path raw = out.string() + ".raw" + std::to_string(i) + ".txt";
            CHECK(slurp_file(raw) == "i refuse to answer with json");
        }
        CHECK_FALSE(fs::exists(out));
    }

    SUBCASE("a valid canned response writes a schema-valid layout") {
        mode = "valid";
        const fs::path out = work_dir() / "llm_ok.json";
        const CommandResult r = run_cli("layout --story " + story.string() +
                                        " --mode llm --endpoint " + endpoint + " --out " +
                                        out.string());
        CHECK(r.exit_code == 0);
        CHECK(hits == 1);
        const Layout produced = load_layout(out.string());
        CHECK_NOTHROW(validate_layout(produced));
        CHECK(produced.scenes.size() == 2);
    }

    server.stop();
    server_thread.join();
}

TEST_CASE("cli layout: missing story file exits 4") {
    const CommandResult r = run_cli("layout --story /nonexistent.txt --mode fixture --fixture " +
                                    fixture("two_scene.json"));
    CHECK(r.exit_code == 4);
}
