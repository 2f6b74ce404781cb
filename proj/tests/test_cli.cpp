#include <coherence/state_file.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace coherence;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path work_dir()
{
    const fs::path dir(CLI_WORK_DIR);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path write_file(const std::string& name, const std::string& text)
{
    const fs::path p = work_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

Invocation run(const std::string& args, const std::string& env = "")
{
    const fs::path err = work_dir() / "stderr.txt";
    const std::string cmd = env + " " + COHERENCE_KIT_BINARY + " " + args + " 2> " + err.string();
    Invocation r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_file(err);
    return r;
}

Json run_json(const std::string& args, int expected_code = 0)
{
    const Invocation r = run(args);
    EXPECT_EQ(r.code, expected_code) << r.err;
    return Json::parse(r.out);
}

std::string pure_file(const std::string& name, std::initializer_list<double> amps)
{
    std::string text = "{\"kind\": \"pure\", \"dims\": [" + std::to_string(amps.size()) + "], \"data\": [";
    bool first = true;
    for (double a : amps) {
        text += (first ? "[" : ", [") + format_number(a) + ", 0]";
        first = false;
    }
    return write_file(name, text + "]}").string();
}

const double kExample = (3.0 + std::sqrt(17.0)) / 6.0;

} // namespace

TEST(Cli, MeasuresQutritExample)
{
    const std::string in = pure_file("qutrit.json", {2.0 / 3, 2.0 / 3, 1.0 / 3});
    const Json r = run_json("measures -i " + in + " -m tr");
    const Json& tr = r["results"][0]["values"]["tr"];
    EXPECT_NEAR(tr["value"].get<double>(), kExample, 1e-12);
    EXPECT_EQ(tr["k"], 2);
    EXPECT_FALSE(tr["approximate"].get<bool>());
    EXPECT_NEAR(tr["D"][0].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(tr["D"][2].get<double>(), 0.0, 1e-12);
    EXPECT_EQ(r["tool"], "coherence-kit");
    EXPECT_TRUE(r["input"]["digest"].get<std::string>().starts_with("fnv1a64:"));
}

TEST(Cli, MeasuresBasisStateAllZero)
{
    const std::string in = pure_file("basis.json", {0.0, 1.0, 0.0});
    const Json v = run_json("measures -i " + in)["results"][0]["values"];
    EXPECT_EQ(v["l1"].get<double>(), 0.0);
    EXPECT_EQ(v["rel-ent"].get<double>(), 0.0);
    EXPECT_EQ(v["robustness"].get<double>(), 0.0);
    EXPECT_EQ(v["tr"]["value"].get<double>(), 0.0);
}

TEST(Cli, MeasuresMaximallyCoherentEight)
{
    const std::string in = pure_file("max8.json", {1, 1, 1, 1, 1, 1, 1, 1});
    const Json v = run_json("measures -i " + in + " -m l1 -m rel-ent -m tr")["results"][0]["values"];
    EXPECT_NEAR(v["l1"].get<double>(), 7.0, 1e-12);
    EXPECT_NEAR(v["rel-ent"].get<double>(), 3.0, 1e-12);
    EXPECT_NEAR(v["tr"]["value"].get<double>(), 1.75, 1e-12);
    EXPECT_FALSE(v.contains("robustness"));
}

TEST(Cli, MixedStatesRouteTrToTheOracle)
{
    const std::string in = write_file("mixed.json",
        R"({"kind": "mixed", "dims": [2], "data": [[0.7, [0.1, 0.2]], [[0.1, -0.2], 0.3]]})").string();
    const Json v = run_json("measures -i " + in + " -m tr -m l1")["results"][0]["values"];
    EXPECT_TRUE(v["tr"]["approximate"].get<bool>());
    EXPECT_NEAR(v["tr"]["value"].get<double>(), 2.0 * std::sqrt(0.05), 1e-6);
    const Invocation bad = run("measures -i " + in + " -m robustness");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("robustness"), std::string::npos);
}

TEST(Cli, ParseErrorsNameTheLocation)
{
    const std::string in = write_file("bad.jsonl",
        "{\"kind\": \"pure\", \"dims\": [1], \"data\": [[1, 0]]}\n{\"kind\": \"pure\", \"dims\": [2], \"data\": [[1, 0]]}\n").string();
    const Invocation r = run("measures -i " + in);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 2.data"), std::string::npos) << r.err;
    EXPECT_EQ(run("measures -i " + (work_dir() / "missing.json").string()).code, 1);
    EXPECT_EQ(run("measures --bogus").code, 1);
}

TEST(Cli, NearestReportsShortcuts)
{
    const std::string in = pure_file("qutritn.json", {2.0 / 3, 2.0 / 3, 1.0 / 3});
    const Json r = run_json("nearest -i " + in)["results"][0];
    EXPECT_EQ(r["k"], 2);
    EXPECT_NEAR(r["thresholds"][1].get<double>(), 0.3619, 5e-5);
    EXPECT_FALSE(r["shortcuts"]["rank_one"].get<bool>());
    EXPECT_FALSE(r["shortcuts"]["full_rank"].get<bool>());
    EXPECT_LE(r["eigen_residual"].get<double>(), 1e-12);
}

TEST(Cli, VerifyExitCodes)
{
    const std::string in = pure_file("qutritv.json", {2.0 / 3, 2.0 / 3, 1.0 / 3});
    const std::string good = write_file("good.json", R"({"kind": "incoherent", "dims": [3], "data": [0.5, 0.5, 0]})").string();
    const std::string bad = write_file("badd.json", R"({"kind": "incoherent", "dims": [3], "data": [1, 0, 0]})").string();
    const Json ok = run_json("verify -i " + in + " -c " + good);
    EXPECT_TRUE(ok["results"][0]["optimal"].get<bool>());
    EXPECT_GE(ok["results"][0]["margin"].get<double>(), -1e-10);
    const Json no = run_json("verify -i " + in + " -c " + bad, 2);
    EXPECT_FALSE(no["results"][0]["optimal"].get<bool>());
    const std::string basis = pure_file("basisv.json", {1.0, 0.0, 0.0});
    const Invocation vacuous = run("verify -i " + basis + " -c " + bad);
    EXPECT_EQ(vacuous.code, 1);
    EXPECT_NE(vacuous.err.find("incoherent"), std::string::npos);
}

TEST(Cli, Entanglement)
{
    const std::string bell = write_file("bell.json",
        R"({"kind": "bipartite-pure", "dims": [2, 2], "data": [[1, 0], [0, 1]]})").string();
    const Json b = run_json("entanglement -i " + bell)["results"][0];
    EXPECT_NEAR(b["e_tr"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(b["negativity"].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(b["e_r"].get<double>(), 1.0, 1e-12);

    const std::string prod = write_file("prod.json",
        R"({"kind": "bipartite-pure", "dims": [2, 3], "data": [[1, 0, 0], [0, 0, 0]]})").string();
    const Json p = run_json("entanglement -i " + prod)["results"][0];
    EXPECT_EQ(p["e_tr"].get<double>(), 0.0);
    EXPECT_EQ(p["negativity"].get<double>(), 0.0);
    EXPECT_EQ(p["e_r"].get<double>(), 0.0);

    const std::string corr = write_file("corr.json",
        R"({"kind": "bipartite-pure", "dims": [3, 3], "data": [[2, 0, 0], [0, 2, 0], [0, 0, 1]]})").string();
    EXPECT_NEAR(run_json("entanglement -i " + corr)["results"][0]["e_tr"].get<double>(), kExample, 1e-12);

    const std::string flat = pure_file("flat.json", {1, 0, 0, 0, 0, 1});
    EXPECT_NEAR(run_json("entanglement -i " + flat + " --split 2")["results"][0]["e_tr"].get<double>(), 1.0, 1e-12);
    const Invocation mismatch = run("entanglement -i " + flat + " --split 4");
    EXPECT_EQ(mismatch.code, 1);
    EXPECT_NE(mismatch.err.find("divisible"), std::string::npos);
}

TEST(Cli, RandomIsReproducibleAndThreadIndependent)
{
    const Invocation a = run("random --kind pure --n 5 --count 20 --seed 9", "COHERENCE_KIT_THREADS=1");
    const Invocation b = run("random --kind pure --n 5 --count 20 --seed 9", "COHERENCE_KIT_THREADS=4");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, run("random --kind pure --n 5 --count 20 --seed 10").out);
    const Invocation one = run("random --kind pure --n 1 --seed 9");
    std::istringstream s(one.out);
    const StateFile sf = read_state(s);
    EXPECT_EQ(sf.data(0, 0), Complex(1.0, 0.0));
}

TEST(Cli, RandomQubitMeanCoherenceIsInsideTheUnitInterval)
{
    const fs::path states = work_dir() / "qubits.jsonl";
    ASSERT_EQ(run("random --kind pure --n 2 --count 1000 --seed 4 -o " + states.string()).code, 0);
    const Json r = run_json("measures -i " + states.string() + " -m tr");
    double total = 0.0;
    for (const Json& item : r["results"])
        total += item["values"]["tr"]["value"].get<double>();
    const double mean = total / 1000.0;
    EXPECT_GT(mean, 0.0);
    EXPECT_LT(mean, 1.0);
}

TEST(Cli, RandomKindsParse)
{
    for (const std::string kind : {"real-pure", "mixed", "incoherent", "real-separable", "bipartite-pure"}) {
        const Invocation r = run("random --kind " + kind + " --n 2 --count 3 --seed 2");
        ASSERT_EQ(r.code, 0) << kind << ": " << r.err;
        std::istringstream s(r.out);
        EXPECT_EQ(read_states(s).size(), 3u) << kind;
    }
    EXPECT_EQ(run("random --kind nope").code, 1);
    EXPECT_EQ(run("random --n 0").code, 1);
}

TEST(Cli, ReportsAreDeterministicApartFromTimings)
{
    const fs::path states = work_dir() / "det.jsonl";
    ASSERT_EQ(run("random --kind mixed --n 3 --count 4 --seed 5 -o " + states.string()).code, 0);
    Json a = run_json("measures -i " + states.string());
    Json b = run_json("measures -i " + states.string());
    a.erase("timings");
    b.erase("timings");
    EXPECT_EQ(dump_json(a), dump_json(b));

    Json c = run_json("bench --sizes 100,1000 --repetitions 2 --seed 3");
    Json d = run_json("bench --sizes 100,1000 --repetitions 2 --seed 3");
    EXPECT_TRUE(c["timings"].contains("loglog_slope"));
    c.erase("timings");
    d.erase("timings");
    EXPECT_EQ(dump_json(c), dump_json(d));
}

TEST(Cli, OracleMatchesClosedForm)
{
    const std::string in = pure_file("qutrito.json", {2.0 / 3, 2.0 / 3, 1.0 / 3});
    const Json sg = run_json("oracle -i " + in)["results"][0];
    EXPECT_TRUE(sg["approximate"].get<bool>());
    EXPECT_NEAR(sg["value"].get<double>(), kExample, 1e-4);
    const Json grid = run_json("oracle -i " + in + " --method grid --resolution 100")["results"][0];
    EXPECT_LE(std::abs(grid["difference"].get<double>()), grid["error_bound"].get<double>());
    EXPECT_EQ(run("oracle -i " + in + " --method newton").code, 1);
}

TEST(Cli, ChannelVerify)
{
    const fs::path sigma = work_dir() / "sep.jsonl";
    ASSERT_EQ(run("random --kind real-separable --n 3 --count 5 --seed 6 -o " + sigma.string()).code, 0);
    const std::string target = write_file("target.json",
        R"({"kind": "bipartite-pure", "dims": [3, 3], "data": [[2, 0, 0], [0, 2, 0], [0, 0, 1]]})").string();
    const Json r = run_json("channel-verify -i " + sigma.string() + " -t " + target);
    EXPECT_TRUE(r["all_passed"].get<bool>());
    EXPECT_EQ(r["results"].size(), 5u);
    EXPECT_EQ(r["results"][0]["kraus_operators"], 13);
    EXPECT_LE(r["results"][0]["completeness_error"].get<double>(), 1e-12);

    const std::string bell = write_file("bellmixed.json",
        R"({"kind": "mixed", "dims": [4], "data": [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]})").string();
    const Invocation nppt = run("channel-verify -i " + bell);
    EXPECT_EQ(nppt.code, 1);
    EXPECT_NE(nppt.err.find("PPT"), std::string::npos);
}

TEST(Cli, TableFormatAndOutputFile)
{
    const std::string in = pure_file("qutritt.json", {2.0 / 3, 2.0 / 3, 1.0 / 3});
    const fs::path out = work_dir() / "report.txt";
    ASSERT_EQ(run("measures -i " + in + " -m l1 --format table -o " + out.string()).code, 0);
    const std::string text = read_file(out);
    EXPECT_NE(text.find("results[0].values.l1"), std::string::npos) << text;
    EXPECT_NE(text.find("1.777777777777777"), std::string::npos);
}
