// Command-line front end: loads a config file, runs one scenario, writes
// the report bundle. Prints a single JSON object to stdout: {"status":"ok",...}
// on success, {"error":{...}} otherwise.

#include <cstdint>
#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qkdnet/config.hpp"
#include "qkdnet/errors.hpp"
#include "qkdnet/scenario.hpp"

namespace {

using nlohmann::json;

int fail(const std::string& type, const std::string& message) {
  json err;
  err["error"]["type"] = type;
  err["error"]["message"] = message;
  std::cout << err.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement-distribution QKD network simulator"};

  std::string config_path;
  std::string scenario;
  std::uint64_t seed = 0;
  std::string out_dir;
  int workers = 1;
  bool blind = false;

  app.add_option("--config", config_path, "scenario config file")->required();
  app.add_option("--scenario", scenario, "scenario name")->required();
  app.add_option("--seed", seed, "master random seed")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);
  app.add_flag("--blind", blind, "omit ground-truth columns from reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    json err;
    err["error"]["type"] = "usage";
    err["error"]["message"] = e.what();
    std::cout << err.dump() << std::endl;
    return 2;
  }

  try {
    qkdnet::ScenarioConfig cfg = qkdnet::load_config_file(config_path);
    cfg.scenario = scenario;
    cfg.seed = seed;
    cfg.out_dir = out_dir;
    cfg.workers = workers;
    cfg.blind = blind;

    const std::vector<std::string> files = qkdnet::run_scenario(cfg);

    json ok;
    ok["status"] = "ok";
    ok["scenario"] = scenario;
    ok["seed"] = seed;
    ok["out_dir"] = out_dir;
    ok["files"] = files;
    std::cout << ok.dump() << std::endl;
    return 0;
  } catch (const qkdnet::ConfigError& e) {
    return fail("config", e.what());
  } catch (const qkdnet::UnavailableRouteError& e) {
    return fail("route", e.what());
  } catch (const qkdnet::InsufficientDataError& e) {
    return fail("insufficient-data", e.what());
  } catch (const qkdnet::ContractViolation& e) {
    return fail("contract", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("argument", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
}
