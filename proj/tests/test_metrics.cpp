#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "spillnet/fevd.hpp"
#include "spillnet/metrics.hpp"
#include "spillnet/panel.hpp"
#include "spillnet/vma.hpp"
#include "support.hpp"

using namespace spillnet;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = SPILLNET_TEST_DATA_DIR;

struct PrintedTable {
    FevdTable table;
    std::vector<std::string> labels;
    Eigen::MatrixXi mask;
};

PrintedTable load_printed_table() {
    const Panel panel = load_panel(kDataDir + "/dy2009_table3.csv", true, false);
    PrintedTable out;
    out.table.shares = panel.values / 100.0;
    out.table.kind = DecompKind::fevd;
    out.table.horizon = 10;
    out.labels = panel.labels;
    out.mask = load_matrix_csv(kDataDir + "/dy2009_table3_mask.csv").cast<int>();
    return out;
}

int label_index(const std::vector<std::string>& labels, const std::string& name) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

TEST_CASE("spillover_summary of an isolated system is all zero") {
    FevdTable table{Eigen::MatrixXd::Identity(3, 3), DecompKind::fevd, 1};
    const SpilloverSummary s = spillover_summary(table, Eigen::MatrixXi::Identity(3, 3));
    CHECK(s.total_index == 0.0);
    CHECK(s.fix.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.tix.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.nix.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.in_degree.maxCoeff() == 0);
    CHECK(s.out_degree.maxCoeff() == 0);
}

TEST_CASE("the printed global stock market table reproduces its margins") {
    const PrintedTable printed = load_printed_table();
    const int us = label_index(printed.labels, "US");
    const int uk = label_index(printed.labels, "UK");
    const int cl = label_index(printed.labels, "CL");
    REQUIRE(us >= 0);

    SUBCASE("dense reading: FIX and the total index") {
        const SpilloverSummary s = spillover_summary(printed.table, full_mask(19));
        CHECK(s.fix(us) == doctest::Approx(6.0).epsilon(0.1));
        CHECK(s.fix(uk) == doctest::Approx(44.0).epsilon(0.02));
        CHECK(s.total_index == doctest::Approx(35.5).epsilon(0.015));
    }
    SUBCASE("selected-cell reading: degrees") {
        const SpilloverSummary s = spillover_summary(printed.table, printed.mask);
        CHECK(s.in_degree(us) == 2);
        CHECK(s.out_degree(us) == 18);
        CHECK(s.out_degree(cl) == 0);
        int active = 0;
        for (int i = 0; i < 19; ++i)
            for (int j = 0; j < 19; ++j)
                if (i != j && printed.mask(i, j) == 1) ++active;
        CHECK(s.in_degree.sum() == active);
        CHECK(s.out_degree.sum() == active);
    }
    SUBCASE("net indices cancel in the aggregate") {
        const SpilloverSummary s = spillover_summary(printed.table, printed.mask);
        CHECK((s.nix - (s.tix - s.fix)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(s.nix.sum() == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("full-mask totals complement the diagonal share") {
    std::mt19937_64 engine(91);
    const auto sys = testsupport::random_stationary_system(5, 1, 0.6, engine);
    const FevdTable table =
        fevd_table(fevd_contributions(vma_coefficients(sys.phi, 6), cholesky_factor(sys.sigma)));
    const SpilloverSummary s = spillover_summary(table, full_mask(5));
    const double mean_diag = table.shares.diagonal().mean();
    CHECK(s.total_index + mean_diag * 100.0 == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("export_table") {
    const PrintedTable printed = load_printed_table();
    const fs::path dir = fs::temp_directory_path();

    SUBCASE("csv re-parses to the table within print precision") {
        const fs::path path = dir / "spillnet_table.csv";
        export_table(printed.table, full_mask(19), printed.labels, TableFormat::csv, path.string());
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header.rfind("To\\From,US,UK", 0) == 0);
        for (int i = 0; i < 19; ++i) {
            std::string line;
            REQUIRE(std::getline(in, line));
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ',');
            CHECK(cell == printed.labels[static_cast<std::size_t>(i)]);
            for (int j = 0; j < 19; ++j) {
                std::getline(ss, cell, ',');
                CHECK(std::stod(cell) / 100.0 ==
                      doctest::Approx(printed.table.shares(i, j)).epsilon(5e-4));
            }
        }
        // margin rows follow
        std::string line;
        REQUIRE(std::getline(in, line));
        CHECK(line.rfind("TIX,", 0) == 0);
        REQUIRE(std::getline(in, line));
        CHECK(line.rfind("IN,", 0) == 0);
        REQUIRE(std::getline(in, line));
        CHECK(line.rfind("OUT,", 0) == 0);
        fs::remove(path);
    }

    SUBCASE("dot output lists one edge per retained cell") {
        const fs::path path = dir / "spillnet_graph.dot";
        Eigen::MatrixXd shares(2, 2);
        shares << 0.8, 0.2, 0.3, 0.7;
        const FevdTable small{shares, DecompKind::fevd, 5};
        export_table(small, full_mask(2), {"a", "b"}, TableFormat::dot, path.string());
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(text.find("\"b\" -> \"a\" [weight=0.2]") != std::string::npos);
        CHECK(text.find("\"a\" -> \"b\" [weight=0.3]") != std::string::npos);
        CHECK(text.find("net_sign") != std::string::npos);
        fs::remove(path);
    }

    SUBCASE("an empty mask yields isolated nodes") {
        const fs::path path = dir / "spillnet_empty.dot";
        Eigen::MatrixXd shares = Eigen::MatrixXd::Identity(3, 3);
        const FevdTable small{shares, DecompKind::fevd, 1};
        export_table(small, Eigen::MatrixXi::Identity(3, 3), {"x", "y", "z"}, TableFormat::dot,
                     path.string());
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(text.find("->") == std::string::npos);
        CHECK(text.find("\"x\"") != std::string::npos);
        fs::remove(path);
    }

    SUBCASE("json round-trips shares at full precision") {
        const fs::path path = dir / "spillnet_table.json";
        export_table(printed.table, printed.mask, printed.labels, TableFormat::json, path.string());
        std::ifstream in(path);
        const nlohmann::json j = nlohmann::json::parse(in);
        CHECK(j["labels"].size() == 19);
        CHECK(j["shares"][1][0].get<double>() == printed.table.shares(1, 0));
        CHECK(j["mask"][0][3].get<int>() == 0);
        fs::remove(path);
    }
}

TEST_CASE("spillover_summary validates inputs") {
    FevdTable table{Eigen::MatrixXd::Identity(3, 3), DecompKind::fevd, 1};
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(spillover_summary(table, Eigen::MatrixXi::Identity(2, 2)),
                        std::invalid_argument);
    }
    SUBCASE("broken mask diagonal") {
        Eigen::MatrixXi mask = Eigen::MatrixXi::Zero(3, 3);
        CHECK_THROWS_AS(spillover_summary(table, mask), std::invalid_argument);
    }
}
