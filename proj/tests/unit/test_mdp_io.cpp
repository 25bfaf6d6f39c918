#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lrq/control_tasks.hpp"
#include "lrq/errors.hpp"
#include "lrq/mdp_io.hpp"
#include "support/oracles.hpp"

using namespace lrq;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "lrq_io_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(MatrixIo, RoundTripsExactly) {
    const auto m = lrq::testing::random_dense(7, 3, 2);
    std::stringstream buf;
    write_matrix(buf, m);
    EXPECT_EQ(buf.str().size(), 8u + 4 + 4 + 8 + 8 + 7 * 3 * 8);
    EXPECT_EQ(buf.str().substr(0, 6), "LRQMAT");
    EXPECT_EQ(read_matrix(buf), m);
}

TEST(MatrixIo, FileRoundTrip) {
    const auto path = temp_path("m.bin");
    const auto m = lrq::testing::random_dense(4, 4, 9);
    save_matrix(path, m);
    EXPECT_EQ(load_matrix(path), m);
}

TEST(MatrixIo, RejectsBadMagicVersionAndTruncation) {
    std::stringstream buf;
    write_matrix(buf, DenseMatrix{{1, 2}, {3, 4}});
    const std::string good = buf.str();

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    std::stringstream s1(bad_magic);
    EXPECT_THROW(read_matrix(s1), FormatError);

    std::string bad_version = good;
    bad_version[8] = 9;
    std::stringstream s2(bad_version);
    EXPECT_THROW(read_matrix(s2), FormatError);

    std::stringstream s3(good.substr(0, good.size() - 3));
    EXPECT_THROW(read_matrix(s3), FormatError);

    EXPECT_THROW(load_matrix(temp_path("does_not_exist.bin")), std::exception);
}

TEST(MdpIo, RoundTripsDiscretisedModel) {
    const auto task = pendulum_task();
    const auto mdp = discretize(task, GridSpec{{5, 6}, 4}, 0.9);
    std::stringstream buf;
    write_mdp(buf, mdp);
    EXPECT_EQ(buf.str().substr(0, 6), "LRQMDP");
    EXPECT_EQ(read_mdp(buf), mdp);

    const auto path = temp_path("mdp.bin");
    save_mdp(path, mdp);
    EXPECT_EQ(load_mdp(path), mdp);
}

TEST(MdpIo, RejectsCorruptPayload) {
    const auto mdp = lrq::testing::random_mdp(4, 2, 0.5, 1);
    std::stringstream buf;
    write_mdp(buf, mdp);
    std::stringstream truncated(buf.str().substr(0, buf.str().size() - 1));
    EXPECT_THROW(read_mdp(truncated), FormatError);
    std::stringstream matrix_as_mdp;
    write_matrix(matrix_as_mdp, DenseMatrix(1, 1));
    EXPECT_THROW(read_mdp(matrix_as_mdp), FormatError);
}

TEST(PolicyCsv, RoundTrip) {
    const auto path = temp_path("policy.csv");
    const Policy pi{{3, 0, 2, 2, 1}};
    save_policy_csv(path, pi);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "state,action");
    EXPECT_EQ(load_policy_csv(path), pi);
}

TEST(PolicyCsv, RejectsMalformedRows) {
    const auto path = temp_path("bad_policy.csv");
    {
        std::ofstream out(path);
        out << "state,action\n0,1\n2,0\n";
    }
    EXPECT_THROW(load_policy_csv(path), FormatError);
    {
        std::ofstream out(path);
        out << "state,action\n0,x\n";
    }
    EXPECT_THROW(load_policy_csv(path), FormatError);
}
