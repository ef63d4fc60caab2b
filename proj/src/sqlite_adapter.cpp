#include <sqlite3.h>

#include <filesystem>

#include "adaquery/adapter.hpp"
#include "adaquery/error.hpp"

namespace adaquery {

namespace {

// Aborts statements after this many progress callbacks (1000 VM ops each).
constexpr int kProgressLimit = 20000;

bool is_fatal(int rc) {
    switch (rc & 0xff) {
        case SQLITE_NOMEM:
        case SQLITE_IOERR:
        case SQLITE_CORRUPT:
        case SQLITE_CANTOPEN:
        case SQLITE_NOTADB:
        case SQLITE_FULL: return true;
        default: return false;
    }
}

class SqliteAdapter : public Adapter {
public:
    ~SqliteAdapter() override { close(); }

    void open(const std::string& config) override {
        close();
        path_ = config;
        if (path_ != ":memory:") {
            std::error_code ec;
            for (const char* ext : {"", "-journal", "-wal", "-shm"})
                std::filesystem::remove(path_ + ext, ec);
        }
        if (sqlite3_open_v2(path_.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) != SQLITE_OK) {
            std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
            close();
            throw FatalAdapterError("cannot open sqlite database '" + config + "': " + msg);
        }
        sqlite3_progress_handler(db_, 1000, &SqliteAdapter::progress, this);
    }

    ExecutionStatus execute(const std::string& sql) override { return run(sql, nullptr); }

    QueryResult query(const std::string& sql) override {
        QueryResult r;
        r.status = run(sql, &r.rows);
        if (!r.status.ok()) r.rows = {};
        return r;
    }

    void close() override {
        if (db_) sqlite3_close_v2(db_);
        db_ = nullptr;
    }

    Normalization normalization() const override { return Normalization::Dynamic; }

    std::string instance_config(const std::string& config, const std::string& suffix) const override {
        if (config == ":memory:" || suffix.empty()) return config;
        return config + "." + suffix;
    }

private:
    sqlite3* db_ = nullptr;
    std::string path_;
    int ticks_ = 0;

    static int progress(void* self) { return ++static_cast<SqliteAdapter*>(self)->ticks_ > kProgressLimit; }

    ExecutionStatus run(const std::string& sql, ResultSet* out) {
        if (!db_) return ExecutionStatus::fatal("no open sqlite connection");
        ticks_ = 0;
        sqlite3_stmt* stmt = nullptr;
        int rc = sqlite3_prepare_v2(db_, sql.c_str(), static_cast<int>(sql.size()), &stmt, nullptr);
        if (rc != SQLITE_OK) {
            std::string msg = sqlite3_errmsg(db_);
            sqlite3_finalize(stmt);
            return is_fatal(rc) ? ExecutionStatus::fatal(msg) : ExecutionStatus::error(msg);
        }
        if (!stmt) return ExecutionStatus::success();
        const int ncol = sqlite3_column_count(stmt);
        if (out) out->columns = static_cast<std::size_t>(ncol);
        while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
            if (!out) continue;
            Row row;
            row.reserve(static_cast<std::size_t>(ncol));
            for (int c = 0; c < ncol; ++c) {
                switch (sqlite3_column_type(stmt, c)) {
                    case SQLITE_INTEGER: row.push_back(Value::integer(sqlite3_column_int64(stmt, c))); break;
                    case SQLITE_FLOAT: row.push_back(Value::real(sqlite3_column_double(stmt, c))); break;
                    case SQLITE_NULL: row.push_back(Value::null()); break;
                    default: {
                        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt, c));
                        const int n = sqlite3_column_bytes(stmt, c);
                        row.push_back(Value::text(std::string(p ? p : "", static_cast<std::size_t>(n))));
                    }
                }
            }
            out->rows.push_back(std::move(row));
        }
        std::string msg = rc == SQLITE_DONE ? "" : sqlite3_errmsg(db_);
        sqlite3_finalize(stmt);
        if (rc == SQLITE_DONE) return ExecutionStatus::success();
        if (rc == SQLITE_INTERRUPT) return ExecutionStatus::error("interrupted: statement exceeded the step budget");
        return is_fatal(rc) ? ExecutionStatus::fatal(msg) : ExecutionStatus::error(msg);
    }
};

}  // namespace

std::unique_ptr<Adapter> make_sqlite_adapter() { return std::make_unique<SqliteAdapter>(); }

}  // namespace adaquery
