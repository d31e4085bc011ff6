#include "orbitclt/orbitclt.h"

#include "orbitclt/commands.hpp"

#include <cstring>
#include <new>

struct orbitclt_system {
    orbitclt::SymbolicSystem system;
};

struct orbitclt_result {
    orbitclt::CommandOutput output;
    std::string summary;
};

namespace {

thread_local std::string last_error;

orbitclt_status status_for(orbitclt::ErrorCode code)
{
    if (code == orbitclt::ErrorCode::InvalidArgument)
        return ORBITCLT_INVALID_ARGUMENT;
    switch (orbitclt::exit_code_for(code)) {
    case 1:
        return code == orbitclt::ErrorCode::ValidationFailure ? ORBITCLT_VALIDATION_FAILED : ORBITCLT_INVALID_ARGUMENT;
    case 2:
        return ORBITCLT_PARSE_ERROR;
    case 3:
        return ORBITCLT_BUDGET_EXCEEDED;
    default:
        return ORBITCLT_INTERNAL_ERROR;
    }
}

template <class F>
orbitclt_status guarded(F&& body)
{
    last_error.clear();
    try {
        return body();
    } catch (const orbitclt::Error& e) {
        last_error = e.what();
        return status_for(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return ORBITCLT_INTERNAL_ERROR;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ORBITCLT_INTERNAL_ERROR;
    }
}

char* copy_string(const std::string& s)
{
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* orbitclt_version(void)
{
    return "1.0.0";
}

const char* orbitclt_last_error(void)
{
    return last_error.c_str();
}

orbitclt_status orbitclt_system_from_json(const char* json, orbitclt_system** out)
{
    return guarded([&] {
        if (!json || !out)
            throw orbitclt::Error(orbitclt::ErrorCode::InvalidArgument, "null argument");
        *out = new orbitclt_system{orbitclt::system_from_json(orbitclt::parse_json(json))};
        return ORBITCLT_OK;
    });
}

orbitclt_status orbitclt_system_golden_mean(orbitclt_system** out)
{
    return guarded([&] {
        if (!out)
            throw orbitclt::Error(orbitclt::ErrorCode::InvalidArgument, "null argument");
        *out = new orbitclt_system{orbitclt::SymbolicSystem::golden_mean()};
        return ORBITCLT_OK;
    });
}

orbitclt_status orbitclt_system_full_shift(unsigned symbols, orbitclt_system** out)
{
    return guarded([&] {
        if (!out)
            throw orbitclt::Error(orbitclt::ErrorCode::InvalidArgument, "null argument");
        *out = new orbitclt_system{orbitclt::SymbolicSystem::full_shift(symbols)};
        return ORBITCLT_OK;
    });
}

void orbitclt_system_free(orbitclt_system* system)
{
    delete system;
}

size_t orbitclt_system_symbols(const orbitclt_system* system)
{
    return system ? system->system.num_symbols() : 0;
}

orbitclt_status orbitclt_periodic_count(const orbitclt_system* system, size_t n, char** out)
{
    return guarded([&] {
        if (!system || !out)
            throw orbitclt::Error(orbitclt::ErrorCode::InvalidArgument, "null argument");
        *out = copy_string(orbitclt::format_bigint(orbitclt::periodic_count(system->system, n)));
        return ORBITCLT_OK;
    });
}

void orbitclt_string_free(char* text)
{
    delete[] text;
}

orbitclt_status orbitclt_run(const char* config_json, const orbitclt_run_options* options, orbitclt_result** out)
{
    return guarded([&] {
        if (!config_json || !out)
            throw orbitclt::Error(orbitclt::ErrorCode::InvalidArgument, "null argument");
        *out = nullptr;
        orbitclt::RunOptions ro;
        if (options) {
            if (options->has_seed)
                ro.seed = options->seed;
            ro.workers = options->workers;
            ro.emit_plot_data = options->emit_plot_data != 0;
            if (options->base_dir)
                ro.base_dir = options->base_dir;
        }
        auto result = new orbitclt_result{orbitclt::run_config(orbitclt::parse_json(config_json), ro), {}};
        result->summary = orbitclt::dump_canonical(result->output.summary);
        *out = result;
        return result->output.passed ? ORBITCLT_OK : ORBITCLT_VALIDATION_FAILED;
    });
}

const char* orbitclt_result_summary(const orbitclt_result* result)
{
    return result ? result->summary.c_str() : "";
}

int orbitclt_result_passed(const orbitclt_result* result)
{
    return result && result->output.passed ? 1 : 0;
}

size_t orbitclt_result_file_count(const orbitclt_result* result)
{
    return result ? result->output.files.size() : 0;
}

const char* orbitclt_result_file_name(const orbitclt_result* result, size_t index)
{
    if (!result || index >= result->output.files.size())
        return nullptr;
    return result->output.files[index].first.c_str();
}

const char* orbitclt_result_file_content(const orbitclt_result* result, size_t index)
{
    if (!result || index >= result->output.files.size())
        return nullptr;
    return result->output.files[index].second.c_str();
}

void orbitclt_result_free(orbitclt_result* result)
{
    delete result;
}

} // extern "C"
